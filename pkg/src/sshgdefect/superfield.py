"""Superfields on the two-generator superspace, super-derivatives and residuals.

A superfield is stored as a map from derivative multi-indices ``(i, j)``
(``i`` plus-derivatives, ``j`` minus-derivatives) to the assembled algebra
element.  ``theta1`` and ``theta2`` sit on the two highest generator bits of
the superspace table, so every component is recovered by a mask operation.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import comb
from typing import Optional

from .grassmann import (GeneratorTable, GradingError, GrassmannElement, cosh, embed, left_derivative,
                        restrict, sinh)
from .model import BulkPoint, JetError

THETA1 = "theta1"
THETA2 = "theta2"

# derivative multi-index labels used by SuperJet
SLOTS = {"value": (0, 0), "dplus": (1, 0), "dminus": (0, 1), "dplusminus": (1, 1),
         "dplusplus": (2, 0), "dminusminus": (0, 2)}


@functools.lru_cache(maxsize=None)
def superspace_table(base: GeneratorTable) -> GeneratorTable:
    if THETA1 in base.index or THETA2 in base.index:
        raise ValueError("base table already carries superspace generators")
    return GeneratorTable(list(base.names) + [THETA1, THETA2])


Components = tuple  # (scalar, bar-slot, slot, top) in the layout phi, psibar, psi, F


@dataclass(frozen=True)
class SuperJet:
    """Components ``(phi, psibar, psi, F)`` and light-cone derivative tuples.

    The same layout hosts any superfield ``A - i th1 B + i th2 C - i th1 th2 D``;
    the grading of the lowest component decides the grading of the others.
    """

    value: Components
    dplus: Optional[Components] = None
    dminus: Optional[Components] = None
    dplusminus: Optional[Components] = None
    dplusplus: Optional[Components] = None
    dminusminus: Optional[Components] = None

    @property
    def base(self) -> GeneratorTable:
        return self.value[0].table

    def check_grading(self, atol: float = 1e-12) -> None:
        lead = self.value[0].parity(atol)
        flip = {"even": "odd", "odd": "even"}
        if lead not in flip:
            raise GradingError("lowest component must be homogeneous")
        want = (lead, flip[lead], flip[lead], lead)
        for name in SLOTS:
            comp = getattr(self, name)
            if comp is None:
                continue
            for c, w in zip(comp, want):
                if not (c.max_abs() <= atol or c.parity(atol) == w):
                    raise GradingError(f"component of {name} has wrong grading")


def assemble_components(comp: Components, table: GeneratorTable) -> GrassmannElement:
    a, b, c, d = (embed(x, table) for x in comp)
    th1 = table.gen(THETA1)
    th2 = table.gen(THETA2)
    return a - 1j * th1 * b + 1j * th2 * c - 1j * th1 * th2 * d


def assemble(jet: SuperJet) -> GrassmannElement:
    """``phi - i th1 psibar + i th2 psi - i th1 th2 F`` as one element."""
    return assemble_components(jet.value, superspace_table(jet.base))


def disassemble(x: GrassmannElement, base: GeneratorTable) -> Components:
    """Inverse of :func:`assemble_components`; components live over ``base``."""
    d1 = left_derivative(x, THETA1)
    d2 = left_derivative(x, THETA2)
    a = restrict(x, base)
    b = restrict(1j * d1, base)
    c = restrict(-1j * d2, base)
    d = restrict(1j * left_derivative(d1, THETA2), base)
    return a, b, c, d


class Superfield:
    """Assembled superfield together with whichever derivative slots are known."""

    def __init__(self, slots: dict):
        if (0, 0) not in slots:
            raise JetError("superfield needs a value slot")
        self.slots = dict(slots)

    @classmethod
    def from_jet(cls, jet: SuperJet) -> "Superfield":
        table = superspace_table(jet.base)
        slots = {}
        for name, key in SLOTS.items():
            comp = getattr(jet, name)
            if comp is not None:
                slots[key] = assemble_components(comp, table)
        return cls(slots)

    @classmethod
    def constant(cls, x: GrassmannElement) -> "Superfield":
        """A field with no spacetime dependence (all derivative slots zero)."""
        z = x.table.zero()
        return cls({k: (x if k == (0, 0) else z) for k in SLOTS.values()})

    @property
    def value(self) -> GrassmannElement:
        return self.slots[(0, 0)]

    @property
    def table(self) -> GeneratorTable:
        return self.value.table

    def slot(self, key) -> GrassmannElement:
        try:
            return self.slots[key]
        except KeyError:
            raise JetError(f"superfield is missing derivative slot {key}") from None

    # linear structure ----------------------------------------------------
    def _zip(self, other, op):
        if isinstance(other, Superfield):
            keys = self.slots.keys() & other.slots.keys()
            return Superfield({k: op(self.slots[k], other.slots[k]) for k in keys})
        return Superfield({k: op(v, other if k == (0, 0) else 0) for k, v in self.slots.items()})

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return Superfield({k: -v for k, v in self.slots.items()})

    def __mul__(self, other):
        if isinstance(other, Superfield):
            return leibniz_product(self, other)
        return Superfield({k: v * other for k, v in self.slots.items()})

    def __rmul__(self, other):
        return Superfield({k: other * v for k, v in self.slots.items()})

    def components(self, key=(0, 0), base: Optional[GeneratorTable] = None) -> Components:
        base = base or GeneratorTable(self.table.names[:-2])
        return disassemble(self.slot(key), base)


def leibniz_product(x: Superfield, y: Superfield) -> Superfield:
    """Product with derivative slots filled by the Leibniz rule where possible."""
    out = {}
    for (i, j) in x.slots.keys() | y.slots.keys():
        acc = None
        ok = True
        for a in range(i + 1):
            for b in range(j + 1):
                xa = x.slots.get((a, b))
                yb = y.slots.get((i - a, j - b))
                if xa is None or yb is None:
                    ok = False
                    break
                term = comb(i, a) * comb(j, b) * (xa * yb)
                acc = term if acc is None else acc + term
            if not ok:
                break
        if ok:
            out[(i, j)] = acc
    return Superfield(out)


def superD(sign: str, x: Superfield) -> Superfield:
    """``D+ = -i d/dth1 + th1 d+`` and ``D- = i d/dth2 + th2 d-`` on every computable slot."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    table = x.table
    out = {}
    for (i, j), v in x.slots.items():
        if sign == "+":
            nxt = x.slots.get((i + 1, j))
            if nxt is not None:
                out[(i, j)] = -1j * left_derivative(v, THETA1) + table.gen(THETA1) * nxt
        else:
            nxt = x.slots.get((i, j + 1))
            if nxt is not None:
                out[(i, j)] = 1j * left_derivative(v, THETA2) + table.gen(THETA2) * nxt
    if (0, 0) not in out:
        raise JetError(f"D{sign} needs the first {sign}-derivative of the superfield")
    return Superfield(out)


def sshg_super_residual(jet: SuperJet, m: float) -> GrassmannElement:
    """``D+ D- Phi - i m sinh(Phi)`` for the superfield described by ``jet``."""
    phi = Superfield.from_jet(jet)
    lhs = superD("+", superD("-", phi)).value
    return lhs - 1j * m * sinh(phi.value)


def sector_residuals(jet: SuperJet, m: float) -> dict[str, GrassmannElement]:
    """Components of the superfield residual, labelled by the equation each carries.

    Expanding, ``R = (iF - im sinh phi) + th2 Y - th1 X + th1 th2 Z`` with
    ``X = d+psi + m psibar cosh phi``, ``Y = d-psibar + m psi cosh phi`` and
    ``Z = d+d-phi - m F cosh phi + im sinh(phi) psibar psi``.  In the layout
    ``A - i th1 B + i th2 C - i th1 th2 D`` that is ``X = iB``, ``Y = iC``,
    ``Z = -iD``.
    """
    a, b, c, d = disassemble(sshg_super_residual(jet, m), jet.base)
    return {"aux": a, "psi": 1j * b, "psibar": 1j * c, "boson": -1j * d}


def jet_from_bulk(p: BulkPoint, m: float, F: Optional[GrassmannElement] = None) -> SuperJet:
    """SuperJet of a bulk point; ``F`` defaults to its on-shell value ``m sinh phi``.

    First derivatives of ``F`` follow the chain rule of its on-shell form.  In
    the mixed second-derivative slot only the lowest component enters the
    superfield residual (the others are multiplied by ``th1 th2``), so the
    remaining entries are left at zero.
    """
    if F is None:
        F = m * sinh(p.phi)
    dp_phi, dm_phi = p.dplus("phi"), p.dminus("phi")
    dpm_phi = p.dplusminus_phi()
    z = p.table.zero()
    value = (p.phi, p.psibar, p.psi, F)
    dplus = (dp_phi, p.dplus("psibar"), p.dplus("psi"), m * cosh(p.phi) * dp_phi)
    dminus = (dm_phi, p.dminus("psibar"), p.dminus("psi"), m * cosh(p.phi) * dm_phi)
    dplusminus = (dpm_phi, z, z, z)
    return SuperJet(value, dplus, dminus, dplusminus)
