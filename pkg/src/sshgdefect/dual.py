"""Forward-mode differentiation by dual augmentation of the coefficient field.

A pair of extra generators ``a, b`` gives the even element ``d = a*b`` with
``d**2 == 0``: a dual unit that commutes with everything.  Evaluating any
algebra-valued function at ``x + d`` therefore yields ``f(x) + f'(x) d``
exactly, and with two independent units ``d1, d2`` the ``d1*d2`` component
carries the mixed second derivative.

Units are appended after the base generators, so reading off a derivative is
a slice of the coefficient array with no sign bookkeeping.
"""

from __future__ import annotations

import functools

import numpy as np

from .grassmann import GeneratorTable, GrassmannElement, embed


@functools.lru_cache(maxsize=None)
def augmented_table(base: GeneratorTable, units: int) -> GeneratorTable:
    names = list(base.names)
    for k in range(units):
        names += [f"_d{k}a", f"_d{k}b"]
    return GeneratorTable(names)


class DualContext:
    """Base table plus ``units`` dual infinitesimals."""

    def __init__(self, base: GeneratorTable, units: int = 1):
        self.base = base
        self.units = units
        self.table = augmented_table(base, units)

    def lift(self, x) -> GrassmannElement:
        if isinstance(x, GrassmannElement):
            return embed(x, self.table)
        return self.table.scalar(x)

    def unit(self, k: int = 0) -> GrassmannElement:
        return self.table.monomial((f"_d{k}a", f"_d{k}b"))

    def _unit_mask(self, ks) -> int:
        m = 0
        for k in ks:
            m |= 0b11 << (self.base.n + 2 * k)
        return m

    def part(self, y: GrassmannElement, *ks: int) -> GrassmannElement:
        """Component of ``y`` along the product of the dual units ``ks``."""
        off = self._unit_mask(ks)
        return GrassmannElement(self.base, y.coeffs[..., off: off + self.base.dim].copy())

    def value(self, y: GrassmannElement) -> GrassmannElement:
        return self.part(y)


def partial(fn, args: dict, wrt: str, base: GeneratorTable) -> GrassmannElement:
    """Exact partial of ``fn(**args)`` with respect to the even argument ``wrt``.

    ``fn`` must be written with algebra operations only; every argument is
    lifted into the augmented algebra and ``wrt`` is shifted by the dual unit.
    """
    ctx = DualContext(base, 1)
    lifted = {k: ctx.lift(v) for k, v in args.items()}
    lifted[wrt] = lifted[wrt] + ctx.unit(0)
    return ctx.part(fn(**lifted), 0)


def directional(fn, args: dict, tangents: dict, base: GeneratorTable):
    """Value and directional derivative of ``fn`` along ``tangents``.

    Tangents may be odd (e.g. the time derivative of a fermion); the dual unit
    is even, so ``x + dx*d`` keeps the parity of ``x``.
    """
    ctx = DualContext(base, 1)
    d = ctx.unit(0)
    lifted = {}
    for k, v in args.items():
        lv = ctx.lift(v)
        if k in tangents:
            lv = lv + ctx.lift(tangents[k]) * d
        lifted[k] = lv
    y = fn(**lifted)
    if isinstance(y, dict):
        return {k: ctx.value(v) for k, v in y.items()}, {k: ctx.part(v, 0) for k, v in y.items()}
    return ctx.value(y), ctx.part(y, 0)


def central_difference(fn, args: dict, wrt: str, h: float = 1e-5) -> GrassmannElement:
    """Central finite difference in the body of ``wrt``; cross-check for :func:`partial`."""
    up = dict(args)
    dn = dict(args)
    up[wrt] = args[wrt] + h
    dn[wrt] = args[wrt] - h
    return (fn(**up) - fn(**dn)) / (2 * h)


def as_array(y: GrassmannElement) -> np.ndarray:
    return y.coeffs
