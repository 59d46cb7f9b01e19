"""Analytic one-soliton data on both sides of the defect.

Side 1 carries ``E1 = R1 exp(a x + b t)`` and side 2 ``E2 = z E1`` with the
fermion amplitudes related by ``s2 = zeta s1``.  Everything here is complex:
the transmission factor ``z`` is unimodular, so the "delay" is a phase.

Two independent derivative routes are provided.  :func:`eval_solution` uses
closed-form derivatives, while :func:`soliton_jets` differentiates the same
closed forms exactly through dual units attached to ``x`` and ``t``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .backlund import AuxState
from .dual import DualContext
from .grassmann import GeneratorTable, GrassmannElement, cosh, exp, log, sinh
from .model import BulkPoint

EPS = "eps"


@dataclass(frozen=True)
class SolitonParams:
    """Soliton and defect parameters (``omega_k = exp(eta_k)``)."""

    R1: complex = 0.5j
    s1: complex = 1.0
    theta: float = 0.7
    eta1: complex = 0.3
    eta2: complex = -0.2
    m: float = 1.0
    eps: str = EPS

    def __post_init__(self):
        if self.R1 == 0:
            raise ValueError("R1 must be nonzero")

    @classmethod
    def from_omegas(cls, omega1, omega2, **kw) -> "SolitonParams":
        return cls(eta1=complex(np.log(complex(omega1))), eta2=complex(np.log(complex(omega2))), **kw)

    @property
    def a(self) -> float:
        return -2 * self.m * np.cosh(self.theta)

    @property
    def b(self) -> float:
        return 2 * self.m * np.sinh(self.theta)

    @property
    def omega1(self) -> complex:
        return np.exp(self.eta1)

    @property
    def omega2(self) -> complex:
        return np.exp(self.eta2)

    @property
    def omegas(self) -> tuple:
        """``(w1, w2, w3, w4)`` with ``w1 w3 = w2 w4 = m``."""
        w1, w2 = self.omega1, self.omega2
        return w1, w2, self.m / w1, self.m / w2

    def table(self) -> GeneratorTable:
        return _default_table(self.eps)


@functools.lru_cache(maxsize=None)
def _default_table(eps: str) -> GeneratorTable:
    return GeneratorTable([eps])


# ---------------------------------------------------------------------------
# delay and defect parameters
# ---------------------------------------------------------------------------
def delay_z(theta, eta1, eta2):
    """The two admissible bosonic delays ``(z1, 1/z1)``."""
    p = np.exp(eta2 + theta)
    q = 1j * np.exp(eta1)
    z1 = ((p + q) / (p - q)) ** 2
    return z1, 1 / z1


def _rho(theta, eta1, eta2):
    u = (theta + eta2 - eta1) / 2
    rho = np.tanh(u + 1j * np.pi / 4)
    rho_t = 1 / np.tanh(u - 1j * np.pi / 4)
    return rho, rho_t


def delay_z_tanh(theta, eta1, eta2):
    """``z1`` written as the tanh-coth product."""
    rho, rho_t = _rho(theta, eta1, eta2)
    return rho * rho_t


# ---------------------------------------------------------------------------
# closed forms on algebra-valued coordinates
# ---------------------------------------------------------------------------
def _closed_forms(xe: GrassmannElement, te: GrassmannElement, p: SolitonParams, z, zeta):
    table = xe.table
    eps = table.gen(p.eps)
    X = exp(p.a * xe + p.b * te)
    out = {}
    for side, (R, s, shift, sgn) in {
        1: (p.R1, p.s1, 0.0, 1.0),
        2: (z * p.R1, zeta * p.s1, 1j * np.pi, -1.0),
    }.items():
        E = R * X
        phi = log((1 + E) / (1 - E)) + shift
        psibar = eps * (s * X * (1 / (1 + E) + 1 / (1 - E)))
        out[f"phi{side}"] = phi
        out[f"psibar{side}"] = psibar
        out[f"psi{side}"] = sgn * np.exp(p.theta) * psibar
    rho, rho_t = _rho(p.theta, p.eta1, p.eta2)
    w1, w2 = p.omega1, p.omega2
    R1, R2 = p.R1, z * p.R1
    elam = (1j * p.m / (w1 * w2)) * (1 + R1 * X) * (1 + R2 * X) / ((1 - rho * R1 * X) * (1 - rho_t * R1 * X))
    out["lambda0"] = log(elam)
    out["f1"], out["f1t"] = _aux_formula(out, p)
    return out


def _aux_formula(F: dict, p: SolitonParams):
    """Auxiliary fermions solved from the two algebraic defect relations."""
    m = p.m
    w1, w2 = p.omega1, p.omega2
    pp = F["phi1"] + F["phi2"]
    pm = F["phi1"] - F["phi2"]
    lam = F["lambda0"]
    psm = F["psi1"] - F["psi2"]
    pbm = F["psibar1"] - F["psibar2"]
    sh = sinh(pm / 2)
    el = exp(lam)
    den = (m**2 / (w1 * w2)) * exp((pp - lam) / 2) + (w1 * w2) * exp(-(pp - lam) / 2) * el * sh * sh
    inv = 1 / den
    f1 = -((m / w2) * pbm + w2 * exp(-pp / 2) * el * sh * psm) * inv
    f1t = -(m / w1 * exp(pp / 2) * psm - w1 * el * sh * pbm) * inv
    return f1, f1t


def _coords(x, t, table: GeneratorTable):
    return table.scalar(x), table.scalar(t)


# ---------------------------------------------------------------------------
# public evaluators
# ---------------------------------------------------------------------------
def eval_solution(side: int, x, t, params: SolitonParams, z, zeta,
                  table: Optional[GeneratorTable] = None) -> BulkPoint:
    """Bulk point of the one-soliton on ``side`` with closed-form derivatives.

    ``x`` and ``t`` may be arrays; the result is then a batch of elements.
    """
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    table = table or params.table()
    p = params
    a, b = p.a, p.b
    X = np.exp(a * np.asarray(x, dtype=complex) + b * np.asarray(t, dtype=complex))
    R = p.R1 if side == 1 else z * p.R1
    s = p.s1 if side == 1 else zeta * p.s1
    E = R * X
    if np.any(np.isclose(E, 1.0)) or np.any(np.isclose(E, -1.0)):
        raise ZeroDivisionError("soliton pole: E = +-1 at a requested point")
    one_m = 1 - E * E
    phi = np.log((1 + E) / (1 - E)) + (0 if side == 1 else 1j * np.pi)
    h1 = 2 * E / one_m                       # E dphi/dE
    h2 = 2 * E * (1 + E * E) / one_m**2     # E d(h1)/dE
    g = 2 / one_m
    # psibar / (eps s) = X g(E);  X d/dX [X g] = X (g + E g'(E)) with g' = 4E/(1-E^2)^2
    k1 = X * (g + E * 4 * E / one_m**2)
    eps = table.gen(p.eps)
    sgn = np.exp(p.theta) * (1 if side == 1 else -1)

    def even(v):
        return table.scalar(v)

    def odd(v):
        return eps * (s * np.asarray(v, dtype=complex))

    psibar = odd(X * g)
    pb_x = odd(a * k1)
    pb_t = odd(b * k1)
    return BulkPoint(
        phi=even(phi), psi=sgn * psibar, psibar=psibar,
        phi_x=even(a * h1), phi_t=even(b * h1),
        phi_xx=even(a * a * h2), phi_tt=even(b * b * h2), phi_xt=even(a * b * h2),
        psi_x=sgn * pb_x, psi_t=sgn * pb_t, psibar_x=pb_x, psibar_t=pb_t,
    )


def lambda0_analytic(t, params: SolitonParams, z, x=0.0):
    """``exp(lambda0)`` for ``z = z1``, optionally continued off the defect to ``x``."""
    p = params
    d = np.exp(p.a * np.asarray(x, dtype=complex) + p.b * np.asarray(t, dtype=complex))
    rho, rho_t = _rho(p.theta, p.eta1, p.eta2)
    R1, R2 = p.R1, z * p.R1
    return (1j * p.m / (p.omega1 * p.omega2)) * (1 + R1 * d) * (1 + R2 * d) / (
        (1 - rho * R1 * d) * (1 - rho_t * R1 * d))


def lambda0_from_fields(p1: BulkPoint, p2: BulkPoint, params: SolitonParams):
    """The two bosonic expressions for ``exp(-lambda0)`` and ``exp(lambda0)``.

    Both come from solving the pair of bosonic defect conditions for the
    defect field; they must be mutual inverses on a genuine solution.
    """
    w1, w2 = params.omega1, params.omega2
    m = params.m
    pp = (p1.phi + p2.phi).body()
    pm = (p1.phi - p2.phi).body()
    dxm = (p1.phi_x - p2.phi_x).body()
    dtm = (p1.phi_t - p2.phi_t).body()
    minus = dxm - dtm
    plus = dxm + dtm
    e_minus = -(w2**2 * np.exp(-pp) * minus + w1**2 * plus) / (4 * m**2 * np.sinh(pp))
    e_plus = -(w2**2 * np.exp(pp) * minus + w1**2 * plus) / (
        2 * w1**2 * w2**2 * np.sinh(pp) * (np.cosh(pm) - 1))
    return e_minus, e_plus


def aux_fermions_analytic(t, params: SolitonParams, z, zeta, x=0.0,
                          table: Optional[GeneratorTable] = None):
    """``(f1, f1t)`` from the closed-form solution of the algebraic relations."""
    table = table or params.table()
    xe, te = _coords(x, t, table)
    F = _closed_forms(xe, te, params, z, zeta)
    return F["f1"], F["f1t"]


def f_ratio_relation(t, params: SolitonParams, z, x=0.0):
    """Predicted ``f1 / f1t`` when the fermionic delay equals the bosonic one.

    The square root of ``(1+E1)(1+E2)/((1-E1)(1-E2))`` is taken on the branch
    ``-i exp(phi_+/2)`` that is continuous along the solution, and ``sqrt z``
    is the negative of the principal root.
    """
    p = params
    d = np.exp(p.a * np.asarray(x, dtype=complex) + p.b * np.asarray(t, dtype=complex))
    E1, E2 = p.R1 * d, z * p.R1 * d
    phi_plus = np.log((1 + E1) / (1 - E1)) + np.log((1 + E2) / (1 - E2)) + 1j * np.pi
    root = -1j * np.exp(phi_plus / 2)
    sz = -np.sqrt(complex(z))
    return -root * (1 + sz * p.R1 * d) / (1 - sz * p.R1 * d)


def f_ratio_principal(t, params: SolitonParams, z, x=0.0):
    """Same relation with the principal square root (sign jumps across its cut)."""
    p = params
    d = np.exp(p.a * np.asarray(x, dtype=complex) + p.b * np.asarray(t, dtype=complex))
    A = (1 + p.R1 * d) * (1 + z * p.R1 * d) / ((1 - p.R1 * d) * (1 - z * p.R1 * d))
    sz = -np.sqrt(complex(z))
    return -np.sqrt(A) * (1 + sz * p.R1 * d) / (1 - sz * p.R1 * d)


# ---------------------------------------------------------------------------
# exact jets through dual units
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SolitonJet:
    side1: BulkPoint
    side2: BulkPoint
    aux: AuxState


def soliton_jets(x, t, params: SolitonParams, z, zeta,
                 table: Optional[GeneratorTable] = None) -> SolitonJet:
    """All soliton and defect fields at ``(x, t)`` with exact first and second derivatives.

    ``x`` is shifted by one dual unit and ``t`` by another; first derivatives
    are single-unit components and the mixed one the two-unit component.
    Pure second derivatives use a second evaluation with both units on the
    same coordinate.
    """
    table = table or params.table()
    ctx = DualContext(table, 2)
    d0, d1 = ctx.unit(0), ctx.unit(1)
    x0, t0 = ctx.lift(table.scalar(x)), ctx.lift(table.scalar(t))
    F = _closed_forms(x0 + d0, t0 + d1, params, z, zeta)
    Fxx = _closed_forms(x0 + d0 + d1, t0, params, z, zeta)
    Ftt = _closed_forms(x0, t0 + d0 + d1, params, z, zeta)
    val = {k: ctx.part(v) for k, v in F.items()}
    dx = {k: ctx.part(v, 0) for k, v in F.items()}
    dt = {k: ctx.part(v, 1) for k, v in F.items()}
    dxt = {k: ctx.part(v, 0, 1) for k, v in F.items()}
    dxx = {k: ctx.part(v, 0, 1) for k, v in Fxx.items()}
    dtt = {k: ctx.part(v, 0, 1) for k, v in Ftt.items()}

    def bulk(s):
        return BulkPoint(
            phi=val[f"phi{s}"], psi=val[f"psi{s}"], psibar=val[f"psibar{s}"],
            phi_x=dx[f"phi{s}"], phi_t=dt[f"phi{s}"],
            phi_xx=dxx[f"phi{s}"], phi_tt=dtt[f"phi{s}"], phi_xt=dxt[f"phi{s}"],
            psi_x=dx[f"psi{s}"], psi_t=dt[f"psi{s}"],
            psibar_x=dx[f"psibar{s}"], psibar_t=dt[f"psibar{s}"],
        )

    aux = AuxState(
        lambda0=val["lambda0"], f1=val["f1"], f1t=val["f1t"],
        lambda0_x=dx["lambda0"], lambda0_t=dt["lambda0"],
        f1_x=dx["f1"], f1_t=dt["f1"], f1t_x=dx["f1t"], f1t_t=dt["f1t"],
    )
    return SolitonJet(bulk(1), bulk(2), aux)
