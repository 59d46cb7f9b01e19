"""Type-II super-Baecklund transformation in the omega and fused parametrizations.

Component relations are returned as ordered dictionaries of ``LHS - RHS``
residuals with the keys in :data:`RELATIONS`.  The superfield form lives in
:func:`superfield_backlund_residuals`; :func:`generate_partner` integrates the
component relations along light-cone characteristics to build a partner
solution from a given one.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .grassmann import GeneratorTable, GrassmannElement, cosh, exp, sinh
from .model import BulkPoint, JetError, ModelParams

RELATIONS = ("dm_ppml", "dp_lam", "dp_pm", "dm_pm", "psm", "pbm",
             "dp_f1", "dm_f1", "dp_f1t", "dm_f1t")


class IntegrationError(RuntimeError):
    """Partner integration produced non-finite values or runaway residuals."""


@dataclass(frozen=True)
class AuxState:
    """Auxiliary defect fields ``lambda0`` (even) and ``f1``, ``f1t`` (odd).

    Derivative slots are lab-frame like :class:`~sshgdefect.model.BulkPoint`.
    """

    lambda0: GrassmannElement
    f1: GrassmannElement
    f1t: GrassmannElement
    lambda0_x: Optional[GrassmannElement] = None
    lambda0_t: Optional[GrassmannElement] = None
    f1_x: Optional[GrassmannElement] = None
    f1_t: Optional[GrassmannElement] = None
    f1t_x: Optional[GrassmannElement] = None
    f1t_t: Optional[GrassmannElement] = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def table(self) -> GeneratorTable:
        return self.lambda0.table

    def check_grading(self, atol: float = 1e-12) -> None:
        for name, want in (("lambda0", "even"), ("f1", "odd"), ("f1t", "odd")):
            v = getattr(self, name)
            if v.max_abs() > atol and v.parity(atol) != want:
                raise ValueError(f"{name} must be {want}")

    def need(self, *names: str):
        vals = []
        for n in names:
            v = getattr(self, n)
            if v is None:
                raise JetError(f"auxiliary state is missing derivative slot {n!r}")
            vals.append(v)
        return vals[0] if len(vals) == 1 else tuple(vals)

    def dplus(self, name: str) -> GrassmannElement:
        x, t = self.need(f"{name}_x", f"{name}_t")
        return (x + t) * 0.5

    def dminus(self, name: str) -> GrassmannElement:
        x, t = self.need(f"{name}_x", f"{name}_t")
        return (x - t) * 0.5

    def with_(self, **kw) -> "AuxState":
        return replace(self, **kw)


@dataclass(frozen=True)
class BacklundParams:
    """Either ``omega = (w1, w2, w3, w4)`` or the fused pair ``(sigma, tau)``."""

    m: float = 1.0
    omega: Optional[tuple] = None
    sigma: Optional[complex] = None
    tau: Optional[complex] = None

    def __post_init__(self):
        ModelParams(self.m)
        if (self.omega is None) == (self.sigma is None):
            raise ValueError("give exactly one of omega or (sigma, tau)")
        if self.omega is not None:
            if len(self.omega) != 4 or any(w == 0 for w in self.omega):
                raise ValueError("omega must be four nonzero constants")
        else:
            if self.sigma == 0:
                raise ValueError("sigma must be nonzero")
            if self.tau is None:
                raise ValueError("fused form needs tau")

    @classmethod
    def from_omega12(cls, omega1, omega2, m: float = 1.0) -> "BacklundParams":
        """Defect-compatible choice ``w3 = m / w1`` and ``w4 = m / w2``."""
        return cls(m=m, omega=(omega1, omega2, m / omega1, m / omega2))

    @classmethod
    def fused(cls, sigma, tau, m: float = 1.0) -> "BacklundParams":
        return cls(m=m, sigma=sigma, tau=tau)

    @property
    def is_fused(self) -> bool:
        return self.sigma is not None

    def defect_compatible(self, atol: float = 1e-12) -> bool:
        if self.is_fused:
            return True
        w1, w2, w3, w4 = self.omega
        return abs(w1 * w3 - self.m) <= atol and abs(w2 * w4 - self.m) <= atol


def fused_to_omega(sigma, m: float = 1.0) -> tuple:
    """Omega parameters reproducing the fused form at ``tau = i pi / 2``."""
    w1 = -np.sqrt(m / complex(sigma))
    w2 = np.sqrt(m * complex(sigma))
    return (w1, w2, -w2, -w1)


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------
def _omega_rhs(pp, pm, lam, f1, f1t, psp, pbp, omega, m):
    w1, w2, w3, w4 = omega
    A = pp - lam
    sh, ch = sinh(pm / 2), cosh(pm / 2)
    el, eA = exp(lam), exp(A)
    el2, eml2 = exp(lam / 2), exp(-lam / 2)
    eA2, emA2 = exp(A / 2), exp(-A / 2)
    return {
        "dm_ppml": -m * w1 / (2 * w3) * el * sinh(pm) + 0.5j * w1 * el2 * ch * psp * f1
                   - 0.5j * w1 * w4 * sh * f1t * f1,
        "dp_lam": -m * w2 / (2 * w4) * exp(-A) * sinh(pm) + 0.5j * w2 * emA2 * ch * pbp * f1t
                  + 0.5j * w2 * w3 * sh * f1 * f1t,
        "dp_pm": m * w2 / w4 * exp(-A) * sh * sh - m * w3 / w1 * eA - 0.5j * w3 * eA2 * pbp * f1
                 - 0.5j * w2 * emA2 * sh * pbp * f1t,
        "dm_pm": -m * w1 / w3 * el * sh * sh + m * w4 / w2 * exp(-lam)
                 - 0.5j * w4 * eml2 * psp * f1t + 0.5j * w1 * el2 * sh * psp * f1,
        "psm": -w1 * el2 * sh * f1 - w4 * eml2 * f1t,
        "pbm": w2 * emA2 * sh * f1t - w3 * eA2 * f1,
        "dp_f1": m / (2 * w1) * (eA2 * pbp + w2 * ch * f1t),
        "dm_f1": m / (2 * w3) * (el2 * sh * psp - w4 * ch * f1t),
        "dp_f1t": -m / (2 * w4) * (emA2 * sh * pbp + w3 * ch * f1),
        "dm_f1t": m / (2 * w2) * (eml2 * psp + w1 * ch * f1),
    }


def _fused_rhs(pp, pm, lam, f1, f1t, psp, pbp, sigma, tau, m):
    A = pp - lam
    sh, ch = sinh(pm / 2), cosh(pm / 2)
    ct = np.cosh(tau)
    rs, rS = np.sqrt(m / sigma), np.sqrt(m * sigma)
    eA, emA = exp(A), exp(-A)
    eA2, emA2 = exp(A / 2), exp(-A / 2)
    el, eml = exp(lam), exp(-lam)
    el2, eml2 = exp(lam / 2), exp(-lam / 2)
    ff = f1 * f1t
    return {
        "dm_ppml": -m / (2 * sigma) * el * sinh(pm) - 0.5j * m / sigma * (1 + el * ct) * sh * ff
                   - 0.5j * rs * el2 * ch * psp * f1,
        "dp_lam": -m * sigma / 2 * emA * sinh(pm) - 0.5j * m * sigma * (1 + emA * ct) * sh * ff
                  + 0.5j * rS * emA2 * ch * pbp * f1t,
        "dp_pm": m * sigma * (emA * (sh * sh + ct**2) - eA) + 0.5j * rS * (eA2 - emA2 * ct) * pbp * f1
                 - 0.5j * rS * emA2 * sh * pbp * f1t + 1j * m * sigma * emA * ct * ch * ff,
        "dm_pm": m / sigma * (eml - el * (sh * sh + ct**2))
                 - 0.5j * rs * ((eml2 - el2 * ct) * psp * f1t + el2 * sh * psp * f1)
                 - 1j * m / sigma * el * ct * ch * ff,
        "psm": rs * (el2 * sh * f1 - (eml2 + el2 * ct) * f1t),
        "pbm": rS * ((eA2 + emA2 * ct) * f1 + emA2 * sh * f1t),
        "dp_f1": -rS / 2 * (eA2 + emA2 * ct) * pbp - m * sigma / 2 * (1 + emA * ct) * ch * f1t,
        "dm_f1": -0.5 * rs * el2 * sh * psp + m / (2 * sigma) * (1 + el * ct) * ch * f1t,
        "dp_f1t": -rS / 2 * emA2 * sh * pbp + m * sigma / 2 * (1 + emA * ct) * ch * f1,
        "dm_f1t": 0.5 * rs * (eml2 + el2 * ct) * psp - m / (2 * sigma) * (1 + el * ct) * ch * f1,
    }


def backlund_rhs(pp, pm, lam, f1, f1t, psp, pbp, params: BacklundParams) -> dict:
    """Right-hand sides of the ten component relations from the field combinations."""
    if params.is_fused:
        return _fused_rhs(pp, pm, lam, f1, f1t, psp, pbp, params.sigma, params.tau, params.m)
    return _omega_rhs(pp, pm, lam, f1, f1t, psp, pbp, params.omega, params.m)


def _lhs(p1: BulkPoint, p2: BulkPoint, aux: AuxState) -> dict:
    return {
        "dm_ppml": p1.dminus("phi") + p2.dminus("phi") - aux.dminus("lambda0"),
        "dp_lam": aux.dplus("lambda0"),
        "dp_pm": p1.dplus("phi") - p2.dplus("phi"),
        "dm_pm": p1.dminus("phi") - p2.dminus("phi"),
        "psm": p1.psi - p2.psi,
        "pbm": p1.psibar - p2.psibar,
        "dp_f1": aux.dplus("f1"),
        "dm_f1": aux.dminus("f1"),
        "dp_f1t": aux.dplus("f1t"),
        "dm_f1t": aux.dminus("f1t"),
    }


def _residuals(p1, p2, aux, params):
    rhs = backlund_rhs(p1.phi + p2.phi, p1.phi - p2.phi, aux.lambda0, aux.f1, aux.f1t,
                       p1.psi + p2.psi, p1.psibar + p2.psibar, params)
    lhs = _lhs(p1, p2, aux)
    return {k: lhs[k] - rhs[k] for k in RELATIONS}


def component_backlund_residuals(p1: BulkPoint, p2: BulkPoint, aux: AuxState,
                                 params: BacklundParams) -> dict:
    """``LHS - RHS`` of the ten component relations in the omega form."""
    if params.is_fused:
        raise ValueError("component_backlund_residuals expects omega parameters")
    return _residuals(p1, p2, aux, params)


def fused_backlund_residuals(p1: BulkPoint, p2: BulkPoint, aux: AuxState,
                             sigma, tau, m: float = 1.0) -> dict:
    """``LHS - RHS`` of the ten component relations in the ``(sigma, tau)`` form."""
    return _residuals(p1, p2, aux, BacklundParams.fused(sigma, tau, m))


def bosonic_backlund_residuals(phi1, phi2, lam, dphi1, dphi2, dlam, omega, m: float = 1.0) -> dict:
    """Pure sinh-Gordon type-II relations on complex numbers.

    ``dphi*`` and ``dlam`` are ``(d_plus, d_minus)`` pairs.
    """
    w1, w2, w3, w4 = omega
    pp, pm = phi1 + phi2, phi1 - phi2
    A = pp - lam
    return {
        "dm_ppml": dphi1[1] + dphi2[1] - dlam[1] + m * w1 / (2 * w3) * np.exp(lam) * np.sinh(pm),
        "dp_lam": dlam[0] + m * w2 / (2 * w4) * np.exp(-A) * np.sinh(pm),
        "dp_pm": dphi1[0] - dphi2[0] - m * w2 / w4 * np.exp(-A) * np.sinh(pm / 2) ** 2
                 + m * w3 / w1 * np.exp(A),
        "dm_pm": dphi1[1] - dphi2[1] + m * w1 / w3 * np.exp(lam) * np.sinh(pm / 2) ** 2
                 - m * w4 / w2 * np.exp(-lam),
    }


# ---------------------------------------------------------------------------
# partner generation
# ---------------------------------------------------------------------------
@dataclass
class PartnerResult:
    """Side-2 fields and defect trajectory on a light-cone grid ``(u, v)``.

    Arrays are batched with shape ``(len(u), len(v))``; ``u = x + t`` and
    ``v = x - t``, so ``d/du = d_plus`` and ``d/dv = d_minus``.
    """

    u: np.ndarray
    v: np.ndarray
    phi2: GrassmannElement
    psi2: GrassmannElement
    psibar2: GrassmannElement
    lambda0: GrassmannElement
    f1: GrassmannElement
    f1t: GrassmannElement
    dplus_phi2: GrassmannElement
    dminus_phi2: GrassmannElement


def _partner_rates(s1: BulkPoint, U, params):
    phi2, lam, f1, f1t = U
    pp, pm = s1.phi + phi2, s1.phi - phi2
    # the fermion relations fix side 2 given side 1 and the auxiliary fields
    # the fermion relations are algebraic in the auxiliary fields and do not
    # involve psi_+ or psibar_+, so side-2 fermions follow directly
    rhs0 = backlund_rhs(pp, pm, lam, f1, f1t, s1.psi, s1.psibar, params)
    psi2 = s1.psi - rhs0["psm"]
    psibar2 = s1.psibar - rhs0["pbm"]
    rhs = backlund_rhs(pp, pm, lam, f1, f1t, s1.psi + psi2, s1.psibar + psibar2, params)
    dp_phi2 = s1.dplus("phi") - rhs["dp_pm"]
    dm_phi2 = s1.dminus("phi") - rhs["dm_pm"]
    dm_lam = s1.dminus("phi") + dm_phi2 - rhs["dm_ppml"]
    plus = (dp_phi2, rhs["dp_lam"], rhs["dp_f1"], rhs["dp_f1t"])
    minus = (dm_phi2, dm_lam, rhs["dm_f1"], rhs["dm_f1t"])
    return plus, minus, psi2, psibar2


def _heun(U, h, s_a, s_b, params, which):
    k1 = _partner_rates(s_a, U, params)[which]
    Ut = tuple(a + h * b for a, b in zip(U, k1))
    k2 = _partner_rates(s_b, Ut, params)[which]
    return tuple(a + 0.5 * h * (b + c) for a, b, c in zip(U, k1, k2))


def _check_finite(U, where):
    for el in U:
        if not np.all(np.isfinite(el.coeffs)):
            raise IntegrationError(f"non-finite values during partner integration at {where}")


def generate_partner(side1: Callable[[np.ndarray, np.ndarray], BulkPoint], u, v,
                     aux0: AuxState, phi2_0: GrassmannElement, params: BacklundParams,
                     growth_limit: float = 1e6) -> PartnerResult:
    """Integrate the component relations from ``(u[0], v[0])`` over the ``(u, v)`` grid.

    ``side1(x, t)`` must return a (possibly batched) bulk solution with first
    derivatives.  The starting data are ``phi2_0`` and ``aux0`` (values only).
    Integration runs along the minus-characteristic ``u = u[0]`` first and
    then along every plus-characteristic in parallel, each with Heun steps,
    so the scheme is second order in the grid spacing.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or v.ndim != 1 or len(u) < 2 or len(v) < 2:
        raise ValueError("u and v must be 1-d grids with at least two points")

    def s1_at(uu, vv):
        return side1((uu + vv) / 2, (uu - vv) / 2)

    U = (phi2_0, aux0.lambda0, aux0.f1, aux0.f1t)
    col = [U]
    for k in range(len(v) - 1):
        U = _heun(U, v[k + 1] - v[k], s1_at(u[0], v[k]), s1_at(u[0], v[k + 1]), params, 1)
        _check_finite(U, f"v={v[k + 1]}")
        col.append(U)
    # stack the initial column into a batch over v
    table = phi2_0.table
    U = tuple(GrassmannElement(table, np.stack([c[i].coeffs for c in col])) for i in range(4))
    rows = [U]
    scale = max(el.max_abs() for el in U) + 1.0
    for j in range(len(u) - 1):
        U = _heun(U, u[j + 1] - u[j], s1_at(u[j], v), s1_at(u[j + 1], v), params, 0)
        _check_finite(U, f"u={u[j + 1]}")
        if max(el.max_abs() for el in U) > growth_limit * scale:
            raise IntegrationError("step rejected: runaway growth; reduce the grid spacing")
        rows.append(U)
    stacked = tuple(GrassmannElement(table, np.stack([r[i].coeffs for r in rows])) for i in range(4))
    uu, vv = np.meshgrid(u, v, indexing="ij")
    s1 = s1_at(uu, vv)
    plus, minus, psi2, psibar2 = _partner_rates(s1, stacked, params)
    return PartnerResult(u=u, v=v, phi2=stacked[0], psi2=psi2, psibar2=psibar2,
                         lambda0=stacked[1], f1=stacked[2], f1t=stacked[3],
                         dplus_phi2=plus[0], dminus_phi2=minus[0])


def _fd_uv(el: GrassmannElement, du: np.ndarray, dv: np.ndarray):
    """Central differences along ``u`` and ``v`` on the interior ``[1:-1, 1:-1]``."""
    c = el.coeffs
    a = (c[2:, 1:-1] - c[:-2, 1:-1]) / (2 * du)
    b = (c[1:-1, 2:] - c[1:-1, :-2]) / (2 * dv)
    return GrassmannElement(el.table, a), GrassmannElement(el.table, b)


def partner_backlund_residuals(res: PartnerResult, side1: Callable, params: BacklundParams) -> dict:
    """Component relations re-evaluated on the generated trajectory.

    Derivatives of the generated fields are central differences on the grid
    (interior points only), so the derivative relations vanish to second
    order in the spacing while the algebraic ``psi_-``/``psibar_-`` relations
    vanish exactly.
    """
    du = np.gradient(res.u)[1:-1, None, None]
    dv = np.gradient(res.v)[None, 1:-1, None]

    def inner(el):
        return GrassmannElement(el.table, el.coeffs[1:-1, 1:-1])

    def xt(el):
        a, b = _fd_uv(el, du, dv)
        return a + b, a - b          # d_x = d_u + d_v, d_t = d_u - d_v

    uu, vv = np.meshgrid(res.u[1:-1], res.v[1:-1], indexing="ij")
    p1 = side1((uu + vv) / 2, (uu - vv) / 2)
    phx, pht = xt(res.phi2)
    p2 = BulkPoint(phi=inner(res.phi2), psi=inner(res.psi2), psibar=inner(res.psibar2),
                   phi_x=phx, phi_t=pht)
    lx, lt = xt(res.lambda0)
    fx, ft = xt(res.f1)
    gx, gt = xt(res.f1t)
    aux = AuxState(inner(res.lambda0), inner(res.f1), inner(res.f1t),
                   lambda0_x=lx, lambda0_t=lt, f1_x=fx, f1_t=ft, f1t_x=gx, f1t_t=gt)
    return _residuals(p1, p2, aux, params)


def partner_eom_residuals(res: PartnerResult, m: float = 1.0) -> dict:
    """Side-2 light-cone field equations on the interior grid by central differences.

    Only the interior points ``[1:-1, 1:-1]`` are returned; the truncation
    error is second order in the grid spacing.
    """
    du = np.gradient(res.u)[1:-1, None, None]
    dv = np.gradient(res.v)[None, 1:-1, None]

    def d_u(el):
        c = el.coeffs
        return GrassmannElement(el.table, (c[2:, 1:-1] - c[:-2, 1:-1]) / (2 * du))

    def d_v(el):
        c = el.coeffs
        return GrassmannElement(el.table, (c[1:-1, 2:] - c[1:-1, :-2]) / (2 * dv))

    def inner(el):
        return GrassmannElement(el.table, el.coeffs[1:-1, 1:-1])

    phi, psi, psibar = inner(res.phi2), inner(res.psi2), inner(res.psibar2)
    ch = cosh(phi)
    return {
        "boson": d_u(res.dminus_phi2) - 0.5 * m**2 * sinh(2 * phi)
                 + 1j * m * psibar * psi * sinh(phi),
        "psibar": d_v(res.psibar2) + m * psi * ch,
        "psi": d_u(res.psi2) + m * psibar * ch,
    }


# ---------------------------------------------------------------------------
# superfield form
# ---------------------------------------------------------------------------
SUPER_RELATIONS = ("dm_ppml", "dp_lam", "dp_pm", "dm_pm", "dp_f", "dm_f", "dm_ft", "dp_ft")


def _super_rhs(PP, PM, L, f, ft, params: BacklundParams) -> dict:
    """Right-hand sides of the eight superfield relations on assembled values."""
    m = params.m
    A = PP - L
    eA2, emA2, eL2, emL2 = exp(A / 2), exp(-A / 2), exp(L / 2), exp(-L / 2)
    sh, ch = sinh(PM / 2), cosh(PM / 2)
    if not params.is_fused:
        w1, w2, w3, w4 = params.omega
        return {
            "dm_ppml": w1 * eL2 * f * ch,
            "dp_lam": w2 * emA2 * ft * ch,
            "dp_pm": w3 * eA2 * f - w2 * emA2 * ft * sh,
            "dm_pm": w1 * eL2 * f * sh + w4 * emL2 * ft,
            "dp_f": 1j * m / w1 * eA2,
            "dm_f": -1j * m / w3 * eL2 * sh,
            "dm_ft": 1j * m / w2 * emL2,
            "dp_ft": 1j * m / w4 * emA2 * sh,
        }
    s, ct = params.sigma, np.cosh(params.tau)
    rS, rs = np.sqrt(m * s), np.sqrt(m / s)
    return {
        "dm_ppml": -rs * eL2 * f * ch,
        "dp_lam": rS * emA2 * ft * ch,
        "dp_pm": -rS * ((eA2 + ct * emA2) * f + emA2 * sh * ft),
        "dm_pm": rs * ((emL2 + ct * eL2) * ft - eL2 * sh * f),
        "dp_f": -1j * rS * (eA2 - ct * emA2),
        "dm_f": 1j * rs * eL2 * sh,
        "dm_ft": 1j * rs * (emL2 - ct * eL2),
        "dp_ft": 1j * rS * emA2 * sh,
    }


def superfield_backlund_residuals(jets: dict, params: BacklundParams) -> dict:
    """``LHS - RHS`` of the eight superfield relations.

    ``jets`` maps ``"phi1", "phi2", "lam", "f", "ft"`` to
    :class:`~sshgdefect.superfield.SuperJet` objects carrying at least the
    value and both first light-cone derivative slots.  Results are
    superspace elements; use :func:`~sshgdefect.superfield.disassemble` to
    read off the sectors.
    """
    from .superfield import Superfield, superD

    missing = {"phi1", "phi2", "lam", "f", "ft"} - set(jets)
    if missing:
        raise JetError(f"superfield jets missing: {sorted(missing)}")
    S = {k: Superfield.from_jet(v) for k, v in jets.items()}
    for k, v in jets.items():
        if v.dplus is None or v.dminus is None:
            raise JetError(f"jet {k!r} needs both first light-cone derivatives")
    PP, PM = S["phi1"] + S["phi2"], S["phi1"] - S["phi2"]
    X = PP - S["lam"]
    rhs = _super_rhs(PP.value, PM.value, S["lam"].value, S["f"].value, S["ft"].value, params)
    lhs = {
        "dm_ppml": superD("-", X).value,
        "dp_lam": superD("+", S["lam"]).value,
        "dp_pm": superD("+", PM).value,
        "dm_pm": superD("-", PM).value,
        "dp_f": superD("+", S["f"]).value,
        "dm_f": superD("-", S["f"]).value,
        "dm_ft": superD("-", S["ft"]).value,
        "dp_ft": superD("+", S["ft"]).value,
    }
    return {k: lhs[k] - rhs[k] for k in SUPER_RELATIONS}


def _theta_coeff(x: GrassmannElement, base: GeneratorTable, which: str) -> GrassmannElement:
    """Coefficient of ``theta1`` or ``theta2`` written to the left (other theta set to zero)."""
    from .grassmann import left_derivative, restrict

    return restrict(left_derivative(x, which), base)


def aux_superfield_components(phi1, psi1, psibar1, phi2, psi2, psibar2,
                              lambda0, f1, f1t, params: BacklundParams) -> dict:
    """Higher components of ``Lambda, f, f~`` fixed by the superfield relations.

    Returns ``{"lam": (lambda0, l2, l1, l3), "f": (f1, b1, b2, f2),
    "ft": (f1t, bt1, bt2, ft2)}`` in the superfield layout
    ``A - i th1 B + i th2 C - i th1 th2 D``.  The lowest sectors of the
    ``f``/``f~`` relations and of the first two relations fix the
    theta-linear components; the theta-linear sectors then fix the top ones.
    """
    from .superfield import THETA1, THETA2, assemble_components, superspace_table

    base = lambda0.table
    table = superspace_table(base)
    z = base.zero()

    def rhs_of(lam, f, ft):
        P1 = assemble_components((phi1, psibar1, psi1, z), table)
        P2 = assemble_components((phi2, psibar2, psi2, z), table)
        return _super_rhs(P1 + P2, P1 - P2, assemble_components(lam, table),
                          assemble_components(f, table), assemble_components(ft, table), params)

    def low(x):
        from .grassmann import restrict
        return restrict(x, base)

    r = rhs_of((lambda0, z, z, z), (f1, z, z, z), (f1t, z, z, z))
    b1, b2 = -low(r["dp_f"]), -low(r["dm_f"])
    bt2, bt1 = -low(r["dm_ft"]), -low(r["dp_ft"])
    l2 = -low(r["dp_lam"])
    l1 = low(r["dm_ppml"]) + psi1 + psi2
    r = rhs_of((lambda0, l2, l1, z), (f1, b1, b2, z), (f1t, bt1, bt2, z))
    f2 = -_theta_coeff(r["dp_f"], base, THETA2)
    ft2 = -_theta_coeff(r["dm_ft"], base, THETA1)
    l3 = -_theta_coeff(r["dp_lam"], base, THETA2)
    return {"lam": (lambda0, l2, l1, l3), "f": (f1, b1, b2, f2), "ft": (f1t, bt1, bt2, ft2)}


def superjets_from_components(p1: BulkPoint, p2: BulkPoint, aux: AuxState,
                              params: BacklundParams) -> dict:
    """SuperJets of ``Phi1, Phi2, Lambda, f, f~`` from component data.

    The higher auxiliary components come from :func:`aux_superfield_components`;
    their light-cone derivatives are exact directional derivatives along the
    supplied first derivatives of the lowest components.  ``F`` is on-shell.
    """
    from .dual import directional
    from .superfield import SuperJet, jet_from_bulk

    m = params.m
    args = {"phi1": p1.phi, "psi1": p1.psi, "psibar1": p1.psibar,
            "phi2": p2.phi, "psi2": p2.psi, "psibar2": p2.psibar,
            "lambda0": aux.lambda0, "f1": aux.f1, "f1t": aux.f1t}

    def tangents(which):
        d = p1.dplus if which == "+" else p1.dminus
        e = p2.dplus if which == "+" else p2.dminus
        a = aux.dplus if which == "+" else aux.dminus
        return {"phi1": d("phi"), "psi1": d("psi"), "psibar1": d("psibar"),
                "phi2": e("phi"), "psi2": e("psi"), "psibar2": e("psibar"),
                "lambda0": a("lambda0"), "f1": a("f1"), "f1t": a("f1t")}

    def flat(**kw):
        c = aux_superfield_components(**kw, params=params)
        return {f"{k}{i}": v for k, comps in c.items() for i, v in enumerate(comps)}

    table = aux.table
    val, dp = directional(flat, args, tangents("+"), table)
    _, dm = directional(flat, args, tangents("-"), table)

    def jet(k):
        return SuperJet(tuple(val[f"{k}{i}"] for i in range(4)),
                        dplus=tuple(dp[f"{k}{i}"] for i in range(4)),
                        dminus=tuple(dm[f"{k}{i}"] for i in range(4)))

    return {"phi1": jet_from_bulk(p1, m), "phi2": jet_from_bulk(p2, m),
            "lam": jet("lam"), "f": jet("f"), "ft": jet("ft")}


# superfield relation and sector carrying each component relation
_SECTOR_MAP = {
    "dm_ppml": ("dm_ppml", "theta2", 1), "dp_lam": ("dp_lam", "theta1", 1),
    "dp_pm": ("dp_pm", "theta1", 1), "dm_pm": ("dm_pm", "theta2", 1),
    "psm": ("dm_pm", "low", -1), "pbm": ("dp_pm", "low", -1),
    "dp_f1": ("dp_f", "theta1", 1), "dm_f1": ("dm_f", "theta2", 1),
    "dp_f1t": ("dp_ft", "theta1", 1), "dm_f1t": ("dm_ft", "theta2", 1),
}


def super_to_component(residuals: dict, base: GeneratorTable) -> dict:
    """Read the ten component residuals off the superfield residual sectors.

    The lowest sectors of the two ``Phi_-`` relations carry the algebraic
    ``psi_-``/``psibar_-`` relations; the theta-linear sectors carry the
    derivative relations.  Off-shell the derivative sectors differ from the
    component residuals by multiples of the algebraic ones, so the two agree
    once ``psi_-`` and ``psibar_-`` relations hold.
    """
    from .grassmann import restrict

    out = {}
    for comp, (rel, sector, sign) in _SECTOR_MAP.items():
        x = residuals[rel]
        val = restrict(x, base) if sector == "low" else _theta_coeff(x, base, sector)
        out[comp] = sign * val
    return out
