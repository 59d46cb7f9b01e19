"""Type-II defect: potentials, defect conditions, modified charges and limits.

Field combinations follow the usual defect coordinates
``phi_pm = phi1 +- phi2``, ``psi_pm = psi1 +- psi2`` and
``psibar_pm = psibar1 +- psibar2``, all evaluated at ``x = 0``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .backlund import AuxState, BacklundParams, backlund_rhs
from .dual import partial
from .grassmann import GeneratorTable, GrassmannElement, cosh, exp, left_derivative, sinh
from .model import BulkPoint, ModelParams

HALF_PI_I = 0.5j * np.pi

CONDITIONS = ("phi_plus", "plus_phi_minus", "minus_phi_minus", "psm", "pbm", "dt_f1", "dt_f1t")


@dataclass(frozen=True)
class DefectParams:
    """Omega form ``(omega1, omega2)`` or fused form ``(sigma, tau)``; both carry ``m``."""

    m: float = 1.0
    omega1: Optional[complex] = None
    omega2: Optional[complex] = None
    sigma: Optional[complex] = None
    tau: Optional[complex] = None

    def __post_init__(self):
        ModelParams(self.m)
        omega = self.omega1 is not None or self.omega2 is not None
        fused = self.sigma is not None or self.tau is not None
        if omega == fused:
            raise ValueError("give exactly one of (omega1, omega2) or (sigma, tau)")
        if omega and (self.omega1 is None or self.omega2 is None or self.omega1 == 0 or self.omega2 == 0):
            raise ValueError("omega1 and omega2 must both be given and nonzero")
        if fused and (self.sigma is None or self.tau is None or self.sigma == 0):
            raise ValueError("sigma (nonzero) and tau must both be given")

    @classmethod
    def fused(cls, sigma, tau, m: float = 1.0) -> "DefectParams":
        return cls(m=m, sigma=sigma, tau=tau)

    @property
    def form(self) -> str:
        return "fused" if self.sigma is not None else "omega"

    @property
    def omegas(self) -> tuple:
        if self.form == "fused":
            raise ValueError("omega parameters are defined for the omega form only")
        w1, w2 = self.omega1, self.omega2
        return (w1, w2, self.m / w1, self.m / w2)

    def at_free_point(self, atol: float = 1e-12) -> bool:
        """Whether a fused parameter set sits at ``tau = i pi / 2``."""
        return self.form == "fused" and abs(np.cosh(self.tau)) <= atol

    def to_omega(self) -> "DefectParams":
        """Omega-form parameters equivalent to a fused set at ``tau = i pi / 2``."""
        if self.form == "omega":
            return self
        if not self.at_free_point(1e-9):
            raise ValueError("the omega form matches the fused form only at tau = i pi / 2")
        s = complex(self.sigma)
        return DefectParams(m=self.m, omega1=-np.sqrt(self.m / s), omega2=np.sqrt(self.m * s))

    def to_backlund(self) -> BacklundParams:
        if self.form == "fused":
            return BacklundParams.fused(self.sigma, self.tau, self.m)
        return BacklundParams(m=self.m, omega=self.omegas)


@dataclass(frozen=True)
class DefectState:
    """Boundary values of both bulk sides plus the defect fields."""

    side1: BulkPoint
    side2: BulkPoint
    aux: AuxState

    @property
    def phi_plus(self):
        return self.side1.phi + self.side2.phi

    @property
    def phi_minus(self):
        return self.side1.phi - self.side2.phi

    @property
    def psi_plus(self):
        return self.side1.psi + self.side2.psi

    @property
    def psi_minus(self):
        return self.side1.psi - self.side2.psi

    @property
    def psibar_plus(self):
        return self.side1.psibar + self.side2.psibar

    @property
    def psibar_minus(self):
        return self.side1.psibar - self.side2.psibar

    def conjugate_momenta(self) -> dict:
        """Momenta conjugate to ``lambda0``, ``f1`` and ``f1t`` (derived, never stored)."""
        return {"lambda0": self.phi_minus / 2, "f1": -1j * self.aux.f1, "f1t": -1j * self.aux.f1t}


@dataclass(frozen=True)
class DefectPotentials:
    B0p: GrassmannElement
    B0m: GrassmannElement
    B1p: GrassmannElement
    B1m: GrassmannElement

    def as_dict(self) -> dict:
        return {"B0p": self.B0p, "B0m": self.B0m, "B1p": self.B1p, "B1m": self.B1m}


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------
def potentials(pp, pm, lam, f1, f1t, psp, pbp, params: DefectParams) -> DefectPotentials:
    """The four defect potentials from the field combinations."""
    m = params.m
    A = pp - lam
    sh, ch = sinh(pm / 2), cosh(pm / 2)
    if params.form == "omega":
        w1, w2 = params.omega1, params.omega2
        B0p = w2**2 * exp(-A) * sh * sh + m**2 / w1**2 * exp(A)
        B0m = w1**2 * exp(lam) * sh * sh + m**2 / w2**2 * exp(-lam)
        B1p = 1j * (m / w1 * exp(A / 2) * pbp * f1 - w2 * exp(-A / 2) * sh * pbp * f1t
                    - m * w2 / w1 * ch * f1 * f1t)
        B1m = -1j * (m / w2 * exp(-lam / 2) * psp * f1t + w1 * exp(lam / 2) * sh * psp * f1
                     + m * w1 / w2 * ch * f1 * f1t)
        return DefectPotentials(B0p, B0m, B1p, B1m)
    s, ct = params.sigma, np.cosh(params.tau)
    rS, rs = np.sqrt(m * s), np.sqrt(m / s)
    B0p = m * s * (exp(A) + exp(-A) * (sh * sh + ct**2))
    B0m = m / s * (exp(-lam) + exp(lam) * (sh * sh + ct**2))
    B1p = (-1j * rS * ((exp(A / 2) + exp(-A / 2) * ct) * pbp * f1 + exp(-A / 2) * sh * pbp * f1t)
           + 1j * m * s * (1 + exp(-A) * ct) * ch * f1 * f1t)
    B1m = (-1j * rs * ((exp(-lam / 2) + exp(lam / 2) * ct) * psp * f1t - exp(lam / 2) * sh * psp * f1)
           + 1j * m / s * (1 + exp(lam) * ct) * ch * f1 * f1t)
    return DefectPotentials(B0p, B0m, B1p, B1m)


def defect_potentials(state: DefectState, params: DefectParams) -> DefectPotentials:
    a = state.aux
    return potentials(state.phi_plus, state.phi_minus, a.lambda0, a.f1, a.f1t,
                      state.psi_plus, state.psibar_plus, params)


# ---------------------------------------------------------------------------
# defect conditions
# ---------------------------------------------------------------------------
def _condition_rhs(pp, pm, lam, f1, f1t, psp, pbp, params: DefectParams) -> dict:
    m = params.m
    A = pp - lam
    sh, ch = sinh(pm / 2), cosh(pm / 2)
    ff = f1 * f1t
    if params.form == "omega":
        w1, w2 = params.omega1, params.omega2
        k = w1 / w2 + w2 / w1
        return {
            "phi_plus": -exp(lam) * sinh(pm) * (w1**2 + w2**2 * exp(-pp)) + 1j * m * k * sh * ff
                        + 1j * w1 * exp(lam / 2) * ch * psp * f1 + 1j * w2 * exp(-A / 2) * ch * pbp * f1t,
            "plus_phi_minus": 2 * w2**2 * exp(-A) * sh * sh - 2 * m**2 / w1**2 * exp(A)
                              - 1j * m / w1 * exp(A / 2) * pbp * f1 - 1j * w2 * exp(-A / 2) * sh * pbp * f1t,
            "minus_phi_minus": -2 * w1**2 * exp(lam) * sh * sh + 2 * m**2 / w2**2 * exp(-lam)
                               - 1j * m / w2 * exp(-lam / 2) * psp * f1t
                               + 1j * w1 * exp(lam / 2) * sh * psp * f1,
            "psm": -w1 * exp(lam / 2) * sh * f1 - m / w2 * exp(-lam / 2) * f1t,
            "pbm": w2 * exp(-A / 2) * sh * f1t - m / w1 * exp(A / 2) * f1,
            "dt_f1": m / (2 * w1) * exp(A / 2) * pbp - w1 / 2 * exp(lam / 2) * sh * psp + m / 2 * k * ch * f1t,
            "dt_f1t": -m / (2 * w2) * exp(-lam / 2) * psp - w2 / 2 * exp(-A / 2) * sh * pbp - m / 2 * k * ch * f1,
        }
    s, ct = params.sigma, np.cosh(params.tau)
    rS, rs = np.sqrt(m * s), np.sqrt(m / s)
    eA, emA = exp(A), exp(-A)
    eA2, emA2 = exp(A / 2), exp(-A / 2)
    el, el2, eml2 = exp(lam), exp(lam / 2), exp(-lam / 2)
    mix = (s + 1 / s) + (s * emA + el / s) * ct
    return {
        "phi_plus": -m * (s * emA + el / s) * sinh(pm) - 1j * m * (s + 1 / s) * sh * ff
                    + 1j * rS * emA2 * ch * pbp * f1t - 1j * rs * el2 * ch * psp * f1
                    - 1j * m * (s * emA + el / s) * ct * sh * ff,
        "plus_phi_minus": 2 * m * s * (emA * (sh * sh + ct**2) - eA) + 1j * rS * (eA2 - emA2 * ct) * pbp * f1
                          - 1j * rS * emA2 * sh * pbp * f1t + 2j * m * s * emA * ct * ch * ff,
        "minus_phi_minus": 2 * m / s * (exp(-lam) - el * (sh * sh + ct**2))
                           - 1j * rs * ((eml2 - el2 * ct) * psp * f1t + el2 * sh * psp * f1)
                           - 2j * m / s * el * ct * ch * ff,
        "psm": rs * (el2 * sh * f1 - (eml2 + el2 * ct) * f1t),
        "pbm": rS * ((eA2 + emA2 * ct) * f1 + emA2 * sh * f1t),
        "dt_f1": -rS / 2 * (eA2 + emA2 * ct) * pbp + 0.5 * rs * el2 * sh * psp - m / 2 * mix * ch * f1t,
        "dt_f1t": -rS / 2 * emA2 * sh * pbp - 0.5 * rs * (eml2 + el2 * ct) * psp + m / 2 * mix * ch * f1,
    }


def _condition_lhs(state: DefectState) -> dict:
    s1, s2, a = state.side1, state.side2, state.aux
    dx_p = s1.need("phi_x") + s2.need("phi_x")
    dt_p = s1.need("phi_t") + s2.need("phi_t")
    dx_m = s1.phi_x - s2.phi_x
    dt_m = s1.phi_t - s2.phi_t
    return {
        "phi_plus": dx_p - dt_p + 2 * a.need("lambda0_t"),
        "plus_phi_minus": dx_m + dt_m,
        "minus_phi_minus": dx_m - dt_m,
        "psm": state.psi_minus,
        "pbm": state.psibar_minus,
        "dt_f1": a.need("f1_t"),
        "dt_f1t": a.need("f1t_t"),
    }


def defect_condition_residuals(state: DefectState, params: DefectParams) -> dict:
    """``LHS - RHS`` of the seven defect conditions at ``x = 0``.

    The first condition is ``d_x phi_+ - d_t (phi_+ - 2 lambda0)``.
    """
    a = state.aux
    rhs = _condition_rhs(state.phi_plus, state.phi_minus, a.lambda0, a.f1, a.f1t,
                         state.psi_plus, state.psibar_plus, params)
    lhs = _condition_lhs(state)
    return {k: lhs[k] - rhs[k] for k in CONDITIONS}


def conditions_from_backlund(state: DefectState, params: DefectParams) -> dict:
    """Defect conditions rebuilt from the Baecklund right-hand sides frozen at ``x = 0``.

    Independent route: light-cone relations are combined into lab-frame ones
    with ``d_x = d_+ + d_-`` and ``d_t = d_+ - d_-``.
    """
    a = state.aux
    r = backlund_rhs(state.phi_plus, state.phi_minus, a.lambda0, a.f1, a.f1t,
                     state.psi_plus, state.psibar_plus, params.to_backlund())
    rhs = {
        "phi_plus": 2 * (r["dm_ppml"] + r["dp_lam"]),
        "plus_phi_minus": 2 * r["dp_pm"],
        "minus_phi_minus": 2 * r["dm_pm"],
        "psm": r["psm"],
        "pbm": r["pbm"],
        "dt_f1": r["dp_f1"] - r["dm_f1"],
        "dt_f1t": r["dp_f1t"] - r["dm_f1t"],
    }
    lhs = _condition_lhs(state)
    return {k: lhs[k] - rhs[k] for k in CONDITIONS}


def x_derivative_residuals(state: DefectState, params: DefectParams) -> dict:
    """``d_x f1`` and ``d_x f1t`` implied by the defect conditions (omega form)."""
    if params.form != "omega":
        raise ValueError("x-derivative formulas are given for the omega form")
    m, w1, w2 = params.m, params.omega1, params.omega2
    a = state.aux
    lam, pp, pm = a.lambda0, state.phi_plus, state.phi_minus
    A = pp - lam
    sh, ch = sinh(pm / 2), cosh(pm / 2)
    psp, pbp = state.psi_plus, state.psibar_plus
    dx_f1 = (m / (2 * w1) * exp(A / 2) * pbp + w1 / 2 * exp(lam / 2) * sh * psp
             + m / 2 * (w2 / w1 - w1 / w2) * ch * a.f1t)
    dx_f1t = (-w2 / 2 * exp(-A / 2) * sh * pbp + m / (2 * w2) * exp(-lam / 2) * psp
              + m / 2 * (w1 / w2 - w2 / w1) * ch * a.f1)
    return {"dx_f1": a.need("f1_x") - dx_f1, "dx_f1t": a.need("f1t_x") - dx_f1t}


# ---------------------------------------------------------------------------
# modified charges and supersymmetry
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ModifiedCharges:
    E_D: GrassmannElement
    P_D: GrassmannElement
    Q_D: GrassmannElement
    Qbar_D: GrassmannElement

    def as_dict(self) -> dict:
        return {"E_D": self.E_D, "P_D": self.P_D, "Q_D": self.Q_D, "Qbar_D": self.Qbar_D}


def modified_charges(state: DefectState, params: DefectParams) -> ModifiedCharges:
    """Defect contributions to energy, momentum and both supercharges.

    The supercharge corrections exist in the omega form only; fused
    parameters are accepted at ``tau = i pi / 2`` through the parameter map.
    """
    B = defect_potentials(state, params)
    psp, psm = state.psi_plus, state.psi_minus
    pbp, pbm = state.psibar_plus, state.psibar_minus
    E_D = B.B0p + B.B0m + 0.5j * (pbp * pbm - psp * psm) + B.B1p + B.B1m
    P_D = B.B0p - B.B0m + 0.5j * (pbp * pbm + psp * psm) + B.B1p - B.B1m
    op = params.to_omega()
    m, w1, w2 = op.m, op.omega1, op.omega2
    a = state.aux
    lam, pm = a.lambda0, state.phi_minus
    A = state.phi_plus - lam
    sh = sinh(pm / 2)
    Q_D = -2 * w1 * exp(lam / 2) * sh * a.f1 + 2 * m / w2 * exp(-lam / 2) * a.f1t
    Qbar_D = 2 * w2 * exp(-A / 2) * sh * a.f1t + 2 * m / w1 * exp(A / 2) * a.f1
    return ModifiedCharges(E_D, P_D, Q_D, Qbar_D)


def bulk_susy_variation(p: BulkPoint, eps, epsbar, m: float) -> dict:
    """Bulk supersymmetry variations of one side."""
    phi_x, phi_t = p.need("phi_x", "phi_t")
    return {
        "phi": eps * p.psi + epsbar * p.psibar,
        "psi": 0.5j * eps * (phi_x - phi_t) + 1j * m * epsbar * sinh(p.phi),
        "psibar": -0.5j * epsbar * (phi_x + phi_t) - 1j * m * eps * sinh(p.phi),
    }


def susy_defect_transform(state: DefectState, eps, epsbar, params: DefectParams) -> dict:
    """Variations of the boundary bulk fields (keys suffixed 1, 2) and the defect fields."""
    op = params.to_omega()
    m, w1, w2 = op.m, op.omega1, op.omega2
    a = state.aux
    lam, pm = a.lambda0, state.phi_minus
    A = state.phi_plus - lam
    sh, ch = sinh(pm / 2), cosh(pm / 2)
    out = {}
    for k, side in ((1, state.side1), (2, state.side2)):
        out.update({f"{n}{k}": v for n, v in bulk_susy_variation(side, eps, epsbar, m).items()})
    out["lambda0"] = (eps * (state.psi_plus + w1 * exp(lam / 2) * ch * a.f1)
                      - epsbar * w2 * exp(-A / 2) * ch * a.f1t)
    out["f1"] = 1j * w1 * eps * exp(lam / 2) * sh - 1j * m / w1 * epsbar * exp(A / 2)
    out["f1t"] = -1j * m / w2 * eps * exp(-lam / 2) - 1j * w2 * epsbar * exp(-A / 2) * sh
    return out


# ---------------------------------------------------------------------------
# Poisson-bracket constraints
# ---------------------------------------------------------------------------
ODD_NAMES = ("f1", "f1t", "psp", "pbp")


@functools.lru_cache(maxsize=None)
def pb_table(extra: tuple = ()) -> GeneratorTable:
    """Generators for an exact odd sector: ``f1, f1t, psi_+, psibar_+`` plus ``extra``."""
    return GeneratorTable(list(ODD_NAMES) + list(extra))


@dataclass(frozen=True)
class PBSample:
    """Complex bosonic values; odd arguments are unit generators of :func:`pb_table`."""

    phi_plus: complex
    phi_minus: complex
    lambda0: complex

    def args(self, table: Optional[GeneratorTable] = None) -> dict:
        T = table or pb_table()
        return {"pp": T.scalar(self.phi_plus), "pm": T.scalar(self.phi_minus),
                "lam": T.scalar(self.lambda0), "f1": T.gen("f1"), "f1t": T.gen("f1t"),
                "psp": T.gen("psp"), "pbp": T.gen("pbp")}


def onshell_minus_fermions(args: dict, params: DefectParams):
    """``(psi_-, psibar_-)`` solved from the algebraic defect conditions."""
    r = _condition_rhs(args["pp"], args["pm"], args["lam"], args["f1"], args["f1t"],
                       args["psp"], args["pbp"], params)
    return r["psm"], r["pbm"]


def _potential_fn(params, key, pot_fn):
    def fn(pp, pm, lam, f1, f1t, psp, pbp):
        return getattr(pot_fn(pp, pm, lam, f1, f1t, psp, pbp, params), key)
    return fn


def _bulk_difference(args, params, onshell=True):
    m = params.m
    pp, pm = args["pp"], args["pm"]
    T = pp.table
    p1, p2 = (pp + pm) / 2, (pp - pm) / 2
    psp, pbp = args["psp"], args["pbp"]
    if onshell:
        psm, pbm = onshell_minus_fermions(args, params)
    else:
        psm, pbm = T.gen("psm"), T.gen("pbm")
    ps1, ps2 = (psp + psm) / 2, (psp - psm) / 2
    pb1, pb2 = (pbp + pbm) / 2, (pbp - pbm) / 2
    V = m**2 * (cosh(2 * p1) - cosh(2 * p2))
    W = -4j * m * (pb1 * ps1 * cosh(p1) - pb2 * ps2 * cosh(p2))
    return V, W


def pb_constraint_residuals(params: DefectParams, sample: PBSample,
                            pot_fn: Callable = potentials, onshell: bool = True):
    """Residuals of the two bracket constraints at one sample point.

    Bosonic partials use dual augmentation; odd partials are left
    derivatives.  ``psi_-`` and ``psibar_-`` inside ``W1 - W2`` are replaced by
    their on-shell values unless ``onshell`` is false.
    """
    T = pb_table(() if onshell else ("psm", "pbm"))
    args = sample.args(T)
    d = {}
    for key in ("B0p", "B0m", "B1p", "B1m"):
        fn = _potential_fn(params, key, pot_fn)
        d[key] = (fn(**args), partial(fn, args, "pm", T), partial(fn, args, "lam", T))
    B1p, B1m = d["B1p"][0], d["B1m"][0]
    pb1 = 2 * (d["B0p"][1] * d["B0m"][2] - d["B0p"][2] * d["B0m"][1])
    pb2 = (2 * (d["B0p"][1] * d["B1m"][2] - d["B0p"][2] * d["B1m"][1])
           - 2 * (d["B0m"][1] * d["B1p"][2] - d["B0m"][2] * d["B1p"][1])
           - 1j * (left_derivative(B1p, "f1") * left_derivative(B1m, "f1")
                   + left_derivative(B1p, "f1t") * left_derivative(B1m, "f1t")))
    V, W = _bulk_difference(args, params, onshell)
    return pb1 - V, pb2 - W


def pb1_closed_form(phi_plus, phi_minus, m: float = 1.0):
    """``m^2 (cosh 2 phi1 - cosh 2 phi2) = 2 m^2 sinh phi_+ sinh phi_-``."""
    return 2 * m**2 * np.sinh(phi_plus) * np.sinh(phi_minus)


def pb1_lhs(params: DefectParams, sample: PBSample, pot_fn: Callable = potentials) -> complex:
    T = pb_table()
    args = sample.args(T)
    fp = _potential_fn(params, "B0p", pot_fn)
    fm = _potential_fn(params, "B0m", pot_fn)
    lhs = 2 * (partial(fp, args, "pm", T) * partial(fm, args, "lam", T)
               - partial(fp, args, "lam", T) * partial(fm, args, "pm", T))
    return complex(lhs.body())


def structural_identity_residuals(params: DefectParams, sample: PBSample,
                                  pot_fn: Callable = potentials) -> dict:
    """Dependence structure of the potentials on ``phi_+``, ``lambda0`` and the fermions.

    ``B(+)`` depends on ``phi_+ - lambda0`` only, ``B(-)`` not on ``phi_+``; the
    fermionic ones do not involve ``psi_-``, ``psibar_-``, and ``B1(+)`` does not
    involve ``psi_+`` nor ``B1(-)`` ``psibar_+``.
    """
    T = pb_table(("psm", "pbm"))
    args = sample.args(T)
    out = {}
    for k in ("0", "1"):
        fp = _potential_fn(params, f"B{k}p", pot_fn)
        fm = _potential_fn(params, f"B{k}m", pot_fn)
        out[f"B{k}p_shift"] = partial(fp, args, "pp", T) + partial(fp, args, "lam", T)
        out[f"B{k}m_phi_plus"] = partial(fm, args, "pp", T)
    B = pot_fn(**args, params=params)
    for key in ("B1p", "B1m"):
        for g in ("psm", "pbm"):
            out[f"{key}_{g}"] = left_derivative(getattr(B, key), g)
    out["B1p_psp"] = left_derivative(B.B1p, "psp")
    out["B1m_pbp"] = left_derivative(B.B1m, "pbp")
    return out


# ---------------------------------------------------------------------------
# equivalence class of bosonic potentials
# ---------------------------------------------------------------------------
def equivalence_shift_residual(rho_plus: Callable, rho_minus: Callable, params: DefectParams,
                               sample: PBSample):
    """Constraint on shifts ``B(+-) -> B(+-) + rho(+-)`` preserving the first bracket.

    ``rho_plus`` and ``rho_minus`` are callables ``(pp, pm, lam)`` written with
    algebra operations.  Returns ``(general, specialised)`` where the second
    uses the explicit omega-form derivatives of ``B0``.
    """
    if params.form != "omega":
        raise ValueError("the shift constraint is stated for the omega form")
    T = pb_table()
    args = {"pp": T.scalar(sample.phi_plus), "pm": T.scalar(sample.phi_minus),
            "lam": T.scalar(sample.lambda0)}

    def b0(key):
        def fn(pp, pm, lam):
            zz = pp.table.zero()
            return getattr(potentials(pp, pm, lam, zz, zz, zz, zz, params), key)
        return fn

    drp = partial(rho_plus, args, "lam", T)
    drm = partial(rho_minus, args, "lam", T)
    general = partial(b0("B0p"), args, "pm", T) * drm - drp * partial(b0("B0m"), args, "pm", T)
    w1, w2 = params.omega1, params.omega2
    pp, pm, lam = args["pp"], args["pm"], args["lam"]
    special = 0.5 * sinh(pm) * (w2**2 * exp(-(pp - lam)) * drm - w1**2 * exp(lam) * drp)
    return complex(general.body()), complex(special.body())


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------
def bosonic_potentials(phi_plus, phi_minus, lambda0, params: DefectParams):
    """Fermion-free potentials ``(B0p, B0m)`` on complex numbers."""
    m, w1, w2 = params.m, params.omega1, params.omega2
    A = phi_plus - lambda0
    s2 = np.sinh(phi_minus / 2) ** 2
    return (w2**2 * np.exp(-A) * s2 + m**2 / w1**2 * np.exp(A),
            w1**2 * np.exp(lambda0) * s2 + m**2 / w2**2 * np.exp(-lambda0))


def bosonic_condition_residuals(phi_plus, phi_minus, lambda0, d, params: DefectParams) -> dict:
    """Bosonic defect conditions on complex numbers.

    ``d`` maps ``phi_plus_x``, ``phi_plus_t``, ``phi_minus_x``, ``phi_minus_t``
    and ``lambda0_t`` to values.
    """
    m, w1, w2 = params.m, params.omega1, params.omega2
    A = phi_plus - lambda0
    s2 = np.sinh(phi_minus / 2) ** 2
    return {
        "phi_plus": d["phi_plus_x"] - d["phi_plus_t"] + 2 * d["lambda0_t"]
                    + w1**2 * np.exp(lambda0) * np.sinh(phi_minus)
                    + w2**2 * np.exp(-A) * np.sinh(phi_minus),
        "minus_phi_minus": d["phi_minus_x"] - d["phi_minus_t"] + 2 * w1**2 * np.exp(lambda0) * s2
                           - 2 * m**2 / w2**2 * np.exp(-lambda0),
        "plus_phi_minus": d["phi_minus_x"] + d["phi_minus_t"] - 2 * w2**2 * np.exp(-A) * s2
                          + 2 * m**2 / w1**2 * np.exp(A),
    }


def bosonic_defect_lagrangian(phi_plus, phi_minus, lambda0, dt_lambda0, dt_phi_plus,
                              params: DefectParams):
    B0p, B0m = bosonic_potentials(phi_plus, phi_minus, lambda0, params)
    return phi_minus * dt_lambda0 - 0.5 * phi_minus * dt_phi_plus + B0p + B0m


def fermionic_potentials(f1, f1t, psp, pbp, params: DefectParams):
    """Boson-free potentials ``(B1p, B1m)``."""
    m, w1, w2 = params.m, params.omega1, params.omega2
    return (1j * m / w1 * (pbp + w2 * f1t) * f1, -1j * m / w2 * (psp + w1 * f1) * f1t)


def fermionic_defect_lagrangian(f1, f1t, dt_f1, dt_f1t, psp, psm, pbp, pbm, params: DefectParams):
    B1p, B1m = fermionic_potentials(f1, f1t, psp, pbp, params)
    return (0.5j * (pbp * pbm - psp * psm) + 1j * f1 * dt_f1 + 1j * f1t * dt_f1t + B1p + B1m)


def constrained_fermionic_lagrangian(sign: int, f1, dt_f1, psp, psm, pbp, pbm, params: DefectParams):
    """Defect Lagrangian with a single defect fermion, ``f1t = sign * f1``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    m, w1, w2 = params.m, params.omega1, params.omega2
    return (0.5j * (pbp * pbm - psp * psm) + 2j * f1 * dt_f1
            + 1j * m * (pbp / w1 - sign * psp / w2) * f1)


def fermionic_conditions(f1, f1t, psp, pbp, params: DefectParams) -> dict:
    """Right-hand sides of the boson-free defect conditions."""
    m, w1, w2 = params.m, params.omega1, params.omega2
    k = w1 / w2 + w2 / w1
    return {"psm": -m / w2 * f1t, "pbm": -m / w1 * f1,
            "dt_f1": m / (2 * w1) * pbp + m / 2 * k * f1t,
            "dt_f1t": -m / (2 * w2) * psp - m / 2 * k * f1}


def constrained_fermionic_conditions(sign: int, f1, psp, pbp, params: DefectParams) -> dict:
    m, w1, w2 = params.m, params.omega1, params.omega2
    return {"psm": -sign * m / w2 * f1, "pbm": -m / w1 * f1,
            "dt_f1": m / 4 * (pbp / w1 - sign * psp / w2)}


def fermionic_pb2_residual(params: DefectParams, sign: Optional[int] = None) -> GrassmannElement:
    """Boson-free form of the second bracket constraint.

    With ``sign`` given, ``f1t`` is identified with ``sign * f1`` after the
    odd derivatives are taken and the on-shell ``psi_-``, ``psibar_-`` of the
    single-fermion conditions are used.
    """
    if params.form != "omega":
        raise ValueError("the fermionic limit is stated for the omega form")
    T = pb_table()
    f1, f1t, psp, pbp = (T.gen(n) for n in ODD_NAMES)
    m = params.m
    B1p, B1m = fermionic_potentials(f1, f1t, psp, pbp, params)
    lhs = -1j * (left_derivative(B1p, "f1") * left_derivative(B1m, "f1")
                 + left_derivative(B1p, "f1t") * left_derivative(B1m, "f1t"))
    if sign is None:
        c = fermionic_conditions(f1, f1t, psp, pbp, params)
    else:
        if sign not in (1, -1):
            raise ValueError("sign must be +1, -1 or None")
        lhs = _substitute(lhs, "f1t", sign * f1)
        c = constrained_fermionic_conditions(sign, f1, psp, pbp, params)
    psm, pbm = c["psm"], c["pbm"]
    W = -2j * m * (pbp * psm + pbm * psp)
    return lhs - W


def _substitute(x: GrassmannElement, name: str, value: GrassmannElement) -> GrassmannElement:
    """Replace generator ``name`` by the odd element ``value`` (``x`` at most linear in it)."""
    T = x.table
    g = T.gen(name)
    rest = x - g * left_derivative(x, name)
    return rest + value * left_derivative(x, name)
