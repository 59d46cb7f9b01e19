"""Fusing two type-I defects into a type-II defect.

Two type-I defects with parameters ``sigma_k`` and odd auxiliaries ``g_k``
share a trapped middle field ``(phi0, psi0, psibar0)``.  In the coincidence
limit the middle fermions become algebraic and are eliminated, the middle
boson is shifted into ``lambda0`` and the pair ``(g1, g2)`` is rotated into
``(f1, f1t)`` with field-dependent coefficients ``mu_i / 2``.  The pipeline
here performs those steps numerically at a point and the result is compared
with the closed-form fused potentials of :mod:`sshgdefect.defect`.

Every step is a ring homomorphism of the Grassmann algebra, so substituting
``g_k`` by its expression in ``f1, f1t`` up front is equivalent to doing the
substitution last.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .defect import DefectParams, potentials
from .grassmann import (GeneratorTable, GrassmannElement, SingularError, cosh, exp,
                        left_derivative, log, sqrt)


def _lift(x, table: GeneratorTable) -> GrassmannElement:
    return x if isinstance(x, GrassmannElement) else table.scalar(x)


# ---------------------------------------------------------------------------
# type-I building blocks
# ---------------------------------------------------------------------------
@dataclass
class TypeIDefect:
    """One type-I defect: parameter, odd auxiliary and the attached fields.

    ``sqrt_sigma`` fixes the branch of the square root of ``sigma`` entering
    the fermionic potential (principal branch when omitted).

    ``phi_k, psi_k, psibar_k`` are the bulk fields of side ``k`` at the
    defect and ``phi0, psi0, psibar0`` those of the middle region.  Time
    derivatives are only needed for the Lagrangian.
    """

    k: int
    sigma: complex
    g: GrassmannElement
    phi0: GrassmannElement
    psi0: GrassmannElement
    psibar0: GrassmannElement
    phi_k: GrassmannElement
    psi_k: GrassmannElement
    psibar_k: GrassmannElement
    dt_phi0: Optional[GrassmannElement] = None
    dt_phi_k: Optional[GrassmannElement] = None
    dt_g: Optional[GrassmannElement] = None
    sqrt_sigma: Optional[complex] = None

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError("k must be 1 or 2")
        if self.sqrt_sigma is None:
            self.sqrt_sigma = np.sqrt(complex(self.sigma))
        elif not np.isclose(self.sqrt_sigma**2, self.sigma, rtol=1e-12, atol=0):
            raise ValueError("sqrt_sigma does not square to sigma")

    def check_grading(self, atol: float = 1e-12) -> None:
        from .grassmann import GradingError
        for name in ("phi0", "phi_k", "dt_phi0", "dt_phi_k"):
            v = getattr(self, name)
            if v is not None and not v.is_even(atol):
                raise GradingError(f"{name} must be even")
        for name in ("g", "psi0", "psibar0", "psi_k", "psibar_k", "dt_g"):
            v = getattr(self, name)
            if v is not None and not v.is_odd(atol):
                raise GradingError(f"{name} must be odd")


def type1_potentials(k: int, d: TypeIDefect, m: float):
    """``(B0^(k), B1^(k))`` of a single type-I defect."""
    s, sm = d.sigma, np.sqrt(m)
    rs = d.sqrt_sigma
    plus, minus = d.phi0 + d.phi_k, d.phi0 - d.phi_k
    B0 = m * s * cosh(plus) + m / s * cosh(minus)
    B1 = 2j * sm * (rs * cosh(plus / 2) * d.g * (d.psibar0 + d.psibar_k)
                    - (-1) ** k / rs * cosh(minus / 2) * d.g * (d.psi0 - d.psi_k))
    return B0, B1


def type1_lagrangian(k: int, d: TypeIDefect, m: float) -> GrassmannElement:
    """Literal evaluation of the type-I defect Lagrangian ``L_{D_k}``."""
    if d.dt_phi0 is None or d.dt_phi_k is None or d.dt_g is None:
        raise ValueError("type1_lagrangian needs dt_phi0, dt_phi_k and dt_g")
    B0, B1 = type1_potentials(k, d, m)
    return (0.5 * (d.phi0 * d.dt_phi_k - d.phi_k * d.dt_phi0)
            - 1j * d.psi_k * d.psi0 - 1j * d.psibar_k * d.psibar0
            - (-1) ** k * (2j * d.g * d.dt_g + B0 + B1))


# ---------------------------------------------------------------------------
# eliminating the trapped fermions
# ---------------------------------------------------------------------------
def eliminate_psi0(phi0, phi1, phi2, psi_plus, psibar_plus, g1, g2,
                   sigma1: complex, sigma2: complex, m: float, roots=None):
    """Solve the middle-fermion equations for ``(psi0, psibar0)``.

    ``roots`` optionally gives the square roots of ``(sigma1, sigma2)``.
    """
    sm = np.sqrt(m)
    r1, r2 = _roots(sigma1, sigma2, roots)
    psi0 = -psi_plus / 2 + sm * (cosh((phi0 - phi1) / 2) / r1 * g1
                                 + cosh((phi0 - phi2) / 2) / r2 * g2)
    psibar0 = psibar_plus / 2 - sm * (r1 * cosh((phi0 + phi1) / 2) * g1
                                      - r2 * cosh((phi0 + phi2) / 2) * g2)
    return psi0, psibar0


def _roots(sigma1, sigma2, roots):
    if roots is None:
        return np.sqrt(complex(sigma1)), np.sqrt(complex(sigma2))
    return roots


def onshell_minus_fermions(phi0, phi1, phi2, g1, g2, sigma1, sigma2, m, roots=None):
    """``(psi_-, psibar_-)`` implied by the type-I pair in the coincidence limit."""
    sm = np.sqrt(m)
    r1, r2 = _roots(sigma1, sigma2, roots)
    psm = 2 * sm * (cosh((phi0 - phi1) / 2) / r1 * g1 - cosh((phi0 - phi2) / 2) / r2 * g2)
    pbm = 2 * sm * (r2 * cosh((phi0 + phi2) / 2) * g2 + r1 * cosh((phi0 + phi1) / 2) * g1)
    return psm, pbm


def bilinear_identity_residuals(phi0, phi_plus, phi_minus, psi_plus, psibar_plus,
                                g1, g2, sigma1, sigma2, m, roots=None):
    """Residuals of the two bilinear identities for ``-i psi_- psi0`` and ``-i psibar_- psibar0``.

    ``psi_-`` and ``psibar_-`` are taken on-shell (:func:`onshell_minus_fermions`).
    """
    phi1, phi2 = (phi_plus + phi_minus) / 2, (phi_plus - phi_minus) / 2
    psi0, psibar0 = eliminate_psi0(phi0, phi1, phi2, psi_plus, psibar_plus, g1, g2,
                                   sigma1, sigma2, m, roots)
    psm, pbm = onshell_minus_fermions(phi0, phi1, phi2, g1, g2, sigma1, sigma2, m, roots)
    r1, r2 = _roots(sigma1, sigma2, roots)
    sigma = r1 * r2
    ch = cosh(phi_minus / 2)
    r1 = (-1j * psm * psi0
          - (-0.5j * psi_plus * psm - 2j * m / sigma * (ch + cosh(phi_plus / 2 - phi0)) * g1 * g2))
    r2 = (-1j * pbm * psibar0
          - (0.5j * psibar_plus * pbm - 2j * m * sigma * (ch + cosh(phi_plus / 2 + phi0)) * g1 * g2))
    return r1, r2


# ---------------------------------------------------------------------------
# the (g1, g2) -> (f1, f1t) rotation
# ---------------------------------------------------------------------------
def mu_nu(phi_minus, tau: complex, atol: float = 1e-12):
    """The four rotation functions ``(mu1, mu2, nu1, nu2)``.

    Principal square roots; the consistency ``mu1*nu2 = exp(phi_-/2)`` is
    asserted at every call because a mismatched pair of branches would
    silently flip a sign.
    """
    t = phi_minus - 2 * tau
    d1, d2 = 1 + exp(-t), 1 + exp(t)
    for den in (d1, d2):
        if np.any(np.abs(_body(den)) < atol):
            raise SingularError("mu/nu singular: 1 + exp(+-(phi_- - 2 tau)) = 0")
    mu1, mu2 = sqrt(2 / d1), sqrt(2 / d2)
    nu1, nu2 = np.exp(-tau) / mu1, np.exp(tau) / mu2
    err = np.max(np.abs(_body(mu1 * nu2 - exp(phi_minus / 2))))
    if err > 1e-8 * (1 + np.max(np.abs(_body(exp(phi_minus / 2))))):
        raise BranchError(f"mu/nu branch mismatch: mu1*nu2 - exp(phi_-/2) = {err:.3g}")
    return mu1, mu2, nu1, nu2


def _body(x):
    return x.body() if isinstance(x, GrassmannElement) else x


class BranchError(SingularError):
    """Principal square roots of ``mu1``, ``mu2`` give ``mu1*nu2 = -exp(phi_-/2)``."""


def g_from_f(f1, f1t, phi_minus, tau):
    """``(g1, g2)`` in terms of ``(f1, f1t)``."""
    mu1, mu2, _, _ = mu_nu(phi_minus, tau)
    return mu1 / 2 * f1 - mu2 / 2 * f1t, mu2 / 2 * f1 + mu1 / 2 * f1t


def kinetic_form_residual(f1, f1t, dt_f1, dt_f1t, phi_minus, dt_phi_minus, tau):
    """Residual of the kinetic-term identity under the rotation.

    ``2i g1 dt g1 + 2i g2 dt g2 - [i f1 dt f1 + i f1t dt f1t - i W f1 f1t]`` with
    ``W = mu1 dt mu2 - mu2 dt mu1``.  Time derivatives of ``g_k`` and ``mu_i``
    are taken exactly by dual augmentation along the supplied tangents.
    Returns ``(residual, identity_residual)`` where the second entry checks
    ``-i W f1 f1t = i dt(phi_-) / (2 cosh(phi_-/2 - tau)) f1 f1t``.
    """
    from .dual import directional

    table = f1.table

    def rot(f1, f1t, pm):
        mu1, mu2, _, _ = mu_nu(pm, tau)
        g1, g2 = g_from_f(f1, f1t, pm, tau)
        return {"g1": g1, "g2": g2, "mu1": mu1, "mu2": mu2}

    pm = _lift(phi_minus, table)
    val, der = directional(rot, {"f1": f1, "f1t": f1t, "pm": pm},
                           {"f1": dt_f1, "f1t": dt_f1t, "pm": _lift(dt_phi_minus, table)}, table)
    g1, g2, dg1, dg2 = val["g1"], val["g2"], der["g1"], der["g2"]
    W = val["mu1"] * der["mu2"] - val["mu2"] * der["mu1"]
    lhs = 2j * g1 * dg1 + 2j * g2 * dg2
    rhs = 1j * f1 * dt_f1 + 1j * f1t * dt_f1t - 1j * W * f1 * f1t
    ident = -1j * W * f1 * f1t - 1j * dt_phi_minus / (2 * cosh(pm / 2 - tau)) * f1 * f1t
    return lhs - rhs, ident


# ---------------------------------------------------------------------------
# the fused evaluator
# ---------------------------------------------------------------------------
def b0_shifted(phi_plus, phi_minus, lam, sigma, tau, m):
    """Bosonic potential after the first shift, written in ``(phi_+, phi_-, lambda0)``."""
    A = phi_plus - lam
    cc = cosh(phi_minus / 2 - tau) * cosh(phi_minus / 2 + tau)
    return m * sigma * (exp(A) + exp(-A) * cc) + m / sigma * (exp(-lam) + exp(lam) * cc)


@dataclass
class FusedEvaluation:
    """Intermediate and final quantities of one pipeline evaluation."""

    phi0: GrassmannElement
    g1: GrassmannElement
    g2: GrassmannElement
    psi0: GrassmannElement
    psibar0: GrassmannElement
    B0: GrassmannElement
    B1: GrassmannElement
    B1_reduced: GrassmannElement
    total: GrassmannElement
    extras: dict = field(default_factory=dict)


class FusedDefect:
    """Evaluator for the defect produced by fusing two type-I defects.

    ``sigma1 = sigma e^{-tau}`` and ``sigma2 = sigma e^{tau}``.  The optional
    ``defect1`` / ``defect2`` passed to :func:`fuse` are checked against
    these identifications.
    """

    def __init__(self, sigma: complex, tau: complex, m: float):
        self.sigma, self.tau, self.m = sigma, tau, m
        self.sigma1 = sigma * np.exp(-tau)
        self.sigma2 = sigma * np.exp(tau)
        # branch of the roots that reproduces sqrt(m sigma) in the fused potentials
        rs = np.sqrt(complex(sigma))
        self.roots = (rs * np.exp(-tau / 2), rs * np.exp(tau / 2))

    @property
    def params(self) -> DefectParams:
        return DefectParams.fused(self.sigma, self.tau, self.m)

    def phi0(self, phi_plus, phi_minus, lam):
        """Middle boson after the shift ``phi0 = -lambda0 + phi_+/2 - ln cosh(phi_-/2 - tau)``."""
        return -lam + phi_plus / 2 - log(cosh(phi_minus / 2 - self.tau))

    def bosonic(self, phi_plus, phi_minus, lam):
        """``B0^(1) + B0^(2)`` evaluated at the shifted middle boson."""
        table = _table_of(phi_plus, phi_minus, lam)
        pp, pm, L = (_lift(v, table) for v in (phi_plus, phi_minus, lam))
        phi0 = self.phi0(pp, pm, L)
        phi1, phi2 = (pp + pm) / 2, (pp - pm) / 2
        B0 = (self.m * self.sigma1 * cosh(phi0 + phi1) + self.m / self.sigma1 * cosh(phi0 - phi1)
              + self.m * self.sigma2 * cosh(phi0 + phi2) + self.m / self.sigma2 * cosh(phi0 - phi2))
        return B0

    def evaluate(self, phi_plus, phi_minus, lam, f1, f1t, psi_plus, psibar_plus,
                 psi_minus=None, psibar_minus=None) -> FusedEvaluation:
        """Run the pipeline at one point.

        ``psi_minus``/``psibar_minus`` are arbitrary odd values (default:
        zero); the reduced fermionic potential must not depend on them.
        """
        table = f1.table
        pp, pm, lam = (_lift(v, table) for v in (phi_plus, phi_minus, lam))
        psm = table.zero() if psi_minus is None else psi_minus
        pbm = table.zero() if psibar_minus is None else psibar_minus
        cm = cosh(pm / 2 - self.tau)
        lam_shifted = lam + 1j / (2 * cm) * f1 * f1t
        phi0 = -lam_shifted + pp / 2 - log(cm)
        phi1, phi2 = (pp + pm) / 2, (pp - pm) / 2
        g1, g2 = g_from_f(f1, f1t, pm, self.tau)
        psi0, psibar0 = eliminate_psi0(phi0, phi1, phi2, psi_plus, psibar_plus, g1, g2,
                                       self.sigma1, self.sigma2, self.m, self.roots)
        ps1, ps2 = (psi_plus + psm) / 2, (psi_plus - psm) / 2
        pb1, pb2 = (psibar_plus + pbm) / 2, (psibar_plus - pbm) / 2
        d1 = TypeIDefect(1, self.sigma1, g1, phi0, psi0, psibar0, phi1, ps1, pb1,
                         sqrt_sigma=self.roots[0])
        d2 = TypeIDefect(2, self.sigma2, g2, phi0, psi0, psibar0, phi2, ps2, pb2,
                         sqrt_sigma=self.roots[1])
        B0a, B1a = type1_potentials(1, d1, self.m)
        B0b, B1b = type1_potentials(2, d2, self.m)
        B0, B1 = B0a + B0b, B1a + B1b
        # trapped-fermion couplings; the psi_- dependent pieces are kinetic
        # terms of the fused defect and are removed here.
        T = -1j * psm * psi0 - 1j * pbm * psibar0 + B1
        B1_reduced = T - 0.5j * (psibar_plus * pbm - psi_plus * psm)
        return FusedEvaluation(phi0=phi0, g1=g1, g2=g2, psi0=psi0, psibar0=psibar0,
                               B0=B0, B1=B1, B1_reduced=B1_reduced, total=B0 + B1_reduced)

    def closed_form(self, phi_plus, phi_minus, lam, f1, f1t, psi_plus, psibar_plus):
        """The fused potentials of :mod:`sshgdefect.defect` at the same point."""
        table = f1.table
        pp, pm, lam = (_lift(v, table) for v in (phi_plus, phi_minus, lam))
        return potentials(pp, pm, lam, f1, f1t, psi_plus, psibar_plus, self.params)

    def compare(self, phi_plus, phi_minus, lam, f1, f1t, psi_plus, psibar_plus,
                psi_minus=None, psibar_minus=None) -> dict:
        """Sector-by-sector differences between pipeline output and closed form."""
        ev = self.evaluate(phi_plus, phi_minus, lam, f1, f1t, psi_plus, psibar_plus,
                           psi_minus, psibar_minus)
        pot = self.closed_form(phi_plus, phi_minus, lam, f1, f1t, psi_plus, psibar_plus)
        closed = pot.B0p + pot.B0m + pot.B1p + pot.B1m
        diff = ev.total - closed
        out = {"total": diff.max_abs(), "body": float(np.max(np.abs(diff.body())))}
        names = diff.table.names
        for name in names:
            out[f"d/d{name}"] = left_derivative(diff, name).max_abs()
        if psi_minus is not None:
            out["psi_minus_dependence"] = left_derivative(ev.B1_reduced, _name_of(psi_minus)).max_abs()
        if psibar_minus is not None:
            out["psibar_minus_dependence"] = left_derivative(ev.B1_reduced,
                                                             _name_of(psibar_minus)).max_abs()
        return out


def _table_of(*xs) -> GeneratorTable:
    for x in xs:
        if isinstance(x, GrassmannElement):
            return x.table
    return GeneratorTable(["_e"])


def _name_of(x: GrassmannElement) -> str:
    nz = [i for i in range(x.table.n) if abs(x.coeffs[..., 1 << i]).max() > 0]
    if len(nz) != 1:
        raise ValueError("expected a single-generator odd value")
    return x.table.names[nz[0]]


def fuse(defect1: Optional[TypeIDefect], defect2: Optional[TypeIDefect],
         sigma: complex, tau: complex, m: float) -> FusedDefect:
    """Build the fused evaluator, checking the parameter identifications if defects are given."""
    fd = FusedDefect(sigma, tau, m)
    for d, want in ((defect1, fd.sigma1), (defect2, fd.sigma2)):
        if d is not None and not np.isclose(d.sigma, want, rtol=1e-12, atol=0):
            raise ValueError(f"type-I parameter sigma_{d.k} = {d.sigma} does not match {want}")
    return fd
