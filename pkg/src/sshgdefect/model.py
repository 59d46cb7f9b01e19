"""Bulk N=1 super sinh-Gordon model: Lagrangian, field equations, densities.

Fields are stored in the lab frame (derivatives along x and t).  Light-cone
derivatives are derived on demand with ``d_pm = (d_x +- d_t) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .grassmann import GrassmannElement, cosh, sinh


class JetError(ValueError):
    """A derivative slot needed by a computation is missing."""


@dataclass(frozen=True)
class ModelParams:
    m: float = 1.0

    def __post_init__(self):
        if self.m == 0:
            raise ValueError("mass parameter must be nonzero")


@dataclass(frozen=True)
class BulkPoint:
    """Field values and lab-frame derivatives at one spacetime event.

    ``phi`` is even, ``psi`` and ``psibar`` are odd.  Derivative slots are
    optional; accessing a missing one through :meth:`need` raises
    :class:`JetError`.
    """

    phi: GrassmannElement
    psi: GrassmannElement
    psibar: GrassmannElement
    phi_x: Optional[GrassmannElement] = None
    phi_t: Optional[GrassmannElement] = None
    phi_xx: Optional[GrassmannElement] = None
    phi_tt: Optional[GrassmannElement] = None
    phi_xt: Optional[GrassmannElement] = None
    psi_x: Optional[GrassmannElement] = None
    psi_t: Optional[GrassmannElement] = None
    psibar_x: Optional[GrassmannElement] = None
    psibar_t: Optional[GrassmannElement] = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def table(self):
        return self.phi.table

    def need(self, *names: str):
        vals = []
        for n in names:
            v = getattr(self, n)
            if v is None:
                raise JetError(f"bulk point is missing derivative slot {n!r}")
            vals.append(v)
        return vals[0] if len(vals) == 1 else tuple(vals)

    # light-cone views -------------------------------------------------
    def dplus(self, name: str) -> GrassmannElement:
        x, t = self.need(f"{name}_x", f"{name}_t")
        return (x + t) * 0.5

    def dminus(self, name: str) -> GrassmannElement:
        x, t = self.need(f"{name}_x", f"{name}_t")
        return (x - t) * 0.5

    def dplusminus_phi(self) -> GrassmannElement:
        xx, tt = self.need("phi_xx", "phi_tt")
        return (xx - tt) * 0.25

    def with_(self, **kw) -> "BulkPoint":
        return replace(self, **kw)


def bulk_potentials(p: BulkPoint, params: ModelParams):
    """``(V, W)`` with ``V = m^2 (cosh 2phi - 1)`` and ``W = -4im psibar psi cosh phi``."""
    m = params.m
    V = (cosh(2 * p.phi) - 1) * m**2
    W = p.psibar * p.psi * cosh(p.phi) * (-4j * m)
    return V, W


def bulk_eom_residual(p: BulkPoint, params: ModelParams):
    """Lab-frame field-equation residuals ``(boson, psibar, psi)``."""
    m = params.m
    phi_xx, phi_tt = p.need("phi_xx", "phi_tt")
    psi_x, psi_t, pb_x, pb_t = p.need("psi_x", "psi_t", "psibar_x", "psibar_t")
    ch = cosh(p.phi)
    boson = phi_xx - phi_tt - 2 * m**2 * sinh(2 * p.phi) + 4j * m * p.psibar * p.psi * sinh(p.phi)
    r_psibar = pb_x - pb_t + 2 * m * p.psi * ch
    r_psi = psi_x + psi_t + 2 * m * p.psibar * ch
    return boson, r_psibar, r_psi


def lightcone_residuals(p: BulkPoint, params: ModelParams) -> dict[str, GrassmannElement]:
    """Light-cone component equations with the auxiliary field eliminated.

    Keys: ``boson`` (d+d-phi - m^2/2 sinh 2phi + im psibar psi sinh phi),
    ``psibar`` (d-psibar + m psi cosh phi), ``psi`` (d+psi + m psibar cosh phi).
    """
    m = params.m
    ch = cosh(p.phi)
    boson = p.dplusminus_phi() - 0.5 * m**2 * sinh(2 * p.phi) + 1j * m * p.psibar * p.psi * sinh(p.phi)
    return {
        "boson": boson,
        "psibar": p.dminus("psibar") + m * p.psi * ch,
        "psi": p.dplus("psi") + m * p.psibar * ch,
    }


def bulk_lagrangian_density(p: BulkPoint, params: ModelParams) -> GrassmannElement:
    phi_x, phi_t = p.need("phi_x", "phi_t")
    psi_x, psi_t, pb_x, pb_t = p.need("psi_x", "psi_t", "psibar_x", "psibar_t")
    V, W = bulk_potentials(p, params)
    kinetic = 0.5 * phi_x * phi_x - 0.5 * phi_t * phi_t
    fermi = 1j * p.psi * (psi_x + psi_t) - 1j * p.psibar * (pb_x - pb_t)
    return kinetic + fermi + V + W


@dataclass(frozen=True)
class ChargeDensities:
    energy: GrassmannElement
    momentum: GrassmannElement
    supercharge: GrassmannElement
    supercharge_bar: GrassmannElement


def charge_densities(p: BulkPoint, params: ModelParams) -> ChargeDensities:
    """Integrands of the bulk energy, momentum and the two supercharges."""
    m = params.m
    phi_x, phi_t = p.need("phi_x", "phi_t")
    psi_x, pb_x = p.need("psi_x", "psibar_x")
    V, W = bulk_potentials(p, params)
    energy = (0.5 * phi_x * phi_x + 0.5 * phi_t * phi_t
              - 1j * p.psibar * pb_x + 1j * p.psi * psi_x + V + W)
    momentum = phi_t * phi_x - 1j * p.psibar * pb_x - 1j * p.psi * psi_x
    sh = sinh(p.phi)
    q = p.psi * (phi_t - phi_x) + 2 * m * p.psibar * sh
    qbar = p.psibar * (phi_t + phi_x) - 2 * m * p.psi * sh
    return ChargeDensities(energy, momentum, q, qbar)


def onshell_second_derivatives(p: BulkPoint, params: ModelParams) -> BulkPoint:
    """Fill ``phi_xx`` from the field equation given ``phi_tt`` (for jets built by hand)."""
    m = params.m
    phi_tt = p.need("phi_tt")
    phi_xx = phi_tt + 2 * m**2 * sinh(2 * p.phi) - 4j * m * p.psibar * p.psi * sinh(p.phi)
    return p.with_(phi_xx=phi_xx)
