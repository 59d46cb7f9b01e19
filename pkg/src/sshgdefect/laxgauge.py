"""Lax pair, defect matrix ``K`` and the gauge equation order by order in ``lambda``.

The spectral parameter is formal: every matrix is a map from a half-integer
power of ``lambda`` (stored as an integer count of ``lambda^{1/2}``) to a
3x3 array of Grassmann elements.  Rows and columns carry the grading
``(even, even, odd)``.  Residuals are therefore checked power by power.

``sqrt(i)`` is fixed to ``exp(i pi / 4)`` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .backlund import AuxState, BacklundParams, backlund_rhs
from .dual import DualContext
from .grassmann import GeneratorTable, GrassmannElement, GradingError, cosh, exp, sinh
from .model import BulkPoint

SQRT_I = np.exp(1j * np.pi / 4)
ROW_PARITY = (0, 0, 1)
MIN_POWER, MAX_POWER = -3, 3


class LaurentRangeError(ValueError):
    """A lambda power outside the declared range was produced."""


# ---------------------------------------------------------------------------
# graded Laurent matrices
# ---------------------------------------------------------------------------
class GradedLaurentMatrix:
    """3x3 graded matrix with Laurent-polynomial entries in ``lambda^{1/2}``.

    ``coeffs[p][i][j]`` is the coefficient of ``lambda^{p/2}`` in entry
    ``(i, j)``; absent powers are zero.
    """

    def __init__(self, table: GeneratorTable, coeffs: Optional[dict] = None):
        self.table = table
        self.coeffs: dict[int, list[list[GrassmannElement]]] = {}
        for p, block in (coeffs or {}).items():
            for i in range(3):
                for j in range(3):
                    self.add(p, i, j, block[i][j])

    # -- construction ------------------------------------------------------
    def _block(self, p: int):
        if not MIN_POWER <= p <= MAX_POWER:
            raise LaurentRangeError(f"lambda power {p}/2 outside [{MIN_POWER}/2, {MAX_POWER}/2]")
        if p not in self.coeffs:
            z = self.table.zero()
            self.coeffs[p] = [[z for _ in range(3)] for _ in range(3)]
        return self.coeffs[p]

    def add(self, p: int, i: int, j: int, value) -> None:
        blk = self._block(p)
        if not isinstance(value, GrassmannElement):
            value = self.table.scalar(value)
        blk[i][j] = blk[i][j] + value

    def entry(self, p: int, i: int, j: int) -> GrassmannElement:
        blk = self.coeffs.get(p)
        return self.table.zero() if blk is None else blk[i][j]

    @property
    def powers(self) -> list[int]:
        return sorted(self.coeffs)

    # -- algebra -----------------------------------------------------------
    def __add__(self, other: "GradedLaurentMatrix") -> "GradedLaurentMatrix":
        out = GradedLaurentMatrix(self.table)
        for M in (self, other):
            for p, blk in M.coeffs.items():
                for i in range(3):
                    for j in range(3):
                        out.add(p, i, j, blk[i][j])
        return out

    def scale(self, c) -> "GradedLaurentMatrix":
        out = GradedLaurentMatrix(self.table)
        for p, blk in self.coeffs.items():
            for i in range(3):
                for j in range(3):
                    out.add(p, i, j, blk[i][j] * c)
        return out

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __matmul__(self, other: "GradedLaurentMatrix") -> "GradedLaurentMatrix":
        out = GradedLaurentMatrix(self.table)
        for p, a in self.coeffs.items():
            for q, b in other.coeffs.items():
                for i in range(3):
                    for j in range(3):
                        acc = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j]
                        out.add(p + q, i, j, acc)
        return out

    # -- inspection ----------------------------------------------------------
    def check_parity(self, atol: float = 1e-12) -> None:
        """Entry ``(i, j)`` must have parity ``row(i) xor col(j)`` at every power."""
        for p, blk in self.coeffs.items():
            for i in range(3):
                for j in range(3):
                    x = blk[i][j]
                    if x.max_abs() <= atol:
                        continue
                    want = "odd" if ROW_PARITY[i] ^ ROW_PARITY[j] else "even"
                    if x.parity(atol) != want:
                        raise GradingError(f"entry ({i + 1},{j + 1}) at lambda^{p}/2 is not {want}")

    def max_abs_by_power(self) -> dict[int, float]:
        return {p: max(blk[i][j].max_abs() for i in range(3) for j in range(3))
                for p, blk in sorted(self.coeffs.items())}

    def report(self) -> dict:
        """Serializable per-power, per-slot maxima."""
        return {f"{p}/2": [[blk[i][j].max_abs() for j in range(3)] for i in range(3)]
                for p, blk in sorted(self.coeffs.items())}

    def map(self, fn) -> "GradedLaurentMatrix":
        """Apply ``fn`` to every coefficient (must be linear for derivatives)."""
        out = GradedLaurentMatrix(self.table)
        for p, blk in self.coeffs.items():
            for i in range(3):
                for j in range(3):
                    out.add(p, i, j, fn(blk[i][j]))
        return out


# ---------------------------------------------------------------------------
# Lax pair
# ---------------------------------------------------------------------------
def _lax_plus(dp_phi: GrassmannElement, psibar: GrassmannElement) -> GradedLaurentMatrix:
    T = dp_phi.table
    M = GradedLaurentMatrix(T)
    sb = SQRT_I * psibar
    M.add(1, 0, 0, 1); M.add(0, 0, 0, -dp_phi); M.add(0, 0, 1, -1); M.add(0, 0, 2, sb)
    M.add(2, 1, 0, -1); M.add(1, 1, 1, 1); M.add(0, 1, 1, dp_phi); M.add(1, 1, 2, sb)
    M.add(1, 2, 0, sb); M.add(0, 2, 1, sb); M.add(1, 2, 2, 2)
    return M


def _lax_minus(phi: GrassmannElement, psi: GrassmannElement, m: float) -> GradedLaurentMatrix:
    T = phi.table
    M = GradedLaurentMatrix(T)
    q = m * m / 4
    h = SQRT_I * m / 2
    ep, em = exp(phi), exp(-phi)
    M.add(-1, 0, 0, q); M.add(-2, 0, 1, -q * ep * ep); M.add(-1, 0, 2, h * psi * ep)
    M.add(0, 1, 0, -q * em * em); M.add(-1, 1, 1, q); M.add(0, 1, 2, h * psi * em)
    M.add(0, 2, 0, -h * psi * em); M.add(-1, 2, 1, -h * psi * ep); M.add(-1, 2, 2, 2 * q)
    return M


def lax_plus(point: BulkPoint) -> GradedLaurentMatrix:
    """``A_+`` at a bulk point (needs the first derivatives of ``phi``)."""
    return _lax_plus(point.dplus("phi"), point.psibar)


def lax_minus(point: BulkPoint, m: float) -> GradedLaurentMatrix:
    """``A_-`` at a bulk point."""
    return _lax_minus(point.phi, point.psi, m)


def zero_curvature_residual(point: BulkPoint, m: float) -> GradedLaurentMatrix:
    """``d_- A_+ - d_+ A_- - [A_+, A_-]`` per power of ``lambda``.

    ``A_+`` is affine in ``(d_+ phi, psibar)``, so ``d_- A_+`` is ``A_+``
    evaluated on the minus-derivatives minus its constant part.  ``d_+ A_-``
    goes through the chain rule by dual augmentation.  The point must carry
    second derivatives of ``phi`` and first derivatives of the fermions.
    """
    T = point.table
    Ap, Am = lax_plus(point), lax_minus(point, m)
    z = T.zero()
    dmAp = _lax_plus(point.dplusminus_phi(), point.dminus("psibar")) - _lax_plus(z, z)
    ctx = DualContext(T, 1)
    d = ctx.unit(0)
    Amd = _lax_minus(ctx.lift(point.phi) + ctx.lift(point.dplus("phi")) * d,
                     ctx.lift(point.psi) + ctx.lift(point.dplus("psi")) * d, m)
    dpAm = _project(Amd, ctx, T)
    return dmAp - dpAm - (Ap @ Am - Am @ Ap)


def _project(M: GradedLaurentMatrix, ctx: DualContext, table: GeneratorTable,
             *units: int) -> GradedLaurentMatrix:
    ks = units or (0,)
    out = GradedLaurentMatrix(table)
    for p, blk in M.coeffs.items():
        for i in range(3):
            for j in range(3):
                out.add(p, i, j, ctx.part(blk[i][j], *ks))
    return out


# ---------------------------------------------------------------------------
# defect matrix
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class KConstants:
    """Integration constants of ``K``; only ``c11`` is free."""

    c11: complex
    b11: complex
    b12: complex
    b33: complex
    c33: complex

    @classmethod
    def from_c11(cls, c11: complex, sigma: complex, m: float) -> "KConstants":
        if c11 == 0:
            raise ValueError("c11 must be nonzero")
        b12 = m * sigma * c11
        b11 = m * sigma * b12 / 4
        return cls(c11=c11, b11=b11, b12=b12, b33=b11, c33=c11)


def defect_matrix_K(phi_plus, phi_minus, lambda0, f1, f1t, sigma: complex, tau: complex,
                    m: float, c11: complex = 1.0) -> GradedLaurentMatrix:
    """The type-II defect matrix in the fused parametrization."""
    k = KConstants.from_c11(c11, sigma, m)
    T = f1.table
    pp, pm, lam = (x if isinstance(x, GrassmannElement) else T.scalar(x)
                   for x in (phi_plus, phi_minus, lambda0))
    A = pp - lam
    sh, ch, ct = sinh(pm / 2), cosh(pm / 2), np.cosh(tau)
    ff = f1 * f1t
    rims = SQRT_I * np.sqrt(m * sigma)           # sqrt(i m sigma)
    kb = 2 * SQRT_I / np.sqrt(m * sigma) * k.b11
    eA2, emA2, ep2, em2 = exp(A / 2), exp(-A / 2), exp(pm / 2), exp(-pm / 2)
    c11, b11, b12 = k.c11, k.b11, k.b12
    M = GradedLaurentMatrix(T)
    # K11
    M.add(0, 0, 0, 0.5j * m * sigma * c11 * em2 * ff)
    M.add(-1, 0, 0, b11 * exp(-pm))
    M.add(1, 0, 0, c11)
    # K12
    M.add(-1, 0, 1, b12 * exp(A))
    # K13
    M.add(0, 0, 2, -rims * c11 * eA2 * f1)
    M.add(-1, 0, 2, kb * eA2 * em2 * f1t)
    # K21
    M.add(1, 1, 0, b12 * exp(-A) * (sh * sh + ct**2 + 1j * ct * ch * ff))
    # K22
    M.add(0, 1, 1, 0.5j * m * sigma * c11 * ep2 * ff)
    M.add(-1, 1, 1, b11 * exp(pm))
    M.add(1, 1, 1, c11)
    # K23
    M.add(0, 1, 2, kb * emA2 * ep2 * (ct * f1t - sh * f1))
    M.add(1, 1, 2, -rims * c11 * emA2 * (sh * f1t + ct * f1))
    # K31
    M.add(0, 2, 0, kb * emA2 * em2 * (ct * f1t - sh * f1))
    M.add(1, 2, 0, rims * c11 * emA2 * (sh * f1t + ct * f1))
    # K32
    M.add(0, 2, 1, rims * c11 * eA2 * f1)
    M.add(-1, 2, 1, kb * eA2 * ep2 * f1t)
    # K33
    M.add(0, 2, 2, -m * sigma * c11 * (1j * ch * f1t * f1 + ct))
    M.add(-1, 2, 2, k.b33)
    M.add(1, 2, 2, k.c33)
    return M


def defect_matrix_from_state(state, sigma, tau, m, c11=1.0) -> GradedLaurentMatrix:
    """``K`` from a :class:`~sshgdefect.defect.DefectState`."""
    a = state.aux
    return defect_matrix_K(state.phi_plus, state.phi_minus, a.lambda0, a.f1, a.f1t,
                           sigma, tau, m, c11)


# ---------------------------------------------------------------------------
# jets and the gauge equation
# ---------------------------------------------------------------------------
@dataclass
class GaugeJets:
    """Both sides and the auxiliary fields with first light-cone derivatives."""

    p1: BulkPoint
    p2: BulkPoint
    aux: AuxState


def backlund_jets(phi_plus, phi_minus, lambda0, f1, f1t, psi_plus, psibar_plus,
                  dplus_phi_plus, dminus_phi_plus, sigma, tau, m) -> GaugeJets:
    """Jets consistent with the fused Baecklund relations.

    ``d_+ phi_+`` and ``d_- phi_+`` are free; every other first derivative
    and ``psi_-``, ``psibar_-`` follow from the relations.
    """
    T = f1.table
    lift = (lambda x: x if isinstance(x, GrassmannElement) else T.scalar(x))
    pp, pm, lam = lift(phi_plus), lift(phi_minus), lift(lambda0)
    dpp, dmp = lift(dplus_phi_plus), lift(dminus_phi_plus)
    params = BacklundParams.fused(sigma, tau, m)
    R = backlund_rhs(pp, pm, lam, f1, f1t, psi_plus, psibar_plus, params)
    psm, pbm = R["psm"], R["pbm"]
    dp = {"pm": R["dp_pm"], "lam": R["dp_lam"], "f1": R["dp_f1"], "f1t": R["dp_f1t"]}
    dm = {"pm": R["dm_pm"], "lam": dmp - R["dm_ppml"], "f1": R["dm_f1"], "f1t": R["dm_f1t"]}

    def xt(plus, minus):
        return plus + minus, plus - minus

    def side(sign):
        phi = (pp + sign * pm) / 2
        x, t = xt((dpp + sign * dp["pm"]) / 2, (dmp + sign * dm["pm"]) / 2)
        return BulkPoint(phi=phi, psi=(psi_plus + sign * psm) / 2,
                         psibar=(psibar_plus + sign * pbm) / 2, phi_x=x, phi_t=t)

    lx, lt = xt(dp["lam"], dm["lam"])
    fx, ft = xt(dp["f1"], dm["f1"])
    gx, gt = xt(dp["f1t"], dm["f1t"])
    aux = AuxState(lam, f1, f1t, lambda0_x=lx, lambda0_t=lt, f1_x=fx, f1_t=ft,
                   f1t_x=gx, f1t_t=gt)
    return GaugeJets(side(+1), side(-1), aux)


def _K_and_derivatives(jets: GaugeJets, sigma, tau, m, c11):
    p1, p2, aux = jets.p1, jets.p2, jets.aux
    T = aux.table
    pp, pm = p1.phi + p2.phi, p1.phi - p2.phi
    K = defect_matrix_K(pp, pm, aux.lambda0, aux.f1, aux.f1t, sigma, tau, m, c11)
    ctx = DualContext(T, 1)
    d = ctx.unit(0)
    out = {}
    for sign in ("+", "-"):
        der = (lambda P, n: P.dplus(n)) if sign == "+" else (lambda P, n: P.dminus(n))
        dpp = der(p1, "phi") + der(p2, "phi")
        dpm = der(p1, "phi") - der(p2, "phi")
        args = [(pp, dpp), (pm, dpm), (aux.lambda0, der(aux, "lambda0")),
                (aux.f1, der(aux, "f1")), (aux.f1t, der(aux, "f1t"))]
        lifted = [ctx.lift(v) + ctx.lift(dv) * d for v, dv in args]
        Kd = defect_matrix_K(*lifted, sigma, tau, m, c11)
        out[sign] = _project(Kd, ctx, T)
    return K, out


def gauge_residual(jets: GaugeJets, sigma, tau, m, c11=1.0) -> dict:
    """``d_pm K - K A^(1)_pm + A^(2)_pm K`` for both signs, per power of ``lambda``.

    ``d_pm K`` follows the chain rule through the closed-form entries of
    ``K`` using the jets' first derivatives.
    """
    K, dK = _K_and_derivatives(jets, sigma, tau, m, c11)
    A = {"+": (lax_plus(jets.p1), lax_plus(jets.p2)),
         "-": (lax_minus(jets.p1, m), lax_minus(jets.p2, m))}
    return {s: dK[s] - (K @ A[s][0] - A[s][1] @ K) for s in ("+", "-")}


# ---------------------------------------------------------------------------
# the gauge equation written out per power and entry
# ---------------------------------------------------------------------------
def expanded_relation_residuals(jets: GaugeJets, sigma, tau, m, c11=1.0) -> dict:
    """Every component relation of the gauge equation as a named residual.

    ``K_ij = alpha_ij + lambda^{-1/2} beta_ij + lambda^{1/2} gamma_ij``.
    Names give the power of ``lambda`` and the quantity the relation fixes
    (``d+``/``d-`` mark derivative relations).  Also included: the combined
    constraint on ``alpha13 + gamma23`` and ``gamma31 + alpha32`` and the
    relations among the integration constants.
    """
    K, dK = _K_and_derivatives(jets, sigma, tau, m, c11)
    p1, p2 = jets.p1, jets.p2
    s, M = SQRT_I, m
    h = s * M / 2
    kk = 2 * s / M
    q = M * M / 4
    pp, pm = p1.phi + p2.phi, p1.phi - p2.phi
    ps1, ps2, pb1, pb2 = p1.psi, p2.psi, p1.psibar, p2.psibar
    e = exp
    Dp_pp = p1.dplus("phi") + p2.dplus("phi")
    Dp_pm = p1.dplus("phi") - p2.dplus("phi")

    def coef(p):
        return lambda ij: K.entry(p, int(ij[0]) - 1, int(ij[1]) - 1)

    def dcoef(sign, p):
        return lambda ij: dK[sign].entry(p, int(ij[0]) - 1, int(ij[1]) - 1)

    a, b, g = coef(0), coef(-1), coef(1)
    Pa, Pb, Pg = dcoef("+", 0), dcoef("+", -1), dcoef("+", 1)
    Ma, Mb, Mg = dcoef("-", 0), dcoef("-", -1), dcoef("-", 1)
    k = KConstants.from_c11(c11, sigma, m)
    epm = lambda c: e(c * pm)          # noqa: E731
    epp = lambda c: e(c * pp)          # noqa: E731
    ppm = pp + pm
    pmm = pp - pm

    r = {}
    # lambda^{+3/2}
    r["L+3/2:gamma12"] = g("12")
    r["L+3/2:gamma13"] = g("13")
    r["L+3/2:gamma32"] = g("32")
    r["L+3/2:gamma11-gamma22"] = g("11") - g("22")
    # lambda^{+1}
    r["L+1:alpha12"] = a("12") - g("13") * s * pb1
    r["L+1:gamma13"] = g("13") + g("12") * s * pb1
    r["L+1:gamma32"] = g("32") + g("12") * s * pb2
    r["L+1:alpha11-alpha22"] = a("11") - a("22") - s * (pb2 * g("31") - g("23") * pb1)
    r["L+1:alpha13+gamma23"] = a("13") + g("23") - s * (pb2 * g("33") - g("11") * pb1)
    r["L+1:gamma31+alpha32"] = g("31") + a("32") - s * (pb1 * g("33") - g("11") * pb2)
    # lambda^{-3/2}
    r["L-3/2:beta21"] = b("21")
    r["L-3/2:beta23"] = b("23")
    r["L-3/2:beta31"] = b("31")
    r["L-3/2:beta22"] = b("22") - b("11") * epm(2)
    # lambda^{-1}
    r["L-1:alpha21"] = a("21") - kk * ps2 * b("31") * e(-pmm / 2)
    r["L-1:beta23"] = b("23") + kk * b("21") * ps1 * e(ppm / 2)
    r["L-1:beta31"] = b("31") - kk * ps2 * b("21") * e(pmm / 2)
    lhs16 = a("11") * epm(1) - a("22") * epm(-1)
    r["L-1:alpha11,alpha22(a)"] = lhs16 - kk * epp(0.5) * (a("23") * ps1 * epm(-0.5)
                                                          + epm(0.5) * ps2 * a("31"))
    r["L-1:alpha11,alpha22(b)"] = lhs16 + kk * epp(-0.5) * (ps2 * b("32") * epm(-0.5)
                                                           + epm(0.5) * b("13") * ps1)
    r["L-1:alpha31,beta32"] = (a("31") * e(ppm) + b("32")
                               + kk * epp(0.5) * (b("33") * ps1 * epm(0.5)
                                                  - b("22") * ps2 * epm(-0.5)))
    r["L-1:alpha23,beta13"] = (a("23") * e(pmm) + b("13")
                               + kk * epp(0.5) * (b("11") * ps1 * epm(0.5)
                                                  - b("33") * ps2 * epm(-0.5)))
    # lambda^0, plus-derivatives
    r["L0:d+alpha11"] = Pa("11") + a("11") * Dp_pm - s * (b("13") * pb1 - pb2 * a("31"))
    r["L0:d+alpha13"] = (Pa("13") - a("13") / 2 * (Dp_pp - Dp_pm) - b("13") - a("23")
                         + s * pb2 * a("33") - s * (a("11") + b("12")) * pb1)
    r["L0:d+alpha23"] = (Pa("23") + a("23") / 2 * (Dp_pp - Dp_pm)
                         - s * (b("22") * pb1 - pb2 * b("33")))
    r["L0:d+alpha22"] = Pa("22") - a("22") * Dp_pm - s * (a("23") * pb1 - pb2 * b("32"))
    r["L0:d+alpha31"] = (Pa("31") + a("31") / 2 * (Dp_pp + Dp_pm)
                         - s * (b("33") * pb1 - pb2 * b("11")))
    r["L0:d+alpha32"] = (Pa("32") - a("32") / 2 * (Dp_pp + Dp_pm) + a("31") + b("32")
                         - a("33") * s * pb1 + s * pb2 * (b("12") + a("22")))
    r["L0:d+alpha33"] = Pa("33") - s * (b("32") + a("31")) * pb1 + s * pb2 * (a("23") + b("13"))
    # lambda^0, minus-derivatives
    r["L0:d-alpha11"] = Ma("11") + h * epm(-0.5) * (a("13") * ps1 * epp(-0.5)
                                                   + epp(0.5) * ps2 * g("31"))
    r["L0:d-alpha13"] = Ma("13") + h * epp(0.5) * (epm(-0.5) * ps2 * g("33")
                                                  - g("11") * ps1 * epm(0.5))
    r["L0:d-alpha22"] = Ma("22") + h * epm(0.5) * (epp(-0.5) * ps2 * a("32")
                                                  + g("23") * ps1 * epp(0.5))
    r["L0:d-alpha23"] = (Ma("23") - q * (g("23") + a("13") * e(-pmm))
                         - h * (g("21") * e(ppm / 2) + a("22") * e(-ppm / 2)) * ps1
                         + h * e(-pmm / 2) * ps2 * a("33"))
    r["L0:d-alpha31"] = (Ma("31") + q * (g("31") + a("32") * e(-ppm))
                         - h * ps2 * (e(-pmm / 2) * a("11") + e(pmm / 2) * g("21"))
                         + h * a("33") * ps1 * e(-ppm / 2))
    r["L0:d-alpha32"] = Ma("32") + h * epp(0.5) * (g("33") * ps1 * epm(0.5)
                                                  - epm(-0.5) * ps2 * g("11"))
    r["L0:d-alpha33"] = (Ma("33") - h * (g("31") * e(ppm / 2) + a("32") * e(-ppm / 2)) * ps1
                         - h * ps2 * (e(-pmm / 2) * a("13") + e(pmm / 2) * g("23")))
    # lambda^{-1/2}
    r["L-1/2:d-beta11"] = (Mb("11") - q * epm(-1) * (g("21") * epp(1) - b("12") * epp(-1))
                           + h * epm(-0.5) * (b("13") * ps1 * epp(-0.5) + epp(0.5) * ps2 * a("31")))
    r["L-1/2:d-beta12"] = (Mb("12") - q * g("11") * epp(1) * (epm(-1) - epm(1))
                           + h * epp(0.5) * (a("13") * ps1 * epm(0.5) + epm(-0.5) * ps2 * a("32")))
    r["L-1/2:d-beta13"] = (Mb("13") - q * (g("23") * e(pmm) + a("13"))
                           - h * (a("11") * e(ppm / 2) + b("12") * e(-ppm / 2)) * ps1
                           + h * e(pmm / 2) * ps2 * a("33"))
    r["L-1/2:d-beta22"] = (Mb("22") - q * epm(1) * (b("12") * epp(-1) - g("21") * epp(1))
                           + h * epm(0.5) * (a("23") * ps1 * epp(0.5) + epp(-0.5) * ps2 * b("32")))
    r["L-1/2:d-beta32"] = (Mb("32") + q * (a("32") + g("31") * e(ppm))
                           - h * ps2 * (e(pmm / 2) * a("22") + e(-pmm / 2) * b("12"))
                           + h * a("33") * ps1 * e(ppm / 2))
    r["L-1/2:d-beta33"] = (Mb("33") - h * (b("32") * e(-ppm / 2) + a("31") * e(ppm / 2)) * ps1
                           - h * ps2 * (e(-pmm / 2) * b("13") + e(pmm / 2) * a("23")))
    r["L-1/2:d+beta11"] = Pb("11") + b("11") * Dp_pm
    r["L-1/2:d+beta12"] = (Pb("12") - b("12") * Dp_pp - b("22") + b("11")
                           - s * (b("13") * pb1 - pb2 * b("32")))
    r["L-1/2:d+beta13"] = (Pb("13") - b("13") / 2 * (Dp_pp - Dp_pm)
                           - s * (b("11") * pb1 - pb2 * b("33")))
    r["L-1/2:d+beta22"] = Pb("22") - b("22") * Dp_pm
    r["L-1/2:d+beta32"] = (Pb("32") - b("32") / 2 * (Dp_pp + Dp_pm)
                           - s * (b("33") * pb1 - pb2 * b("22")))
    r["L-1/2:d+beta33"] = Pb("33")
    # lambda^{+1/2}
    r["L+1/2:d-gamma11"] = Mg("11")
    r["L+1/2:d-gamma21"] = (Mg("21") - q * g("11") * epp(-1) * (epm(1) - epm(-1))
                            + h * epp(-0.5) * (g("23") * ps1 * epm(-0.5) + epm(0.5) * ps2 * g("31")))
    r["L+1/2:d-gamma23"] = Mg("23") + h * epp(-0.5) * (epm(0.5) * ps2 * g("33")
                                                      - g("11") * ps1 * epm(-0.5))
    r["L+1/2:d-gamma31"] = Mg("31") + h * epp(-0.5) * (g("33") * ps1 * epm(-0.5)
                                                      - epm(0.5) * ps2 * g("11"))
    r["L+1/2:d-gamma33"] = Mg("33")
    r["L+1/2:d+gamma11"] = (Pg("11") + g("11") * Dp_pm - g("21") + b("12")
                            - s * (a("13") * pb1 - pb2 * g("31")))
    r["L+1/2:d+gamma22"] = (Pg("22") - g("22") * Dp_pm + g("21") - b("12")
                            - s * (g("23") * pb1 - pb2 * a("32")))
    r["L+1/2:d+gamma21"] = (Pg("21") + g("21") * Dp_pp - b("11") + b("22")
                            - s * (a("23") * pb1 - pb2 * a("31")))
    r["L+1/2:d+gamma23"] = (Pg("23") + g("23") / 2 * (Dp_pp - Dp_pm) - b("13") - a("23")
                            + s * pb2 * a("33") - s * (a("22") + g("21")) * pb1)
    r["L+1/2:d+gamma31"] = (Pg("31") + g("31") / 2 * (Dp_pp + Dp_pm) + b("32") + a("31")
                            - s * a("33") * pb1 + s * pb2 * (a("11") + g("21")))
    r["L+1/2:d+gamma33"] = (Pg("33") - s * (a("32") + g("31")) * pb1
                            + s * pb2 * (a("13") + g("23")))
    # combined constraint and constants
    pbm = pb1 - pb2
    r["combined:alpha13+gamma23"] = a("13") + g("23") + s * k.c11 * pbm
    r["combined:gamma31+alpha32"] = g("31") + a("32") - s * k.c11 * pbm
    T = jets.aux.table
    r["const:b11"] = T.scalar(k.b11 - m * sigma * k.b12 / 4)
    r["const:c11"] = T.scalar(k.c11 - k.b12 / (m * sigma))
    return r
