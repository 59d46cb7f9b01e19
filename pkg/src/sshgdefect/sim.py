"""Lattice evolution of the bulk fields on two half-lines joined by the defect.

Side 1 lives on ``[-L, 0]`` and side 2 on ``[0, L]``; both arrays are stored
in increasing ``x`` so the junction is the last node of side 1 and the first
node of side 2.  Every lattice field is a batch of Grassmann elements.

Time stepping:

* boson interior: velocity Verlet on ``phi_tt = phi_xx + S`` with
  ``S = -2m^2 sinh 2phi + 4im psibar psi sinh phi``;
* fermions: method of lines with RK4 and upwind-biased differences
  (``psi`` moves right, ``psibar`` moves left);
* junction: the outgoing characteristic invariants are transported from the
  interior, the incoming ones follow from the defect conditions, and the
  junction values of ``phi``, ``lambda0``, ``f1`` and ``f1t`` are advanced
  with trapezoid steps.  The small implicit junction system is solved by
  fixed-point iteration.

The light-cone invariants are ``u = phi_t + phi_x`` (moves left,
``u_t - u_x = S``) and ``v = phi_t - phi_x`` (moves right,
``v_t + v_x = S``).  At ``x = 0`` the outgoing ones are ``v`` on side 1 and
``u`` on side 2.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.integrate import trapezoid

from .backlund import AuxState
from .defect import DefectParams, DefectState, _condition_rhs, modified_charges
from .grassmann import GeneratorTable, GrassmannElement, cosh, sinh
from .model import BulkPoint, ModelParams, charge_densities
from .soliton import SolitonParams, eval_solution, soliton_jets


class SimulationError(RuntimeError):
    """Non-finite values or a junction solve that does not converge."""


class CFLError(ValueError):
    """Time step violates ``dt <= cfl * dx`` or ``cfl > 1``."""


FIELDS = ("phi1", "phidot1", "psi1", "psibar1", "phi2", "phidot2", "psi2", "psibar2")
CHARS = ("u1", "v1", "u2", "v2")
CHARGES = ("E", "P", "Q", "Qbar")
STENCILS = ("upwind2", "upwind3", "upwind5")


@dataclass(frozen=True)
class SimParams:
    """Physical and numerical parameters of a run.

    ``defect=None`` gives the transparent junction (continuity of every
    field), which is the reference for the free bulk evolution.
    """

    m: float = 1.0
    defect: Optional[DefectParams] = None
    cfl: float = 0.5
    stencil: str = "upwind5"
    picard_iters: int = 20
    picard_tol: float = 1e-12
    real_mode: bool = False
    real_tol: float = 1e-12

    def __post_init__(self):
        ModelParams(self.m)
        if not 0 < self.cfl <= 1:
            raise CFLError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.stencil not in STENCILS:
            raise ValueError(f"stencil must be one of {STENCILS}")
        if self.defect is not None and self.defect.m != self.m:
            raise ValueError("defect mass differs from the bulk mass")


@dataclass
class LatticeState:
    """Complete lattice state at time ``t``.

    ``chars`` holds the characteristic invariants at the junction node of
    each side; ``rates`` holds the time derivatives of the junction unknowns
    at ``t`` (used by the trapezoid update); ``history`` holds the previous
    incoming fermion values for extrapolation.
    """

    dx: float
    dt: float
    t: float
    x1: np.ndarray
    x2: np.ndarray
    phi1: GrassmannElement
    phidot1: GrassmannElement
    psi1: GrassmannElement
    psibar1: GrassmannElement
    phi2: GrassmannElement
    phidot2: GrassmannElement
    psi2: GrassmannElement
    psibar2: GrassmannElement
    aux: AuxState
    chars: dict
    rates: dict = field(default_factory=dict)
    history: dict = field(default_factory=dict)

    @property
    def table(self) -> GeneratorTable:
        return self.phi1.table

    @property
    def J(self) -> int:
        """Index of ``x = 0`` in the side-1 arrays (side 2 uses index 0)."""
        return len(self.x1) - 1

    def copy(self) -> "LatticeState":
        def cp(el):
            return GrassmannElement(el.table, el.coeffs.copy())
        kw = {f: cp(getattr(self, f)) for f in FIELDS}
        return replace(self, x1=self.x1.copy(), x2=self.x2.copy(), chars=dict(self.chars),
                       rates=dict(self.rates), history=dict(self.history), **kw)

    def junction(self) -> DefectState:
        """Defect state at ``x = 0`` with lab-frame boson derivatives from the invariants."""
        J = self.J
        c = self.chars
        s1 = BulkPoint(phi=self.phi1[J], psi=self.psi1[J], psibar=self.psibar1[J],
                       phi_x=(c["u1"] - c["v1"]) * 0.5, phi_t=(c["u1"] + c["v1"]) * 0.5)
        s2 = BulkPoint(phi=self.phi2[0], psi=self.psi2[0], psibar=self.psibar2[0],
                       phi_x=(c["u2"] - c["v2"]) * 0.5, phi_t=(c["u2"] + c["v2"]) * 0.5)
        return DefectState(s1, s2, self.aux)

    def check_grading(self):
        for name in FIELDS:
            want = "odd" if name.startswith("psi") else "even"
            el = getattr(self, name)
            if el.generator_count and el.parity() not in (want, "zero"):
                raise SimulationError(f"{name} lost its grading")

    # serialization -------------------------------------------------
    def to_json(self) -> dict:
        def arr(el):
            return {"re": el.coeffs.real.tolist(), "im": el.coeffs.imag.tolist()}

        def scal(el):
            return None if el is None else arr(el)

        return {
            "generators": list(self.table.names),
            "dx": self.dx, "dt": self.dt, "t": self.t,
            "x1": self.x1.tolist(), "x2": self.x2.tolist(),
            "fields": {f: arr(getattr(self, f)) for f in FIELDS},
            "aux": {k: scal(getattr(self.aux, k)) for k in ("lambda0", "f1", "f1t")},
            "chars": {k: scal(v) for k, v in self.chars.items()},
            "rates": {k: scal(v) for k, v in self.rates.items()},
            "history": {k: scal(v) for k, v in self.history.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "LatticeState":
        table = GeneratorTable(data["generators"])

        def el(d):
            if d is None:
                return None
            return GrassmannElement(table, np.asarray(d["re"]) + 1j * np.asarray(d["im"]))

        aux = AuxState(**{k: el(v) for k, v in data["aux"].items()})
        return cls(dx=data["dx"], dt=data["dt"], t=data["t"],
                   x1=np.asarray(data["x1"]), x2=np.asarray(data["x2"]),
                   aux=aux, chars={k: el(v) for k, v in data["chars"].items()},
                   rates={k: el(v) for k, v in data["rates"].items()},
                   history={k: el(v) for k, v in data["history"].items()},
                   **{f: el(v) for f, v in data["fields"].items()})


def save_checkpoint(state: LatticeState, path) -> None:
    Path(path).write_text(json.dumps(state.to_json()))


def load_checkpoint(path) -> LatticeState:
    return LatticeState.from_json(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# spatial operators on coefficient arrays (site axis first)
# ---------------------------------------------------------------------------
def _central_dx(c: np.ndarray, h: float) -> np.ndarray:
    return np.gradient(c, h, axis=0, edge_order=2)


def _second_dx(c: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order second derivative (off-centred next to the ends), zero on the end nodes."""
    out = np.zeros_like(c)
    out[2:-2] = (-c[:-4] + 16 * c[1:-3] - 30 * c[2:-2] + 16 * c[3:-1] - c[4:]) / (12 * h * h)
    w = np.array([10, -15, -4, 14, -6, 1]) / (12 * h * h)
    out[1] = np.tensordot(w, c[:6], axes=(0, 0))
    out[-2] = np.tensordot(w, c[::-1][:6], axes=(0, 0))
    return out


def _upwind_right(c: np.ndarray, h: float, stencil: str) -> np.ndarray:
    """``d/dx`` for a right-moving field (information from the left).

    Interior nodes use the requested upwind-biased stencil; nodes too close
    to either end fall back to lower-order one-sided forms.  Node 0 is the
    inflow node and is left at zero.
    """
    n = len(c)
    out = np.zeros_like(c)
    out[1] = (c[1] - c[0]) / h if n < 3 else (c[2] - c[0]) / (2 * h)
    out[2:] = (3 * c[2:] - 4 * c[1:-1] + c[:-2]) / (2 * h)
    if stencil in ("upwind3", "upwind5") and n > 3:
        out[2:-1] = (c[:-3] - 6 * c[1:-2] + 3 * c[2:-1] + 2 * c[3:]) / (6 * h)
    if stencil == "upwind5" and n > 5:
        out[3:-2] = (-2 * c[:-5] + 15 * c[1:-4] - 60 * c[2:-3] + 20 * c[3:-2]
                     + 30 * c[4:-1] - 3 * c[5:]) / (60 * h)
    return out


def _upwind_left(c: np.ndarray, h: float, stencil: str) -> np.ndarray:
    """``d/dx`` for a left-moving field; the last node is the inflow node."""
    return -_upwind_right(c[::-1], h, stencil)[::-1]


def _source(phi: GrassmannElement, psi: GrassmannElement, psibar: GrassmannElement, m: float):
    """``phi_tt - phi_xx`` from the bulk field equation."""
    return -2 * m**2 * sinh(2 * phi) + 4j * m * psibar * psi * sinh(phi)


def _fermion_rhs(phi, psi, psibar, h, m, stencil):
    ch = cosh(phi)
    t = phi.table
    dpsi = GrassmannElement(t, -_upwind_right(psi.coeffs, h, stencil)) - 2 * m * psibar * ch
    dpsibar = GrassmannElement(t, _upwind_left(psibar.coeffs, h, stencil)) + 2 * m * psi * ch
    return dpsi, dpsibar


def _lerp(a: GrassmannElement, b: GrassmannElement, s: float) -> GrassmannElement:
    return a * (1 - s) + b * s


def _set(el: GrassmannElement, idx, value: GrassmannElement) -> GrassmannElement:
    c = el.coeffs.copy()
    c[idx] = value.coeffs
    return GrassmannElement(el.table, c)


def _rk4_fermions(side: int, phi_n, phi_np1, psi, psibar, inflow, h, dt, m, stencil):
    """Advance one side's fermions; ``inflow(s)`` gives the junction inflow value at ``t + s dt``.

    Side 1: ``psi`` enters at node 0 (held fixed), ``psibar`` at the junction
    node ``-1``.  Side 2: ``psi`` enters at the junction node 0, ``psibar``
    at the outer node ``-1`` (held fixed).
    """
    psi_in0, pb_in0 = psi[0], psibar[-1]

    def bc(ps, pb, s):
        if side == 1:
            return _set(ps, 0, psi_in0), _set(pb, -1, inflow(s))
        return _set(ps, 0, inflow(s)), _set(pb, -1, pb_in0)

    def rhs(ps, pb, s):
        ps, pb = bc(ps, pb, s)
        a, b = _fermion_rhs(_lerp(phi_n, phi_np1, s), ps, pb, h, m, stencil)
        # inflow nodes are prescribed, not evolved
        a = _set(a, 0, a.table.zero())
        b = _set(b, -1, b.table.zero())
        return a, b

    k1 = rhs(psi, psibar, 0.0)
    k2 = rhs(psi + k1[0] * (dt / 2), psibar + k1[1] * (dt / 2), 0.5)
    k3 = rhs(psi + k2[0] * (dt / 2), psibar + k2[1] * (dt / 2), 0.5)
    k4 = rhs(psi + k3[0] * dt, psibar + k3[1] * dt, 1.0)
    ps = psi + (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) * (dt / 6)
    pb = psibar + (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) * (dt / 6)
    return bc(ps, pb, 1.0)


# ---------------------------------------------------------------------------
# junction
# ---------------------------------------------------------------------------
def _junction_rhs(params: SimParams, phi1, phi2, aux: AuxState, psi1, psi2, psibar1, psibar2):
    """Right-hand sides of the defect conditions; zero for the transparent junction."""
    if params.defect is None:
        z = phi1.table.zero()
        return {k: z for k in ("phi_plus", "plus_phi_minus", "minus_phi_minus",
                               "psm", "pbm", "dt_f1", "dt_f1t")}
    return _condition_rhs(phi1 + phi2, phi1 - phi2, aux.lambda0, aux.f1, aux.f1t,
                          psi1 + psi2, psibar1 + psibar2, params.defect)


def _junction_rates(params: SimParams, state: LatticeState) -> dict:
    """Time derivatives of the junction unknowns implied by the current invariants."""
    J = state.J
    c = state.chars
    R = _junction_rhs(params, state.phi1[J], state.phi2[0], state.aux,
                      state.psi1[J], state.psi2[0], state.psibar1[J], state.psibar2[0])
    rates = {
        "phi1": (c["u1"] + c["v1"]) * 0.5,
        "phi2": (c["u2"] + c["v2"]) * 0.5,
    }
    if params.defect is not None:
        rates["lambda0"] = (R["phi_plus"] + c["v1"] + c["v2"]) * 0.5
        rates["f1"] = R["dt_f1"]
        rates["f1t"] = R["dt_f1t"]
    return rates


def _incoming(params: SimParams, state: LatticeState, u2, v1, phi1, phi2, aux, psi1, psi2, psibar1, psibar2):
    R = _junction_rhs(params, phi1, phi2, aux, psi1, psi2, psibar1, psibar2)
    return u2 + R["plus_phi_minus"], v1 + R["minus_phi_minus"], R


def characteristic_residuals(state: LatticeState, params: SimParams) -> dict:
    """How far the junction data are from the defect conditions (zero after every step)."""
    J = state.J
    c = state.chars
    R = _junction_rhs(params, state.phi1[J], state.phi2[0], state.aux,
                      state.psi1[J], state.psi2[0], state.psibar1[J], state.psibar2[0])
    out = {
        "u1": c["u1"] - c["u2"] - R["plus_phi_minus"],
        "v2": c["v2"] - c["v1"] - R["minus_phi_minus"],
        "psi": state.psi1[J] - state.psi2[0] - R["psm"],
        "psibar": state.psibar1[J] - state.psibar2[0] - R["pbm"],
    }
    if params.defect is None:
        out["phi"] = state.phi1[J] - state.phi2[0]
    return {k: v.max_abs() for k, v in out.items()}


def _lagrange_weights(c: float, n: int = 4) -> np.ndarray:
    """Weights at distance ``c`` (grid units) through the nodes at distances ``0..n-1``."""
    nodes = np.arange(n, dtype=float)
    w = np.ones(n)
    for j in range(n):
        for k in range(n):
            if k != j:
                w[j] *= (c - nodes[k]) / (nodes[j] - nodes[k])
    return w


def _outgoing_foot(phi, phidot, psi, psibar, at_junction, h, c, m):
    """Outgoing invariant and source at distance ``c h`` from the junction.

    Inputs hold the six nodes nearest the junction ordered by distance from
    it.  Measured along that distance ``k``, the outgoing invariant of either
    side is ``phidot + d phi/dk``; at the junction node the stored value is
    used.  Fourth-order differences and cubic interpolation keep the
    transported value accurate to third order per step.
    """
    f = phi.coeffs
    d = np.empty_like(f[1:4])
    d[0] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[1:] = (f[0:2] - 8 * f[1:3] + 8 * f[3:5] - f[4:6]) / (12 * h)
    inv = np.concatenate([at_junction.coeffs[None], phidot.coeffs[1:4] + d])
    src = _source(phi[0:4], psi[0:4], psibar[0:4], m).coeffs
    w = _lagrange_weights(c)
    T = phi.table
    return GrassmannElement(T, w @ inv), GrassmannElement(T, w @ src)


# ---------------------------------------------------------------------------
# time step
# ---------------------------------------------------------------------------
def check_cfl(dt: float, dx: float, cfl: float) -> None:
    if not 0 < cfl <= 1:
        raise CFLError(f"cfl must lie in (0, 1], got {cfl}")
    if dt <= 0 or dx <= 0 or dt > cfl * dx * (1 + 1e-12):
        raise CFLError(f"dt={dt} exceeds cfl*dx={cfl * dx}")


def _predict(rates: dict, history: dict, dt: float) -> dict:
    """Second-order increments of the junction unknowns from the current and previous rates."""
    out = {}
    for k, r in rates.items():
        prev = history.get("rate_" + k)
        out[k] = r * dt if prev is None else (r * 1.5 - prev * 0.5) * dt
    return out


def _accel(phi, psi, psibar, h, m):
    return GrassmannElement(phi.table, _second_dx(phi.coeffs, h)) + _source(phi, psi, psibar, m)


def step(state: LatticeState, params: SimParams) -> LatticeState:
    """Advance ``state`` by one time step ``state.dt``; returns a new state."""
    check_cfl(state.dt, state.dx, params.cfl)
    _check_finite(state, params)
    h, dt, m = state.dx, state.dt, params.m
    J = state.J
    c = dt / h
    S = state
    defect = params.defect is not None

    # 1. boson drift in the interior (outer nodes are Dirichlet)
    a1 = _accel(S.phi1, S.psi1, S.psibar1, h, m)
    a2 = _accel(S.phi2, S.psi2, S.psibar2, h, m)
    phi1_new = S.phi1 + S.phidot1 * dt + a1 * (dt * dt / 2)
    phi2_new = S.phi2 + S.phidot2 * dt + a2 * (dt * dt / 2)
    phi1_new = _set(phi1_new, 0, S.phi1[0])
    phi2_new = _set(phi2_new, -1, S.phi2[-1])

    # junction predictor
    rates = S.rates or _junction_rates(params, S)
    guess = _predict(rates, S.history, dt)
    g_phi1 = S.phi1[J] + guess["phi1"]
    g_phi2 = S.phi2[0] + guess["phi2"]
    phi1_new = _set(phi1_new, J, g_phi1)
    phi2_new = _set(phi2_new, 0, g_phi2)

    # 2. fermions with extrapolated junction inflow
    pb_in_n, ps_in_n = S.psibar1[J], S.psi2[0]
    pb_in_guess = 2 * pb_in_n - S.history.get("psibar1", pb_in_n)
    ps_in_guess = 2 * ps_in_n - S.history.get("psi2", ps_in_n)
    psi1_new, psibar1_new = _rk4_fermions(1, S.phi1, phi1_new, S.psi1, S.psibar1,
                                          lambda s: _lerp(pb_in_n, pb_in_guess, s),
                                          h, dt, m, params.stencil)
    psi2_new, psibar2_new = _rk4_fermions(2, S.phi2, phi2_new, S.psi2, S.psibar2,
                                          lambda s: _lerp(ps_in_n, ps_in_guess, s),
                                          h, dt, m, params.stencil)

    # 3. outgoing invariants at the characteristic feet (time n)
    near1 = slice(J, J - 6, -1)
    v1_foot, s1_foot = _outgoing_foot(S.phi1[near1], S.phidot1[near1], S.psi1[near1],
                                      S.psibar1[near1], S.chars["v1"], h, c, m)
    u2_foot, s2_foot = _outgoing_foot(S.phi2[0:6], S.phidot2[0:6], S.psi2[0:6],
                                      S.psibar2[0:6], S.chars["u2"], h, c, m)

    # 4. implicit junction system by fixed-point iteration
    ps1, pb2 = psi1_new[J], psibar2_new[0]
    pb1, ps2 = pb_in_guess, ps_in_guess
    aux = S.aux
    aux_g = AuxState(lambda0=aux.lambda0 + guess["lambda0"], f1=aux.f1 + guess["f1"],
                     f1t=aux.f1t + guess["f1t"]) if defect else aux
    p1, p2 = g_phi1, g_phi2
    change = np.inf
    for _ in range(params.picard_iters):
        v1 = v1_foot + (s1_foot + _source(p1, ps1, pb1, m)) * (dt / 2)
        u2 = u2_foot + (s2_foot + _source(p2, ps2, pb2, m)) * (dt / 2)
        if defect:
            # the minus-fermions depend only on the junction bosons and f1, f1t,
            # so the incoming fermions are refreshed before the rates are formed
            R0 = _junction_rhs(params, p1, p2, aux_g, ps1, ps2, pb1, pb2)
            ps2, pb1 = ps1 - R0["psm"], pb2 + R0["pbm"]
        u1, v2, R = _incoming(params, S, u2, v1, p1, p2, aux_g, ps1, ps2, pb1, pb2)
        ps2_n = ps1 - R["psm"]
        pb1_n = pb2 + R["pbm"]
        p1_n = S.phi1[J] + (rates["phi1"] + (u1 + v1) * 0.5) * (dt / 2)
        p2_n = S.phi2[0] + (rates["phi2"] + (u2 + v2) * 0.5) * (dt / 2)
        if defect:
            lam_rate = (R["phi_plus"] + v1 + v2) * 0.5
            aux_n = AuxState(lambda0=aux.lambda0 + (rates["lambda0"] + lam_rate) * (dt / 2),
                             f1=aux.f1 + (rates["f1"] + R["dt_f1"]) * (dt / 2),
                             f1t=aux.f1t + (rates["f1t"] + R["dt_f1t"]) * (dt / 2))
            change = max((aux_n.lambda0 - aux_g.lambda0).max_abs(), (aux_n.f1 - aux_g.f1).max_abs(),
                         (aux_n.f1t - aux_g.f1t).max_abs())
            aux_g = aux_n
        else:
            change = 0.0
        change = max(change, (p1_n - p1).max_abs(), (p2_n - p2).max_abs(),
                     (ps2_n - ps2).max_abs(), (pb1_n - pb1).max_abs())
        p1, p2, ps2, pb1 = p1_n, p2_n, ps2_n, pb1_n
        if change <= params.picard_tol * max(1.0, p1.max_abs(), p2.max_abs()):
            break
    else:
        if change > 1e-9:
            raise SimulationError(f"junction iteration did not converge (last change {change:.3e})")
    # final invariants consistent with the converged junction values
    v1 = v1_foot + (s1_foot + _source(p1, ps1, pb1, m)) * (dt / 2)
    u2 = u2_foot + (s2_foot + _source(p2, ps2, pb2, m)) * (dt / 2)
    u1, v2, _ = _incoming(params, S, u2, v1, p1, p2, aux_g, ps1, ps2, pb1, pb2)

    phi1_new = _set(phi1_new, J, p1)
    phi2_new = _set(phi2_new, 0, p2)
    psibar1_new = _set(psibar1_new, J, pb1)
    psi2_new = _set(psi2_new, 0, ps2)

    # 5. boson kick
    a1n = _accel(phi1_new, psi1_new, psibar1_new, h, m)
    a2n = _accel(phi2_new, psi2_new, psibar2_new, h, m)
    phidot1_new = S.phidot1 + (a1 + a1n) * (dt / 2)
    phidot2_new = S.phidot2 + (a2 + a2n) * (dt / 2)
    zero = S.table.zero()
    phidot1_new = _set(_set(phidot1_new, 0, zero), J, (u1 + v1) * 0.5)
    phidot2_new = _set(_set(phidot2_new, -1, zero), 0, (u2 + v2) * 0.5)

    new = LatticeState(
        dx=h, dt=dt, t=S.t + dt, x1=S.x1, x2=S.x2,
        phi1=phi1_new, phidot1=phidot1_new, psi1=psi1_new, psibar1=psibar1_new,
        phi2=phi2_new, phidot2=phidot2_new, psi2=psi2_new, psibar2=psibar2_new,
        aux=AuxState(lambda0=aux_g.lambda0, f1=aux_g.f1, f1t=aux_g.f1t),
        chars={"u1": u1, "v1": v1, "u2": u2, "v2": v2},
        history={"psibar1": pb_in_n, "psi2": ps_in_n,
                 **{"rate_" + k: v for k, v in rates.items()}},
    )
    new.rates = _junction_rates(params, new)
    _finalize(new, params)
    return new


def _check_finite(state: LatticeState, params: SimParams) -> None:
    arrays = [getattr(state, f).coeffs for f in FIELDS]
    arrays += [v.coeffs for v in state.chars.values()]
    if params.defect is not None:
        arrays += [state.aux.lambda0.coeffs, state.aux.f1.coeffs, state.aux.f1t.coeffs]
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise SimulationError(f"non-finite coefficient at t={state.t:.6g}")


def _finalize(state: LatticeState, params: SimParams) -> None:
    _check_finite(state, params)
    if params.real_mode:
        for f in FIELDS:
            el = getattr(state, f)
            if np.max(np.abs(el.coeffs.imag), initial=0.0) > params.real_tol:
                raise SimulationError(f"{f} left the real sector at t={state.t:.6g}")
            setattr(state, f, GrassmannElement(el.table, el.coeffs.real.astype(complex)))


# ---------------------------------------------------------------------------
# charges
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ChargeRecord:
    t: float
    bulk: dict
    defect: dict
    totals: dict

    def row(self, odd_generator: Optional[str] = None) -> dict:
        """Flat complex-valued record: body of even charges, one coefficient of odd ones."""
        out = {"t": self.t}
        for group, src in (("", self.bulk), ("_D", self.defect), ("_tot", self.totals)):
            for k in CHARGES:
                out[k + group] = _scalar_of(src[k], odd_generator)
        return out


def _scalar_of(el: GrassmannElement, odd_generator: Optional[str]) -> complex:
    if el.is_odd() and el.generator_count:
        name = odd_generator or el.table.names[0]
        return complex(el.coeff(name))
    return complex(el.body())


def _dx4(c: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order first derivative: central inside, one-sided five-point at the ends."""
    out = np.empty_like(c)
    out[2:-2] = (c[:-4] - 8 * c[1:-3] + 8 * c[3:-1] - c[4:]) / (12 * h)
    w = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    out[0] = np.tensordot(w, c[:5], axes=(0, 0))
    out[-1] = -np.tensordot(w, c[::-1][:5], axes=(0, 0))
    wb = np.array([-3, -10, 18, -6, 1]) / (12 * h)
    out[1] = np.tensordot(wb, c[:5], axes=(0, 0))
    out[-2] = -np.tensordot(wb, c[::-1][:5], axes=(0, 0))
    return out


def _side_point(phi, phidot, psi, psibar, h, junction_index, u, v):
    phi_x = _dx4(phi.coeffs, h)
    phi_x[junction_index] = ((u - v) * 0.5).coeffs
    t = phi.table
    return BulkPoint(phi=phi, psi=psi, psibar=psibar,
                     phi_x=GrassmannElement(t, phi_x), phi_t=phidot,
                     psi_x=GrassmannElement(t, _dx4(psi.coeffs, h)),
                     psibar_x=GrassmannElement(t, _dx4(psibar.coeffs, h)))


def _integrate(el: GrassmannElement, h: float) -> GrassmannElement:
    """Trapezoid rule with the Euler-Maclaurin end correction (fourth order)."""
    c = el.coeffs
    d = _dx4(c, h)
    total = trapezoid(c, dx=h, axis=0) - h * h / 12 * (d[-1] - d[0])
    return GrassmannElement(el.table, total)


def total_charges(state: LatticeState, params: SimParams) -> ChargeRecord:
    """Bulk charges by trapezoid quadrature plus the defect contributions."""
    mp = ModelParams(params.m)
    c = state.chars
    h = state.dx
    p1 = _side_point(state.phi1, state.phidot1, state.psi1, state.psibar1, h, -1, c["u1"], c["v1"])
    p2 = _side_point(state.phi2, state.phidot2, state.psi2, state.psibar2, h, 0, c["u2"], c["v2"])
    d1, d2 = charge_densities(p1, mp), charge_densities(p2, mp)
    names = {"E": "energy", "P": "momentum", "Q": "supercharge", "Qbar": "supercharge_bar"}
    bulk = {k: _integrate(getattr(d1, n), h) + _integrate(getattr(d2, n), h) for k, n in names.items()}
    if params.defect is None:
        z = state.table.zero()
        dfc = {k: z for k in CHARGES}
    else:
        mc = modified_charges(state.junction(), params.defect)
        dfc = {"E": mc.E_D, "P": mc.P_D, "Q": mc.Q_D, "Qbar": mc.Qbar_D}
    totals = {k: bulk[k] + dfc[k] for k in CHARGES}
    return ChargeRecord(state.t, bulk, dfc, totals)


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------
def grid(L: float, dx: float) -> tuple[np.ndarray, np.ndarray]:
    n = int(round(L / dx))
    if n < 4 or abs(n * dx - L) > 1e-9 * L:
        raise ValueError(f"L={L} must be a multiple of dx={dx} with at least 4 cells")
    x2 = np.arange(n + 1) * dx
    return -x2[::-1].copy(), x2


def _from_points(p1: BulkPoint, p2: BulkPoint, x1, x2, dx, dt, t0, aux, params) -> LatticeState:
    u1 = (p1.phi_t + p1.phi_x)[-1]
    v1 = (p1.phi_t - p1.phi_x)[-1]
    u2 = (p2.phi_t + p2.phi_x)[0]
    v2 = (p2.phi_t - p2.phi_x)[0]
    st = LatticeState(dx=dx, dt=dt, t=t0, x1=x1, x2=x2,
                      phi1=p1.phi, phidot1=p1.phi_t, psi1=p1.psi, psibar1=p1.psibar,
                      phi2=p2.phi, phidot2=p2.phi_t, psi2=p2.psi, psibar2=p2.psibar,
                      aux=aux, chars={"u1": u1, "v1": v1, "u2": u2, "v2": v2})
    check_cfl(dt, dx, params.cfl)
    st.rates = _junction_rates(params, st)
    return st


def state_from_profiles(side1: Callable[[np.ndarray], BulkPoint],
                        side2: Callable[[np.ndarray], BulkPoint], aux: AuxState,
                        params: SimParams, L: float = 20.0, dx: float = 0.02,
                        t0: float = 0.0) -> LatticeState:
    """Lattice state from profile functions ``x -> BulkPoint`` (with ``phi_x``, ``phi_t``)."""
    x1, x2 = grid(L, dx)
    return _from_points(side1(x1), side2(x2), x1, x2, dx, params.cfl * dx, t0, aux, params)


def soliton_defect_params(sp: SolitonParams) -> DefectParams:
    return DefectParams(m=sp.m, omega1=sp.omega1, omega2=sp.omega2)


def soliton_state(sp: SolitonParams, z, zeta, t0: float, params: SimParams,
                  L: float = 20.0, dx: float = 0.02) -> LatticeState:
    """Analytic one-soliton data at ``t0``.

    With a defect, side 2 carries the transmitted soliton; without one,
    side 1's solution is continued across ``x = 0``.
    """
    x1, x2 = grid(L, dx)
    table = sp.table()
    p1 = eval_solution(1, x1, t0, sp, z, zeta, table)
    if params.defect is None:
        p2 = eval_solution(1, x2, t0, sp, z, zeta, table)
        aux = AuxState(lambda0=table.zero(), f1=table.zero(), f1t=table.zero())
    else:
        p2 = eval_solution(2, x2, t0, sp, z, zeta, table)
        jet = soliton_jets(0.0, t0, sp, z, zeta, table)
        aux = AuxState(lambda0=jet.aux.lambda0, f1=jet.aux.f1, f1t=jet.aux.f1t)
    return _from_points(p1, p2, x1, x2, dx, params.cfl * dx, t0, aux, params)


def constant_state(phi1, phi2, aux: AuxState, table: GeneratorTable, params: SimParams,
                   L: float = 20.0, dx: float = 0.02, t0: float = 0.0) -> LatticeState:
    """Spatially constant bulk fields (vacua), fermions zero, given defect data."""
    x1, x2 = grid(L, dx)
    n = len(x1)

    def const(v):
        el = v if isinstance(v, GrassmannElement) else table.scalar(v)
        return GrassmannElement(table, np.broadcast_to(el.coeffs, (n, table.dim)).copy())

    zero = const(0.0)

    def pt(phi):
        return BulkPoint(phi=const(phi), psi=zero, psibar=zero, phi_x=zero, phi_t=zero)

    return _from_points(pt(phi1), pt(phi2), x1, x2, dx, params.cfl * dx, t0, aux, params)


# ---------------------------------------------------------------------------
# driver and output
# ---------------------------------------------------------------------------
@dataclass
class SimResult:
    state: LatticeState
    series: list = field(default_factory=list)
    max_junction_residual: float = 0.0


def run(state: LatticeState, params: SimParams, t_end: float, every: int = 10,
        odd_generator: Optional[str] = None,
        callback: Optional[Callable[[LatticeState], None]] = None) -> SimResult:
    """Step until ``t_end`` (the last step is shortened to land on it) and sample charges."""
    res = SimResult(state)

    def sample(s, k):
        rec = total_charges(s, params).row(odd_generator)
        r = max(characteristic_residuals(s, params).values())
        rec["max_residual"] = r
        res.max_junction_residual = max(res.max_junction_residual, r)
        res.series.append(rec)

    s = state
    sample(s, 0)
    k = 0
    dt0 = state.dt
    while s.t < t_end - 1e-12 * max(1.0, abs(t_end)):
        dt = min(dt0, t_end - s.t)
        if dt != s.dt:
            s = replace(s, dt=dt, history={})
        s = step(s, params)
        k += 1
        if callback is not None:
            callback(s)
        if k % every == 0 or s.t >= t_end - 1e-12 * max(1.0, abs(t_end)):
            sample(s, k)
    s.dt = dt0
    res.state = s
    return res


def csv_columns() -> list[str]:
    cols = ["t"]
    for group in ("", "_D", "_tot"):
        for k in CHARGES:
            cols += [f"Re_{k}{group}", f"Im_{k}{group}"]
    return cols + ["max_residual"]


def write_series(rows: list, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(csv_columns())
        for r in rows:
            line = [r["t"]]
            for group in ("", "_D", "_tot"):
                for k in CHARGES:
                    v = r[k + group]
                    line += [v.real, v.imag]
            w.writerow(line + [r["max_residual"]])


def relative_drift(series: list, key: str = "E_tot", ref: str = "E") -> float:
    """``max_t |X(t) - X(t0)| / |E_bulk(t0)|`` over a sampled series."""
    x0 = series[0][key]
    scale = abs(series[0][ref])
    return max(abs(r[key] - x0) for r in series) / scale


# ---------------------------------------------------------------------------
# delay measurement
# ---------------------------------------------------------------------------
class FitError(ValueError):
    """Too few usable points or an ill-conditioned delay fit."""


def transmitted_E(phi2) -> np.ndarray:
    """``E2`` recovered from the side-2 field through ``(1 + e^phi2)/(1 - e^phi2) = -E2``."""
    w = np.exp(np.asarray(phi2, dtype=complex))
    return -(1 + w) / (1 - w)


def measure_delay(state: LatticeState, sp: SolitonParams, window=(1e-9, 0.3),
                  x_min: float = 0.0, min_points: int = 8, cond_tol: float = 1e-300) -> complex:
    """Least-squares fit of ``E2 = z R1 exp(a x + b t)`` on the side-2 tail."""
    x = state.x2
    E = transmitted_E(state.phi2.body())
    X = sp.R1 * np.exp(sp.a * x + sp.b * state.t)
    mag = np.abs(E)
    mask = (x >= x_min) & (mag > window[0]) & (mag < window[1]) & np.isfinite(E)
    if mask.sum() < min_points:
        raise FitError(f"only {int(mask.sum())} tail points inside the fit window")
    Xm, Em = X[mask], E[mask]
    norm = np.vdot(Xm, Xm).real
    if norm <= cond_tol:
        raise FitError("fit basis has vanishing norm")
    return complex(np.vdot(Xm, Em) / norm)
