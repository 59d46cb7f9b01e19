import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from sshgdefect import sim
from sshgdefect.backlund import AuxState
from sshgdefect.defect import DefectParams, _condition_rhs
from sshgdefect.grassmann import GeneratorTable, GrassmannElement
from sshgdefect.model import BulkPoint
from sshgdefect.soliton import SolitonParams, delay_z

SP = SolitonParams()
Z1 = delay_z(SP.theta, SP.eta1, SP.eta2)[0]


# ---------------------------------------------------------------------------
# parameters and grids
# ---------------------------------------------------------------------------
def test_cfl_validation():
    with pytest.raises(sim.CFLError):
        sim.SimParams(cfl=1.5)
    with pytest.raises(sim.CFLError):
        sim.check_cfl(0.03, 0.02, 0.5)
    sim.check_cfl(0.01, 0.02, 0.5)


def test_params_validation():
    with pytest.raises(ValueError):
        sim.SimParams(stencil="central")
    with pytest.raises(ValueError):
        sim.SimParams(m=1.0, defect=DefectParams(m=2.0, omega1=1.0, omega2=1.0))


def test_grid_layout():
    x1, x2 = sim.grid(1.0, 0.25)
    assert x1[-1] == 0 and x2[0] == 0
    assert np.allclose(x1, -x2[::-1])
    with pytest.raises(ValueError):
        sim.grid(1.0, 0.3)


@given(st.sampled_from([0.05, 0.1, 0.2]), st.floats(0.1, 1.0))
@settings(max_examples=10)
def test_time_step_respects_cfl(dx, cfl):
    p = sim.SimParams(cfl=cfl)
    st_ = sim.soliton_state(SP, Z1, Z1, -3.0, p, L=2.0, dx=dx)
    assert st_.dt <= cfl * dx * (1 + 1e-12)


# ---------------------------------------------------------------------------
# bulk evolution without a defect
# ---------------------------------------------------------------------------
def _bulk_run(dx, s1=1.0, L=8.0, t0=-1.0, t1=1.0):
    sp = SolitonParams(s1=s1)
    p = sim.SimParams()
    st_ = sim.soliton_state(sp, 1.0, 1.0, t0, p, L=L, dx=dx)
    return sim.run(st_, p, t1, every=int(round(0.25 / st_.dt)))


def test_initial_bulk_energy_matches_soliton_energy():
    # the kink sits at x = log(1/|R1|)/a; far from both ends the line energy is -4 m cosh(theta)
    sp = SolitonParams()
    st_ = sim.soliton_state(sp, 1.0, 1.0, 0.0, sim.SimParams(), L=16.0, dx=0.01)
    E = sim.total_charges(st_, sim.SimParams()).bulk["E"].body()
    assert abs(E - (-4 * sp.m * np.cosh(sp.theta))) < 1e-6


def test_transparent_junction_conserves_charges_at_second_order():
    coarse = _bulk_run(0.04)
    fine = _bulk_run(0.02)
    for key in ("E", "P"):
        d1 = sim.relative_drift(coarse.series, key + "_tot")
        d2 = sim.relative_drift(fine.series, key + "_tot")
        assert d2 < 1e-4
        assert d1 / d2 > 3.0
    assert fine.max_junction_residual < 1e-9


def test_boson_body_is_blind_to_fermions_with_one_generator():
    a = _bulk_run(0.08, s1=1.0, t1=-0.5)
    b = _bulk_run(0.08, s1=0.0, t1=-0.5)
    assert np.max(np.abs(a.state.phi1.body() - b.state.phi1.body())) < 1e-13
    assert np.max(np.abs(a.state.phi2.body() - b.state.phi2.body())) < 1e-13
    assert a.state.psi1.max_abs() > 0 and b.state.psi1.max_abs() == 0


def test_grading_is_preserved():
    res = _bulk_run(0.08, t1=-0.8)
    res.state.check_grading()
    assert res.state.psi1.parity() == "odd" and res.state.phi1.parity() == "even"


def test_non_finite_values_are_detected():
    p = sim.SimParams()
    st_ = sim.soliton_state(SP, 1.0, 1.0, -1.0, p, L=2.0, dx=0.1)
    c = st_.phi1.coeffs.copy()
    c[3, 0] = np.nan
    st_.phi1 = GrassmannElement(st_.table, c)
    with pytest.raises(sim.SimulationError):
        sim.step(st_, p)


# ---------------------------------------------------------------------------
# defect junction
# ---------------------------------------------------------------------------
def _vacuum_aux(T, P, shift=0.0, f1=0.0, f1t=0.0):
    eps = T.gen(T.names[0])
    lam = np.log(1j * P.m / (P.omega1 * P.omega2)) + shift
    return AuxState(lambda0=T.scalar(lam), f1=f1 * eps, f1t=f1t * eps)


def test_vacuum_with_defect_is_stationary():
    P = DefectParams(m=1.0, omega1=np.exp(0.3), omega2=np.exp(-0.2))
    p = sim.SimParams(defect=P)
    T = GeneratorTable(["eps"])
    st_ = sim.constant_state(0.0, 1j * np.pi, _vacuum_aux(T, P), T, p, L=2.0, dx=0.1)
    res = sim.run(st_, p, 1.0)
    s = res.state
    assert s.phi1.max_abs() < 1e-12
    assert (s.phi2 - 1j * np.pi).max_abs() < 1e-12
    assert (s.aux.lambda0 - st_.aux.lambda0).max_abs() < 1e-12
    assert sim.relative_drift(res.series, "E_tot", "E_D") < 1e-12


def _ode_oracle(dx, T_end=2.0):
    """Lattice run against the junction equations integrated as a standalone ODE.

    The bulk values entering the junction (the incoming invariants and the
    incoming fermions) are recorded from the lattice, splined, and fed to
    ``solve_ivp``; the junction unknowns must agree to discretisation error.
    """
    m = 1.0
    w1, w2 = np.exp(0.3), np.exp(-0.2)
    P = DefectParams(m=m, omega1=w1, omega2=w2)
    T = GeneratorTable(["eps"])
    eps = T.gen("eps")
    aux = _vacuum_aux(T, P, shift=0.1, f1=0.1, f1t=-0.05)
    lam0 = aux.lambda0.body()
    z = T.zero()
    R = _condition_rhs(T.scalar(1j * np.pi), T.scalar(-1j * np.pi), aux.lambda0, aux.f1, aux.f1t,
                       z, z, P)
    Rp, Rm = R["plus_phi_minus"].body(), R["minus_phi_minus"].body()
    psm, pbm = R["psm"].coeff("eps"), R["pbm"].coeff("eps")
    a1, c1 = (Rp + Rm) / 2, (Rp - Rm) / 2

    def arr(v, odd=False):
        c = np.zeros(np.shape(v) + (2,), complex)
        c[..., 1 if odd else 0] = v
        return GrassmannElement(T, c)

    g = lambda x: np.exp(-x**2)  # noqa: E731

    # profiles chosen so that the junction conditions hold at t = 0
    def side1(x):
        return BulkPoint(phi=arr(a1 * x * g(x)), psi=arr(0 * x, True), psibar=arr(pbm * g(x), True),
                         phi_x=arr(a1 * (1 - 2 * x * x) * g(x)), phi_t=arr(c1 * g(x)))

    def side2(x):
        return BulkPoint(phi=arr(1j * np.pi + 0 * x), psi=arr(-psm * g(x), True),
                         psibar=arr(0 * x, True), phi_x=arr(0 * x), phi_t=arr(0 * x))

    p = sim.SimParams(m=m, defect=P)
    st_ = sim.state_from_profiles(side1, side2, aux, p, L=6.0, dx=dx)
    assert max(sim.characteristic_residuals(st_, p).values()) < 1e-12
    keys = ("t", "v1", "u2", "psi1", "pb2", "phi1", "phi2", "lam", "f1", "f1t")
    tr = {k: [] for k in keys}

    def rec(s):
        J = s.J
        for k, v in zip(keys, (s.t, s.chars["v1"].body(), s.chars["u2"].body(),
                               s.psi1[J].coeff("eps"), s.psibar2[0].coeff("eps"),
                               s.phi1[J].body(), s.phi2[0].body(), s.aux.lambda0.body(),
                               s.aux.f1.coeff("eps"), s.aux.f1t.coeff("eps"))):
            tr[k].append(v)

    rec(st_)
    sim.run(st_, p, T_end, every=50, callback=rec)
    tr = {k: np.array(v) for k, v in tr.items()}
    spl = {k: CubicSpline(tr["t"], tr[k]) for k in ("v1", "u2", "psi1", "pb2")}

    def rhs(t, y):
        p1, p2, lam, a, b = y
        v1, u2 = T.scalar(spl["v1"](t)), T.scalar(spl["u2"](t))
        f1, f1t = a * eps, b * eps
        pp, pm, L = T.scalar(p1 + p2), T.scalar(p1 - p2), T.scalar(lam)
        # psi_- and psibar_- do not involve psi_+, psibar_+; close the fermion junction with them
        R0 = _condition_rhs(pp, pm, L, f1, f1t, z, z, P)
        psp = 2 * spl["psi1"](t) * eps - R0["psm"]
        pbp = 2 * spl["pb2"](t) * eps + R0["pbm"]
        R = _condition_rhs(pp, pm, L, f1, f1t, psp, pbp, P)
        u1 = u2 + R["plus_phi_minus"]
        v2 = v1 + R["minus_phi_minus"]
        return np.array([((u1 + v1) * 0.5).body(), ((u2 + v2) * 0.5).body(),
                         ((R["phi_plus"] + v1 + v2) * 0.5).body(),
                         R["dt_f1"].coeff("eps"), R["dt_f1t"].coeff("eps")])

    y0 = np.array([tr[k][0] for k in ("phi1", "phi2", "lam", "f1", "f1t")], dtype=complex)
    sol = solve_ivp(rhs, (0, T_end), y0, t_eval=tr["t"], rtol=1e-11, atol=1e-12)
    errs = {k: np.abs(sol.y[i] - tr[k]).max()
            for i, k in enumerate(("phi1", "phi2", "lam", "f1", "f1t"))}
    moved = {k: np.abs(tr[k] - tr[k][0]).max() for k in errs}
    return errs, moved, lam0


def test_junction_matches_standalone_ode():
    coarse, _, _ = _ode_oracle(0.04)
    fine, moved, _ = _ode_oracle(0.02)
    for k in ("phi2", "lam"):
        assert moved[k] > 1e-2          # the junction actually evolves
        assert fine[k] < 1e-3
        assert coarse[k] / fine[k] > 3.0


def test_playback_delay_fit_is_exact():
    p = sim.SimParams(defect=sim.soliton_defect_params(SP))
    st_ = sim.soliton_state(SP, Z1, Z1, 10.0, p, L=20.0, dx=0.02)
    assert abs(sim.measure_delay(st_, SP) - Z1) / abs(Z1) < 1e-10


def test_delay_fit_needs_tail_points():
    p = sim.SimParams(defect=sim.soliton_defect_params(SP))
    st_ = sim.soliton_state(SP, Z1, Z1, -30.0, p, L=4.0, dx=0.1)
    with pytest.raises(sim.FitError):
        sim.measure_delay(st_, SP)


def test_transmitted_ratio_inverts_field():
    E = np.array([0.1 + 0.2j, -0.05j])
    phi2 = np.log((1 + E) / (1 - E)) + 1j * np.pi
    assert np.allclose(sim.transmitted_E(phi2), E)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------
def test_checkpoint_roundtrip(tmp_path):
    p = sim.SimParams(defect=sim.soliton_defect_params(SP))
    st_ = sim.soliton_state(SP, Z1, Z1, -1.0, p, L=2.0, dx=0.1)
    st_ = sim.step(sim.step(st_, p), p)
    path = tmp_path / "state.json"
    sim.save_checkpoint(st_, path)
    back = sim.load_checkpoint(path)
    a, b = sim.step(st_, p), sim.step(back, p)
    for f in sim.FIELDS:
        assert np.array_equal(getattr(a, f).coeffs, getattr(b, f).coeffs)
    assert a.t == b.t


def test_series_csv(tmp_path):
    res = _bulk_run(0.1, L=4.0, t1=-0.8)
    path = tmp_path / "series.csv"
    sim.write_series(res.series, path)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == sim.csv_columns()
    assert len(lines) == len(res.series) + 1
    assert sim.csv_columns()[:3] == ["t", "Re_E", "Im_E"]
