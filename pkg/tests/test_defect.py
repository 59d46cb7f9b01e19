import numpy as np
import pytest
from hypothesis import given, strategies as st

from sshgdefect.backlund import AuxState
from sshgdefect.checks import defect_suite, limits_suite
from sshgdefect.defect import (DefectParams, DefectState, PBSample, _condition_rhs,
                               bosonic_potentials, fermionic_pb2_residual, modified_charges,
                               pb1_closed_form, pb1_lhs, pb_constraint_residuals, pb_table,
                               potentials)
from sshgdefect.model import BulkPoint

disk = st.complex_numbers(max_magnitude=1.5)
nonzero = st.complex_numbers(min_magnitude=0.3, max_magnitude=1.5)
taus = st.complex_numbers(max_magnitude=0.8)
masses = st.floats(0.3, 2.0)


def test_params_validation():
    with pytest.raises(ValueError):
        DefectParams(m=1.0)
    with pytest.raises(ValueError):
        DefectParams(m=1.0, omega1=1.0, omega2=1.0, sigma=1.0, tau=0.1)
    with pytest.raises(ValueError):
        DefectParams(m=1.0, omega1=1.0)
    with pytest.raises(ValueError):
        DefectParams.fused(0.0, 0.1)
    with pytest.raises(ValueError):
        DefectParams.fused(1.0, 0.3).to_omega()
    assert DefectParams.fused(1.0, 0.3).form == "fused"


@given(nonzero, nonzero, masses, disk, disk, disk)
def test_pb_identities_omega_form(w1, w2, m, pp, pm, lam):
    P = DefectParams(m=m, omega1=w1, omega2=w2)
    r1, r2 = pb_constraint_residuals(P, PBSample(pp, pm, lam))
    assert r1.max_abs() <= 1e-10 and r2.max_abs() <= 1e-10


@given(nonzero, taus, masses, disk, disk, disk)
def test_pb_identities_fused_form(sigma, tau, m, pp, pm, lam):
    P = DefectParams.fused(sigma, tau, m)
    r1, r2 = pb_constraint_residuals(P, PBSample(pp, pm, lam))
    assert r1.max_abs() <= 1e-10 and r2.max_abs() <= 1e-10


@given(nonzero, nonzero, masses, disk, disk, disk)
def test_pb1_closed_form_reduction(w1, w2, m, pp, pm, lam):
    P = DefectParams(m=m, omega1=w1, omega2=w2)
    smp = PBSample(pp, pm, lam)
    assert abs(pb1_lhs(P, smp) - pb1_closed_form(pp, pm, m)) <= 1e-10


def test_pb1_closed_form_value():
    # m^2 (cosh 2 phi1 - cosh 2 phi2) with phi1 = 0.5, phi2 = 0.1
    assert np.isclose(pb1_closed_form(0.6, 0.4, 1.0), np.cosh(1.0) - np.cosh(0.2))


@given(nonzero, nonzero, masses)
def test_vacuum_is_stationary(w1, w2, m):
    P = DefectParams(m=m, omega1=w1, omega2=w2)
    T = pb_table()
    z = T.zero()
    lam = np.log(1j * m / (w1 * w2))
    r = _condition_rhs(T.scalar(1j * np.pi), T.scalar(-1j * np.pi), T.scalar(lam), z, z, z, z, P)
    assert max(v.max_abs() for v in r.values()) <= 1e-12


def _bosonic_state(phi1, phi2, lam):
    T = pb_table()
    z = T.zero()
    side = lambda phi: BulkPoint(phi=T.scalar(phi), psi=z, psibar=z)
    return DefectState(side(phi1), side(phi2), AuxState(T.scalar(lam), z, z))


@given(nonzero, nonzero, masses)
def test_zero_state_defect_charges(w1, w2, m):
    P = DefectParams(m=m, omega1=w1, omega2=w2)
    c = modified_charges(_bosonic_state(0.0, 0.0, 0.0), P)
    assert abs(c.E_D.body() - (m**2 / w1**2 + m**2 / w2**2)) <= 1e-10 * max(1, abs(c.E_D.body()))
    assert abs(c.P_D.body() - (m**2 / w1**2 - m**2 / w2**2)) <= 1e-10 * max(1, abs(c.P_D.body()))
    assert c.Q_D.max_abs() == 0 and c.Qbar_D.max_abs() == 0


@given(nonzero, nonzero, masses)
def test_stationary_vacuum_defect_energy(w1, w2, m):
    # substituting sinh^2(-i pi/2) = -1 and exp(lambda0) = i m/(w1 w2) by hand
    P = DefectParams(m=m, omega1=w1, omega2=w2)
    c = modified_charges(_bosonic_state(0.0, 1j * np.pi, np.log(1j * m / (w1 * w2))), P)
    want = 2j * m * (w2 / w1 - w1 / w2)
    assert abs(c.E_D.body() - want) <= 1e-10 * max(1, abs(want))


def test_supercharge_correction_from_f1t_only():
    P = DefectParams(m=1.3, omega1=1.1, omega2=0.6)
    T = pb_table()
    z = T.zero()
    side = BulkPoint(phi=z, psi=z, psibar=z)
    c = modified_charges(DefectState(side, side, AuxState(z, z, T.gen("f1t"))), P)
    assert (c.Q_D - (2 * 1.3 / 0.6) * T.gen("f1t")).max_abs() <= 1e-12


@given(nonzero, nonzero, masses, disk, disk, disk)
def test_momentum_flips_sign_under_side_swap(w1, w2, m, phi1, phi2, lam):
    P = DefectParams(m=m, omega1=w1, omega2=w2)
    Q = DefectParams(m=m, omega1=w2, omega2=w1)
    a = modified_charges(_bosonic_state(phi1, phi2, lam), P)
    b = modified_charges(_bosonic_state(-phi2, -phi1, lam - phi1 - phi2), Q)
    scale = max(1.0, abs(a.P_D.body()))
    assert abs(a.P_D.body() + b.P_D.body()) <= 1e-10 * scale
    assert abs(a.E_D.body() - b.E_D.body()) <= 1e-10 * max(1.0, abs(a.E_D.body()))


@given(nonzero, nonzero, masses, disk, disk, disk)
def test_bosonic_limit_of_potentials(w1, w2, m, pp, pm, lam):
    P = DefectParams(m=m, omega1=w1, omega2=w2)
    T = pb_table()
    z = T.zero()
    full = potentials(T.scalar(pp), T.scalar(pm), T.scalar(lam), z, z, z, z, P)
    b0p, b0m = bosonic_potentials(pp, pm, lam, P)
    assert abs(full.B0p.body() - b0p) <= 1e-10 * max(1, abs(b0p))
    assert abs(full.B0m.body() - b0m) <= 1e-10 * max(1, abs(b0m))


def test_displayed_conditions_match_backlund_derivation():
    results = defect_suite(seed=2, samples=10)
    assert all(r.passed for r in results), [r.as_dict() for r in results]


def test_fermionic_limit_requires_locked_auxiliary_fermions():
    P = DefectParams(m=1.0, omega1=1.2, omega2=0.7)
    assert fermionic_pb2_residual(P, None).max_abs() > 1e-3
    limits = {r.name: r for r in limits_suite(seed=3, samples=10)}
    for name in ("bosonic_potentials", "bosonic_conditions", "fermionic_potentials",
                 "fermionic_conditions", "fermionic_PB2_independent"):
        assert limits[name].passed, limits[name].as_dict()
