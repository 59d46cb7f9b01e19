import numpy as np
import pytest
from hypothesis import given, strategies as st

from sshgdefect.backlund import (AuxState, BacklundParams, backlund_rhs,
                                 bosonic_backlund_residuals, component_backlund_residuals,
                                 fused_backlund_residuals, fused_to_omega, generate_partner,
                                 partner_backlund_residuals, partner_eom_residuals)
from sshgdefect.checks import JET_TABLE, Sampler, backlund_suite, random_bulk_point
from sshgdefect.soliton import SolitonParams, delay_z, eval_solution, soliton_jets

SP = SolitonParams()
Z1 = delay_z(SP.theta, SP.eta1, SP.eta2)[0]
B = BacklundParams(m=SP.m, omega=SP.omegas)
seeds = st.integers(0, 2**31 - 1)


def test_params_validation():
    with pytest.raises(ValueError):
        BacklundParams(m=1.0)
    with pytest.raises(ValueError):
        BacklundParams(m=1.0, omega=(1, 2, 3, 4), sigma=1.0, tau=0.1)
    with pytest.raises(ValueError):
        BacklundParams(m=1.0, omega=(1, 0, 3, 4))
    with pytest.raises(ValueError):
        BacklundParams(m=1.0, sigma=1.0)
    assert BacklundParams.from_omega12(1.3, 0.4, 2.0).defect_compatible()
    assert not BacklundParams(m=1.0, omega=(1, 1, 2, 1)).defect_compatible()


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_soliton_satisfies_all_component_relations(x, t):
    J = soliton_jets(x, t, SP, Z1, Z1)
    res = component_backlund_residuals(J.side1, J.side2, J.aux, B)
    assert max(r.max_abs() for r in res.values()) <= 1e-9


def test_wrong_delay_violates_relations():
    z = Z1 * np.exp(0.4j)
    J = soliton_jets(0.3, 0.1, SP, z, z)
    res = component_backlund_residuals(J.side1, J.side2, J.aux, B)
    assert max(r.max_abs() for r in res.values()) > 1e-3


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_bosonic_relations_on_soliton_bodies(x, t):
    J = soliton_jets(x, t, SP, Z1, Z1)
    p1, p2, a = J.side1, J.side2, J.aux
    d = lambda p, n: (p.dplus(n).body(), p.dminus(n).body())
    res = bosonic_backlund_residuals(p1.phi.body(), p2.phi.body(), a.lambda0.body(),
                                     d(p1, "phi"), d(p2, "phi"),
                                     (a.dplus("lambda0").body(), a.dminus("lambda0").body()),
                                     SP.omegas, SP.m)
    assert max(abs(v) for v in res.values()) <= 1e-9


@given(seeds, st.complex_numbers(min_magnitude=0.3, max_magnitude=2.0))
def test_fused_form_reduces_to_omega_form_at_quarter_period(seed, sigma):
    s = Sampler(seed)
    args = [s.even(JET_TABLE) for _ in range(3)] + [s.odd(JET_TABLE) for _ in range(4)]
    fused = backlund_rhs(*args, BacklundParams.fused(sigma, 1j * np.pi / 2, 1.2))
    omega = backlund_rhs(*args, BacklundParams(m=1.2, omega=fused_to_omega(sigma, 1.2)))
    for k in fused:
        assert (fused[k] - omega[k]).max_abs() <= 1e-12 * max(1.0, omega[k].max_abs())


def test_fused_residuals_match_component_at_quarter_period():
    s = Sampler(5)
    p1, p2 = random_bulk_point(s), random_bulk_point(s)
    aux = AuxState(s.even(JET_TABLE), s.odd(JET_TABLE), s.odd(JET_TABLE), s.even(JET_TABLE),
                   s.even(JET_TABLE), s.odd(JET_TABLE), s.odd(JET_TABLE), s.odd(JET_TABLE),
                   s.odd(JET_TABLE))
    sigma = 0.7 + 0.2j
    a = fused_backlund_residuals(p1, p2, aux, sigma, 1j * np.pi / 2, 1.0)
    b = component_backlund_residuals(p1, p2, aux, BacklundParams(m=1.0, omega=fused_to_omega(sigma)))
    for k in a:
        assert (a[k] - b[k]).max_abs() <= 1e-11 * max(1.0, b[k].max_abs())


def test_superfield_form_agrees_with_components():
    results = backlund_suite(seed=4, samples=8)
    assert all(r.passed for r in results), [r.as_dict() for r in results]


def _partner(h, L=1.0, u0=-0.5, v0=-0.5):
    n = int(round(L / h)) + 1
    u = u0 + h * np.arange(n)
    v = v0 + h * np.arange(n)
    J = soliton_jets((u0 + v0) / 2, (u0 - v0) / 2, SP, Z1, Z1)
    side1 = lambda x, t: eval_solution(1, x, t, SP, Z1, Z1)
    res = generate_partner(side1, u, v, J.aux, J.side2.phi, B)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    exact = eval_solution(2, (uu + vv) / 2, (uu - vv) / 2, SP, Z1, Z1)
    return res, side1, (res.phi2 - exact.phi).max_abs(), (res.psi2 - exact.psi).max_abs()


def test_generated_partner_converges_to_analytic_soliton():
    _, _, e1, f1 = _partner(0.1)
    res, side1, e2, f2 = _partner(0.05)
    assert e2 < 5e-3 and f2 < 2e-2
    assert e1 / e2 > 3.5 and f1 / f2 > 3.5
    eom = partner_eom_residuals(res, SP.m)
    assert max(r.max_abs() for r in eom.values()) < 5e-2
    rel = partner_backlund_residuals(res, side1, B)
    # algebraic fermion relations hold exactly on the generated data
    assert rel["psm"].max_abs() <= 1e-12 and rel["pbm"].max_abs() <= 1e-12


def test_partner_grid_validation():
    J = soliton_jets(0.0, 0.0, SP, Z1, Z1)
    with pytest.raises(ValueError):
        generate_partner(lambda x, t: eval_solution(1, x, t, SP, Z1, Z1), [0.0], [0.0, 0.1],
                         J.aux, J.side2.phi, B)


def test_generated_partner_matches_analytic_on_fine_patch():
    res, _, e_phi, e_psi = _partner(1.25e-3, L=0.05, u0=-0.01, v0=-0.01)
    assert e_phi < 1e-6 and e_psi < 1e-6
    assert max(abs(res.u[-1] - res.u[0]), abs(res.v[-1] - res.v[0])) >= 0.05 - 1e-12
