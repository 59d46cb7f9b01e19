import numpy as np
import pytest
from hypothesis import given, strategies as st

from sshgdefect.checks import Sampler, random_bulk_point
from sshgdefect.grassmann import GeneratorTable
from sshgdefect.model import (BulkPoint, JetError, ModelParams, bulk_eom_residual, bulk_potentials,
                              charge_densities, lightcone_residuals, onshell_second_derivatives)
from sshgdefect.soliton import SolitonParams, delay_z, eval_solution

seeds = st.integers(0, 2**31 - 1)


def test_zero_mass_rejected():
    with pytest.raises(ValueError):
        ModelParams(0.0)


def test_missing_slot_raises_jet_error():
    T = GeneratorTable(["a"])
    p = BulkPoint(phi=T.scalar(0.1), psi=T.gen("a"), psibar=T.zero())
    with pytest.raises(JetError):
        p.dplus("phi")
    with pytest.raises(JetError):
        bulk_eom_residual(p, ModelParams())


def test_vacuum_has_zero_potential():
    T = GeneratorTable(["a"])
    p = BulkPoint(phi=T.zero(), psi=T.zero(), psibar=T.zero())
    V, W = bulk_potentials(p, ModelParams(1.7))
    assert V.max_abs() == 0 and W.max_abs() == 0


@given(seeds, st.floats(0.2, 2.0))
def test_onshell_jets_solve_both_forms(seed, m):
    p = random_bulk_point(Sampler(seed), m=m)
    mp = ModelParams(m)
    for r in bulk_eom_residual(p, mp):
        assert r.max_abs() <= 1e-11 * max(1.0, p.phi_tt.max_abs())
    # light-cone form is the lab-frame one with d+- = (d_x +- d_t)/2
    lc = lightcone_residuals(p, mp)
    assert lc["psibar"].max_abs() <= 1e-11
    assert lc["psi"].max_abs() <= 1e-11


@given(seeds)
def test_onshell_fill_is_idempotent(seed):
    p = random_bulk_point(Sampler(seed), m=1.0)
    q = onshell_second_derivatives(p, ModelParams(1.0))
    assert (q.phi_xx - p.phi_xx).max_abs() <= 1e-12


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_soliton_solves_field_equations(x, t):
    sp = SolitonParams()
    z = delay_z(sp.theta, sp.eta1, sp.eta2)[0]
    mp = ModelParams(sp.m)
    for side in (1, 2):
        p = eval_solution(side, x, t, sp, z, z)
        for r in bulk_eom_residual(p, mp):
            assert r.max_abs() <= 1e-9


def test_soliton_energy_density_integrates_to_rest_mass_formula():
    # the one-soliton energy is -4 m cosh(theta) on the real-line grid
    sp = SolitonParams()
    x = np.linspace(-30, 30, 60001)
    p = eval_solution(1, x, 0.0, sp, 1.0, 1.0)
    e = charge_densities(p, ModelParams(sp.m)).energy.body()
    E = np.trapezoid(e, x) if hasattr(np, "trapezoid") else np.trapz(e, x)
    assert abs(E - (-4 * sp.m * np.cosh(sp.theta))) < 1e-6
