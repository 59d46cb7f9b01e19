import numpy as np
import pytest
from hypothesis import given, strategies as st

from sshgdefect.checks import soliton_suite
from sshgdefect.defect import DefectParams, DefectState, defect_condition_residuals
from sshgdefect.soliton import (SolitonParams, aux_fermions_analytic, delay_z, delay_z_tanh,
                                eval_solution, f_ratio_relation, lambda0_analytic,
                                lambda0_from_fields, soliton_jets)

SP = SolitonParams()
Z1 = delay_z(SP.theta, SP.eta1, SP.eta2)[0]
reals = st.floats(-2.0, 2.0)
times = st.floats(-3.0, 3.0)


def test_delay_reference_value():
    # frozen from an independent evaluation of ((e^{eta2+theta} + i e^{eta1}) / (e^{eta2+theta} - i e^{eta1}))^2
    z1, z2 = delay_z(1.0, 0.0, 0.0)
    assert abs(z1 - (0.160051316771948 + 0.987108695129146j)) < 1e-14
    assert abs(z1 * z2 - 1) < 1e-14


def test_delay_at_matched_rapidity_is_minus_one():
    assert abs(delay_z(0.0, 0.4, 0.4)[0] + 1) < 1e-14


@given(reals, reals, reals)
def test_delay_is_unimodular_and_matches_tanh_form(theta, eta1, eta2):
    z = delay_z(theta, eta1, eta2)[0]
    assert abs(abs(z) - 1) < 1e-12
    assert abs(delay_z_tanh(theta, eta1, eta2) - z) < 1e-10


def test_rejects_zero_amplitude():
    with pytest.raises(ValueError):
        SolitonParams(R1=0.0)


def test_pole_is_reported():
    # E = R1 exp(a x) = 1 at x = log(1/|R1|)/a with R1 real
    sp = SolitonParams(R1=0.5)
    x = np.log(2.0) / sp.a
    with pytest.raises(ZeroDivisionError):
        eval_solution(1, x, 0.0, sp, Z1, Z1)


@given(times)
def test_defect_conditions_hold_at_origin(t):
    J = soliton_jets(0.0, t, SP, Z1, Z1)
    P = DefectParams(m=SP.m, omega1=SP.omega1, omega2=SP.omega2)
    res = defect_condition_residuals(DefectState(J.side1, J.side2, J.aux), P)
    assert max(r.max_abs() for r in res.values()) <= 1e-9


@given(times, reals)
def test_defect_field_closed_forms_agree(t, x):
    J = soliton_jets(x, t, SP, Z1, Z1)
    assert abs(np.exp(J.aux.lambda0.body()) - lambda0_analytic(t, SP, Z1, x)) <= 1e-10
    f1, f1t = aux_fermions_analytic(t, SP, Z1, Z1, x)
    assert (f1 - J.aux.f1).max_abs() <= 1e-12 and (f1t - J.aux.f1t).max_abs() <= 1e-12


@given(times)
def test_aux_fermion_ratio_uses_negative_root(t):
    f1, f1t = aux_fermions_analytic(t, SP, Z1, Z1)
    ratio = f1.coeff(SP.eps) / f1t.coeff(SP.eps)
    assert abs(ratio - f_ratio_relation(t, SP, Z1)) <= 1e-9 * max(1, abs(ratio))


@given(times)
def test_two_bosonic_expressions_are_inverse(t):
    p1 = eval_solution(1, 0.0, t, SP, Z1, Z1)
    p2 = eval_solution(2, 0.0, t, SP, Z1, Z1)
    e_minus, e_plus = lambda0_from_fields(p1, p2, SP)
    assert abs(e_minus * e_plus - 1) <= 1e-8
    assert abs(e_plus - lambda0_analytic(t, SP, Z1)) <= 1e-8 * max(1, abs(e_plus))


def test_soliton_suite_with_negative_controls():
    results = {r.name: r for r in soliton_suite(seed=8, samples=20)}
    assert all(r.passed for r in results.values()), [r.as_dict() for r in results.values()]
    assert results["wrong_delay_fails_conditions"].control
