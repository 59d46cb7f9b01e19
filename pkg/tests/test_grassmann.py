import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_element
from sshgdefect.grassmann import (DimensionError, GeneratorTable, GradingError, GrassmannElement,
                                  SingularError, cosh, embed, exp, koszul_sign, left_derivative, log,
                                  power, restrict, sinh, sqrt)

TABLE = GeneratorTable([f"t{i}" for i in range(6)])
seeds = st.integers(0, 2**32 - 1)


def close(a, b, tol=1e-12):
    return (a - b).max_abs() <= tol * max(1.0, a.max_abs(), b.max_abs())


@given(seeds)
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_element(TABLE, rng) for _ in range(3))
    assert close((a * b) * c, a * (b * c))


@given(seeds, st.sampled_from(["even", "odd"]), st.sampled_from(["even", "odd"]))
def test_graded_commutativity(seed, pa, pb):
    rng = np.random.default_rng(seed)
    a = random_element(TABLE, rng, parity=pa)
    b = random_element(TABLE, rng, parity=pb)
    sign = -1 if pa == pb == "odd" else 1
    assert close(a * b, sign * (b * a))


@given(seeds, st.sampled_from(TABLE.names))
def test_leibniz_rule_for_left_derivative(seed, name):
    rng = np.random.default_rng(seed)
    a = random_element(TABLE, rng, parity="odd")
    b = random_element(TABLE, rng)
    lhs = left_derivative(a * b, name)
    rhs = left_derivative(a, name) * b - a * left_derivative(b, name)
    assert close(lhs, rhs)


@given(seeds)
def test_exp_times_exp_minus_is_one(seed):
    rng = np.random.default_rng(seed)
    a = random_element(TABLE, rng, parity="even")
    assert close(exp(a) * exp(-a), TABLE.scalar(1.0))


@given(seeds)
def test_log_inverts_exp(seed):
    rng = np.random.default_rng(seed)
    a = random_element(TABLE, rng, 0.3, parity="even")
    assert close(log(exp(a)), a, 1e-11)


@given(seeds)
def test_hyperbolic_identity_and_sqrt(seed):
    rng = np.random.default_rng(seed)
    a = random_element(TABLE, rng, 0.5, parity="even")
    assert close(cosh(a) * cosh(a) - sinh(a) * sinh(a), TABLE.scalar(1.0), 1e-11)
    b = a + 3.0
    assert close(sqrt(b) * sqrt(b), b, 1e-11)
    assert close(power(b, -1) * b, TABLE.scalar(1.0), 1e-11)


@given(seeds)
def test_odd_elements_square_to_zero(seed):
    rng = np.random.default_rng(seed)
    a = random_element(TABLE, rng, parity="odd")
    assert (a * a).max_abs() < 1e-12


@given(seeds)
def test_division_by_even_invertible(seed):
    rng = np.random.default_rng(seed)
    a = random_element(TABLE, rng)
    b = random_element(TABLE, rng, 0.3, parity="even") + 2.0
    assert close((a / b) * b, a, 1e-11)


def test_generator_anticommute():
    t0, t1 = TABLE.gen("t0"), TABLE.gen("t1")
    assert (t0 * t1 + t1 * t0).max_abs() == 0
    assert (t0 * t1).coeff("t0", "t1") == 1
    assert (t1 * t0).coeff("t0", "t1") == -1


def test_koszul_sign_simple():
    assert koszul_sign(0b10, 0b01) == -1
    assert koszul_sign(0b01, 0b10) == 1


def test_parity_labels():
    eps = TABLE.gen("t0")
    assert TABLE.scalar(2.0).parity() == "even"
    assert eps.parity() == "odd"
    assert (eps + 1).parity() == "inhomogeneous"
    assert TABLE.monomial(("t0", "t1")).parity() == "even"


def test_body_and_soul():
    x = 2.0 + TABLE.monomial(("t0", "t1"), 3.0)
    assert x.body() == 2.0
    assert x.soul().coeff("t0", "t1") == 3.0


def test_exp_of_odd_raises_grading_error():
    with pytest.raises(GradingError):
        exp(TABLE.gen("t0"))


def test_log_of_nilpotent_raises_singular_error():
    with pytest.raises(SingularError):
        log(TABLE.monomial(("t0", "t1")))


def test_table_limits():
    with pytest.raises(DimensionError):
        GeneratorTable([])
    with pytest.raises(ValueError):
        GeneratorTable(["a", "a"])
    with pytest.raises(KeyError):
        TABLE.gen("nope")


def test_mixing_tables_raises():
    other = GeneratorTable(["a"])
    with pytest.raises(DimensionError):
        TABLE.gen("t0") + other.gen("a")


def test_embed_restrict_roundtrip():
    small = GeneratorTable(["t0", "t1"])
    x = small.scalar(1.5) + small.monomial(("t0", "t1"), 2j)
    big = embed(x, TABLE)
    assert big.coeff("t0", "t1") == 2j
    assert restrict(big, small) == x
    with pytest.raises(DimensionError):
        embed(x, GeneratorTable(["t1", "t0"]))


def test_analytic_functions_accept_numbers():
    assert np.isclose(exp(1.0), np.e)
    assert np.isclose(sinh(0.5j), 1j * np.sin(0.5))


@given(seeds)
def test_json_roundtrip(seed):
    rng = np.random.default_rng(seed)
    x = random_element(TABLE, rng)
    data = json.loads(json.dumps(x.to_json()))
    assert GrassmannElement.from_json(TABLE, data) == x


def test_json_rejects_batches():
    with pytest.raises(ValueError):
        TABLE.zero((2,)).to_json()


def test_batched_arithmetic_matches_single():
    rng = np.random.default_rng(3)
    a = GrassmannElement(TABLE, rng.normal(size=(4, TABLE.dim)))
    b = GrassmannElement(TABLE, rng.normal(size=(4, TABLE.dim)))
    prod = a * b
    for i in range(4):
        assert close(prod[i], a[i] * b[i])
