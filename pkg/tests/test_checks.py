import math

from sshgdefect.checks import SUITES, CheckResult, Sampler, algebra_suite, all_passed


def test_check_result_semantics():
    assert CheckResult("a", 1e-13, 1e-12).passed
    assert not CheckResult("a", 1e-11, 1e-12).passed
    assert CheckResult("c", 1.0, 1e-12, control=True).passed
    assert not CheckResult("c", 1e-14, 1e-12, control=True).passed
    assert not CheckResult("n", math.nan, 1e-12).passed
    assert not CheckResult("n", math.inf, 1e-12, control=True).passed
    assert CheckResult("a", 0.0, 1.0).as_dict()["pass"] is True


def test_sampler_is_seeded():
    a, b = Sampler(5), Sampler(5)
    assert a.complex() == b.complex()
    assert abs(Sampler(1).complex(size=100)).max() <= 1.5


def test_algebra_suite_small():
    results = algebra_suite(seed=1, samples=50)
    assert all_passed(results)
    assert {r.name for r in results} == {"associativity", "graded_commutativity", "leibniz",
                                         "exp_inverse"}


def test_suite_registry():
    assert set(SUITES) == {"algebra", "superfield", "backlund", "defect", "pb", "fusing",
                           "laxpair", "soliton", "limits"}
