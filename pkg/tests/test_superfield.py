import pytest
from hypothesis import given, strategies as st

from sshgdefect.checks import (JET_TABLE, Sampler, _random_superjet, random_bulk_point,
                               superfield_suite)
from sshgdefect.grassmann import GradingError
from sshgdefect.model import ModelParams, lightcone_residuals
from sshgdefect.superfield import (Superfield, assemble, disassemble, jet_from_bulk,
                                   sector_residuals, superD)

seeds = st.integers(0, 2**31 - 1)


@given(seeds, st.floats(0.2, 2.0))
def test_sectors_match_component_equations(seed, m):
    p = random_bulk_point(Sampler(seed))
    sec = sector_residuals(jet_from_bulk(p, m), m)
    comp = lightcone_residuals(p, ModelParams(m))
    for k in comp:
        assert (sec[k] - comp[k]).max_abs() <= 1e-12 * max(1.0, comp[k].max_abs())
    assert sec["aux"].max_abs() <= 1e-12


@given(seeds, st.booleans())
def test_superderivative_algebra(seed, even):
    phi = Superfield.from_jet(_random_superjet(Sampler(seed), even=even))
    Dp = lambda x: superD("+", x)
    Dm = lambda x: superD("-", x)
    assert (Dp(Dp(phi)).value + 1j * phi.slot((1, 0))).max_abs() <= 1e-12
    assert (Dm(Dm(phi)).value - 1j * phi.slot((0, 1))).max_abs() <= 1e-12
    assert (Dp(Dm(phi)).value + Dm(Dp(phi)).value).max_abs() <= 1e-12


@given(seeds)
def test_assemble_disassemble_roundtrip(seed):
    jet = jet_from_bulk(random_bulk_point(Sampler(seed)), 1.3)
    comps = disassemble(assemble(jet), JET_TABLE)
    for a, b in zip(comps, jet.value):
        assert (a - b).max_abs() <= 1e-14


def test_superjet_grading_is_checked():
    s = Sampler(1)
    jet = jet_from_bulk(random_bulk_point(s), 1.0)
    bad = jet.__class__((jet.value[1],) + tuple(jet.value[1:]), dplus=jet.dplus, dminus=jet.dminus,
                        dplusminus=jet.dplusminus, dplusplus=jet.dplusplus,
                        dminusminus=jet.dminusminus)
    with pytest.raises(GradingError):
        bad.check_grading()


def test_superfield_suite_passes():
    results = superfield_suite(seed=11, samples=20)
    assert all(r.passed for r in results), [r.as_dict() for r in results]
