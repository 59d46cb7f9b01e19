import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from sshgdefect.checks import fusing_suite
from sshgdefect.defect import DefectParams, pb_table, potentials
from sshgdefect.fusing import BranchError, FusedDefect, TypeIDefect, fuse, g_from_f, mu_nu
from sshgdefect.grassmann import GradingError, SingularError

disk = st.complex_numbers(max_magnitude=1.5)
nonzero = st.complex_numbers(min_magnitude=0.3, max_magnitude=1.5)
taus = st.complex_numbers(max_magnitude=0.8)
T = pb_table(("psm", "pbm"))
F1, F1T, PSP, PBP, PSM, PBM = (T.gen(n) for n in T.names)


def _mu_nu_or_skip(pm, tau):
    try:
        return mu_nu(pm, tau)
    except (BranchError, SingularError):
        assume(False)


@given(disk, taus)
def test_mu_nu_relations(pm, tau):
    mu1, mu2, nu1, nu2 = _mu_nu_or_skip(pm, tau)
    assert abs(mu1**2 + mu2**2 - 2) <= 1e-12
    assert abs(mu1 * nu2 - np.exp(pm / 2)) <= 1e-12
    assert abs(mu2 * nu1 - np.exp(-pm / 2)) <= 1e-12
    assert abs(nu1**2 + nu2**2 - np.cosh(pm) - np.cosh(2 * tau)) <= 1e-11


@given(nonzero, taus, disk, disk, disk, st.floats(0.3, 2.0))
def test_pipeline_matches_fused_potentials(sigma, tau, pp, pm, lam, m):
    _mu_nu_or_skip(pm, tau)
    r = fuse(None, None, sigma, tau, m).compare(pp, pm, lam, F1, F1T, PSP, PBP, PSM, PBM)
    scale = max(1.0, abs(sigma), 1 / abs(sigma)) ** 2
    assert r["total"] <= 1e-10 * scale
    assert r["psi_minus_dependence"] <= 1e-10 * scale
    assert r["psibar_minus_dependence"] <= 1e-10 * scale


@given(nonzero, disk, disk, disk)
def test_free_point_matches_omega_form(sigma, pp, pm, lam):
    tau = 0.5j * np.pi
    _mu_nu_or_skip(pm, tau)
    P = DefectParams.fused(sigma, tau, 1.0)
    args = [T.scalar(v) for v in (pp, pm, lam)] + [F1, F1T, PSP, PBP]
    a, b = potentials(*args, P).as_dict(), potentials(*args, P.to_omega()).as_dict()
    for k in a:
        assert (a[k] - b[k]).max_abs() <= 1e-12 * max(1.0, b[k].max_abs())


def test_g_rotation_is_invertible():
    mu1, mu2, _, _ = mu_nu(0.3 + 0.1j, 0.2j)
    g1, g2 = g_from_f(F1, F1T, 0.3 + 0.1j, 0.2j)
    # (g1, g2) = R (f1, f1t) / 2 with R orthogonal up to mu1^2 + mu2^2 = 2
    f1 = mu1 * g1 + mu2 * g2
    f1t = -mu2 * g1 + mu1 * g2
    assert (f1 - F1).max_abs() <= 1e-12 and (f1t - F1T).max_abs() <= 1e-12


def test_branch_mismatch_raises():
    # Im(phi_-) past pi puts the principal roots of mu1 and mu2 on different sheets
    with pytest.raises(BranchError):
        mu_nu(0.5 + 3.2j, 0.0)
    mu_nu(0.5 + 3.0j, 0.0)


def test_singular_point_raises():
    with pytest.raises(SingularError):
        mu_nu(1j * np.pi, 0.0)


def test_fuse_rejects_mismatched_type_one_parameters():
    z = T.zero()
    fd = FusedDefect(1.2, 0.3, 1.0)
    good = TypeIDefect(1, fd.sigma1, F1, z, z, z, z, z, z)
    bad = TypeIDefect(2, 2.0 * fd.sigma2, F1T, z, z, z, z, z, z)
    fuse(good, None, 1.2, 0.3, 1.0)
    with pytest.raises(ValueError):
        fuse(good, bad, 1.2, 0.3, 1.0)


def test_type_one_validation():
    z = T.zero()
    with pytest.raises(ValueError):
        TypeIDefect(3, 1.0, F1, z, z, z, z, z, z)
    with pytest.raises(ValueError):
        TypeIDefect(1, 1.0, F1, z, z, z, z, z, z, sqrt_sigma=2.0)
    with pytest.raises(GradingError):
        TypeIDefect(1, 1.0, T.scalar(1.0), z, z, z, z, z, z).check_grading()


def test_fusing_suite_passes():
    results = fusing_suite(seed=6, samples=15)
    assert all(r.passed for r in results), [r.as_dict() for r in results]
