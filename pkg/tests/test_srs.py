import pytest
from scipy.optimize import minimize_scalar

from survopt import srs
from survopt.errors import DegenerateInputError
from survopt.stats import SIGN_CONSISTENT, STRICT_PRINT, SrsSummary


def test_t0_is_sample_mean_variance(srs_pops):
    s = srs_pops["I"]
    assert srs.mse_classical("t0", s) == pytest.approx(s.lam * s.mean_y**2 * s.C_y**2, rel=1e-14)


def test_ratio_mse_hand_expansion(srs_pops):
    s = srs_pops["II"]
    expect = s.lam * s.mean_y**2 * (s.C_y**2 + s.C_x**2 - 2 * s.rho * s.C_y * s.C_x)
    assert srs.mse_classical("t1", s) == pytest.approx(expect, rel=1e-14)


@pytest.mark.parametrize("i", range(1, 7))
def test_dual_is_h_squared_times_classical(srs_pops, i):
    s = srs_pops["I"]
    assert srs.mse_dual(f"t{i}*", s) == pytest.approx(s.h**2 * srs.mse_classical(f"t{i}", s), rel=1e-14)


@pytest.mark.parametrize("est", ["eta1*", "eta2*", "eta3*", "eta5*"])
def test_scaling_constant_minimises_scaled_mse(srs_pops, est):
    for s in srs_pops.values():
        k = srs.scaling_constant(est, s)
        best = minimize_scalar(lambda t: srs.scaled_mse(est, t, s), bracket=(0.5, 1.5), tol=1e-12)
        assert k == pytest.approx(best.x, rel=1e-7)


def test_conventions_differ_only_on_eta4_eta6(srs_pops):
    s = srs_pops["I"]
    for est in srs.SCALED:
        strict = srs.scaling_constant(est, s, STRICT_PRINT)
        consistent = srs.scaling_constant(est, s, SIGN_CONSISTENT)
        assert (strict != consistent) == (est in ("eta4*", "eta6*"))


def test_scaled_at_k_one_reduces_to_dual(srs_pops):
    s = srs_pops["I"]
    assert srs.scaled_mse("eta1*", 1.0, s) == pytest.approx(srs.mse_dual("t1*", s), rel=1e-12)


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_tm_solution_is_the_quadratic_minimum(srs_pops, sign):
    s = srs_pops["I"]
    cfg = srs.TmConfig(alpha=sign, beta=sign)
    sol = srs.solve_tm(cfg, s)
    for d1, d2 in ((1e-3, 0), (0, 1e-3), (1e-3, -1e-3)):
        assert srs.tm_mse(sol.m1 + d1, sol.m2 + d2, cfg, s) > sol.mse
    assert sol.mse == pytest.approx(srs.tm_mse(sol.m1, sol.m2, cfg, s))


def test_tm_beats_every_scaled_member(srs_pops):
    for s in srs_pops.values():
        tm = srs.solve_tm(srs.TmConfig(), s).mse
        assert tm <= min(srs.mse_yadav_kadilar(e, s)[1] for e in ("eta1*", "eta3*", "eta5*"))


def test_unknown_estimator_rejected(srs_pops):
    with pytest.raises(ValueError):
        srs.mse_classical("t9", srs_pops["I"])
    with pytest.raises(ValueError):
        srs.scaling_constant("eta9*", srs_pops["I"])


def test_degenerate_tm_constants():
    s = SrsSummary(N=100, n=10, mean_y=5, mean_x=2, C_y=0.3, C_x=0.2, rho=0.5)
    with pytest.raises(DegenerateInputError):
        srs.TmConfig(psi=1.0, delta=-2.0).R1(s)
