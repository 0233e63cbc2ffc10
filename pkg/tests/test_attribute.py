import math

import pytest

from survopt import attribute as attr
from survopt.errors import DegenerateInputError, SingularSystemError
from survopt.stats import SIGN_CONSISTENT, STRICT_PRINT


@pytest.mark.parametrize("pop", ["pop1", "pop2"])
def test_weights_cancel_bias_and_hit_optimum(attr_pops, pop):
    a = attr_pops[pop]
    cfg = attr.AttrClassConfig()
    w = attr.solve_weights(cfg, a)
    assert sum(w.as_tuple()) == pytest.approx(1.0, abs=1e-12)
    assert attr.bias_tp(w, cfg, a) == pytest.approx(0.0, abs=1e-12 * a.mean_y)
    assert attr.mse_tp(w, cfg, a) == pytest.approx(attr.min_mse_tp(a), rel=1e-9)


def test_optimum_is_regression_bound(attr_pops):
    a = attr_pops["pop1"]
    assert attr.min_mse_tp(a) == pytest.approx(a.mean_y**2 * a.f1 * a.C_y**2 * (1 - a.rho_pb**2))


def test_t1_ratio_mse_hand_expansion(attr_pops):
    a = attr_pops["pop1"]
    cfg = attr.AttrClassConfig(K1=1, K2=1, K3=0, alpha=1)
    _, mse = attr.bias_mse_t1(cfg, a)
    expect = a.mean_y**2 * a.f1 * (a.C_y**2 + a.C_p**2 - 2 * a.rho_pb * a.C_y * a.C_p)
    assert mse == pytest.approx(expect, rel=1e-12)


def test_t2_with_zero_exponents_is_the_mean(attr_pops):
    a = attr_pops["pop2"]
    bias, mse = attr.bias_mse_t2(attr.AttrClassConfig(beta=0, lam=0), a)
    assert bias == pytest.approx(0.0, abs=1e-15)
    assert mse == pytest.approx(attr.mean_mse(a), rel=1e-14)


def test_k2_must_be_a_sign():
    with pytest.raises(DegenerateInputError):
        attr.AttrClassConfig(K2=0.5)


def test_identical_classes_make_weights_singular(attr_pops):
    a = attr_pops["pop1"]
    # alpha = 0 and beta = lambda = 0 reduce both classes to the sample mean
    cfg = attr.AttrClassConfig(alpha=0.0, beta=0.0, lam=0.0)
    with pytest.raises(SingularSystemError):
        attr.solve_weights(cfg, a)


@pytest.mark.parametrize("pop", ["pop1", "pop2"])
def test_two_phase_weights_reach_two_phase_bound(two_phase_pops, pop):
    a = two_phase_pops[pop]
    cfg = attr.TwoPhaseConfig()
    w = attr.solve_weights_two_phase(cfg, a)
    assert attr.two_phase_mse_tp(w, cfg, a) == pytest.approx(attr.two_phase_min_mse(a), rel=1e-9)


def test_two_phase_conventions_differ_by_cross_term(two_phase_pops):
    a = two_phase_pops["pop1"]
    cfg = attr.TwoPhaseConfig(n_exp=1, gamma=1, K4=1, K5=0)
    strict = attr.two_phase_bias_mse(cfg, a, STRICT_PRINT)[3]
    consistent = attr.two_phase_bias_mse(cfg, a, SIGN_CONSISTENT)[3]
    L1 = cfg.L1(a.P)
    assert strict - consistent == pytest.approx(2 * a.mean_y**2 * L1 * a.K_p * a.f3 * a.C_p**2, rel=1e-10)


def test_appendix_families_have_expected_sizes(attr_pops):
    a = attr_pops["pop1"]
    assert len(attr.appendix_members("A-ratio", a)) == 50
    assert len(attr.appendix_members("B-product", a)) == 50
    assert len(attr.appendix_members("C-exponential", a)) == 25


def test_appendix_member_matches_direct_evaluation(attr_pops):
    a = attr_pops["pop1"]
    row = attr.appendix_members("A-ratio", a)[0]
    assert row.member_id == "t1a1"
    _, mse = attr.bias_mse_t1(attr.AttrClassConfig(K1=1, K2=1, K3=a.C_p, alpha=1), a)
    assert row.mse == pytest.approx(mse)
    assert row.pre == pytest.approx(100 * attr.mean_mse(a) / mse)


def test_appendix_unknown_family(attr_pops):
    with pytest.raises(ValueError):
        attr.appendix_members("D-other", attr_pops["pop1"])


def test_flagged_members_carry_nan(attr_pops):
    rows = attr.appendix_members("B-product", attr_pops["pop1"])
    for r in rows:
        if r.flagged:
            assert math.isnan(r.mse)
