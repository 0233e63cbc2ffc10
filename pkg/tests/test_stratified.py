import numpy as np
import pytest

from survopt import stratified
from survopt.errors import SingularSystemError
from survopt.stats import SIGN_CONSISTENT, STRICT_PRINT, StratifiedPopulation, StratumStats, VMoments, v_moments
from survopt.stratified import StratEstimatorId as E


def test_mean_row_is_exactly_100(schools):
    rows = {e: p for e, _, p in stratified.pre_table(schools)}
    assert rows[E.MEAN] == 100.0


def test_pre_table_covers_every_estimator(schools):
    assert [e for e, _, _ in stratified.pre_table(schools)] == list(E)


def test_ratio_mse_matches_hand_expansion(schools):
    v = v_moments(schools)
    Y = schools.mean_y
    expect = Y**2 * (v.V200 + v.V020 - 2 * v.V110)
    assert stratified.mse_strat(E.T1, v, Y) == pytest.approx(expect, rel=1e-14)


@pytest.mark.parametrize("conv", [STRICT_PRINT, SIGN_CONSISTENT])
def test_tp_exponents_are_stationary(schools, conv):
    v = v_moments(schools)
    sol = stratified.solve_tp(v, schools, conv)
    h = 1e-6 * max(1.0, abs(sol.m1), abs(sol.m2))
    for dm1, dm2 in ((h, 0), (0, h)):
        up = stratified.mse_tp(sol.m1 + dm1, sol.m2 + dm2, v, schools, conv)[0]
        dn = stratified.mse_tp(sol.m1 - dm1, sol.m2 - dm2, v, schools, conv)[0]
        assert abs(up - dn) / (2 * h) < 1e-6 * sol.mse / h
        assert up >= sol.mse and dn >= sol.mse


def test_tp_beats_regression_and_ratio(schools):
    mses = stratified.all_mse(schools)
    assert mses[E.TP] <= min(mses[e] for e in E if e is not E.TP)


def test_tp_rejects_collinear_auxiliaries(schools):
    v = VMoments(V200=1.0, V020=1.0, V002=1.0, V110=0.5, V101=0.5, V011=1.0)
    with pytest.raises(SingularSystemError):
        stratified.solve_tp(v, schools)


def test_t7_matches_single_stratum_regression_variance():
    s = StratumStats(N_h=100, n_h=20, mean_y=10, mean_x=5, mean_z=3, S_y=2, S_x=1, S_z=1,
                     rho_yx=0.6, rho_yz=0.0, rho_xz=0.0)
    pop = StratifiedPopulation((s,))
    f = 1 / 20 - 1 / 100
    assert stratified.mse_t7(pop) == pytest.approx(f * 4 * (1 - 0.36))


def test_efficiency_gaps_finite(schools):
    v = v_moments(schools)
    sol = stratified.solve_tp(v, schools)
    gaps = stratified.efficiency_gaps(v, sol, schools.mean_y)
    assert all(np.isfinite(g) for g in gaps.values())
