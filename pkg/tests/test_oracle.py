import math

import numpy as np
import pytest

from survopt import oracle, srs
from survopt.errors import DegenerateInputError
from survopt.stats import AttributeSummary, SrsSummary, StratumStats


def test_quadrature_polynomial_and_reversed_bounds():
    assert oracle.quadrature(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, abs=1e-10)
    assert oracle.quadrature(lambda x: x**3, 2.0, 0.0) == pytest.approx(-4.0, abs=1e-10)
    assert oracle.quadrature(math.exp, 1.0, 1.0) == 0.0


def test_quadrature_rejects_non_finite():
    with pytest.raises(DegenerateInputError):
        oracle.quadrature(lambda x: math.log(x) if x > 0 else -math.inf, 0.0, 1.0)
    with pytest.raises(DegenerateInputError):
        oracle.quadrature(math.exp, 0.0, math.inf)


def test_grid_points_inclusive_without_drift():
    g = oracle.grid_points(1.0, 2.0, 0.01)
    assert len(g) == 101 and g[-1] == pytest.approx(2.0, abs=1e-12)


def test_grid_min_one_and_two_axes():
    (x,), v = oracle.grid_min(lambda x: (x - 0.37) ** 2, [(0, 1)], [0.01])
    assert x == pytest.approx(0.37) and v == pytest.approx(0, abs=1e-20)
    (x, y), v = oracle.grid_min(lambda x, y: (x - 1.5) ** 2 + (y - 0.25) ** 2, [(0, 3), (0, 1)], [0.01, 0.01], chunk=500)
    assert (x, y) == pytest.approx((1.5, 0.25))


def test_fd_derivatives():
    assert oracle.fd_derivative(math.sin, 0.3) == pytest.approx(math.cos(0.3), rel=1e-8)
    assert oracle.fd_second(math.exp, 0.0) == pytest.approx(1.0, rel=1e-5)


def test_pair_population_matches_targets():
    t = SrsSummary(N=200, n=30, mean_y=50.0, mean_x=40.0, C_y=0.3, C_x=0.25, rho=0.9)
    pop = oracle.generate_population(t, 3)
    assert pop.N == 200
    assert pop.y.mean() == pytest.approx(50.0, rel=1e-9)
    assert pop.achieved.C_x == pytest.approx(0.25, rel=1e-9)
    assert abs(pop.achieved.rho - 0.9) < oracle.RHO_TOL


def test_attribute_population_is_binary():
    t = AttributeSummary(N=100, n=20, mean_y=10.0, P=0.3, C_y=0.4, C_p=math.sqrt(0.7 / 0.3), rho_pb=0.6)
    pop = oracle.generate_population(t, 5)
    assert set(np.unique(pop.phi)) == {0.0, 1.0}
    assert pop.phi.sum() == 30
    assert pop.aux is pop.phi


def test_triple_population_correlations():
    t = StratumStats(60, 10, 20.0, 15.0, 30.0, 4.0, 3.0, 5.0, rho_yx=0.7, rho_yz=0.5, rho_xz=0.4)
    pop = oracle.generate_population(t, 1)
    assert pop.z is not None and abs(pop.achieved.rho_yx - 0.7) < oracle.RHO_TOL


def test_generator_rejects_extreme_rho():
    t = SrsSummary(N=50, n=5, mean_y=1.0, mean_x=1.0, C_y=0.1, C_x=0.1, rho=0.99)
    with pytest.raises(DegenerateInputError):
        oracle.generate_population(t, 0)


def test_enumeration_of_mean_is_exact_variance():
    y = np.array([3.0, 7.0, 1.0, 9.0, 4.0])
    pop = oracle.SyntheticPopulation(y=y, x=y + 1)
    r = oracle.empirical_mse(pop, oracle.SampleEstimator("mean"), 2, mode="enumeration")
    assert r.replicates == 10 and r.mc_stderr == 0.0
    assert r.mse == pytest.approx(oracle.finite_population_variance(y, 2), rel=1e-12)


def test_monte_carlo_is_seeded():
    t = SrsSummary(N=80, n=10, mean_y=50.0, mean_x=40.0, C_y=0.3, C_x=0.25, rho=0.8)
    pop = oracle.generate_population(t, 2)
    est = oracle.SampleEstimator("ratio")
    a = oracle.empirical_mse(pop, est, 10, 10_000, seed=4)
    b = oracle.empirical_mse(pop, est, 10, 10_000, seed=4)
    assert a == b and a.mode == "monte-carlo"
    first = srs.mse_classical("t1", pop.achieved)
    assert a.mse == pytest.approx(first, rel=0.15)


def test_family_estimator_reduces_to_ratio():
    ybar, xbar = np.array([5.0]), np.array([4.0])
    fam = oracle.SampleEstimator("family", a_coef=1, b_coef=0, alpha=1, g=1)
    assert fam(ybar, xbar, 5.0) == pytest.approx(oracle.SampleEstimator("ratio")(ybar, xbar, 5.0))


def test_mode_guards():
    pop = oracle.SyntheticPopulation(y=np.arange(1.0, 41.0), x=np.arange(1.0, 41.0))
    est = oracle.SampleEstimator("mean")
    with pytest.raises(DegenerateInputError):
        oracle.empirical_mse(pop, est, 20, mode="enumeration")
    with pytest.raises(DegenerateInputError):
        oracle.empirical_mse(pop, est, 5, replicates=100, mode="monte-carlo")
    with pytest.raises(DegenerateInputError):
        oracle.empirical_mse(pop, est, 40)
    with pytest.raises(DegenerateInputError):
        oracle.SampleEstimator("bogus")(np.ones(1), np.ones(1), 1.0)
