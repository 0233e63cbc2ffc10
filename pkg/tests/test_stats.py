import math

import numpy as np
import pytest

from survopt.errors import ConfigurationError, DegenerateInputError
from survopt.stats import (
    AttributeSummary,
    SrsSummary,
    StratifiedPopulation,
    StratumStats,
    check_convention,
    pre,
    relative_error,
    v_moments,
)


def _stratum(**kw):
    base = dict(N_h=50, n_h=10, mean_y=10.0, mean_x=20.0, mean_z=5.0, S_y=2.0, S_x=3.0, S_z=1.0,
                rho_yx=0.8, rho_yz=0.5, rho_xz=0.4)
    base.update(kw)
    return StratumStats(**base)


def test_covariance_derived_from_correlation():
    s = _stratum()
    assert s.S_yx == pytest.approx(0.8 * 2.0 * 3.0)
    assert s.S_xz == pytest.approx(0.4 * 3.0 * 1.0)


def test_conflicting_covariance_and_correlation_rejected():
    with pytest.raises(DegenerateInputError):
        _stratum(S_yx=1.0)


def test_v_moments_single_stratum_matches_srs_formula():
    s = _stratum()
    v = v_moments(StratifiedPopulation((s,)))
    f = 1 / s.n_h - 1 / s.N_h
    assert v.V200 == pytest.approx(f * 4.0 / 100.0)
    assert v.V110 == pytest.approx(f * 0.8 * 6.0 / 200.0)
    assert v.cauchy_schwarz_ok()


def test_population_weights_sum_to_one(schools):
    assert schools.weights.sum() == pytest.approx(1.0)
    assert len(schools.strata) == 6


def test_pre_and_relative_error():
    assert pre(2.0, 1.0) == 200.0
    assert pre(1.0, 0.0) == math.inf
    assert relative_error(1.01, 1.0) == pytest.approx(0.01)
    assert relative_error(0.0, 0.0) == 0.0


def test_srs_summary_derived_quantities():
    s = SrsSummary(N=100, n=20, mean_y=10, mean_x=5, C_y=0.5, C_x=0.4, rho=0.5)
    assert s.lam == pytest.approx(80 / 2000)
    assert s.h == pytest.approx(0.25)
    assert s.C_yx == pytest.approx(0.1)


def test_srs_summary_validation():
    with pytest.raises(DegenerateInputError):
        SrsSummary(N=10, n=10, mean_y=1, mean_x=1, C_y=1, C_x=1, rho=0)
    with pytest.raises(DegenerateInputError):
        SrsSummary(N=10, n=2, mean_y=1, mean_x=1, C_y=1, C_x=1, rho=1.5)


def test_attribute_summary_two_phase_factors():
    a = AttributeSummary(N=100, n=10, mean_y=5, P=0.3, C_y=0.5, C_p=1.2, rho_pb=0.4, n_prime=40)
    assert a.f1 == pytest.approx(a.f2 + a.f3)
    assert a.S_phi == pytest.approx(1.2 * 0.3)
    single = AttributeSummary(N=100, n=10, mean_y=5, P=0.3, C_y=0.5, C_p=1.2, rho_pb=0.4)
    with pytest.raises(ConfigurationError):
        single.f3


def test_attribute_summary_rejects_bad_proportion():
    with pytest.raises(DegenerateInputError):
        AttributeSummary(N=100, n=10, mean_y=5, P=1.0, C_y=0.5, C_p=1.2, rho_pb=0.4)


def test_unknown_convention_rejected():
    with pytest.raises(ConfigurationError):
        check_convention("loose")


def test_v_moments_vector_roundtrip(schools):
    v = v_moments(schools)
    assert np.all(np.isfinite(v.as_array()))
    assert v.V200 > 0 and v.V020 > 0 and v.V002 > 0
