import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad

from survopt import horizon, oracle, validate
from survopt.errors import ConfigurationError, DegenerateInputError, InfeasibleModelError


@pytest.fixture(scope="module")
def best(horizon_params):
    return horizon.optimize(horizon_params)


def test_moment_kernel_against_quadrature():
    for n in range(4):
        for R, L in ((0.2, 1.0), (3.0, 2.0), (-0.5, 1.5), (1e-9, 0.7)):
            ref = oracle.quadrature(lambda s: s**n * math.exp(-R * s), 0.0, L, 1e-13)
            assert horizon._moment(n, R, L) == pytest.approx(ref, rel=1e-11)


def test_exponential_kernel_closed_form():
    R, T = 0.2, 3.0
    assert oracle.quadrature(lambda t: math.exp(-R * t), 0.0, T) == pytest.approx(-math.expm1(-R * T) / R, rel=1e-9)
    assert horizon._xint(0.0, R, 0.0, T) == pytest.approx(-math.expm1(-R * T) / R, rel=1e-14)


def test_discount_factor_is_geometric_sum():
    R, H, m = 0.2, 20.0, 7
    assert horizon.discount_factor(R, H, m) == pytest.approx(sum(math.exp(-R * j * H / m) for j in range(m)))
    assert horizon.discount_factor(0.0, H, m) == m


def test_lost_fraction_branches_agree():
    # series branch (delta L < 0.5) and exponential-integral branch around the switch
    for R in (0.2, 0.0, -0.3):
        for L in (62.0, 63.0):
            ref = quad(lambda u: 0.008 * u / (1 + 0.008 * u) * math.exp(R * u), 0.0, L, epsabs=0, epsrel=1e-12)[0]
            got = horizon._lost_fraction_integral(R, 0.008, L)
            assert got == pytest.approx(ref, rel=1e-9)


def test_tr_root_is_in_bracket(horizon_params):
    t1 = 1.5
    tr = horizon.solve_tr(horizon_params, t1)
    assert horizon_params.mu2 <= tr <= t1
    assert abs(horizon._tr_mismatch(tr, horizon_params, t1)) < 1e-9


def test_tr_unbracketed_raises(horizon_params):
    with pytest.raises(InfeasibleModelError):
        horizon.solve_tr(horizon_params, 0.5)


def test_components_match_quadrature(horizon_params):
    st = horizon.cycle_state(3, 0.4, horizon_params)
    closed = horizon.cycle_costs(st, horizon_params)
    for name, ref in validate.component_oracles(st, horizon_params).items():
        assert closed[name] == pytest.approx(ref, rel=1e-9), name


def test_ode_residuals_small(horizon_params):
    st = horizon.cycle_state(2, 0.3, horizon_params)
    res = validate.ode_residuals(st, horizon_params)
    for seg, r in res.items():
        assert r < 1e-5, seg


def test_boundary_conditions(horizon_params):
    st = horizon.cycle_state(4, 0.5, horizon_params)
    for name, gap in validate.boundary_gaps(st, horizon_params).items():
        assert gap / horizon_params.W1 < 1e-9, name


def test_stable_w2_equals_typeset_form(horizon_params):
    for tr in (0.7, 1.2, 2.0):
        assert horizon.rw_stock_at_start(horizon_params, tr) == pytest.approx(horizon.printed_w2(horizon_params, tr))


def test_total_cost_decomposition(horizon_params):
    tc, comps = horizon.total_cost(2, 0.3, horizon_params)
    P = horizon_params
    G = horizon.discount_factor(P.R, P.H, 2)
    assert tc == pytest.approx(G * sum(comps.values()) + P.A * math.exp(-P.R * P.H))
    assert set(comps) == set(horizon.COMPONENTS)


def test_zero_rate_limit_is_continuous(horizon_params):
    lo = horizon.total_cost(3, 0.4, replace(horizon_params, R=0.0))[0]
    near = horizon.total_cost(3, 0.4, replace(horizon_params, R=1e-9))[0]
    assert lo == pytest.approx(near, rel=1e-7)


def test_interior_roots_are_minima(horizon_params):
    for m in range(1, 6):
        sol = horizon.solve_k(m, horizon_params)
        assert sol.converged and sol.convex and abs(sol.dtc) < 1e-3 * sol.tc


def test_optimum_at_feasibility_edge(best, horizon_params):
    assert best.m == 12
    assert best.k == pytest.approx(0.6091088, abs=1e-6)
    assert best.t_r == pytest.approx(horizon_params.mu2, abs=1e-9)
    assert not best.converged
    assert math.isinf(horizon.tc_or_inf(best.m, best.k - 1e-6, horizon_params))


def test_optimize_stops_at_first_increase(best):
    tcs = [tc for _, _, tc in best.history]
    assert all(a > b for a, b in zip(tcs[:-2], tcs[1:-1]))
    assert not tcs[-1] < tcs[-2]


def test_optimize_close_to_exhaustive(best, horizon_params):
    m, k, tc = horizon.exhaustive_search(horizon_params, m_max=20)
    assert best.TC <= tc * (1 + 1e-3)


def test_ga_is_deterministic_and_near_optimum(best, horizon_params):
    cfg = horizon.GaConfig(seed=7, generations=40)
    a, b = horizon.ga_optimize(horizon_params, cfg), horizon.ga_optimize(horizon_params, cfg)
    assert a.policy == b.policy and a.best_by_generation == b.best_by_generation
    assert a.policy.TC <= best.TC * 1.01
    assert all(x >= y for x, y in zip(a.best_by_generation, a.best_by_generation[1:]))


def test_ga_config_validation():
    with pytest.raises(ConfigurationError):
        horizon.GaConfig(population_size=1)
    with pytest.raises(ConfigurationError):
        horizon.GaConfig(mode="other")


def test_swap_replay_recomputes(horizon_params):
    rows = (horizon.TableRow(1, 0.4485, 8.9519, 8.8552, 19, 3922, 26496),
            horizon.TableRow(2, 0.4993, 4.8536, 4.6241, 9.5, 1482, 11060))
    out = horizon.swap_replay(horizon_params, rows)
    assert [d.stage for d in out] == ["before-crossover"] * 2 + ["after-crossover"] * 2 + ["after-mutation"]
    assert out[4].row.t_r == rows[1].t1 and out[4].row.t1 == rows[1].t_r
    assert out[0].k_recomputed == pytest.approx(8.8552 / 20)


def test_parameter_validation(horizon_params):
    with pytest.raises(DegenerateInputError):
        replace(horizon_params, s=1.0)
    with pytest.raises(DegenerateInputError):
        replace(horizon_params, beta=0.9)
    with pytest.raises(ConfigurationError):
        horizon.HorizonParams.from_dict({"a": 1})
    with pytest.raises(DegenerateInputError):
        horizon.cycle_times(0, 0.5, horizon_params)


def test_first_order_shortage_close_to_exact(horizon_params):
    st = horizon.cycle_state(12, 0.7, horizon_params)
    ts = np.linspace(st.t1, st.T, 11)
    lin = np.array([horizon.shortage_level(t, horizon_params, st.t1, st.T) for t in ts])
    ex = np.array([horizon.shortage_level_exact(t, horizon_params, st.t1, st.T) for t in ts])
    assert np.max(np.abs(lin - ex)) < 1e-3 * st.BI
