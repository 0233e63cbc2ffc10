"""Property and oracle suites run by ``survopt validate``.

Every check returns a :class:`Check`; a suite is a list of checks. Results
carry no timings so a repeated run with the same seed produces an identical
JSON verdict.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np

from . import eoq, horizon, oracle, srs
from .fuzzy import TrapezoidalFuzzy, graded_mean
from .scenario import build_model, load_bundled
from .stats import CONVENTIONS, SrsSummary

SUITES = ("sampling-mc", "fuzzy", "eoq", "horizon")

# synthetic profile for the ratio-estimator check
MC_PROFILE = SrsSummary(N=200, n=30, mean_y=50.0, mean_x=40.0, C_y=0.3, C_x=0.25, rho=0.9)
MC_REPLICATES = 100_000
FUZZY_TRIALS = 10_000
EOQ_DRAWS = 1_000
GA_SEEDS = tuple(range(1, 11))


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


def _check(suite: str, name: str, value: float, threshold: float, detail: str = "") -> Check:
    value = float(value)
    return Check(suite, name, bool(value <= threshold), value, threshold, detail)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# -------------------------------------------------------------- sampling-mc


def brute_force_mse(y: np.ndarray, x: np.ndarray, n: int, estimator: Callable) -> float:
    """MSE over every sample, looping in plain Python (independent of empirical_mse)."""
    Y, X = float(np.mean(y)), float(np.mean(x))
    errs = []
    for s in itertools.combinations(range(len(y)), n):
        ys = sum(y[i] for i in s) / n
        xs = sum(x[i] for i in s) / n
        errs.append((estimator(ys, xs, X) - Y) ** 2)
    return sum(errs) / len(errs)


def sampling_suite(seed: int) -> list[Check]:
    S = "sampling-mc"
    out = []
    pop = oracle.generate_population(MC_PROFILE, seed)
    out.append(_check(S, "achieved-rho", abs(pop.achieved.rho - MC_PROFILE.rho), 0.02))

    ratio = oracle.SampleEstimator("ratio")
    mc = oracle.empirical_mse(pop, ratio, MC_PROFILE.n, MC_REPLICATES, seed)
    first_order = srs.mse_classical("t1", replace(pop.achieved, n=MC_PROFILE.n))
    out.append(_check(S, "ratio-mse-vs-first-order", _rel(mc.mse, first_order), 0.10,
                      f"empirical {mc.mse:.6g}, first-order {first_order:.6g}"))

    mean = oracle.empirical_mse(pop, oracle.SampleEstimator("mean"), MC_PROFILE.n, MC_REPLICATES, seed)
    exact = oracle.finite_population_variance(pop.y, MC_PROFILE.n)
    out.append(_check(S, "mean-mse-within-3-stderr", abs(mean.mse - exact) / mean.mc_stderr, 3.0,
                      f"empirical {mean.mse:.6g}, exact {exact:.6g}"))

    small = SrsSummary(N=6, n=2, mean_y=10.0, mean_x=8.0, C_y=0.3, C_x=0.25, rho=0.8)
    sp = oracle.generate_population(small, seed)
    enum = oracle.empirical_mse(sp, ratio, 2, mode="enumeration")
    brute = brute_force_mse(list(sp.y), list(sp.x), 2, lambda ys, xs, X: ys * X / xs)
    out.append(_check(S, "enumeration-sample-count", abs(enum.replicates - 15), 0))
    out.append(_check(S, "enumeration-vs-brute-force", _rel(enum.mse, brute), 1e-12))

    perm = np.random.default_rng(seed).permutation(sp.N)
    sp_perm = replace(sp, y=sp.y[perm], x=sp.x[perm])
    enum_perm = oracle.empirical_mse(sp_perm, ratio, 2, mode="enumeration")
    out.append(_check(S, "permutation-invariance", _rel(enum_perm.mse, enum.mse), 1e-12))

    mid = oracle.generate_population(replace(small, N=12, n=3), seed)
    e12 = oracle.empirical_mse(mid, ratio, 3, mode="enumeration")
    m12 = oracle.empirical_mse(mid, ratio, 3, 20_000, seed, mode="monte-carlo")
    out.append(_check(S, "enumeration-vs-monte-carlo", abs(m12.mse - e12.mse) / m12.mc_stderr, 3.0))

    again = oracle.empirical_mse(oracle.generate_population(MC_PROFILE, seed), ratio, MC_PROFILE.n,
                                 MC_REPLICATES, seed)
    out.append(_check(S, "seed-determinism", 0.0 if again == mc else 1.0, 0.0))
    return out


# -------------------------------------------------------------------- fuzzy


def _random_fuzzy(rng: np.random.Generator, lo: float = 0.5, hi: float = 10.0) -> TrapezoidalFuzzy:
    return TrapezoidalFuzzy.from_seq(np.sort(rng.uniform(lo, hi, 4)))


def fuzzy_suite(seed: int, trials: int = FUZZY_TRIALS) -> list[Check]:
    S = "fuzzy"
    rng = np.random.default_rng(seed)
    worst = {"graded-mean-linearity": 0.0, "componentwise-arithmetic": 0.0, "crisp-collapse": 0.0}
    ops = (
        (lambda A, B: A + B, np.add),
        (lambda A, B: A - B, None),
        (lambda A, B: A * B, np.multiply),
        (lambda A, B: A / B, None),
    )
    for _ in range(trials):
        A, B = _random_fuzzy(rng), _random_fuzzy(rng)
        s, t = rng.uniform(-5, 5, 2)
        lhs = graded_mean(A * s + B * t)
        rhs = s * graded_mean(A) + t * graded_mean(B)
        scale = abs(s) * graded_mean(A) + abs(t) * graded_mean(B)
        worst["graded-mean-linearity"] = max(worst["graded-mean-linearity"], abs(lhs - rhs) / scale)

        a, b = np.array(A.as_tuple()), np.array(B.as_tuple())
        expect = (a + b, a - b[::-1], a * b, a / b[::-1])
        for (op, _), e in zip(ops, expect):
            got = np.array(op(A, B).as_tuple())
            worst["componentwise-arithmetic"] = max(worst["componentwise-arithmetic"],
                                                    float(np.max(np.abs(got - e) / np.abs(e))))

        x, y = rng.uniform(0.5, 10.0, 2)
        X, Y = TrapezoidalFuzzy.crisp(x), TrapezoidalFuzzy.crisp(y)
        for (op, _), plain in zip(ops, (x + y, x - y, x * y, x / y)):
            C = op(X, Y)
            dev = max(_rel(v, plain) for v in C.as_tuple())
            worst["crisp-collapse"] = max(worst["crisp-collapse"], dev, _rel(graded_mean(C), plain))
    out = [_check(S, name, v, 1e-12, f"{trials} trials") for name, v in worst.items()]

    # a fuzzy EOQ with degenerate parameters is the crisp EOQ
    dev = 0.0
    for _ in range(200):
        p = _random_eoq(rng)
        Q = rng.uniform(p.W + 1, 4 * p.W + 50)
        K = rng.uniform(0.5, p.W)
        _, gm = eoq.fuzzy_cost(Q, K, p.to_fuzzy())
        dev = max(dev, _rel(gm, eoq.crisp_cost(Q, K, p)))
    out.append(_check(S, "eoq-crisp-collapse", dev, 1e-10, "200 random parameter draws"))
    return out


# ---------------------------------------------------------------------- eoq


def _random_eoq(rng: np.random.Generator) -> eoq.EoqParams:
    H = rng.uniform(0.5, 10)
    return eoq.EoqParams(
        D=rng.uniform(100, 5000), A=rng.uniform(10, 500), F=H + rng.uniform(0.1, 5), H=H,
        W=rng.uniform(10, 300), Ct=rng.uniform(0.05, 2), Ct_star=rng.uniform(0.05, 2),
    )


GRID_STEP = 0.01


def _grid_check(name: str, co: eoq.CostCoefficients, sol: eoq.EoqSolution, W: float) -> Check:
    """Solver optimum against the 0.01 grid over Q in [W, 4W], K in (0, W]."""
    (gq, gk), gmin = oracle.grid_min(co.cost, [(W, 4 * W), (GRID_STEP, W)], [GRID_STEP, GRID_STEP])
    gap = (float(co.cost(sol.Q, sol.K)) - gmin) / abs(gmin)
    return _check("eoq", name, gap, 1e-6,
                  f"solver ({sol.Q:.4f}, {sol.K:.4f}) {sol.cost:.6f}; grid ({gq:.2f}, {gk:.2f}) {gmin:.6f}")


def eoq_suite(seed: int) -> list[Check]:
    S = "eoq"
    sc = build_model(load_bundled("eoq_example.json"))
    out = []
    p = sc.crisp
    out.append(_grid_check("crisp-grid-minimal", eoq.cost_coefficients(p.to_fuzzy()), eoq.solve_crisp(p), p.W))
    for conv in CONVENTIONS:
        co = eoq.cost_coefficients(sc.fuzzy, conv)
        out.append(_grid_check(f"fuzzy-grid-minimal[{conv}]", co, eoq.solve_fuzzy(sc.fuzzy, conv), sc.fuzzy.W_mean))

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(EOQ_DRAWS):
        q = _random_eoq(rng)
        Q = rng.uniform(q.W + 1e-3, 5 * q.W + 100)
        K = rng.uniform(0.1, q.W)
        direct = eoq.crisp_cost_no_release(Q, q) - eoq.crisp_cost(Q, K, q)
        scale = max(abs(eoq.crisp_cost(Q, K, q)), 1.0)
        worst = max(worst, abs(direct - eoq.release_saving(Q, K, q)) / scale)
    out.append(_check(S, "release-saving-identity", worst, 1e-9, f"{EOQ_DRAWS} random draws"))

    worst = 0.0
    for _ in range(EOQ_DRAWS):
        q = _random_eoq(rng)
        K = rng.uniform(0.1, q.W)
        Q = rng.uniform(q.W + 1, 5 * q.W + 100)
        econ = eoq.k_release_economical(q, K)
        worst = max(worst, 0.0 if econ == (eoq.release_saving(Q, K, q) > 0) else 1.0)
    out.append(_check(S, "economical-release-sign", worst, 0.0, f"{EOQ_DRAWS} random draws"))
    return out


# ------------------------------------------------------------------ horizon


def _discounted(f: Callable[[float], float], R: float) -> Callable[[float], float]:
    return lambda t: f(t) * math.exp(-R * t)


def component_oracles(st: horizon.CycleState, P: horizon.HorizonParams) -> dict[str, float]:
    """Cost components rebuilt by adaptive quadrature of the stock trajectories.

    OC is the constant ordering cost; PC re-derives the backlog BI as the
    integral of the first-order retained demand rate a (1 - delta (T - t)),
    the same model the shortage trajectory uses.
    """
    q = oracle.quadrature
    rw = _discounted(lambda t: horizon.inventory_rw(t, P, st.t_r), P.R)
    ow = _discounted(lambda t: horizon.inventory_ow(t, P, st.t_r, st.t1), P.R)
    short = _discounted(lambda t: -horizon.shortage_level(t, P, st.t1, st.T), P.R)
    lost = _discounted(lambda t: P.a * (1 - 1 / (1 + P.delta * (st.T - t))), P.R)
    rw_tail = q(rw, P.mu2, st.t_r, 1e-12)
    ow_tail = q(ow, P.mu1, st.t_r, 1e-12) + q(ow, st.t_r, st.t1, 1e-12)
    return {
        "HCr": P.Chr * (q(rw, 0, P.mu2, 1e-12) + rw_tail),
        "HCo": P.Cho * (q(ow, 0, P.mu1, 1e-12) + ow_tail),
        "DCr": P.C2 * P.beta * rw_tail,
        "DCo": P.C2 * P.alpha * ow_tail,
        "SC": P.C3 * q(short, st.t1, st.T, 1e-12),
        "LC": P.C4 * q(lost, st.t1, st.T, 1e-12),
        "OC": P.A,
        "PC": P.p * st.S + P.p * math.exp(-P.R * st.T) * q(lambda t: P.a * (1 - P.delta * (st.T - t)), st.t1, st.T, 1e-12),
    }


def ode_residuals(st: horizon.CycleState, P: horizon.HorizonParams, points: int = 25) -> dict[str, float]:
    """Largest |dI/dt - rhs| / a on each trajectory segment."""
    d = oracle.fd_derivative
    a = P.a
    segs = {
        "rw-before-mu2": (0.0, P.mu2, lambda t: horizon.inventory_rw(t, P, st.t_r),
                          lambda t, I: -a - P.b * I),
        "rw-after-mu2": (P.mu2, st.t_r, lambda t: horizon.inventory_rw(t, P, st.t_r),
                         lambda t, I: -a - P.theta * I),
        "ow-idle": (0.0, P.mu1, lambda t: horizon.inventory_ow(t, P, st.t_r, st.t1), lambda t, I: 0.0),
        "ow-decay": (P.mu1, st.t_r, lambda t: horizon.inventory_ow(t, P, st.t_r, st.t1),
                     lambda t, I: -P.alpha * I),
        "ow-depletion": (st.t_r, st.t1, lambda t: horizon.inventory_ow(t, P, st.t_r, st.t1),
                         lambda t, I: -a - P.kappa * I),
        "shortage-linearised": (st.t1, st.T, lambda t: horizon.shortage_level(t, P, st.t1, st.T),
                                lambda t, I: -a * (1 - P.delta * (st.T - t))),
        "shortage-exact": (st.t1, st.T, lambda t: horizon.shortage_level_exact(t, P, st.t1, st.T),
                           lambda t, I: -a / (1 + P.delta * (st.T - t))),
    }
    out = {}
    for name, (lo, hi, f, rhs) in segs.items():
        if hi - lo < 1e-9:
            out[name] = 0.0
            continue
        h = min(1e-6, (hi - lo) / 10)
        ts = np.linspace(lo + 2 * h, hi - 2 * h, points)
        out[name] = max(abs(d(f, float(t), h) - rhs(t, f(float(t)))) / a for t in ts)
    return out


def boundary_gaps(st: horizon.CycleState, P: horizon.HorizonParams) -> dict[str, float]:
    """Continuity and boundary conditions of the trajectories, scaled by W1."""
    eps = 1e-13
    rw = lambda t: horizon.inventory_rw(t, P, st.t_r)
    ow = lambda t: horizon.inventory_ow(t, P, st.t_r, st.t1)
    tr_left = P.W1 * math.exp(P.alpha * (P.mu1 - st.t_r))
    u = st.t1 - st.t_r
    tr_right = P.a * u * horizon._phi(P.kappa * u)
    # RW trajectory continuity at mu2: both branches in closed form
    left_mu2 = st.W2 * math.exp(-P.b * P.mu2) - P.a * P.mu2 * horizon._phi(-P.b * P.mu2)
    v = st.t_r - P.mu2
    right_mu2 = P.a * v * horizon._phi(P.theta * v)
    return {
        "rw-start-is-W2": abs(rw(0.0) - st.W2),
        "rw-continuous-at-mu2": abs(left_mu2 - right_mu2),
        "rw-empty-at-t_r": abs(rw(st.t_r)),
        "ow-full-until-mu1": abs(ow(P.mu1) - P.W1),
        "ow-continuous-at-t_r": abs(tr_left - tr_right),
        "ow-empty-at-t1": abs(ow(st.t1 - eps)) if st.t1 > eps else 0.0,
        "shortage-zero-at-t1": abs(horizon.shortage_level(st.t1, P, st.t1, st.T)),
        "backlog-matches-shortage": abs(-horizon.shortage_level(st.T, P, st.t1, st.T) - st.BI),
    }


def horizon_suite(seed: int, ga_seeds=GA_SEEDS) -> list[Check]:
    S = "horizon"
    P = build_model(load_bundled("horizon_example1.json"))
    out = []
    best = horizon.optimize(P)
    states = {"optimum": horizon.cycle_state(best.m, best.k, P)}
    interior = horizon.solve_k(1, P)
    states["m1-root"] = horizon.cycle_state(1, interior.k, P)

    for label, st in states.items():
        closed = horizon.cycle_costs(st, P)
        ref = component_oracles(st, P)
        for c, v in ref.items():
            # relative above unit magnitude, absolute below (DCr vanishes when t_r = mu2)
            err = abs(closed[c] - v) / max(abs(v), 1.0)
            out.append(_check(S, f"quadrature[{label}:{c}]", err, 1e-6,
                              f"closed {closed[c]:.10g}, quadrature {v:.10g}"))
        for seg, r in ode_residuals(st, P).items():
            if seg == "shortage-exact":
                continue
            out.append(_check(S, f"ode-residual[{label}:{seg}]", r, 1e-5))
        exact_dev = max(
            abs(horizon.shortage_level(t, P, st.t1, st.T) - horizon.shortage_level_exact(t, P, st.t1, st.T))
            for t in np.linspace(st.t1, st.T, 50)
        ) / max(st.BI, 1e-300)
        out.append(Check(S, f"info[{label}:linearised-vs-exact-backlog]", True, exact_dev, math.inf,
                         "relative deviation of the first-order shortage from the exact solution"))
        for name, g in boundary_gaps(st, P).items():
            out.append(_check(S, f"boundary[{label}:{name}]", g / P.W1, 1e-9))
        out.append(_check(S, f"printed-W2[{label}]", _rel(horizon.printed_w2(P, st.t_r), st.W2), 1e-9))

    worst_d2, roots = math.inf, 0
    for m in range(1, best.m + 4):
        sol = horizon.solve_k(m, P)
        if sol.converged:
            roots += 1
            worst_d2 = min(worst_d2, sol.d2tc)
    out.append(Check(S, "convex-at-roots", bool(roots > 0 and worst_d2 > 0), worst_d2, 0.0,
                     f"min d2TC/dk2 over {roots} interior roots"))

    em, ek, etc = horizon.exhaustive_search(P)
    out.append(_check(S, "optimize-vs-exhaustive", (best.TC - etc) / etc, 1e-3,
                      f"optimize (m={best.m}, k={best.k:.6f}) {best.TC:.6f}; grid (m={em}, k={ek:.2f}) {etc:.6f}"))

    worst = 0.0
    for s in ga_seeds:
        res = horizon.ga_optimize(P, horizon.GaConfig(seed=s))
        worst = max(worst, _rel(res.policy.TC, best.TC))
    out.append(_check(S, "ga-vs-optimize", worst, 1e-2, f"{len(ga_seeds)} seeds"))
    return out


# ------------------------------------------------------------------- driver

SUITE_RUNNERS: dict[str, Callable[[int], list[Check]]] = {
    "sampling-mc": sampling_suite,
    "fuzzy": fuzzy_suite,
    "eoq": eoq_suite,
    "horizon": horizon_suite,
}


def run_suite(suite: str, seed: int = 0) -> list[Check]:
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        out += SUITE_RUNNERS[name](seed)
    return out


def verdict(suite: str, seed: int, checks: list[Check]) -> dict:
    return {
        "suite": suite,
        "seed": seed,
        "passed": all(c.passed for c in checks),
        "failures": [c.name for c in checks if not c.passed],
        "checks": [asdict(c) for c in checks],
    }


def verdict_json(v: dict) -> str:
    return json.dumps(v, indent=2, sort_keys=True, allow_nan=True) + "\n"


def summary(checks: list[Check]) -> str:
    lines = []
    for c in checks:
        mark = "ok  " if c.passed else "FAIL"
        lines.append(f"{mark} {c.suite:<12} {c.name:<55} {c.value:.3e} <= {c.threshold:.1e}  {c.detail}".rstrip())
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines)
