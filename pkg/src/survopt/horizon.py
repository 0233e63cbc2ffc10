"""Finite-horizon two-warehouse model for deteriorating items.

The horizon H is split into m equal cycles of length T = H/m. In each cycle
stock is held for a fraction k of the cycle and shortages, partially
backlogged, fill the rest. The rented warehouse (RW) is emptied first, at
time t_r, and the own warehouse (OW) at t1 = kT. Demand is stock dependent,
a + b q(t), while stock is on hand. Items in RW (OW) start deteriorating at
rate beta (alpha) after their lifetime mu2 (mu1). Every cost is present
valued at net discount rate R.

Trajectories and cost integrals are written with ``expm1(x)/x`` kernels so
that the limits b -> 0 and R -> 0 are evaluated without cancellation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import expi

from .errors import ConfigurationError, DegenerateInputError, InfeasibleModelError

COMPONENTS = ("OC", "HCr", "HCo", "DCr", "DCo", "SC", "LC", "PC")
K_SCAN = np.round(np.arange(1, 100) / 100, 2)
M_CAP = 500
FD_STEP = 1e-6
FD2_STEP = 1e-4


@dataclass(frozen=True)
class HorizonParams:
    """Model constants; see the module docstring for the roles of the symbols.

    ``s`` (selling price) enters no cost and is carried for completeness.
    """

    a: float
    b: float
    W1: float
    A: float
    Chr: float
    Cho: float
    C2: float
    C3: float
    C4: float
    p: float
    s: float
    alpha: float
    beta: float
    delta: float
    mu1: float
    mu2: float
    R: float
    H: float

    def __post_init__(self) -> None:
        if not self.a > 0 or self.b < 0 or self.W1 < 0:
            raise DegenerateInputError("need a > 0, b >= 0, W1 >= 0")
        if not self.H > 0:
            raise DegenerateInputError("H must be positive")
        if not self.s > self.p:
            raise DegenerateInputError("selling price s must exceed purchase cost p")
        if not (0 <= self.beta < self.alpha < 1):
            raise DegenerateInputError("need 0 <= beta < alpha < 1")
        if not 0 <= self.mu1 <= self.mu2:
            raise DegenerateInputError("need 0 <= mu1 <= mu2")
        if not 0 <= self.delta <= 1:
            raise DegenerateInputError("need 0 <= delta <= 1")
        if not self.Chr > self.Cho:
            raise DegenerateInputError("RW holding cost Chr must exceed OW holding cost Cho")
        if not self.beta + self.b > 0:
            raise DegenerateInputError("need beta + b > 0")

    @property
    def theta(self) -> float:
        """Total RW depletion rate constant beta + b."""
        return self.beta + self.b

    @property
    def kappa(self) -> float:
        """Total OW depletion rate constant alpha + b."""
        return self.alpha + self.b

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "HorizonParams":
        names = set(cls.__dataclass_fields__)
        unknown = set(d) - names
        if unknown:
            raise ConfigurationError(f"unknown field(s) for HorizonParams: {sorted(unknown)}")
        missing = names - set(d)
        if missing:
            raise ConfigurationError(f"missing field(s) for HorizonParams: {sorted(missing)}")
        return cls(**{k: float(v) for k, v in d.items()})


# ------------------------------------------------------------------ kernels


def _phi(x: float) -> float:
    """expm1(x) / x with the removable singularity filled."""
    return 1.0 if x == 0 else math.expm1(x) / x


def _xint(shift: float, c: float, lo: float, hi: float) -> float:
    """Integral of exp(shift - c t) over [lo, hi]."""
    L = hi - lo
    return math.exp(shift - c * lo) * L * _phi(-c * L)


def _moment(n: int, R: float, L: float) -> float:
    """Integral of s^n exp(-R s) over [0, L].

    A power series is used when R L < 0.5, which covers every growing
    exponential; otherwise the upward recursion, stable for small n.
    """
    x = R * L
    if x < 0.5:
        total, k, term = 0.0, 0, 1.0  # term = (-x)^k / k!
        while True:
            add = term / (n + k + 1)
            total += add
            k += 1
            term *= -x / k
            if k > 5 and abs(add) <= 1e-17 * abs(total):
                break
        return L ** (n + 1) * total
    e = math.exp(-x)
    M = (1 - e) / R
    for j in range(1, n + 1):
        M = (j * M - L**j * e) / R
    return M


def discount_factor(R: float, H: float, m: int) -> float:
    """G = sum over j < m of exp(-R j H/m) = (1 - e^{-RH}) / (1 - e^{-RH/m})."""
    if R == 0:
        return float(m)
    return math.expm1(-R * H) / math.expm1(-R * H / m)


# -------------------------------------------------------------- trajectories


def cycle_times(m: int, k: float, params: HorizonParams) -> tuple[float, float]:
    """(T, t1) for m cycles and in-stock fraction k."""
    if m < 1 or int(m) != m:
        raise DegenerateInputError("m must be a positive integer")
    if not 0 < k < 1:
        raise DegenerateInputError("k must lie in (0, 1)")
    T = params.H / m
    return T, k * T


def _tr_mismatch(tr: float, params: HorizonParams, t1: float) -> float:
    """OW level from the demand branch minus the deterioration branch at tr."""
    P = params
    u = t1 - tr
    demand_branch = P.a * u * _phi(P.kappa * u)
    return demand_branch - P.W1 * math.exp(P.alpha * (P.mu1 - tr))


def solve_tr(params: HorizonParams, t1: float) -> float:
    """Time at which RW empties, found on [mu2, t1] by bracketed root-finding."""
    P = params
    if not t1 > P.mu1:
        raise InfeasibleModelError("t_r root not bracketed: t1 must exceed mu1")
    if P.W1 == 0:
        return t1
    lo, hi = P.mu2, t1
    if lo > hi:
        raise InfeasibleModelError("t_r root not bracketed: t1 < mu2")
    f_lo, f_hi = _tr_mismatch(lo, P, t1), _tr_mismatch(hi, P, t1)
    if f_lo == 0:
        return lo
    if f_lo < 0 or f_hi > 0:
        raise InfeasibleModelError("t_r root not bracketed on [mu2, t1]")
    return brentq(_tr_mismatch, lo, hi, args=(P, t1), xtol=1e-12, rtol=4 * np.finfo(float).eps)


def printed_tr_roots(params: HorizonParams, t1: float) -> tuple[float, float]:
    """The two roots of the quadratic approximation to the t_r condition.

    Kept as a diagnostic next to :func:`solve_tr`; either root may fall
    outside ``[mu2, t1]``.
    """
    P = params
    kap = P.kappa
    B = P.W1 * P.alpha * math.exp(P.alpha * P.mu1) + P.a * math.exp(kap * t1)
    C = (4 * P.a * P.alpha * P.b / kap) * (
        P.W1 * math.exp(P.alpha * P.mu1) - P.a / kap * math.exp(kap * t1) + P.a / kap
    )
    den = 2 * (-P.a * P.alpha * P.b / kap)
    disc = B * B + C
    if disc < 0 or den == 0:
        return (math.nan, math.nan)
    r = math.sqrt(disc)
    return ((B + r) / den, (B - r) / den)


def rw_stock_at_start(params: HorizonParams, t_r: float) -> float:
    """W2, the initial RW stock that empties exactly at t_r."""
    P = params
    q_mu2 = P.a * (t_r - P.mu2) * _phi(P.theta * (t_r - P.mu2))
    return P.a * P.mu2 * _phi(P.b * P.mu2) + q_mu2 * math.exp(P.b * P.mu2)


def printed_w2(params: HorizonParams, t_r: float) -> float:
    """W2 in its typeset form; requires b > 0 and beta > 0."""
    P = params
    th = P.theta
    inner = math.exp(P.b * P.mu2) - 1 - (P.b / P.beta) * (
        1 - math.exp(th * (t_r - P.mu2) + P.b * P.mu2)
    )
    return P.a * P.beta / (P.b * th) * inner


def inventory_rw(t: float, params: HorizonParams, t_r: float) -> float:
    """RW stock level on [0, t_r]."""
    P = params
    if not -1e-12 <= t <= t_r + 1e-12:
        raise DegenerateInputError(f"t={t} outside [0, t_r]")
    if t >= P.mu2:
        u = t_r - t
        return P.a * u * _phi(P.theta * u)
    W2 = rw_stock_at_start(P, t_r)
    return W2 * math.exp(-P.b * t) - P.a * t * _phi(-P.b * t)


def inventory_ow(t: float, params: HorizonParams, t_r: float, t1: float) -> float:
    """OW stock level on [0, t1]."""
    P = params
    if not -1e-12 <= t <= t1 + 1e-12:
        raise DegenerateInputError(f"t={t} outside [0, t1]")
    if t <= P.mu1:
        return P.W1
    if t <= t_r:
        return P.W1 * math.exp(P.alpha * (P.mu1 - t))
    u = t1 - t
    return P.a * u * _phi(P.kappa * u)


def shortage_level(t: float, params: HorizonParams, t1: float, T: float) -> float:
    """Signed inventory during the stock-out [t1, T]; negative means backlog.

    This is the first-order solution in delta of the backlog equation: the
    backlogging rate ``1/(1 + delta (T - t))`` is replaced by
    ``1 - delta (T - t)``.
    """
    P = params
    return P.a * (t1 - t) * (1 - P.delta * T + P.delta * (t1 + t) / 2)


def shortage_level_exact(t: float, params: HorizonParams, t1: float, T: float) -> float:
    """Signed inventory on [t1, T] solving the backlog equation without truncation."""
    P = params
    if P.delta == 0:
        return P.a * (t1 - t)
    return -(P.a / P.delta) * (math.log1p(P.delta * (T - t1)) - math.log1p(P.delta * (T - t)))


def backlog(params: HorizonParams, m: int, k: float) -> float:
    """BI, the backlog accumulated by the end of a cycle."""
    P = params
    return P.a * P.H * (1 - k) / (2 * m * m) * (2 * m - P.delta * P.H * (1 - k))


# --------------------------------------------------------------------- costs


@dataclass(frozen=True)
class CycleState:
    """Derived quantities of one cycle."""

    m: int
    k: float
    T: float
    t1: float
    t_r: float
    W2: float
    S: float
    BI: float
    Q: float


def cycle_state(m: int, k: float, params: HorizonParams) -> CycleState:
    T, t1 = cycle_times(m, k, params)
    t_r = solve_tr(params, t1)
    W2 = rw_stock_at_start(params, t_r)
    if W2 < 0:
        raise InfeasibleModelError("negative RW stock W2")
    S = params.W1 + W2
    BI = backlog(params, m, k)
    return CycleState(int(m), float(k), T, t1, t_r, W2, S, BI, S + BI)


def order_quantities(params: HorizonParams, m: int, k: float) -> tuple[float, float, float, float]:
    """(W2, S, BI, Q) for the policy (m, k); Q = S + BI."""
    st = cycle_state(m, k, params)
    return st.W2, st.S, st.BI, st.Q


def _rw_integrals(P: HorizonParams, t_r: float, W2: float) -> tuple[float, float]:
    """Discounted RW stock integrals over [0, mu2] and [mu2, t_r]."""
    R, b, mu2, th = P.R, P.b, P.mu2, P.theta
    if abs(b) < 1e-6:
        # (1 - e^{-bt}) / b = t - b t^2 / 2 + O(b^2)
        demand = P.a * (_moment(1, R, mu2) - b * _moment(2, R, mu2) / 2)
    else:
        demand = (P.a / b) * (_xint(0, R, 0, mu2) - _xint(0, R + b, 0, mu2))
    I0 = W2 * _xint(0, R + b, 0, mu2) - demand
    I1 = (P.a / th) * (_xint(th * t_r, th + R, mu2, t_r) - _xint(0, R, mu2, t_r))
    return I0, I1


def _ow_integrals(P: HorizonParams, t_r: float, t1: float) -> tuple[float, float, float]:
    """Discounted OW stock integrals over [0, mu1], [mu1, t_r] and [t_r, t1]."""
    R, al, kap = P.R, P.alpha, P.kappa
    J1 = P.W1 * _xint(0, R, 0, P.mu1)
    J2 = P.W1 * _xint(al * P.mu1, al + R, P.mu1, t_r)
    J3 = (P.a / kap) * (_xint(kap * t1, kap + R, t_r, t1) - _xint(0, R, t_r, t1))
    return J1, J2, J3


def _lost_fraction_integral(R: float, delta: float, L: float) -> float:
    """Integral of delta u / (1 + delta u) * exp(R u) over [0, L]."""
    if delta == 0 or L == 0:
        return 0.0
    if delta * L < 0.5:
        total, n, sign = 0.0, 1, 1.0
        while True:
            term = sign * delta**n * _moment(n, -R, L)
            total += term
            if abs(term) <= 1e-17 * abs(total) or n > 200:
                break
            n += 1
            sign = -sign
        return total
    if R == 0:
        return L - math.log1p(delta * L) / delta
    z = R / delta
    plain = L * _phi(R * L)
    return plain - math.exp(-z) / delta * (expi(z * (1 + delta * L)) - expi(z))


def cycle_costs(st: CycleState, params: HorizonParams) -> dict[str, float]:
    """Present value of each first-cycle cost component."""
    P = params
    I0, I1 = _rw_integrals(P, st.t_r, st.W2)
    J1, J2, J3 = _ow_integrals(P, st.t_r, st.t1)
    L = st.T - st.t1
    c0 = 1 - P.delta * L
    shortage = P.a * math.exp(-P.R * st.t1) * (c0 * _moment(1, P.R, L) + P.delta * _moment(2, P.R, L) / 2)
    lost = P.a * math.exp(-P.R * st.T) * _lost_fraction_integral(P.R, P.delta, L)
    return {
        "OC": P.A,
        "HCr": P.Chr * (I0 + I1),
        "HCo": P.Cho * (J1 + J2 + J3),
        "DCr": P.C2 * P.beta * I1,
        "DCo": P.C2 * P.alpha * (J2 + J3),
        "SC": P.C3 * shortage,
        "LC": P.C4 * lost,
        "PC": P.p * st.S + P.p * math.exp(-P.R * st.T) * st.BI,
    }


def total_cost(m: int, k: float, params: HorizonParams) -> tuple[float, dict[str, float]]:
    """Present-valued cost over the horizon and the first-cycle components.

    ``TC = G * sum(components) + A exp(-R H)``, the last term paying for the
    final order that clears the outstanding backlog.
    """
    st = cycle_state(m, k, params)
    comps = cycle_costs(st, params)
    G = discount_factor(params.R, params.H, m)
    tc = G * sum(comps.values()) + params.A * math.exp(-params.R * params.H)
    return tc, comps


def tc_or_inf(m: int, k: float, params: HorizonParams) -> float:
    """Total cost, or +inf when (m, k) is outside the feasible region."""
    if not 0 < k < 1:
        return math.inf
    try:
        return total_cost(m, k, params)[0]
    except InfeasibleModelError:
        return math.inf


def dtc_dk(m: int, k: float, params: HorizonParams, h: float = FD_STEP) -> float:
    """Central-difference derivative of TC in k."""
    return (tc_or_inf(m, k + h, params) - tc_or_inf(m, k - h, params)) / (2 * h)


def d2tc_dk2(m: int, k: float, params: HorizonParams, h: float = FD2_STEP) -> float:
    return (
        tc_or_inf(m, k + h, params) - 2 * tc_or_inf(m, k, params) + tc_or_inf(m, k - h, params)
    ) / (h * h)


def printed_dtc_dk(m: int, k: float, params: HorizonParams) -> float:
    """The typeset closed-form derivative in k, kept for comparison only."""
    P = params
    a, H, R, d = P.a, P.H, P.R, P.delta
    kap = P.kappa
    ek = math.exp(-R * H * k / m)
    e1 = math.exp(-R * H / m)
    return (
        P.C2 * P.alpha * (a * H * math.exp(k * H / m * kap) / (m * (kap + R)) - a * H * ek / (m * (kap + R)))
        + P.C3 * (a * H / (R * m) * e1)
        + H * H * d / (m * m) * ek * (k - 1)
        + H * d / (m * R) * ek
        + H / m * ek
        - P.C4 * d * a / R**2 * (R * R * H * H / (m * m) * ek * (1 - k) - R * H / m * ek)
        + P.p * ((1 - k) * a * H / m * e1 * (1 - H * d / m * (1 + k)))
    )


def printed_d2tc_dk2(m: int, k: float, params: HorizonParams) -> float:
    """The typeset closed-form second derivative in k, kept for comparison only."""
    P = params
    a, H, R, d = P.a, P.H, P.R, P.delta
    kap = P.kappa
    ek = math.exp(-R * H * k / m)
    e1 = math.exp(-R * H / m)
    return (
        P.C2 * P.alpha * (a * H * H / (m * m) * (R * ek / kap + kap * math.exp(k * H / m * kap)))
        + H**3 * d * R / m**3 * ek * (1 - k)
        - P.C4 * d * a / R**2 * (R**3 * H**3 / m**3 * ek * (k - 1))
        + P.p * (a * d * H * H / (2 * m * m) * (e1 - 1) + a * H / m * e1 * (d * k * H / m - 1))
    )


# ----------------------------------------------------------------- optimiser


@dataclass(frozen=True)
class KSolution:
    k: float
    tc: float
    dtc: float
    d2tc: float
    convex: bool
    converged: bool


def solve_k(m: int, params: HorizonParams) -> KSolution:
    """In-stock fraction k minimising TC for fixed m.

    The derivative is scanned at k = 0.01, ..., 0.99; the first sign change
    from negative to positive is refined by Brent's method. Without one,
    the best scan point is returned with ``converged=False``.
    """
    tcs = np.array([tc_or_inf(m, float(k), params) for k in K_SCAN])
    if not np.isfinite(tcs).any():
        raise InfeasibleModelError(f"no feasible k for m={m}")
    ders = np.array([dtc_dk(m, float(k), params) for k in K_SCAN])
    best = None
    for i in range(len(K_SCAN) - 1):
        d0, d1 = ders[i], ders[i + 1]
        if np.isfinite(d0) and np.isfinite(d1) and d0 < 0 <= d1:
            k = brentq(lambda x: dtc_dk(m, x, params), K_SCAN[i], K_SCAN[i + 1], xtol=1e-12)
            tc = tc_or_inf(m, k, params)
            if best is None or tc < best[1]:
                best = (k, tc)
    if best is not None and best[1] <= np.nanmin(tcs):
        k, tc = best
        d2 = d2tc_dk2(m, k, params)
        return KSolution(float(k), float(tc), float(dtc_dk(m, k, params)), float(d2), bool(d2 > 0), True)
    i = int(np.nanargmin(tcs))
    k, tc = float(K_SCAN[i]), float(tcs[i])
    if i > 0 and not np.isfinite(tcs[i - 1]):
        # the minimum sits on the feasibility edge; locate the edge itself
        k_edge = _feasibility_edge(m, float(K_SCAN[i - 1]), k, params)
        tc_edge = tc_or_inf(m, k_edge, params)
        if tc_edge < tc:
            k, tc = k_edge, tc_edge
    d2 = d2tc_dk2(m, k, params)
    return KSolution(k, tc, float(dtc_dk(m, k, params)), float(d2), bool(d2 > 0), False)


def _feasibility_edge(m: int, k_bad: float, k_good: float, params: HorizonParams) -> float:
    """Smallest feasible k in (k_bad, k_good], by bisection to 1e-12."""
    while k_good - k_bad > 1e-12:
        mid = 0.5 * (k_bad + k_good)
        if math.isfinite(tc_or_inf(m, mid, params)):
            k_good = mid
        else:
            k_bad = mid
    return k_good


@dataclass(frozen=True)
class HorizonPolicy:
    m: int
    k: float
    T: float
    t1: float
    t_r: float
    W2: float
    S: float
    BI: float
    Q: float
    TC: float
    components: dict[str, float] = field(default_factory=dict)
    converged: bool = True
    history: tuple[tuple[int, float, float], ...] = ()


def policy_at(m: int, k: float, params: HorizonParams, **extra: Any) -> HorizonPolicy:
    st = cycle_state(m, k, params)
    tc, comps = total_cost(m, k, params)
    return HorizonPolicy(
        st.m, st.k, st.T, st.t1, st.t_r, st.W2, st.S, st.BI, st.Q, tc, comps, **extra
    )


def optimize(params: HorizonParams, m_cap: int = M_CAP) -> HorizonPolicy:
    """Increase m from 1 until TC first rises; return the previous (m, k).

    ``history`` holds the evaluated (m, k, TC) sequence, including the
    first increase.
    """
    history: list[tuple[int, float, float]] = []
    try:
        first = solve_k(1, params)
    except InfeasibleModelError as exc:
        raise InfeasibleModelError(f"infeasible at m=1: {exc}") from None
    history.append((1, first.k, first.tc))
    best_m, best = 1, first
    converged = True
    for m in range(2, m_cap + 1):
        try:
            sol = solve_k(m, params)
            tc = sol.tc
        except InfeasibleModelError:
            sol, tc = None, math.inf
        history.append((m, sol.k if sol else math.nan, tc))
        if not tc < best.tc:
            break
        best_m, best = m, sol
    else:
        converged = False
    return policy_at(
        best_m, best.k, params, converged=converged and best.converged, history=tuple(history)
    )


def exhaustive_search(
    params: HorizonParams, m_max: int = 30, k_grid: Sequence[float] | None = None
) -> tuple[int, float, float]:
    """Brute-force (m, k, TC) minimum over m = 1..m_max and a k grid."""
    ks = K_SCAN if k_grid is None else np.asarray(k_grid, dtype=float)
    best = (0, math.nan, math.inf)
    for m in range(1, m_max + 1):
        for k in ks:
            tc = tc_or_inf(m, float(k), params)
            if tc < best[2]:
                best = (m, float(k), tc)
    if not math.isfinite(best[2]):
        raise InfeasibleModelError("no feasible grid point")
    return best


# ----------------------------------------------------------------------- GA

GA_MODES = ("standard", "swap-replay")


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 30
    generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    seed: int = 0
    mode: str = "standard"
    m_max: int = 30
    tournament_size: int = 2
    blend: float = 0.5
    k_sigma: float = 0.1

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ConfigurationError("population_size must be >= 2")
        if self.generations < 0:
            raise ConfigurationError("generations must be >= 0")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigurationError(f"{name} must lie in [0, 1]")
        if self.mode not in GA_MODES:
            raise ConfigurationError(f"mode must be one of {GA_MODES}")
        if self.m_max < 1:
            raise ConfigurationError("m_max must be >= 1")


@dataclass(frozen=True)
class GaResult:
    policy: HorizonPolicy
    initial_best: float
    best_by_generation: tuple[float, ...]


K_LO, K_HI = 0.001, 0.999


def ga_optimize(params: HorizonParams, cfg: GaConfig = GaConfig()) -> GaResult:
    """Real-coded GA over (m, k), minimising TC.

    Tournament selection, blend crossover on k with a swap of m, Gaussian
    mutation on k and a +-1 step on m, and one elite carried over.
    Deterministic for a given seed.
    """
    if cfg.mode != "standard":
        raise ConfigurationError("ga_optimize runs the standard mode; use swap_replay for the row-swap replay")
    rng = np.random.default_rng(cfg.seed)
    n = cfg.population_size
    ms = rng.integers(1, cfg.m_max + 1, size=n)
    ks = rng.uniform(0.01, 0.99, size=n)
    cost = np.array([tc_or_inf(int(m), float(k), params) for m, k in zip(ms, ks)])
    initial_best = float(cost.min())
    trace = [initial_best]

    def pick() -> int:
        idx = rng.integers(0, n, size=cfg.tournament_size)
        return int(idx[np.argmin(cost[idx])])

    for _ in range(cfg.generations):
        elite = int(np.argmin(cost))
        new_m, new_k = [int(ms[elite])], [float(ks[elite])]
        while len(new_m) < n:
            i, j = pick(), pick()
            m1, m2, k1, k2 = int(ms[i]), int(ms[j]), float(ks[i]), float(ks[j])
            if rng.random() < cfg.crossover_rate:
                lo, hi = min(k1, k2), max(k1, k2)
                span = hi - lo
                k1, k2 = rng.uniform(lo - cfg.blend * span, hi + cfg.blend * span, size=2)
                if rng.random() < 0.5:
                    m1, m2 = m2, m1
            for m_c, k_c in ((m1, k1), (m2, k2)):
                if rng.random() < cfg.mutation_rate:
                    k_c += rng.normal(0.0, cfg.k_sigma)
                if rng.random() < cfg.mutation_rate:
                    m_c += int(rng.choice((-1, 1)))
                new_m.append(int(min(max(m_c, 1), cfg.m_max)))
                new_k.append(float(min(max(k_c, K_LO), K_HI)))
        ms, ks = np.array(new_m[:n]), np.array(new_k[:n])
        cost = np.array([tc_or_inf(int(m), float(k), params) for m, k in zip(ms, ks)])
        trace.append(float(cost.min()))
    best = int(np.argmin(cost))
    if not math.isfinite(cost[best]):
        raise InfeasibleModelError("GA found no feasible policy")
    policy = policy_at(int(ms[best]), float(ks[best]), params)
    return GaResult(policy, initial_best, tuple(trace))


@dataclass(frozen=True)
class TableRow:
    """One (m, k, t_r, t1, T, Q, TC) row as reported elsewhere."""

    m: int
    k: float
    t_r: float
    t1: float
    T: float
    Q: float
    TC: float


@dataclass(frozen=True)
class DemoRow:
    stage: str
    row: TableRow
    k_recomputed: float
    tc_recomputed: float


def _recompute(stage: str, row: TableRow, params: HorizonParams) -> DemoRow:
    # the manipulated t1 fixes the in-stock fraction of a cycle of length H/m
    k = row.t1 / (params.H / row.m)
    return DemoRow(stage, row, k, tc_or_inf(row.m, k, params))


def swap_replay(params: HorizonParams, rows: Sequence[TableRow]) -> list[DemoRow]:
    """Replay a two-row crossover (swap of t_r, t1 between rows) followed by a
    mutation (swap of t_r and t1 within the first row), recomputing TC for
    every manipulated row from its (m, t1)."""
    if len(rows) != 2:
        raise ConfigurationError("swap_replay needs exactly two rows")
    r1, r2 = rows
    out = [_recompute("before-crossover", r, params) for r in rows]
    c1 = replace(r1, t_r=r2.t_r, t1=r2.t1)
    c2 = replace(r2, t_r=r1.t_r, t1=r1.t1)
    out += [_recompute("after-crossover", r, params) for r in (c1, c2)]
    mut = replace(c1, t_r=c1.t1, t1=c1.t_r)
    out.append(_recompute("after-mutation", mut, params))
    return out


def policy_as_row(pol: HorizonPolicy) -> dict[str, float]:
    return {"m": pol.m, "k": pol.k, "t_r": pol.t_r, "t1": pol.t1, "T": pol.T, "Q": pol.Q, "TC": pol.TC}


def params_as_dict(params: HorizonParams) -> dict[str, float]:
    return asdict(params)
