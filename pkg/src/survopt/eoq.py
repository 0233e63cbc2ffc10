"""Two-warehouse EOQ with bulk K-release transfers, crisp and fuzzy.

Stock above the own-warehouse capacity W is kept in a rented warehouse and
moved to the own warehouse in shipments of K units. Costs are averages per
unit time. Fuzzy parameters are trapezoidal quadruples combined
componentwise and defuzzified by the graded mean.

Every cost in this module, crisp or fuzzy, can be written as

    G(Q, K) = P1/Q + P2 Q - P3 + P4 K - P5 K/Q + P6/K - P7/(Q K)

with coefficients that depend only on the parameters. The solvers alternate
the two first-order conditions of that form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, InfeasibleModelError
from .fuzzy import TrapezoidalFuzzy, graded_mean
from .stats import STRICT_PRINT, check_convention

# graded-mean weights of the four quadruple components
GM_WEIGHTS = np.array([1.0, 2.0, 2.0, 1.0]) / 6.0

MAX_ITER = 200


@dataclass(frozen=True)
class EoqParams:
    """Crisp parameters: demand D, ordering cost A, holding costs F (rented) and
    H (own), own capacity W, per-shipment transport cost Ct and optional
    per-unit transport cost Ct_star used when no bulk release is made."""

    D: float
    A: float
    F: float
    H: float
    W: float
    Ct: float
    Ct_star: float | None = None

    def __post_init__(self) -> None:
        for name in ("D", "A", "F", "H", "Ct"):
            if not getattr(self, name) > 0:
                raise DegenerateInputError(f"{name} must be positive")
        if self.W < 0:
            raise DegenerateInputError("W must be non-negative")
        if self.Ct_star is not None and self.Ct_star < 0:
            raise DegenerateInputError("Ct_star must be non-negative")

    def to_fuzzy(self) -> "FuzzyEoqParams":
        """The same parameters as degenerate fuzzy numbers."""
        crisp = TrapezoidalFuzzy.crisp
        return FuzzyEoqParams(
            crisp(self.D), crisp(self.F), crisp(self.H), crisp(self.A), crisp(self.W),
            self.Ct, self.Ct_star,
        )

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "EoqParams":
        keys = {"D", "A", "F", "H", "W", "Ct", "Ct_star"}
        unknown = set(d) - keys
        if unknown:
            raise ConfigurationError(f"unknown field(s) for EoqParams: {sorted(unknown)}")
        return cls(**{k: (None if d[k] is None else float(d[k])) for k in d})


@dataclass(frozen=True)
class FuzzyEoqParams:
    """Fuzzy D, F, H, A, W with crisp transport costs."""

    D: TrapezoidalFuzzy
    F: TrapezoidalFuzzy
    H: TrapezoidalFuzzy
    A: TrapezoidalFuzzy
    W: TrapezoidalFuzzy
    Ct: float
    Ct_star: float | None = None

    def __post_init__(self) -> None:
        for name in ("D", "F", "H", "A"):
            if not graded_mean(getattr(self, name)) > 0:
                raise DegenerateInputError(f"graded mean of {name} must be positive")
        if graded_mean(self.W) < 0:
            raise DegenerateInputError("graded mean of W must be non-negative")
        if not self.Ct > 0:
            raise DegenerateInputError("Ct must be positive")

    @property
    def W_mean(self) -> float:
        return graded_mean(self.W)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "FuzzyEoqParams":
        keys = {"D", "F", "H", "A", "W", "Ct", "Ct_star"}
        unknown = set(d) - keys
        if unknown:
            raise ConfigurationError(f"unknown field(s) for FuzzyEoqParams: {sorted(unknown)}")
        quads = {k: _quad(d[k], k) for k in ("D", "F", "H", "A", "W")}
        ct_star = d.get("Ct_star")
        return cls(**quads, Ct=float(d["Ct"]), Ct_star=None if ct_star is None else float(ct_star))


def _quad(value: Sequence[float] | float, name: str) -> TrapezoidalFuzzy:
    if isinstance(value, (int, float)):
        return TrapezoidalFuzzy.crisp(float(value))
    try:
        return TrapezoidalFuzzy.from_seq(value)
    except DegenerateInputError as exc:
        raise ConfigurationError(f"{name}: {exc}") from None


@dataclass(frozen=True)
class EoqSolution:
    Q: float
    K: float
    cost: float
    iterations: int
    converged: bool

    def shipments(self, W: float) -> float:
        """Continuous number of RW-to-OW shipments per cycle, (Q - W) / K."""
        return (self.Q - W) / self.K if self.K > 0 else math.inf


# ---------------------------------------------------------------- crisp costs


def _check_qk(Q: float, K: float) -> None:
    if not Q > 0:
        raise DegenerateInputError("Q must be positive")
    if not K > 0:
        raise DegenerateInputError("K must be positive")


def crisp_cost(Q: float, K: float, p: EoqParams) -> float:
    """Average cost per unit time with K-release."""
    _check_qk(Q, K)
    D, A, F, H, W, Ct = p.D, p.A, p.F, p.H, p.W, p.Ct
    g = F - H
    return (
        A * D / Q + F * Q / 2 - W * g + K * g / 2 - K * W * g / (2 * Q)
        + Ct * (Q - W) * D / (Q * K) + W * W * g / (2 * Q)
    )


def crisp_cost_no_release(Q: float, p: EoqParams) -> float:
    """Average cost per unit time when surplus stock moves at Ct_star per unit."""
    if not Q > 0:
        raise DegenerateInputError("Q must be positive")
    ct_star = _need_ct_star(p)
    D, A, F, H, W = p.D, p.A, p.F, p.H, p.W
    g = F - H
    return A * D / Q + F * Q / 2 + W * W * g / (2 * Q) - W * g + (Q - W) * ct_star * D / Q


def release_saving(Q: float, K: float, p: EoqParams) -> float:
    """Closed form of C(Q) - C(Q, K): (1 - W/Q) [D (Ct* - Ct/K) - K (F - H)/2]."""
    _check_qk(Q, K)
    ct_star = _need_ct_star(p)
    return (1 - p.W / Q) * (p.D * (ct_star - p.Ct / K) - K * (p.F - p.H) / 2)


def k_release_economical(p: EoqParams, K: float) -> bool:
    """True when bulk release of K units beats per-unit transport."""
    if not K > 0:
        raise DegenerateInputError("K must be positive")
    ct_star = _need_ct_star(p)
    return (ct_star - p.Ct / K) > K * (p.F - p.H) / (2 * p.D)


def economical_threshold(p: EoqParams, K: float) -> float:
    """Ct_star at which the release rule breaks even for shipment size K."""
    if not K > 0:
        raise DegenerateInputError("K must be positive")
    return p.Ct / K + K * (p.F - p.H) / (2 * p.D)


def _need_ct_star(p: EoqParams | FuzzyEoqParams) -> float:
    if p.Ct_star is None:
        raise ConfigurationError("Ct_star required for the no-release model")
    return p.Ct_star


# ---------------------------------------------------------------- fuzzy costs


@dataclass(frozen=True)
class _Parts:
    """Per-component arrays of the fuzzy cost block."""

    a: np.ndarray
    d: np.ndarray
    f: np.ndarray
    u: np.ndarray  # f_i - h_{5-i}
    v: np.ndarray  # f_{5-i} - h_i
    omega: np.ndarray  # w_{5-i}
    wsq: np.ndarray  # squared capacity in the last term


def _parts(p: FuzzyEoqParams, convention: str) -> _Parts:
    check_convention(convention)
    a, d, f, h, w = (np.array(x.as_tuple()) for x in (p.A, p.D, p.F, p.H, p.W))
    u = f - h[::-1]
    v = f[::-1] - h
    # the typeset block squares w_1 in every component; componentwise
    # arithmetic gives w_i^2
    wsq = np.full(4, w[0] ** 2) if convention == STRICT_PRINT else w**2
    return _Parts(a, d, f, u, v, w[::-1], wsq)


def fuzzy_cost(
    Q: float, K: float, p: FuzzyEoqParams, convention: str = STRICT_PRINT
) -> tuple[TrapezoidalFuzzy, float]:
    """Fuzzy average cost with K-release and its graded mean.

    ``strict-print`` squares the first capacity component in every entry of
    the quadruple; ``sign-consistent`` squares the matching component.
    """
    _check_qk(Q, K)
    s = _parts(p, convention)
    comps = (
        s.a * s.d / Q + s.f * Q / 2 - s.v * s.omega + K * s.u / 2
        - K * s.v * s.omega / (2 * Q) + p.Ct * (Q - s.omega) * s.d / (Q * K)
        + s.u * s.wsq / (2 * Q)
    )
    quad = TrapezoidalFuzzy.from_seq(comps)
    return quad, graded_mean(quad)


def fuzzy_cost_no_release(
    Q: float, p: FuzzyEoqParams, convention: str = STRICT_PRINT
) -> tuple[TrapezoidalFuzzy, float]:
    """Fuzzy average cost without K-release and its graded mean."""
    if not Q > 0:
        raise DegenerateInputError("Q must be positive")
    ct_star = _need_ct_star(p)
    s = _parts(p, convention)
    comps = (
        s.a * s.d / Q + s.f * Q / 2 - s.v * s.omega
        + ct_star * (Q - s.omega) * s.d / Q + s.u * s.wsq / (2 * Q)
    )
    quad = TrapezoidalFuzzy.from_seq(comps)
    return quad, graded_mean(quad)


@dataclass(frozen=True)
class CostCoefficients:
    """Coefficients P1..P7 of the graded-mean cost (see module docstring)."""

    P1: float
    P2: float
    P3: float
    P4: float
    P5: float
    P6: float
    P7: float

    def cost(self, Q, K):
        """Vectorised cost with K-release; accepts arrays."""
        return (
            self.P1 / Q + self.P2 * Q - self.P3 + self.P4 * K - self.P5 * K / Q
            + self.P6 / K - self.P7 / (Q * K)
        )


def cost_coefficients(p: FuzzyEoqParams, convention: str = STRICT_PRINT) -> CostCoefficients:
    s = _parts(p, convention)
    c = GM_WEIGHTS
    return CostCoefficients(
        P1=float(c @ (s.a * s.d + s.u * s.wsq / 2)),
        P2=float(c @ s.f / 2),
        P3=float(c @ (s.v * s.omega)),
        P4=float(c @ s.u / 2),
        P5=float(c @ (s.v * s.omega) / 2),
        P6=float(p.Ct * (c @ s.d)),
        P7=float(p.Ct * (c @ (s.omega * s.d))),
    )


@dataclass(frozen=True)
class NoReleaseCoefficients:
    """Graded-mean cost without release: B1/Q + B2 Q + B0."""

    B0: float
    B1: float
    B2: float

    def cost(self, Q):
        return self.B1 / Q + self.B2 * Q + self.B0


def no_release_coefficients(
    p: FuzzyEoqParams, convention: str = STRICT_PRINT
) -> NoReleaseCoefficients:
    ct_star = _need_ct_star(p)
    s = _parts(p, convention)
    c = GM_WEIGHTS
    return NoReleaseCoefficients(
        B0=float(c @ (ct_star * s.d - s.v * s.omega)),
        B1=float(c @ (s.a * s.d + s.u * s.wsq / 2 - ct_star * s.omega * s.d)),
        B2=float(c @ s.f / 2),
    )


# ------------------------------------------------------------------- solvers


def _alternate(co: CostCoefficients, W: float) -> EoqSolution:
    if co.P4 <= 0:
        raise InfeasibleModelError("K-release optimum undefined: requires F > H")
    Q = max(math.sqrt(max(co.P1, 0.0) / co.P2), W, 1e-9)
    K = W if W > 0 else 1.0
    for it in range(1, MAX_ITER + 1):
        num, den = co.P6 * Q - co.P7, co.P4 * Q - co.P5
        K_new = math.sqrt(num / den) if num > 0 and den > 0 else W
        # shipment size cannot exceed own capacity
        K_new = min(K_new, W) if W > 0 else K_new
        rad = (co.P1 - co.P5 * K_new - co.P7 / K_new) / co.P2
        Q_new = max(math.sqrt(rad) if rad > 0 else W, W)
        step = abs(Q_new - Q) + abs(K_new - K)
        Q, K = Q_new, K_new
        if step < 1e-9 * (1 + Q + K):
            return EoqSolution(Q, K, float(co.cost(Q, K)), it, True)
    return EoqSolution(Q, K, float(co.cost(Q, K)), MAX_ITER, False)


def solve_crisp(p: EoqParams) -> EoqSolution:
    """Jointly optimal (Q, K) of the crisp cost with K-release."""
    if p.F <= p.H:
        raise InfeasibleModelError("K-release optimum undefined: requires F > H")
    sol = _alternate(cost_coefficients(p.to_fuzzy()), p.W)
    return EoqSolution(sol.Q, sol.K, crisp_cost(sol.Q, sol.K, p), sol.iterations, sol.converged)


def solve_fuzzy(p: FuzzyEoqParams, convention: str = STRICT_PRINT) -> EoqSolution:
    """Jointly optimal (Q, K) of the graded-mean fuzzy cost with K-release."""
    if graded_mean(p.F) <= graded_mean(p.H):
        raise InfeasibleModelError("K-release optimum undefined: requires F > H")
    return _alternate(cost_coefficients(p, convention), p.W_mean)


def no_release_bounds(p: EoqParams | FuzzyEoqParams) -> tuple[float, float]:
    """Search box for Q without release: [max(W, 1), 5 sqrt(2AD/F)]."""
    fp = p.to_fuzzy() if isinstance(p, EoqParams) else p
    lo = max(fp.W_mean, 1.0)
    eoq = math.sqrt(2 * graded_mean(fp.A) * graded_mean(fp.D) / graded_mean(fp.F))
    return lo, max(5 * eoq, lo)


def solve_no_release(
    p: EoqParams | FuzzyEoqParams, convention: str = STRICT_PRINT
) -> EoqSolution:
    """Optimal Q without the release rule; K is reported as 0.

    The cost is ``B1/Q + B2 Q + B0``; its minimiser ``sqrt(B1/B2)`` is
    clamped to ``Q >= max(W, 1)``.
    """
    fp = p.to_fuzzy() if isinstance(p, EoqParams) else p
    co = no_release_coefficients(fp, convention)
    lo, _ = no_release_bounds(fp)
    Q = math.sqrt(co.B1 / co.B2) if co.B1 > 0 else lo
    Q = max(Q, lo)
    return EoqSolution(Q, 0.0, float(co.cost(Q)), 1, True)


def implied_ct_star(
    p: EoqParams | FuzzyEoqParams,
    Q: float | None = None,
    cost: float | None = None,
    convention: str = STRICT_PRINT,
) -> float:
    """Back-solve the per-unit transport cost from a reported no-release result.

    With ``Q`` only, Ct_star is chosen so that ``Q`` is the no-release
    optimum. With ``Q`` and ``cost``, it is chosen so that the cost at
    ``Q`` equals ``cost``.
    """
    if Q is None:
        raise ConfigurationError("Q is required")
    fp = p.to_fuzzy() if isinstance(p, EoqParams) else p
    s = _parts(fp, convention)
    c = GM_WEIGHTS
    base = float(c @ (s.a * s.d + s.u * s.wsq / 2))
    wd = float(c @ (s.omega * s.d))
    half_f = float(c @ s.f / 2)
    if cost is None:
        if wd == 0:
            raise DegenerateInputError("Ct_star not identifiable when W = 0")
        return (base - half_f * Q * Q) / wd
    fixed = base / Q + half_f * Q - float(c @ (s.v * s.omega))
    slope = float(c @ s.d) - wd / Q
    if slope == 0:
        raise DegenerateInputError("Ct_star not identifiable at Q = W")
    return (cost - fixed) / slope
