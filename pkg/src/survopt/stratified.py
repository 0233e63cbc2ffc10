"""Stratified-sampling estimators of a mean using two auxiliary variables.

All MSE expressions are first-order approximations written in terms of
the relative moments ``V_rst`` from :func:`survopt.stats.v_moments`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import SingularSystemError
from .stats import (
    STRICT_PRINT,
    StratifiedPopulation,
    VMoments,
    check_convention,
    pre,
    regression_coefficients,
    v_moments,
)


class StratEstimatorId(str, Enum):
    MEAN = "MEAN"
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"
    T4 = "T4"
    T5 = "T5"
    T6 = "T6"
    T7 = "T7"
    TP = "TP"


# coefficients of (V200, V020, V002, V110, V101, V011) inside Ybar^2 [...]
_MSE_COEFFS = {
    StratEstimatorId.MEAN: (1, 0, 0, 0, 0, 0),
    StratEstimatorId.T1: (1, 1, 0, -2, 0, 0),
    StratEstimatorId.T2: (1, 0.25, 0, -1, 0, 0),
    StratEstimatorId.T3: (1, 0.25, 0.25, -1, -1, 0.5),
    StratEstimatorId.T4: (1, 0.25, 0.25, 1, 1, 0.5),
    StratEstimatorId.T5: (1, 0.25, 0.25, -1, 1, -0.5),
    StratEstimatorId.T6: (1, 0.25, 0.25, 1, -1, -0.5),
}


def mse_strat(est: StratEstimatorId | str, v: VMoments, Ybar: float) -> float:
    """First-order MSE of the mean, ratio, exponential and two-auxiliary estimators.

    Parameters
    ----------
    est : StratEstimatorId
        One of MEAN, T1, ..., T6.
    v : VMoments
    Ybar : float
        Population mean of the study variable.
    """
    est = StratEstimatorId(est)
    if est not in _MSE_COEFFS:
        raise ValueError(f"{est.value} has no moment-only MSE; use mse_t7 or solve_tp")
    return float(Ybar**2 * np.dot(_MSE_COEFFS[est], v.as_array()))


def mse_t7(pop: StratifiedPopulation) -> float:
    """MSE of the two-variable regression estimator as a per-stratum sum."""
    c = pop.weights**2 * pop.f
    ryx, ryz, rxz = (pop.column(k) for k in ("rho_yx", "rho_yz", "rho_xz"))
    factor = 1 - ryx**2 - ryz**2 + 2 * ryx * ryz * rxz
    return float(c @ (pop.column("S_y") ** 2 * factor))


@dataclass(frozen=True)
class TpSolution:
    """Optimal exponents of the exponential-cum-regression estimator t_p.

    ``m1_closed``/``m2_closed`` hold the closed-form exponents kept for
    comparison; ``m1``/``m2`` are the exact stationary point of the MSE.
    """

    m1: float
    m2: float
    P1: float
    P2: float
    P3: float
    mse: float
    m1_closed: float
    m2_closed: float
    convention: str


def _tp_parts(m1, m2, v, Ybar, b1, b2):
    P1 = m1 * m1 * v.V020 / 4 + m2 * m2 * v.V002 / 4 + m1 * m2 * v.V011 / 2 - m1 * v.V110 - m2 * v.V101
    P2 = b1 * b1 * v.V020 + b2 * b2 * v.V002 + 2 * b1 * b2 * v.V011
    P3 = (
        -2 * b1 * v.V110
        - 2 * b2 * v.V101
        + m1 * b1 * v.V020
        + m1 * b2 * v.V011
        + m2 * b1 * v.V011
        + m2 * b2 * v.V002
    )
    return P1, P2, P3


def mse_tp(
    m1: float,
    m2: float,
    v: VMoments,
    pop: StratifiedPopulation,
    convention: str = STRICT_PRINT,
) -> tuple[float, float, float, float]:
    """MSE of t_p at exponents (m1, m2); returns (mse, P1, P2, P3).

    ``strict-print`` evaluates ``Ybar^2 (V200 + P1) + P2 - Ybar P3`` with the
    pooled coefficients entering P2, P3 unscaled. ``sign-consistent``
    rescales them by the auxiliary means and takes the cross term with the
    sign implied by expanding the estimator, giving
    ``Ybar^2 (V200 + P1) + P2 + Ybar P3``.
    """
    check_convention(convention)
    Ybar = pop.mean_y
    b1, b2 = regression_coefficients(pop)
    if convention == STRICT_PRINT:
        P1, P2, P3 = _tp_parts(m1, m2, v, Ybar, b1, b2)
        return Ybar**2 * (v.V200 + P1) + P2 - Ybar * P3, P1, P2, P3
    P1, P2, P3 = _tp_parts(m1, m2, v, Ybar, b1 * pop.mean_x, b2 * pop.mean_z)
    return Ybar**2 * (v.V200 + P1) + P2 + Ybar * P3, P1, P2, P3


def solve_tp(
    v: VMoments, pop: StratifiedPopulation, convention: str = STRICT_PRINT
) -> TpSolution:
    """Exponents (m1, m2) minimising the t_p MSE.

    The MSE is quadratic in (m1, m2), so the stationary point is the
    solution of a 2x2 linear system whose matrix is the auxiliary moment
    block ``S = [[V020, V011], [V011, V002]]``.
    """
    check_convention(convention)
    S = np.array([[v.V020, v.V011], [v.V011, v.V002]])
    det = v.V020 * v.V002 - v.V011**2
    if det <= 0 or not math.isfinite(det):
        raise SingularSystemError("collinear auxiliaries: V020*V002 - V011^2 <= 0")
    Ybar = pop.mean_y
    b1, b2 = regression_coefficients(pop)
    vv = np.array([v.V110, v.V101])
    a = np.linalg.solve(S, vv)
    if convention == STRICT_PRINT:
        # error weight on e_i is Ybar m_i / 2 - b_i
        m = 2 * a + 2 * np.array([b1, b2]) / Ybar
    else:
        # error weight on e_i is Ybar m_i / 2 + b_i * mean_i
        m = 2 * a - 2 * np.array([b1 * pop.mean_x, b2 * pop.mean_z]) / Ybar
    mse, P1, P2, P3 = mse_tp(m[0], m[1], v, pop, convention)
    c1, c2 = closed_form_exponents(v, pop)
    return TpSolution(float(m[0]), float(m[1]), P1, P2, P3, float(mse), c1, c2, convention)


def closed_form_exponents(v: VMoments, pop: StratifiedPopulation) -> tuple[float, float]:
    """The closed-form (m1, m2) pair carried alongside the exact optimum."""
    b1, b2 = regression_coefficients(pop)
    Ybar = pop.mean_y
    den = Ybar * (v.V020 * v.V002 - v.V011**2)
    if den == 0:
        raise SingularSystemError("collinear auxiliaries: V020*V002 - V011^2 = 0")
    m1 = 4 * (b1 * v.V011 * v.V002 + b2 * v.V011**2 - b1 * v.V020 * v.V002 - b2 * v.V011 * v.V002) / den
    m2 = 4 * (b1 * v.V011 * v.V020 + b2 * v.V011**2 - b1 * v.V011 * v.V020 - b2 * v.V002 * v.V020) / den
    return float(m1), float(m2)


def all_mse(pop: StratifiedPopulation, convention: str = STRICT_PRINT) -> dict[StratEstimatorId, float]:
    """MSE of every estimator in the family, keyed by estimator id."""
    v = v_moments(pop)
    Ybar = pop.mean_y
    out = {e: mse_strat(e, v, Ybar) for e in _MSE_COEFFS}
    out[StratEstimatorId.T7] = mse_t7(pop)
    out[StratEstimatorId.TP] = solve_tp(v, pop, convention).mse
    return out


def pre_table(
    pop: StratifiedPopulation, convention: str = STRICT_PRINT
) -> list[tuple[StratEstimatorId, float, float]]:
    """Rows of (estimator, mse, PRE) relative to the stratified sample mean."""
    mses = all_mse(pop, convention)
    base = mses[StratEstimatorId.MEAN]
    rows = []
    for est, mse in mses.items():
        value = 100.0 if est is StratEstimatorId.MEAN else pre(base, mse)
        rows.append((est, mse, value))
    return rows


def efficiency_gaps(
    v: VMoments, sol: TpSolution, Ybar: float
) -> dict[StratEstimatorId, float]:
    """Signed differences MSE(t) - MSE(t_p) for the mean and T1..T6.

    No sign is asserted; negative entries mean t_p is worse at these moments.
    """
    return {e: mse_strat(e, v, Ybar) - sol.mse for e in _MSE_COEFFS}
