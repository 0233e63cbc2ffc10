"""Ratio, product and scaled estimators of a mean under simple random sampling.

Three generations of estimators are covered:

* the general transformed-ratio family ``t0 .. t6`` built on
  ``ybar * [(a X + b) / (alpha (a xbar + b) + (1 - alpha)(a X + b))]^g``;
* the dual-transform versions ``t1* .. t6*``, whose MSE is the classical MSE
  times ``h^2`` with ``h = n / (N - n)``;
* the scaled versions ``eta1* .. eta6*`` with a closed-form scaling constant k;

plus the two-constant class ``t_M`` with jointly optimal (m1, m2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, SingularSystemError
from .stats import STRICT_PRINT, SrsSummary, check_convention

CLASSICAL = ("t0", "t1", "t2", "t3", "t4", "t5", "t6")
DUAL = ("t1*", "t2*", "t3*", "t4*", "t5*", "t6*")
SCALED = ("eta1*", "eta2*", "eta3*", "eta4*", "eta5*", "eta6*")


@dataclass(frozen=True)
class FamilyConfig:
    """Constants of the transformed-ratio family.

    ``g = 1`` gives ratio-type and ``g = -1`` product-type members;
    ``g = 0`` collapses to the sample mean.
    """

    a_coef: float
    b_coef: float
    alpha: float
    g: float

    def __post_init__(self) -> None:
        if self.g != 0 and self.a_coef == 0:
            raise DegenerateInputError("a_coef must be nonzero when g is nonzero")

    def theta(self, s: SrsSummary) -> float:
        """Shrinkage factor a X / (a X + b)."""
        return self.a_coef * s.mean_x / (self.a_coef * s.mean_x + self.b_coef)


def family_mse(cfg: FamilyConfig, s: SrsSummary) -> float:
    """First-order MSE ``λ Y^2 (C_y^2 + (αgθ)^2 C_x^2 - 2 αgθ ρ C_y C_x)``."""
    t = cfg.alpha * cfg.g * cfg.theta(s)
    return s.lam * s.mean_y**2 * (s.C_y**2 + t * t * s.C_x**2 - 2 * t * s.C_yx)


def family_member(est: str, s: SrsSummary) -> FamilyConfig:
    """Family constants of the named classical estimator."""
    shifts = {"t1": 0.0, "t2": 0.0, "t3": s.C_x, "t4": s.C_x, "t5": s.rho, "t6": s.rho}
    if est == "t0":
        return FamilyConfig(1.0, 0.0, 0.0, 0.0)
    if est not in shifts:
        raise ValueError(f"unknown classical estimator {est!r}")
    g = 1.0 if int(est[1]) % 2 else -1.0
    return FamilyConfig(1.0, shifts[est], 1.0, g)


def mse_classical(est: str, s: SrsSummary) -> float:
    """MSE of ``t0`` (sample mean) through ``t6``.

    Odd members are ratio-type, even members product-type; members 3/4
    shift by C_x and 5/6 by ρ.
    """
    return family_mse(family_member(est, s), s)


def mse_dual(est: str, s: SrsSummary) -> float:
    """MSE of the dual-transform estimator ``tK*``: ``h^2`` times that of ``tK``."""
    if est not in DUAL:
        raise ValueError(f"unknown dual estimator {est!r}")
    return s.h**2 * mse_classical(est[:-1], s)


def _shift_factor(index: int, s: SrsSummary) -> float:
    shift = (0.0, s.C_x, s.rho)[(index - 1) // 2]
    return s.mean_x / (s.mean_x + shift)


def scaling_constant(est: str, s: SrsSummary, convention: str = STRICT_PRINT) -> float:
    """Closed-form scaling constant k of ``etaK*``.

    Under ``strict-print`` the numerators of k4 and k6 carry λ twice,
    exactly as typeset; ``sign-consistent`` uses a single λ, mirroring k2.
    """
    check_convention(convention)
    i = _scaled_index(est)
    v = _shift_factor(i, s)
    h2, lam, Cx2, Cy2, Cyx = s.h**2, s.lam, s.C_x**2, s.C_y**2, s.C_yx
    if i % 2:
        num = h2 * (lam * v * v * Cx2 - v * lam * Cyx) + 1
        den = h2 * (3 * v * v * Cx2 * lam - 4 * v * Cyx * lam + lam * Cy2) + 1
    elif i == 2:
        num = h2 * lam * Cyx + 1
        den = h2 * (Cx2 * lam + 4 * Cyx * lam + lam * Cy2) + 1
    else:
        lam_num = lam * lam if convention == STRICT_PRINT else lam
        num = h2 * (v * lam_num * Cyx) + 1
        den = h2 * (3 * v * v * Cx2 * lam + 4 * v * Cyx * lam + lam * Cy2) + 1
    if den == 0:
        raise DegenerateInputError("degenerate scaling constant: zero denominator")
    return num / den


def scaled_mse(est: str, k: float, s: SrsSummary) -> float:
    """MSE of ``etaK*`` at an arbitrary scaling constant k."""
    i = _scaled_index(est)
    v = _shift_factor(i, s)
    h2, lam = s.h**2, s.lam
    if i % 2:
        inner = k * k * lam * s.C_y**2 + (3 * k * k - 2 * k) * v * v * lam * s.C_x**2 - 2 * v * (2 * k * k - k) * lam * s.C_yx
    else:
        inner = k * k * lam * s.C_y**2 + k * k * v * v * lam * s.C_x**2 + 2 * v * (2 * k * k - k) * lam * s.C_yx
    return s.mean_y**2 * (h2 * inner + (k - 1) ** 2)


def mse_yadav_kadilar(
    est: str, s: SrsSummary, convention: str = STRICT_PRINT
) -> tuple[float, float]:
    """Scaling constant and MSE of ``etaK*``; returns ``(k, mse)``."""
    k = scaling_constant(est, s, convention)
    return k, scaled_mse(est, k, s)


def _scaled_index(est: str) -> int:
    if est not in SCALED:
        raise ValueError(f"unknown scaled estimator {est!r}")
    return int(est[3])


@dataclass(frozen=True)
class TmConfig:
    """Constants of the two-constant class t_M.

    alpha, beta = +1 give ratio-type and -1 product-type members.
    """

    psi: float = 1.0
    delta: float = 1.0
    omega: float = 1.0
    mu: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0

    def R1(self, s: SrsSummary) -> float:
        den = self.psi * s.mean_x + self.delta
        if den == 0:
            raise DegenerateInputError("psi * X + delta must be nonzero")
        return self.psi * s.mean_x / den

    def R2(self, s: SrsSummary) -> float:
        den = self.omega * s.mean_x + self.mu
        if den == 0:
            raise DegenerateInputError("omega * X + mu must be nonzero")
        return self.omega * s.mean_x / den


@dataclass(frozen=True)
class TmSolution:
    m1: float
    m2: float
    L1: float
    L2: float
    L3: float
    L4: float
    T1: float
    T2: float
    T3: float
    T4: float
    T5: float
    mse: float


def tm_coefficients(cfg: TmConfig, s: SrsSummary) -> tuple[np.ndarray, np.ndarray]:
    """The (L1..L4) and (T1..T5) coefficient vectors of the t_M MSE."""
    a, b, h, lam = cfg.alpha, cfg.beta, s.h, s.lam
    R1, R2 = cfg.R1(s), cfg.R2(s)
    Y, X, Cx2, Cy2 = s.mean_y, s.mean_x, s.C_x**2, s.C_y**2
    r = s.C_yx
    L1 = a * R1 * h + b * h * R2 / 2
    L2 = (
        a * (a + 1) * h * h * R1**2 / 2
        + a * b * h * h * R1 * R2 / 2
        + b * b * h * h * R2**2 / 8
        + b * h * h * R2**2 / 4
    )
    L3 = a * h * h * R1 + b * h * h * R2 / 2
    L4 = L3
    T1 = Y * Y * (1 + lam * h * h * Cy2 + L1**2 * lam * Cx2 - 2 * h * L1 * lam * r + 2 * L2 * lam * Cx2 - 2 * L3 * lam * r)
    T2 = h * h * lam * X * X * Cx2
    T3 = Y * X * (L4 * lam * Cx2 + L1 * lam * h * Cx2 - h * h * lam * r)
    T4 = Y * Y * (1 + L2 * lam * Cx2 - L3 * lam * r)
    T5 = Y * X * L4 * lam * Cx2
    return np.array([L1, L2, L3, L4]), np.array([T1, T2, T3, T4, T5])


def tm_mse(m1: float, m2: float, cfg: TmConfig, s: SrsSummary) -> float:
    """MSE of t_M at arbitrary (m1, m2).

    The T coefficients already carry ``Y^2``, ``Y X`` or ``X^2``, so the
    leading constant is ``Y^2`` rather than an overall ``Y^2`` factor.
    """
    _, (T1, T2, T3, T4, T5) = tm_coefficients(cfg, s)
    return s.mean_y**2 + m1 * m1 * T1 + m2 * m2 * T2 + 2 * m1 * m2 * T3 - 2 * m1 * T4 - 2 * m2 * T5


def solve_tm(cfg: TmConfig, s: SrsSummary) -> TmSolution:
    """Jointly optimal (m1, m2) of t_M and the resulting MSE."""
    L, T = tm_coefficients(cfg, s)
    T1, T2, T3, T4, T5 = T
    det = T1 * T2 - T3**2
    if det == 0 or not np.isfinite(det):
        raise SingularSystemError("degenerate T-matrix: T1*T2 - T3^2 = 0")
    m1 = (T2 * T4 - T3 * T5) / det
    m2 = (T1 * T5 - T3 * T4) / det
    return TmSolution(
        float(m1), float(m2), *map(float, L), *map(float, T), mse=float(tm_mse(m1, m2, cfg, s))
    )
