"""Estimators of a mean that use a binary auxiliary attribute.

The two base classes are

* ``t1 = ybar * ((K1 P + K2 K3) / (K1 p + K2 K3))^alpha``
* ``t2 = ybar * {2 - (p/P)^beta exp[lambda K4 (P - p) / (K4 (P + p) + 2 K5)]}``

and the almost-unbiased combination ``t_p = w0 ybar + w1 t1 + w2 t2`` whose
weights cancel the first-order bias while attaining the regression MSE.
A two-phase version replaces the known P by a first-phase estimate p'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, SingularSystemError
from .stats import STRICT_PRINT, AttributeSummary, check_convention, pre


@dataclass(frozen=True)
class AttrClassConfig:
    """Constants of the two base classes t1 and t2."""

    K1: float = 1.0
    K2: float = 1.0
    K3: float = 1.0
    K4: float = 1.0
    K5: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.K2 not in (1, -1):
            raise DegenerateInputError("K2 must be +1 or -1")

    def V1(self, P: float) -> float:
        den = self.K1 * P + self.K2 * self.K3
        if den == 0:
            raise DegenerateInputError("K1 P + K2 K3 must be nonzero")
        return self.K1 * P / den

    def V2(self, P: float) -> float:
        den = self.K4 * P + self.K5
        if den == 0:
            raise DegenerateInputError("K4 P + K5 must be nonzero")
        return self.K4 * P / den


@dataclass(frozen=True)
class WeightTriple:
    w0: float
    w1: float
    w2: float

    def __post_init__(self) -> None:
        total = self.w0 + self.w1 + self.w2
        if abs(total - 1) > 1e-9 * max(1.0, abs(self.w0), abs(self.w1), abs(self.w2)):
            raise SingularSystemError(f"weights sum to {total}, not 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w0, self.w1, self.w2)


def _bias_coeff_t1(cfg: AttrClassConfig, a: AttributeSummary) -> float:
    al, V1 = cfg.alpha, cfg.V1(a.P)
    return al * (al + 1) * V1**2 / 2 - al * V1 * a.K_p


def _bias_coeff_t2(cfg: AttrClassConfig, a: AttributeSummary) -> float:
    b, l, V2, Kp = cfg.beta, cfg.lam, cfg.V2(a.P), a.K_p
    return l * V2 * b / 2 - b * (b - 1) / 2 - l * (l + 2) * V2**2 / 8 - b * Kp + l * V2 * Kp / 2


def slope_t1(cfg: AttrClassConfig, a: AttributeSummary) -> float:
    """Coefficient of -e_phi in the linearised error of t1 (alpha V1)."""
    return cfg.alpha * cfg.V1(a.P)


def slope_t2(cfg: AttrClassConfig, a: AttributeSummary) -> float:
    """Coefficient of -e_phi in the linearised error of t2 (beta - lambda V2 / 2)."""
    return cfg.beta - cfg.lam * cfg.V2(a.P) / 2


def _mse_at_slope(q: float, a: AttributeSummary) -> float:
    return a.mean_y**2 * a.f1 * (a.C_y**2 + a.C_p**2 * (q * q - 2 * q * a.K_p))


def bias_mse_t1(cfg: AttrClassConfig, a: AttributeSummary) -> tuple[float, float]:
    """First-order bias and MSE of t1."""
    bias = a.mean_y * a.f1 * a.C_p**2 * _bias_coeff_t1(cfg, a)
    return bias, _mse_at_slope(slope_t1(cfg, a), a)


def bias_mse_t2(cfg: AttrClassConfig, a: AttributeSummary) -> tuple[float, float]:
    """First-order bias and MSE of t2."""
    bias = a.mean_y * a.f1 * a.C_p**2 * _bias_coeff_t2(cfg, a)
    return bias, _mse_at_slope(slope_t2(cfg, a), a)


def mean_mse(a: AttributeSummary) -> float:
    """Variance of the sample mean, Y^2 f1 C_y^2."""
    return a.mean_y**2 * a.f1 * a.C_y**2


def _solve3(M: np.ndarray, rhs: np.ndarray) -> WeightTriple:
    if abs(np.linalg.det(M)) < 1e-14 * max(1.0, np.abs(M).max() ** 3):
        raise SingularSystemError("bias-cancellation system singular")
    w = np.linalg.solve(M, rhs)
    return WeightTriple(*map(float, w))


def solve_weights(cfg: AttrClassConfig, a: AttributeSummary) -> WeightTriple:
    """Weights (w0, w1, w2) with unit sum, optimal slope K_p and zero bias.

    The rows of the system are ``w0 + w1 + w2 = 1``,
    ``w1 alpha V1 + w2 (beta - lambda V2 / 2) = K_p`` and
    ``w1 B(t1) + w2 B(t2) = 0``. The common factor ``Y f1 C_p^2`` of the
    biases is dropped from the last row.
    """
    M = np.array(
        [
            [1.0, 1.0, 1.0],
            [0.0, slope_t1(cfg, a), slope_t2(cfg, a)],
            [0.0, _bias_coeff_t1(cfg, a), _bias_coeff_t2(cfg, a)],
        ]
    )
    return _solve3(M, np.array([1.0, a.K_p, 0.0]))


def mse_tp(w: WeightTriple, cfg: AttrClassConfig, a: AttributeSummary) -> float:
    """MSE of the weighted combination at slope Q = w1 alpha V1 + w2 (beta - lambda V2/2)."""
    q = w.w1 * slope_t1(cfg, a) + w.w2 * slope_t2(cfg, a)
    return _mse_at_slope(q, a)


def bias_tp(w: WeightTriple, cfg: AttrClassConfig, a: AttributeSummary) -> float:
    return w.w1 * bias_mse_t1(cfg, a)[0] + w.w2 * bias_mse_t2(cfg, a)[0]


def min_mse_tp(a: AttributeSummary) -> float:
    """Minimum MSE of the combination, Y^2 f1 C_y^2 (1 - rho_pb^2)."""
    return mean_mse(a) * (1 - a.rho_pb**2)


@dataclass(frozen=True)
class TwoPhaseConfig:
    """Constants of the two-phase classes t1d and t2d.

    ``m_exp`` is the exponent of t1d, ``n_exp`` and ``gamma`` those of t2d.
    """

    m_exp: float = 1.0
    n_exp: float = 1.0
    gamma: float = 1.0
    K1: float = 1.0
    K2: float = 1.0
    K3: float = 1.0
    K4: float = 1.0
    K5: float = 1.0

    def R1(self, P: float) -> float:
        den = self.K1 * P + self.K2 * self.K3
        if den == 0:
            raise DegenerateInputError("K1 P + K2 K3 must be nonzero")
        return self.K1 * P / den

    def R2(self, P: float) -> float:
        den = 2 * (self.K4 * P + self.K5)
        if den == 0:
            raise DegenerateInputError("K4 P + K5 must be nonzero")
        return self.K4 * P / den

    def L1(self, P: float) -> float:
        return self.n_exp - self.gamma * self.R2(P)


def _two_phase_bias_coeffs(cfg: TwoPhaseConfig, a: AttributeSummary) -> tuple[float, float]:
    m, n, g = cfg.m_exp, cfg.n_exp, cfg.gamma
    R1, R2, Kp = cfg.R1(a.P), cfg.R2(a.P), a.K_p
    f1, f2, f3 = a.f1, a.f2, a.f3
    b1 = (
        m * (m - 1) * R1**2 * f2 / 2
        + m * (m + 1) * R1**2 * f1 / 2
        - m * m * R1**2 * f2
        + m * R1 * f3 * Kp
    )
    b2 = (
        -n * (n - 1) * f1 / 2
        + n * (n + 1) * f2 / 2
        + n * f2 * Kp
        + n * n * f2
        + f3 * g * R2 * Kp
        + f3 * g * R2 * n
    )
    return b1, b2


def two_phase_bias_mse(
    cfg: TwoPhaseConfig, a: AttributeSummary, convention: str = STRICT_PRINT
) -> tuple[float, float, float, float]:
    """First-order (bias_t1d, mse_t1d, bias_t2d, mse_t2d).

    ``strict-print`` evaluates MSE(t2d) as ``Y^2 [f1 C_y^2 + L1^2 f3 C_p^2]``;
    ``sign-consistent`` adds the cross term ``-2 L1 K_p f3 C_p^2`` that the
    t1d expression carries.
    """
    check_convention(convention)
    b1, b2 = _two_phase_bias_coeffs(cfg, a)
    Y, Cp2 = a.mean_y, a.C_p**2
    mR1 = cfg.m_exp * cfg.R1(a.P)
    mse1 = Y**2 * (a.f1 * a.C_y**2 + mR1**2 * a.f3 * Cp2 - 2 * mR1 * a.K_p * a.f3 * Cp2)
    L1 = cfg.L1(a.P)
    mse2 = Y**2 * (a.f1 * a.C_y**2 + L1**2 * a.f3 * Cp2)
    if convention != STRICT_PRINT:
        mse2 -= Y**2 * 2 * L1 * a.K_p * a.f3 * Cp2
    return Y * b1 * Cp2, mse1, Y * b2 * Cp2, mse2


def solve_weights_two_phase(cfg: TwoPhaseConfig, a: AttributeSummary) -> WeightTriple:
    """Two-phase weights with unit sum, slope K_p and zero first-order bias."""
    b1, b2 = _two_phase_bias_coeffs(cfg, a)
    M = np.array(
        [
            [1.0, 1.0, 1.0],
            [0.0, cfg.m_exp * cfg.R1(a.P), cfg.L1(a.P)],
            [0.0, b1, b2],
        ]
    )
    return _solve3(M, np.array([1.0, a.K_p, 0.0]))


def two_phase_mse_tp(w: WeightTriple, cfg: TwoPhaseConfig, a: AttributeSummary) -> float:
    """MSE of the two-phase combination at slope L2 = h1 m R1 + h2 (n - gamma R2)."""
    L2 = w.w1 * cfg.m_exp * cfg.R1(a.P) + w.w2 * cfg.L1(a.P)
    return a.mean_y**2 * (a.f1 * a.C_y**2 + a.f3 * a.C_p**2 * (L2 * L2 - 2 * L2 * a.K_p))


def two_phase_min_mse(a: AttributeSummary) -> float:
    """Y^2 C_y^2 (f1 - f3 rho_pb^2), the two-phase regression MSE."""
    return a.mean_y**2 * a.C_y**2 * (a.f1 - a.f3 * a.rho_pb**2)


# (first constant, second constant) of the 25 catalogued members of each family
MEMBER_CONSTANTS = (
    ("1", "C_p"), ("1", "beta2"), ("beta2", "C_p"), ("C_p", "beta2"), ("1", "rho"),
    ("NP", "S_phi"), ("NP", "f"), ("beta2", "K_p"), ("NP", "K_p"), ("N", "1"),
    ("N", "C_p"), ("N", "rho"), ("N", "S_phi"), ("N", "f"), ("N", "g"),
    ("N", "K_p"), ("n", "rho"), ("n", "S_phi"), ("n", "f"), ("n", "g"),
    ("n", "K_p"), ("beta2", "P"), ("NP", "P"), ("N", "P"), ("n", "P"),
)

FAMILIES = ("A-ratio", "B-product", "C-exponential")


def symbol_value(symbol: str, a: AttributeSummary) -> float:
    """Numeric value of a named population constant."""
    f = a.n / a.N
    table = {
        "1": 1.0,
        "beta2": a.beta2_phi,
        "C_p": a.C_p,
        "rho": a.rho_pb,
        "N": float(a.N),
        "n": float(a.n),
        "NP": a.N * a.P,
        "S_phi": a.S_phi,
        "f": f,
        "g": 1 - f,
        "K_p": a.K_p,
        "P": a.P,
    }
    value = table[symbol]
    if value is None:
        raise DegenerateInputError(f"constant {symbol} not available for this population")
    return float(value)


@dataclass(frozen=True)
class MemberRow:
    member_id: str
    cfg: AttrClassConfig
    bias: float
    mse: float
    pre: float
    flagged: bool = False


def appendix_members(family: str, a: AttributeSummary, exp_lambda: float = 1.0) -> list[MemberRow]:
    """PRE of every catalogued member of a family.

    Families ``A-ratio`` (alpha = 1) and ``B-product`` (alpha = -1) are
    t1 members evaluated for K2 = +1 and K2 = -1; ``C-exponential`` members
    are t2 with beta = 1 and lambda = ``exp_lambda``. Members whose
    denominators vanish are returned flagged with NaN values.
    """
    base = mean_mse(a)
    rows: list[MemberRow] = []
    for i, (s1, s2) in enumerate(MEMBER_CONSTANTS, start=1):
        k1, k2 = symbol_value(s1, a), symbol_value(s2, a)
        if family == "C-exponential":
            variants = [(f"t2_{i}", AttrClassConfig(K4=k1, K5=k2, beta=1.0, lam=exp_lambda))]
        elif family in ("A-ratio", "B-product"):
            alpha = 1.0 if family == "A-ratio" else -1.0
            tags = ("a", "b") if alpha > 0 else ("c", "d")
            variants = [
                (f"t1{tag}{i}", AttrClassConfig(K1=k1, K2=sign, K3=k2, alpha=alpha))
                for tag, sign in zip(tags, (1.0, -1.0))
            ]
        else:
            raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
        for member_id, cfg in variants:
            try:
                fn = bias_mse_t2 if family == "C-exponential" else bias_mse_t1
                bias, mse = fn(cfg, a)
            except DegenerateInputError:
                rows.append(MemberRow(member_id, cfg, math.nan, math.nan, math.nan, True))
                continue
            rows.append(MemberRow(member_id, cfg, bias, mse, pre(base, mse)))
    return rows
