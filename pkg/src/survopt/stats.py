"""Population summary types and the shared sampling-moment machinery."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateInputError

STRICT_PRINT = "strict-print"
SIGN_CONSISTENT = "sign-consistent"
CONVENTIONS = (STRICT_PRINT, SIGN_CONSISTENT)

COV_RTOL = 1e-6


def check_convention(convention: str) -> str:
    """Return ``convention`` if it names a known formula convention."""
    if convention not in CONVENTIONS:
        raise ConfigurationError(
            f"unknown convention {convention!r}; expected one of {CONVENTIONS}"
        )
    return convention


def _close(a: float, b: float, rtol: float = COV_RTOL) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


@dataclass(frozen=True)
class StratumStats:
    """Summary statistics of one stratum for a study variable y and auxiliaries x, z.

    Each variable pair may be described by its covariance, its correlation,
    or both. Missing members of a pair are derived from ``rho * S * S``;
    when both are given they must agree to 1e-6 relative.
    """

    N_h: int
    n_h: int
    mean_y: float
    mean_x: float
    mean_z: float
    S_y: float
    S_x: float
    S_z: float
    S_yx: float | None = None
    S_yz: float | None = None
    S_xz: float | None = None
    rho_yx: float | None = None
    rho_yz: float | None = None
    rho_xz: float | None = None

    def __post_init__(self) -> None:
        if not self.N_h >= self.n_h >= 2:
            raise DegenerateInputError(
                f"stratum sizes must satisfy N_h >= n_h >= 2, got {self.N_h}, {self.n_h}"
            )
        for name in ("S_y", "S_x", "S_z"):
            if getattr(self, name) < 0:
                raise DegenerateInputError(f"{name} must be non-negative")
        pairs = (
            ("S_yx", "rho_yx", self.S_y, self.S_x),
            ("S_yz", "rho_yz", self.S_y, self.S_z),
            ("S_xz", "rho_xz", self.S_x, self.S_z),
        )
        for cov_name, rho_name, s1, s2 in pairs:
            cov = getattr(self, cov_name)
            rho = getattr(self, rho_name)
            scale = s1 * s2
            if cov is None and rho is None:
                raise DegenerateInputError(f"need {cov_name} or {rho_name}")
            if rho is None:
                rho = cov / scale if scale > 0 else 0.0
            elif cov is None:
                cov = rho * scale
            elif not _close(cov, rho * scale):
                raise DegenerateInputError(
                    f"{cov_name}={cov} inconsistent with {rho_name}*S*S={rho * scale}"
                )
            if abs(rho) > 1 + 1e-12:
                raise DegenerateInputError(f"|{rho_name}| = {abs(rho)} exceeds 1")
            object.__setattr__(self, cov_name, float(cov))
            object.__setattr__(self, rho_name, float(rho))

    @property
    def f_h(self) -> float:
        """Finite-population factor 1/n_h - 1/N_h."""
        return 1.0 / self.n_h - 1.0 / self.N_h

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "StratumStats":
        return cls(**_pick(cls, d))


@dataclass(frozen=True)
class StratifiedPopulation:
    """A stratified population described by per-stratum summaries."""

    strata: tuple[StratumStats, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "strata", tuple(self.strata))
        if not self.strata:
            raise DegenerateInputError("population needs at least one stratum")

    @property
    def N(self) -> int:
        return sum(s.N_h for s in self.strata)

    @property
    def n(self) -> int:
        return sum(s.n_h for s in self.strata)

    @property
    def weights(self) -> np.ndarray:
        return self.column("N_h") / self.N

    def column(self, name: str) -> np.ndarray:
        """Per-stratum values of attribute ``name`` as a float array."""
        return np.array([getattr(s, name) for s in self.strata], dtype=float)

    @property
    def f(self) -> np.ndarray:
        return np.array([s.f_h for s in self.strata])

    @property
    def mean_y(self) -> float:
        return float(self.weights @ self.column("mean_y"))

    @property
    def mean_x(self) -> float:
        return float(self.weights @ self.column("mean_x"))

    @property
    def mean_z(self) -> float:
        return float(self.weights @ self.column("mean_z"))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "StratifiedPopulation":
        return cls(tuple(StratumStats.from_dict(s) for s in d["strata"]))


@dataclass(frozen=True)
class VMoments:
    """Relative second moments of the sampling errors of (ȳ_st, x̄_st, z̄_st)."""

    V200: float
    V020: float
    V002: float
    V110: float
    V101: float
    V011: float

    def __post_init__(self) -> None:
        for name in ("V200", "V020", "V002"):
            if getattr(self, name) < 0:
                raise DegenerateInputError(f"{name} must be non-negative")

    def cauchy_schwarz_ok(self, rtol: float = 1e-12) -> bool:
        """True when every cross moment is bounded by its two variances."""
        checks = (
            (self.V110, self.V200, self.V020),
            (self.V101, self.V200, self.V002),
            (self.V011, self.V020, self.V002),
        )
        return all(c * c <= a * b * (1 + rtol) + 1e-300 for c, a, b in checks)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)])


def v_moments(pop: StratifiedPopulation) -> VMoments:
    """Relative moments ``V_rst`` of a stratified population.

    Parameters
    ----------
    pop : StratifiedPopulation

    Returns
    -------
    VMoments
        ``V200 = sum(W_h^2 f_h S_yh^2) / Ybar^2`` and the five analogous
        entries for the other variances and covariances.
    """
    Y, X, Z = pop.mean_y, pop.mean_x, pop.mean_z
    if Y == 0 or X == 0 or Z == 0:
        raise DegenerateInputError("degenerate mean: overall mean of y, x or z is zero")
    c = pop.weights**2 * pop.f
    col = pop.column
    return VMoments(
        V200=float(c @ col("S_y") ** 2 / Y**2),
        V020=float(c @ col("S_x") ** 2 / X**2),
        V002=float(c @ col("S_z") ** 2 / Z**2),
        V110=float(c @ col("S_yx") / (Y * X)),
        V101=float(c @ col("S_yz") / (Y * Z)),
        V011=float(c @ col("S_xz") / (X * Z)),
    )


def regression_coefficients(pop: StratifiedPopulation) -> tuple[float, float]:
    """Pooled regression coefficients of y on x and of y on z."""
    c = pop.weights**2 * pop.f
    col = pop.column
    dx = float(c @ col("S_x") ** 2)
    dz = float(c @ col("S_z") ** 2)
    if dx == 0 or dz == 0:
        raise DegenerateInputError("degenerate auxiliary variance")
    b1 = float(c @ (col("rho_yx") * col("S_y") * col("S_x"))) / dx
    b2 = float(c @ (col("rho_yz") * col("S_y") * col("S_z"))) / dz
    return b1, b2


@dataclass(frozen=True)
class SrsSummary:
    """Summary of a y-x pair under simple random sampling without replacement."""

    N: int
    n: int
    mean_y: float
    mean_x: float
    C_y: float
    C_x: float
    rho: float

    def __post_init__(self) -> None:
        if not self.N > self.n >= 2:
            raise DegenerateInputError(f"need N > n >= 2, got N={self.N}, n={self.n}")
        if self.C_y < 0 or self.C_x < 0:
            raise DegenerateInputError("coefficients of variation must be non-negative")
        if abs(self.rho) > 1:
            raise DegenerateInputError("|rho| exceeds 1")

    @property
    def lam(self) -> float:
        """λ = (N - n) / (N n)."""
        return (self.N - self.n) / (self.N * self.n)

    @property
    def h(self) -> float:
        """h = n / (N - n)."""
        return self.n / (self.N - self.n)

    @property
    def f(self) -> float:
        return self.n / self.N

    @property
    def C_yx(self) -> float:
        return self.rho * self.C_y * self.C_x

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SrsSummary":
        return cls(**_pick(cls, d))


@dataclass(frozen=True)
class AttributeSummary:
    """Summary of a study variable y and a binary auxiliary attribute φ."""

    N: int
    n: int
    mean_y: float
    P: float
    C_y: float
    C_p: float
    rho_pb: float
    beta2_phi: float | None = None
    n_prime: int | None = None
    p_prime: float | None = None
    S_phi: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not 0 < self.P < 1:
            raise DegenerateInputError(f"P must lie in (0, 1), got {self.P}")
        if not self.N > self.n >= 1:
            raise DegenerateInputError(f"need N > n, got N={self.N}, n={self.n}")
        if abs(self.rho_pb) > 1:
            raise DegenerateInputError("|rho_pb| exceeds 1")
        if self.n_prime is not None and not self.N > self.n_prime >= self.n:
            raise DegenerateInputError("two-phase sizes must satisfy N > n' >= n")
        if self.S_phi is None:
            object.__setattr__(self, "S_phi", self.C_p * self.P)

    @property
    def f1(self) -> float:
        return 1.0 / self.n - 1.0 / self.N

    @property
    def f2(self) -> float:
        self._need_two_phase()
        return 1.0 / self.n_prime - 1.0 / self.N

    @property
    def f3(self) -> float:
        self._need_two_phase()
        return 1.0 / self.n - 1.0 / self.n_prime

    @property
    def K_p(self) -> float:
        """Ratio-type constant ρ_pb C_y / C_p."""
        return self.rho_pb * self.C_y / self.C_p

    @property
    def has_two_phase(self) -> bool:
        return self.n_prime is not None

    def _need_two_phase(self) -> None:
        if self.n_prime is None:
            raise ConfigurationError("two-phase data required (n_prime missing)")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "AttributeSummary":
        return cls(**_pick(cls, d))


def _pick(cls: type, d: Mapping[str, Any]) -> dict[str, Any]:
    names = {f.name for f in fields(cls)}
    unknown = set(d) - names
    if unknown:
        raise ConfigurationError(f"unknown field(s) for {cls.__name__}: {sorted(unknown)}")
    return {k: v for k, v in d.items() if k in names}


def load_json(source: str | Path | Mapping[str, Any]) -> dict[str, Any]:
    """Read a JSON document from a path, or pass a mapping through."""
    if isinstance(source, Mapping):
        return dict(source)
    return json.loads(Path(source).read_text())


def relative_error(value: float, reference: float) -> float:
    if reference == 0:
        return math.inf if value != 0 else 0.0
    return abs(value - reference) / abs(reference)


def pre(baseline_mse: float, mse: float) -> float:
    """Percent relative efficiency 100 * baseline / mse (inf when mse is 0)."""
    if mse == 0:
        return math.inf
    return 100.0 * baseline_mse / mse


def as_sequence(x: Sequence[float] | np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=float)
