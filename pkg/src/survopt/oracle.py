"""Independent numeric oracles.

* synthetic finite populations matched to summary statistics, with
  Monte-Carlo or exhaustive SRSWOR evaluation of estimators;
* adaptive Simpson quadrature, exhaustive grid minimisation and finite
  differences for the inventory models.

None of these routines uses an MSE or cost formula from the estimator and
inventory modules; they evaluate the defining expressions directly.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateInputError
from .stats import AttributeSummary, SrsSummary, StratumStats

ENUMERATION_LIMIT = 10**6
RHO_TOL = 0.02
RHO_HEADROOM = 0.95


# ---------------------------------------------------------------- quadrature


def _finite(f: Callable[[float], float], x: float) -> float:
    y = float(f(x))
    if not math.isfinite(y):
        raise DegenerateInputError(f"non-finite integrand value {y} at x={x}")
    return y


def quadrature(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10, max_depth: int = 60
) -> float:
    """Adaptive Simpson integral of f over [lo, hi] to absolute tolerance tol."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DegenerateInputError("quadrature bounds must be finite")
    if lo == hi:
        return 0.0
    sign = 1.0
    if hi < lo:
        lo, hi, sign = hi, lo, -1.0
    fa, fm, fb = _finite(f, lo), _finite(f, 0.5 * (lo + hi)), _finite(f, hi)
    whole = (hi - lo) * (fa + 4 * fm + fb) / 6

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = _finite(f, lm), _finite(f, rm)
        left = (m - a) * (fa + 4 * flm + fm) / 6
        right = (b - m) * (fm + 4 * frm + fb) / 6
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * tol:
            return left + right + delta / 15
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2, depth - 1
        )

    return sign * recurse(lo, hi, fa, fm, fb, whole, tol, max_depth)


# ------------------------------------------------------------------ grid scan


def grid_points(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid lo, lo + step, ..., up to hi (integer-indexed, no drift)."""
    if step <= 0:
        raise DegenerateInputError("grid step must be positive")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def grid_min(
    f: Callable[..., np.ndarray],
    bounds: Sequence[tuple[float, float]],
    steps: Sequence[float],
    chunk: int = 2_000_000,
) -> tuple[tuple[float, ...], float]:
    """Exhaustive minimum of a vectorised f over a 1-D or 2-D grid.

    ``f`` receives arrays (one per axis, broadcast against each other) and
    returns an array of values. The first axis is processed in chunks.
    """
    axes = [grid_points(lo, hi, st) for (lo, hi), st in zip(bounds, steps)]
    if len(axes) == 1:
        vals = np.asarray(f(axes[0]), dtype=float)
        _check_grid(vals, axes)
        i = int(np.argmin(vals))
        return (float(axes[0][i]),), float(vals[i])
    if len(axes) != 2:
        raise DegenerateInputError("grid_min supports one or two axes")
    xs, ys = axes
    rows = max(1, chunk // len(ys))
    best = (math.nan, math.nan, math.inf)
    for start in range(0, len(xs), rows):
        xc = xs[start : start + rows, None]
        vals = np.asarray(f(xc, ys[None, :]), dtype=float)
        _check_grid(vals, (xc[:, 0], ys))
        i = int(np.argmin(vals))
        r, c = divmod(i, vals.shape[1])
        if vals[r, c] < best[2]:
            best = (float(xc[r, 0]), float(ys[c]), float(vals[r, c]))
    return (best[0], best[1]), best[2]


def _check_grid(vals: np.ndarray, axes) -> None:
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = np.argwhere(bad)[0]
        where = tuple(float(ax[i]) for ax, i in zip(axes, idx))
        raise DegenerateInputError(f"non-finite objective value at {where}")


def fd_derivative(f: Callable[[float], float], x: float, h: float = 1e-6) -> float:
    return (f(x + h) - f(x - h)) / (2 * h)


def fd_second(f: Callable[[float], float], x: float, h: float = 1e-4) -> float:
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)


# -------------------------------------------------------- population synthesis


@dataclass(frozen=True)
class SyntheticPopulation:
    """A finite population; ``phi`` is set in attribute mode, ``z`` in three-variable mode."""

    y: np.ndarray
    x: np.ndarray | None = None
    z: np.ndarray | None = None
    phi: np.ndarray | None = None
    seed: int = 0
    achieved: SrsSummary | AttributeSummary | StratumStats | None = None
    report: dict[str, tuple[float, float]] = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.y)

    @property
    def aux(self) -> np.ndarray:
        """The auxiliary vector: x in continuous mode, phi in attribute mode."""
        return self.phi if self.phi is not None else self.x


def _cv(v: np.ndarray) -> float:
    return float(v.std(ddof=1) / v.mean())


def _corr(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.corrcoef(u, v)[0, 1])


def _whitened_normals(rng: np.random.Generator, N: int, p: int) -> np.ndarray:
    """N x p standard normals with exactly zero sample mean and identity covariance."""
    Z = rng.standard_normal((N, p))
    Z -= Z.mean(axis=0)
    L = np.linalg.cholesky(np.cov(Z, rowvar=False).reshape(p, p))
    return Z @ np.linalg.inv(L).T


def _marginal(z: np.ndarray, mean: float, cv: float) -> np.ndarray:
    """Map whitened normals to values with exactly the given mean and CV.

    CV <= 1 uses a normal marginal. Larger CV uses a lognormal marginal
    whose log-scale is bisected until the finite-population CV matches.
    """
    if cv <= 1:
        return mean * (1 + cv * z)

    def cv_at(sig: float) -> float:
        return _cv(np.exp(sig * z))

    lo, hi = 1e-6, 1.0
    while cv_at(hi) < cv:
        hi *= 2
        if hi > 64:
            raise DegenerateInputError(f"CV {cv} unreachable with N={len(z)}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cv_at(mid) < cv:
            lo = mid
        else:
            hi = mid
    v = np.exp(0.5 * (lo + hi) * z)
    return v * (mean / v.mean())


def _match_rho(target: float, build: Callable[[float], float]) -> float:
    """Latent correlation r such that build(r) (the achieved correlation) equals target."""
    if target == 0:
        return 0.0
    lo, hi = (0.0, 0.999) if target > 0 else (-0.999, 0.0)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if build(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def generate_population(
    targets: SrsSummary | AttributeSummary | StratumStats, seed: int
) -> SyntheticPopulation:
    """Synthesise a population whose summary statistics match ``targets``.

    Continuous variables come from a Gaussian copula; the attribute is the
    indicator of the top ``round(N P)`` values of a latent normal. The latent
    correlation is bisected so the achieved correlation hits the target.
    """
    rng = np.random.default_rng(seed)
    if isinstance(targets, SrsSummary):
        return _generate_pair(targets, rng, seed)
    if isinstance(targets, AttributeSummary):
        return _generate_attribute(targets, rng, seed)
    if isinstance(targets, StratumStats):
        return _generate_triple(targets, rng, seed)
    raise DegenerateInputError(f"unsupported target type {type(targets).__name__}")


def _check_headroom(*rhos: float) -> None:
    for r in rhos:
        if abs(r) > RHO_HEADROOM:
            raise DegenerateInputError(f"|rho|={abs(r)} exceeds generator headroom {RHO_HEADROOM}")


def _check_achieved(report: dict[str, tuple[float, float]]) -> None:
    for name, (target, got) in report.items():
        if name.startswith("rho") and abs(target - got) > RHO_TOL:
            raise DegenerateInputError(f"achieved {name}={got:.4f} misses target {target:.4f}")


def _generate_pair(t: SrsSummary, rng: np.random.Generator, seed: int) -> SyntheticPopulation:
    _check_headroom(t.rho)
    Z = _whitened_normals(rng, t.N, 2)

    def build(r: float) -> tuple[np.ndarray, np.ndarray]:
        zx = Z[:, 0]
        zy = r * zx + math.sqrt(1 - r * r) * Z[:, 1]
        return _marginal(zy, t.mean_y, t.C_y), _marginal(zx, t.mean_x, t.C_x)

    r = _match_rho(t.rho, lambda r: _corr(*build(r)))
    y, x = build(r)
    got = SrsSummary(t.N, t.n, float(y.mean()), float(x.mean()), _cv(y), _cv(x), _corr(y, x))
    report = {
        "mean_y": (t.mean_y, got.mean_y), "mean_x": (t.mean_x, got.mean_x),
        "C_y": (t.C_y, got.C_y), "C_x": (t.C_x, got.C_x), "rho": (t.rho, got.rho),
    }
    _check_achieved(report)
    return SyntheticPopulation(y=y, x=x, seed=seed, achieved=got, report=report)


def _generate_attribute(t: AttributeSummary, rng: np.random.Generator, seed: int) -> SyntheticPopulation:
    _check_headroom(t.rho_pb)
    ones = int(round(t.N * t.P))
    if not 0 < ones < t.N:
        raise DegenerateInputError("N P must round to a count strictly between 0 and N")
    Z = _whitened_normals(rng, t.N, 2)

    def build(r: float) -> tuple[np.ndarray, np.ndarray]:
        zp = Z[:, 0]
        zy = r * zp + math.sqrt(1 - r * r) * Z[:, 1]
        phi = np.zeros(t.N)
        phi[np.argsort(zp, kind="stable")[t.N - ones :]] = 1.0
        return _marginal(zy, t.mean_y, t.C_y), phi

    r = _match_rho(t.rho_pb, lambda r: _corr(*build(r)))
    y, phi = build(r)
    P = float(phi.mean())
    got = AttributeSummary(
        t.N, t.n, float(y.mean()), P, _cv(y), _cv(phi), _corr(y, phi),
        n_prime=t.n_prime, p_prime=t.p_prime,
    )
    report = {"mean_y": (t.mean_y, got.mean_y), "P": (t.P, P), "C_y": (t.C_y, got.C_y),
              "rho_pb": (t.rho_pb, got.rho_pb)}
    _check_achieved(report)
    return SyntheticPopulation(y=y, phi=phi, seed=seed, achieved=got, report=report)


def _generate_triple(t: StratumStats, rng: np.random.Generator, seed: int) -> SyntheticPopulation:
    _check_headroom(t.rho_yx, t.rho_yz, t.rho_xz)
    C = np.array([[1, t.rho_yx, t.rho_yz], [t.rho_yx, 1, t.rho_xz], [t.rho_yz, t.rho_xz, 1]])
    if np.linalg.eigvalsh(C).min() <= 0:
        raise DegenerateInputError("target correlation matrix is not positive definite")
    Z = _whitened_normals(rng, t.N_h, 3) @ np.linalg.cholesky(C).T
    cvs = (t.S_y / t.mean_y, t.S_x / t.mean_x, t.S_z / t.mean_z)
    if max(cvs) > 1:
        raise DegenerateInputError("three-variable mode supports CV <= 1 only")
    y = t.mean_y + t.S_y * Z[:, 0]
    x = t.mean_x + t.S_x * Z[:, 1]
    z = t.mean_z + t.S_z * Z[:, 2]
    got = StratumStats(
        t.N_h, t.n_h, float(y.mean()), float(x.mean()), float(z.mean()),
        float(y.std(ddof=1)), float(x.std(ddof=1)), float(z.std(ddof=1)),
        rho_yx=_corr(y, x), rho_yz=_corr(y, z), rho_xz=_corr(x, z),
    )
    report = {
        "rho_yx": (t.rho_yx, got.rho_yx), "rho_yz": (t.rho_yz, got.rho_yz),
        "rho_xz": (t.rho_xz, got.rho_xz),
    }
    _check_achieved(report)
    return SyntheticPopulation(y=y, x=x, z=z, seed=seed, achieved=got, report=report)


# ------------------------------------------------------------------ estimators


@dataclass(frozen=True)
class SampleEstimator:
    """A mean estimator evaluated on sample means.

    ``kind`` is one of ``mean``, ``ratio``, ``product``, ``exp-ratio``,
    ``exp-product`` or ``family``. The family form is
    ``ybar * [(a X + b) / (alpha (a xbar + b) + (1 - alpha)(a X + b))]^g``.
    """

    kind: str
    a_coef: float = 1.0
    b_coef: float = 0.0
    alpha: float = 1.0
    g: float = 1.0

    def __call__(self, ybar: np.ndarray, xbar: np.ndarray, X: float) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.kind == "mean":
                return ybar
            if self.kind == "ratio":
                return ybar * X / xbar
            if self.kind == "product":
                return ybar * xbar / X
            if self.kind == "exp-ratio":
                return ybar * np.exp((X - xbar) / (X + xbar))
            if self.kind == "exp-product":
                return ybar * np.exp((xbar - X) / (X + xbar))
            if self.kind == "family":
                top = self.a_coef * X + self.b_coef
                den = self.alpha * (self.a_coef * xbar + self.b_coef) + (1 - self.alpha) * top
                return ybar * (top / den) ** self.g
        raise DegenerateInputError(f"unknown estimator kind {self.kind!r}")


@dataclass(frozen=True)
class MonteCarloResult:
    mse: float
    bias: float
    mc_stderr: float
    replicates: int
    degenerate: int
    mode: str


def _samples(N: int, n: int, replicates: int, rng: np.random.Generator, chunk: int):
    done = 0
    while done < replicates:
        size = min(chunk, replicates - done)
        keys = rng.random((size, N))
        yield np.argpartition(keys, n - 1, axis=1)[:, :n]
        done += size


def empirical_mse(
    pop: SyntheticPopulation,
    estimator: SampleEstimator,
    n: int,
    replicates: int = 100_000,
    seed: int = 0,
    mode: str = "auto",
    chunk: int = 10_000,
) -> MonteCarloResult:
    """Empirical MSE, bias and Monte-Carlo standard error of ``estimator``.

    ``mode="auto"`` enumerates every sample when C(N, n) <= 10^6 and
    otherwise draws ``replicates`` SRSWOR samples. Draws on which the
    estimator is undefined are excluded and counted; more than 0.1% of
    such draws is an error.
    """
    N = pop.N
    if not 1 <= n < N:
        raise DegenerateInputError("need 1 <= n < N")
    aux = pop.aux if pop.aux is not None else np.ones(N)
    Y, X = float(pop.y.mean()), float(aux.mean())
    total = math.comb(N, n)
    if mode == "auto":
        mode = "enumeration" if total <= ENUMERATION_LIMIT else "monte-carlo"
    if mode == "enumeration":
        if total > ENUMERATION_LIMIT:
            raise DegenerateInputError(f"C({N},{n})={total} too large to enumerate")
        idx = np.array(list(itertools.combinations(range(N), n)), dtype=np.int64)
        batches = [idx]
    elif mode == "monte-carlo":
        if replicates < 10_000:
            raise DegenerateInputError("Monte-Carlo mode needs at least 10^4 replicates")
        batches = _samples(N, n, replicates, np.random.default_rng(seed), chunk)
    else:
        raise DegenerateInputError(f"unknown mode {mode!r}")
    errs = []
    for b in batches:
        est = estimator(pop.y[b].mean(axis=1), aux[b].mean(axis=1), X)
        errs.append(est - Y)
    e = np.concatenate(errs)
    ok = np.isfinite(e)
    bad = int((~ok).sum())
    if bad:
        if bad > 0.001 * len(e):
            raise DegenerateInputError(f"estimator undefined on {bad} of {len(e)} draws")
        warnings.warn(f"{bad} degenerate draws excluded", RuntimeWarning, stacklevel=2)
    e = e[ok]
    sq = e * e
    stderr = 0.0 if mode == "enumeration" else float(sq.std(ddof=1) / math.sqrt(len(sq)))
    return MonteCarloResult(float(sq.mean()), float(e.mean()), stderr, len(e), bad, mode)


def finite_population_variance(y: np.ndarray, n: int) -> float:
    """Exact variance of the SRSWOR sample mean, (1/n - 1/N) S_y^2."""
    N = len(y)
    return (1 / n - 1 / N) * float(np.var(y, ddof=1))
