"""Kantorovich-Choquet operator families: Bernstein, Szasz-Mirakjan, Baskakov.

Each operator averages per-cell Choquet means of the input function against a
classical nonnegative weight system (binomial, Poisson, negative binomial).
Capacities are normalized per cell, ``nu_cell(A) = u(length(A & cell) /
length(cell))``, so every denominator in the cell-mean ratio equals one; it is
still divided out explicitly as a cross-check.  Weights are computed by ratio
recurrences anchored at the modal term in log space, which stays stable for
degrees up to 1e4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .capacity import Distortion, IntervalCapacity
from .choquet import SampledFunction, choquet_integral
from .errors import DomainError, PreconditionError, WindowError

__all__ = [
    "FAMILIES",
    "Truncation",
    "TruncationReport",
    "OperatorSpec",
    "CellMean",
    "cell_mean",
    "bernstein_kc",
    "szasz_kc",
    "baskakov_kc",
    "eval_grid",
    "binomial_weights",
    "poisson_weights",
    "negative_binomial_weights",
]

FAMILIES = ("bernstein", "szasz", "baskakov")

DEFAULT_SAMPLES_PER_CELL = 64


@dataclass(frozen=True)
class Truncation:
    """Tail policy for the infinite Szasz/Baskakov sums."""

    tail_tol: float = 1e-12
    max_extra_terms: int = 512

    def __post_init__(self):
        if not (0.0 < self.tail_tol <= 1e-3):
            raise PreconditionError("tail_tol must lie in (0, 1e-3]")
        if self.max_extra_terms < 0:
            raise PreconditionError("max_extra_terms must be nonnegative")


@dataclass(frozen=True)
class TruncationReport:
    terms: int
    retained_mass: float
    tail_bound: float

    def to_dict(self) -> dict:
        return {
            "terms": self.terms,
            "retained_mass": self.retained_mass,
            "tail_bound": self.tail_bound,
        }


@dataclass(frozen=True)
class OperatorSpec:
    """A fully determined pointwise operator: family, degree, capacity, tail."""

    family: str
    degree: int
    distortion: Distortion
    truncation: Truncation = field(default_factory=Truncation)
    window: tuple[float, float] = (0.0, 1.0)
    samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise PreconditionError(f"unknown family {self.family!r}; pick one of {FAMILIES}")
        if self.degree < 1:
            raise PreconditionError("degree must be at least 1")
        if self.samples_per_cell < 32:
            raise PreconditionError("need at least 32 samples per cell")
        object.__setattr__(self, "window", (float(self.window[0]), float(self.window[1])))


@dataclass(frozen=True)
class CellMean:
    """Normalized Choquet mean of the input over one operator cell."""

    index: int
    cell: tuple[float, float]
    value: float


# ---------------------------------------------------------------------------
# Weight systems
# ---------------------------------------------------------------------------


def _anchored_weights(kmax: int, mode: int, log_mode: float, up_ratio, down_ratio) -> np.ndarray:
    """Fill weights 0..kmax outward from an anchor value at the modal index."""
    w = np.zeros(kmax + 1)
    mode = min(max(mode, 0), kmax)
    w[mode] = math.exp(log_mode)
    for k in range(mode, kmax):
        w[k + 1] = w[k] * up_ratio(k)
    for k in range(mode, 0, -1):
        w[k - 1] = w[k] * down_ratio(k)
    return w


def binomial_weights(n: int, x: float) -> np.ndarray:
    """Bernstein weights C(n, k) x^k (1-x)^(n-k) for k = 0..n."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    w = np.zeros(n + 1)
    if x == 0.0:
        w[0] = 1.0
        return w
    if x == 1.0:
        w[n] = 1.0
        return w
    mode = int((n + 1) * x)
    log_mode = (
        math.lgamma(n + 1)
        - math.lgamma(mode + 1)
        - math.lgamma(n - mode + 1)
        + mode * math.log(x)
        + (n - mode) * math.log1p(-x)
    )
    odds = x / (1.0 - x)
    return _anchored_weights(
        n,
        mode,
        log_mode,
        lambda k: (n - k) / (k + 1.0) * odds,
        lambda k: k / (n - k + 1.0) / odds,
    )


def poisson_weights(lam: float, kmax: int) -> np.ndarray:
    """Poisson weights e^-lam lam^k / k! for k = 0..kmax."""
    if lam < 0:
        raise DomainError("Poisson rate must be nonnegative")
    if lam == 0.0:
        w = np.zeros(kmax + 1)
        w[0] = 1.0
        return w
    mode = int(lam)
    log_mode = -lam + min(mode, kmax) * math.log(lam) - math.lgamma(min(mode, kmax) + 1)
    return _anchored_weights(
        kmax,
        mode,
        log_mode,
        lambda k: lam / (k + 1.0),
        lambda k: k / lam,
    )


def negative_binomial_weights(n: int, x: float, kmax: int) -> np.ndarray:
    """Baskakov weights C(n+k-1, k) x^k / (1+x)^(n+k) for k = 0..kmax."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    if x == 0.0:
        w = np.zeros(kmax + 1)
        w[0] = 1.0
        return w
    p = x / (1.0 + x)
    mode = min(max(int((n - 1) * x), 0), kmax)
    log_mode = (
        math.lgamma(n + mode)
        - math.lgamma(mode + 1)
        - math.lgamma(n)
        + mode * math.log(p)
        - n * math.log1p(x)
    )
    return _anchored_weights(
        kmax,
        mode,
        log_mode,
        lambda k: (n + k) / (k + 1.0) * p,
        lambda k: k / (n + k - 1.0) / p,
    )


# ---------------------------------------------------------------------------
# Cell means
# ---------------------------------------------------------------------------


def cell_mean(f: SampledFunction, distortion: Distortion, cell: tuple[float, float]) -> float:
    """Choquet mean of a sampled function over one cell.

    The cell carries its own normalized capacity, so the denominator is one
    by construction; it is computed anyway so the identity-distortion case
    cross-checks the classical mean.
    """
    lo, hi = float(cell[0]), float(cell[1])
    cap = IntervalCapacity((lo, hi), distortion)
    numerator = choquet_integral(f, cap, region=(lo, hi))
    return numerator / float(cap.measure_length(hi - lo))


def _mean_from_callable(
    fn: Callable[[float], float],
    distortion: Distortion,
    cell: tuple[float, float],
    samples_per_cell: int,
) -> float:
    sampled = SampledFunction.from_callable(fn, cell, samples_per_cell)
    return cell_mean(sampled, distortion, cell)


class _CellMeanTable:
    """Lazily grown table of per-cell means for one (function, layout)."""

    def __init__(self, fn, distortion, cell_width: float, samples_per_cell: int):
        self.fn = fn
        self.distortion = distortion
        self.cell_width = cell_width
        self.samples_per_cell = samples_per_cell
        self._means: dict[int, float] = {}

    def cell(self, k: int) -> tuple[float, float]:
        return (k * self.cell_width, (k + 1) * self.cell_width)

    def mean(self, k: int) -> float:
        if k not in self._means:
            self._means[k] = _mean_from_callable(
                self.fn, self.distortion, self.cell(k), self.samples_per_cell
            )
        return self._means[k]

    def means(self, kmax: int) -> np.ndarray:
        return np.array([self.mean(k) for k in range(kmax + 1)])


def bernstein_kc(
    fn: Callable[[float], float],
    n: int,
    distortion: Distortion,
    x: float,
    samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL,
) -> float:
    """Bernstein-Kantorovich-Choquet operator at a point of [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    table = _CellMeanTable(fn, distortion, 1.0 / (n + 1), samples_per_cell)
    return float(np.dot(binomial_weights(n, x), table.means(n)))


def _truncation_index(n: int, x: float, family: str, truncation: Truncation):
    """Smallest retained index per the mean + 10 sigma rule, then the tail test."""
    mean = n * x
    variance = mean + 1.0 if family == "szasz" else mean * (1.0 + x) + 1.0
    k_rule = int(math.ceil(mean + 10.0 * math.sqrt(variance)))
    k_hard = k_rule + truncation.max_extra_terms
    if family == "szasz":
        weights = poisson_weights(mean, k_hard)
    else:
        weights = negative_binomial_weights(n, x, k_hard)
    retained = np.cumsum(weights)
    k = k_rule
    while k < k_hard and 1.0 - retained[k] >= truncation.tail_tol:
        k += 1
    # Trailing zero-probability terms contribute exactly nothing; dropping
    # them keeps the window requirement tied to terms that are actually used.
    nonzero = np.flatnonzero(weights[: k + 1] > 0.0)
    k_eff = int(nonzero[-1]) if nonzero.size else 0
    return k_eff, weights[: k_eff + 1], float(retained[k_eff])


def _poisson_family_eval(
    family: str,
    fn: Callable[[float], float],
    n: int,
    distortion: Distortion,
    x: float,
    truncation: Truncation,
    window: tuple[float, float],
    samples_per_cell: int,
    table: _CellMeanTable | None = None,
) -> tuple[float, TruncationReport]:
    if x < 0:
        raise DomainError(f"x={x} must be nonnegative")
    lo, hi = float(window[0]), float(window[1])
    if lo > 1e-12:
        raise DomainError("window must start at 0")
    k_eff, weights, retained = _truncation_index(n, x, family, truncation)
    required_b = (k_eff + 1) / n
    if hi < required_b - 1e-12:
        raise WindowError(
            f"window [0, {hi:g}] too small: {k_eff + 1} cells of width 1/{n} "
            f"need B >= {required_b:g}",
            required_b=required_b,
        )
    if table is None:
        table = _CellMeanTable(fn, distortion, 1.0 / n, samples_per_cell)
    means = table.means(k_eff)
    value = float(np.dot(weights, means))
    report = TruncationReport(
        terms=k_eff + 1, retained_mass=retained, tail_bound=max(0.0, 1.0 - retained)
    )
    return value, report


def szasz_kc(
    fn: Callable[[float], float],
    n: int,
    distortion: Distortion,
    x: float,
    truncation: Truncation = Truncation(),
    window: tuple[float, float] = (0.0, 4.0),
    samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL,
) -> tuple[float, TruncationReport]:
    """Szasz-Mirakjan-Kantorovich-Choquet operator at a point of [0, inf)."""
    return _poisson_family_eval(
        "szasz", fn, n, distortion, x, truncation, window, samples_per_cell
    )


def baskakov_kc(
    fn: Callable[[float], float],
    n: int,
    distortion: Distortion,
    x: float,
    truncation: Truncation = Truncation(),
    window: tuple[float, float] = (0.0, 4.0),
    samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL,
) -> tuple[float, TruncationReport]:
    """Baskakov-Kantorovich-Choquet operator at a point of [0, inf)."""
    return _poisson_family_eval(
        "baskakov", fn, n, distortion, x, truncation, window, samples_per_cell
    )


def operator_value(
    spec: OperatorSpec, fn: Callable[[float], float], x: float, table=None
) -> float:
    """Pointwise operator value, discarding any truncation report."""
    if spec.family == "bernstein":
        if table is not None:
            if not 0.0 <= x <= 1.0:
                raise DomainError(f"x={x} outside [0, 1]")
            return float(np.dot(binomial_weights(spec.degree, x), table.means(spec.degree)))
        return bernstein_kc(fn, spec.degree, spec.distortion, x, spec.samples_per_cell)
    value, _ = _poisson_family_eval(
        spec.family,
        fn,
        spec.degree,
        spec.distortion,
        x,
        spec.truncation,
        spec.window,
        spec.samples_per_cell,
        table=table,
    )
    return value


def make_cell_table(spec: OperatorSpec, fn: Callable[[float], float]) -> _CellMeanTable:
    width = 1.0 / (spec.degree + 1) if spec.family == "bernstein" else 1.0 / spec.degree
    return _CellMeanTable(fn, spec.distortion, width, spec.samples_per_cell)


def cell_mean_records(
    spec: OperatorSpec, fn: Callable[[float], float], kmax: int | None = None
) -> tuple[CellMean, ...]:
    """Materialize the per-cell means the operator averages, for inspection."""
    table = make_cell_table(spec, fn)
    if kmax is None:
        kmax = spec.degree if spec.family == "bernstein" else spec.degree - 1
    return tuple(CellMean(k, table.cell(k), table.mean(k)) for k in range(kmax + 1))


def eval_grid(spec: OperatorSpec, fn: Callable[[float], float], xs: Sequence[float]) -> list[float]:
    """Evaluate the operator on a list of points, reusing cell means.

    Pointwise errors are re-raised with the offending index attached.
    """
    table = make_cell_table(spec, fn)
    out: list[float] = []
    for i, x in enumerate(xs):
        try:
            out.append(operator_value(spec, fn, float(x), table=table))
        except WindowError as exc:
            raise WindowError(f"point {i} (x={x}): {exc}", exc.required_b) from exc
        except DomainError as exc:
            raise DomainError(f"point {i} (x={x}): {exc}") from exc
    return out
