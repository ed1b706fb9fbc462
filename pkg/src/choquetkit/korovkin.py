"""Quantitative error bounds and convergence tables for the operator families.

The central estimate bounds |K_n(f)(x) - f(x)| by (c + 1) * omega(f; delta)
for nonnegative f, where c dominates the capacity by its dual
(nu <= c * dual(nu)), omega is the modulus of continuity, and delta is the
square root of the operator's centered second moment assembled from the test
functions -t and t^2.  Convergence tables record sup-errors over an x-grid as
the degree grows.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

from .capacity import Distortion
from .choquet import SampledFunction
from .errors import PreconditionError
from .operators import (
    OperatorSpec,
    Truncation,
    make_cell_table,
    operator_value,
)
from .reporting import SCHEMA_VERSION

__all__ = [
    "BoundRow",
    "KorovkinReport",
    "ConvergenceTable",
    "modulus_of_continuity",
    "smoothing_radicand",
    "smoothing_radius",
    "centered_abs_mean",
    "korovkin_bound_report",
    "convergence_table",
    "KOROVKIN_CSV_HEADER",
]

KOROVKIN_CSV_HEADER = "family,distortion,c,n,x,fx,knfx,abs_error,delta,bound,holds"


def modulus_of_continuity(f: SampledFunction, delta: float) -> float:
    """Largest oscillation of f over node pairs at distance <= delta.

    The distance is rounded up to a whole number of grid cells, so the result
    is conservative for the underlying function.  Sliding-window extremes are
    maintained with monotone deques, O(M) total.
    """
    if delta < 0:
        raise PreconditionError("delta must be nonnegative")
    v = f.values
    span = int(math.ceil(delta / f.step - 1e-12))
    if span <= 0:
        return 0.0
    span = min(span, f.size)
    window = span + 1  # nodes per window
    max_q: deque[int] = deque()
    min_q: deque[int] = deque()
    omega = 0.0
    for i in range(v.size):
        while max_q and v[max_q[-1]] <= v[i]:
            max_q.pop()
        max_q.append(i)
        while min_q and v[min_q[-1]] >= v[i]:
            min_q.pop()
        min_q.append(i)
        if max_q[0] <= i - window:
            max_q.popleft()
        if min_q[0] <= i - window:
            min_q.popleft()
        if i >= window - 1:
            omega = max(omega, float(v[max_q[0]] - v[min_q[0]]))
    return omega


def _spec(family: str, n: int, distortion: Distortion, window, truncation, samples) -> OperatorSpec:
    return OperatorSpec(
        family=family,
        degree=n,
        distortion=distortion,
        truncation=truncation,
        window=window,
        samples_per_cell=samples,
    )


def smoothing_radicand(
    distortion: Distortion,
    n: int,
    x: float,
    family: str = "bernstein",
    window: tuple[float, float] = (0.0, 1.0),
    truncation: Truncation = Truncation(),
    samples_per_cell: int = 64,
    _tables=None,
) -> float:
    """x^2 + 2x K_n(-t)(x) + K_n(t^2)(x), nonnegative up to float error."""
    spec = _spec(family, n, distortion, window, truncation, samples_per_cell)
    if _tables is None:
        neg_t = make_cell_table(spec, lambda t: -t)
        t_sq = make_cell_table(spec, lambda t: t * t)
    else:
        neg_t, t_sq = _tables
    k_neg = operator_value(spec, lambda t: -t, x, table=neg_t)
    k_sq = operator_value(spec, lambda t: t * t, x, table=t_sq)
    return x * x + 2.0 * x * k_neg + k_sq


def smoothing_radius(
    distortion: Distortion,
    n: int,
    x: float,
    family: str = "bernstein",
    window: tuple[float, float] = (0.0, 1.0),
    truncation: Truncation = Truncation(),
    samples_per_cell: int = 64,
    _tables=None,
) -> float:
    """Square root of the centered second moment; clamped at zero because the
    radicand is nonnegative in exact arithmetic."""
    radicand = smoothing_radicand(
        distortion, n, x, family, window, truncation, samples_per_cell, _tables
    )
    return math.sqrt(max(0.0, radicand))


def centered_abs_mean(
    distortion: Distortion,
    n: int,
    x: float,
    family: str = "bernstein",
    window: tuple[float, float] = (0.0, 1.0),
    truncation: Truncation = Truncation(),
    samples_per_cell: int = 64,
) -> float:
    """|K_n(-|t - x|)(x)|, a diagnostic alternative to the radius above.

    Rebuilds cell means per x, so it is markedly slower; it takes no part in
    any asserted bound.
    """
    spec = _spec(family, n, distortion, window, truncation, samples_per_cell)
    return abs(operator_value(spec, lambda t: -abs(t - x), x))


@dataclass(frozen=True)
class BoundRow:
    n: int
    x: float
    fx: float
    knfx: float
    abs_error: float
    delta: float
    bound: float
    holds: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "x": self.x,
            "fx": self.fx,
            "knfx": self.knfx,
            "abs_error": self.abs_error,
            "delta": self.delta,
            "bound": self.bound,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class KorovkinReport:
    family: str
    distortion: str
    c: float
    grid_size: int
    rows: tuple[BoundRow, ...]

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def violations(self) -> int:
        return sum(1 for r in self.rows if not r.holds)

    @property
    def all_hold(self) -> bool:
        return self.violations == 0

    @property
    def max_utilization(self) -> float:
        """Largest abs_error / bound over rows with a positive bound."""
        ratios = [r.abs_error / r.bound for r in self.rows if r.bound > 0]
        return max(ratios) if ratios else 0.0

    def to_csv(self) -> str:
        lines = [KOROVKIN_CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{self.family},{self.distortion},{self.c!r},{r.n},{r.x!r},{r.fx!r},"
                f"{r.knfx!r},{r.abs_error!r},{r.delta!r},{r.bound!r},"
                f"{'true' if r.holds else 'false'}"
            )
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "family": self.family,
            "distortion": self.distortion,
            "c": self.c,
            "rows": self.total,
            "violations": self.violations,
            "max_slack_utilization": self.max_utilization,
        }

    def to_dict(self) -> dict:
        return {**self.summary(), "detail": [r.to_dict() for r in self.rows]}


def korovkin_bound_report(
    fn: Callable[[float], float],
    distortion: Distortion,
    c: float,
    ns: Sequence[int],
    xs: Sequence[float],
    family: str = "bernstein",
    window: tuple[float, float] = (0.0, 1.0),
    grid_size: int = 1024,
    samples_per_cell: int = 64,
    truncation: Truncation = Truncation(),
    tol: float = 1e-8,
) -> KorovkinReport:
    """Check |K_n(f)(x) - f(x)| <= (c + 1) * omega(f; delta(n, x)) rowwise.

    Requires a nonnegative f on the window and c >= 1; rows are emitted in
    (n, x) order with per-row pass flags rather than a single verdict, so a
    questionable constant is observable instead of silently adjudicated.
    """
    if c < 1.0:
        raise PreconditionError("c must be at least 1")
    sampled = SampledFunction.from_callable(fn, window, grid_size)
    if float(sampled.values.min()) < 0:
        raise PreconditionError(
            "the quantitative bound is stated for nonnegative functions; "
            f"min sample is {sampled.values.min()}"
        )
    rows: list[BoundRow] = []
    for n in sorted(set(int(v) for v in ns)):
        spec = _spec(family, n, distortion, window, truncation, samples_per_cell)
        f_table = make_cell_table(spec, fn)
        tables = (
            make_cell_table(spec, lambda t: -t),
            make_cell_table(spec, lambda t: t * t),
        )
        for x in sorted(float(v) for v in xs):
            knfx = operator_value(spec, fn, x, table=f_table)
            fx = float(fn(x))
            delta = smoothing_radius(
                distortion, n, x, family, window, truncation, samples_per_cell, tables
            )
            omega = modulus_of_continuity(sampled, delta)
            bound = (c + 1.0) * omega
            abs_error = abs(knfx - fx)
            rows.append(
                BoundRow(n, x, fx, knfx, abs_error, delta, bound, abs_error <= bound + tol)
            )
    return KorovkinReport(
        family=family,
        distortion=distortion.spec,
        c=float(c),
        grid_size=grid_size,
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class ConvergenceTable:
    family: str
    distortion: str
    ns: tuple[int, ...]
    sup_errors: tuple[float, ...]
    decreasing: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "distortion": self.distortion,
            "ns": list(self.ns),
            "sup_errors": list(self.sup_errors),
            "decreasing": self.decreasing,
        }


def convergence_table(
    fn: Callable[[float], float],
    family: str,
    distortion: Distortion,
    ns: Sequence[int],
    xs: Sequence[float],
    window: tuple[float, float] = (0.0, 1.0),
    samples_per_cell: int = 64,
    truncation: Truncation = Truncation(),
) -> ConvergenceTable:
    """Sup-error over the x-grid per degree, with a decreasing-trend flag.

    The flag compares the sup-error at the largest degree against the one at
    the smallest.
    """
    ns_sorted = tuple(sorted(set(int(v) for v in ns)))
    if not ns_sorted:
        raise PreconditionError("need at least one degree")
    sups: list[float] = []
    for n in ns_sorted:
        spec = _spec(family, n, distortion, window, truncation, samples_per_cell)
        table = make_cell_table(spec, fn)
        sup = 0.0
        for x in xs:
            value = operator_value(spec, fn, float(x), table=table)
            sup = max(sup, abs(value - float(fn(float(x)))))
        sups.append(sup)
    decreasing = sups[-1] < sups[0]
    return ConvergenceTable(
        family=family,
        distortion=distortion.spec,
        ns=ns_sorted,
        sup_errors=tuple(sups),
        decreasing=decreasing,
    )
