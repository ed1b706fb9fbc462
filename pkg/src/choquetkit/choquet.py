"""Choquet integrals for sampled and discrete functions.

The fast paths use the exact sorted-cell formula on the piecewise-constant
representation (cell value = mean of the two bracketing nodes), with negative
values handled by a min-shift plus translation invariance.  Each fast path is
paired with an independent oracle that evaluates the defining survival-function
integral directly: trapezoid quadrature over thresholds for sampled functions,
exact breakpoint summation for discrete ones.  Cross-checking the two routes is
itself a correctness test, so neither may be expressed through the other.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .capacity import (
    DiscreteCapacity,
    IntervalCapacity,
    VectorCapacity,
    check_submodular,
    check_submodular_distortion,
)
from .errors import DomainError, GridSnapWarning, PreconditionError
from .reporting import CheckAccumulator, PropertyCheck, PropertyReport, skipped_check

__all__ = [
    "SampledFunction",
    "QuadratureConfig",
    "choquet_integral",
    "choquet_oracle",
    "choquet_discrete",
    "choquet_discrete_oracle",
    "vector_choquet",
    "run_integral_properties",
]


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Real function on an interval represented on a uniform grid.

    ``values`` holds the M+1 node samples of a grid with M cells.  The
    optional metadata records a declared Lipschitz constant and whether the
    samples are all nonnegative.
    """

    interval: tuple[float, float]
    values: np.ndarray
    lipschitz: float | None = None
    nonnegative: bool | None = None

    def __post_init__(self):
        a, b = float(self.interval[0]), float(self.interval[1])
        if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
            raise PreconditionError(f"interval must be finite with a < b, got ({a}, {b})")
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise PreconditionError("need at least two node values (one grid cell)")
        if not np.all(np.isfinite(arr)):
            raise PreconditionError("samples must be finite")
        if self.nonnegative and arr.min() < 0:
            raise PreconditionError("nonnegative flag set but samples dip below zero")
        arr.setflags(write=False)
        object.__setattr__(self, "interval", (a, b))
        object.__setattr__(self, "values", arr)

    @property
    def size(self) -> int:
        """Number of grid cells M."""
        return self.values.size - 1

    @property
    def step(self) -> float:
        a, b = self.interval
        return (b - a) / self.size

    def nodes(self) -> np.ndarray:
        return np.linspace(self.interval[0], self.interval[1], self.values.size)

    def cell_values(self) -> np.ndarray:
        """Piecewise-constant representative per cell (mean of bracketing nodes)."""
        v = self.values
        return (v[:-1] + v[1:]) / 2.0

    @classmethod
    def from_callable(
        cls,
        fn: Callable[[float], float],
        interval: tuple[float, float],
        size: int,
        lipschitz: float | None = None,
    ) -> "SampledFunction":
        a, b = float(interval[0]), float(interval[1])
        if size < 1:
            raise PreconditionError("grid size must be at least 1")
        ts = np.linspace(a, b, size + 1)
        vals = np.array([float(fn(t)) for t in ts])
        nonneg = bool(np.all(vals >= 0)) if np.all(np.isfinite(vals)) else None
        return cls((a, b), vals, lipschitz=lipschitz, nonnegative=nonneg or None)

    @classmethod
    def constant(cls, value: float, interval: tuple[float, float], size: int = 1) -> "SampledFunction":
        return cls(interval, np.full(size + 1, float(value)))


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the survival-function quadrature oracle."""

    level_grid: int = 4096
    tolerance: float = 1e-8
    refinement_factor: int = 2

    def __post_init__(self):
        if self.level_grid < 16:
            raise PreconditionError("level_grid must be at least 16")
        if self.tolerance <= 0:
            raise PreconditionError("tolerance must be positive")
        if self.refinement_factor < 2:
            raise PreconditionError("refinement_factor must be at least 2")


def _resolve_region(f: SampledFunction, cap: IntervalCapacity, region) -> tuple[int, int]:
    """Map a region to grid cell indexes, snapping to the grid when needed."""
    a, b = f.interval
    if region is None:
        lo, hi = a, b
    else:
        lo, hi = float(region[0]), float(region[1])
    if hi < lo:
        raise DomainError(f"region reversed: ({lo}, {hi})")
    ca, cb = cap.interval
    scale = max(1.0, abs(a), abs(b))
    if lo < ca - 1e-9 * scale or hi > cb + 1e-9 * scale:
        raise DomainError(f"region ({lo}, {hi}) outside capacity domain [{ca}, {cb}]")
    if lo < a - 1e-9 * scale or hi > b + 1e-9 * scale:
        raise DomainError(f"region ({lo}, {hi}) outside sampled domain [{a}, {b}]")
    h = f.step
    i0 = min(max(int(round((lo - a) / h)), 0), f.size)
    i1 = min(max(int(round((hi - a) / h)), 0), f.size)
    if abs(a + i0 * h - lo) > 1e-9 * scale or abs(a + i1 * h - hi) > 1e-9 * scale:
        warnings.warn(
            f"region ({lo}, {hi}) snapped to grid cells [{i0}, {i1}]",
            GridSnapWarning,
            stacklevel=3,
        )
    return i0, i1


def choquet_integral(f: SampledFunction, cap: IntervalCapacity, region=None) -> float:
    """Choquet integral of the sampled function over a grid-aligned region.

    Exact for the piecewise-constant interpolant: cell values are min-shifted,
    sorted descending, and summed against the capacity increments of the
    nested top-k cell unions; the shift is restored via translation
    invariance.
    """
    i0, i1 = _resolve_region(f, cap, region)
    if i1 <= i0:
        return 0.0
    cells = f.cell_values()[i0:i1]
    h = f.step
    k = cells.size
    m = float(cells.min())
    shifted = np.sort(cells - m)[::-1]
    nu = np.asarray(cap.measure_length(h * np.arange(k + 1)), dtype=float)
    return float(np.dot(shifted, np.diff(nu)) + m * nu[k])


def choquet_oracle(
    f: SampledFunction,
    cap: IntervalCapacity,
    region=None,
    config: QuadratureConfig | None = None,
) -> float:
    """Survival-function quadrature oracle for the sampled Choquet integral.

    Trapezoid rule over thresholds t in [min(0, min f), max(0, max f)], split
    at t = 0; level sets are measured by counting grid cells whose cell value
    clears the threshold.  Independent of the sorted-cell fast path.
    """
    cfg = config or QuadratureConfig()
    i0, i1 = _resolve_region(f, cap, region)
    if i1 <= i0:
        return 0.0
    cells = f.cell_values()[i0:i1]
    nodes = f.values[i0 : i1 + 1]
    h = f.step
    k = cells.size
    sorted_cells = np.sort(cells)
    region_nu = float(cap.measure_length(k * h))

    def survival(ts: np.ndarray) -> np.ndarray:
        counts = k - np.searchsorted(sorted_cells, ts, side="left")
        return np.asarray(cap.measure_length(counts * h), dtype=float)

    lo_t = min(0.0, float(nodes.min()))
    hi_t = max(0.0, float(nodes.max()))
    span = hi_t - lo_t
    if span <= 0.0:
        return 0.0

    total = 0.0
    pos_cells = 0
    if hi_t > 0.0:
        pos_cells = max(1, int(round(cfg.level_grid * hi_t / span)))
        ts = np.linspace(0.0, hi_t, pos_cells + 1)
        s = survival(ts)
        total += float(np.sum(s[:-1] + s[1:]) * (ts[1] - ts[0]) / 2.0)
    if lo_t < 0.0:
        neg_cells = max(1, cfg.level_grid - pos_cells)
        ts = np.linspace(lo_t, 0.0, neg_cells + 1)
        s = survival(ts) - region_nu
        total += float(np.sum(s[:-1] + s[1:]) * (ts[1] - ts[0]) / 2.0)
    return total


def choquet_discrete(values: Sequence[float], cap: DiscreteCapacity) -> float:
    """Choquet integral of a vector against a discrete capacity.

    Sorted-coordinate formula with min-shift; ties are broken by ascending
    index (the increments telescope, so tie order cannot change the value).
    """
    v = np.asarray(values, dtype=float)
    if v.shape != (cap.n,):
        raise PreconditionError(f"expected {cap.n} values, got shape {v.shape}")
    m = float(v.min())
    shifted = v - m
    order = np.argsort(-shifted, kind="stable")
    total = m * cap.total
    mask = 0
    prev = 0.0
    for idx in order:
        mask |= 1 << int(idx)
        nu = float(cap.values[mask])
        total += float(shifted[idx]) * (nu - prev)
        prev = nu
    return total


def choquet_discrete_oracle(values: Sequence[float], cap: DiscreteCapacity) -> float:
    """Exact summation of the piecewise-constant survival function.

    Walks the distinct values as breakpoints and evaluates both threshold
    branches directly, with no sorting formula.
    """
    v = np.asarray(values, dtype=float)
    if v.shape != (cap.n,):
        raise PreconditionError(f"expected {cap.n} values, got shape {v.shape}")

    def level_mask(threshold: float, strict: bool = False) -> int:
        mask = 0
        for i, val in enumerate(v):
            if val > threshold or (not strict and val == threshold):
                mask |= 1 << i
        return mask

    distinct = sorted(set(float(x) for x in v))
    total = 0.0
    prev = 0.0
    for d in distinct:
        if d <= 0:
            continue
        total += float(cap.values[level_mask(d)]) * (d - prev)
        prev = d
    vmin = distinct[0]
    if vmin < 0:
        mu_x = cap.total
        prev = vmin
        for d in distinct:
            if d <= vmin or d > 0:
                continue
            total += (float(cap.values[level_mask(d)]) - mu_x) * (d - prev)
            prev = d
        if prev < 0:
            total += (float(cap.values[level_mask(prev, strict=True)]) - mu_x) * (0.0 - prev)
    return total


def vector_choquet(values: Sequence[float], vcap: VectorCapacity) -> np.ndarray:
    """Componentwise Choquet integral against a vector capacity."""
    v = np.asarray(values, dtype=float)
    if v.shape != (vcap.n,):
        raise PreconditionError(f"expected {vcap.n} values, got shape {v.shape}")
    return np.array([choquet_discrete(v, comp) for comp in vcap.components])


# ---------------------------------------------------------------------------
# Property harness
# ---------------------------------------------------------------------------

Capacity = Union[IntervalCapacity, DiscreteCapacity]

_GATED_SUBMODULAR = ("subadditivity", "modulus_bound", "modulus_difference", "sup_inf_inequality")


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def _piecewise_linear(
    rng: np.random.Generator, nodes: np.ndarray, monotone: bool = False
) -> np.ndarray:
    a, b = float(nodes[0]), float(nodes[-1])
    inner = rng.uniform(a, b, size=int(rng.integers(1, 6)))
    knots = np.sort(np.concatenate([[a, b], inner]))
    heights = rng.uniform(-5.0, 5.0, size=knots.size)
    if monotone:
        heights = np.sort(heights)
    return np.interp(nodes, knots, heights)


def _monotone_transform(rng: np.random.Generator, arr: np.ndarray) -> np.ndarray:
    lo, hi = float(arr.min()), float(arr.max())
    span = (hi - lo) or 1.0
    xs = np.linspace(lo - 0.01 * span, hi + 0.01 * span, 6)
    ys = np.cumsum(rng.uniform(0.0, 2.0, size=6)) + rng.uniform(-3.0, 3.0)
    return np.interp(arr, xs, ys)


def _integral_trial(args) -> list[tuple[str, float, dict]]:
    """One harness trial; module-level so process pools can run it."""
    cap, dual_cap, low_high, checks, seed, trial, grid_size = args
    rng = _trial_rng(seed, trial)
    discrete = isinstance(cap, DiscreteCapacity)

    if discrete:
        nodes = np.arange(cap.n, dtype=float)
        nu_x = cap.total

        def integ(vals, capacity=None):
            return choquet_discrete(vals, capacity or cap)

        def rand_fn():
            return rng.uniform(-10.0, 10.0, size=cap.n)

        # Any common vector works: the discrete representation has no
        # interpolation, so transforms of it stay exactly comonotone.
        def comonotone_base():
            return rand_fn()

    else:
        a, b = cap.interval
        nodes = np.linspace(a, b, grid_size + 1)
        nu_x = float(cap.measure_length(cap.width))

        def integ(vals, capacity=None):
            return choquet_integral(SampledFunction(cap.interval, vals), capacity or cap)

        def rand_fn():
            return _piecewise_linear(rng, nodes)

        # The integral acts on the cell-midpoint interpolant, and midpoint
        # averaging of transforms of a non-monotone base need not stay
        # comonotone; a monotone base keeps the interpolants comonotone.
        def comonotone_base():
            return _piecewise_linear(rng, nodes, monotone=True)

    f = rand_fn()
    g = rand_fn()
    base = comonotone_base()
    phi = _monotone_transform(rng, base)
    psi = _monotone_transform(rng, base)
    scale = float(rng.uniform(0.0, 3.0))
    shift = float(rng.uniform(-3.0, 3.0))
    const = float(rng.uniform(-3.0, 3.0))

    i_f = integ(f)
    i_g = integ(g)
    i_abs_f = integ(np.abs(f))

    out: list[tuple[str, float, dict]] = []

    def rec(name: str, excess: float, lhs: float, rhs: float) -> None:
        if name in checks:
            out.append((name, float(excess), {"trial": trial, "lhs": lhs, "rhs": rhs}))

    rec("positivity", -i_abs_f, i_abs_f, 0.0)
    i_bigger = integ(f + np.abs(g))
    rec("monotonicity", i_f - i_bigger, i_f, i_bigger)
    i_scaled = integ(scale * f)
    rec("positive_homogeneity", abs(i_scaled - scale * i_f), i_scaled, scale * i_f)
    i_const = integ(np.full_like(f, const))
    rec("calibration", abs(i_const - const * nu_x), i_const, const * nu_x)
    i_phi, i_psi, i_sum = integ(phi), integ(psi), integ(phi + psi)
    rec("comonotone_additivity", abs(i_sum - i_phi - i_psi), i_sum, i_phi + i_psi)
    i_shifted = integ(f + shift)
    rec("translation_invariance", abs(i_shifted - i_f - shift * nu_x), i_shifted, i_f + shift * nu_x)
    i_neg = integ(-f)
    i_dual = integ(f, dual_cap)
    rec("duality", abs(i_neg + i_dual), i_neg, -i_dual)
    if low_high is not None:
        low, high = low_high
        i_low = integ(np.abs(f), low)
        i_high = integ(np.abs(f), high)
        rec("capacity_monotonicity", i_low - i_high, i_low, i_high)
    i_fg = integ(f + g)
    rec("additivity", abs(i_fg - i_f - i_g), i_fg, i_f + i_g)
    rec("subadditivity", i_fg - i_f - i_g, i_fg, i_f + i_g)
    rec("modulus_bound", abs(i_f) - i_abs_f, abs(i_f), i_abs_f)
    i_diff = integ(np.abs(f - g))
    rec("modulus_difference", abs(i_f - i_g) - i_diff, abs(i_f - i_g), i_diff)
    i_sup = integ(np.maximum(f, g))
    i_inf = integ(np.minimum(f, g))
    rec("sup_inf_inequality", i_sup + i_inf - i_f - i_g, i_sup + i_inf, i_f + i_g)
    return out


def _domination_order(cap: Capacity, dual_cap: Capacity, grid_size: int):
    """Order (low, high) when the capacity and its dual are comparable."""
    if isinstance(cap, DiscreteCapacity):
        v, w = cap.values, dual_cap.values
    else:
        lengths = np.arange(grid_size + 1) / grid_size * cap.width
        v = np.asarray(cap.measure_length(lengths))
        w = np.asarray(dual_cap.measure_length(lengths))
    if np.all(w <= v + 1e-12):
        return dual_cap, cap
    if np.all(v <= w + 1e-12):
        return cap, dual_cap
    return None


def _is_additive(cap: Capacity) -> bool:
    if isinstance(cap, DiscreteCapacity):
        singles = np.array([cap.values[1 << i] for i in range(cap.n)])
        masks = np.arange(1 << cap.n)
        bits = (masks[:, None] >> np.arange(cap.n)) & 1
        return bool(np.allclose(cap.values, bits @ singles, atol=1e-12))
    return cap.distortion.kind == "identity"


def run_integral_properties(
    cap: Capacity,
    trials: int,
    seed: int,
    *,
    grid_size: int = 256,
    workers: int = 1,
) -> PropertyReport:
    """Randomized suite over the structural identities of the Choquet integral.

    Positivity, monotonicity, homogeneity, calibration, comonotone additivity,
    translation invariance, the dual identity, and capacity monotonicity run on
    every capacity; subadditivity, the modulus inequalities, and the sup/inf
    inequality run only when the capacity is submodular and are reported as
    skipped otherwise.  All randomness derives from (seed, trial), so results
    are order-independent and reproducible at any worker count.
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    discrete = isinstance(cap, DiscreteCapacity)
    tol = 1e-9 if discrete else 1e-6
    dual_cap = cap.dual()

    if discrete:
        submodular = check_submodular(cap).submodular
    else:
        submodular = check_submodular_distortion(cap.distortion, 128).submodular
    additive = _is_additive(cap)
    low_high = _domination_order(cap, dual_cap, grid_size)

    checks = [
        "positivity",
        "monotonicity",
        "positive_homogeneity",
        "calibration",
        "comonotone_additivity",
        "translation_invariance",
        "duality",
    ]
    skipped: list[PropertyCheck] = []
    if low_high is not None:
        checks.append("capacity_monotonicity")
    else:
        skipped.append(
            skipped_check("capacity_monotonicity", "capacity and its dual are not comparable")
        )
    if additive:
        checks.append("additivity")
    else:
        skipped.append(skipped_check("additivity", "not applicable: capacity not additive"))
    if submodular:
        checks.extend(_GATED_SUBMODULAR)
    else:
        skipped.extend(
            skipped_check(name, "not applicable: capacity not submodular")
            for name in _GATED_SUBMODULAR
        )

    check_set = frozenset(checks)
    jobs = [
        (cap, dual_cap, low_high, check_set, seed, trial, grid_size) for trial in range(trials)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_integral_trial, jobs, chunksize=16))
    else:
        results = [_integral_trial(job) for job in jobs]

    accs = {name: CheckAccumulator(name, tol) for name in checks}
    for per_trial in results:
        for name, excess, payload in per_trial:
            accs[name].record(excess, payload)

    finished = [accs[name].finish() for name in checks] + skipped
    finished.sort(key=lambda c: c.name)
    return PropertyReport(
        suite="choquet-integral",
        capacity=cap.describe(),
        seed=seed,
        trials=trials,
        checks=tuple(finished),
    )
