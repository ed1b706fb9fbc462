"""Capacities built from distortions and from finite tables.

A capacity is a monotone set function vanishing on the empty set.  Two
families are provided: distorted Lebesgue capacities on a finite interval,
``nu(A) = u(length(A) / length(interval))`` for a nondecreasing distortion
``u`` fixing 0 and 1, and discrete capacities given by an explicit table over
all subsets of a small ground set.  Alongside them live the structural checks
used everywhere else in the package: monotonicity, submodularity, the
null-complement property, and the smallest constant ``c`` with
``nu <= c * dual(nu)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import DomainError, PreconditionError

__all__ = [
    "Distortion",
    "IntervalCapacity",
    "DiscreteCapacity",
    "VectorCapacity",
    "SubmodularityVerdict",
    "ConcavityVerdict",
    "NullComplementReport",
    "DualDominationEstimate",
    "check_submodular",
    "check_submodular_distortion",
    "null_complement_check",
    "estimate_c",
    "parse_distortion",
]

#: Tolerance for identities that hold exactly in real arithmetic.
EXACT_TOL = 1e-12

_DISTORTION_KINDS = ("identity", "power", "moebius", "tabulated", "dual")


@dataclass(frozen=True)
class Distortion:
    """Nondecreasing map of [0, 1] onto itself.

    Supported kinds: ``identity`` (u(t) = t), ``power`` (u(t) = t**alpha,
    alpha > 0), ``moebius`` (u(t) = 2t / (t + 1)), ``tabulated`` (piecewise
    linear through a monotone sample table), and ``dual`` (the distortion of
    the dual capacity, u(t) = 1 - base(1 - t)).  Instances are immutable and
    callable on scalars or arrays.
    """

    kind: str
    alpha: float | None = None
    knots_t: tuple[float, ...] | None = None
    knots_u: tuple[float, ...] | None = None
    base: "Distortion | None" = None

    def __post_init__(self):
        if self.kind not in _DISTORTION_KINDS:
            raise PreconditionError(f"unknown distortion kind {self.kind!r}")
        if self.kind == "power":
            if self.alpha is None or not math.isfinite(self.alpha) or self.alpha <= 0:
                raise PreconditionError("power distortion needs alpha > 0")
        if self.kind == "tabulated":
            self._validate_table()
        if self.kind == "dual" and self.base is None:
            raise PreconditionError("dual distortion needs a base distortion")

    def _validate_table(self):
        ts, us = self.knots_t, self.knots_u
        if ts is None or us is None or len(ts) != len(us) or len(ts) < 2:
            raise PreconditionError("tabulated distortion needs matching t/u knots")
        ts = tuple(float(t) for t in ts)
        us = tuple(float(u) for u in us)
        if abs(ts[0]) > EXACT_TOL or abs(ts[-1] - 1.0) > EXACT_TOL:
            raise PreconditionError("table t-knots must run from 0 to 1")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise PreconditionError("table t-knots must be strictly increasing")
        if any(b < a - EXACT_TOL for a, b in zip(us, us[1:])):
            raise PreconditionError("table u-values must be nondecreasing")
        if abs(us[0]) > EXACT_TOL or abs(us[-1] - 1.0) > EXACT_TOL:
            raise PreconditionError("table must map 0 to 0 and 1 to 1 (within 1e-12)")
        # Pin the endpoints so interpolation covers all of [0, 1].
        object.__setattr__(self, "knots_t", (0.0,) + ts[1:-1] + (1.0,))
        object.__setattr__(self, "knots_u", us)

    @classmethod
    def identity(cls) -> "Distortion":
        return cls(kind="identity")

    @classmethod
    def power(cls, alpha: float) -> "Distortion":
        return cls(kind="power", alpha=float(alpha))

    @classmethod
    def moebius(cls) -> "Distortion":
        return cls(kind="moebius")

    @classmethod
    def tabulated(cls, knots_t: Sequence[float], knots_u: Sequence[float]) -> "Distortion":
        return cls(kind="tabulated", knots_t=tuple(knots_t), knots_u=tuple(knots_u))

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(arr < -1e-9) or np.any(arr > 1.0 + 1e-9):
            raise DomainError(f"distortion argument outside [0, 1]: {t!r}")
        x = np.clip(arr, 0.0, 1.0)
        if self.kind == "identity":
            out = x
        elif self.kind == "power":
            out = x**self.alpha
        elif self.kind == "moebius":
            out = 2.0 * x / (x + 1.0)
        elif self.kind == "tabulated":
            out = np.interp(x, self.knots_t, self.knots_u)
        else:
            out = 1.0 - self.base(1.0 - x)
        if arr.ndim == 0:
            return float(out)
        return out

    def dual(self) -> "Distortion":
        """Distortion of the dual capacity; dual of dual is the original."""
        if self.kind == "identity":
            return self
        if self.kind == "dual":
            return self.base
        return Distortion(kind="dual", base=self)

    @property
    def spec(self) -> str:
        """Spec string round-trippable through parse_distortion (except tables)."""
        if self.kind == "power":
            return f"power:{self.alpha:g}"
        if self.kind == "tabulated":
            return "table"
        if self.kind == "dual":
            return f"dual({self.base.spec})"
        return self.kind

    def __str__(self) -> str:
        return self.spec


def parse_distortion(text: str) -> Distortion:
    """Parse a CLI distortion spec.

    Grammar: ``identity`` | ``power:<alpha>`` | ``moebius`` | ``table:<path>``
    where the table file is a two-column CSV of (t, u(t)) rows with strictly
    increasing t running from 0 to 1.
    """
    spec = text.strip()
    if spec == "identity":
        return Distortion.identity()
    if spec == "moebius":
        return Distortion.moebius()
    if spec.startswith("power:"):
        try:
            alpha = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise PreconditionError(f"bad power exponent in {text!r}") from exc
        return Distortion.power(alpha)
    if spec.startswith("table:"):
        path = spec.split(":", 1)[1]
        ts: list[float] = []
        us: list[float] = []
        with open(path, newline="") as handle:
            for i, row in enumerate(csv.reader(handle)):
                if not row:
                    continue
                try:
                    t, u = float(row[0]), float(row[1])
                except (ValueError, IndexError):
                    if i == 0:
                        continue  # header row
                    raise PreconditionError(f"bad table row {row!r} in {path}")
                ts.append(t)
                us.append(u)
        return Distortion.tabulated(ts, us)
    raise PreconditionError(f"unknown distortion spec {text!r}")


# ---------------------------------------------------------------------------
# Interval capacities (distorted Lebesgue measures)
# ---------------------------------------------------------------------------

IntervalSet = Union[tuple, Sequence]


def _normalize_components(sets: IntervalSet, interval: tuple[float, float]):
    """Validate a union of intervals against the ground interval.

    Accepts a single (lo, hi) pair or an iterable of pairs; components must be
    pairwise disjoint and contained in the ground interval.
    """
    a, b = interval
    if sets is None:
        return []
    comps = list(sets)
    if not comps:
        return []
    if len(comps) == 2 and all(isinstance(v, (int, float)) for v in comps):
        comps = [tuple(comps)]
    pairs = []
    for comp in comps:
        lo, hi = float(comp[0]), float(comp[1])
        if hi < lo - EXACT_TOL:
            raise DomainError(f"interval component reversed: ({lo}, {hi})")
        if lo < a - 1e-9 or hi > b + 1e-9:
            raise DomainError(f"set component ({lo}, {hi}) outside domain [{a}, {b}]")
        pairs.append((max(lo, a), min(max(hi, lo), b)))
    pairs.sort()
    for (lo0, hi0), (lo1, _hi1) in zip(pairs, pairs[1:]):
        if lo1 < hi0 - EXACT_TOL:
            raise DomainError("interval components overlap; pass a disjoint union")
    return pairs


@dataclass(frozen=True)
class IntervalCapacity:
    """Distorted Lebesgue capacity on a finite interval.

    The value of a union of intervals depends only on its total length:
    ``nu(A) = u(length(A) / (b - a))``.
    """

    interval: tuple[float, float]
    distortion: Distortion

    def __post_init__(self):
        a, b = float(self.interval[0]), float(self.interval[1])
        if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
            raise PreconditionError(f"interval must be finite with a < b, got ({a}, {b})")
        object.__setattr__(self, "interval", (a, b))

    @property
    def width(self) -> float:
        return self.interval[1] - self.interval[0]

    def measure_length(self, length) -> float:
        """Capacity of any measurable subset of the given total length."""
        arr = np.asarray(length, dtype=float)
        if np.any(arr < -1e-9) or np.any(arr > self.width * (1 + 1e-9) + 1e-12):
            raise DomainError(f"length {length!r} outside [0, {self.width}]")
        out = self.distortion(np.clip(arr / self.width, 0.0, 1.0))
        return out

    def measure(self, sets: IntervalSet) -> float:
        comps = _normalize_components(sets, self.interval)
        total = sum(hi - lo for lo, hi in comps)
        return float(self.measure_length(total))

    def dual(self) -> "IntervalCapacity":
        return IntervalCapacity(self.interval, self.distortion.dual())

    def describe(self) -> str:
        a, b = self.interval
        return f"{self.distortion.spec} on [{a:g}, {b:g}]"


# ---------------------------------------------------------------------------
# Discrete capacities
# ---------------------------------------------------------------------------

Subset = Union[int, Iterable[int]]

MAX_GROUND_SIZE = 16


def subset_mask(n: int, subset: Subset) -> int:
    """Encode a subset of {0, .., n-1} as a bit pattern."""
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
        if mask < 0 or mask >= (1 << n):
            raise DomainError(f"subset mask {mask} outside ground set of size {n}")
        return mask
    mask = 0
    for i in subset:
        idx = int(i)
        if idx < 0 or idx >= n:
            raise DomainError(f"element {idx} outside ground set of size {n}")
        mask |= 1 << idx
    return mask


@dataclass(frozen=True, eq=False)
class DiscreteCapacity:
    """Capacity on {0, .., n-1} given by a table over all 2**n subsets.

    The table is indexed by subset bit patterns.  Construction enforces
    value(empty) = 0 and monotonicity; ground sizes above 16 are rejected so
    exhaustive scans stay feasible.
    """

    n: int
    values: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if n < 1 or n > MAX_GROUND_SIZE:
            raise PreconditionError(f"ground size must be in [1, {MAX_GROUND_SIZE}], got {n}")
        arr = np.array(self.values, dtype=float)
        if arr.shape != (1 << n,):
            raise PreconditionError(f"table must have 2**{n} = {1 << n} entries, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise PreconditionError("table entries must be finite")
        if abs(arr[0]) > EXACT_TOL:
            raise PreconditionError(f"value of the empty set must be 0, got {arr[0]}")
        if np.any(arr < -EXACT_TOL):
            raise PreconditionError("capacity values must be nonnegative")
        masks = np.arange(1 << n)
        for i in range(n):
            bit = 1 << i
            without = masks[(masks & bit) == 0]
            if np.any(arr[without] > arr[without | bit] + EXACT_TOL):
                bad = without[np.argmax(arr[without] - arr[without | bit])]
                raise PreconditionError(
                    f"table is not monotone: value({bad}) > value({bad | bit})"
                )
        arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", arr)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def total(self) -> float:
        return float(self.values[self.full_mask])

    @property
    def normalized(self) -> bool:
        return abs(self.total - 1.0) <= EXACT_TOL

    def measure(self, subset: Subset) -> float:
        return float(self.values[subset_mask(self.n, subset)])

    def dual(self) -> "DiscreteCapacity":
        full = self.full_mask
        masks = np.arange(1 << self.n)
        dual_values = self.values[full] - self.values[full ^ masks]
        return DiscreteCapacity(self.n, dual_values)

    @classmethod
    def from_set_function(cls, n: int, fn: Callable[[int], float]) -> "DiscreteCapacity":
        return cls(n, [fn(mask) for mask in range(1 << n)])

    @classmethod
    def additive(cls, weights: Sequence[float]) -> "DiscreteCapacity":
        w = np.asarray(weights, dtype=float)
        n = len(w)
        masks = np.arange(1 << n)
        bits = (masks[:, None] >> np.arange(n)) & 1
        return cls(n, bits @ w)

    @classmethod
    def distorted_counting(cls, n: int, u: Callable[[float], float]) -> "DiscreteCapacity":
        """u applied to the normalized counting measure |A| / n."""
        masks = np.arange(1 << n)
        counts = np.array([bin(m).count("1") for m in masks], dtype=float)
        return cls(n, [float(u(c / n)) for c in counts])

    def describe(self) -> str:
        return f"discrete n={self.n}"


@dataclass(frozen=True, eq=False)
class VectorCapacity:
    """Finitely many discrete capacities over a shared ground set."""

    components: tuple[DiscreteCapacity, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise PreconditionError("vector capacity needs at least one component")
        n = comps[0].n
        if any(c.n != n for c in comps):
            raise PreconditionError("vector capacity components must share the ground size")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def size(self) -> int:
        return len(self.components)

    def measure(self, subset: Subset) -> np.ndarray:
        mask = subset_mask(self.n, subset)
        return np.array([c.values[mask] for c in self.components])


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubmodularityVerdict:
    submodular: bool
    witness: tuple[int, int] | None = None
    violation: float = 0.0

    def to_dict(self) -> dict:
        return {
            "submodular": self.submodular,
            "witness": list(self.witness) if self.witness else None,
            "violation": self.violation,
        }


def check_submodular(cap: DiscreteCapacity, tol: float = EXACT_TOL) -> SubmodularityVerdict:
    """Exhaustive submodularity check over all subset pairs.

    Returns a violating pair (A, B) with value(A | B) + value(A & B) >
    value(A) + value(B) when one exists.
    """
    v = cap.values
    masks = np.arange(1 << cap.n)
    for a in range(1 << cap.n):
        excess = v[a | masks] + v[a & masks] - v[a] - v[masks]
        worst = int(np.argmax(excess))
        if excess[worst] > tol:
            return SubmodularityVerdict(False, (a, worst), float(excess[worst]))
    return SubmodularityVerdict(True)


@dataclass(frozen=True)
class ConcavityVerdict:
    submodular: bool
    witness: tuple[float, float] | None = None
    gap: float = 0.0

    def to_dict(self) -> dict:
        return {
            "submodular": self.submodular,
            "witness": list(self.witness) if self.witness else None,
            "gap": self.gap,
        }


def check_submodular_distortion(
    d: Distortion, grid_size: int, tol: float = EXACT_TOL
) -> ConcavityVerdict:
    """Midpoint-concavity scan of a distortion on a uniform grid.

    Concavity of the distortion is sufficient for submodularity of the
    induced distorted Lebesgue capacity; a failing grid pair is returned as
    a witness.
    """
    if grid_size < 3:
        raise PreconditionError("grid_size must be at least 3")
    grid = np.linspace(0.0, 1.0, grid_size + 1)
    u = np.asarray(d(grid))
    block = 512
    for start in range(0, grid.size, block):
        s = grid[start : start + block, None]
        mids = np.asarray(d((s + grid[None, :]) / 2.0))
        gap = mids - (u[start : start + block, None] + u[None, :]) / 2.0
        i, j = np.unravel_index(np.argmin(gap), gap.shape)
        if gap[i, j] < -tol:
            return ConcavityVerdict(False, (float(s[i, 0]), float(grid[j])), float(gap[i, j]))
    return ConcavityVerdict(True)


@dataclass(frozen=True)
class NullComplementReport:
    status: str  # "passed" | "failed" | "skipped"
    witnesses: tuple[int, ...] = ()
    reason: str = ""

    def to_dict(self) -> dict:
        return {"status": self.status, "witnesses": list(self.witnesses), "reason": self.reason}


def null_complement_check(cap: DiscreteCapacity) -> NullComplementReport:
    """For normalized submodular capacities, every null set has full complement.

    Capacities failing the preconditions are reported as skipped, not failed.
    """
    if not cap.normalized:
        return NullComplementReport("skipped", reason="capacity not normalized")
    if not check_submodular(cap).submodular:
        return NullComplementReport("skipped", reason="capacity not submodular")
    full = cap.full_mask
    zeros = np.where(cap.values <= EXACT_TOL)[0]
    witnesses = tuple(int(m) for m in zeros if cap.values[full ^ int(m)] < 1.0 - EXACT_TOL)
    if witnesses:
        return NullComplementReport("failed", witnesses=witnesses)
    return NullComplementReport("passed")


@dataclass(frozen=True)
class DualDominationEstimate:
    """Grid estimate of the least c with nu <= c * dual(nu).

    ``c`` is the supremum of u(x) / (1 - u(1 - x)) over the evaluation grid,
    rounded up at the sixth decimal; ``unbounded`` is set when the ratio
    exceeds ``cap`` anywhere on the grid or on a geometric refinement toward
    zero (where divergent ratios live).
    """

    c: float | None
    unbounded: bool
    max_ratio: float
    argmax: float
    grid_size: int
    cap: float

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "unbounded": self.unbounded,
            "max_ratio": self.max_ratio,
            "argmax": self.argmax,
            "grid_size": self.grid_size,
            "cap": self.cap,
        }


def _domination_ratios(d: Distortion, xs: np.ndarray) -> np.ndarray:
    dual = d.dual()
    num = np.asarray(d(xs), dtype=float)
    den = np.asarray(dual(xs), dtype=float)
    ratios = np.full_like(num, 0.0)
    positive = den > 0.0
    ratios[positive] = num[positive] / den[positive]
    ratios[~positive & (num > 1e-300)] = np.inf
    return ratios


def estimate_c(d: Distortion, grid_size: int = 10_000, cap: float = 1e6) -> DualDominationEstimate:
    """Estimate the dual-domination constant of a normalized distortion.

    The reported value is the grid supremum of the pointwise ratio
    ``nu / dual(nu)`` at x = k / grid_size, k = 1..grid_size.  Divergence near
    zero is detected on a geometric probe sequence below the smallest grid
    point; any probed ratio above ``cap`` flags the estimate as unbounded.
    """
    if grid_size < 1:
        raise PreconditionError("grid_size must be positive")
    xs = np.arange(1, grid_size + 1) / grid_size
    ratios = _domination_ratios(d, xs)
    idx = int(np.argmax(ratios))
    max_ratio = float(ratios[idx])
    argmax = float(xs[idx])

    probes = (1.0 / grid_size) * (0.5 ** np.arange(1, 64))
    probes = probes[probes >= 1e-13]
    unbounded = bool(max_ratio > cap)
    if probes.size and not unbounded:
        unbounded = bool(np.max(_domination_ratios(d, probes)) > cap)

    if unbounded:
        return DualDominationEstimate(None, True, max_ratio, argmax, grid_size, cap)
    c = math.ceil(max_ratio * 1e6 - 1e-9) / 1e6
    return DualDominationEstimate(c, False, max_ratio, argmax, grid_size, cap)
