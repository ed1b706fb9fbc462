"""Hölder-type inequalities and nonlinear variance bounds for the Choquet
integral functional.

Throughout, ``T`` is the Choquet integral over the capacity's full interval,
which is monotone, positively homogeneous, comonotone additive, and (for
submodular capacities) subadditive with ``T(1) = 1``.  Checks that require a
sublinear ``T`` reject non-submodular capacities outright; checks whose
preconditions depend on the data (comonotonicity) report a skipped status
instead of failing.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .capacity import IntervalCapacity, check_submodular_distortion
from .choquet import SampledFunction, choquet_integral
from .errors import PreconditionError
from .reporting import (
    FAILED,
    PASSED,
    SKIPPED,
    CheckAccumulator,
    PropertyReport,
    skipped_check,
)

__all__ = [
    "ComonotoneVerdict",
    "HolderReport",
    "P1QInfReport",
    "NonnegVarianceReport",
    "CbsReport",
    "is_comonotone",
    "holder_check",
    "holder_p1_qinf_check",
    "t_variance",
    "t_covariance",
    "variance_nonneg_check",
    "cbs_comonotone_check",
    "run_inequality_properties",
    "serialize_report",
]


def serialize_report(check: str, report, *inputs) -> str:
    """One-line JSON for a single check result.

    Tags the payload with the check name and a digest of the input samples so
    archived report lines can be traced back to the data that produced them.
    """
    digest = hashlib.sha256()
    for item in inputs:
        values = item.values if hasattr(item, "values") else item
        digest.update(np.ascontiguousarray(values, dtype=float).tobytes())
    return json.dumps(
        {"check": check, "inputs_digest": digest.hexdigest()[:16], **report.to_dict()}
    )

DEFAULT_MAX_PAIRS = 4_000_000


def _require_same_grid(f: SampledFunction, g: SampledFunction) -> None:
    if f.interval != g.interval or f.size != g.size:
        raise PreconditionError("functions must share the same sampling grid")


def _require_submodular(cap: IntervalCapacity) -> None:
    if not check_submodular_distortion(cap.distortion, 128).submodular:
        raise PreconditionError(
            "capacity is not submodular; the Choquet functional is not sublinear"
        )


def _T(cap: IntervalCapacity, values: np.ndarray) -> float:
    return choquet_integral(SampledFunction(cap.interval, values), cap)


@dataclass(frozen=True)
class ComonotoneVerdict:
    comonotone: bool
    witness: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        return {
            "comonotone": self.comonotone,
            "witness": list(self.witness) if self.witness else None,
        }


def is_comonotone(
    f: SampledFunction,
    g: SampledFunction,
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> ComonotoneVerdict:
    """Check (f(s) - f(t)) * (g(s) - g(t)) >= 0 across grid nodes.

    All node pairs are examined when their count fits in ``max_pairs``;
    otherwise nodes are sorted by f and g must be nondecreasing along that
    order, with ties in f imposing no constraint on g.
    """
    _require_same_grid(f, g)
    nodes = f.nodes()
    fv, gv = f.values, g.values
    m = fv.size
    if m * m <= max_pairs:
        df = fv[:, None] - fv[None, :]
        dg = gv[:, None] - gv[None, :]
        prod = df * dg
        i, j = np.unravel_index(np.argmin(prod), prod.shape)
        if prod[i, j] < 0:
            return ComonotoneVerdict(False, (float(nodes[i]), float(nodes[j])))
        return ComonotoneVerdict(True)

    order = np.lexsort((gv, fv))
    running_max = -math.inf
    running_arg = order[0]
    idx = 0
    while idx < m:
        # One group of equal f-values at a time; within a group g is free.
        stop = idx
        while stop < m and fv[order[stop]] == fv[order[idx]]:
            stop += 1
        group = order[idx:stop]
        g_min_arg = group[int(np.argmin(gv[group]))]
        if gv[g_min_arg] < running_max:
            return ComonotoneVerdict(
                False, (float(nodes[running_arg]), float(nodes[g_min_arg]))
            )
        g_max_arg = group[int(np.argmax(gv[group]))]
        if gv[g_max_arg] > running_max:
            running_max = float(gv[g_max_arg])
            running_arg = g_max_arg
        idx = stop
    return ComonotoneVerdict(True)


@dataclass(frozen=True)
class HolderReport:
    p: float
    q: float
    lhs: float
    rhs: float
    slack: float
    holds: bool

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
        }


def holder_check(
    cap: IntervalCapacity,
    f: SampledFunction,
    g: SampledFunction,
    p: float,
    tol: float = 1e-8,
) -> HolderReport:
    """T(|fg|) <= T(|f|^p)^(1/p) * T(|g|^q)^(1/q) with 1/p + 1/q = 1."""
    if p <= 1:
        raise PreconditionError("p must exceed 1")
    _require_same_grid(f, g)
    _require_submodular(cap)
    q = p / (p - 1.0)
    lhs = _T(cap, np.abs(f.values * g.values))
    tf = max(0.0, _T(cap, np.abs(f.values) ** p))
    tg = max(0.0, _T(cap, np.abs(g.values) ** q))
    rhs = tf ** (1.0 / p) * tg ** (1.0 / q)
    return HolderReport(p, q, lhs, rhs, rhs - lhs, lhs <= rhs + tol)


@dataclass(frozen=True)
class P1QInfReport:
    t_fg: float
    t_abs_fg: float
    product_bound: float
    modulus_slack: float
    difference_slack: float
    holds: bool

    def to_dict(self) -> dict:
        return {
            "t_fg": self.t_fg,
            "t_abs_fg": self.t_abs_fg,
            "product_bound": self.product_bound,
            "modulus_slack": self.modulus_slack,
            "difference_slack": self.difference_slack,
            "holds": self.holds,
        }


def holder_p1_qinf_check(
    cap: IntervalCapacity,
    f: SampledFunction,
    g: SampledFunction,
    tol: float = 1e-8,
) -> P1QInfReport:
    """The p = 1, q = inf chain |T(fg)| <= T(|fg|) <= T(|f|) sup|g|, plus the
    modulus inequalities |T(f)| <= T(|f|) and |T(f) - T(g)| <= T(|f - g|)."""
    _require_same_grid(f, g)
    _require_submodular(cap)
    t_fg = _T(cap, f.values * g.values)
    t_abs_fg = _T(cap, np.abs(f.values * g.values))
    bound = _T(cap, np.abs(f.values)) * float(np.abs(g.values).max())
    tf, tg = _T(cap, f.values), _T(cap, g.values)
    modulus_slack = _T(cap, np.abs(f.values)) - abs(tf)
    difference_slack = _T(cap, np.abs(f.values - g.values)) - abs(tf - tg)
    holds = (
        abs(t_fg) <= t_abs_fg + tol
        and t_abs_fg <= bound + tol
        and modulus_slack >= -tol
        and difference_slack >= -tol
    )
    return P1QInfReport(t_fg, t_abs_fg, bound, modulus_slack, difference_slack, holds)


def t_variance(cap: IntervalCapacity, f: SampledFunction) -> float:
    """T(1) * T(f^2) - T(f)^2, the nonlinear analogue of the variance."""
    one = float(cap.measure_length(cap.width))
    return one * _T(cap, f.values**2) - _T(cap, f.values) ** 2


def t_covariance(cap: IntervalCapacity, f: SampledFunction, g: SampledFunction) -> float:
    """T(1) * T(fg) - T(f) T(g), the nonlinear analogue of the covariance."""
    _require_same_grid(f, g)
    one = float(cap.measure_length(cap.width))
    return one * _T(cap, f.values * g.values) - _T(cap, f.values) * _T(cap, g.values)


@dataclass(frozen=True)
class NonnegVarianceReport:
    value: float
    holds: bool

    def to_dict(self) -> dict:
        return {"value": self.value, "holds": self.holds}


def variance_nonneg_check(
    cap: IntervalCapacity, f: SampledFunction, tol: float = 1e-9
) -> NonnegVarianceReport:
    """T(1) * T(|f|^2) - T(-|f|)^2 >= 0 for monotone sublinear T."""
    _require_submodular(cap)
    one = float(cap.measure_length(cap.width))
    value = one * _T(cap, np.abs(f.values) ** 2) - _T(cap, -np.abs(f.values)) ** 2
    return NonnegVarianceReport(value, value >= -tol)


@dataclass(frozen=True)
class CbsReport:
    """Cauchy-Bunyakovsky-Schwarz check for pairs with comonotone moduli.

    ``holds`` records the two-sided bound |Cov| <= sqrt(var_f) sqrt(var_g);
    ``holds_lower`` records the one-sided bound Cov >= -sqrt(var_f)
    sqrt(var_g), which is what the positive-lambda quadratic argument
    actually yields.  The two-sided form fails for some comonotone pairs
    (any near-constant positive factor forces |Cov| > 0 with one vanishing
    variance), so ``holds`` is data, not an implementation invariant.
    """

    status: str
    lhs: float = 0.0
    rhs: float = 0.0
    slack: float = 0.0
    holds: bool = False
    holds_lower: bool = False
    covariance: float = 0.0
    variance_f: float = 0.0
    variance_g: float = 0.0
    unsigned_variance_product: float = 0.0
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "holds_lower": self.holds_lower,
            "covariance": self.covariance,
            "variance_f": self.variance_f,
            "variance_g": self.variance_g,
            "unsigned_variance_product": self.unsigned_variance_product,
            "reason": self.reason,
        }


def cbs_comonotone_check(
    cap: IntervalCapacity,
    f: SampledFunction,
    g: SampledFunction,
    tol: float = 1e-8,
) -> CbsReport:
    """|Cov_T(-|f|, -|g|)| <= sqrt(D_T^2(-|f|)) sqrt(D_T^2(-|g|)).

    Requires |f| and |g| comonotone; other pairs are reported as skipped.
    The product of the unsigned variances D_T^2(|f|) D_T^2(|g|) is recorded
    for reference but never asserted.
    """
    _require_same_grid(f, g)
    _require_submodular(cap)
    abs_f, abs_g = np.abs(f.values), np.abs(g.values)
    verdict = is_comonotone(
        SampledFunction(f.interval, abs_f), SampledFunction(g.interval, abs_g)
    )
    if not verdict.comonotone:
        return CbsReport(SKIPPED, reason="|f| and |g| are not comonotone")
    one = float(cap.measure_length(cap.width))
    var_f = one * _T(cap, abs_f**2) - _T(cap, -abs_f) ** 2
    var_g = one * _T(cap, abs_g**2) - _T(cap, -abs_g) ** 2
    cov = one * _T(cap, abs_f * abs_g) - _T(cap, -abs_f) * _T(cap, -abs_g)
    lhs = abs(cov)
    rhs = math.sqrt(max(0.0, var_f)) * math.sqrt(max(0.0, var_g))
    unsigned = (one * _T(cap, abs_f**2) - _T(cap, abs_f) ** 2) * (
        one * _T(cap, abs_g**2) - _T(cap, abs_g) ** 2
    )
    holds = lhs <= rhs + tol
    return CbsReport(
        PASSED if holds else FAILED,
        lhs=lhs,
        rhs=rhs,
        slack=rhs - lhs,
        holds=holds,
        holds_lower=cov >= -rhs - tol,
        covariance=cov,
        variance_f=var_f,
        variance_g=var_g,
        unsigned_variance_product=unsigned,
    )


# ---------------------------------------------------------------------------
# Randomized suite
# ---------------------------------------------------------------------------


def _random_polynomial(rng: np.random.Generator, nodes: np.ndarray) -> np.ndarray:
    degree = int(rng.integers(1, 6))
    coeffs = rng.uniform(-2.0, 2.0, size=degree + 1)
    return np.polyval(coeffs, nodes)


def _random_piecewise(
    rng: np.random.Generator, nodes: np.ndarray, monotone: bool = False
) -> np.ndarray:
    a, b = float(nodes[0]), float(nodes[-1])
    knots = np.sort(np.concatenate([[a, b], rng.uniform(a, b, size=int(rng.integers(1, 6)))]))
    heights = rng.uniform(-3.0, 3.0, size=knots.size)
    if monotone:
        heights = np.sort(heights)
    return np.interp(nodes, knots, heights)


def _random_fn(rng: np.random.Generator, nodes: np.ndarray) -> np.ndarray:
    if rng.integers(2) == 0:
        return _random_polynomial(rng, nodes)
    return _random_piecewise(rng, nodes)


def _monotone_nonneg(rng: np.random.Generator, base: np.ndarray) -> np.ndarray:
    lo, hi = float(base.min()), float(base.max())
    span = (hi - lo) or 1.0
    xs = np.linspace(lo - 0.01 * span, hi + 0.01 * span, 6)
    ys = np.cumsum(rng.uniform(0.0, 1.5, size=6))
    return np.interp(base, xs, ys)


def run_inequality_properties(
    cap: IntervalCapacity,
    trials: int,
    seed: int,
    ps: tuple[float, ...] = (1.5, 2.0, 3.0, 10.0),
    grid_size: int = 256,
) -> PropertyReport:
    """Randomized Hölder / CBS / variance suite against one capacity.

    Non-submodular capacities skip every check (the functional is not
    sublinear, so none of the inequalities is claimed for them).
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    names = [
        "holder_slack",
        "holder_equality_diagonal",
        "holder_equality_proportional",
        "p1_qinf_chain",
        "modulus_bounds",
        "variance_nonnegative",
        "cbs_lower_bound",
        "cbs_diagonal",
    ]
    submodular = check_submodular_distortion(cap.distortion, 128).submodular
    if not submodular:
        return PropertyReport(
            suite="inequalities",
            capacity=cap.describe(),
            seed=seed,
            trials=trials,
            checks=tuple(
                skipped_check(n, "not applicable: capacity not submodular") for n in names
            ),
        )

    a, b = cap.interval
    nodes = np.linspace(a, b, grid_size + 1)
    one = float(cap.measure_length(cap.width))
    accs = {
        "holder_slack": CheckAccumulator("holder_slack", 1e-8),
        "holder_equality_diagonal": CheckAccumulator("holder_equality_diagonal", 1e-6),
        "holder_equality_proportional": CheckAccumulator("holder_equality_proportional", 1e-6),
        "p1_qinf_chain": CheckAccumulator("p1_qinf_chain", 1e-8),
        "modulus_bounds": CheckAccumulator("modulus_bounds", 1e-9),
        "variance_nonnegative": CheckAccumulator("variance_nonnegative", 1e-9),
        "cbs_lower_bound": CheckAccumulator("cbs_lower_bound", 1e-8),
        "cbs_diagonal": CheckAccumulator("cbs_diagonal", 1e-8),
    }

    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), trial]))
        payload = {"trial": trial}
        f = _random_fn(rng, nodes)
        g = _random_fn(rng, nodes)
        p = float(rng.choice(ps))
        q = p / (p - 1.0)

        lhs = _T(cap, np.abs(f * g))
        rhs = max(0.0, _T(cap, np.abs(f) ** p)) ** (1 / p) * max(
            0.0, _T(cap, np.abs(g) ** q)
        ) ** (1 / q)
        accs["holder_slack"].record(lhs - rhs, {**payload, "lhs": lhs, "rhs": rhs})

        lhs_d = _T(cap, f * f)
        rhs_d = max(0.0, _T(cap, np.abs(f) ** 2))
        accs["holder_equality_diagonal"].record(abs(lhs_d - rhs_d), dict(payload))

        f_pos = np.abs(f)
        scale = float(rng.uniform(0.1, 2.0))
        g_prop = scale * f_pos ** (p / q)
        lhs_p = _T(cap, np.abs(f_pos * g_prop))
        rhs_p = max(0.0, _T(cap, f_pos**p)) ** (1 / p) * max(
            0.0, _T(cap, g_prop**q)
        ) ** (1 / q)
        accs["holder_equality_proportional"].record(
            abs(lhs_p - rhs_p), {**payload, "lhs": lhs_p, "rhs": rhs_p}
        )

        t_fg = _T(cap, f * g)
        t_abs_fg = _T(cap, np.abs(f * g))
        bound = _T(cap, np.abs(f)) * float(np.abs(g).max())
        chain = max(abs(t_fg) - t_abs_fg, t_abs_fg - bound)
        accs["p1_qinf_chain"].record(chain, {**payload, "mid": t_abs_fg, "bound": bound})

        tf, tg = _T(cap, f), _T(cap, g)
        mod = max(abs(tf) - _T(cap, np.abs(f)), abs(tf - tg) - _T(cap, np.abs(f - g)))
        accs["modulus_bounds"].record(mod, dict(payload))

        var_neg = one * _T(cap, np.abs(f) ** 2) - _T(cap, -np.abs(f)) ** 2
        accs["variance_nonnegative"].record(-var_neg, {**payload, "value": var_neg})

        # Monotone base keeps the |f|, |g| cell interpolants comonotone.
        base = _random_piecewise(rng, nodes, monotone=True)
        sf = float(rng.choice([-1.0, 1.0])) * _monotone_nonneg(rng, base)
        sg = float(rng.choice([-1.0, 1.0])) * _monotone_nonneg(rng, base)
        af, ag = np.abs(sf), np.abs(sg)
        var_f = one * _T(cap, af**2) - _T(cap, -af) ** 2
        var_g = one * _T(cap, ag**2) - _T(cap, -ag) ** 2
        cov_c = one * _T(cap, af * ag) - _T(cap, -af) * _T(cap, -ag)
        rhs_c = math.sqrt(max(0.0, var_f)) * math.sqrt(max(0.0, var_g))
        accs["cbs_lower_bound"].record(-cov_c - rhs_c, {**payload, "cov": cov_c, "rhs": rhs_c})

        lhs_diag = abs(one * _T(cap, af * af) - _T(cap, -af) ** 2)
        accs["cbs_diagonal"].record(abs(lhs_diag - max(0.0, var_f)), dict(payload))

    checks = tuple(accs[name].finish() for name in names)
    return PropertyReport(
        suite="inequalities",
        capacity=cap.describe(),
        seed=seed,
        trials=trials,
        checks=checks,
    )
