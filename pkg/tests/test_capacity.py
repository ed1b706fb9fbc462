import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choquetkit.capacity import (
    DiscreteCapacity,
    Distortion,
    IntervalCapacity,
    VectorCapacity,
    check_submodular,
    check_submodular_distortion,
    estimate_c,
    null_complement_check,
    parse_distortion,
)
from choquetkit.errors import DomainError, PreconditionError


def pairs_capacity():
    # singletons 0.2, pairs 0.6, full set 1: monotone but not submodular
    table = {0: 0.0, 1: 0.2, 2: 0.6, 3: 1.0}
    return DiscreteCapacity.from_set_function(3, lambda m: table[bin(m).count("1")])


class TestDistortion:
    def test_endpoints_exact(self):
        for d in (Distortion.identity(), Distortion.power(1.7), Distortion.moebius()):
            assert d(0.0) == 0.0
            assert d(1.0) == 1.0

    def test_moebius_formula(self):
        d = Distortion.moebius()
        assert d(0.5) == pytest.approx(2 * 0.5 / 1.5, abs=1e-15)

    def test_nondecreasing_on_grid(self):
        grid = np.linspace(0, 1, 257)
        for d in (Distortion.power(0.5), Distortion.moebius(), Distortion.power(3)):
            vals = d(grid)
            assert np.all(np.diff(vals) >= -1e-15)

    def test_tabulated_validation(self):
        d = Distortion.tabulated([0, 0.5, 1], [0, 0.8, 1])
        assert d(0.25) == pytest.approx(0.4)
        with pytest.raises(PreconditionError):
            Distortion.tabulated([0, 0.5, 1], [0, 0.8, 0.7])  # decreasing u
        with pytest.raises(PreconditionError):
            Distortion.tabulated([0, 0.6, 0.5, 1], [0, 0.5, 0.6, 1])  # t not increasing
        with pytest.raises(PreconditionError):
            Distortion.tabulated([0.1, 1], [0, 1])  # does not start at 0

    def test_power_requires_positive_alpha(self):
        with pytest.raises(PreconditionError):
            Distortion.power(0.0)

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            Distortion.moebius()(1.5)

    def test_dual_of_dual_is_base(self):
        d = Distortion.moebius()
        assert d.dual().dual() is d

    def test_identity_self_dual(self):
        d = Distortion.identity()
        assert d.dual() is d

    def test_parse_specs(self, tmp_path):
        assert parse_distortion("identity").kind == "identity"
        assert parse_distortion("moebius").kind == "moebius"
        assert parse_distortion("power:0.5").alpha == 0.5
        table = tmp_path / "u.csv"
        table.write_text("t,u\n0,0\n0.5,0.75\n1,1\n")
        d = parse_distortion(f"table:{table}")
        assert d(0.5) == pytest.approx(0.75)
        with pytest.raises(PreconditionError):
            parse_distortion("nope")
        with pytest.raises(PreconditionError):
            parse_distortion("power:zero")


class TestIntervalCapacity:
    def test_normalization(self):
        cap = IntervalCapacity((0.0, 1.0), Distortion.moebius())
        assert cap.measure([]) == 0.0
        assert cap.measure((0.0, 1.0)) == 1.0

    def test_moebius_length_rule(self):
        cap = IntervalCapacity((0.0, 1.0), Distortion.moebius())
        assert cap.measure((0.0, 0.5)) == pytest.approx(2 / 3, abs=1e-15)
        # value depends only on total length
        assert cap.measure([(0.0, 0.25), (0.5, 0.75)]) == pytest.approx(2 / 3, abs=1e-15)

    def test_monotone_in_nested_sets(self):
        cap = IntervalCapacity((0.0, 2.0), Distortion.power(0.5))
        rng = np.random.default_rng(0)
        for _ in range(100):
            lo = rng.uniform(0, 1)
            hi = rng.uniform(lo, 2)
            inner = (lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo))
            assert cap.measure(inner) <= cap.measure((lo, hi)) + 1e-12

    def test_domain_errors(self):
        cap = IntervalCapacity((0.0, 1.0), Distortion.identity())
        with pytest.raises(DomainError):
            cap.measure((-0.5, 0.5))
        with pytest.raises(DomainError):
            cap.measure([(0.0, 0.5), (0.4, 0.8)])  # overlap

    def test_dual_moebius_closed_form(self):
        cap = IntervalCapacity((0.0, 1.0), Distortion.moebius())
        dual = cap.dual()
        xs = np.linspace(0.0, 1.0, 1001)
        got = np.asarray(dual.measure_length(xs))
        assert np.max(np.abs(got - xs / (2.0 - xs))) < 1e-12

    def test_dual_identity_is_itself(self):
        cap = IntervalCapacity((0.0, 1.0), Distortion.identity())
        xs = np.linspace(0.0, 1.0, 101)
        assert np.allclose(cap.dual().measure_length(xs), xs, atol=1e-15)

    def test_dual_of_dual_roundtrip(self):
        cap = IntervalCapacity((0.0, 1.0), Distortion.power(0.5))
        xs = np.linspace(0.0, 1.0, 101)
        back = cap.dual().dual()
        assert np.allclose(back.measure_length(xs), cap.measure_length(xs), atol=1e-12)

    def test_requires_finite_interval(self):
        with pytest.raises(PreconditionError):
            IntervalCapacity((0.0, math.inf), Distortion.identity())


class TestDiscreteCapacity:
    def test_example_table(self):
        cap = pairs_capacity()
        assert cap.measure([0, 2]) == pytest.approx(0.6)
        assert cap.measure(0) == 0.0
        assert cap.normalized

    def test_dual_example(self):
        cap = pairs_capacity()
        # dual({i}) = 1 - value(other two) = 0.4
        assert cap.dual().measure([0]) == pytest.approx(0.4, abs=1e-15)

    def test_additive_self_dual(self):
        cap = DiscreteCapacity.additive([0.2, 0.3, 0.5])
        dual = cap.dual()
        assert np.allclose(cap.values, dual.values, atol=1e-12)

    def test_monotonicity_enforced(self):
        with pytest.raises(PreconditionError):
            DiscreteCapacity(2, [0.0, 0.5, 0.4, 0.3])

    def test_empty_set_enforced(self):
        with pytest.raises(PreconditionError):
            DiscreteCapacity(1, [0.1, 1.0])

    def test_ground_size_cap(self):
        with pytest.raises(PreconditionError):
            DiscreteCapacity(17, np.zeros(2**17))

    def test_subset_outside_domain(self):
        cap = pairs_capacity()
        with pytest.raises(DomainError):
            cap.measure([3])
        with pytest.raises(DomainError):
            cap.measure(9)

    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_dual_of_dual_random_tables(self, n, seed):
        rng = np.random.default_rng(seed)
        cap = random_monotone_capacity(rng, n)
        roundtrip = cap.dual().dual()
        assert np.max(np.abs(roundtrip.values - cap.values)) < 1e-12


def random_monotone_capacity(rng, n, normalized=True):
    values = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        parents = [values[mask & ~(1 << i)] for i in range(n) if mask & (1 << i)]
        values[mask] = max(parents) + rng.uniform(0.0, 1.0)
    if normalized:
        values /= values[-1]
    return DiscreteCapacity(n, values)


class TestSubmodularity:
    def test_additive_is_submodular(self):
        cap = DiscreteCapacity.additive([0.1, 0.2, 0.3, 0.4])
        assert check_submodular(cap).submodular

    def test_pairs_capacity_not_submodular(self):
        verdict = check_submodular(pairs_capacity())
        assert not verdict.submodular
        a, b = verdict.witness
        v = pairs_capacity().values
        assert v[a | b] + v[a & b] > v[a] + v[b]

    def test_sqrt_counting_submodular(self):
        cap = DiscreteCapacity.distorted_counting(6, lambda t: math.sqrt(t))
        assert check_submodular(cap).submodular

    @pytest.mark.parametrize(
        "distortion,expected",
        [
            (Distortion.moebius(), True),
            (Distortion.power(0.5), True),
            (Distortion.power(2), False),
            (Distortion.identity(), True),
        ],
    )
    def test_distortion_concavity(self, distortion, expected):
        verdict = check_submodular_distortion(distortion, 64)
        assert verdict.submodular is expected
        if not expected:
            s, t = verdict.witness
            assert distortion((s + t) / 2) < (distortion(s) + distortion(t)) / 2

    @pytest.mark.parametrize("alpha", [0.4, 0.7, 1.0, 2.0])
    def test_agrees_with_distorted_counting(self, alpha):
        # cross-check the two routes on u(|A| / n) tables for n <= 8
        d = Distortion.power(alpha)
        for n in (4, 8):
            table = DiscreteCapacity.distorted_counting(n, d)
            assert check_submodular(table).submodular == check_submodular_distortion(d, n).submodular

    def test_grid_size_precondition(self):
        with pytest.raises(PreconditionError):
            check_submodular_distortion(Distortion.identity(), 2)


class TestNullComplement:
    def test_strictly_positive_passes_vacuously(self):
        cap = DiscreteCapacity.additive([0.25, 0.25, 0.5])
        assert null_complement_check(cap).status == "passed"

    def test_concave_counting_passes(self):
        cap = DiscreteCapacity.distorted_counting(5, lambda t: math.sqrt(t))
        assert null_complement_check(cap).status == "passed"

    def test_non_submodular_skipped(self):
        report = null_complement_check(pairs_capacity())
        assert report.status == "skipped"
        assert "submodular" in report.reason

    def test_not_normalized_skipped(self):
        cap = DiscreteCapacity.additive([0.2, 0.2])
        assert null_complement_check(cap).status == "skipped"

    def test_violating_table_is_gated_not_failed(self):
        # A normalized table with a null set whose complement is not full
        # cannot be submodular (that is the theorem being checked), so the
        # gate must fire before any failure is reported.
        values = [0.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.5, 1.0]
        cap = DiscreteCapacity(3, values)
        assert not check_submodular(cap).submodular
        assert null_complement_check(cap).status == "skipped"


class TestEstimateC:
    def test_identity_is_one(self):
        assert estimate_c(Distortion.identity(), 1000).c == 1.0

    def test_moebius_near_four(self):
        est = estimate_c(Distortion.moebius(), 10_000)
        assert not est.unbounded
        assert abs(est.c - 4.0) < 0.05

    def test_power_half_unbounded(self):
        est = estimate_c(Distortion.power(0.5), 10_000)
        assert est.unbounded
        assert est.c is None

    def test_monotone_under_refinement(self):
        previous = 0.0
        for grid in (100, 200, 400, 800, 1600):
            c = estimate_c(Distortion.moebius(), grid).c
            assert c >= previous
            previous = c

    def test_power_two_bounded(self):
        est = estimate_c(Distortion.power(2), 1000)
        assert not est.unbounded
        assert est.c == pytest.approx(1.0, abs=1e-6)


class TestVectorCapacity:
    def test_componentwise(self):
        cap = pairs_capacity()
        vec = VectorCapacity((cap, cap.dual()))
        vals = vec.measure([0])
        assert vals[0] == pytest.approx(0.2)
        assert vals[1] == pytest.approx(0.4)

    def test_ground_size_mismatch(self):
        with pytest.raises(PreconditionError):
            VectorCapacity((pairs_capacity(), DiscreteCapacity.additive([0.5, 0.5])))
