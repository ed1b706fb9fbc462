import math

import numpy as np
import pytest

from choquetkit.capacity import Distortion
from choquetkit.choquet import SampledFunction
from choquetkit.errors import DomainError, PreconditionError, WindowError
from choquetkit.operators import (
    OperatorSpec,
    Truncation,
    baskakov_kc,
    bernstein_kc,
    binomial_weights,
    cell_mean,
    eval_grid,
    negative_binomial_weights,
    poisson_weights,
    szasz_kc,
)

IDENT = Distortion.identity()
MOEB = Distortion.moebius()


class TestWeights:
    @pytest.mark.parametrize("n", [1, 5, 50, 128, 1000])
    @pytest.mark.parametrize("x", [0.0, 0.17, 0.5, 0.99, 1.0])
    def test_binomial_sum_and_sign(self, n, x):
        w = binomial_weights(n, x)
        assert w.shape == (n + 1,)
        assert np.all(w >= 0)
        assert abs(w.sum() - 1.0) < 1e-12

    def test_binomial_mean(self):
        w = binomial_weights(128, 0.37)
        assert np.dot(np.arange(129), w) == pytest.approx(128 * 0.37, abs=1e-9)

    def test_binomial_large_degree(self):
        w = binomial_weights(10_000, 0.3)
        assert abs(w.sum() - 1.0) < 1e-9
        assert np.dot(np.arange(10_001), w) == pytest.approx(3000.0, rel=1e-9)

    def test_poisson_matches_direct(self):
        lam = 4.0
        w = poisson_weights(lam, 40)
        direct = [math.exp(-lam) * lam**k / math.factorial(k) for k in range(41)]
        assert np.allclose(w, direct, rtol=1e-12)

    def test_negative_binomial_matches_direct(self):
        n, x = 8, 0.5
        w = negative_binomial_weights(n, x, 60)
        direct = [math.comb(n + k - 1, k) * x**k / (1 + x) ** (n + k) for k in range(61)]
        assert np.allclose(w, direct, rtol=1e-11)

    def test_degenerate_points(self):
        assert binomial_weights(5, 0.0)[0] == 1.0
        assert binomial_weights(5, 1.0)[5] == 1.0
        assert poisson_weights(0.0, 10)[0] == 1.0
        assert negative_binomial_weights(3, 0.0, 10)[0] == 1.0

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            binomial_weights(5, 1.5)
        with pytest.raises(DomainError):
            negative_binomial_weights(3, -0.1, 10)


class TestCellMean:
    def test_constant_is_exact(self):
        f = SampledFunction.constant(2.5, (0.0, 1.0), 64)
        assert cell_mean(f, MOEB, (0.0, 1.0)) == 2.5

    def test_identity_gives_midpoint(self):
        n = 7
        k = 3
        cell = (k / (n + 1), (k + 1) / (n + 1))
        f = SampledFunction.from_callable(lambda t: t, cell, 64)
        assert cell_mean(f, IDENT, cell) == pytest.approx((2 * k + 1) / (2 * (n + 1)), abs=1e-6)

    def test_power_half_closed_form(self):
        f = SampledFunction.from_callable(lambda t: t, (0.0, 1.0), 64)
        assert cell_mean(f, Distortion.power(0.5), (0.0, 1.0)) == pytest.approx(2 / 3, abs=1e-3)

    def test_cell_outside_domain(self):
        f = SampledFunction.from_callable(lambda t: t, (0.0, 0.5), 64)
        with pytest.raises(DomainError):
            cell_mean(f, IDENT, (0.25, 0.75))


class TestBernstein:
    def test_constant_one(self):
        for n in (1, 5, 20):
            for x in (0.0, 0.33, 1.0):
                assert bernstein_kc(lambda t: 1.0, n, MOEB, x) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 5, 10, 50])
    def test_identity_distortion_closed_form(self, n):
        for x in np.linspace(0.0, 1.0, 11):
            expected = (2 * n * x + 1) / (2 * (n + 1))
            assert bernstein_kc(lambda t: t, n, IDENT, x) == pytest.approx(expected, abs=1e-6)

    def test_x_zero_is_first_cell_mean(self):
        n = 4
        got = bernstein_kc(lambda t: t, n, IDENT, 0.0)
        assert got == pytest.approx(1 / (2 * (n + 1)), abs=1e-9)

    def test_x_outside_domain(self):
        with pytest.raises(DomainError):
            bernstein_kc(lambda t: t, 3, IDENT, 1.2)

    def test_square_closed_form(self):
        # classical Kantorovich value for f(t) = t^2; the per-cell sampling
        # is trapezoid-exact only for piecewise-linear f, so allow its error
        n = 20
        for x in (0.2, 0.7):
            k2 = sum(
                binomial_weights(n, x)[k]
                * ((3 * k * (k + 1) + 1) / (3 * (n + 1) ** 2))
                for k in range(n + 1)
            )
            assert bernstein_kc(lambda t: t * t, n, IDENT, x) == pytest.approx(k2, abs=1e-6)


class TestSzaszBaskakov:
    def test_szasz_constant(self):
        value, report = szasz_kc(lambda t: 1.0, 8, MOEB, 0.5, window=(0.0, 4.0))
        assert value == pytest.approx(1.0, abs=1e-12)
        assert report.tail_bound < 1e-12

    def test_szasz_identity_mean(self):
        n = 8
        value, _ = szasz_kc(lambda t: t, n, IDENT, 0.5, window=(0.0, 4.0))
        assert value == pytest.approx(0.5 + 1 / (2 * n), abs=1e-6)

    def test_szasz_x_zero(self):
        n = 8
        value, report = szasz_kc(lambda t: t, n, IDENT, 0.0, window=(0.0, 1.0))
        assert value == pytest.approx(1 / (2 * n), abs=1e-12)
        assert report.terms == 1

    def test_szasz_window_error_names_required(self):
        with pytest.raises(WindowError) as err:
            szasz_kc(lambda t: t, 8, IDENT, 2.0, window=(0.0, 4.0))
        assert err.value.required_b > 4.0

    def test_baskakov_identity_mean(self):
        n = 8
        value, _ = baskakov_kc(lambda t: t, n, IDENT, 0.5, window=(0.0, 8.0))
        assert value == pytest.approx(0.5 + 1 / (2 * n), abs=1e-6)

    def test_baskakov_x_zero(self):
        value, _ = baskakov_kc(lambda t: t, 8, IDENT, 0.0, window=(0.0, 1.0))
        assert value == pytest.approx(1 / 16, abs=1e-12)

    def test_baskakov_against_direct_summation(self):
        # long-range direct sum with explicit binomials as an oracle
        n, x = 2, 1.0
        mean = 0.0
        mass = 0.0
        for k in range(0, 2000):
            w = math.comb(n + k - 1, k) * x**k / (1 + x) ** (n + k)
            mean += w * (2 * k + 1) / (2 * n)
            mass += w
            if w < 1e-300 and k > 100:
                break
        assert mass == pytest.approx(1.0, abs=1e-12)
        value, _ = baskakov_kc(lambda t: t, n, IDENT, x, window=(0.0, 40.0))
        assert value == pytest.approx(mean, abs=1e-9)

    def test_truncation_mass_reported(self):
        value, report = szasz_kc(lambda t: t, 8, MOEB, 0.4, window=(0.0, 4.0))
        assert report.retained_mass == pytest.approx(1.0, abs=1e-11)
        assert report.terms >= 8 * 0.4


class TestOperatorProperties:
    def setup_method(self):
        self.rng = np.random.default_rng(123)

    def _random_monotone(self):
        knots = np.sort(np.concatenate([[0.0, 1.0], self.rng.uniform(0, 1, 3)]))
        heights = np.sort(self.rng.uniform(-2.0, 2.0, knots.size))
        return lambda t, k=knots, h=heights: float(np.interp(t, k, h))

    def _random_fn(self):
        knots = np.sort(np.concatenate([[0.0, 1.0], self.rng.uniform(0, 1, 3)]))
        heights = self.rng.uniform(-2.0, 2.0, knots.size)
        return lambda t, k=knots, h=heights: float(np.interp(t, k, h))

    def test_monotone_in_f(self):
        for _ in range(10):
            f = self._random_fn()
            bump = self._random_fn()
            g = lambda t: f(t) + abs(bump(t))
            for x in (0.0, 0.5, 0.9):
                assert bernstein_kc(f, 6, MOEB, x) <= bernstein_kc(g, 6, MOEB, x) + 1e-9

    def test_positive_homogeneity(self):
        f = self._random_fn()
        for a in (0.0, 0.7, 2.5):
            for x in (0.25, 0.75):
                left = bernstein_kc(lambda t: a * f(t), 5, MOEB, x)
                assert left == pytest.approx(a * bernstein_kc(f, 5, MOEB, x), abs=1e-10)

    def test_subadditive_for_submodular(self):
        for _ in range(10):
            f, g = self._random_fn(), self._random_fn()
            for x in (0.3, 0.8):
                both = bernstein_kc(lambda t: f(t) + g(t), 6, MOEB, x)
                assert both <= bernstein_kc(f, 6, MOEB, x) + bernstein_kc(g, 6, MOEB, x) + 1e-9

    def test_comonotone_additive(self):
        for _ in range(10):
            f, g = self._random_monotone(), self._random_monotone()
            for x in (0.2, 0.6):
                both = bernstein_kc(lambda t: f(t) + g(t), 6, MOEB, x)
                parts = bernstein_kc(f, 6, MOEB, x) + bernstein_kc(g, 6, MOEB, x)
                assert both == pytest.approx(parts, abs=1e-9)


class TestCellMeanRecords:
    def test_bernstein_layout(self):
        from choquetkit.operators import cell_mean_records

        spec = OperatorSpec("bernstein", 4, IDENT)
        records = cell_mean_records(spec, lambda t: t)
        assert len(records) == 5
        for rec in records:
            lo, hi = rec.cell
            assert hi - lo == pytest.approx(1 / 5, abs=1e-15)
            assert rec.value == pytest.approx((lo + hi) / 2, abs=1e-9)


class TestEvalGrid:
    def test_constant_grid(self):
        spec = OperatorSpec("bernstein", 5, MOEB)
        assert eval_grid(spec, lambda t: 1.0, [0.0, 0.5, 1.0]) == pytest.approx([1.0] * 3)

    def test_singleton_matches_pointwise(self):
        spec = OperatorSpec("bernstein", 9, MOEB)
        [value] = eval_grid(spec, lambda t: t * t, [0.4])
        assert value == bernstein_kc(lambda t: t * t, 9, MOEB, 0.4)

    def test_identity_closed_form_grid(self):
        n = 10
        spec = OperatorSpec("bernstein", n, IDENT)
        xs = np.linspace(0.0, 1.0, 101)
        values = eval_grid(spec, lambda t: t, xs)
        expected = (2 * n * xs + 1) / (2 * (n + 1))
        assert np.max(np.abs(np.asarray(values) - expected)) < 1e-6

    def test_window_error_carries_index(self):
        spec = OperatorSpec("szasz", 8, IDENT, window=(0.0, 1.0))
        with pytest.raises(WindowError) as err:
            eval_grid(spec, lambda t: t, [0.0, 3.0])
        assert "point 1" in str(err.value)

    def test_spec_validation(self):
        with pytest.raises(PreconditionError):
            OperatorSpec("unknown", 3, IDENT)
        with pytest.raises(PreconditionError):
            OperatorSpec("bernstein", 0, IDENT)
        with pytest.raises(PreconditionError):
            Truncation(tail_tol=0.5)
