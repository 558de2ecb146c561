"""Partition function, its gradient, and the normalized density."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplexmetric import (
    DomainError,
    MetricParam,
    PartitionEngine,
    SimplexPoint,
    UnsupportedDimensionError,
    coefficient_series,
    convolve,
    log_density,
    log_partition,
    log_partition_bruteforce,
    log_partition_gradient,
    log_volume_element,
    loglikelihood,
    partition_table,
)

rng = np.random.default_rng(42)


def random_param(n_outcomes: int, floor: float = 0.01) -> MetricParam:
    raw = rng.dirichlet(np.ones(n_outcomes)) + floor
    return MetricParam(raw / raw.sum())


def logsumexp(values) -> float:
    arr = np.asarray(values, dtype=np.float64)
    top = arr.max()
    if not np.isfinite(top):
        return float(top)
    return float(top + np.log(np.exp(arr - top).sum()))


class TestCoefficientSeries:
    def test_first_values(self):
        """c_0 = sqrt(pi)/2 and c_1 = 3 sqrt(pi)/4."""
        series = coefficient_series(3)
        assert math.isclose(series.coefficient(0), math.sqrt(math.pi) / 2, rel_tol=1e-14)
        assert math.isclose(series.coefficient(1), 3 * math.sqrt(math.pi) / 4, rel_tol=1e-14)

    def test_ratio_recurrence(self):
        """Consecutive coefficients satisfy c_{m+1}/c_m = (m + 3/2)/(m + 1)."""
        series = coefficient_series(50)
        logs = series.log_values()
        for m in range(50):
            ratio = math.exp(logs[m + 1] - logs[m])
            assert math.isclose(ratio, (m + 1.5) / (m + 1.0), rel_tol=1e-12)

    def test_rescaled_maximum_is_one(self):
        series = coefficient_series(2048)
        assert series.values.max() == 1.0
        assert np.all(series.values > 0.0)
        assert np.all(np.isfinite(series.log_values()))

    def test_negative_order_rejected(self):
        with pytest.raises(DomainError):
            coefficient_series(-1)


class TestConvolve:
    def test_binomial_anchor(self):
        np.testing.assert_allclose(convolve([1.0, 1.0], [1.0, 1.0]), [1.0, 2.0, 1.0])

    def test_delta_identity(self):
        a = rng.random(10)
        np.testing.assert_allclose(convolve(a, [1.0]), a, rtol=0, atol=0)

    @given(
        st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=80),
        st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=80),
    )
    @settings(max_examples=60, deadline=None)
    def test_fft_matches_direct(self, a, b):
        """The two routes agree to 1e-10 relative to the largest coefficient."""
        direct = convolve(a, b, mode="direct")
        fft = convolve(a, b, mode="fft")
        scale = float(direct.max())
        np.testing.assert_allclose(fft, direct, rtol=0, atol=1e-10 * scale)

    def test_truncation_is_exact_prefix(self):
        a, b = rng.random(20), rng.random(20)
        full = convolve(a, b)
        np.testing.assert_allclose(convolve(a, b, length=7), full[:7], rtol=0, atol=0)

    def test_padding_beyond_full_length(self):
        out = convolve([1.0, 1.0], [1.0], length=5)
        np.testing.assert_allclose(out, [1.0, 1.0, 0.0, 0.0, 0.0])

    def test_unknown_mode_rejected(self):
        with pytest.raises(DomainError):
            convolve([1.0], [1.0], mode="magic")


class TestLogPartition:
    def test_binary_value_is_constant(self):
        """For two outcomes the value is log(3 pi / 8) whatever the parameter."""
        expected = math.log(3 * math.pi / 8)
        for _ in range(10):
            lam = random_param(2)
            result = log_partition(lam)
            assert math.isclose(result.value, expected, rel_tol=1e-12)
            assert result.n == 1 and result.k == 1

    @pytest.mark.parametrize("n_outcomes", [2, 4, 6])
    def test_matches_bruteforce(self, n_outcomes):
        for _ in range(20):
            lam = random_param(n_outcomes)
            fast = log_partition(lam).value
            slow = log_partition_bruteforce(lam)
            assert math.isclose(fast, slow, rel_tol=1e-10)

    def test_permutation_invariance(self):
        lam = random_param(6)
        shuffled = MetricParam(lam.weights[::-1].copy())
        assert math.isclose(
            log_partition(lam).value, log_partition(shuffled).value, rel_tol=1e-10
        )

    def test_homogeneity(self):
        """Scaling the weights by c adds k log c: the polynomial is degree-k homogeneous."""
        engine = PartitionEngine(6)
        w = random_param(6).weights
        base = engine.log_partition(w)
        for c in (0.25, 3.0, 1e3):
            scaled = engine.log_partition(c * w)
            assert math.isclose(scaled, base + 3 * math.log(c), rel_tol=1e-10)

    def test_odd_outcome_count_rejected(self):
        with pytest.raises(UnsupportedDimensionError):
            log_partition(MetricParam([0.2, 0.3, 0.5]))
        with pytest.raises(UnsupportedDimensionError):
            PartitionEngine(3)

    def test_tiny_coordinates_match_bruteforce(self):
        """Weights down to 1e-12 stay oracle-consistent."""
        for n_outcomes in (2, 4, 6):
            w = np.full(n_outcomes, 1.0 / n_outcomes)
            w[0] = 1e-12
            w /= w.sum()
            lam = MetricParam(w)
            assert math.isclose(
                log_partition(lam).value, log_partition_bruteforce(lam), rel_tol=1e-10
            )


class TestConvolutionTable:
    def test_rows_rescaled_to_one(self):
        table = partition_table(random_param(6))
        np.testing.assert_allclose(table.rows.max(axis=1), 1.0, rtol=0, atol=0)

    def test_last_row_is_the_series(self):
        lam = random_param(4)
        table = partition_table(lam)
        logs = coefficient_series(table.k).log_values()
        for m in range(table.k + 1):
            expected = logs[m] + m * math.log(lam.weights[-1])
            assert math.isclose(table.log_value(4, m), expected, rel_tol=1e-12)

    def test_recurrence(self):
        """Each row convolves its coordinate's series with the row below."""
        lam = random_param(4)
        table = partition_table(lam)
        logs = coefficient_series(table.k).log_values()
        for coord in (1, 2, 3):
            for degree in range(table.k + 1):
                terms = [
                    logs[m]
                    + m * math.log(lam.weights[coord - 1])
                    + table.log_value(coord + 1, degree - m)
                    for m in range(degree + 1)
                ]
                assert math.isclose(
                    table.log_value(coord, degree), logsumexp(terms), rel_tol=1e-10
                )

    def test_top_entry_is_the_partition_value(self):
        lam = random_param(6)
        assert math.isclose(
            partition_table(lam).log_value(1, 3),
            log_partition(lam).value,
            rel_tol=1e-12,
        )

    def test_index_bounds(self):
        table = partition_table(random_param(4))
        with pytest.raises(DomainError):
            table.log_value(0, 0)
        with pytest.raises(DomainError):
            table.log_value(1, table.k + 1)


class TestGradient:
    def test_binary_anchor(self):
        """With two outcomes the gradient is (1,1)/(sum of weights)."""
        lam = random_param(2)
        np.testing.assert_allclose(log_partition_gradient(lam), 1.0, rtol=1e-10)

    def test_matches_finite_differences(self):
        engine = PartitionEngine(4)
        h = 1e-6
        for _ in range(5):
            w = random_param(4).weights
            grad = engine.gradient(w)
            for i in range(4):
                wp, wm = w.copy(), w.copy()
                wp[i] += h
                wm[i] -= h
                fd = (engine.log_partition(wp) - engine.log_partition(wm)) / (2 * h)
                assert math.isclose(grad[i], fd, rel_tol=1e-6)

    @pytest.mark.parametrize("n_outcomes", [2, 4, 6, 10])
    def test_euler_identity(self, n_outcomes):
        """Degree-k homogeneity forces weights . gradient = k."""
        lam = random_param(n_outcomes)
        total = float(lam.weights @ log_partition_gradient(lam))
        assert math.isclose(total, n_outcomes // 2, rel_tol=1e-8)

    def test_strictly_positive(self):
        grad = log_partition_gradient(random_param(8))
        assert np.all(grad > 0.0)


class TestBruteforce:
    def test_term_limit_guard(self):
        lam = MetricParam.uniform(40)
        with pytest.raises(DomainError):
            log_partition_bruteforce(lam)

    def test_binary_closed_form(self):
        lam = MetricParam([0.3, 0.7])
        assert math.isclose(
            log_partition_bruteforce(lam), math.log(3 * math.pi / 8), rel_tol=1e-14
        )


class TestLogDensity:
    def test_binary_density_ratio(self):
        """p(x)/p(y) = (x.lam) sqrt(x1 x2) / ((y.lam) sqrt(y1 y2)) at two outcomes."""
        lam = random_param(2)
        x, y = SimplexPoint([0.3, 0.7]), SimplexPoint([0.6, 0.4])
        got = log_density(lam, x) - log_density(lam, y)
        expected = (
            math.log(float(x.coords @ lam.weights))
            + 0.5 * math.log(0.3 * 0.7)
            - math.log(float(y.coords @ lam.weights))
            - 0.5 * math.log(0.6 * 0.4)
        )
        assert math.isclose(got, expected, rel_tol=1e-12)

    def test_tracks_inverse_volume(self):
        """Density differences equal negated volume-element differences:
        the parameter-only terms cancel between two points."""
        lam = random_param(4)
        x = SimplexPoint(rng.dirichlet(np.ones(4)) * 0.9 + 0.025)
        y = SimplexPoint(rng.dirichlet(np.ones(4)) * 0.9 + 0.025)
        density_gap = log_density(lam, x) - log_density(lam, y)
        volume_gap = log_volume_element(lam, x) - log_volume_element(lam, y)
        assert math.isclose(density_gap, -volume_gap, rel_tol=1e-10)

    def test_binary_quadrature_normalizes(self):
        """Gauss-Legendre in the angle variable integrates the density to one."""
        nodes, weights = np.polynomial.legendre.leggauss(64)
        phi = 0.25 * math.pi * (nodes + 1.0)
        scale = 0.25 * math.pi
        lam = random_param(2)
        total = 0.0
        for angle, weight in zip(phi, weights):
            s = math.sin(angle) ** 2
            point = SimplexPoint([s, 1.0 - s])
            jacobian = math.sin(2.0 * angle)
            total += weight * scale * jacobian * math.exp(log_density(lam, point))
        assert math.isclose(total, 1.0, rel_tol=1e-10)

    def test_boundary_rejected(self):
        with pytest.raises(DomainError):
            log_density(random_param(2), SimplexPoint([0.0, 1.0]))

    def test_dimension_mismatch(self):
        from simplexmetric import DimensionMismatchError

        with pytest.raises(DimensionMismatchError):
            log_density(random_param(4), SimplexPoint.uniform(2))


class TestLoglikelihood:
    def test_matches_direct_formula(self):
        lam = random_param(4)
        points = [SimplexPoint(rng.dirichlet(np.ones(4)) * 0.9 + 0.025) for _ in range(7)]
        expected = 2 * sum(
            math.log(float(p.coords @ lam.weights)) for p in points
        ) - 7 * log_partition(lam).value
        assert math.isclose(loglikelihood(lam, points), expected, rel_tol=1e-12)

    def test_one_sided_data_drifts_to_vertex(self):
        """With two outcomes the partition term is constant, so data leaning
        toward the first coordinate makes the likelihood increase toward
        that vertex along a parameter grid."""
        points = [SimplexPoint([0.7, 0.3]), SimplexPoint([0.8, 0.2]), SimplexPoint([0.65, 0.35])]
        grid = np.linspace(0.1, 0.9, 17)
        values = [loglikelihood(MetricParam([w, 1.0 - w]), points) for w in grid]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_empty_data_rejected(self):
        from simplexmetric import DataError

        with pytest.raises(DataError):
            loglikelihood(random_param(2), [])

    def test_boundary_point_rejected(self):
        with pytest.raises(DomainError):
            loglikelihood(random_param(2), [SimplexPoint([1.0, 0.0])])
