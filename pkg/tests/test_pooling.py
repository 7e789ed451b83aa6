"""Tests for robust_xbar.pooling."""

import numpy as np
import pytest

from robust_xbar.core.errors import InvalidInputError, TableIncompleteError, UnsupportedCombinationError
from robust_xbar.core.types import LocationKind, ScaleKind, Subgroup
from robust_xbar.estimators import mad
from robust_xbar.factors import FactorTable, c4
from robust_xbar.pooling import (
    KIND_SCALE,
    PoolingType,
    blue_location_weights,
    blue_scale_weights,
    location_weights,
    pool_location,
    pool_scale,
    pooled_variance_factor,
    scale_weights,
    theoretical_variance_factor,
)

MEDIAN_NU_SQ = (0.29825, 0.28678)


def _analytic_table():
    return FactorTable(master_seed=0, replications=0, estimators=(), n_min=2, n_max=2)


class TestLocationWeights:
    def test_blue_weights(self):
        weights = blue_location_weights(MEDIAN_NU_SQ)
        assert weights == pytest.approx([0.49020, 0.50980], abs=5e-6)
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_equal_variances(self):
        assert blue_location_weights([0.2, 0.2, 0.2]) == pytest.approx([1 / 3] * 3)

    def test_mean_blue_equals_size_weighted(self):
        sizes = [3, 10, 17]
        nu_sq = [1.0 / n for n in sizes]
        assert location_weights(PoolingType.C, sizes, nu_sq) == pytest.approx(
            location_weights(PoolingType.B, sizes, nu_sq), abs=1e-15
        )

    def test_equal_sizes_collapse(self):
        sizes, nu_sq = [5, 5, 5], [0.3, 0.3, 0.3]
        a, b, c = (location_weights(p, sizes, nu_sq) for p in (PoolingType.A, PoolingType.B, PoolingType.C))
        assert a == pytest.approx(b) and b == pytest.approx(c)

    def test_median_reversal(self):
        """With the median at sizes (4, 5) the simple average beats the size-weighted one."""
        sizes = [4, 5]
        var_a = pooled_variance_factor(location_weights(PoolingType.A, sizes, MEDIAN_NU_SQ), None, MEDIAN_NU_SQ)
        var_b = pooled_variance_factor(location_weights(PoolingType.B, sizes, MEDIAN_NU_SQ), None, MEDIAN_NU_SQ)
        var_c = pooled_variance_factor(location_weights(PoolingType.C, sizes, MEDIAN_NU_SQ), None, MEDIAN_NU_SQ)
        assert var_a == pytest.approx(0.1462575, abs=1e-7)
        assert var_b == pytest.approx(0.147426, abs=1e-6)
        assert round(var_a, 3) == 0.146 and round(var_b, 3) == 0.147
        assert var_c <= var_a <= var_b
        assert var_c == pytest.approx(1.0 / sum(1.0 / v for v in MEDIAN_NU_SQ), rel=1e-12)

    def test_pooling_d_rejected(self):
        with pytest.raises(UnsupportedCombinationError):
            pool_location([1.0, 2.0], [3, 4], [0.3, 0.25], PoolingType.D)

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            pool_location([1.0, 2.0], [3, 4, 5], [0.3, 0.25, 0.2], PoolingType.A)

    def test_nonpositive_variance(self):
        with pytest.raises(InvalidInputError):
            blue_location_weights([0.3, 0.0])


class TestScaleWeights:
    def test_unbiasedness_constraint(self):
        gamma = np.array([0.80, 0.89, 0.94])
        tau_sq = np.array([0.36, 0.20, 0.12])
        for pooling in (PoolingType.A, PoolingType.B, PoolingType.C):
            weights = scale_weights(pooling, gamma, tau_sq)
            assert float(np.dot(weights, gamma)) == pytest.approx(1.0, abs=1e-12)

    def test_single_subgroup(self):
        assert blue_scale_weights([0.9], [0.2]) == pytest.approx([1 / 0.9])
        for pooling in (PoolingType.A, PoolingType.B, PoolingType.C):
            pooled = pool_scale([1.8], [0.9], [0.2], [5], pooling)
            assert pooled.value == pytest.approx(2.0)

    def test_pre_unbiased_inputs_give_inverse_variance(self):
        estimates, tau_sq = np.array([1.1, 0.9, 1.3]), np.array([0.3, 0.2, 0.1])
        pooled = pool_scale(estimates, [1.0, 1.0, 1.0], tau_sq, [3, 4, 6], PoolingType.C)
        expected = np.sum(estimates / tau_sq) / np.sum(1.0 / tau_sq)
        assert pooled.value == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("estimator", [ScaleKind.STDDEV, LocationKind.MEAN])
    def test_classical_chain(self, estimator):
        """Var(A) >= Var(B) >= Var(C) over random size configurations."""
        rng = np.random.default_rng(0)
        table = _analytic_table()
        for _ in range(200):
            sizes = rng.integers(2, 30, size=rng.integers(2, 8))
            a, b, c = (
                theoretical_variance_factor(estimator, p, sizes, table)
                for p in (PoolingType.A, PoolingType.B, PoolingType.C)
            )
            assert c <= b * (1 + 1e-12)
            assert b <= a * (1 + 1e-12)

    def test_d_for_shamos_rejected(self):
        samples = [Subgroup.of("1", [1.0, 2.0]), Subgroup.of("2", [3.0, 5.0])]
        with pytest.raises(UnsupportedCombinationError):
            pool_scale([], [], [], [2, 2], PoolingType.D, raw_subgroups=samples, estimator=ScaleKind.SHAMOS)

    def test_d_needs_raw_data(self):
        with pytest.raises(InvalidInputError):
            pool_scale([1.0], [0.9], [0.2], [4], PoolingType.D)


class TestPoolingD:
    def test_pooled_std_dev(self):
        samples = [Subgroup.of("1", [1.0, 2.0, 3.0]), Subgroup.of("2", [2.0, 6.0])]
        pooled = pool_scale([], [], [], [3, 2], PoolingType.D, raw_subgroups=samples)
        # sum of squares 2 + 8 over N - m = 3
        assert pooled.value == pytest.approx(np.sqrt(10.0 / 3.0) / c4(4), rel=1e-12)
        assert pooled.theoretical_var_factor == pytest.approx(1.0 / c4(4) ** 2 - 1.0)

    def test_pooled_mad(self, factor_table):
        samples = [Subgroup.of("1", [1.0, 2.0, 3.0, 4.0]), Subgroup.of("2", [2.0, 6.0, 9.0])]
        pooled = pool_scale(
            [], [], [], [4, 3], PoolingType.D, raw_subgroups=samples, estimator=ScaleKind.MAD, table=factor_table
        )
        raw = mad([1.0, 2.0, 3.0, 4.0, 2.0, 6.0, 9.0])
        assert pooled.value == pytest.approx(raw / factor_table.gamma(ScaleKind.MAD, 7), rel=1e-12)

    def test_pooled_mad_needs_total_size(self, factor_table):
        samples = [Subgroup.of(str(i), list(np.linspace(0, 1, 8) + i)) for i in range(3)]
        with pytest.raises(TableIncompleteError):
            pool_scale([], [], [], [8, 8, 8], PoolingType.D, raw_subgroups=samples,
                       estimator=ScaleKind.MAD, table=factor_table)


class TestTheoreticalVariance:
    def test_mean_size_weighted(self):
        table = _analytic_table()
        sizes = [3, 10, 17]
        assert theoretical_variance_factor(LocationKind.MEAN, PoolingType.B, sizes, table) == pytest.approx(1 / 30)

    def test_blue_is_optimal(self, factor_table):
        rng = np.random.default_rng(1)
        estimators = [
            LocationKind.MEAN,
            LocationKind.MEDIAN,
            LocationKind.HL1,
            ScaleKind.MAD,
            ScaleKind.SHAMOS,
            ScaleKind.STDDEV,
        ]
        for _ in range(1000):
            sizes = rng.integers(2, 21, size=rng.integers(2, 10))
            for estimator in estimators:
                a, b, c = (
                    theoretical_variance_factor(estimator, p, sizes, factor_table)
                    for p in (PoolingType.A, PoolingType.B, PoolingType.C)
                )
                assert c <= min(a, b) * (1 + 1e-12)

    def test_weights_are_returned(self, factor_table):
        sizes = [4, 5, 9]
        estimates = [mad(np.arange(n, dtype=float)) for n in sizes]
        gamma = [factor_table.gamma(ScaleKind.MAD, n) for n in sizes]
        tau_sq = [factor_table.var_std(ScaleKind.MAD, n) for n in sizes]
        pooled = pool_scale(estimates, gamma, tau_sq, sizes, PoolingType.C, estimator=ScaleKind.MAD)
        assert len(pooled.weights) == 3
        assert float(np.dot(pooled.weights, estimates)) == pytest.approx(pooled.value, rel=1e-14)
        assert pooled.theoretical_var_factor == pytest.approx(
            pooled_variance_factor(pooled.weights, gamma, tau_sq, KIND_SCALE)
        )
