"""Tests for robust_xbar.factors."""

import json
import math

import pytest

from robust_xbar.core.errors import FactorTableError, InvalidInputError, TableIncompleteError
from robust_xbar.core.types import ALL_ESTIMATORS, LocationKind, ScaleKind
from robust_xbar.factors import (
    FactorTableStore,
    analytic_moments,
    build_table,
    c4,
    load_table,
    save_table,
    simulate_standard_moments,
    standard_error,
    unbiasing_factor,
)
from robust_xbar.factors.table import dumps_table, missing_entries


class TestC4:
    def test_known_values(self):
        assert c4(2) == pytest.approx(math.sqrt(2.0 / math.pi), abs=1e-12)
        assert c4(5) == pytest.approx(0.9399856030, abs=1e-9)

    def test_large_n(self):
        assert c4(10 ** 6) == pytest.approx(1.0, abs=1e-6)

    def test_increasing(self):
        values = [c4(n) for n in range(2, 40)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert all(0 < v < 1 for v in values)

    def test_rejects_small_n(self):
        with pytest.raises(InvalidInputError):
            c4(1)


class TestAnalyticMoments:
    def test_mean(self):
        assert analytic_moments(LocationKind.MEAN, 4) == (0.0, 0.25)

    def test_std_dev(self):
        gamma, var_std = analytic_moments(ScaleKind.STDDEV, 5)
        assert gamma == c4(5)
        assert var_std == pytest.approx(1.0 - c4(5) ** 2)

    def test_simulated_estimators_have_none(self):
        assert analytic_moments(ScaleKind.MAD, 5) is None
        assert analytic_moments(LocationKind.MEDIAN, 5) is None


class TestSimulation:
    def test_deterministic(self):
        first = simulate_standard_moments(ScaleKind.MAD, 5, 10_000, seed=11)
        second = simulate_standard_moments(ScaleKind.MAD, 5, 10_000, seed=11)
        assert first == second

    def test_independent_of_workers(self):
        single = simulate_standard_moments(ScaleKind.SHAMOS, 6, 20_000, seed=3, workers=1, block_size=1000)
        threaded = simulate_standard_moments(ScaleKind.SHAMOS, 6, 20_000, seed=3, workers=4, block_size=1000)
        assert single == threaded

    def test_std_dev_matches_c4(self):
        reps = 40_000
        moments = simulate_standard_moments(ScaleKind.STDDEV, 4, reps, seed=5)
        assert abs(moments.gamma - c4(4)) < 4 * standard_error(moments, reps)

    def test_median_variance(self):
        """Var(median) at n = 4 and n = 5 is about 1.1930 / 4 and 1.4339 / 5."""
        reps = 100_000
        four = simulate_standard_moments(LocationKind.MEDIAN, 4, reps, seed=1)
        five = simulate_standard_moments(LocationKind.MEDIAN, 5, reps, seed=1)
        assert four.var_std == pytest.approx(1.1930 / 4, abs=0.006)
        assert five.var_std == pytest.approx(1.4339 / 5, abs=0.006)
        assert abs(four.gamma) < 0.01

    def test_location_free(self):
        """E[sigma_hat] / sigma is the same at (100, 10) and (0, 1) on the same draws."""
        reps = 20_000
        standard = simulate_standard_moments(ScaleKind.MAD, 7, reps, seed=9)
        shifted = simulate_standard_moments(ScaleKind.MAD, 7, reps, seed=9, mu=100.0, sigma=10.0)
        assert shifted.gamma / 10.0 == pytest.approx(standard.gamma, rel=1e-9)

    def test_rejects_few_replications(self):
        with pytest.raises(InvalidInputError):
            simulate_standard_moments(ScaleKind.MAD, 5, 9_999, seed=1)


class TestFactorTable:
    def test_cardinality(self, factor_table):
        assert len(factor_table.entries) == 6 * 19

    def test_round_trip(self, factor_table, tmp_path):
        path = tmp_path / "factors.json"
        save_table(factor_table, path)
        loaded = load_table(path)
        assert loaded.entries == factor_table.entries
        assert loaded.fingerprint == factor_table.fingerprint

    def test_byte_identical_rebuild(self, tmp_path):
        one = build_table([ScaleKind.MAD], (3, 5), 10_000, seed=2)
        two = build_table([ScaleKind.MAD], (3, 5), 10_000, seed=2)
        assert dumps_table(one) == dumps_table(two)

    def test_analytic_fallback(self, factor_table):
        entry = factor_table.lookup(ScaleKind.STDDEV, 7)
        assert entry.gamma == c4(7)
        assert entry.source == "analytic"
        assert factor_table.var_std(LocationKind.MEAN, 8) == 1.0 / 8

    def test_missing_entry(self, factor_table):
        with pytest.raises(TableIncompleteError) as info:
            factor_table.gamma(ScaleKind.MAD, 25)
        assert info.value.estimator == "MAD"
        assert info.value.n == 25

    def test_incomplete_file(self, factor_table, tmp_path):
        document = factor_table.to_document()
        document["entries"] = [
            e for e in document["entries"] if not (e["estimator"] == "MAD" and e["n"] == 17)
        ]
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(document))
        with pytest.raises(TableIncompleteError):
            load_table(path)

    def test_checksum_mismatch(self, factor_table, tmp_path):
        document = factor_table.to_document()
        document["entries"][0]["gamma"] += 1e-9
        path = tmp_path / "tampered.json"
        path.write_text(json.dumps(document))
        with pytest.raises(FactorTableError):
            load_table(path)

    def test_version_mismatch(self, factor_table, tmp_path):
        document = factor_table.to_document()
        document["version"] = "robust-xbar-factors/0"
        path = tmp_path / "old.json"
        path.write_text(json.dumps(document))
        with pytest.raises(FactorTableError):
            load_table(path)

    def test_unbiasing_factor(self, factor_table):
        assert unbiasing_factor(ScaleKind.STDDEV, 5) == pytest.approx(0.9399856030, abs=1e-9)
        assert unbiasing_factor(ScaleKind.MAD, 5, factor_table) == factor_table.gamma(ScaleKind.MAD, 5)
        with pytest.raises(TableIncompleteError):
            unbiasing_factor(ScaleKind.SHAMOS, 5)

    def test_unbiased_scale(self, factor_table):
        """gamma is E[estimator] at N(0, 1), so estimator / gamma is unbiased for sigma."""
        reps = 20_000
        for estimator in (ScaleKind.MAD, ScaleKind.SHAMOS):
            moments = simulate_standard_moments(estimator, 6, reps, seed=99)
            ratio = moments.gamma / factor_table.gamma(estimator, 6)
            assert abs(ratio - 1.0) < 6 * math.sqrt(moments.var_std / reps) / moments.gamma

    def test_monotone_variances(self, factor_table):
        for estimator in (LocationKind.HL1, ScaleKind.SHAMOS):
            values = [factor_table.var_std(estimator, n) for n in range(5, 15)]
            assert all(b < a for a, b in zip(values, values[1:]))
        for start in (5, 6):
            values = [factor_table.var_std(LocationKind.MEDIAN, n) for n in range(start, 21, 2)]
            assert all(b < a for a, b in zip(values, values[1:]))

    def test_squared_factor_ratio(self, factor_table):
        entry = factor_table.lookup(ScaleKind.MAD, 9)
        assert factor_table.squared_factor_ratio(ScaleKind.MAD, 9) == pytest.approx(entry.gamma ** 2 / entry.var_std, rel=1e-15)
        with pytest.raises(InvalidInputError):
            factor_table.squared_factor_ratio(LocationKind.MEDIAN, 9)

    def test_supplements(self, factor_table):
        extra = build_table([ScaleKind.MAD], (30, 30), 10_000, seed=7)
        combined = factor_table.with_supplements(extra)
        assert combined.gamma(ScaleKind.MAD, 30) == extra.gamma(ScaleKind.MAD, 30)
        assert combined.gamma(ScaleKind.MAD, 5) == factor_table.gamma(ScaleKind.MAD, 5)
        assert combined.fingerprint.startswith(factor_table.fingerprint)
        pairs = [(ScaleKind.MAD, 5), (ScaleKind.MAD, 31), (ScaleKind.MAD, 30), (ScaleKind.MAD, 31)]
        assert missing_entries(combined, pairs) == [(ScaleKind.MAD, 31)]

    def test_invalid_range(self):
        with pytest.raises(InvalidInputError):
            build_table(ALL_ESTIMATORS, (5, 3), 10_000, seed=1)


def _cached_files(base):
    return sorted(p.name for p in (base / "tables").glob("*.json"))


class TestStore:
    def test_cache_hit(self, tmp_path):
        store = FactorTableStore(str(tmp_path))
        first = store.load_or_build([ScaleKind.MAD], (3, 4), 10_000, seed=1)
        assert len(_cached_files(tmp_path)) == 1
        second = store.load_or_build([ScaleKind.MAD], (3, 4), 10_000, seed=1)
        assert second.entries == first.entries

    def test_block_size_is_part_of_the_key(self, tmp_path):
        store = FactorTableStore(str(tmp_path))
        default = store.load_or_build([ScaleKind.MAD], (3, 3), 10_000, seed=1)
        small = store.load_or_build([ScaleKind.MAD], (3, 3), 10_000, seed=1, block_size=2_500)
        assert len(_cached_files(tmp_path)) == 2
        assert small.gamma(ScaleKind.MAD, 3) != default.gamma(ScaleKind.MAD, 3)

    def test_corrupt_cache_is_rebuilt(self, tmp_path):
        store = FactorTableStore(str(tmp_path))
        key = store.key([ScaleKind.MAD], (3, 3), 10_000, 1)
        with open(store._get_file_path(key), "w") as handle:
            handle.write("{not json")
        assert store.get(key) is None
        table = store.load_or_build([ScaleKind.MAD], (3, 3), 10_000, seed=1)
        assert table.covers(ScaleKind.MAD, 3)

    def test_ensure_table(self, tmp_path):
        store = FactorTableStore(str(tmp_path))
        table = store.ensure_table(
            [LocationKind.MEDIAN, ScaleKind.MAD], [3, 5, 4], 10_000, seed=1, extra=[(ScaleKind.MAD, 12)]
        )
        assert (table.n_min, table.n_max) == (3, 5)
        assert table.covers(ScaleKind.MAD, 12)
        assert not table.covers(ScaleKind.MAD, 11)
        assert len(_cached_files(tmp_path)) == 2

    def test_ensure_table_reuses_covered_extras(self, tmp_path):
        store = FactorTableStore(str(tmp_path))
        table = store.ensure_table([ScaleKind.MAD], [3, 6], 10_000, seed=1, extra=[(ScaleKind.MAD, 5)] * 2)
        assert table.supplements == ()
        assert len(_cached_files(tmp_path)) == 1

    def test_ensure_table_analytic_only(self, tmp_path):
        store = FactorTableStore(str(tmp_path))
        table = store.ensure_table([LocationKind.MEAN, ScaleKind.STDDEV], [3, 5], 10_000, seed=1)
        assert table.entries == {}
        assert _cached_files(tmp_path) == []
        assert table.gamma(ScaleKind.STDDEV, 4) == c4(4)
