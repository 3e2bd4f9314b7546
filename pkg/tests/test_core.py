import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from visitreg.core import (
    AnalysisConfig,
    Period,
    SegmentDimension,
    SegmentedDataset,
    TimeSeries,
    difference,
    difference_n,
    validate_dataset,
)
from visitreg.errors import ConfigurationError, DegenerateSeriesError


def ts(values, start=Period(2008, 6)):
    return TimeSeries("x", start, np.asarray(values))


class TestPeriod:
    def test_parse_and_format(self):
        p = Period.parse("2009-03")
        assert (p.year, p.month) == (2009, 3)
        assert str(p) == "2009-03"

    def test_shift_crosses_year(self):
        assert Period(2008, 12).shift(1) == Period(2009, 1)
        assert Period(2009, 1).shift(-1) == Period(2008, 12)

    @pytest.mark.parametrize("bad", ["2009-3", "2009/03", "09-03", "2009-13"])
    def test_malformed(self, bad):
        with pytest.raises((ValueError, ConfigurationError)):
            Period.parse(bad)


class TestDifference:
    def test_definitional(self):
        d = difference(ts([1, 2, 4, 7]))
        assert d.values.tolist() == [1, 2, 3]
        assert d.diff_order == 1
        assert d.start_period == Period(2008, 7)

    def test_constant(self):
        assert difference(ts([5, 5, 5])).values.tolist() == [0, 0]

    def test_too_short(self):
        with pytest.raises(DegenerateSeriesError):
            difference(ts([3]))

    @given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=30), st.integers(0, 40))
    def test_repeated_differencing_bookkeeping(self, values, k):
        s = ts(values)
        if k >= len(values):
            with pytest.raises(DegenerateSeriesError):
                difference_n(s, k)
            return
        d = difference_n(s, k)
        assert len(d) == len(values) - k
        assert d.diff_order == k
        assert d.start_period == s.start_period.shift(k)

    def test_non_monthly_frequency(self):
        q = TimeSeries("q", Period(2008, 1), np.array([1.0, 3.0]), frequency=3)
        assert difference(q).start_period == Period(2008, 4)

    def test_values_are_immutable(self):
        s = ts([1, 2, 3])
        with pytest.raises(ValueError):
            s.values[0] = 9


class TestTimeSeriesInvariants:
    def test_empty_rejected(self):
        with pytest.raises(DegenerateSeriesError):
            ts([])

    def test_non_finite_rejected(self):
        with pytest.raises(ConfigurationError):
            ts([1.0, np.nan])


class TestSegmentDimension:
    def test_needs_two_levels(self):
        with pytest.raises(ConfigurationError):
            SegmentDimension("type", ("new",))

    def test_unique_levels(self):
        with pytest.raises(ConfigurationError):
            SegmentDimension("type", ("new", "new"))


class TestValidateDataset:
    def test_consistent_data_ok(self, small_dataset):
        assert validate_dataset(small_dataset) == []

    def test_additivity_defect_names_period(self, small_dataset):
        bad_total = small_dataset.total_pageviews.values.copy()
        bad_total[1] += 3
        ds = SegmentedDataset(
            small_dataset.periods, small_dataset.dimensions, small_dataset.visits,
            small_dataset.pageviews, TimeSeries("pageviews", Period(2009, 1), bad_total),
        )
        out = validate_dataset(ds)
        assert {v.kind for v in out} == {"additivity"}
        assert {v.period for v in out} == {Period(2009, 2)}
        assert {v.dimension for v in out} == {"source", "type"}

    def test_negative_count(self):
        ds = SegmentedDataset.from_counts([Period(2009, 1), Period(2009, 2)], {
            "type": {"new": ([1, -2], [3, 0]), "returning": ([1, 4], [2, 5])},
        })
        out = validate_dataset(ds)
        assert any(v.kind == "negative count" and v.period == Period(2009, 2) for v in out)

    def test_cross_dimension_visit_mismatch(self):
        periods = [Period(2009, 2), Period(2009, 3)]
        ds = SegmentedDataset.from_counts(periods, {
            "source": {"search": ([5, 5], [10, 10]), "direct": ([5, 5], [10, 10])},
            "type": {"new": ([5, 6], [10, 10]), "returning": ([5, 5], [10, 10])},
        })
        out = validate_dataset(ds)
        assert [(v.kind, v.period) for v in out] == [("visit-consistency", Period(2009, 3))]

    def test_period_gap(self):
        ds = SegmentedDataset.from_counts([Period(2009, 1), Period(2009, 3)], {
            "type": {"new": ([1, 1], [1, 1]), "returning": ([1, 1], [1, 1])},
        })
        assert any(v.kind == "period-index" for v in validate_dataset(ds))


class TestAnalysisConfig:
    def test_defaults(self):
        c = AnalysisConfig()
        assert (c.alpha, c.r2_threshold, c.max_diff_order, c.adf_spec, c.adf_lags, c.bg_lags) == (
            0.05, 0.5, 2, "constant", 0, 2)

    @pytest.mark.parametrize("kwargs", [
        {"alpha": 0.0}, {"alpha": 1.0}, {"r2_threshold": 1.0}, {"adf_spec": "drift"},
        {"bg_lags": 0}, {"max_diff_order": -1}, {"adf_level": "2%"},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            AnalysisConfig(**kwargs)
