import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ols
from visitreg.core import AnalysisConfig, Period, TimeSeries
from visitreg.errors import ConfigurationError, DegenerateSeriesError, InsufficientObservationsError
from visitreg.stationarity import (
    adf_test,
    critical_value_table,
    ensure_stationary,
    mackinnon_critical_values,
    rejects_unit_root,
)

# 23 monthly observations each; statistics frozen from an independent run
REJECTING = [1000, 1002, 990, 956, 1117, 1155, 1144, 1152, 980, 1082, 986, 971,
             1105, 933, 800, 775, 1044, 1023, 1090, 1004, 826, 928, 1046]
NEEDS_ONE_DIFF = [1000, 997, 1057, 865, 780, 772, 963, 1089, 1086, 1096, 997, 881,
                  976, 1061, 1028, 819, 917, 963, 901, 1020, 1156, 1178, 1119]
NO_CONSTANT = [52, -9, -128, -113, 122, -6, 20, -21, 54, 80, 103, 146, 188, 157,
               134, 46, -16, 103, 62, 92, 35, 56, -38]


def series(values, label="X"):
    return TimeSeries(label, Period(2008, 6), np.asarray(values))


class TestCriticalValues:
    @pytest.mark.parametrize("n,spec,expected,tol", [
        (22, "constant", -2.65, 0.02),
        (23, "constant", -2.64, 0.02),
        (23, "none", -1.60, 0.03),
        (22, "none", -1.60, 0.03),
    ])
    def test_small_sample_values(self, n, spec, expected, tol):
        assert mackinnon_critical_values(n, spec, "10%") == pytest.approx(expected, abs=tol)

    def test_unsupported_spec(self):
        with pytest.raises(ConfigurationError):
            mackinnon_critical_values(30, "drift")

    def test_too_few_observations(self):
        with pytest.raises(InsufficientObservationsError):
            mackinnon_critical_values(9)

    @pytest.mark.parametrize("n", [10, 22, 23, 50, 100, 500, 10_000])
    def test_matches_statsmodels_table(self, n):
        from statsmodels.tsa.adfvalues import mackinnoncrit
        for spec, reg in (("none", "n"), ("constant", "c"), ("trend", "ct")):
            ref = mackinnoncrit(N=1, regression=reg, nobs=n)
            for level, value in zip(("1%", "5%", "10%"), ref):
                assert mackinnon_critical_values(n, spec, level) == pytest.approx(value, abs=1e-9)

    def test_more_negative_at_stricter_levels(self):
        for spec in ("none", "constant", "trend"):
            for n in (15, 40, 200):
                cv = [mackinnon_critical_values(n, spec, lv) for lv in ("1%", "5%", "10%")]
                assert cv[0] < cv[1] < cv[2]

    def test_table_complete(self):
        assert len(critical_value_table()) == 9


class TestDecisionRule:
    @pytest.mark.parametrize("stat,cv,reject", [
        (-2.85, -2.65, True), (-2.15, -2.64, False), (-2.2, -1.60, True), (-2.64, -2.64, False),
    ])
    def test_left_tail(self, stat, cv, reject):
        assert rejects_unit_root(stat, cv) is reject

    def test_rejecting_fixture(self):
        r = adf_test(series(REJECTING))
        assert r.n_effective == 22
        assert r.statistic == pytest.approx(-2.84735, abs=1e-5)
        assert r.critical_value == pytest.approx(-2.65, abs=0.02)
        assert r.reject_unit_root

    def test_non_rejecting_fixture(self):
        r = adf_test(series(NEEDS_ONE_DIFF))
        assert r.statistic == pytest.approx(-2.15793, abs=1e-5)
        assert not r.reject_unit_root

    def test_no_constant_fixture(self):
        r = adf_test(series(NO_CONSTANT), spec="none")
        assert r.statistic == pytest.approx(-2.2, abs=0.005)
        assert r.critical_value == pytest.approx(-1.60, abs=0.03)
        assert r.reject_unit_root


class TestAdfRegression:
    def test_hand_oracle(self):
        # rho = -19/46, SSR = 167/46, var(rho) = 835/6348, worked by hand
        r = adf_test([1, 2, 2, 3, 5, 4])
        assert r.statistic == pytest.approx(-1.1388617071549785, rel=1e-12)
        assert r.statistic == pytest.approx((-19 / 46) / np.sqrt(835 / 6348), rel=1e-12)

    @pytest.mark.parametrize("spec,lags", [("none", 0), ("constant", 2), ("trend", 1)])
    def test_normal_equations_oracle(self, spec, lags):
        y = np.asarray(REJECTING, dtype=float)
        dy = np.diff(y)
        t = dy[lags:]
        cols = [y[lags:-1]] + [dy[lags - i: dy.size - i] for i in range(1, lags + 1)]
        if spec != "none":
            cols.insert(0, np.ones(t.size))
        if spec == "trend":
            cols.append(np.arange(1.0, t.size + 1))
        ref = ols(np.column_stack(cols), t)
        j = 0 if spec == "none" else 1
        r = adf_test(y, spec, lags)
        assert r.statistic == pytest.approx(ref["beta"][j] / ref["se"][j], rel=1e-9)
        assert r.n_effective == t.size

    def test_constant_series(self):
        with pytest.raises(DegenerateSeriesError):
            adf_test([4, 4, 4, 4])

    def test_too_short(self):
        with pytest.raises(InsufficientObservationsError):
            adf_test([1, 3, 2])

    def test_sample_periods_after_adjustment(self):
        r = adf_test(series(REJECTING), lags=1)
        assert r.regression.sample_start == Period(2008, 8)
        assert r.regression.n == 21

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 1000.0), st.floats(-1e5, 1e5))
    def test_affine_invariance_with_constant(self, seed, a, b):
        y = np.random.default_rng(seed).normal(size=30).cumsum()
        base = adf_test(y).statistic
        assert abs(adf_test(a * y + b).statistic - base) <= 1e-8


class TestEnsureStationary:
    def test_already_stationary(self):
        out, rec = ensure_stationary(series(REJECTING))
        assert rec.diff_order_applied == 0 and rec.initially_stationary and rec.resolved
        assert out.diff_order == 0

    def test_one_difference(self):
        out, rec = ensure_stationary(series(NEEDS_ONE_DIFF, "RSV"))
        assert rec.diff_order_applied == 1
        assert not rec.initially_stationary and rec.resolved
        assert len(rec.passes) == 2
        assert out.diff_order == 1 and len(out) == 22
        assert out.start_period == Period(2008, 7)

    def test_exhausted_sample(self):
        cfg = AnalysisConfig(adf_spec="none", max_diff_order=2)
        with pytest.raises(InsufficientObservationsError):
            ensure_stationary(series([1, 3, 4]), cfg)

    def test_cap_leaves_unresolved(self):
        walk = np.random.default_rng(1).normal(size=60).cumsum() + 100
        _, rec = ensure_stationary(series(walk), AnalysisConfig(max_diff_order=0))
        assert rec.diff_order_applied == 0
        assert rec.resolved == rec.initially_stationary
