import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from visitreg.core import Period, TimeSeries
from visitreg.errors import (
    ConfigurationError,
    DegenerateResidualsError,
    InsufficientObservationsError,
    SingularDesignError,
)
from visitreg.numerics import student_t_two_sided_p
from visitreg.ols import durbin_watson, fit_ols, fit_restricted, summarize_fit

seeds = st.integers(0, 2**32 - 1)


def random_fit(seed, n=20, k=2, intercept=True):
    rng = np.random.default_rng(seed)
    xs = {f"X{j}": rng.normal(10, 3, n) for j in range(k)}
    y = 5 + sum((j + 1) * x for j, x in enumerate(xs.values())) + rng.normal(0, 2, n)
    return xs, y, fit_ols(xs, y, include_intercept=intercept)


class TestSummarizeFit:
    @pytest.mark.parametrize("n,ssr,ll,aic,sc,hq,se", [
        (22, 30345061, -186.7248, 17.06589, 17.11548, 17.07757, 1202.083),
        (23, 19851032, -189.8207, 16.59311, None, None, 949.9051),
        (23, 22893393, -191.4605, 16.73570, None, None, None),
    ])
    def test_reference_blocks(self, n, ssr, ll, aic, sc, hq, se):
        s = summarize_fit(n, 1, ssr, np.arange(n, dtype=float))
        assert s.log_likelihood == pytest.approx(ll, abs=0.001)
        assert s.aic == pytest.approx(aic, abs=5e-5)
        if sc is not None:
            assert s.schwarz == pytest.approx(sc, abs=5e-6)
            assert s.hannan_quinn == pytest.approx(hq, abs=5e-6)
        if se is not None:
            assert s.se_of_regression == pytest.approx(se, abs=5e-4)

    def test_perfect_suppresses_likelihood(self):
        s = summarize_fit(5, 2, 0.0, [1, 2, 3, 4, 5])
        assert s.perfect_fit and s.log_likelihood is None and s.aic is None

    def test_n_not_above_k(self):
        with pytest.raises(InsufficientObservationsError):
            summarize_fit(2, 2, 1.0, [1, 2])


class TestFitOls:
    def test_exact_line(self):
        fit = fit_ols({"X": [1, 2, 3, 4]}, [2, 4, 6, 8])
        assert fit.coefficient("X").estimate == pytest.approx(2.0, abs=1e-12)
        assert fit.coefficient("C").estimate == pytest.approx(0.0, abs=1e-12)
        assert fit.r_squared == 1.0
        assert fit.perfect_fit
        assert fit.log_likelihood is None and fit.durbin_watson is None

    def test_hand_example(self):
        fit = fit_ols({"X": [1, 2, 3, 4]}, [2, 3, 5, 6])
        assert fit.coefficient("X").estimate == pytest.approx(1.4, rel=1e-12)
        assert fit.coefficient("C").estimate == pytest.approx(0.5, rel=1e-12)
        assert fit.sum_squared_resid == pytest.approx(0.2, rel=1e-12)
        assert fit.r_squared == pytest.approx(0.98, rel=1e-12)

    def test_singular(self):
        with pytest.raises(SingularDesignError):
            fit_ols({"A": [1, 2, 3, 4], "B": [2, 4, 6, 8]}, [1, 3, 2, 5])

    def test_length_mismatch(self):
        with pytest.raises(ConfigurationError):
            fit_ols({"A": [1, 2, 3]}, [1, 2, 3, 4])

    def test_sample_periods_from_series(self):
        x = TimeSeries("X", Period(2009, 1), np.array([1.0, 2, 4, 3]))
        fit = fit_ols({"X": x}, TimeSeries("Y", Period(2009, 1), np.array([2.0, 3, 9, 5])))
        assert (fit.sample_start, fit.sample_end) == (Period(2009, 1), Period(2009, 4))

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(10, 30), st.integers(1, 3), st.booleans())
    def test_result_invariants(self, seed, n, k, intercept):
        xs, y, fit = random_fit(seed, n, k, intercept)
        np.testing.assert_allclose(fit.fitted + fit.residuals, y, rtol=1e-9)
        assert 0.0 <= fit.durbin_watson <= 4.0
        assert fit.adjusted_r_squared <= fit.r_squared
        if intercept:
            assert 0.0 <= fit.r_squared <= 1.0
            assert abs(fit.residuals.mean()) <= 1e-9 * np.abs(y).max()
        for c in fit.coefficients:
            assert c.t_statistic == pytest.approx(c.estimate / c.std_error, rel=1e-12)
            assert c.p_value == pytest.approx(student_t_two_sided_p(c.t_statistic, n - fit.k), rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.floats(0.01, 1000.0))
    def test_response_scaling_equivariance(self, seed, a):
        xs, y, fit = random_fit(seed, 18, 2)
        scaled = fit_ols(xs, a * y)
        assert scaled.sum_squared_resid == pytest.approx(a * a * fit.sum_squared_resid, rel=1e-8)
        assert scaled.r_squared == pytest.approx(fit.r_squared, rel=1e-9)
        assert scaled.durbin_watson == pytest.approx(fit.durbin_watson, rel=1e-9)
        for c0, c1 in zip(fit.coefficients, scaled.coefficients):
            assert c1.estimate == pytest.approx(a * c0.estimate, rel=1e-8, abs=1e-9 * a)
            assert c1.std_error == pytest.approx(a * c0.std_error, rel=1e-8)
            assert c1.t_statistic == pytest.approx(c0.t_statistic, rel=1e-7, abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(10, 30), st.integers(2, 4))
    def test_matches_normal_equations(self, seed, n, k):
        xs, y, fit = random_fit(seed, n, k)
        X = np.column_stack([np.ones(n)] + list(xs.values()))
        ref = oracles.ols(X, y)
        np.testing.assert_allclose([c.estimate for c in fit.coefficients], ref["beta"], rtol=1e-9)
        np.testing.assert_allclose([c.std_error for c in fit.coefficients], ref["se"], rtol=1e-9)

    def test_f_statistic_matches_r_squared(self):
        _, _, fit = random_fit(3, 25, 3)
        r2, n, k = fit.r_squared, fit.n, fit.k
        assert fit.f_statistic == pytest.approx((r2 / (k - 1)) / ((1 - r2) / (n - k)), rel=1e-9)

    def test_intercept_only_has_no_f(self):
        fit = fit_ols({}, [1.0, 3.0, 2.0, 5.0])
        assert fit.f_statistic is None and fit.f_p_value is None

    def test_sd_dependent_uses_n_minus_one(self):
        _, y, fit = random_fit(9)
        assert fit.sd_dependent == pytest.approx(np.std(y, ddof=1))


class TestFitRestricted:
    def test_hand_intercept(self):
        fit = fit_restricted({"X": 2.0}, {"X": [1, 2, 3]}, [3, 5, 8])
        assert fit.coefficient("C(1)").estimate == pytest.approx(4 / 3, rel=1e-12)
        assert fit.k == 1 and fit.f_statistic is None

    def test_exact_restriction(self):
        fit = fit_restricted({"X": 2.0}, {"X": [1, 2, 3, 5]}, [2, 4, 6, 10])
        assert fit.coefficient("C(1)").estimate == pytest.approx(0.0, abs=1e-12)
        assert fit.r_squared == 1.0

    def test_name_mismatch(self):
        with pytest.raises(ConfigurationError):
            fit_restricted({"X": 2.0}, {"Z": [1, 2, 3]}, [3, 5, 8])

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.lists(st.floats(-10, 10), min_size=2, max_size=2))
    def test_restriction_cannot_improve_fit(self, seed, slopes):
        xs, y, free = random_fit(seed, 20, 2)
        fixed = fit_restricted(dict(zip(xs, slopes)), xs, y)
        assert fixed.r_squared <= free.r_squared + 1e-12

    def test_intercept_se(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=15)
        y = 3 * x + rng.normal(size=15)
        fit = fit_restricted({"X": 3.0}, {"X": x}, y)
        c = fit.coefficient("C(1)")
        assert c.std_error == pytest.approx(fit.se_of_regression / np.sqrt(15), rel=1e-12)


class TestDurbinWatson:
    def test_constant_residuals(self):
        assert durbin_watson([2.5, 2.5, 2.5]) == 0.0

    def test_alternating(self):
        assert durbin_watson([1, -1, 1, -1]) == pytest.approx(3.0)

    def test_linear(self):
        assert durbin_watson([1, 2, 3]) == pytest.approx(1 / 7)

    def test_zero(self):
        with pytest.raises(DegenerateResidualsError):
            durbin_watson([0, 0, 0])

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50).filter(lambda v: any(abs(x) > 1e-3 for x in v)))
    def test_range(self, e):
        assert 0.0 <= durbin_watson(e) <= 4.0
