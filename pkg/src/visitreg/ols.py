"""Least-squares fits with the summary block of a classic regression printout.

Two estimators live here: ordinary least squares with free slopes, and the
restricted fit where slopes are fixed in advance and only the intercept
``C(1)`` is estimated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import Period, TimeSeries
from .errors import (
    ConfigurationError,
    DegenerateResidualsError,
    InsufficientObservationsError,
)
from .numerics import DesignMatrix, f_sf, least_squares_solve, student_t_two_sided_p

INTERCEPT = "C"
RESTRICTED_INTERCEPT = "C(1)"

_LOG_2PI = math.log(2.0 * math.pi)
# residual norm below this fraction of the response norm counts as an exact fit
_PERFECT_FIT_RTOL = 1e-10


@dataclass(frozen=True)
class Coefficient:
    name: str
    estimate: float
    std_error: float
    t_statistic: float | None
    p_value: float | None


@dataclass(frozen=True)
class FitSummary:
    se_of_regression: float
    log_likelihood: float | None
    aic: float | None
    schwarz: float | None
    hannan_quinn: float | None
    mean_dependent: float
    sd_dependent: float
    perfect_fit: bool


@dataclass(frozen=True, eq=False)
class RegressionResult:
    dependent: str
    coefficients: tuple[Coefficient, ...]
    n: int
    k: int
    design: DesignMatrix
    response: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    r_squared: float | None
    adjusted_r_squared: float | None
    se_of_regression: float
    sum_squared_resid: float
    log_likelihood: float | None
    aic: float | None
    schwarz: float | None
    hannan_quinn: float | None
    durbin_watson: float | None
    mean_dependent: float
    sd_dependent: float
    f_statistic: float | None
    f_p_value: float | None
    intercept_included: bool
    perfect_fit: bool
    used_differenced_inputs: bool = False
    fixed_slopes: Mapping[str, float] = field(default_factory=dict)
    fixed_regressors: Mapping[str, np.ndarray] = field(default_factory=dict)
    sample_start: Period | None = None
    sample_end: Period | None = None

    def coefficient(self, name: str) -> Coefficient:
        for c in self.coefficients:
            if c.name == name:
                return c
        raise ConfigurationError(
            f"no coefficient {name!r} (have {[c.name for c in self.coefficients]})"
        )

    @property
    def params(self) -> dict[str, float]:
        return {c.name: c.estimate for c in self.coefficients}

    @property
    def slopes(self) -> tuple[Coefficient, ...]:
        return tuple(c for c in self.coefficients if c.name not in (INTERCEPT, RESTRICTED_INTERCEPT))

    @property
    def restricted(self) -> bool:
        return bool(self.fixed_slopes)


def durbin_watson(residuals) -> float:
    e = np.asarray(residuals, dtype=float)
    if e.size < 2:
        raise InsufficientObservationsError("Durbin-Watson needs at least 2 residuals")
    denom = float(e @ e)
    if denom == 0.0:
        raise DegenerateResidualsError("Durbin-Watson undefined for all-zero residuals")
    d = np.diff(e)
    return float(d @ d) / denom


def summarize_fit(n: int, k: int, ssr: float, response, perfect_fit: bool | None = None) -> FitSummary:
    """Likelihood-based summary fields computed from (n, k, SSR) and the response.

    A perfect fit (``ssr == 0`` unless the caller decides otherwise) leaves the
    likelihood fields as ``None`` instead of infinities.
    """
    if n <= k:
        raise InsufficientObservationsError(f"need n > k (n={n}, k={k})")
    if ssr < 0:
        raise ConfigurationError("sum of squared residuals must be non-negative")
    y = np.asarray(response, dtype=float)
    perfect = ssr == 0 if perfect_fit is None else perfect_fit
    mean_dep = float(y.mean())
    sd_dep = float(y.std(ddof=1)) if y.size > 1 else 0.0
    se = math.sqrt(ssr / (n - k))
    if perfect:
        return FitSummary(se, None, None, None, None, mean_dep, sd_dep, True)
    ll = -0.5 * n * (1.0 + _LOG_2PI + math.log(ssr / n))
    return FitSummary(
        se_of_regression=se,
        log_likelihood=ll,
        aic=(-2.0 * ll + 2.0 * k) / n,
        schwarz=(-2.0 * ll + k * math.log(n)) / n,
        hannan_quinn=(-2.0 * ll + 2.0 * k * math.log(math.log(n))) / n,
        mean_dependent=mean_dep,
        sd_dependent=sd_dep,
        perfect_fit=False,
    )


def _as_vector(x) -> tuple[np.ndarray, TimeSeries | None]:
    if isinstance(x, TimeSeries):
        return x.as_float(), x
    return np.asarray(x, dtype=float), None


def _sample(series: Sequence[TimeSeries | None]) -> tuple[Period | None, Period | None]:
    for ts in series:
        if ts is not None:
            periods = ts.periods
            return periods[0], periods[-1]
    return None, None


def _is_perfect(ssr: float, y: np.ndarray) -> bool:
    return ssr <= (_PERFECT_FIT_RTOL ** 2) * max(float(y @ y), 1e-300)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def fit_ols(
    regressors: Mapping[str, Sequence[float] | TimeSeries],
    response: Sequence[float] | TimeSeries,
    include_intercept: bool = True,
    dependent: str = "Y",
) -> RegressionResult:
    """Ordinary least squares of ``response`` on the named regressors."""
    y, y_ts = _as_vector(response)
    n = y.size
    columns: dict[str, np.ndarray] = {}
    sources: list[TimeSeries | None] = [y_ts]
    if include_intercept:
        columns[INTERCEPT] = np.ones(n)
    for name, x in regressors.items():
        if name in columns:
            raise ConfigurationError(f"duplicate regressor name {name!r}")
        vec, ts = _as_vector(x)
        if vec.shape != (n,):
            raise ConfigurationError(f"regressor {name!r} has length {vec.size}, response has {n}")
        columns[name] = vec
        sources.append(ts)
    if not columns:
        raise ConfigurationError("no regressors and no intercept")
    X = DesignMatrix.from_columns(columns)
    k = X.k
    beta, xtx_inv = least_squares_solve(X, y)
    fitted = X.matrix @ beta
    resid = y - fitted
    ssr = float(resid @ resid)
    perfect = _is_perfect(ssr, y)
    summary = summarize_fit(n, k, ssr, y, perfect_fit=perfect)

    dev = y - y.mean()
    sst = float(dev @ dev)
    if perfect:
        r2 = 1.0 if sst > 0 else None
    else:
        r2 = 1.0 - ssr / sst if sst > 0 else None
    # same as 1 - (1 - R2)(n - 1)/(n - k), but never rounds above R2
    adj = None if r2 is None else r2 - (1.0 - r2) * (k - 1) / (n - k)

    dof = n - k
    sigma2 = ssr / dof
    coefs = []
    for j, name in enumerate(X.column_names):
        se = math.sqrt(max(sigma2 * xtx_inv[j, j], 0.0))
        if perfect or se == 0.0:
            t = p = None
        else:
            t = float(beta[j]) / se
            p = student_t_two_sided_p(t, dof)
        coefs.append(Coefficient(name, float(beta[j]), se, t, p))

    n_slopes = k - 1 if include_intercept else k
    f_stat = f_p = None
    if n_slopes >= 1 and not perfect:
        # joint nullity of every slope; without an intercept the null model is y = 0
        null_ss = sst if include_intercept else float(y @ y)
        f_stat = ((null_ss - ssr) / n_slopes) / (ssr / dof)
        f_p = f_sf(max(f_stat, 0.0), n_slopes, dof)

    start, end = _sample(sources)
    return RegressionResult(
        dependent=dependent,
        coefficients=tuple(coefs),
        n=n,
        k=k,
        design=X,
        response=_frozen(y),
        fitted=_frozen(fitted),
        residuals=_frozen(resid),
        r_squared=r2,
        adjusted_r_squared=adj,
        se_of_regression=summary.se_of_regression,
        sum_squared_resid=ssr,
        log_likelihood=summary.log_likelihood,
        aic=summary.aic,
        schwarz=summary.schwarz,
        hannan_quinn=summary.hannan_quinn,
        durbin_watson=None if perfect else durbin_watson(resid),
        mean_dependent=summary.mean_dependent,
        sd_dependent=summary.sd_dependent,
        f_statistic=f_stat,
        f_p_value=f_p,
        intercept_included=include_intercept,
        perfect_fit=perfect,
        sample_start=start,
        sample_end=end,
    )


def fit_restricted(
    fixed_slopes: Mapping[str, float],
    regressors: Mapping[str, Sequence[float] | TimeSeries],
    response: Sequence[float] | TimeSeries,
    dependent: str = "PAGEVIEWS",
) -> RegressionResult:
    """Fit ``response = sum(slope * regressor) + C(1)`` with every slope held fixed."""
    if set(fixed_slopes) != set(regressors):
        raise ConfigurationError(
            f"fixed slopes {sorted(fixed_slopes)} do not match regressors {sorted(regressors)}"
        )
    y, y_ts = _as_vector(response)
    n = y.size
    if n < 2:
        raise InsufficientObservationsError("restricted fit needs at least 2 observations")
    offset = np.zeros(n)
    sources: list[TimeSeries | None] = [y_ts]
    fixed_x: dict[str, np.ndarray] = {}
    for name, slope in fixed_slopes.items():
        x, ts = _as_vector(regressors[name])
        if x.shape != (n,):
            raise ConfigurationError(f"regressor {name!r} has length {x.size}, response has {n}")
        offset += float(slope) * x
        fixed_x[name] = _frozen(x)
        sources.append(ts)
    z = y - offset
    c = float(z.mean())
    fitted = offset + c
    resid = y - fitted
    ssr = float(resid @ resid)
    perfect = _is_perfect(ssr, y)
    summary = summarize_fit(n, 1, ssr, y, perfect_fit=perfect)

    dev = y - y.mean()
    sst = float(dev @ dev)
    if perfect:
        r2 = 1.0 if sst > 0 else None
    else:
        r2 = 1.0 - ssr / sst if sst > 0 else None

    se = summary.se_of_regression / math.sqrt(n)
    if perfect or se == 0.0:
        t = p = None
    else:
        t = c / se
        p = student_t_two_sided_p(t, n - 1)
    start, end = _sample(sources)
    return RegressionResult(
        dependent=dependent,
        coefficients=(Coefficient(RESTRICTED_INTERCEPT, c, se, t, p),),
        n=n,
        k=1,
        design=DesignMatrix((RESTRICTED_INTERCEPT,), np.ones((n, 1))),
        response=_frozen(y),
        fitted=_frozen(fitted),
        residuals=_frozen(resid),
        r_squared=r2,
        adjusted_r_squared=r2,
        se_of_regression=summary.se_of_regression,
        sum_squared_resid=ssr,
        log_likelihood=summary.log_likelihood,
        aic=summary.aic,
        schwarz=summary.schwarz,
        hannan_quinn=summary.hannan_quinn,
        durbin_watson=None if perfect else durbin_watson(resid),
        mean_dependent=summary.mean_dependent,
        sd_dependent=summary.sd_dependent,
        f_statistic=None,
        f_p_value=None,
        intercept_included=True,
        perfect_fit=perfect,
        fixed_slopes={k: float(v) for k, v in fixed_slopes.items()},
        fixed_regressors=fixed_x,
        sample_start=start,
        sample_end=end,
    )
