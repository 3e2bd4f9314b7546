"""Augmented Dickey-Fuller screening and the difference-until-stationary loop."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np

from .core import ADF_LEVELS, ADF_SPECS, AnalysisConfig, TimeSeries, difference
from .errors import ConfigurationError, DegenerateSeriesError, InsufficientObservationsError
from .ols import RegressionResult, fit_ols

MIN_TABLE_OBS = 10


@lru_cache(maxsize=1)
def critical_value_table() -> dict[tuple[str, str], tuple[float, ...]]:
    """Response-surface coefficients keyed by (spec, level)."""
    text = resources.files("visitreg").joinpath("data/adf_critical_values.txt").read_text()
    table = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        spec, level, *coefs = line.split()
        table[(spec, level)] = tuple(float(c) for c in coefs)
    return table


def _surface(n_effective: int, spec: str, level: str) -> float:
    try:
        coefs = critical_value_table()[(spec, level)]
    except KeyError:
        raise ConfigurationError(
            f"no critical values for spec={spec!r}, level={level!r}; "
            f"specs {ADF_SPECS}, levels {ADF_LEVELS}"
        ) from None
    inv = 1.0 / n_effective
    return sum(b * inv**i for i, b in enumerate(coefs))


def mackinnon_critical_values(n_effective: int, spec: str = "constant", level: str = "10%") -> float:
    """Finite-sample left-tail critical value for the ADF t-ratio."""
    if spec not in ADF_SPECS:
        raise ConfigurationError(f"unsupported deterministic spec {spec!r}")
    if n_effective < MIN_TABLE_OBS:
        raise InsufficientObservationsError(
            f"response surface needs at least {MIN_TABLE_OBS} observations, got {n_effective}"
        )
    return _surface(n_effective, spec, level)


def rejects_unit_root(statistic: float, critical_value: float) -> bool:
    """Left-tail decision: reject the unit root when the statistic is below the critical value."""
    return statistic < critical_value


@dataclass(frozen=True, eq=False)
class AdfResult:
    statistic: float
    critical_values: dict[str, float]
    spec: str
    lags: int
    n_effective: int
    level: str
    reject_unit_root: bool
    regression: RegressionResult | None = field(default=None, repr=False)

    @property
    def critical_value(self) -> float:
        return self.critical_values[self.level]


@dataclass(frozen=True)
class StationarityRecord:
    label: str
    initially_stationary: bool
    diff_order_applied: int
    passes: tuple[AdfResult, ...]
    resolved: bool

    @property
    def final(self) -> AdfResult:
        return self.passes[-1]


def _values(series) -> tuple[np.ndarray, TimeSeries | None]:
    if isinstance(series, TimeSeries):
        return series.as_float(), series
    return np.asarray(series, dtype=float), None


def adf_test(
    series: TimeSeries | Sequence[float],
    spec: str = "constant",
    lags: int = 0,
    level: str = "10%",
) -> AdfResult:
    """Regress dy_t on the deterministic terms, y_{t-1} and ``lags`` lagged differences.

    The statistic is the t-ratio on y_{t-1}.
    """
    if spec not in ADF_SPECS:
        raise ConfigurationError(f"unsupported deterministic spec {spec!r}")
    if level not in ADF_LEVELS:
        raise ConfigurationError(f"unsupported level {level!r}")
    if lags < 0:
        raise ConfigurationError("lags must be non-negative")
    y, ts = _values(series)
    if y.size >= 1 and np.all(y == y[0]):
        raise DegenerateSeriesError("ADF test on a constant series")
    n_eff = y.size - 1 - lags
    n_params = 1 + lags + {"none": 0, "constant": 1, "trend": 2}[spec]
    if n_eff <= n_params:
        raise InsufficientObservationsError(
            f"ADF regression has {max(n_eff, 0)} observations for {n_params} parameters"
        )
    dy = np.diff(y)
    target = dy[lags:]
    regressors: dict[str, np.ndarray] = {"Y(-1)": y[lags:-1]}
    for i in range(1, lags + 1):
        regressors[f"D(Y(-{i}))"] = dy[lags - i: dy.size - i]
    if spec == "trend":
        regressors["@TREND"] = np.arange(1.0, n_eff + 1.0)

    fit = fit_ols(regressors, target, include_intercept=spec != "none", dependent="D(Y)")
    if ts is not None:
        start = ts.start_period.shift((lags + 1) * ts.frequency)
        end = ts.periods[-1]
        fit = replace(fit, sample_start=start, sample_end=end)
    rho = fit.coefficient("Y(-1)")
    if rho.t_statistic is None:
        raise DegenerateSeriesError("ADF regression fits exactly; t-ratio undefined")
    # the polynomial in 1/n diverges on tiny samples; hold it at its smallest fitted size
    crit = {lv: _surface(max(n_eff, MIN_TABLE_OBS), spec, lv) for lv in ADF_LEVELS}
    stat = rho.t_statistic
    return AdfResult(
        statistic=stat,
        critical_values=crit,
        spec=spec,
        lags=lags,
        n_effective=n_eff,
        level=level,
        reject_unit_root=rejects_unit_root(stat, crit[level]),
        regression=fit,
    )


def ensure_stationary(
    series: TimeSeries, config: AnalysisConfig | None = None
) -> tuple[TimeSeries, StationarityRecord]:
    """Difference ``series`` until the ADF test rejects a unit root or the order cap is hit."""
    config = config or AnalysisConfig()
    passes: list[AdfResult] = []
    current = series
    for order in range(config.max_diff_order + 1):
        result = adf_test(current, config.adf_spec, config.adf_lags, config.adf_level)
        passes.append(result)
        if result.reject_unit_root:
            break
        if order == config.max_diff_order:
            break
        current = difference(current)
    resolved = passes[-1].reject_unit_root
    return current, StationarityRecord(
        label=series.label,
        initially_stationary=passes[0].reject_unit_root,
        diff_order_applied=current.diff_order - series.diff_order,
        passes=tuple(passes),
        resolved=resolved,
    )
