"""Domain types: calendar periods, series, segmented datasets and analysis config."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateSeriesError

DEFAULT_DIMENSIONS: dict[str, tuple[str, ...]] = {
    "source": ("search", "direct", "referral"),
    "speed": ("unknown", "dsl", "cable", "t1", "dialup", "oc3"),
    "type": ("new", "returning"),
}

ADF_SPECS = ("none", "constant", "trend")
ADF_LEVELS = ("1%", "5%", "10%")

_PERIOD_RE = re.compile(r"^(\d{4})-(\d{2})$")


@dataclass(frozen=True, order=True)
class Period:
    """A calendar month, ordered by (year, month)."""

    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ConfigurationError(f"month out of range: {self.month}")

    @classmethod
    def parse(cls, text: str) -> Period:
        m = _PERIOD_RE.match(text.strip())
        if m is None:
            raise ValueError(f"malformed period {text!r}, expected YYYY-MM")
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def ordinal(self) -> int:
        return self.year * 12 + self.month - 1

    @classmethod
    def from_ordinal(cls, ordinal: int) -> Period:
        return cls(ordinal // 12, ordinal % 12 + 1)

    def shift(self, months: int) -> Period:
        return Period.from_ordinal(self.ordinal + months)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def period_range(start: Period, count: int, frequency: int = 1) -> tuple[Period, ...]:
    return tuple(start.shift(i * frequency) for i in range(count))


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values)
    if arr.dtype.kind not in "iuf":
        arr = arr.astype(float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Equally spaced series. ``frequency`` is the period length in months.

    Integer counts keep an integer dtype so additivity checks stay exact.
    """

    label: str
    start_period: Period
    values: np.ndarray
    frequency: int = 1
    diff_order: int = 0

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if arr.ndim != 1 or arr.size < 1:
            raise DegenerateSeriesError(f"series {self.label!r} must be a non-empty vector")
        if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
            raise ConfigurationError(f"series {self.label!r} contains non-finite values")
        if self.frequency < 1:
            raise ConfigurationError("frequency must be a positive number of months")
        if self.diff_order < 0:
            raise ConfigurationError("diff_order must be non-negative")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.label == other.label
            and self.start_period == other.start_period
            and self.frequency == other.frequency
            and self.diff_order == other.diff_order
            and self.values.dtype.kind == other.values.dtype.kind
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @property
    def periods(self) -> tuple[Period, ...]:
        return period_range(self.start_period, len(self), self.frequency)

    def as_float(self) -> np.ndarray:
        return self.values.astype(float)


def difference(series: TimeSeries) -> TimeSeries:
    """First difference; the result starts one period later."""
    if len(series) < 2:
        raise DegenerateSeriesError(
            f"cannot difference {series.label!r}: needs at least 2 values, has {len(series)}"
        )
    return TimeSeries(
        label=series.label,
        start_period=series.start_period.shift(series.frequency),
        values=np.diff(series.values),
        frequency=series.frequency,
        diff_order=series.diff_order + 1,
    )


def difference_n(series: TimeSeries, order: int) -> TimeSeries:
    for _ in range(order):
        series = difference(series)
    return series


@dataclass(frozen=True)
class SegmentDimension:
    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.levels) < 2:
            raise ConfigurationError(f"dimension {self.name!r} needs at least 2 levels")
        if len(set(self.levels)) != len(self.levels):
            raise ConfigurationError(f"dimension {self.name!r} has duplicate level labels")


@dataclass(frozen=True, eq=False)
class SegmentedDataset:
    """Per-level visits and page views for each dimension, plus total page views.

    ``visits[dim][level]`` and ``pageviews[dim][level]`` are integer series on
    the shared ``periods`` index. Construction does not enforce additivity;
    use :func:`validate_dataset`.
    """

    periods: tuple[Period, ...]
    dimensions: tuple[SegmentDimension, ...]
    visits: Mapping[str, Mapping[str, TimeSeries]]
    pageviews: Mapping[str, Mapping[str, TimeSeries]]
    total_pageviews: TimeSeries

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(self.periods))
        object.__setattr__(self, "dimensions", tuple(self.dimensions))

    @classmethod
    def from_counts(
        cls,
        periods: Sequence[Period],
        counts: Mapping[str, Mapping[str, tuple[Sequence[int], Sequence[int]]]],
        total_pageviews: Sequence[int] | None = None,
    ) -> SegmentedDataset:
        """Build from ``{dimension: {level: (visits, pageviews)}}``.

        Totals default to the level sum of the first dimension.
        """
        periods = tuple(periods)
        if not periods:
            raise ConfigurationError("dataset needs at least one period")
        start = periods[0]
        dims, visits, pvs = [], {}, {}
        for dim_name, levels in counts.items():
            dims.append(SegmentDimension(dim_name, tuple(levels)))
            visits[dim_name], pvs[dim_name] = {}, {}
            for level, (v, p) in levels.items():
                visits[dim_name][level] = TimeSeries(
                    f"{dim_name}/{level}/visits", start, np.asarray(v, dtype=np.int64)
                )
                pvs[dim_name][level] = TimeSeries(
                    f"{dim_name}/{level}/pageviews", start, np.asarray(p, dtype=np.int64)
                )
        if total_pageviews is None:
            first = dims[0]
            total = sum(pvs[first.name][lv].values for lv in first.levels)
        else:
            total = np.asarray(total_pageviews, dtype=np.int64)
        return cls(
            periods=periods,
            dimensions=tuple(dims),
            visits=visits,
            pageviews=pvs,
            total_pageviews=TimeSeries("pageviews", start, total),
        )

    def dimension(self, name: str) -> SegmentDimension:
        for dim in self.dimensions:
            if dim.name == name:
                return dim
        raise ConfigurationError(
            f"dimension {name!r} not in dataset (have {[d.name for d in self.dimensions]})"
        )

    def total_visits(self, dimension: str) -> np.ndarray:
        dim = self.dimension(dimension)
        return sum(self.visits[dim.name][lv].values for lv in dim.levels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SegmentedDataset):
            return NotImplemented
        if (
            self.periods != other.periods
            or self.dimensions != other.dimensions
            or self.total_pageviews != other.total_pageviews
        ):
            return False
        for dim in self.dimensions:
            for lv in dim.levels:
                if self.visits[dim.name][lv] != other.visits[dim.name][lv]:
                    return False
                if self.pageviews[dim.name][lv] != other.pageviews[dim.name][lv]:
                    return False
        return True

    __hash__ = None


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    period: Period | None = None
    dimension: str | None = None
    level: str | None = None

    def __str__(self) -> str:
        coords = [str(c) for c in (self.period, self.dimension, self.level) if c is not None]
        where = f" [{' '.join(coords)}]" if coords else ""
        return f"{self.kind}{where}: {self.message}"


def _is_integral(arr: np.ndarray) -> bool:
    if arr.dtype.kind in "iu":
        return True
    return bool(np.all(arr == np.round(arr)))


def validate_dataset(dataset: SegmentedDataset) -> list[Violation]:
    """Return every broken invariant; an empty list means the dataset is valid."""
    out: list[Violation] = []
    n = len(dataset.periods)
    start = dataset.periods[0] if dataset.periods else None
    expected = period_range(start, n) if start is not None else ()
    if dataset.periods != expected:
        out.append(Violation("period-index", "periods are not consecutive months"))

    def check_series(ts: TimeSeries, dim: str | None, level: str | None, what: str) -> bool:
        ok = True
        if len(ts) != n or ts.start_period != start:
            out.append(Violation("period-index", f"{what} not aligned with dataset periods",
                                 None, dim, level))
            return False
        if not _is_integral(ts.values):
            out.append(Violation("non-integer", f"{what} has non-integer counts", None, dim, level))
            ok = False
        for i in np.flatnonzero(ts.values < 0):
            out.append(Violation("negative count", f"{what} = {ts.values[i]}",
                                 dataset.periods[i], dim, level))
        return ok

    total_ok = check_series(dataset.total_pageviews, None, None, "total page views")
    visit_totals: dict[str, np.ndarray] = {}
    for dim in dataset.dimensions:
        missing = [lv for lv in dim.levels
                   if lv not in dataset.visits.get(dim.name, {})
                   or lv not in dataset.pageviews.get(dim.name, {})]
        if missing:
            out.append(Violation("missing-level", f"no series for levels {missing}", None, dim.name))
            continue
        aligned = True
        for lv in dim.levels:
            aligned &= check_series(dataset.visits[dim.name][lv], dim.name, lv, "visits")
            aligned &= check_series(dataset.pageviews[dim.name][lv], dim.name, lv, "page views")
        if not aligned:
            continue
        pv_sum = sum(dataset.pageviews[dim.name][lv].values.astype(np.int64) for lv in dim.levels)
        if total_ok:
            total = dataset.total_pageviews.values.astype(np.int64)
            for i in np.flatnonzero(pv_sum != total):
                out.append(Violation(
                    "additivity",
                    f"level page views sum to {pv_sum[i]} but total is {total[i]}",
                    dataset.periods[i], dim.name,
                ))
        visit_totals[dim.name] = sum(
            dataset.visits[dim.name][lv].values.astype(np.int64) for lv in dim.levels
        )

    names = list(visit_totals)
    for other in names[1:]:
        ref = visit_totals[names[0]]
        for i in np.flatnonzero(visit_totals[other] != ref):
            out.append(Violation(
                "visit-consistency",
                f"total visits {visit_totals[other][i]} differ from {ref[i]} in {names[0]!r}",
                dataset.periods[i], other,
            ))
    return out


@dataclass(frozen=True)
class AnalysisConfig:
    alpha: float = 0.05
    r2_threshold: float = 0.5
    max_diff_order: int = 2
    adf_spec: str = "constant"
    adf_lags: int = 0
    adf_level: str = "10%"
    bg_lags: int = 2
    expected_signs: Mapping[str, int] | None = field(default=None, hash=False)

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.r2_threshold < 1:
            raise ConfigurationError(f"r2_threshold must lie in (0, 1), got {self.r2_threshold}")
        if self.max_diff_order < 0:
            raise ConfigurationError("max_diff_order must be non-negative")
        if self.adf_spec not in ADF_SPECS:
            raise ConfigurationError(f"adf_spec must be one of {ADF_SPECS}")
        if self.adf_lags < 0:
            raise ConfigurationError("adf_lags must be non-negative")
        if self.adf_level not in ADF_LEVELS:
            raise ConfigurationError(f"adf_level must be one of {ADF_LEVELS}")
        if self.bg_lags < 1:
            raise ConfigurationError("bg_lags must be positive")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "r2_threshold": self.r2_threshold,
            "max_diff_order": self.max_diff_order,
            "adf_spec": self.adf_spec,
            "adf_lags": self.adf_lags,
            "adf_level": self.adf_level,
            "bg_lags": self.bg_lags,
            "expected_signs": dict(self.expected_signs) if self.expected_signs else None,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> AnalysisConfig:
        return cls(**d)
