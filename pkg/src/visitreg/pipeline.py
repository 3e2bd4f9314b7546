"""Segment models, the composed total-page-view model and its validation ledger.

For one dimension (e.g. visitor type) each level's page views are regressed
on that level's visits. The total model keeps those slopes fixed and
re-estimates a single intercept against total page views; seven checks then
decide whether the composed model is usable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

from .core import (
    AnalysisConfig,
    SegmentDimension,
    SegmentedDataset,
    TimeSeries,
    difference_n,
    validate_dataset,
)
from .diagnostics import (
    HeteroTestResult,
    LmTestResult,
    NormalityResult,
    SignCheckResult,
    breusch_godfrey,
    breusch_pagan_godfrey,
    jarque_bera,
    sign_check,
)
from .errors import DatasetValidationError, NumericError, VisitRegError
from .fmt import fmt_number
from .ols import RegressionResult, fit_ols, fit_restricted
from .stationarity import StationarityRecord, ensure_stationary


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    WAIVED = "waived"
    NOT_APPLICABLE = "not-applicable"


STEP_NAMES = (
    "fit strength",
    "joint significance",
    "individual significance",
    "coefficient signs",
    "no serial correlation",
    "homoscedasticity",
    "residual normality",
)
DIAGNOSTIC_STEPS = (5, 6, 7)


@dataclass(frozen=True)
class StepVerdict:
    step: int
    name: str
    verdict: Verdict
    statistic: float | None = None
    p_value: float | None = None
    note: str = ""


@dataclass(frozen=True)
class ValidationLedger:
    steps: tuple[StepVerdict, ...]
    serial: LmTestResult | None = None
    hetero: HeteroTestResult | None = None
    normality: NormalityResult | None = None
    signs: SignCheckResult | None = None

    def step(self, number: int) -> StepVerdict:
        return self.steps[number - 1]

    @property
    def failed_steps(self) -> tuple[int, ...]:
        return tuple(s.step for s in self.steps if s.verdict is Verdict.FAIL)

    @property
    def overall(self) -> str:
        failed = self.failed_steps
        if not failed:
            return "pass"
        if len(failed) == 1 and failed[0] in DIAGNOSTIC_STEPS:
            return "fail-with-note"
        return "fail"


@dataclass(frozen=True, eq=False)
class ComposedModel:
    dimension: str
    slopes: Mapping[str, float]
    intercept_fit: RegressionResult
    unrestricted_fit: RegressionResult
    equation: str
    ledger: ValidationLedger


@dataclass(frozen=True, eq=False)
class DimensionAnalysis:
    dimension: str
    stationarity: Mapping[str, StationarityRecord]
    segment_fits: Mapping[str, RegressionResult]
    composed: ComposedModel


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    config: AnalysisConfig
    summary: Mapping[str, object]
    dimensions: Mapping[str, DimensionAnalysis]
    errors: Mapping[str, str] = field(default_factory=dict)


def _dimension(dataset: SegmentedDataset, dimension: str | SegmentDimension) -> SegmentDimension:
    name = dimension.name if isinstance(dimension, SegmentDimension) else dimension
    return dataset.dimension(name)


def prepare_segment_series(
    dataset: SegmentedDataset,
    dimension: str | SegmentDimension,
    config: AnalysisConfig | None = None,
) -> dict[str, tuple[TimeSeries, StationarityRecord]]:
    """Run every level's visits through the stationarity screen."""
    config = config or AnalysisConfig()
    dim = _dimension(dataset, dimension)
    return {
        level: ensure_stationary(dataset.visits[dim.name][level], config)
        for level in dim.levels
    }


def fit_segment_models(
    dataset: SegmentedDataset,
    dimension: str | SegmentDimension,
    config: AnalysisConfig | None = None,
    prepared: Mapping[str, tuple[TimeSeries, StationarityRecord]] | None = None,
) -> dict[str, RegressionResult]:
    """Regress each level's page views on its (possibly differenced) visits."""
    config = config or AnalysisConfig()
    dim = _dimension(dataset, dimension)
    if prepared is None:
        prepared = prepare_segment_series(dataset, dim, config)
    fits = {}
    for level in dim.levels:
        visits, record = prepared[level]
        order = record.diff_order_applied
        pv = difference_n(dataset.pageviews[dim.name][level], order)
        fit = fit_ols({level: visits}, pv, include_intercept=True,
                      dependent=f"PAGEVIEWS_{level.upper()}")
        if order:
            fit = replace(fit, used_differenced_inputs=True)
        fits[level] = fit
    return fits


def render_equation(slopes: Mapping[str, float], intercept: float | None = None) -> str:
    terms = []
    for i, (name, b) in enumerate(slopes.items()):
        body = f"{fmt_number(abs(b))}*{name.upper()}"
        if i == 0:
            terms.append(body if b >= 0 else f"-{body}")
        else:
            terms.append(("+ " if b >= 0 else "- ") + body)
    if intercept is None:
        terms.append("+ C(1)")
    else:
        terms.append(("+ " if intercept >= 0 else "- ") + fmt_number(abs(intercept)))
    return "PAGEVIEWS = " + " ".join(terms)


def _slope_p_values(segment_fits: Mapping[str, RegressionResult]) -> list[float]:
    ps = []
    for fit in segment_fits.values():
        for c in fit.slopes:
            ps.append(0.0 if fit.perfect_fit else c.p_value)
    return ps


def validate_model(
    composed_fit: RegressionResult,
    unrestricted_fit: RegressionResult,
    segment_fits: Mapping[str, RegressionResult],
    config: AnalysisConfig | None = None,
) -> ValidationLedger:
    """Seven-step checklist. Verdicts depend only on the fits and ``config``."""
    config = config or AnalysisConfig()
    alpha = config.alpha
    steps: list[StepVerdict] = []

    r2 = composed_fit.r_squared
    differenced = [lv for lv, f in segment_fits.items() if f.used_differenced_inputs]
    if differenced:
        steps.append(StepVerdict(1, STEP_NAMES[0], Verdict.WAIVED, r2, None,
                                 f"differenced inputs: {', '.join(differenced)}"))
    else:
        ok = r2 is not None and r2 > config.r2_threshold
        steps.append(StepVerdict(1, STEP_NAMES[0], Verdict.PASS if ok else Verdict.FAIL, r2, None,
                                 f"R-squared vs threshold {config.r2_threshold}"))

    if unrestricted_fit.perfect_fit:
        steps.append(StepVerdict(2, STEP_NAMES[1], Verdict.PASS, None, None,
                                 "unrestricted fit is exact"))
    elif unrestricted_fit.f_p_value is None:
        steps.append(StepVerdict(2, STEP_NAMES[1], Verdict.NOT_APPLICABLE, None, None,
                                 "no free slopes"))
    else:
        ok = unrestricted_fit.f_p_value < alpha
        steps.append(StepVerdict(2, STEP_NAMES[1], Verdict.PASS if ok else Verdict.FAIL,
                                 unrestricted_fit.f_statistic, unrestricted_fit.f_p_value,
                                 "F-test of the unrestricted fit"))

    ps = _slope_p_values(segment_fits)
    n_sig = sum(p < alpha for p in ps)
    ok = 2 * n_sig > len(ps)
    steps.append(StepVerdict(3, STEP_NAMES[2], Verdict.PASS if ok else Verdict.FAIL,
                             n_sig / len(ps) if ps else None, None,
                             f"{n_sig} of {len(ps)} slopes significant"))

    expected = config.expected_signs or {}
    checks = []
    for level, fit in segment_fits.items():
        for c in fit.slopes:
            checks.extend(sign_check(fit, {c.name: expected.get(c.name, 1)}).checks)
    signs = SignCheckResult(tuple(checks))
    bad = [c.name for c in signs.checks if not c.passed]
    steps.append(StepVerdict(4, STEP_NAMES[3], Verdict.PASS if signs.passed else Verdict.FAIL,
                             None, None, f"wrong sign: {', '.join(bad)}" if bad else ""))

    serial = hetero = normality = None
    try:
        serial = breusch_godfrey(composed_fit, config.bg_lags)
        steps.append(StepVerdict(5, STEP_NAMES[4],
                                 Verdict.PASS if serial.chi2_p >= alpha else Verdict.FAIL,
                                 serial.obs_r_squared, serial.chi2_p,
                                 f"Breusch-Godfrey LM, {config.bg_lags} lags"))
    except NumericError as exc:
        steps.append(StepVerdict(5, STEP_NAMES[4], Verdict.NOT_APPLICABLE, note=str(exc)))
    try:
        hetero = breusch_pagan_godfrey(unrestricted_fit)
        steps.append(StepVerdict(6, STEP_NAMES[5],
                                 Verdict.PASS if hetero.chi2_p >= alpha else Verdict.FAIL,
                                 hetero.obs_r_squared, hetero.chi2_p, "Breusch-Pagan-Godfrey"))
    except NumericError as exc:
        steps.append(StepVerdict(6, STEP_NAMES[5], Verdict.NOT_APPLICABLE, note=str(exc)))
    try:
        if composed_fit.perfect_fit:
            raise NumericError("residuals are zero (perfect fit); diagnostic undefined")
        normality = jarque_bera(composed_fit.residuals)
        steps.append(StepVerdict(7, STEP_NAMES[6],
                                 Verdict.PASS if normality.p >= alpha else Verdict.FAIL,
                                 normality.jb_statistic, normality.p, "Jarque-Bera"))
    except NumericError as exc:
        steps.append(StepVerdict(7, STEP_NAMES[6], Verdict.NOT_APPLICABLE, note=str(exc)))

    return ValidationLedger(tuple(steps), serial, hetero, normality, signs)


def compose_total_model(
    segment_fits: Mapping[str, RegressionResult],
    dataset: SegmentedDataset,
    dimension: str | SegmentDimension,
    config: AnalysisConfig | None = None,
) -> ComposedModel:
    """Hold segment slopes fixed and estimate one intercept for total page views.

    Regressors are the raw level visits even where a segment model was fitted
    on differenced data.
    """
    config = config or AnalysisConfig()
    name = dimension.name if isinstance(dimension, SegmentDimension) else dimension
    visits = {level: dataset.visits[name][level] for level in segment_fits}
    slopes = {level: fit.coefficient(level).estimate for level, fit in segment_fits.items()}
    total = dataset.total_pageviews
    composed = fit_restricted(slopes, visits, total)
    unrestricted = fit_ols(visits, total, include_intercept=True, dependent="PAGEVIEWS")
    ledger = validate_model(composed, unrestricted, segment_fits, config)
    return ComposedModel(
        dimension=name,
        slopes=slopes,
        intercept_fit=composed,
        unrestricted_fit=unrestricted,
        equation=render_equation(slopes, composed.coefficients[0].estimate),
        ledger=ledger,
    )


def analyze_dimension(
    dataset: SegmentedDataset, dimension: str, config: AnalysisConfig
) -> DimensionAnalysis:
    prepared = prepare_segment_series(dataset, dimension, config)
    fits = fit_segment_models(dataset, dimension, config, prepared)
    composed = compose_total_model(fits, dataset, dimension, config)
    return DimensionAnalysis(
        dimension=dimension,
        stationarity={lv: rec for lv, (_, rec) in prepared.items()},
        segment_fits=fits,
        composed=composed,
    )


def dataset_summary(dataset: SegmentedDataset) -> dict[str, object]:
    first = dataset.dimensions[0].name
    return {
        "first_period": str(dataset.periods[0]),
        "last_period": str(dataset.periods[-1]),
        "periods": len(dataset.periods),
        "dimensions": [d.name for d in dataset.dimensions],
        "total_visits": int(dataset.total_visits(first).sum()),
        "total_pageviews": int(dataset.total_pageviews.values.sum()),
    }


def run_analysis(
    dataset: SegmentedDataset,
    config: AnalysisConfig | None = None,
    dimensions: Sequence[str] | None = None,
) -> AnalysisReport:
    """Validate the dataset, then analyse each requested dimension independently."""
    config = config or AnalysisConfig()
    violations = validate_dataset(dataset)
    if violations:
        raise DatasetValidationError(violations)
    names = [d.name for d in dataset.dimensions] if dimensions is None else list(dimensions)
    for name in names:
        dataset.dimension(name)
    results: dict[str, DimensionAnalysis] = {}
    errors: dict[str, str] = {}
    for name in names:
        try:
            results[name] = analyze_dimension(dataset, name, config)
        except VisitRegError as exc:
            errors[name] = f"{type(exc).__name__}: {exc}"
    return AnalysisReport(config, dataset_summary(dataset), results, errors)
