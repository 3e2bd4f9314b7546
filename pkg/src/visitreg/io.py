"""CSV ingestion, report rendering (text and JSON) and plot-data export.

Dataset files are long-format CSV with a mandatory header::

    period,dimension,level,visits,pageviews
    2008-06,type,new,412,990
    2008-06,type,returning,301,1570
"""

from __future__ import annotations

import csv
import io
import json
from typing import IO, Mapping

import numpy as np

from .core import AnalysisConfig, Period, SegmentedDataset, Violation, validate_dataset
from .diagnostics import (
    HeteroTestResult,
    LmTestResult,
    NormalityResult,
    SignCheck,
    SignCheckResult,
)
from .errors import DatasetParseError, DatasetValidationError, DuplicateRowError
from .fmt import fmt_number, fmt_prob
from .numerics import DesignMatrix
from .ols import Coefficient, RegressionResult
from .pipeline import (
    AnalysisReport,
    ComposedModel,
    DimensionAnalysis,
    StepVerdict,
    ValidationLedger,
    Verdict,
)
from .stationarity import AdfResult, StationarityRecord

HEADER = ("period", "dimension", "level", "visits", "pageviews")


# -- dataset CSV ------------------------------------------------------------


def _read_text(source: str | IO[str]) -> str:
    return source if isinstance(source, str) else source.read()


def parse_dataset(source: str | IO[str]) -> SegmentedDataset:
    """Parse long-format CSV text (or a text stream) into a validated dataset."""
    rows = list(csv.reader(io.StringIO(_read_text(source))))
    if not rows or tuple(c.strip().lower() for c in rows[0]) != HEADER:
        raise DatasetParseError(f"missing or malformed header, expected {','.join(HEADER)}", line=1)

    cells: dict[tuple[Period, str, str], tuple[int, int]] = {}
    dims: dict[str, list[str]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(HEADER):
            raise DatasetParseError(f"expected {len(HEADER)} fields, got {len(row)}", line=lineno)
        period_txt, dim, level, visits_txt, pv_txt = (c.strip() for c in row)
        try:
            period = Period.parse(period_txt)
        except Exception:
            raise DatasetParseError(f"malformed period {period_txt!r}", lineno, "period") from None
        if not dim:
            raise DatasetParseError("empty dimension name", lineno, "dimension")
        if not level:
            raise DatasetParseError("empty level name", lineno, "level")
        counts = []
        for name, txt in (("visits", visits_txt), ("pageviews", pv_txt)):
            try:
                counts.append(int(txt))
            except ValueError:
                raise DatasetParseError(f"not an integer: {txt!r}", lineno, name) from None
        key = (period, dim, level)
        if key in cells:
            raise DuplicateRowError(f"duplicate row for {period} {dim}/{level}", lineno)
        cells[key] = (counts[0], counts[1])
        levels = dims.setdefault(dim, [])
        if level not in levels:
            levels.append(level)

    if not cells:
        raise DatasetParseError("no data rows", line=2)
    periods = sorted({p for p, _, _ in cells})
    missing = [
        Violation("missing-row", "no row for this cell", p, d, lv)
        for d, levels in dims.items() for lv in levels for p in periods
        if (p, d, lv) not in cells
    ]
    if missing:
        raise DatasetValidationError(missing)
    for d, levels in dims.items():
        if len(levels) < 2:
            raise DatasetValidationError(
                [Violation("dimension", f"needs at least 2 levels, found {levels}", dimension=d)]
            )

    counts = {
        d: {lv: ([cells[(p, d, lv)][0] for p in periods], [cells[(p, d, lv)][1] for p in periods])
            for lv in levels}
        for d, levels in dims.items()
    }
    dataset = SegmentedDataset.from_counts(periods, counts)
    violations = validate_dataset(dataset)
    if violations:
        raise DatasetValidationError(violations)
    return dataset


def dataset_to_csv(dataset: SegmentedDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for i, period in enumerate(dataset.periods):
        for dim in dataset.dimensions:
            for lv in dim.levels:
                w.writerow([
                    str(period), dim.name, lv,
                    int(dataset.visits[dim.name][lv].values[i]),
                    int(dataset.pageviews[dim.name][lv].values[i]),
                ])
    return buf.getvalue()


# -- plot data --------------------------------------------------------------


def emit_plot_data(composed: ComposedModel, dataset: SegmentedDataset) -> str:
    """Actual, fitted and residual total page views, one CSV row per period."""
    fit = composed.intercept_fit
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("period", "actual_pageviews", "fitted", "residual"))
    for period, y, f, e in zip(dataset.periods, fit.response, fit.fitted, fit.residuals):
        w.writerow((str(period), repr(float(y)), repr(float(f)), repr(float(e))))
    return buf.getvalue()


# -- report serialisation ---------------------------------------------------


def _floats(a) -> list[float]:
    return [float(x) for x in np.asarray(a, dtype=float)]


def _array(values) -> np.ndarray:
    a = np.array(values, dtype=float)
    a.setflags(write=False)
    return a


def _period(p: Period | None) -> str | None:
    return None if p is None else str(p)


def _unperiod(s: str | None) -> Period | None:
    return None if s is None else Period.parse(s)


_RESULT_SCALARS = (
    "dependent", "n", "k", "r_squared", "adjusted_r_squared", "se_of_regression",
    "sum_squared_resid", "log_likelihood", "aic", "schwarz", "hannan_quinn",
    "durbin_watson", "mean_dependent", "sd_dependent", "f_statistic", "f_p_value",
    "intercept_included", "perfect_fit", "used_differenced_inputs",
)


def regression_to_dict(fit: RegressionResult) -> dict:
    d = {name: getattr(fit, name) for name in _RESULT_SCALARS}
    d["coefficients"] = [
        {"name": c.name, "estimate": c.estimate, "std_error": c.std_error,
         "t_statistic": c.t_statistic, "p_value": c.p_value}
        for c in fit.coefficients
    ]
    d["design"] = {
        "columns": list(fit.design.column_names),
        "rows": [_floats(r) for r in fit.design.matrix],
    }
    d["response"] = _floats(fit.response)
    d["fitted"] = _floats(fit.fitted)
    d["residuals"] = _floats(fit.residuals)
    d["fixed_slopes"] = dict(fit.fixed_slopes)
    d["fixed_regressors"] = {k: _floats(v) for k, v in fit.fixed_regressors.items()}
    d["sample_start"] = _period(fit.sample_start)
    d["sample_end"] = _period(fit.sample_end)
    return d


def regression_from_dict(d: Mapping) -> RegressionResult:
    kwargs = {name: d[name] for name in _RESULT_SCALARS}
    design = d["design"]
    return RegressionResult(
        coefficients=tuple(Coefficient(**c) for c in d["coefficients"]),
        design=DesignMatrix(tuple(design["columns"]),
                            np.array(design["rows"], dtype=float).reshape(-1, len(design["columns"]))),
        response=_array(d["response"]),
        fitted=_array(d["fitted"]),
        residuals=_array(d["residuals"]),
        fixed_slopes=dict(d["fixed_slopes"]),
        fixed_regressors={k: _array(v) for k, v in d["fixed_regressors"].items()},
        sample_start=_unperiod(d["sample_start"]),
        sample_end=_unperiod(d["sample_end"]),
        **kwargs,
    )


def _adf_to_dict(r: AdfResult) -> dict:
    return {
        "statistic": r.statistic, "critical_values": dict(r.critical_values), "spec": r.spec,
        "lags": r.lags, "n_effective": r.n_effective, "level": r.level,
        "reject_unit_root": r.reject_unit_root,
        "regression": None if r.regression is None else regression_to_dict(r.regression),
    }


def _adf_from_dict(d: Mapping) -> AdfResult:
    d = dict(d)
    reg = d.pop("regression")
    return AdfResult(regression=None if reg is None else regression_from_dict(reg), **d)


def _record_to_dict(r: StationarityRecord) -> dict:
    return {
        "label": r.label, "initially_stationary": r.initially_stationary,
        "diff_order_applied": r.diff_order_applied, "resolved": r.resolved,
        "passes": [_adf_to_dict(p) for p in r.passes],
    }


def _record_from_dict(d: Mapping) -> StationarityRecord:
    return StationarityRecord(
        label=d["label"], initially_stationary=d["initially_stationary"],
        diff_order_applied=d["diff_order_applied"], resolved=d["resolved"],
        passes=tuple(_adf_from_dict(p) for p in d["passes"]),
    )


def _plain(obj) -> dict | None:
    if obj is None:
        return None
    d = dict(obj.__dict__)
    for key, val in d.items():
        if isinstance(val, tuple):
            d[key] = list(val)
    return d


def _ledger_to_dict(ledger: ValidationLedger) -> dict:
    return {
        "steps": [
            {"step": s.step, "name": s.name, "verdict": s.verdict.value,
             "statistic": s.statistic, "p_value": s.p_value, "note": s.note}
            for s in ledger.steps
        ],
        "overall": ledger.overall,
        "serial": _plain(ledger.serial),
        "hetero": _plain(ledger.hetero),
        "normality": _plain(ledger.normality),
        "signs": None if ledger.signs is None else [_plain(c) for c in ledger.signs.checks],
    }


def _ledger_from_dict(d: Mapping) -> ValidationLedger:
    def tupled(x, cls):
        if x is None:
            return None
        x = dict(x)
        if "f_dof" in x:
            x["f_dof"] = tuple(x["f_dof"])
        return cls(**x)

    steps = tuple(
        StepVerdict(s["step"], s["name"], Verdict(s["verdict"]), s["statistic"], s["p_value"], s["note"])
        for s in d["steps"]
    )
    signs = None if d["signs"] is None else SignCheckResult(tuple(SignCheck(**c) for c in d["signs"]))
    return ValidationLedger(
        steps,
        tupled(d["serial"], LmTestResult),
        tupled(d["hetero"], HeteroTestResult),
        tupled(d["normality"], NormalityResult),
        signs,
    )


def report_to_dict(report: AnalysisReport) -> dict:
    dims = {}
    for name, da in report.dimensions.items():
        c = da.composed
        dims[name] = {
            "stationarity": {lv: _record_to_dict(r) for lv, r in da.stationarity.items()},
            "segment_fits": {lv: regression_to_dict(f) for lv, f in da.segment_fits.items()},
            "composed": {
                "slopes": dict(c.slopes),
                "equation": c.equation,
                "intercept_fit": regression_to_dict(c.intercept_fit),
                "unrestricted_fit": regression_to_dict(c.unrestricted_fit),
                "ledger": _ledger_to_dict(c.ledger),
            },
        }
    return {
        "config": report.config.to_dict(),
        "summary": dict(report.summary),
        "dimensions": dims,
        "errors": dict(report.errors),
    }


def report_from_dict(d: Mapping) -> AnalysisReport:
    dims = {}
    for name, dd in d["dimensions"].items():
        c = dd["composed"]
        dims[name] = DimensionAnalysis(
            dimension=name,
            stationarity={lv: _record_from_dict(r) for lv, r in dd["stationarity"].items()},
            segment_fits={lv: regression_from_dict(f) for lv, f in dd["segment_fits"].items()},
            composed=ComposedModel(
                dimension=name,
                slopes=dict(c["slopes"]),
                intercept_fit=regression_from_dict(c["intercept_fit"]),
                unrestricted_fit=regression_from_dict(c["unrestricted_fit"]),
                equation=c["equation"],
                ledger=_ledger_from_dict(c["ledger"]),
            ),
        )
    return AnalysisReport(
        config=AnalysisConfig.from_dict(d["config"]),
        summary=dict(d["summary"]),
        dimensions=dims,
        errors=dict(d["errors"]),
    )


def report_from_json(text: str) -> AnalysisReport:
    return report_from_dict(json.loads(text))


# -- text rendering ---------------------------------------------------------


def _pair(label_a: str, val_a: str, label_b: str = "", val_b: str = "") -> str:
    left = f"{label_a:<22}{val_a:>12}"
    if not label_b:
        return left
    return f"{left}    {label_b:<24}{val_b:>12}"


def _sample_line(fit: RegressionResult) -> str:
    if fit.sample_start is None:
        return f"Sample: 1 {fit.n}"
    return f"Sample: {fit.sample_start} {fit.sample_end}"


def render_regression(fit: RegressionResult, method: str = "Least Squares",
                      equation: str | None = None) -> list[str]:
    lines = [
        f"Dependent Variable: {fit.dependent}",
        f"Method: {method}",
        _sample_line(fit),
        f"Included observations: {fit.n}",
    ]
    if equation:
        lines.append(equation)
    lines.append("")
    lines.append(f"{'Variable':<14}{'Coefficient':>14}{'Std. Error':>14}{'t-Statistic':>14}{'Prob.':>10}")
    for c in fit.coefficients:
        lines.append(
            f"{c.name:<14}{fmt_number(c.estimate):>14}{fmt_number(c.std_error):>14}"
            f"{fmt_number(c.t_statistic):>14}{fmt_prob(c.p_value):>10}"
        )
    lines.append("")
    lines.append(_pair("R-squared", fmt_number(fit.r_squared),
                       "Mean dependent var", fmt_number(fit.mean_dependent)))
    lines.append(_pair("Adjusted R-squared", fmt_number(fit.adjusted_r_squared),
                       "S.D. dependent var", fmt_number(fit.sd_dependent)))
    lines.append(_pair("S.E. of regression", fmt_number(fit.se_of_regression),
                       "Akaike info criterion", fmt_number(fit.aic)))
    lines.append(_pair("Sum squared resid", fmt_number(fit.sum_squared_resid),
                       "Schwarz criterion", fmt_number(fit.schwarz)))
    lines.append(_pair("Log likelihood", fmt_number(fit.log_likelihood),
                       "Hannan-Quinn criter.", fmt_number(fit.hannan_quinn)))
    if fit.f_statistic is not None:
        lines.append(_pair("F-statistic", fmt_number(fit.f_statistic),
                           "Durbin-Watson stat", fmt_number(fit.durbin_watson)))
        lines.append(_pair("Prob(F-statistic)", fmt_prob(fit.f_p_value)))
    else:
        lines.append(_pair("Durbin-Watson stat", fmt_number(fit.durbin_watson)))
    if fit.perfect_fit:
        lines.append("Note: perfect fit; likelihood-based statistics unavailable")
    return lines


def render_diagnostics(ledger: ValidationLedger) -> list[str]:
    lines = ["Breusch-Godfrey Serial Correlation LM Test:"]
    s = ledger.serial
    if s is None:
        lines.append(f"  not applicable: {ledger.step(5).note}")
    else:
        lines.append(_pair("F-statistic", fmt_number(s.f_statistic),
                           f"Prob. F({s.f_dof[0]},{s.f_dof[1]})", fmt_prob(s.f_p)))
        lines.append(_pair("Obs*R-squared", fmt_number(s.obs_r_squared),
                           f"Prob. Chi-Square({s.chi2_dof})", fmt_prob(s.chi2_p)))
    lines += ["", "Heteroskedasticity Test: Breusch-Pagan-Godfrey"]
    h = ledger.hetero
    if h is None:
        lines.append(f"  not applicable: {ledger.step(6).note}")
    else:
        lines.append(_pair("F-statistic", fmt_number(h.f_statistic),
                           f"Prob. F({h.f_dof[0]},{h.f_dof[1]})", fmt_prob(h.f_p)))
        lines.append(_pair("Obs*R-squared", fmt_number(h.obs_r_squared),
                           f"Prob. Chi-Square({h.chi2_dof})", fmt_prob(h.chi2_p)))
        lines.append(_pair("Scaled explained SS", fmt_number(h.scaled_explained_ss),
                           f"Prob. Chi-Square({h.chi2_dof})", fmt_prob(h.scaled_p)))
    lines += ["", "Normality Test for the residuals"]
    j = ledger.normality
    if j is None:
        lines.append(f"  not applicable: {ledger.step(7).note}")
    else:
        lines.append(_pair("Jarque-Bera", fmt_number(j.jb_statistic), "Probability", fmt_prob(j.p)))
        lines.append(_pair("Skewness", fmt_number(j.skewness), "Kurtosis", fmt_number(j.kurtosis)))
    return lines


def render_ledger(ledger: ValidationLedger) -> list[str]:
    lines = ["Validation ledger", f"{'Step':<5}{'Check':<26}{'Verdict':<16}{'Statistic':>14}{'Prob.':>10}  Note"]
    for s in ledger.steps:
        lines.append(
            f"{s.step:<5}{s.name:<26}{s.verdict.value:<16}"
            f"{fmt_number(s.statistic):>14}{fmt_prob(s.p_value):>10}  {s.note}".rstrip()
        )
    lines.append(f"Overall: {ledger.overall}")
    return lines


def _render_dimension(da: DimensionAnalysis, config: AnalysisConfig) -> list[str]:
    lines = [f"=== Dimension: {da.dimension} ===", ""]
    lines.append(
        f"Augmented Dickey-Fuller screen (spec={config.adf_spec}, lags={config.adf_lags}, "
        f"level {config.adf_level})"
    )
    lines.append(f"{'Level':<14}{'ADF Stat.':>12}{'Critical':>12}  {'Stationary':<11}{'Diff. order':>11}")
    for lv, rec in da.stationarity.items():
        first = rec.passes[0]
        lines.append(
            f"{lv:<14}{fmt_number(first.statistic):>12}{fmt_number(first.critical_value):>12}  "
            f"{'Yes' if rec.initially_stationary else 'No':<11}{rec.diff_order_applied:>11}"
            + ("" if rec.resolved else "  (unresolved)")
        )
    lines += ["", "Segment models"]
    lines.append(f"{'Level':<14}{'Coefficient':>14}{'R-squared':>12}{'Prob.':>10}  Inputs")
    for lv, fit in da.segment_fits.items():
        c = fit.coefficient(lv)
        lines.append(
            f"{lv:<14}{fmt_number(c.estimate):>14}{fmt_number(fit.r_squared):>12}"
            f"{fmt_prob(0.0 if fit.perfect_fit else c.p_value):>10}  "
            f"{'differenced' if fit.used_differenced_inputs else 'levels'}"
        )
    comp = da.composed
    lines += [""]
    lines += render_regression(comp.intercept_fit, "Least Squares (fixed slopes)", comp.equation)
    lines += [""]
    lines += render_diagnostics(comp.ledger)
    lines += [""]
    lines += render_ledger(comp.ledger)
    return lines


def render_report(report: AnalysisReport, format: str = "text") -> str:
    if format == "json":
        return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    s = report.summary
    lines = [
        "Page-view decomposition report",
        f"Periods: {s['first_period']} to {s['last_period']} ({s['periods']} observations)",
        f"Total visits: {s['total_visits']}    Total page views: {s['total_pageviews']}",
        f"alpha={report.config.alpha}  r2_threshold={report.config.r2_threshold}  "
        f"max_diff_order={report.config.max_diff_order}  bg_lags={report.config.bg_lags}",
        "",
    ]
    for da in report.dimensions.values():
        lines += _render_dimension(da, report.config)
        lines.append("")
    for name, err in report.errors.items():
        lines.append(f"=== Dimension: {name} === FAILED: {err}")
    return "\n".join(lines).rstrip() + "\n"


def render_dimension_diagnostics(da: DimensionAnalysis) -> str:
    lines = [f"=== Dimension: {da.dimension} ===", da.composed.equation, ""]
    lines += render_diagnostics(da.composed.ledger)
    lines += [""]
    lines += render_ledger(da.composed.ledger)
    return "\n".join(lines) + "\n"

