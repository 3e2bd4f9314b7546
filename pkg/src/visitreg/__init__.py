"""Explain total page views as a sum of per-segment visit regressions."""

from .core import (
    AnalysisConfig,
    Period,
    SegmentDimension,
    SegmentedDataset,
    TimeSeries,
    difference,
    validate_dataset,
)
from .diagnostics import breusch_godfrey, breusch_pagan_godfrey, jarque_bera, sign_check
from .io import emit_plot_data, parse_dataset, render_report
from .ols import durbin_watson, fit_ols, fit_restricted, summarize_fit
from .pipeline import (
    compose_total_model,
    fit_segment_models,
    prepare_segment_series,
    run_analysis,
    validate_model,
)
from .stationarity import adf_test, ensure_stationary, mackinnon_critical_values
from .synthgen import SynthConfig, generate

__version__ = "0.1.0"
