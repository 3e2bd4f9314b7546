"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data validation error, 3 numeric or
degenerate-data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import AnalysisConfig, TimeSeries
from .errors import (
    ConfigurationError,
    DatasetParseError,
    DatasetValidationError,
    NumericError,
)
from .fmt import fmt_number
from .io import (
    dataset_to_csv,
    emit_plot_data,
    parse_dataset,
    render_dimension_diagnostics,
    render_report,
)
from .pipeline import run_analysis
from .stationarity import adf_test
from .synthgen import SynthConfig, generate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path: str):
    return parse_dataset(Path(path).read_text(encoding="utf-8"))


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        alpha=args.alpha,
        r2_threshold=args.r2_threshold,
        max_diff_order=args.max_diff,
        adf_spec=args.adf_spec,
        adf_lags=args.adf_lags,
        bg_lags=args.bg_lags,
    )


def _dimensions(arg: str) -> list[str] | None:
    return None if arg == "all" else [d.strip() for d in arg.split(",")]


def cmd_analyze(args) -> int:
    dataset = _load(args.input)
    report = run_analysis(dataset, _config(args), _dimensions(args.dimension))
    sys.stdout.write(render_report(report, args.format))
    if args.plots:
        out = Path(args.plots)
        out.mkdir(parents=True, exist_ok=True)
        for name, da in report.dimensions.items():
            (out / f"{name}.csv").write_text(emit_plot_data(da.composed, dataset), encoding="utf-8")
    return EXIT_NUMERIC if report.errors else EXIT_OK


def _resolve_column(dataset, name: str) -> TimeSeries:
    if name == "total":
        return dataset.total_pageviews
    parts = name.split("/")
    if len(parts) == 1:
        owners = [d.name for d in dataset.dimensions if parts[0] in d.levels]
        if len(owners) != 1:
            raise ConfigurationError(
                f"column {name!r} is {'ambiguous' if owners else 'unknown'}; use DIMENSION/LEVEL"
            )
        parts = [owners[0], parts[0]]
    dim, level = parts[0], parts[1]
    kind = parts[2] if len(parts) == 3 else "visits"
    table = {"visits": dataset.visits, "pageviews": dataset.pageviews}.get(kind)
    if table is None or dim not in table or level not in table[dim]:
        raise ConfigurationError(f"unknown column {name!r}")
    return table[dim][level]


def cmd_adf(args) -> int:
    dataset = _load(args.input)
    series = _resolve_column(dataset, args.column)
    level = f"{args.level:g}%"
    r = adf_test(series, args.spec, args.lags, level)
    print(f"Null Hypothesis: {series.label} has a unit root")
    print(f"Exogenous: {args.spec}, lag length: {args.lags}")
    print(f"Included observations: {r.n_effective}")
    print(f"ADF Test Statistic: {fmt_number(r.statistic)}")
    for lv, cv in r.critical_values.items():
        print(f"{lv} Critical Value: {fmt_number(cv)}")
    print(f"Decision at {level}: {'reject unit root (stationary)' if r.reject_unit_root else 'unit root not rejected'}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    dataset = _load(args.input)
    report = run_analysis(dataset, _config(args), _dimensions(args.dimension))
    for da in report.dimensions.values():
        sys.stdout.write(render_dimension_diagnostics(da))
    for name, err in report.errors.items():
        print(f"=== Dimension: {name} === FAILED: {err}")
    return EXIT_NUMERIC if report.errors else EXIT_OK


def cmd_synth(args) -> int:
    config = SynthConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    if args.seed is not None:
        config = config.with_seed(args.seed)
    text = dataset_to_csv(generate(config))
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def _add_analysis_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="long-format CSV dataset")
    p.add_argument("--dimension", default="all", help="dimension name, comma list or 'all'")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--r2-threshold", type=float, default=0.5)
    p.add_argument("--max-diff", type=int, default=2)
    p.add_argument("--adf-spec", choices=("none", "constant", "trend"), default="constant")
    p.add_argument("--adf-lags", type=int, default=0)
    p.add_argument("--bg-lags", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="visitreg", description="Page-view decomposition by visitor segment")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="full analysis and report")
    _add_analysis_options(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--plots", metavar="DIR", help="write actual/fitted/residual CSV per dimension")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("adf", help="augmented Dickey-Fuller test on one series")
    p.add_argument("--input", required=True)
    p.add_argument("--column", required=True,
                   help="'total', LEVEL, DIMENSION/LEVEL or DIMENSION/LEVEL/pageviews")
    p.add_argument("--spec", choices=("none", "constant", "trend"), default="constant")
    p.add_argument("--lags", type=int, default=0)
    p.add_argument("--level", type=float, choices=(1.0, 5.0, 10.0), default=10.0)
    p.set_defaults(func=cmd_adf)

    p = sub.add_parser("diagnose", help="residual diagnostics and ledger only")
    _add_analysis_options(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--config", required=True, help="JSON synth config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetParseError, DatasetValidationError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
