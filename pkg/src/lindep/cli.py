"""Command-line interface.

Subcommands: simulate (emit a synthetic CSV), test (one measure on a
CSV), experiment (run a trial config), sweep (grid of configs). Exit
codes: 0 success, 2 configuration error, 3 ingestion error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, IngestionError, LindepError
from .harness import (ALPHA_GRID, ExperimentConfig, ExperimentReport,
                      SWEEP_VARIABLES, ingest_and_test, run_experiment, sweep)
from .simulate import FilterSpec, VarSpec, filter_apply, var_simulate
from .ts_core import Partition

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INGEST = 3


def _add_config_flags(parser: argparse.ArgumentParser):
    """One override flag per ExperimentConfig field."""
    for f in dataclasses.fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name == "tests":
            parser.add_argument(flag, type=str, default=None,
                                help="comma-separated null families")
        elif f.type.startswith("Optional[int]") or f.name in (
                "burg_max_order", "gc_p", "gc_q", "taper_truncation"):
            parser.add_argument(flag, type=str, default=None,
                                help=f"override config field {f.name}")
        elif f.type in ("int", "float", "str"):
            parser.add_argument(flag, type={"int": int, "float": float,
                                            "str": str}[f.type], default=None,
                                help=f"override config field {f.name}")
        else:
            parser.add_argument(flag, type=str, default=None,
                                help=f"override config field {f.name}")


def _config_from_args(args) -> ExperimentConfig:
    base = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                base = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
    for f in dataclasses.fields(ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is None:
            continue
        if f.name == "tests":
            base[f.name] = tuple(t.strip() for t in value.split(","))
        elif f.name in ("burg_max_order", "gc_p", "gc_q", "taper_truncation"):
            base[f.name] = None if value.lower() == "none" else int(value)
        elif f.name == "prewhitening":
            base[f.name] = None if value.lower() == "none" else value
        else:
            base[f.name] = value
    return ExperimentConfig.from_dict(base)


def _write_report_files(report: ExperimentReport, outdir: Path,
                        plot: bool, prefix: str = ""):
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / f"{prefix}report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
    families = list(report.p_values)
    with open(outdir / f"{prefix}pvalues.csv", "w", encoding="utf-8") as fh:
        fh.write("trial," + ",".join(families) + "\n")
        for row, trial in enumerate(report.evaluated_trials):
            vals = ",".join(f"{report.p_values[f][row]:.10g}" for f in families)
            fh.write(f"{trial},{vals}\n")
    with open(outdir / f"{prefix}fpr_curve.csv", "w", encoding="utf-8") as fh:
        fh.write("alpha," + ",".join(families) + "\n")
        for i, a in enumerate(report.alpha_grid):
            vals = ",".join(f"{report.fpr_curve[f][i]:.10g}" for f in families)
            fh.write(f"{a:.10g},{vals}\n")
    if plot:
        _write_fpr_svg(report, outdir / f"{prefix}fpr_curve.svg")


def _write_fpr_svg(report: ExperimentReport, path: Path):
    """Minimal dependency-free SVG line plot of FPR(alpha) per family."""
    width, height, margin = 480, 360, 48
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]

    def sx(a):
        return margin + a * (width - 2 * margin)

    def sy(p):
        return height - margin - p * (height - 2 * margin)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(1)}" y2="{sy(0)}" '
             'stroke="black"/>',
             f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(0)}" y2="{sy(1)}" '
             'stroke="black"/>',
             f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(1)}" y2="{sy(1)}" '
             'stroke="#bbbbbb" stroke-dasharray="4 3"/>']
    for i, (fam, curve) in enumerate(report.fpr_curve.items()):
        pts = " ".join(f"{sx(a):.1f},{sy(min(max(p, 0.0), 1.0)):.1f}"
                       for a, p in zip(report.alpha_grid, curve)
                       if np.isfinite(p))
        color = colors[i % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{width - margin - 90}" '
                     f'y="{margin + 16 * i}" fill="{color}" '
                     f'font-size="12">{fam}</text>')
    parts.append(f'<text x="{width // 2 - 10}" y="{height - 12}" '
                 'font-size="12">alpha</text>')
    parts.append(f'<text x="6" y="{height // 2}" font-size="12">FPR</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts), encoding="utf-8")


def _indices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"invalid column list {text!r}") from exc


def _verdicts_to_dict(result) -> dict:
    return {
        "measure_value": result.measure_value,
        "n_obs": result.n_obs,
        "n_terms": len(result.terms),
        "warnings": list(result.warnings),
        "verdicts": {
            fam: {"statistic": v.statistic, "p_value": v.p_value,
                  "dof_used": list(v.dof_used),
                  "null_family": str(v.null_family.value)}
            for fam, v in result.verdicts.items()
        },
    }


def _cmd_simulate(args) -> int:
    spec = VarSpec(k=args.k, l=args.l, c=args.c, phi_x=args.phi_x,
                   phi_y=args.phi_y, phi_w=args.phi_w, phi_xy=args.phi_xy,
                   t=args.t)
    tsm = var_simulate(spec, args.seed)
    if args.filter_order:
        tsm = filter_apply(tsm, FilterSpec(kind=args.filter_kind,
                                           order=args.filter_order,
                                           cutoff=args.cutoff))
    out = Path(args.output)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(",".join(tsm.variable_names) + "\n")
        for col in tsm.data.T:
            fh.write(",".join(f"{v:.10g}" for v in col) + "\n")
    print(f"wrote {tsm.n_vars} x {tsm.n_obs} series to {out}")
    return EXIT_OK


def _cmd_test(args) -> int:
    partition = Partition(x_rows=_indices(args.x), y_rows=_indices(args.y),
                          w_rows=_indices(args.w) if args.w else ())
    bandpass = None
    if args.bandpass:
        lo, hi = (float(v) for v in args.bandpass.split(","))
        bandpass = (lo, hi)
    result = ingest_and_test(
        args.csv, partition, args.measure,
        tests=tuple(t.strip() for t in args.tests.split(",")),
        detrend=args.detrend, bandpass=bandpass,
        bandpass_order=args.bandpass_order, trim=args.trim,
        gc_p=args.gc_p, gc_q=args.gc_q, lambda_m=args.lambda_m,
        seed=args.seed)
    payload = json.dumps(_verdicts_to_dict(result), indent=2)
    if args.output:
        Path(args.output).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = _config_from_args(args)
    report = run_experiment(config)
    _write_report_files(report, Path(args.outdir), args.plot)
    fprs = ", ".join(f"{fam}={rate:.4f}" for fam, rate in report.fpr.items())
    print(f"evaluated {report.n_evaluated}/{config.trials} trials "
          f"({report.n_dropped} dropped); FPR at alpha={config.alpha}: {fprs}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _config_from_args(args)
    grid = [int(v) for v in args.grid.split(",")]
    reports = sweep(config, args.variable, grid)
    outdir = Path(args.outdir)
    for value, report in zip(grid, reports):
        _write_report_files(report, outdir, args.plot,
                            prefix=f"{args.variable}_{value}_")
    summary = {
        "variable": args.variable,
        "grid": grid,
        "fpr": [{fam: float(r.fpr[fam]) for fam in r.fpr} for r in reports],
        "dropped": [r.n_dropped for r in reports],
    }
    with open(outdir / "sweep_summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    for value, report in zip(grid, reports):
        fprs = ", ".join(f"{fam}={rate:.4f}" for fam, rate in report.fpr.items())
        print(f"{args.variable}={value}: {fprs} ({report.n_dropped} dropped)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindep",
        description="Autocorrelation-corrected linear-dependence tests")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="emit a synthetic CSV")
    p_sim.add_argument("--output", required=True)
    p_sim.add_argument("--t", type=int, default=512)
    p_sim.add_argument("--k", type=int, default=1)
    p_sim.add_argument("--l", type=int, default=1)
    p_sim.add_argument("--c", type=int, default=0)
    p_sim.add_argument("--phi-x", type=float, default=0.3)
    p_sim.add_argument("--phi-y", type=float, default=-0.8)
    p_sim.add_argument("--phi-w", type=float, default=0.4)
    p_sim.add_argument("--phi-xy", type=float, default=0.0)
    p_sim.add_argument("--filter-kind", default="fir",
                       choices=["fir", "butterworth"])
    p_sim.add_argument("--filter-order", type=int, default=0)
    p_sim.add_argument("--cutoff", type=float, default=0.5)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.set_defaults(func=_cmd_simulate)

    p_test = sub.add_parser("test", help="run one measure on a CSV")
    p_test.add_argument("csv")
    p_test.add_argument("--measure", default="mi",
                        choices=["mi", "cmi", "mvmi", "gc", "mvgc"])
    p_test.add_argument("--x", required=True, help="x column indices")
    p_test.add_argument("--y", required=True, help="y column indices")
    p_test.add_argument("--w", default="", help="conditioning column indices")
    p_test.add_argument("--tests", default="lambda_star,chi2,f")
    p_test.add_argument("--detrend", action="store_true")
    p_test.add_argument("--bandpass", default=None,
                        help="low,high Nyquist fractions (zero-phase)")
    p_test.add_argument("--bandpass-order", type=int, default=3)
    p_test.add_argument("--trim", type=int, default=None)
    p_test.add_argument("--gc-p", type=int, default=1)
    p_test.add_argument("--gc-q", type=int, default=1)
    p_test.add_argument("--lambda-m", type=int, default=10_000)
    p_test.add_argument("--seed", type=int, default=0)
    p_test.add_argument("--output", default=None)
    p_test.set_defaults(func=_cmd_test)

    p_exp = sub.add_parser("experiment", help="run a trial config")
    p_exp.add_argument("--config", default=None, help="JSON config file")
    p_exp.add_argument("--outdir", default=".")
    p_exp.add_argument("--plot", action="store_true")
    _add_config_flags(p_exp)
    p_exp.set_defaults(func=_cmd_experiment)

    p_swp = sub.add_parser("sweep", help="run a config across a grid")
    p_swp.add_argument("--config", default=None, help="JSON config file")
    p_swp.add_argument("--variable", required=True, choices=SWEEP_VARIABLES)
    p_swp.add_argument("--grid", required=True, help="comma-separated values")
    p_swp.add_argument("--outdir", default=".")
    p_swp.add_argument("--plot", action="store_true")
    _add_config_flags(p_swp)
    p_swp.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IngestionError as exc:
        print(f"ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except LindepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
