"""Command line interface: simulate, sweep, compare, mismatch.

Each command reads a flat key=value config file, runs seeded Monte Carlo
realizations, and writes a deterministic CSV plus a rendered PNG figure next
to it (suppress with --no-fig).  Exit code 0 on success, 2 on config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .experiments import (
    ALGORITHMS,
    SETUPS,
    SWEEP_PARAMS,
    run_compare,
    run_mismatch,
    run_simulate,
    run_sweep,
    write_results_csv,
)
from .plots import render_results_figure, render_trace_figure

DEFAULT_MISMATCH_VALUES = (32, 96, 160)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to a key=value config file")
    parser.add_argument("--realizations", type=int, default=100, metavar="R")
    parser.add_argument("--seed", type=int, default=None, metavar="S",
                        help="override the config master seed")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--no-fig", action="store_true",
                        help="skip the PNG figure next to the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radome-irs",
        description="Simulate and optimize reflecting surfaces built into a "
        "base-station radome.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one algorithm over R realizations")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="sr")
    p.add_argument("--t-total", type=int, default=1000,
                   help="query budget for rpa/irpa")
    p.add_argument("--trace", default=None,
                   help="also write the first realization's per-step trace CSV")
    _add_common(p)

    p = sub.add_parser("sweep", help="sweep one parameter and record sum rates")
    p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    p.add_argument("--values", required=True, help="comma separated values")
    _add_common(p)

    p = sub.add_parser("compare", help="compare channel setups under one config")
    p.add_argument("--setups", default=",".join(SETUPS),
                   help="comma separated subset of full,single,double,none")
    _add_common(p)

    p = sub.add_parser("mismatch", help="far-field design evaluated on the "
                       "element-wise channel vs the matched design")
    p.add_argument("--values", default=None,
                   help="comma separated element counts (default "
                   + ",".join(str(v) for v in DEFAULT_MISMATCH_VALUES) + ")")
    _add_common(p)
    return parser


def _parse_values(text: str, param: str):
    try:
        if param == "theta_tilt":
            return [float(v) for v in text.split(",") if v.strip()]
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --values {text!r}: {exc}") from None


def _write_outputs(rows, args, trace=None, trace_path=None) -> None:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        write_results_csv(rows, fh)
    if trace is not None and trace_path is not None:
        with Path(trace_path).open("w") as fh:
            trace.write_csv(fh)
    if not args.no_fig:
        render_results_figure(rows, out.with_suffix(".png"))
        if trace is not None and trace_path is not None:
            render_trace_figure(trace, Path(trace_path).with_suffix(".png"))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = config.with_(master_seed=args.seed)
        if args.realizations < 1:
            raise ConfigError("--realizations must be >= 1")

        if args.command == "simulate":
            rows, trace = run_simulate(
                config, args.algorithm, args.realizations, t_total=args.t_total
            )
            _write_outputs(rows, args, trace=trace, trace_path=args.trace)
        elif args.command == "sweep":
            values = _parse_values(args.values, args.param)
            rows = run_sweep(config, args.param, values, args.realizations)
            _write_outputs(rows, args)
        elif args.command == "compare":
            setups = [s.strip() for s in args.setups.split(",") if s.strip()]
            rows = run_compare(config, setups, args.realizations)
            _write_outputs(rows, args)
        else:  # mismatch
            if args.values is None:
                values = list(DEFAULT_MISMATCH_VALUES)
            else:
                values = _parse_values(args.values, "n_elements")
            rows = run_mismatch(config, values, args.realizations)
            _write_outputs(rows, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
