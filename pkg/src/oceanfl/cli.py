"""Command-line front end.

Subcommands:
  run     one experiment from a config file -> trace.txt, summary.csv,
          schedule.json in --out, plus a one-line digest on stdout
  sweep   the same experiment across --axis v | seeds | scenario
  verify  randomized property suites (solver / structure / bounds)

Exit codes: 0 success, 1 config/flag validation error, 2 I/O failure or
runtime infeasibility, 3 verify suite found a property violation. Identical
invocations produce bitwise-identical outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .channels import SCENARIO_KINDS
from .config import ConfigError, load_config
from .engine import (SummaryRow, export_schedule, run_experiment,
                     save_summary_csv, save_trace, sweep)
from .solver import InfeasibleError
from .verify import DEFAULT_SEED, SUITE_NAMES, run_suite

TRACE_FILENAME = "trace.txt"
SUMMARY_FILENAME = "summary.csv"
SCHEDULE_FILENAME = "schedule.json"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oceanfl",
        description="Client-selection and bandwidth-allocation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("config", help="path to an INI config file")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override [run] seed")

    p_sweep = sub.add_parser("sweep", help="run an experiment across one axis")
    p_sweep.add_argument("config", help="path to an INI config file")
    p_sweep.add_argument("--axis", required=True, choices=("v", "seeds", "scenario"))
    p_sweep.add_argument("--values", nargs="+", default=None,
                         help="axis values (defaults to [policy] v_grid for --axis v)")
    p_sweep.add_argument("--seeds", type=int, default=20,
                         help="seeds per value for the v/scenario axes")
    p_sweep.add_argument("--out", default=".", help="output directory")
    p_sweep.add_argument("--seed", type=int, default=None,
                         help="override [run] seed (base of the seed block)")

    p_verify = sub.add_parser("verify", help="run a randomized property suite")
    p_verify.add_argument("--suite", required=True, choices=SUITE_NAMES)
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return parser


def _load(args):
    loaded = load_config(args.config)
    if args.seed is not None:
        loaded.run_config = dataclasses.replace(loaded.run_config, seed=args.seed)
    return loaded


def _cmd_run(args) -> int:
    loaded = _load(args)
    config = loaded.run_config
    trace = run_experiment(loaded.policy, config)
    os.makedirs(args.out, exist_ok=True)
    save_trace(trace, config, os.path.join(args.out, TRACE_FILENAME))
    export_schedule(trace, os.path.join(args.out, SCHEDULE_FILENAME))
    row = SummaryRow(loaded.policy, config.seed, trace.total_utility,
                     trace.mean_selected, trace.max_violation)
    save_summary_csv([row], os.path.join(args.out, SUMMARY_FILENAME))
    print(f"policy={loaded.policy} seed={config.seed} rounds={trace.num_rounds} "
          f"total_utility={trace.total_utility!r} "
          f"max_violation_J={trace.max_violation!r}")
    return 0


def _parse_axis_values(axis: str, raw, loaded):
    if raw is None:
        if axis == "v" and loaded.v_grid:
            return list(loaded.v_grid)
        raise ConfigError("--values is required (no [policy] v_grid to fall back on)")
    if axis == "v":
        try:
            return [float(v) for v in raw]
        except ValueError:
            raise ConfigError(f"--values for axis v must be numbers: {raw}") from None
    if axis == "seeds":
        try:
            return [int(v) for v in raw]
        except ValueError:
            raise ConfigError(f"--values for axis seeds must be integers: {raw}") from None
    bad = [v for v in raw if v not in SCENARIO_KINDS]
    if bad:
        raise ConfigError(
            f"--values for axis scenario must be from {SCENARIO_KINDS}: {bad}")
    return list(raw)


def _cmd_sweep(args) -> int:
    loaded = _load(args)
    values = _parse_axis_values(args.axis, args.values, loaded)
    if args.axis != "seeds" and args.seeds < 1:
        raise ConfigError("--seeds must be at least 1")
    rows = sweep(loaded.policy, loaded.run_config, args.axis, values,
                 num_seeds=args.seeds)
    os.makedirs(args.out, exist_ok=True)
    save_summary_csv(rows, os.path.join(args.out, SUMMARY_FILENAME))
    print(f"policy={loaded.policy} axis={args.axis} values={len(values)} "
          f"rows={len(rows)}")
    return 0


def _cmd_verify(args) -> int:
    report = run_suite(args.suite, seed=args.seed)
    for failure in report.failures:
        print(json.dumps({"suite": report.name, **failure}, sort_keys=True))
    print(f"suite={report.name} checked={report.num_checked} "
          f"failed={report.num_failed}")
    return 0 if report.passed else 3


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_verify(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        name = getattr(exc, "filename", None)
        where = f"{name}: " if name else ""
        print(f"io error: {where}{exc.strerror or exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
