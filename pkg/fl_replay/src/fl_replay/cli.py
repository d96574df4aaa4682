"""Command-line front end: replay one schedule, or run the pattern study."""

import argparse
import csv
import os
import sys

import numpy as np

from .data import make_federation
from .patterns import (PATTERN_KINDS, pattern_study, save_study_csv,
                       summarize_study)
from .replay import DEFAULT_LOCAL_EPOCHS, DEFAULT_LR, load_schedule, replay

METRICS_FILENAME = "metrics.csv"
WEIGHTS_FILENAME = "final_weights.npy"
SUMMARY_FILENAME = "pattern_summary.csv"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fl-replay",
        description="Replay client-selection schedules on a synthetic federation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rep = sub.add_parser("replay", help="replay one exported schedule JSON")
    p_rep.add_argument("schedule", help="path to a schedule JSON file")
    p_rep.add_argument("--out", default=".", help="output directory")
    p_rep.add_argument("--seed", type=int, default=0,
                       help="federation, membership and init seed")
    p_rep.add_argument("--lr", type=float, default=DEFAULT_LR)
    p_rep.add_argument("--epochs", type=int, default=DEFAULT_LOCAL_EPOCHS,
                       help="local full-batch epochs per selected client")

    p_st = sub.add_parser("pattern-study",
                          help="replay the three participation patterns")
    p_st.add_argument("--rounds", type=int, default=300)
    p_st.add_argument("--clients", type=int, default=10)
    p_st.add_argument("--avg", type=float, default=5.0,
                      help="target mean selected clients per round")
    p_st.add_argument("--num-seeds", type=int, default=30)
    p_st.add_argument("--seed", type=int, default=0, help="first seed")
    p_st.add_argument("--out", default=".", help="output directory")
    p_st.add_argument("--lr", type=float, default=DEFAULT_LR)
    p_st.add_argument("--epochs", type=int, default=DEFAULT_LOCAL_EPOCHS)
    return parser


def _cmd_replay(args) -> int:
    schedule = load_schedule(args.schedule)
    federation = make_federation(schedule.num_clients, seed=args.seed)
    result = replay(schedule, federation, args.epochs, args.lr, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, METRICS_FILENAME), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "loss", "accuracy"])
        for t, (loss, acc) in enumerate(zip(result.losses, result.accuracies)):
            writer.writerow([t, repr(float(loss)), repr(float(acc))])
    np.save(os.path.join(args.out, WEIGHTS_FILENAME), result.final_weights)
    print(f"rounds={schedule.horizon} clients={schedule.num_clients} "
          f"final_loss={float(result.losses[-1])!r} "
          f"final_acc={float(result.accuracies[-1])!r}")
    return 0


def _cmd_pattern_study(args) -> int:
    if args.num_seeds < 1:
        raise ValueError("--num-seeds must be at least 1")
    seeds = range(args.seed, args.seed + args.num_seeds)
    rows = []
    for kind in PATTERN_KINDS:
        rows.extend(pattern_study(kind, args.rounds, args.clients, args.avg,
                                  seeds, args.epochs, args.lr))
    os.makedirs(args.out, exist_ok=True)
    save_study_csv(rows, os.path.join(args.out, SUMMARY_FILENAME))
    for kind, (mean_loss, std_loss, mean_acc) in summarize_study(rows).items():
        print(f"pattern={kind} mean_final_loss={mean_loss!r} "
              f"std_final_loss={std_loss!r} mean_final_acc={mean_acc!r}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            return _cmd_replay(args)
        return _cmd_pattern_study(args)
    except OSError as exc:
        name = getattr(exc, "filename", None)
        where = f"{name}: " if name else ""
        print(f"io error: {where}{exc.strerror or exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
