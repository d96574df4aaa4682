"""Temporal participation patterns and the multi-seed replay study.

Three count profiles over the horizon — ascend (few clients early, all
clients late), its element-wise reverse descend, and uniform — all hitting
the same average participation. Round membership is sampled uniformly
without replacement each round (the schedule format carries only counts'
worth of structure, so membership balance is a sampling choice, documented
here).
"""

import csv
from dataclasses import dataclass

import numpy as np

from .data import make_federation
from .replay import DEFAULT_LOCAL_EPOCHS, DEFAULT_LR, Schedule, replay

PATTERN_KINDS = ("ascend", "descend", "uniform")
SUMMARY_COLUMNS = ["pattern", "seed", "final_loss", "final_acc"]


def _ascending_profile(horizon, num_clients, avg_selected):
    """Real-valued nondecreasing profile from 1 to num_clients with the
    requested mean: a hold at one endpoint plus a linear ramp."""
    t = np.arange(horizon, dtype=float)
    if horizon == 1 or num_clients == 1:
        return np.full(horizon, float(avg_selected))
    half = (1.0 + num_clients) / 2.0
    if avg_selected <= half:
        alpha = (half - avg_selected) / (half - 1.0)  # fraction held at 1
        t0 = alpha * (horizon - 1)
        if t0 >= horizon - 1:  # mean of 1 leaves no room for a ramp
            return np.ones(horizon)
        ramp = (t - t0) / (horizon - 1 - t0)
        return 1.0 + (num_clients - 1.0) * np.clip(ramp, 0.0, 1.0)
    alpha = (avg_selected - half) / (num_clients - half)  # fraction held at K
    t1 = (1.0 - alpha) * (horizon - 1)
    if t1 <= 0.0:  # mean of num_clients leaves no room either
        return np.full(horizon, float(num_clients))
    ramp = t / t1
    return 1.0 + (num_clients - 1.0) * np.clip(ramp, 0.0, 1.0)


def pattern_counts(kind: str, horizon: int, num_clients: int,
                   avg_selected: float) -> np.ndarray:
    """Per-round participation counts.

    The sum lands on round(avg_selected * horizon) — mean within 1/horizon of
    the target — ascend is nondecreasing from 1 to num_clients (given enough
    rounds for the ramp), descend is exactly its reverse, uniform spreads the
    rounding evenly.
    """
    if kind not in PATTERN_KINDS:
        raise ValueError(f"unknown pattern kind {kind!r}, expected one of {PATTERN_KINDS}")
    if horizon < 1 or num_clients < 1:
        raise ValueError("horizon and num_clients must be positive")
    if not 1.0 <= avg_selected <= num_clients:
        raise ValueError("avg_selected must lie in [1, num_clients]")
    total = int(round(avg_selected * horizon))
    if kind == "uniform":
        quota = np.round(np.arange(horizon + 1) * avg_selected)
        return np.diff(quota).astype(int)
    if kind == "descend":
        return pattern_counts("ascend", horizon, num_clients, avg_selected)[::-1].copy()
    profile = _ascending_profile(horizon, num_clients, avg_selected)
    counts = np.floor(profile).astype(int)
    frac = profile - np.floor(profile)
    deficit = total - int(counts.sum())
    # hand out the missing client-rounds to the largest fractional parts,
    # later rounds first on ties, so the profile stays nondecreasing
    order = np.lexsort((-np.arange(horizon), -frac))
    i = 0
    while deficit > 0 and i < horizon:
        j = order[i]
        if counts[j] < num_clients:
            counts[j] += 1
            deficit -= 1
        i += 1
    i = horizon - 1
    while deficit < 0 and i >= 0:  # rare overshoot: shave the smallest fracs
        j = order[i]
        if counts[j] > 1:
            counts[j] -= 1
            deficit += 1
        i -= 1
    if deficit != 0:
        raise RuntimeError("count construction failed to hit the target total")
    return counts


def build_schedule(kind: str, horizon: int, num_clients: int,
                   avg_selected: float, seed: int) -> Schedule:
    """Counts from the pattern, membership uniform without replacement."""
    counts = pattern_counts(kind, horizon, num_clients, avg_selected)
    rng = np.random.default_rng(seed)
    rounds = tuple(
        tuple(sorted(rng.choice(num_clients, size=int(c), replace=False)))
        for c in counts)
    return Schedule(horizon, num_clients, rounds)


@dataclass
class StudyRow:
    """Final held-out metrics of one (pattern, seed) replay."""

    pattern: str
    seed: int
    final_loss: float
    final_acc: float


def pattern_study(kind: str, horizon: int, num_clients: int,
                  avg_selected: float, seeds,
                  local_epochs: int = DEFAULT_LOCAL_EPOCHS,
                  lr: float = DEFAULT_LR) -> list:
    """Replay one pattern across seeds.

    Each seed drives the federation draw, the round membership and the weight
    init together, so rows with the same seed are paired across patterns and
    differ only in the participation profile.
    """
    rows = []
    for seed in seeds:
        federation = make_federation(num_clients, seed=seed)
        schedule = build_schedule(kind, horizon, num_clients, avg_selected, seed)
        result = replay(schedule, federation, local_epochs, lr, seed=seed)
        rows.append(StudyRow(kind, int(seed), float(result.losses[-1]),
                             float(result.accuracies[-1])))
    return rows


def summarize_study(rows) -> dict:
    """pattern -> (mean final loss, sample std of final loss, mean final acc)."""
    out = {}
    for kind in sorted({r.pattern for r in rows}):
        losses = np.array([r.final_loss for r in rows if r.pattern == kind])
        accs = np.array([r.final_acc for r in rows if r.pattern == kind])
        out[kind] = (float(losses.mean()),
                     float(losses.std(ddof=1)) if losses.size > 1 else 0.0,
                     float(accs.mean()))
    return out


def save_study_csv(rows, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for r in rows:
            writer.writerow([r.pattern, r.seed, repr(r.final_loss),
                             repr(r.final_acc)])
