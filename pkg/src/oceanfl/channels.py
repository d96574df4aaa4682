"""Channel gain generation for the round-based simulator.

A run needs one power gain h2[t][k] per round and client:

    h2[t][k] = PL(t) * g[t][k]

PL(t) is the (linear) mean path gain, 10^(-pl_db(t)/10), where pl_db ramps
linearly in dB from pathloss_db_start to pathloss_db_end across the horizon
(constant for the static scenario). g is unit-mean small-scale fading: i.i.d.
exponential power gain for "rayleigh", identically 1 for "none". Fading draws
are floored at GAIN_FLOOR so priorities stay finite; the floor also gives a
principled minimum gain for the energy-cap constant used in budget reports.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

SCENARIO_KINDS = ("static", "pathloss_ramp_up", "pathloss_ramp_down")
FADING_KINDS = ("rayleigh", "none")

STATIC_PATHLOSS_DB = 36.0
RAMP_PATHLOSS_DB = (32.0, 45.0)  # ramp_up start/end; ramp_down reversed

GAIN_FLOOR = 1e-12  # relative to the unit-mean fading draw


@dataclass(frozen=True)
class ChannelScenario:
    """Declarative description of a channel environment.

    kind: one of SCENARIO_KINDS. pathloss_db_start/end give the dB ramp
    endpoints (equal for static). fading: "rayleigh" or "none". seed feeds the
    fading RNG; runs replace it with the run seed.
    """

    kind: str
    pathloss_db_start: float
    pathloss_db_end: float
    fading: str = "rayleigh"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.fading not in FADING_KINDS:
            raise ValueError(f"unknown fading kind {self.fading!r}")
        for name in ("pathloss_db_start", "pathloss_db_end"):
            val = getattr(self, name)
            if not 0.0 < val < 200.0:
                raise ValueError(f"{name} must lie in (0, 200) dB, got {val}")
        if self.kind == "static" and self.pathloss_db_start != self.pathloss_db_end:
            raise ValueError("static scenario requires equal ramp endpoints")
        if self.kind == "pathloss_ramp_up" and self.pathloss_db_end < self.pathloss_db_start:
            raise ValueError("pathloss_ramp_up requires end >= start (worsening channel)")
        if self.kind == "pathloss_ramp_down" and self.pathloss_db_end > self.pathloss_db_start:
            raise ValueError("pathloss_ramp_down requires end <= start (improving channel)")


def scenario_from_kind(kind: str, fading: str = "rayleigh", seed: int = 0) -> ChannelScenario:
    """Standard scenario presets: static 36 dB, ramps between 32 and 45 dB."""
    if kind == "static":
        lo = hi = STATIC_PATHLOSS_DB
    elif kind == "pathloss_ramp_up":
        lo, hi = RAMP_PATHLOSS_DB
    elif kind == "pathloss_ramp_down":
        hi, lo = RAMP_PATHLOSS_DB
    else:
        raise ValueError(f"unknown scenario kind {kind!r}")
    return ChannelScenario(kind, lo, hi, fading, seed)


def pathloss_db_profile(scenario: ChannelScenario, horizon_t: int) -> np.ndarray:
    """Per-round path loss in dB, linear between the scenario endpoints."""
    if horizon_t < 1:
        raise ValueError("horizon_t must be at least 1")
    if horizon_t == 1:
        return np.array([scenario.pathloss_db_start])
    return np.linspace(scenario.pathloss_db_start, scenario.pathloss_db_end, horizon_t)


def generate_channels(scenario: ChannelScenario, horizon_t: int, num_clients: int) -> np.ndarray:
    """Draw the (horizon_t, num_clients) power-gain matrix for one run.

    Deterministic in scenario.seed: identical inputs give bit-identical
    output. All entries are strictly positive.
    """
    if num_clients < 1:
        raise ValueError("num_clients must be at least 1")
    pl_db = pathloss_db_profile(scenario, horizon_t)
    pl = np.power(10.0, -pl_db / 10.0)[:, None]  # (T, 1)
    if scenario.fading == "rayleigh":
        rng = np.random.default_rng(scenario.seed)
        g = rng.exponential(scale=1.0, size=(horizon_t, num_clients))
        g = np.maximum(g, GAIN_FLOOR)
    else:
        g = np.ones((horizon_t, num_clients))
    return pl * g


def scenario_gain_floor(scenario: ChannelScenario) -> float:
    """Smallest power gain generate_channels can ever emit for a scenario:
    the worst path loss times the fading floor (1 without fading)."""
    worst_db = max(scenario.pathloss_db_start, scenario.pathloss_db_end)
    floor = GAIN_FLOOR if scenario.fading == "rayleigh" else 1.0
    return float(10.0 ** (-worst_db / 10.0) * floor)


def save_channels_csv(channels: np.ndarray, path) -> None:
    """Write a gain matrix as round,client,h_squared rows (full precision)."""
    channels = np.asarray(channels, dtype=float)
    if channels.ndim != 2:
        raise ValueError("channels must be a 2-D matrix")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "client", "h_squared"])
        for t in range(channels.shape[0]):
            for k in range(channels.shape[1]):
                writer.writerow([t, k, repr(float(channels[t, k]))])


def load_channels_csv(path) -> np.ndarray:
    """Read a gain matrix written by save_channels_csv; validates shape and
    positivity of every entry."""
    entries = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["round", "client", "h_squared"]:
            raise ValueError(f"unexpected channel CSV header: {header}")
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"malformed channel CSV row: {row}")
            t, k, h2 = int(row[0]), int(row[1]), float(row[2])
            if (t, k) in entries:
                raise ValueError(f"duplicate channel entry for round {t}, client {k}")
            entries[(t, k)] = h2
    if not entries:
        raise ValueError("channel CSV holds no entries")
    T = max(t for t, _ in entries) + 1
    K = max(k for _, k in entries) + 1
    if len(entries) != T * K:
        raise ValueError("channel CSV is not a dense round x client grid")
    out = np.empty((T, K))
    for (t, k), h2 in entries.items():
        if h2 <= 0.0:
            raise ValueError(f"nonpositive gain at round {t}, client {k}")
        out[t, k] = h2
    return out
