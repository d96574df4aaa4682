"""Experiment orchestration.

Runs a policy over a generated channel matrix, collects a Trace, aggregates
sweeps over V / seeds / scenarios, and persists three artifact kinds:

  trace file    one JSON header line, then CSV rows t,k,a,b,energy_J,
                q_after_J,eta,v (one row per round x client)
  schedule file JSON {"T", "K", "rounds": [[client indices]...]} for the
                replay package
  summary file  CSV axis_value,seed,total_utility,mean_selected,
                max_violation_J

The run seed fully determines a run: channel fading is drawn from the config
seed (the scenario's own seed field is overridden), and every policy is
deterministic given the channels.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass

import numpy as np

from .benchmarks import amo_round, select_all_round, smo_round
from .channels import ChannelScenario, generate_channels, scenario_from_kind
from .energy import NetworkParams, tx_energy
from .scheduler import RunConfig, build_eta_sequence, queue_update, run_ocean
from .solver import RoundDecision
from .trace import RoundRecord, Trace

SCHEMA_VERSION = 1
POLICY_NAMES = ("ocean", "ocean-a", "ocean-d", "ocean-u", "select_all", "smo", "amo")
SWEEP_AXES = ("v", "seeds", "scenario")

TRACE_COLUMNS = ["t", "k", "a", "b", "energy_J", "q_after_J", "eta", "v"]
SUMMARY_COLUMNS = ["axis_value", "seed", "total_utility", "mean_selected",
                   "max_violation_J"]


class TraceFormatError(ValueError):
    """A persisted trace or schedule file is malformed or inconsistent."""


def make_channels(config: RunConfig) -> np.ndarray:
    """Channel matrix for a run; fading keyed by the run seed (RunConfig
    pins its scenario's seed to the run seed)."""
    return generate_channels(config.scenario, config.horizon_t,
                             config.params.num_clients)


def _with_eta_kind(config: RunConfig, kind: str) -> RunConfig:
    eta = build_eta_sequence(kind, config.horizon_t)
    return dataclasses.replace(config, eta_sequence=tuple(float(x) for x in eta))


def run_experiment(policy: str, config: RunConfig, channels=None) -> Trace:
    """Run one policy over one channel realization and record everything.

    ocean uses the config's eta sequence as given; ocean-a / ocean-d /
    ocean-u override it with the ascending / descending / uniform builder.
    Baselines keep zero queues and v_in_effect = 0 in their records.
    """
    if policy not in POLICY_NAMES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICY_NAMES}")
    if channels is None:
        channels = make_channels(config)
    channels = np.asarray(channels, dtype=float)

    if policy.startswith("ocean"):
        cfg = config
        if policy == "ocean-a":
            cfg = _with_eta_kind(config, "ascending")
        elif policy == "ocean-d":
            cfg = _with_eta_kind(config, "descending")
        elif policy == "ocean-u":
            cfg = _with_eta_kind(config, "uniform")
        trace = run_ocean(cfg, channels)
        return dataclasses.replace(trace, policy=policy)

    params = config.params
    T, K = config.horizon_t, params.num_clients
    if channels.shape != (T, K):
        raise ValueError(f"channels must have shape {(T, K)}")
    budgets = np.asarray(config.budgets, dtype=float)
    eta = np.asarray(config.eta_sequence, dtype=float)
    records = []
    spent = np.zeros(K)
    for t in range(T):
        if policy == "select_all":
            dec = select_all_round(channels[t], params)
        elif policy == "smo":
            dec = smo_round(channels[t], budgets / T, params)
        else:
            dec = amo_round(channels[t], budgets, spent, t, T, params)
        energy = tx_energy(dec.selected, dec.shares, channels[t], params)
        spent = spent + energy
        records.append(RoundRecord(
            round_t=t,
            decision=dec,
            per_client_energy=energy,
            queue_after=np.zeros(K),
            utility=float(eta[t]) * dec.num_selected,
            eta=float(eta[t]),
            v_in_effect=0.0,
        ))
    return Trace(policy=policy, records=records, budgets=budgets)


def summarize(trace: Trace) -> dict:
    """Totals of one run, keyed like the summary CSV columns."""
    return {
        "total_utility": trace.total_utility,
        "mean_selected": trace.mean_selected,
        "max_violation_J": trace.max_violation,
    }


@dataclass
class SummaryRow:
    """One (axis value, seed) cell of a sweep."""

    axis_value: object
    seed: int
    total_utility: float
    mean_selected: float
    max_violation: float


def sweep(policy: str, base_config: RunConfig, axis: str, values,
          num_seeds: int = 20) -> list:
    """Run a policy across one sweep axis with paired seeds.

    axis "v": each value replaces every frame's V; seeds base..base+n-1 are
    shared across values so rows are comparable. axis "scenario": values are
    scenario kinds, same seed pairing. axis "seeds": values ARE the seeds and
    num_seeds is ignored.
    """
    values = list(values)
    if not values:
        raise ValueError("values must be nonempty")
    if len(set(values)) != len(values):
        raise ValueError("duplicate sweep values are not allowed")
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}")
    rows = []
    if axis == "seeds":
        for s in values:
            cfg = dataclasses.replace(base_config, seed=int(s))
            tr = run_experiment(policy, cfg)
            rows.append(SummaryRow(int(s), int(s), tr.total_utility,
                                   tr.mean_selected, tr.max_violation))
        return rows
    if num_seeds < 1:
        raise ValueError("num_seeds must be at least 1")
    seeds = [base_config.seed + i for i in range(num_seeds)]
    for value in values:
        if axis == "v":
            v = float(value)
            if not v > 0.0:
                raise ValueError("v values must be positive")
            cfg0 = dataclasses.replace(
                base_config, v_sequence=(v,) * base_config.num_frames)
        else:
            scen = scenario_from_kind(str(value), fading=base_config.scenario.fading,
                                      seed=base_config.scenario.seed)
            cfg0 = dataclasses.replace(base_config, scenario=scen)
        for s in seeds:
            cfg = dataclasses.replace(cfg0, seed=s)
            tr = run_experiment(policy, cfg)
            rows.append(SummaryRow(value, s, tr.total_utility,
                                   tr.mean_selected, tr.max_violation))
    return rows


def save_summary_csv(rows, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for r in rows:
            writer.writerow([r.axis_value, r.seed, repr(r.total_utility),
                             repr(r.mean_selected), repr(r.max_violation)])


def _scenario_to_dict(scenario: ChannelScenario) -> dict:
    return {
        "kind": scenario.kind,
        "pathloss_db_start": scenario.pathloss_db_start,
        "pathloss_db_end": scenario.pathloss_db_end,
        "fading": scenario.fading,
    }


def _params_to_dict(params: NetworkParams) -> dict:
    return {
        "bandwidth_hz": params.bandwidth_hz,
        "noise_watt": params.noise_watt,
        "deadline_s": params.deadline_s,
        "model_bits": params.model_bits,
        "b_min": params.b_min,
        "num_clients": params.num_clients,
    }


def save_trace(trace: Trace, config: RunConfig, path: str) -> None:
    """Persist a run: one JSON header line, then one CSV row per (t, k)."""
    header = {
        "schema_version": SCHEMA_VERSION,
        "policy": trace.policy,
        "network": _params_to_dict(config.params),
        "run": {"horizon_t": config.horizon_t, "frame_r": config.frame_r,
                "seed": config.seed},
        "v_sequence": list(config.v_sequence),
        "eta_sequence": list(config.eta_sequence),
        "budgets": [float(h) for h in config.budgets],
        "scenario": _scenario_to_dict(config.scenario),
        "totals": {
            "total_utility": trace.total_utility,
            "per_client_energy": [float(e) for e in trace.per_client_energy],
            "violations": [float(v) for v in trace.violations],
        },
    }
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(TRACE_COLUMNS)
    for rec in trace.records:
        for k in range(trace.num_clients):
            writer.writerow([
                rec.round_t, k, int(rec.decision.selected[k]),
                repr(float(rec.decision.shares[k])),
                repr(float(rec.per_client_energy[k])),
                repr(float(rec.queue_after[k])),
                repr(float(rec.eta)), repr(float(rec.v_in_effect)),
            ])
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(header, sort_keys=True))
        fh.write("\n")
        fh.write(buf.getvalue())


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise TraceFormatError(message)


def load_trace(path: str, verify_channels: bool = True):
    """Read a persisted run back as (Trace, RunConfig), checking consistency.

    Always verifies that the stored totals match totals recomputed from the
    rows (1e-12 relative) and, for the queue-driven policies, that the stored
    queue column replays from the queue recursion. With verify_channels the
    channel matrix is regenerated from the header scenario + seed and each
    stored energy is compared against a recomputation from (a, b, h2).
    Decisions' objective_value is not persisted and loads as NaN.
    """
    with open(path, "r", newline="") as fh:
        header_line = fh.readline()
        body = fh.read()
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{path}: bad header JSON: {exc}") from exc
    _require(isinstance(header, dict), f"{path}: header must be a JSON object")
    _require(header.get("schema_version") == SCHEMA_VERSION,
             f"{path}: unsupported schema_version {header.get('schema_version')!r}")
    for key in ("policy", "network", "run", "v_sequence", "eta_sequence",
                "budgets", "scenario", "totals"):
        _require(key in header, f"{path}: header missing {key!r}")

    net = header["network"]
    params = NetworkParams(
        bandwidth_hz=float(net["bandwidth_hz"]),
        noise_watt=float(net["noise_watt"]),
        deadline_s=float(net["deadline_s"]),
        model_bits=float(net["model_bits"]),
        b_min=float(net["b_min"]),
        num_clients=int(net["num_clients"]),
    )
    scen = header["scenario"]
    scenario = ChannelScenario(
        kind=str(scen["kind"]),
        pathloss_db_start=float(scen["pathloss_db_start"]),
        pathloss_db_end=float(scen["pathloss_db_end"]),
        fading=str(scen["fading"]),
        seed=int(header["run"]["seed"]),
    )
    config = RunConfig(
        horizon_t=int(header["run"]["horizon_t"]),
        frame_r=int(header["run"]["frame_r"]),
        v_sequence=tuple(float(v) for v in header["v_sequence"]),
        eta_sequence=tuple(float(e) for e in header["eta_sequence"]),
        budgets=tuple(float(h) for h in header["budgets"]),
        params=params,
        seed=int(header["run"]["seed"]),
        scenario=scenario,
    )
    policy = str(header["policy"])
    _require(policy in POLICY_NAMES, f"{path}: unknown policy {policy!r}")

    T, K = config.horizon_t, params.num_clients
    reader = csv.reader(io.StringIO(body))
    rows = list(reader)
    _require(len(rows) >= 1 and rows[0] == TRACE_COLUMNS,
             f"{path}: bad or missing CSV column header")
    rows = rows[1:]
    _require(len(rows) == T * K, f"{path}: expected {T * K} rows, found {len(rows)}")

    selected = np.zeros((T, K), dtype=int)
    shares = np.zeros((T, K))
    energy = np.zeros((T, K))
    q_after = np.zeros((T, K))
    eta_col = np.zeros(T)
    v_col = np.zeros(T)
    for i, row in enumerate(rows):
        _require(len(row) == len(TRACE_COLUMNS), f"{path}: row {i + 2} malformed")
        t, k = int(row[0]), int(row[1])
        _require(i == t * K + k, f"{path}: row {i + 2} out of (t, k) order")
        selected[t, k] = int(row[2])
        _require(selected[t, k] in (0, 1), f"{path}: row {i + 2}: a must be 0/1")
        shares[t, k] = float(row[3])
        energy[t, k] = float(row[4])
        q_after[t, k] = float(row[5])
        eta_col[t] = float(row[6])
        v_col[t] = float(row[7])

    records = []
    for t in range(T):
        dec = RoundDecision(selected[t].copy(), shares[t].copy(), float("nan"))
        records.append(RoundRecord(
            round_t=t, decision=dec, per_client_energy=energy[t].copy(),
            queue_after=q_after[t].copy(),
            utility=float(eta_col[t]) * int(np.sum(selected[t])),
            eta=float(eta_col[t]), v_in_effect=float(v_col[t]),
        ))
    trace = Trace(policy=policy, records=records, budgets=config.budgets)

    totals = header["totals"]
    def _close(a, b):
        return abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1.0)
    _require(_close(trace.total_utility, float(totals["total_utility"])),
             f"{path}: stored total_utility disagrees with the rows")
    stored_e = np.asarray(totals["per_client_energy"], dtype=float)
    stored_v = np.asarray(totals["violations"], dtype=float)
    _require(stored_e.shape == (K,) and stored_v.shape == (K,),
             f"{path}: totals arrays must have one entry per client")
    for k in range(K):
        _require(_close(trace.per_client_energy[k], stored_e[k]),
                 f"{path}: stored per-client energy disagrees (client {k})")
        _require(_close(trace.violations[k], stored_v[k]),
                 f"{path}: stored violation disagrees (client {k})")

    if policy.startswith("ocean"):
        budgets = np.asarray(config.budgets, dtype=float)
        q = np.zeros(K)
        for t in range(T):
            if t % config.frame_r == 0:
                q = np.zeros(K)
            q = queue_update(q, energy[t], budgets / T)
            for k in range(K):
                _require(_close(q[k], q_after[t, k]),
                         f"{path}: queue column does not replay at round {t}")
            expect_v = config.v_sequence[t // config.frame_r]
            _require(_close(v_col[t], expect_v),
                     f"{path}: v column disagrees with v_sequence at round {t}")

    if verify_channels:
        channels = make_channels(config)
        recomputed = np.zeros((T, K))
        for t in range(T):
            recomputed[t] = tx_energy(selected[t], shares[t], channels[t], params)
        for t in range(T):
            for k in range(K):
                _require(_close(recomputed[t, k], energy[t, k]),
                         f"{path}: energy at (t={t}, k={k}) does not match the "
                         f"regenerated channels")
    return trace, config


def export_schedule(trace: Trace, path: str) -> None:
    """Write the per-round selected-index lists; empty rounds stay as []."""
    rounds = [
        [k for k in range(trace.num_clients) if rec.decision.selected[k] == 1]
        for rec in trace.records
    ]
    payload = {"T": trace.num_rounds, "K": trace.num_clients, "rounds": rounds}
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_schedule(path: str) -> dict:
    """Read and validate a schedule file; returns {"T", "K", "rounds"}."""
    with open(path, "r") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"{path}: bad schedule JSON: {exc}") from exc
    _require(isinstance(payload, dict) and set(payload) == {"T", "K", "rounds"},
             f"{path}: schedule must have exactly the keys T, K, rounds")
    T, K, rounds = payload["T"], payload["K"], payload["rounds"]
    _require(isinstance(T, int) and T >= 1, f"{path}: T must be a positive int")
    _require(isinstance(K, int) and K >= 1, f"{path}: K must be a positive int")
    _require(isinstance(rounds, list) and len(rounds) == T,
             f"{path}: rounds must list exactly T rounds")
    for t, sel in enumerate(rounds):
        _require(isinstance(sel, list), f"{path}: round {t} must be a list")
        for k in sel:
            _require(isinstance(k, int) and 0 <= k < K,
                     f"{path}: round {t} holds an out-of-range client index")
        _require(sorted(set(sel)) == sel,
                 f"{path}: round {t} indices must be sorted and unique")
    return {"T": T, "K": K, "rounds": [list(sel) for sel in rounds]}
