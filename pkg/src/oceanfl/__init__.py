"""Discrete-round simulator for joint client selection and bandwidth
allocation in wireless federated learning under per-client energy budgets.

The core pieces: a deadline-upload energy model (energy), an exact per-round
scheduler built on a priority order plus a convex share split (solver), a
virtual-queue frame scheduler with an overshoot bound report (scheduler),
baseline policies and a tiny exhaustive oracle (benchmarks), seeded channel
generation (channels), and an experiment engine with trace / schedule /
summary persistence (engine) driven by INI configs (config) and a CLI (cli).
"""

from .benchmarks import (LookaheadResult, amo_round, lookahead_oracle,
                         required_share, select_all_round, smo_round)
from .channels import (ChannelScenario, generate_channels, load_channels_csv,
                       save_channels_csv, scenario_from_kind,
                       scenario_gain_floor)
from .config import ConfigError, LoadedConfig, load_config, parse_config
from .energy import (NetworkParams, energy_max, kernel_f, kernel_f_prime,
                     kernel_f_prime_inv, required_power, tx_energy)
from .engine import (SummaryRow, TraceFormatError, export_schedule,
                     load_schedule, load_trace, make_channels, run_experiment,
                     save_summary_csv, save_trace, summarize, sweep)
from .scheduler import (BoundReport, RunConfig, bound_report,
                        build_eta_sequence, queue_update, run_ocean)
from .solver import (ClientRoundState, InfeasibleError, RoundDecision,
                     allocate_bandwidth, brute_force_round, round_objective,
                     solve_round, validate_decision)
from .trace import RoundRecord, Trace

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "ChannelScenario", "ClientRoundState", "ConfigError",
    "InfeasibleError", "LoadedConfig", "LookaheadResult", "NetworkParams",
    "RoundDecision", "RoundRecord", "RunConfig", "SummaryRow", "Trace",
    "TraceFormatError", "allocate_bandwidth", "amo_round", "bound_report",
    "brute_force_round", "build_eta_sequence", "energy_max",
    "export_schedule", "generate_channels", "kernel_f", "kernel_f_prime",
    "kernel_f_prime_inv", "load_channels_csv", "load_config", "load_schedule",
    "load_trace", "lookahead_oracle", "make_channels", "parse_config",
    "queue_update", "required_power", "required_share", "round_objective",
    "run_experiment", "run_ocean", "save_channels_csv", "save_summary_csv",
    "save_trace", "scenario_from_kind", "scenario_gain_floor",
    "select_all_round", "smo_round", "solve_round", "summarize", "sweep",
    "tx_energy", "validate_decision",
]
