"""INI config files: the single source of truth for a run.

Five sections, every key validated, unknown sections/keys rejected so typos
fail loudly rather than silently falling back to defaults:

  [network]  bandwidth_hz, noise_watt, deadline_s, model_bits, b_min
  [run]      horizon_t, frame_r, num_clients, seed
  [budgets]  h_joules (scalar broadcast to all clients, or K comma values)
  [policy]   name, eta (uniform|ascending|descending), v (scalar or one value
             per frame) or v_grid (sweep values; exactly one of v / v_grid)
  [scenario] kind, fading
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .channels import FADING_KINDS, SCENARIO_KINDS, scenario_from_kind
from .energy import NetworkParams
from .scheduler import ETA_KINDS, RunConfig, build_eta_sequence

POLICY_CHOICES = ("ocean", "ocean-a", "ocean-d", "ocean-u", "select_all", "smo", "amo")

_SCHEMA = {
    "network": ("bandwidth_hz", "noise_watt", "deadline_s", "model_bits", "b_min"),
    "run": ("horizon_t", "frame_r", "num_clients", "seed"),
    "budgets": ("h_joules",),
    "policy": ("name", "eta", "v", "v_grid"),
    "scenario": ("kind", "fading"),
}


class ConfigError(ValueError):
    """A config file failed validation; the message names the field."""


@dataclass
class LoadedConfig:
    """Parse result: a ready RunConfig plus the policy selection."""

    run_config: RunConfig
    policy: str
    eta_kind: str
    v_grid: tuple  # empty unless the file provided v_grid


def _float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from None


def _int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}") from None


def _float_list(section: str, key: str, raw: str) -> tuple:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"[{section}] {key}: empty value")
    return tuple(_float(section, key, p) for p in parts)


def _choice(section: str, key: str, raw: str, choices) -> str:
    if raw not in choices:
        raise ConfigError(
            f"[{section}] {key}: {raw!r} is not one of {', '.join(choices)}")
    return raw


def parse_config(text: str, origin: str = "<config>") -> LoadedConfig:
    """Parse and validate config text; raises ConfigError naming the field."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                       interpolation=None)
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"[{section}] unknown key {key!r}")
    for section in _SCHEMA:
        if section not in parser:
            raise ConfigError(f"missing section [{section}]")

    def need(section: str, key: str) -> str:
        if key not in parser[section]:
            raise ConfigError(f"[{section}] missing key {key!r}")
        return parser[section][key]

    net = "network"
    try:
        params = NetworkParams(
            bandwidth_hz=_float(net, "bandwidth_hz", need(net, "bandwidth_hz")),
            noise_watt=_float(net, "noise_watt", need(net, "noise_watt")),
            deadline_s=_float(net, "deadline_s", need(net, "deadline_s")),
            model_bits=_float(net, "model_bits", need(net, "model_bits")),
            b_min=_float(net, "b_min", need(net, "b_min")),
            num_clients=_int("run", "num_clients", need("run", "num_clients")),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[network]: {exc}") from exc

    horizon_t = _int("run", "horizon_t", need("run", "horizon_t"))
    frame_r = _int("run", "frame_r", need("run", "frame_r"))
    seed = _int("run", "seed", need("run", "seed"))

    budgets = _float_list("budgets", "h_joules", need("budgets", "h_joules"))
    if len(budgets) == 1:
        budgets = budgets * params.num_clients
    if len(budgets) != params.num_clients:
        raise ConfigError(
            f"[budgets] h_joules: expected 1 or {params.num_clients} values, "
            f"got {len(budgets)}")

    policy = _choice("policy", "name", need("policy", "name"), POLICY_CHOICES)
    eta_kind = _choice("policy", "eta", need("policy", "eta"), ETA_KINDS)

    has_v = "v" in parser["policy"]
    has_grid = "v_grid" in parser["policy"]
    if has_v == has_grid:
        raise ConfigError("[policy]: provide exactly one of 'v' or 'v_grid'")
    if horizon_t < 1 or frame_r < 1 or horizon_t % frame_r != 0:
        raise ConfigError(
            f"[run]: horizon_t must be a positive multiple of frame_r "
            f"(got horizon_t={horizon_t}, frame_r={frame_r})")
    num_frames = horizon_t // frame_r
    v_grid = ()
    if has_v:
        v_values = _float_list("policy", "v", parser["policy"]["v"])
        if len(v_values) == 1:
            v_seq = v_values * num_frames
        elif len(v_values) == num_frames:
            v_seq = v_values
        else:
            raise ConfigError(
                f"[policy] v: expected 1 or {num_frames} values, got {len(v_values)}")
    else:
        v_grid = _float_list("policy", "v_grid", parser["policy"]["v_grid"])
        if len(set(v_grid)) != len(v_grid):
            raise ConfigError("[policy] v_grid: duplicate values")
        if any(v <= 0.0 for v in v_grid):
            raise ConfigError("[policy] v_grid: values must be positive")
        v_seq = (v_grid[0],) * num_frames

    kind = _choice("scenario", "kind", need("scenario", "kind"), SCENARIO_KINDS)
    fading = _choice("scenario", "fading", need("scenario", "fading"), FADING_KINDS)
    scenario = scenario_from_kind(kind, fading=fading, seed=seed)

    try:
        eta_seq = tuple(float(x) for x in build_eta_sequence(eta_kind, horizon_t))
        run_config = RunConfig(
            horizon_t=horizon_t,
            frame_r=frame_r,
            v_sequence=v_seq,
            eta_sequence=eta_seq,
            budgets=budgets,
            params=params,
            seed=seed,
            scenario=scenario,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return LoadedConfig(run_config=run_config, policy=policy,
                        eta_kind=eta_kind, v_grid=v_grid)


def load_config(path: str) -> LoadedConfig:
    """Read and parse a config file. I/O errors propagate as OSError."""
    with open(path, "r") as fh:
        text = fh.read()
    return parse_config(text, origin=path)
