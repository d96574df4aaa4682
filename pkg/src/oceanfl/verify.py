"""Randomized property suites behind the `verify` CLI subcommand.

solver_suite   per-round scheduler vs the 2^K enumeration oracle
structure_suite priority-prefix selection and in-priority monotonicity
bounds_suite   frame energy-overshoot bound on full simulated traces

Each suite returns a SuiteReport with a machine-readable failure list so the
CLI can dump exactly what broke.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import scenario_from_kind, scenario_gain_floor
from .energy import NetworkParams, tx_energy
from .scheduler import RunConfig, bound_report, run_ocean
from .solver import ClientRoundState, RoundDecision, brute_force_round, solve_round

DEFAULT_SEED = 20260819
SUITE_NAMES = ("solver", "structure", "bounds")

_SOLVER_V_CYCLE = (0.1, 1.0, 10.0)
_BOUNDS_V_CYCLE = (0.5, 5.0, 50.0)


def default_params(num_clients: int) -> NetworkParams:
    """The simulation constants used throughout the shipped configs."""
    return NetworkParams(
        bandwidth_hz=1e7,
        noise_watt=1e-12,
        deadline_s=0.3,
        model_bits=3.4e5,
        b_min=0.02,
        num_clients=num_clients,
    )


@dataclass
class SuiteReport:
    """Outcome of one property suite."""

    name: str
    num_checked: int = 0
    num_failed: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.num_failed == 0

    def record(self, detail: dict) -> None:
        self.num_failed += 1
        self.failures.append(detail)


def random_round_instances(num_instances: int, seed: int):
    """Random small scheduling rounds: 2-6 clients, gains from the 32-45 dB
    path-loss band, queue backlogs uniform on [0, 0.05] J, V cycling over
    three magnitudes. Yields (states, v, eta, params)."""
    rng = np.random.default_rng(seed)
    for i in range(num_instances):
        K = int(rng.integers(2, 7))
        params = default_params(K)
        h2 = np.power(10.0, -rng.uniform(32.0, 45.0, K) / 10.0)
        q = rng.uniform(0.0, 0.05, K)
        states = [
            ClientRoundState.from_queue(k, float(h2[k]), float(q[k]))
            for k in range(K)
        ]
        yield states, _SOLVER_V_CYCLE[i % len(_SOLVER_V_CYCLE)], 1.0, params


def is_priority_prefix(states, decision: RoundDecision) -> bool:
    """Selected set must be the first m clients in (priority, id) order."""
    order = sorted(
        range(len(states)),
        key=lambda i: (states[i].priority_rho, states[i].client_id),
    )
    m = decision.num_selected
    return set(int(i) for i in np.nonzero(decision.selected)[0]) == set(order[:m])


def monotone_in_priority(states, decision: RoundDecision, params: NetworkParams):
    """Among selected backlogged clients, shares and per-client weighted
    energy q*E must both be nondecreasing in priority. Returns a list of
    violation descriptions (empty = clean)."""
    problems = []
    idx = [
        i for i in range(len(states))
        if decision.selected[i] == 1 and states[i].priority_rho > 0.0
    ]
    idx.sort(key=lambda i: (states[i].priority_rho, states[i].client_id))
    if len(idx) < 2:
        return problems
    shares = np.array([decision.shares[i] for i in idx])
    qe = np.array([
        states[i].queue_q * tx_energy(1, decision.shares[i], states[i].h_squared, params)
        for i in idx
    ])
    for j in range(1, len(idx)):
        if shares[j] < shares[j - 1] * (1.0 - 1e-9) - 1e-15:
            problems.append({"kind": "share_order", "position": j,
                             "prev": float(shares[j - 1]), "next": float(shares[j])})
        if qe[j] < qe[j - 1] * (1.0 - 1e-9) - 1e-18:
            problems.append({"kind": "weighted_energy_order", "position": j,
                             "prev": float(qe[j - 1]), "next": float(qe[j])})
    return problems


def _instance_detail(i, states, v, gap=None):
    return {
        "instance": i,
        "v": v,
        "h_squared": [s.h_squared for s in states],
        "queue_q": [s.queue_q for s in states],
        **({"gap": gap} if gap is not None else {}),
    }


def solver_suite(num_instances: int = 1000, seed: int = DEFAULT_SEED,
                 rel_tol: float = 1e-6) -> SuiteReport:
    """Compare solve_round against brute-force subset enumeration."""
    report = SuiteReport("solver")
    for i, (states, v, eta, params) in enumerate(
            random_round_instances(num_instances, seed)):
        got = solve_round(states, v, eta, params)
        want = brute_force_round(states, v, eta, params)
        scale = max(abs(want.objective_value), 1e-12)
        gap = abs(got.objective_value - want.objective_value)
        report.num_checked += 1
        if gap > rel_tol * scale:
            report.record(_instance_detail(i, states, v, gap=gap / scale))
    return report


def structure_suite(num_instances: int = 1000, seed: int = DEFAULT_SEED) -> SuiteReport:
    """Priority-prefix + monotonicity structure on random rounds."""
    report = SuiteReport("structure")
    for i, (states, v, eta, params) in enumerate(
            random_round_instances(num_instances, seed)):
        decision = solve_round(states, v, eta, params)
        report.num_checked += 1
        detail = None
        if not is_priority_prefix(states, decision):
            detail = _instance_detail(i, states, v)
            detail["kind"] = "not_a_priority_prefix"
        problems = monotone_in_priority(states, decision, params)
        if problems:
            detail = detail or _instance_detail(i, states, v)
            detail["monotonicity"] = problems
        if detail is not None:
            report.record(detail)
    return report


def bounds_trace_config(v: float, seed: int, num_clients: int = 10,
                        horizon_t: int = 300) -> RunConfig:
    """One-frame static-scenario config used by the bound suite."""
    params = default_params(num_clients)
    return RunConfig(
        horizon_t=horizon_t,
        frame_r=horizon_t,
        v_sequence=(v,),
        eta_sequence=(1.0,) * horizon_t,
        budgets=(0.15,) * num_clients,
        params=params,
        seed=seed,
        scenario=scenario_from_kind("static", fading="rayleigh", seed=seed),
    )


def bounds_suite(num_traces: int = 50, seed: int = DEFAULT_SEED) -> SuiteReport:
    """Check the frame overshoot bound on full traces, with the worst-case
    per-round energy taken at the generator's gain floor."""
    from .engine import make_channels

    report = SuiteReport("bounds")
    for i in range(num_traces):
        v = _BOUNDS_V_CYCLE[i % len(_BOUNDS_V_CYCLE)]
        config = bounds_trace_config(v, seed + i)
        trace = run_ocean(config, make_channels(config))
        rep = bound_report(trace, config, scenario_gain_floor(config.scenario))
        report.num_checked += 1
        if np.any(rep.exceeds):
            bad = [int(k) for k in np.nonzero(rep.exceeds)[0]]
            report.record({
                "trace": i, "v": v, "seed": seed + i, "clients": bad,
                "per_client_energy": [float(e) for e in rep.per_client_energy],
                "bound": float(rep.bound),
            })
    return report


def run_suite(name: str, seed: int = DEFAULT_SEED) -> SuiteReport:
    if name == "solver":
        return solver_suite(seed=seed)
    if name == "structure":
        return structure_suite(seed=seed)
    if name == "bounds":
        return bounds_suite(seed=seed)
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITE_NAMES}")
