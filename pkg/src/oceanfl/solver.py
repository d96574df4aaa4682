"""Exact per-round joint client selection and bandwidth allocation.

Each round maximizes   v * eta * sum_k a_k  -  sum_k q_k * E_k(b_k) * a_k
over selection a in {0,1}^K and shares b with sum_{selected} b_k = 1,
b_k >= b_min. With rho_k = q_k / h2_k the energy penalty of client k becomes
rho_k * N0 * tau * f(b_k * B), so clients compete only through their priority
rho and the strictly convex kernel f.

Structure used by the solver:
  * zero-priority clients (q == 0) cost nothing and are always worth taking;
    they sit at b_min when sharing the band with priced clients;
  * the optimal selection is a prefix of the rho-ascending order, so it is
    enough to expand that prefix one client at a time, re-solving the convex
    share split, and keep the best prefix seen;
  * expansion can stop as soon as the marginal value of the newest client
    (v * eta minus its weighted energy) goes negative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .energy import NetworkParams, kernel_f, kernel_f_prime, kernel_f_prime_inv


class InfeasibleError(ValueError):
    """Raised when a requested allocation cannot satisfy its constraints."""


@dataclass(frozen=True)
class ClientRoundState:
    """Per-client inputs of one scheduling round.

    priority_rho must equal queue_q / h_squared; use from_queue() to build
    consistent instances.
    """

    client_id: int
    h_squared: float
    queue_q: float
    priority_rho: float

    def __post_init__(self):
        if self.h_squared <= 0.0:
            raise ValueError("h_squared must be positive")
        if self.queue_q < 0.0:
            raise ValueError("queue_q must be nonnegative")
        if self.priority_rho < 0.0:
            raise ValueError("priority_rho must be nonnegative")
        if (self.priority_rho == 0.0) != (self.queue_q == 0.0):
            raise ValueError("priority_rho must be zero exactly when queue_q is zero")
        expect = self.queue_q / self.h_squared
        if abs(self.priority_rho - expect) > 1e-9 * max(expect, 1e-300):
            raise ValueError("priority_rho inconsistent with queue_q / h_squared")

    @classmethod
    def from_queue(cls, client_id: int, h_squared: float, queue_q: float):
        if h_squared <= 0.0:
            raise ValueError("h_squared must be positive")
        return cls(client_id, h_squared, queue_q, queue_q / h_squared)


@dataclass
class RoundDecision:
    """Outcome of one round: binary selection, shares, and the value of the
    objective the producing solver optimized (exact round objective for the
    online solver; baseline-specific figures for the baselines, see
    benchmarks.py)."""

    selected: np.ndarray  # (K,) ints in {0, 1}
    shares: np.ndarray  # (K,) floats, 0 for unselected clients
    objective_value: float

    @property
    def num_selected(self) -> int:
        return int(np.sum(self.selected))


def validate_decision(decision: RoundDecision, params: NetworkParams,
                      require_full_sum: bool = True) -> None:
    """Check structural invariants; raises ValueError on violation.

    require_full_sum enforces sum(shares) == 1 whenever anyone is selected,
    which holds for exact round solutions but not for the myopic baselines
    (they may leave bandwidth unassigned).
    """
    sel = np.asarray(decision.selected)
    shares = np.asarray(decision.shares, dtype=float)
    if sel.shape != shares.shape:
        raise ValueError("selected and shares must have the same shape")
    if not np.all((sel == 0) | (sel == 1)):
        raise ValueError("selected entries must be 0 or 1")
    mask = sel.astype(bool)
    if np.any(shares[~mask] != 0.0):
        raise ValueError("unselected clients must have zero share")
    if np.any(shares[mask] < params.b_min - 1e-9):
        raise ValueError("selected shares must be at least b_min")
    if np.any(shares[mask] > 1.0 + 1e-9):
        raise ValueError("shares cannot exceed 1")
    if require_full_sum and np.any(mask):
        total = float(np.sum(shares))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"selected shares must sum to 1, got {total}")


def allocate_bandwidth(weights, budget: float, params: NetworkParams) -> np.ndarray:
    """Split `budget` of bandwidth share among priced clients.

    Minimizes sum_k w_k * f(b_k * B) subject to sum b_k = budget and
    b_k >= b_min, for positive weights w (= rho). The optimum satisfies
    w_k * f'(b_k * B) = mu for every client off the b_min bound, with
    w_k * f'(b_min * B) >= mu for the clamped ones, so it is found as the root
    of the monotone map mu -> sum_k clip(inv_f'(mu / w_k) / B, b_min, cap).

    Returns shares aligned with `weights`. Raises InfeasibleError when the
    budget cannot cover len(weights) * b_min.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-D array")
    if np.any(w <= 0.0):
        raise ValueError("weights must be positive")
    n = w.size
    b_min = params.b_min
    B = params.bandwidth_hz
    beta = params.beta
    min_total = n * b_min
    if budget < min_total - 1e-12:
        raise InfeasibleError(
            f"budget {budget} cannot cover {n} clients at b_min={b_min}"
        )
    if n == 1:
        return np.array([max(budget, b_min)])
    if budget <= min_total + 1e-15:
        return np.full(n, b_min)

    # no single share can exceed cap while the others keep b_min
    cap = budget - (n - 1) * b_min
    fp_bmin = kernel_f_prime(b_min * B, beta)
    fp_cap = kernel_f_prime(cap * B, beta)

    def shares_at(mu: float) -> np.ndarray:
        x = kernel_f_prime_inv(mu / w, beta)
        return np.clip(x / B, b_min, cap)

    def residual(mu: float) -> float:
        return float(np.sum(shares_at(mu))) - budget

    mu_lo = float(np.max(w)) * fp_bmin  # all shares clamp to b_min
    mu_hi = float(np.min(w)) * fp_cap  # someone reaches cap
    # guard fp edges so brentq sees a sign change
    tries = 0
    while residual(mu_hi) < 0.0 and tries < 60:
        mu_hi *= 0.5
        tries += 1
    mu = brentq(residual, mu_lo, mu_hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
    shares = shares_at(mu)
    # absorb the machine-epsilon residual so shares sum to budget exactly
    gap = budget - float(np.sum(shares))
    shares[int(np.argmax(shares))] += gap
    return shares


def _order_by_priority(states) -> list:
    return sorted(states, key=lambda s: (s.priority_rho, s.client_id))


def _weighted_terms(rhos: np.ndarray, shares: np.ndarray, v: float, eta: float,
                    params: NetworkParams) -> np.ndarray:
    """Per-client marginal objective v*eta - rho * N0 * tau * f(b * B)."""
    pen = rhos * params.noise_watt * params.deadline_s * kernel_f(
        shares * params.bandwidth_hz, params.beta
    )
    return v * eta - pen


def solve_round(states, v: float, eta: float, params: NetworkParams,
                early_stop: bool = True) -> RoundDecision:
    """Exact solution of one round.

    states: list of ClientRoundState (any order, one per client).
    v: utility weight of this round's frame; eta: round utility factor.
    early_stop=False disables the negative-marginal cutoff and scans every
    feasible prefix; returns the identical decision (used by tests).
    """
    if v < 0.0 or eta < 0.0:
        raise ValueError("v and eta must be nonnegative")
    K = len(states)
    if K == 0:
        raise ValueError("states must be nonempty")
    ids = [s.client_id for s in states]
    if len(set(ids)) != K:
        raise ValueError("client_id values must be distinct")
    order = _order_by_priority(states)
    zero = [s for s in order if s.priority_rho == 0.0]
    priced = [s for s in order if s.priority_rho > 0.0]
    n0 = len(zero)

    # candidate prefixes: the zero-priority set alone, then +1 priced client
    # at a time; each entry is (value, priced_count, priced_shares)
    candidates = [(v * eta * n0, 0, None)]
    budget = 1.0 - n0 * params.b_min
    for j in range(1, len(priced) + 1):
        if (n0 + j) * params.b_min > 1.0 + 1e-12:
            break  # band exhausted
        rhos = np.array([s.priority_rho for s in priced[:j]])
        shares_j = allocate_bandwidth(rhos, budget, params)
        terms = _weighted_terms(rhos, shares_j, v, eta, params)
        value = v * eta * n0 + float(np.sum(terms))
        if early_stop and terms[-1] < 0.0:
            break  # newest client's own term is negative: no larger prefix wins
        candidates.append((value, j, shares_j))

    best_value, best_j, best_shares = candidates[0]
    for value, j, shares_j in candidates[1:]:
        if value > best_value:
            best_value, best_j, best_shares = value, j, shares_j

    idx = {s.client_id: i for i, s in enumerate(states)}
    selected = np.zeros(K, dtype=int)
    shares = np.zeros(K, dtype=float)
    if best_j == 0:
        if n0 > 0:
            for s in zero:
                selected[idx[s.client_id]] = 1
                shares[idx[s.client_id]] = 1.0 / n0  # free clients share all slack
    else:
        for s in zero:
            selected[idx[s.client_id]] = 1
            shares[idx[s.client_id]] = params.b_min
        for s, b in zip(priced[:best_j], best_shares):
            selected[idx[s.client_id]] = 1
            shares[idx[s.client_id]] = float(b)
    return RoundDecision(selected, shares, float(best_value))


def round_objective(decision: RoundDecision, states, v: float, eta: float,
                    params: NetworkParams) -> float:
    """Evaluate the round objective for an arbitrary (valid) decision.

    sum over selected clients of v*eta - (q/h2) * N0 * tau * f(b * B).
    Raises ValueError when the decision violates the structural invariants.
    """
    if v < 0.0 or eta < 0.0:
        raise ValueError("v and eta must be nonnegative")
    if len(states) != len(decision.selected):
        raise ValueError("decision and states disagree on client count")
    validate_decision(decision, params)
    total = 0.0
    # decision arrays align positionally with the states list
    for i, s in enumerate(states):
        if not decision.selected[i]:
            continue
        rho = s.queue_q / s.h_squared
        pen = rho * params.noise_watt * params.deadline_s * kernel_f(
            decision.shares[i] * params.bandwidth_hz, params.beta
        )
        total += v * eta - pen
    return total


def brute_force_round(states, v: float, eta: float, params: NetworkParams) -> RoundDecision:
    """Reference solver: exhaustive enumeration of all selection sets.

    For each subset the share split is solved exactly (zero-priority members
    pinned at b_min, priced members through allocate_bandwidth), so this
    checks the prefix/termination logic of solve_round, not the inner convex
    solve. Ties in value resolve to the lexicographically smallest selection
    vector. Intended for small K; refuses K > 12.
    """
    if v < 0.0 or eta < 0.0:
        raise ValueError("v and eta must be nonnegative")
    K = len(states)
    if K == 0:
        raise ValueError("states must be nonempty")
    if K > 12:
        raise ValueError("brute_force_round is limited to K <= 12")
    if len({s.client_id for s in states}) != K:
        raise ValueError("client_id values must be distinct")

    best = None  # (value, selection tuple, shares); arrays positional
    for picks in itertools.product((0, 1), repeat=K):
        if sum(picks) * params.b_min > 1.0 + 1e-12:
            continue
        zero = [i for i in range(K) if picks[i] and states[i].priority_rho == 0.0]
        priced = [i for i in range(K) if picks[i] and states[i].priority_rho > 0.0]
        shares = np.zeros(K, dtype=float)
        if priced:
            budget = 1.0 - len(zero) * params.b_min
            if budget < len(priced) * params.b_min - 1e-12:
                continue
            rhos = np.array([states[i].priority_rho for i in priced])
            alloc = allocate_bandwidth(rhos, budget, params)
            terms = _weighted_terms(rhos, alloc, v, eta, params)
            value = v * eta * len(zero) + float(np.sum(terms))
            for i in zero:
                shares[i] = params.b_min
            for i, b in zip(priced, alloc):
                shares[i] = float(b)
        else:
            value = v * eta * len(zero)
            for i in zero:
                shares[i] = 1.0 / len(zero)
        if best is None:
            best = (value, picks, shares)
            continue
        tol = 1e-12 * max(1.0, abs(best[0]))
        if value > best[0] + tol:
            best = (value, picks, shares)
        elif value >= best[0] - tol and picks < best[1]:
            best = (value, picks, shares)
    value, picks, shares = best
    return RoundDecision(np.array(picks, dtype=int), shares, float(value))
