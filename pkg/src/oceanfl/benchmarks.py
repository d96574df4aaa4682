"""Baseline schedulers and a small exhaustive frame oracle.

select_all_round: schedule everyone, split the band to minimize total energy.
smo_round: myopic hard-budget policy with a static per-round budget H_k / T.
amo_round: same admission rule but the budget is the client's unspent energy
spread over the remaining rounds.
lookahead_oracle: exhaustive search over selection sequences of a whole frame
on a bandwidth grid; exponential, only for tiny instances, and by construction
a lower bound on the true continuous optimum (every grid-feasible plan is
feasible in the continuous problem).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .energy import NetworkParams, tx_energy
from .solver import InfeasibleError, RoundDecision, allocate_bandwidth

ORACLE_MAX_CLIENTS = 3
ORACLE_MAX_ROUNDS = 3
ORACLE_MIN_GRID = 8


def select_all_round(h_squared_row, params: NetworkParams) -> RoundDecision:
    """Schedule every client; choose shares minimizing the summed energy.

    Equivalent to the priced share split with weights 1/h2 and the full band
    as budget. objective_value is the minimized total energy in Joules.
    """
    h2 = np.asarray(h_squared_row, dtype=float)
    if h2.ndim != 1 or h2.size != params.num_clients:
        raise ValueError("h_squared_row must hold one gain per client")
    if np.any(h2 <= 0.0):
        raise ValueError("channel gains must be positive")
    K = h2.size
    if K * params.b_min > 1.0 + 1e-12:
        raise InfeasibleError("cannot fit every client at b_min")
    if K == 1:
        shares = np.array([1.0])
    else:
        shares = allocate_bandwidth(1.0 / h2, 1.0, params)
    selected = np.ones(K, dtype=int)
    total = float(np.sum(tx_energy(selected, shares, h2, params)))
    return RoundDecision(selected, shares, total)


def required_share(h_squared: float, energy_budget: float, params: NetworkParams):
    """Smallest share whose deadline-meeting energy fits the budget.

    Energy falls as the share grows, so the answer is b_min when even that is
    affordable, None when the whole band still costs too much, and otherwise
    the root of tx_energy(1, b, h2) = energy_budget on [b_min, 1], located by
    bisection to 1e-12 in b.
    """
    if h_squared <= 0.0:
        raise ValueError("h_squared must be positive")
    if energy_budget < 0.0:
        raise ValueError("energy_budget must be nonnegative")
    if energy_budget == 0.0:
        return None
    if tx_energy(1, params.b_min, h_squared, params) <= energy_budget:
        return params.b_min
    if tx_energy(1, 1.0, h_squared, params) > energy_budget:
        return None
    lo, hi = params.b_min, 1.0  # energy(lo) > budget >= energy(hi)
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if tx_energy(1, mid, h_squared, params) > energy_budget:
            lo = mid
        else:
            hi = mid
    return hi


def smo_round(h_squared_row, budgets_per_round, params: NetworkParams) -> RoundDecision:
    """Myopic admission under hard per-round energy budgets.

    Each client needs share required_share(h2_k, budget_k); clients are ranked
    by that requirement (ties by index) and admitted while the running total
    stays within the band. Admitted clients get exactly their required share;
    leftover bandwidth stays unassigned. objective_value is the number
    admitted.
    """
    h2 = np.asarray(h_squared_row, dtype=float)
    budgets = np.asarray(budgets_per_round, dtype=float)
    if h2.shape != budgets.shape or h2.ndim != 1:
        raise ValueError("h_squared_row and budgets_per_round must be matching vectors")
    if np.any(h2 <= 0.0):
        raise ValueError("channel gains must be positive")
    if np.any(budgets < 0.0):
        raise ValueError("budgets must be nonnegative")
    K = h2.size
    needs = []
    for k in range(K):
        b = required_share(float(h2[k]), float(budgets[k]), params)
        if b is not None:
            needs.append((b, k))
    needs.sort()
    selected = np.zeros(K, dtype=int)
    shares = np.zeros(K, dtype=float)
    used = 0.0
    for b, k in needs:
        if used + b > 1.0 + 1e-12:
            break  # later clients need at least as much
        selected[k] = 1
        shares[k] = b
        used += b
    return RoundDecision(selected, shares, float(np.sum(selected)))


def amo_round(h_squared_row, budgets_total, spent_energy, round_t: int,
              horizon_t: int, params: NetworkParams) -> RoundDecision:
    """Adaptive variant of smo_round: budget_k = unspent H_k over the rounds
    still to come, so energy saved by skipping a bad round is recycled."""
    if not 0 <= round_t < horizon_t:
        raise ValueError("round_t must lie in [0, horizon_t)")
    budgets = np.asarray(budgets_total, dtype=float)
    spent = np.asarray(spent_energy, dtype=float)
    if budgets.shape != spent.shape:
        raise ValueError("budgets_total and spent_energy must match")
    if np.any(spent < 0.0):
        raise ValueError("spent_energy must be nonnegative")
    remaining = np.maximum(budgets - spent, 0.0)
    per_round = remaining / (horizon_t - round_t)
    return smo_round(h_squared_row, per_round, params)


@dataclass
class LookaheadResult:
    """Outcome of the exhaustive frame search."""

    utility: float
    rounds: list  # per round: tuple of scheduled client indices
    shares: np.ndarray  # (R, K) witness grid assignment


def _pareto_min(points: np.ndarray) -> np.ndarray:
    """Indices of the Pareto-minimal rows (no other row <= in every coord)."""
    n = points.shape[0]
    order = np.lexsort(points.T[::-1])
    kept_idx = []
    kept = []
    for i in order:
        p = points[i]
        dominated = False
        for q in kept:
            if np.all(q <= p + 1e-18):
                dominated = True
                break
        if not dominated:
            kept.append(p)
            kept_idx.append(i)
    return np.array(kept_idx, dtype=int)


def _round_options(h2_row: np.ndarray, subset: tuple, grid: np.ndarray,
                   params: NetworkParams):
    """Pareto-minimal per-client energy vectors reachable for one round.

    subset: client indices scheduled this round. Returns (energies, shares):
    energies (n, K) and the grid assignment behind each row.
    """
    K = h2_row.size
    if not subset:
        return np.zeros((1, K)), np.zeros((1, K))
    if len(subset) * params.b_min > 1.0 + 1e-12:
        return np.zeros((0, K)), np.zeros((0, K))
    combos = np.array(list(itertools.product(grid, repeat=len(subset))))
    combos = combos[np.sum(combos, axis=1) <= 1.0 + 1e-12]
    if combos.shape[0] == 0:
        return np.zeros((0, K)), np.zeros((0, K))
    energies = np.zeros((combos.shape[0], K))
    shares = np.zeros((combos.shape[0], K))
    for j, k in enumerate(subset):
        energies[:, k] = tx_energy(
            np.ones(combos.shape[0]), combos[:, j], h2_row[k], params
        )
        shares[:, k] = combos[:, j]
    keep = _pareto_min(energies)
    return energies[keep], shares[keep]


def lookahead_oracle(channels, frame_budget, eta, params: NetworkParams,
                     grid_n: int = 64) -> LookaheadResult:
    """Best utility any clairvoyant plan can certify for one frame.

    channels: (R, K) gains of the whole frame; frame_budget: per-client energy
    for the frame; eta: per-round utility factors. Enumerates every selection
    sequence in descending utility order and accepts the first one for which
    a bandwidth assignment on the grid {b_min .. 1} (grid_n levels, round sums
    <= 1) keeps every client within its frame budget. Grid feasibility implies
    continuous feasibility, so the reported utility never exceeds the true
    optimum and converges to it as grid_n grows.
    """
    ch = np.asarray(channels, dtype=float)
    if ch.ndim != 2:
        raise ValueError("channels must be (rounds, clients)")
    R, K = ch.shape
    if K > ORACLE_MAX_CLIENTS or R > ORACLE_MAX_ROUNDS:
        raise ValueError(
            f"lookahead_oracle is limited to K <= {ORACLE_MAX_CLIENTS}, "
            f"R <= {ORACLE_MAX_ROUNDS}"
        )
    if grid_n < ORACLE_MIN_GRID:
        raise ValueError(f"grid_n must be at least {ORACLE_MIN_GRID}")
    if np.any(ch <= 0.0):
        raise ValueError("channel gains must be positive")
    budget = np.asarray(frame_budget, dtype=float)
    if budget.shape != (K,):
        raise ValueError("frame_budget must hold one entry per client")
    if np.any(budget < 0.0):
        raise ValueError("frame_budget must be nonnegative")
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (R,):
        raise ValueError("eta must hold one entry per round")
    if np.any(eta < 0.0):
        raise ValueError("eta must be nonnegative")

    grid = params.b_min + np.arange(grid_n) * (1.0 - params.b_min) / (grid_n - 1)
    subsets = []
    for r in range(K + 1):
        subsets.extend(itertools.combinations(range(K), r))
    options = [
        {s: _round_options(ch[t], s, grid, params) for s in subsets} for t in range(R)
    ]

    sequences = sorted(
        itertools.product(subsets, repeat=R),
        key=lambda seq: (-float(np.dot(eta, [len(s) for s in seq])), seq),
    )
    tol = 1e-12 * np.maximum(budget, 1.0)
    for seq in sequences:
        # DP over rounds on accumulated per-client energy, Pareto-pruned
        acc = np.zeros((1, K))
        wit = [np.zeros((1, K)) for _ in range(R)]  # shares behind each acc row
        feasible = True
        for t, s in enumerate(seq):
            energies, shares = options[t][s]
            if energies.shape[0] == 0:
                feasible = False
                break
            cand = acc[:, None, :] + energies[None, :, :]
            cand = cand.reshape(-1, K)
            ok = np.all(cand <= budget + tol, axis=1)
            if not np.any(ok):
                feasible = False
                break
            idx = np.nonzero(ok)[0]
            cand = cand[idx]
            acc_idx, opt_idx = idx // energies.shape[0], idx % energies.shape[0]
            keep = _pareto_min(cand)
            acc = cand[keep]
            new_wit = []
            for r in range(R):
                if r < t:
                    new_wit.append(wit[r][acc_idx[keep]])
                elif r == t:
                    new_wit.append(shares[opt_idx[keep]])
                else:
                    new_wit.append(np.zeros((keep.size, K)))
            wit = new_wit
        if feasible:
            utility = float(np.dot(eta, [len(s) for s in seq]))
            witness = np.stack([wit[r][0] for r in range(R)])
            return LookaheadResult(utility, [tuple(s) for s in seq], witness)
    raise RuntimeError("unreachable: the all-empty sequence is always feasible")
