"""Round solver checks: the exact prefix solver against exhaustive
enumeration, the inner share split against its KKT conditions, and the
pinned share rules for zero-priority clients."""

import numpy as np
import pytest

from oceanfl import (ClientRoundState, InfeasibleError, NetworkParams,
                     RoundDecision, allocate_bandwidth, brute_force_round,
                     kernel_f_prime, round_objective, solve_round,
                     validate_decision)


def params_for(k):
    return NetworkParams(bandwidth_hz=1e7, noise_watt=1e-12, deadline_s=0.3,
                         model_bits=3.4e5, b_min=0.02, num_clients=k)


def states_from(h2s, qs):
    return [ClientRoundState.from_queue(i, float(h), float(q))
            for i, (h, q) in enumerate(zip(h2s, qs))]


def random_instance(rng):
    k = int(rng.integers(2, 7))
    h2 = 10.0 ** (-rng.uniform(32.0, 45.0, size=k) / 10.0)
    q = rng.uniform(0.0, 0.05, size=k)
    q[rng.random(k) < 0.3] = 0.0  # mix in cost-free clients
    v = float(rng.choice([0.1, 1.0, 10.0]))
    return states_from(h2, q), v, params_for(k)


# ---------------------------------------------------------------- share split


def test_equal_weights_split_evenly():
    p = params_for(4)
    shares = allocate_bandwidth(np.ones(4), 1.0, p)
    assert shares == pytest.approx(np.full(4, 0.25), rel=1e-12)
    assert float(np.sum(shares)) == 1.0


def test_single_client_takes_whole_budget():
    p = params_for(2)
    assert allocate_bandwidth(np.array([3.0]), 0.7, p) == pytest.approx([0.7])


def test_budget_below_min_total_is_infeasible():
    p = params_for(10)
    with pytest.raises(InfeasibleError):
        allocate_bandwidth(np.ones(10), 0.1, p)
    with pytest.raises(ValueError):
        allocate_bandwidth(np.array([1.0, -1.0]), 1.0, p)


def test_share_split_kkt_conditions():
    # off-bound clients share one multiplier w_i f'(b_i B); clamped clients
    # would need a smaller share than b_min allows
    p = params_for(6)
    rng = np.random.default_rng(23)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        w = 10.0 ** rng.uniform(0.0, 6.0, size=n)
        budget = rng.uniform(n * p.b_min, 1.0)
        shares = allocate_bandwidth(w, budget, p)
        assert abs(float(np.sum(shares)) - budget) < 1e-12
        assert np.all(shares >= p.b_min - 1e-12)
        grad = w * kernel_f_prime(shares * p.bandwidth_hz, p.beta)
        interior = shares > p.b_min + 1e-9
        if np.sum(interior) >= 2:
            mu = grad[interior]
            assert np.max(mu) - np.min(mu) <= 1e-6 * np.abs(np.mean(mu))
        if np.any(interior) and np.any(~interior):
            # clamped clients: gradient at b_min already >= the shared mu
            assert np.all(grad[~interior] >= np.max(grad[interior]) * (1.0 + 1e-9) - 1e-18)


def test_heavier_weight_never_gets_less_bandwidth():
    p = params_for(3)
    shares = allocate_bandwidth(np.array([1.0, 10.0, 100.0]), 1.0, p)
    assert shares[0] <= shares[1] <= shares[2]


# ---------------------------------------------------------------- round solver


def test_all_zero_queues_selects_everyone_evenly():
    p = params_for(4)
    states = states_from(np.full(4, 2.5e-4), np.zeros(4))
    dec = solve_round(states, v=1.0, eta=0.5, params=p)
    assert dec.num_selected == 4
    assert dec.shares == pytest.approx(np.full(4, 0.25))
    assert dec.objective_value == pytest.approx(1.0 * 0.5 * 4)


def test_zero_v_with_priced_queues_selects_nobody():
    p = params_for(3)
    states = states_from(np.full(3, 2.5e-4), np.full(3, 0.01))
    dec = solve_round(states, v=0.0, eta=1.0, params=p)
    assert dec.num_selected == 0
    assert dec.objective_value == 0.0
    assert np.all(dec.shares == 0.0)


def test_cost_free_clients_pinned_at_min_share_alongside_priced():
    p = params_for(2)
    states = states_from([2.5e-4, 2.5e-4], [0.0, 0.01])
    dec = solve_round(states, v=10.0, eta=1.0, params=p)
    assert dec.num_selected == 2
    assert dec.shares[0] == p.b_min  # cost-free client sits at the floor
    assert dec.shares[1] == pytest.approx(1.0 - p.b_min)


def test_cost_free_clients_split_band_when_alone():
    p = params_for(3)
    states = states_from(np.full(3, 2.5e-4), [0.0, 0.0, 1e3])
    dec = solve_round(states, v=1e-9, eta=1.0, params=p)
    assert list(dec.selected) == [1, 1, 0]
    assert dec.shares[:2] == pytest.approx([0.5, 0.5])


def test_identical_priced_clients_split_evenly():
    p = params_for(2)
    states = states_from([2.5e-4, 2.5e-4], [0.001, 0.001])
    dec = solve_round(states, v=10.0, eta=1.0, params=p)
    assert dec.num_selected == 2
    assert dec.shares == pytest.approx([0.5, 0.5], rel=1e-9)
    ref = brute_force_round(states, 10.0, 1.0, p)
    assert dec.objective_value == pytest.approx(ref.objective_value, rel=1e-12)


def test_matches_enumeration_on_random_instances():
    rng = np.random.default_rng(20260819)
    for _ in range(250):
        states, v, p = random_instance(rng)
        got = solve_round(states, v, 1.0, p)
        want = brute_force_round(states, v, 1.0, p)
        scale = max(abs(want.objective_value), 1e-12)
        assert abs(got.objective_value - want.objective_value) <= 1e-6 * scale


def test_early_stop_changes_nothing():
    rng = np.random.default_rng(99)
    for _ in range(100):
        states, v, p = random_instance(rng)
        a = solve_round(states, v, 1.0, p, early_stop=True)
        b = solve_round(states, v, 1.0, p, early_stop=False)
        assert list(a.selected) == list(b.selected)
        assert a.objective_value == pytest.approx(b.objective_value, rel=1e-12)
        assert a.shares == pytest.approx(b.shares, rel=1e-9)


def test_selection_is_priority_prefix_with_ordered_shares():
    rng = np.random.default_rng(4242)
    for _ in range(150):
        states, v, p = random_instance(rng)
        dec = solve_round(states, v, 1.0, p)
        order = sorted(range(len(states)),
                       key=lambda i: (states[i].priority_rho, states[i].client_id))
        flags = [int(dec.selected[i]) for i in order]
        assert flags == sorted(flags, reverse=True)  # a prefix of the order
        picked = [i for i in order
                  if dec.selected[i] and states[i].priority_rho > 0.0]
        b = np.array([dec.shares[i] for i in picked])
        assert np.all(np.diff(b) >= -1e-9 * np.maximum(b[:-1], 1e-15))


def test_round_objective_agrees_with_solver_value():
    rng = np.random.default_rng(17)
    for _ in range(50):
        states, v, p = random_instance(rng)
        dec = solve_round(states, v, 1.0, p)
        if dec.num_selected == 0:
            assert dec.objective_value == 0.0
            continue
        val = round_objective(dec, states, v, 1.0, p)
        assert val == pytest.approx(dec.objective_value, rel=1e-9, abs=1e-15)


def test_larger_v_never_selects_fewer():
    p = params_for(5)
    rng = np.random.default_rng(31)
    h2 = 10.0 ** (-rng.uniform(32.0, 45.0, size=5) / 10.0)
    q = rng.uniform(0.001, 0.05, size=5)
    states = states_from(h2, q)
    counts = [solve_round(states, v, 1.0, p).num_selected
              for v in (0.01, 0.1, 1.0, 10.0, 100.0)]
    assert counts == sorted(counts)


def test_state_consistency_enforced():
    with pytest.raises(ValueError):
        ClientRoundState(0, 2.5e-4, 0.01, 0.0)  # rho inconsistent with q/h2
    with pytest.raises(ValueError):
        ClientRoundState(0, 2.5e-4, 0.0, 1.0)
    with pytest.raises(ValueError):
        ClientRoundState.from_queue(0, -1.0, 0.0)
    with pytest.raises(ValueError):
        ClientRoundState.from_queue(0, 2.5e-4, -0.1)
    s = ClientRoundState.from_queue(3, 2.5e-4, 0.01)
    assert s.priority_rho == pytest.approx(0.01 / 2.5e-4)


def test_solver_input_validation():
    p = params_for(2)
    states = states_from([2.5e-4, 2.5e-4], [0.01, 0.02])
    with pytest.raises(ValueError):
        solve_round([], 1.0, 1.0, p)
    with pytest.raises(ValueError):
        solve_round(states, -1.0, 1.0, p)
    dup = [states[0], ClientRoundState.from_queue(0, 1e-4, 0.0)]
    with pytest.raises(ValueError):
        solve_round(dup, 1.0, 1.0, p)
    with pytest.raises(ValueError):
        brute_force_round(states_from(np.ones(13) * 1e-4, np.zeros(13)), 1.0, 1.0,
                          NetworkParams(1e7, 1e-12, 0.3, 3.4e5, 0.02, 13))


def test_validate_decision_catches_structural_breaks():
    p = params_for(2)
    ok = RoundDecision(np.array([1, 1]), np.array([0.5, 0.5]), 0.0)
    validate_decision(ok, p)
    with pytest.raises(ValueError):
        validate_decision(RoundDecision(np.array([1, 0]), np.array([0.5, 0.5]), 0.0), p)
    with pytest.raises(ValueError):
        validate_decision(RoundDecision(np.array([1, 1]), np.array([0.01, 0.99]), 0.0), p)
    with pytest.raises(ValueError):
        validate_decision(RoundDecision(np.array([1, 1]), np.array([0.5, 0.4]), 0.0), p)
    # baselines may leave bandwidth unassigned
    partial = RoundDecision(np.array([1, 1]), np.array([0.5, 0.4]), 0.0)
    validate_decision(partial, p, require_full_sum=False)
