"""Acceptance gate.

Every binding check the package must hold, one test per criterion, each
printing a single [PASS]/[FAIL] line with its measured numbers. The lines are
printed with capture suspended so they stay visible in the run log.

Known red: the flat-profile clause of the round-weight direction check sits
below its required seed count at every control-weight setting; the check is
implemented as stated and left failing rather than weakened (see the test's
comment).
"""

import dataclasses
import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import spearmanr

import oceanfl as o
from oceanfl.verify import (DEFAULT_SEED, bounds_suite, solver_suite,
                            structure_suite)

REPO_ROOT = Path(__file__).resolve().parent.parent
BASELINE = o.load_config(str(REPO_ROOT / "configs" / "baseline.cfg"))
NUM_SEEDS = 20


@pytest.fixture
def report(capsys):
    """Emit one gate line per criterion, bypassing output capture."""

    def _report(name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        with capsys.disabled():
            print(line, flush=True)
        assert ok, line

    return _report


def seeded(config, seed):
    return dataclasses.replace(config, seed=seed)


def test_a1_round_solver_matches_enumeration(report):
    t0 = time.perf_counter()
    rep = solver_suite(num_instances=1000, seed=DEFAULT_SEED, rel_tol=1e-6)
    dt = time.perf_counter() - t0
    ok = rep.passed and rep.num_checked == 1000 and dt < 120.0
    report("round solver matches exhaustive enumeration",
           ok, f"gaps>1e-6 rel: {rep.num_failed}/1000, {dt:.1f}s (limit 120s)")


def test_a2_selection_structure(report):
    rep = structure_suite(num_instances=1000, seed=DEFAULT_SEED)
    ok = rep.passed and rep.num_checked == 1000
    report("selections are priority prefixes with ordered shares",
           ok, f"violations: {rep.num_failed}/1000")


def test_a3_energy_kernel_shape_and_derivative(report):
    # 100x100 log grid; cells whose exponent overflows double precision must
    # degrade to a consistent +inf/-inf pair and are excluded from the
    # finite-difference comparison. The difference step shrinks with the
    # exponent so truncation stays two orders below the 1e-5 tolerance.
    xs = np.logspace(-3.0, 3.0, 100)
    violations = 0
    compared = 0
    for beta in np.logspace(-2.0, 2.0, 100):
        vals = o.kernel_f(xs, beta)
        ders = o.kernel_f_prime(xs, beta)
        blown = ~np.isfinite(vals)
        if np.any(blown):
            k = int(np.sum(blown))
            consistent = (bool(np.all(blown[:k]))  # confined to the small-x end
                          and bool(np.all(np.isposinf(vals[blown])))
                          and bool(np.all(np.isneginf(ders[blown]))))
            violations += 0 if consistent else 1
        xf, vf = xs[~blown], vals[~blown]
        yf = math.log(2.0) * beta / xf
        violations += int(np.sum(np.diff(vf) >= 0.0))  # strictly decreasing
        violations += int(np.sum(ders[~blown] >= 0.0))
        x1, x2, x3 = xf[:-2], xf[1:-1], xf[2:]
        v1, v2, v3 = vf[:-2], vf[1:-1], vf[2:]
        lam = (x3 - x2) / (x3 - x1)
        chord = lam * v1 + (1.0 - lam) * v3
        violations += int(np.sum(v2 > chord * (1.0 + 1e-12)))  # convexity
        h = xf * np.minimum(1e-4, 7.75e-4 / np.maximum(yf, 1.0))
        lo, hi = o.kernel_f(xf - h, beta), o.kernel_f(xf + h, beta)
        ana = ders[~blown]
        # compare only where both one-sided values and the slope are
        # representable; right at the overflow edge f is finite but f' is not
        ok_cmp = np.isfinite(lo) & np.isfinite(hi) & np.isfinite(ana)
        diff = (hi[ok_cmp] - lo[ok_cmp]) / (2.0 * h[ok_cmp])
        rel = np.abs(diff - ana[ok_cmp]) / np.abs(ana[ok_cmp])
        violations += int(np.sum(rel > 1e-5))
        compared += int(np.sum(ok_cmp))
    ok = violations == 0
    report("energy kernel is decreasing/convex with verified derivative",
           ok, f"violations: {violations} over {compared} finite grid cells")


def test_a4_deficit_deviation_bound(report):
    t0 = time.perf_counter()
    rep = bounds_suite(num_traces=50, seed=DEFAULT_SEED)
    dt = time.perf_counter() - t0
    ok = rep.passed and rep.num_checked == 50 and dt < 300.0
    report("per-client energy within the analytic deviation cap",
           ok, f"traces over cap: {rep.num_failed}/50, {dt:.0f}s (limit 300s)")


def test_a5_round_weight_direction(report):
    # The flat-profile clause is known not to reach 18/20: rare deep-fade
    # uploads by empty-queue clients put a heavy-tailed noise floor on the
    # per-seed slope that the 20%-of-ascending threshold sits well inside.
    # Measured pass probability peaks near 0.6 per seed. Implemented as
    # stated; expected to fail on that clause alone.
    cfg = BASELINE.run_config
    t = np.arange(cfg.horizon_t)
    slopes = {}
    for policy in ("ocean-a", "ocean-d", "ocean-u"):
        per_seed = []
        for s in range(NUM_SEEDS):
            tr = o.run_experiment(policy, seeded(cfg, s))
            per_seed.append(float(np.polyfit(t, tr.selected_counts(), 1)[0]))
        slopes[policy] = np.asarray(per_seed)
    n_up = int(np.sum(slopes["ocean-a"] > 0.0))
    n_down = int(np.sum(slopes["ocean-d"] < 0.0))
    n_flat = int(np.sum(np.abs(slopes["ocean-u"])
                        < 0.2 * np.abs(slopes["ocean-a"])))
    ok = n_up >= 18 and n_down >= 18 and n_flat >= 18
    report("selected-count trend follows the round-weight profile",
           ok, f"ascending>0: {n_up}/20, descending<0: {n_down}/20, "
               f"flat within 20% of ascending: {n_flat}/20 (need >=18 each)")


def test_a6_control_weight_tradeoff(report):
    cfg = BASELINE.run_config
    grid = [0.1, 0.5, 2.0, 10.0, 50.0]
    rows = o.sweep("ocean-a", cfg, "v", grid, num_seeds=NUM_SEEDS)
    mean_sel = [float(np.mean([r.mean_selected for r in rows if r.axis_value == v]))
                for v in grid]
    mean_viol = [float(np.mean([r.max_violation for r in rows if r.axis_value == v]))
                 for v in grid]
    sp_sel = float(spearmanr(grid, mean_sel).statistic)
    sp_viol = float(spearmanr(grid, mean_viol).statistic)
    ok = sp_sel > 0.9 and sp_viol >= 0.0 and mean_viol[0] <= mean_viol[-1]
    report("control weight trades participation against overshoot",
           ok, f"spearman(selected)={sp_sel:.3f} (>0.9), "
               f"spearman(violation)={sp_viol:.3f} (>=0), "
               f"violation {mean_viol[0]:.3f}J@0.1 <= {mean_viol[-1]:.3f}J@50")


def test_a7_budget_adherence_by_policy(report):
    cfg = BASELINE.run_config
    H = np.asarray(cfg.budgets)
    energy = {p: o.run_experiment(p, cfg).per_client_energy
              for p in ("select_all", "smo", "amo")}
    trace = o.run_experiment("ocean-a", cfg)
    rep = o.bound_report(trace, cfg, o.scenario_gain_floor(cfg.scenario))
    greedy_ok = bool(np.all(energy["select_all"] > 5.0 * H))
    capped_ok = bool(np.all(energy["smo"] <= H) and np.all(energy["amo"] <= H))
    e = trace.per_client_energy
    n_band = int(np.sum((e >= 0.5 * H) & (e <= rep.bound)))
    n_band_emp = int(np.sum((e >= 0.5 * H) & (e <= rep.bound_empirical)))
    ok = greedy_ok and capped_ok and n_band >= 8 and n_band_emp >= 8
    report("per-policy energy lands where it should",
           ok, f"select_all min {float(np.min(energy['select_all'])):.2f}J "
               f"(> {float(5 * H[0]):.2f}), smo/amo max "
               f"{max(float(np.max(energy['smo'])), float(np.max(energy['amo']))):.4f}J "
               f"(<= {H[0]:.2f}), near-budget clients {n_band}/10 "
               f"(empirical cap {n_band_emp}/10, need >=8)")


def longest_zero_window(counts):
    best = cur = 0
    for c in counts:
        cur = cur + 1 if c == 0 else 0
        best = max(best, cur)
    return best


def test_a8_worsening_channel_adaptability(report):
    # deterministic path-loss ramp (no fading): the hard-capped recycler goes
    # silent once per-round affordability dies, while the queue-driven policy
    # keeps scheduling
    cfg = BASELINE.run_config
    ramp = o.scenario_from_kind("pathloss_ramp_up", fading="none")
    cfg = dataclasses.replace(cfg, scenario=ramp)
    hits = 0
    worst_amo, worst_oa = None, None
    for s in range(NUM_SEEDS):
        c = seeded(cfg, s)
        amo_w = longest_zero_window(o.run_experiment("amo", c).selected_counts())
        oa_w = longest_zero_window(o.run_experiment("ocean-a", c).selected_counts())
        hits += int(amo_w >= 50 and oa_w < 20)
        worst_amo = amo_w if worst_amo is None else min(worst_amo, amo_w)
        worst_oa = oa_w if worst_oa is None else max(worst_oa, oa_w)
    ok = hits >= 15
    report("hard-capped recycling stalls on a worsening channel",
           ok, f"{hits}/20 seeds (need >=15); recycler silent >= {worst_amo} "
               f"rounds, queue policy's worst gap {worst_oa} rounds")


def test_a9_frame_oracle_dominates_feasible_runs(report):
    rng = np.random.default_rng(DEFAULT_SEED)
    params = o.NetworkParams(1e7, 1e-12, 0.3, 3.4e5, 0.02, 2)
    eta = o.build_eta_sequence("ascending", 2)
    compared = 0
    beaten = 0
    for i in range(20):
        h2 = 10.0 ** (-rng.uniform(32.0, 45.0, size=(2, 2)) / 10.0)
        budgets = rng.uniform(1e-3, 2e-2, size=2)
        v = (0.1, 1.0, 10.0)[i % 3]
        cfg = o.RunConfig(
            horizon_t=2, frame_r=2, v_sequence=(v,),
            eta_sequence=tuple(eta), budgets=tuple(budgets), params=params,
            seed=int(rng.integers(2**31)),
            scenario=o.scenario_from_kind("static"))
        trace = o.run_experiment("ocean", cfg, channels=h2)
        if not np.all(trace.per_client_energy <= budgets + 1e-12):
            continue  # dominance is only claimed for budget-feasible runs
        compared += 1
        best = o.lookahead_oracle(h2, budgets, np.asarray(eta), params, grid_n=64)
        beaten += int(best.utility < trace.total_utility - 1e-9)
    ok = beaten == 0 and compared > 0
    report("clairvoyant frame search never loses to a feasible online run",
           ok, f"online ahead in {beaten} of {compared} budget-feasible "
               f"instances (of 20)")
