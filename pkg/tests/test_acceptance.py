"""Acceptance criteria 1-10, one test each.

Every test records a PASS/FAIL line; the lines are echoed in the pytest
terminal summary and printed directly when the file runs as a script.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from urllc_admission import admission, cli, harness, linearize as L, oracle, qos
from urllc_admission.channel import generate_scenario
from urllc_admission.model import Scenario, SystemConfig
from urllc_admission.subsolver import check_feasibility, solve_subproblem


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# ------------------------------------------------------------------ 1

def test_criterion_01_effective_bandwidth():
    # independent arithmetic: 20-byte packets, 0.1 ms frames, eps_q 5e-6, D_q 0.8 ms, 0.2 packets/frame
    a = 160 * 1e-4 * math.log(1 / 5e-6)
    ref = a / (0.8e-3 * math.log(1e-4 * math.log(1 / 5e-6) / (0.2 * 0.8e-3) + 1))
    eb = qos.config_effective_bandwidth(SystemConfig())
    ok = abs(eb - 113.27) <= 0.05 and abs(eb - ref) <= 1e-9 * ref
    record(1, "effective bandwidth", ok, f"E^B={eb:.6f} bits/frame, reference {ref:.6f}")


# ------------------------------------------------------------------ 2

def _q_bisect(p: float) -> float:
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if 0.5 * math.erfc(mid / math.sqrt(2)) > p else (lo, mid)
    return 0.5 * (lo + hi)


def test_criterion_02_tail_quantile():
    x = qos.q_inv(5e-6)
    ref = _q_bisect(5e-6)
    ps = np.logspace(-7, math.log10(0.5), 200)
    worst = max(abs(qos.q_function(qos.q_inv(float(p))) - p) / p for p in ps)
    ok = abs(x - 4.4172) <= 1e-3 and abs(x - ref) <= 1e-3 and worst <= 1e-6
    record(2, "inverse Q", ok, f"q_inv(5e-6)={x:.6f} (bisection {ref:.6f}), worst round-trip rel err {worst:.1e}")


# ------------------------------------------------------------------ 3

def _fd(fun, m, x, eps=1e-6):
    v = L.to_real(m)
    g = np.empty(v.size)
    for i in range(v.size):
        e = np.zeros(v.size)
        e[i] = eps * max(1.0, abs(v[i]))
        g[i] = (fun(L.to_complex(v + e), x) - fun(L.to_complex(v - e), x)) / (2 * e[i])
    ex = eps * max(1.0, abs(x))
    return np.append(g, (fun(m, x + ex) - fun(m, x - ex)) / (2 * ex))


def test_criterion_03_gradients():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_g = worst_z = 0.0
    for _ in range(100):
        h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        m = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        beta = rng.uniform(0.2, 5.0)
        n0 = rng.uniform(0.2, 5.0)
        gm, gb = L.g_gradient(m, beta, h)
        num = _fd(lambda mm, b: L.g_value(mm, b, h), m, beta)
        worst_g = max(worst_g, np.max(np.abs(np.append(gm, gb) - num)) / np.max(np.abs(num)))
        zm, zb = L.z_gradient(m, beta, h, n0)
        num = _fd(lambda mm, b: L.z_value(mm, b, h, n0), m, beta)
        worst_z = max(worst_z, np.max(np.abs(np.append(zm, zb) - num)) / np.max(np.abs(num)))
    elapsed = time.perf_counter() - t0
    ok = worst_g <= 1e-5 and worst_z <= 1e-5 and elapsed < 1.0
    record(3, "gradients vs finite differences", ok,
           f"worst rel err g {worst_g:.1e}, z {worst_z:.1e}, {elapsed:.2f} s")


# ------------------------------------------------------------------ 4

def test_criterion_04_under_estimators():
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(10_000):
        h, m, mh = (rng.standard_normal(4) + 1j * rng.standard_normal(4) for _ in range(3))
        x, xh = 10 ** rng.uniform(-1.5, 1.5, 2)
        g = L.g_value(m, x, h)
        if L.g_lin(m, x, mh, xh, h) > g + 1e-12 * max(1.0, g):
            bad += 1
        z = L.z_value(m, x, h, 0.5)
        if L.z_lin(m, x, mh, xh, h, 0.5) > z + 1e-12 * max(1.0, z):
            bad += 1
    record(4, "surrogates under-estimate", bad == 0, f"{bad} violations in 2 x 10^4 pairs")


# ------------------------------------------------------------------ 5

def test_criterion_05_subproblem_correctness():
    t0 = time.perf_counter()
    cfg1 = SystemConfig(num_embb=1, num_urllc=0)
    h = 4e-2 * np.array([0.7 - 0.4j, -0.2 + 0.9j, 0.3, 0.5j])
    scen1 = Scenario(h[None, :], np.zeros((0, 4), complex), np.array([30.0]), 0)
    anchor = admission.initialize(scen1, cfg1)
    for _ in range(8):  # re-anchored solves converge to the minimum-power point
        rep = solve_subproblem(scen1, cfg1, anchor)
        anchor = admission.anchor_from(rep.solution)
    gamma = qos.embb_target_sinr(cfg1.target_rate, cfg1.embb_bandwidth)
    closed = gamma * cfg1.noise_psd * cfg1.embb_bandwidth / np.linalg.norm(h) ** 2
    rel = abs(rep.solution.total_power / closed - 1)

    rng = np.random.default_rng(55)
    worst, failures = 0.0, 0
    for i in range(50):
        K, J = int(rng.integers(1, 7)), int(rng.integers(0, 4))
        cfg = SystemConfig(num_embb=K, num_urllc=J, split_mode="free" if i % 3 == 2 else "fixed")
        scen = generate_scenario(cfg, 1000 + i)
        anc = admission.initialize(scen, cfg)
        rep = solve_subproblem(scen, cfg, anc)
        if rep.status != "optimal":
            failures += 1
            continue
        worst = max(worst, check_feasibility(rep.solution, scen, cfg, anc).max_violation)
    elapsed = time.perf_counter() - t0
    ok = rel <= 1e-4 and worst <= 1e-6 and failures == 0 and elapsed < 30
    record(5, "subproblem correctness", ok,
           f"K=1 power rel err {rel:.1e}; 50 instances worst scaled violation {worst:.1e}, "
           f"{failures} non-optimal, {elapsed:.1f} s")


# ------------------------------------------------------------------ 6 and 7

@pytest.fixture(scope="module")
def table_runs():
    cfg = SystemConfig()  # K=J=8, T=4, half the band for eMBB
    t0 = time.perf_counter()
    runs = [(s, generate_scenario(cfg, s)) for s in range(50)]
    results = [(s, scen, admission.run(scen, cfg)) for s, scen in runs]
    return cfg, results, time.perf_counter() - t0


def test_criterion_06_descent_and_convergence(table_runs):
    cfg, results, elapsed = table_runs
    worst_rise = max((float(np.max(np.diff(r.objective_trace))) if len(r.objective_trace) > 1 else 0.0)
                     for _, _, r in results)
    converged = [r for _, _, r in results if r.status == "converged"]
    iters = [r.outer_iterations for r in converged]
    frac = len(converged) / len(results)
    ok = worst_rise <= 1e-9 and frac >= 0.95 and max(iters) <= 30 and elapsed < 120
    record(6, "descent and convergence", ok,
           f"converged {len(converged)}/50, worst step rise {worst_rise:.1e}, "
           f"mean {np.mean(iters):.2f} / max {max(iters)} iterations, {elapsed:.0f} s")


def test_criterion_07_output_feasibility(table_runs):
    cfg, results, _ = table_runs
    gamma = qos.embb_target_sinr(cfg.target_rate, cfg.embb_bandwidth)
    violations = 0
    worst_budget = 0.0
    for _, _, r in results:
        if r.status != "converged":
            continue
        p = r.final_point
        th = qos.urllc_targets(cfg, p.urllc_bandwidths).snr_thresholds
        violations += int(np.sum(r.per_user_snr < th))
        violations += int(np.sum(r.per_user_sinr[list(r.admitted)] < gamma - cfg.admit_tolerance))
        budget = max(p.total_power / cfg.total_power - 1, p.used_bandwidth / cfg.total_bandwidth - 1)
        worst_budget = max(worst_budget, budget)
        violations += int(budget > 1e-6)
    record(7, "output feasibility audit", violations == 0,
           f"{violations} violations, worst scaled budget excess {max(worst_budget, 0.0):.1e}")


# ------------------------------------------------------------------ 8

def test_criterion_08_near_optimality():
    t0 = time.perf_counter()
    cfg = SystemConfig(num_embb=6, num_urllc=3, num_antennas=4)
    rows = harness.cmd_oracle_compare(cfg, range(50), timing=False)
    elapsed = time.perf_counter() - t0
    summary = rows[-1]
    seeds = [r for r in rows if r["row"] == "seed"]
    indeterminate = sum(bool(r.get("oracle_indeterminate")) for r in seeds)
    ok = summary.get("frac_within_one", 0.0) >= 0.8 and elapsed < 600
    record(8, "near-optimality vs exhaustive search", ok,
           f"|diff|<=1 on {summary.get('frac_within_one', 0):.2f} of seeds, mean |diff| "
           f"{summary.get('mean_abs_diff', float('nan')):.2f}, {indeterminate} indeterminate, {elapsed:.0f} s")


# ------------------------------------------------------------------ 9

def _non_increasing(means: list[float], slack: float = 0.2) -> bool:
    return all(b <= a + slack + 1e-12 for a, b in zip(means, means[1:]))


def test_criterion_09_trends():
    grid = [100, 150, 200, 250, 300]
    seeds = range(20)
    curves = {}
    for case in (1, 2):
        rows = harness.cmd_sweep(harness.with_case(SystemConfig(), case), "rtarget", grid, seeds, timing=False)
        m = harness.mean_rows(rows)
        curves[case] = [m[v] for v in grid]
    jrows = harness.cmd_sweep(SystemConfig(), "jcount", [2, 4, 6, 8], seeds, timing=False)
    jm = harness.mean_rows(jrows)
    jcurve = [jm[v] for v in (2, 4, 6, 8)]
    ok = (_non_increasing(curves[1]) and _non_increasing(curves[2]) and curves[1][-1] >= curves[2][-1]
          and _non_increasing(jcurve))
    fmtc = lambda c: ",".join(f"{v:.2f}" for v in c)  # noqa: E731
    record(9, "trend reproduction", ok,
           f"R_target case1 [{fmtc(curves[1])}] case2 [{fmtc(curves[2])}]; J [{fmtc(jcurve)}]")


# ------------------------------------------------------------------ 10

def test_criterion_10_determinism(tmp_path):
    commands = [
        ["run", "--seed", "11"],
        ["sweep", "--axis", "rtarget", "--grid", "150,250", "--seeds", "0..2", "--no-timing"],
        ["oracle-compare", "--set", "num_embb=4", "--set", "num_urllc=2", "--seeds", "0..2", "--no-timing"],
    ]
    same = []
    for i, cmd in enumerate(commands):
        blobs = []
        for rep in range(2):
            out = tmp_path / f"{i}_{rep}.csv"
            assert cli.main(cmd + ["--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        same.append(blobs[0] == blobs[1])
    record(10, "byte-identical CSVs", all(same), f"run/sweep/oracle-compare identical: {same}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
