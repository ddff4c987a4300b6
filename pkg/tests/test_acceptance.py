"""Acceptance suite: one test per exit criterion, each at its stated tolerance.

Every test prints (and logs into the terminal summary) one
``ACCEPTANCE n: PASS/FAIL - detail`` line via ``conftest.record_acceptance``.
The heavyweight decoupled sweep is shared between the criteria that need it.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import record_acceptance
from feeddrive import metrics, motion, plant, presets, simulation, study
from feeddrive.cli import main
from feeddrive.controller import GainBounds, Gains, control_step, reset
from feeddrive.metrics import composite
from feeddrive.optimize import FwaConfig, GaConfig, fwa_minimize, ga_minimize, stability_trial
from feeddrive.plant import PlantParams, PlantState, mechanical_energy, saturate, step

MOTOR1 = presets.plant_params(presets.motor_catalog()[0])
SPHERE_BOUNDS = [(-5.0, 5.0)] * 4


def sphere(x):
    return float(np.sum(x * x))


@pytest.fixture(scope="module")
def standard_cycle():
    return motion.reciprocate(motion.plan(presets.motion_spec()), 1e-3)


@pytest.fixture(scope="module")
def decoupled_full():
    """The published-budget decoupled sweep, seeds 0..2 per motor (shared by
    criteria 5 and 7); takes on the order of a minute."""
    return study.decoupled_sweep(repeats=3, master_seed=0, jobs=2)


def test_criterion_1_trapezoid_plan():
    spec = presets.motion_spec()
    p = motion.plan(spec)  # warm-up
    t0 = time.perf_counter()
    p = motion.plan(spec)
    elapsed = time.perf_counter() - t0
    ok = (abs(p.t1 - 0.02) <= 1e-9 and abs(p.t2 - 2.00) <= 1e-9
          and abs(p.t3 - 2.02) <= 1e-9 and elapsed < 1e-3)
    record_acceptance(1, ok, f"t1/t2/t3 = {p.t1}/{p.t2}/{p.t3} s "
                             f"(runtime {elapsed * 1e6:.1f} us)")
    assert ok


def test_criterion_2_metric_fixtures():
    w1 = composite(0.8602, 3.4166, 0.5246)
    w2 = composite(4.5325, 39.7184, 2.3317)
    ok = abs(w1 - 1.41540) <= 1e-5 and abs(w2 - 12.77878) <= 1e-5
    record_acceptance(2, ok, f"W fixtures: {w1:.6f} (want 1.41540), {w2:.6f} (want 12.77878)")
    assert ok


def test_criterion_3_plant_oracles():
    t0 = time.perf_counter()

    # free two-inertia oscillation vs sqrt(K*(J_m+J_L)/(J_m*J_L))
    undamped = PlantParams(MOTOR1.K_shaft, MOTOR1.J_m, MOTOR1.J_L, 1e-12,
                           MOTOR1.R_trans, MOTOR1.T_max)
    dt = 2e-5
    n = int(round(0.5 / dt))
    s = PlantState(theta_m=1e-3)
    twist = np.empty(n)
    for i in range(n):
        twist[i] = s.theta_m - s.theta_L
        s = step(undamped, s, 0.0, 0.0, dt)
    crossings = []
    for i in range(1, n):
        if twist[i - 1] < 0.0 <= twist[i]:
            frac = -twist[i - 1] / (twist[i] - twist[i - 1])
            crossings.append((i - 1 + frac) * dt)
    omega = 2.0 * math.pi * (len(crossings) - 1) / (crossings[-1] - crossings[0])
    expected = MOTOR1.natural_frequency()
    freq_ok = abs(expected - 450.9) < 0.1 and abs(omega - expected) / expected < 0.01

    # rigid limit: K x1e6, constant 1 N*m for 0.1 s -> omega = T*t/(J_m+J_L)
    stiff = PlantParams(MOTOR1.K_shaft * 1e6, MOTOR1.J_m, MOTOR1.J_L, MOTOR1.B_damp,
                        MOTOR1.R_trans, MOTOR1.T_max)
    dt = 2e-6
    s = PlantState()
    for _ in range(int(round(0.1 / dt))):
        s = step(stiff, s, 1.0, 0.0, dt)
    rigid_expected = 1.0 * 0.1 / (MOTOR1.J_m + MOTOR1.J_L)
    rigid_ok = abs(s.omega_m - rigid_expected) / rigid_expected < 1e-3

    elapsed = time.perf_counter() - t0
    ok = freq_ok and rigid_ok and elapsed < 1.0
    record_acceptance(3, ok, f"oscillation {omega:.2f} vs {expected:.2f} rad/s, "
                             f"rigid {s.omega_m:.5f} vs {rigid_expected:.5f} rad/s "
                             f"(runtime {elapsed:.2f} s)")
    assert ok


def test_criterion_4_optimizer_convergence():
    fwa_pass = ga_pass = 0
    slowest = 0.0
    for seed in range(10):
        t0 = time.perf_counter()
        if fwa_minimize(sphere, SPHERE_BOUNDS, FwaConfig(seed=seed)).best_W <= 1e-2:
            fwa_pass += 1
        slowest = max(slowest, time.perf_counter() - t0)
        t0 = time.perf_counter()
        if ga_minimize(sphere, SPHERE_BOUNDS, GaConfig(seed=seed)).best_W <= 0.5:
            ga_pass += 1
        slowest = max(slowest, time.perf_counter() - t0)
    ok = fwa_pass >= 9 and ga_pass >= 9 and slowest < 1.0
    record_acceptance(4, ok, f"sphere: FWA <=1e-2 on {fwa_pass}/10 seeds, "
                             f"GA <=0.5 on {ga_pass}/10 seeds, slowest run {slowest:.2f} s")
    assert ok


def test_criterion_5_optimizer_dominance(standard_cycle, decoupled_full):
    sim_cfg = presets.sim_config()
    baseline_W = {}
    for motor in presets.motor_catalog():
        params = presets.plant_params(motor)
        baseline_W[motor.label] = study.simulate_gains(
            params, presets.BASELINE_GAINS, standard_cycle, sim_cfg).W
    failures = [(r.motor, r.seed, r.index.W, baseline_W[r.motor])
                for r in decoupled_full.rows
                if r.index.W > baseline_W[r.motor] + 1e-9]
    worst_margin = min(baseline_W[r.motor] - r.index.W for r in decoupled_full.rows)
    ok = not failures
    record_acceptance(5, ok, f"all {len(decoupled_full.rows)} optimized cells beat the "
                             f"(100, 2.5, 10, 0.75) baseline; smallest margin "
                             f"{worst_margin:.2f} W units")
    assert ok, failures


def test_criterion_6_stability_spread(standard_cycle):
    motor = presets.motor_catalog()[2]
    params = presets.plant_params(motor)
    sim_cfg = presets.sim_config()
    objective = study.make_objective(params, standard_cycle, sim_cfg)
    bounds = presets.gain_bounds()
    fwa_res = stability_trial(objective, bounds, "fwa", repeats=6, base_seed=0,
                              fwa_cfg=presets.fwa_config(), ga_cfg=presets.ga_config())
    ga_res = stability_trial(objective, bounds, "ga", repeats=6, base_seed=0,
                             fwa_cfg=presets.fwa_config(), ga_cfg=presets.ga_config())
    ok = fwa_res.rel_spread <= ga_res.rel_spread
    record_acceptance(6, ok, f"6-trial rel spread on {motor.label}: "
                             f"FWA {fwa_res.rel_spread:.4f} vs GA {ga_res.rel_spread:.4f}")
    assert ok, (fwa_res, ga_res)


def test_criterion_7_decoupled_trend(decoupled_full, tmp_path):
    decoupled_full.write_outputs(tmp_path)
    with open(tmp_path / "summary.json") as f:
        summary = json.load(f)
    trend = summary.get("high_ratio_trend")
    ok = (trend is not None and trend["deteriorates_at_high_ratio"]
          and trend["margin"] > 0.0)
    record_acceptance(7, ok, "W at ratio "
                      f"{trend['highest_ratio']:.2f} = {trend['W_at_highest_ratio']:.2f} "
                      f"exceeds best mid-ratio W {trend['min_mid_W']:.2f} "
                      f"(margin {trend['margin']:.2f}, recorded in summary.json)")
    assert ok, trend


def test_criterion_8_fixed_gain_trends(tmp_path):
    result = study.fixed_gain_sweep()
    result.write_outputs(tmp_path)
    with open(tmp_path / "summary.json") as f:
        summary = json.load(f)
    trend = summary.get("argmin_trend")
    recorded = trend is not None and "argmin_ratio_per_source" in trend
    differs = recorded and trend["argmin_differs"]
    detail = (f"arg-min ratios per gain set: {trend['argmin_ratio_per_source']}"
              if recorded else "trend record missing")
    # the expected outcome (arg-mins differ) is recorded either way; this
    # deterministic configuration does reproduce the divergence of trends
    record_acceptance(8, recorded and differs, detail)
    assert recorded
    assert differs, f"expected-outcome not met (documented in summary.json): {detail}"


def test_criterion_9_repro_determinism(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["repro", "fig5-4", "--seed", "0", "--jobs", "2", "--out", str(out_a)]) == 0
    assert main(["repro", "fig5-4", "--seed", "0", "--jobs", "2", "--out", str(out_b)]) == 0
    sweep_same = (out_a / "sweep.csv").read_bytes() == (out_b / "sweep.csv").read_bytes()
    summary_same = (out_a / "summary.json").read_bytes() == (out_b / "summary.json").read_bytes()
    n_rows = len((out_a / "sweep.csv").read_text().strip().split("\n")) - 1
    ok = sweep_same and summary_same and n_rows == 18
    record_acceptance(9, ok, f"repro fig5-4 --seed 0 twice: sweep.csv identical={sweep_same}, "
                             f"summary.json identical={summary_same}, rows={n_rows}")
    assert ok


def test_criterion_10_property_suites():
    rng = np.random.default_rng(2024)
    checks = {}

    # profile closure over 1000 random specs
    ok = True
    for _ in range(1000):
        p = motion.plan(motion.ProfileSpec(float(rng.uniform(0, 2)),
                                           float(rng.uniform(0.01, 1)),
                                           float(rng.uniform(0.1, 20))))
        ok &= abs(p.covered_distance() - p.distance) <= 1e-12
    checks["profile closure"] = ok

    # energy decrease over 1000 free-decay steps
    ok = True
    s = PlantState(1e-3, 2.0, -1e-3, -2.0)
    for i in range(1000):
        if i % 100 == 0:
            s = PlantState(float(rng.uniform(-0.01, 0.01)), float(rng.uniform(-5, 5)),
                           float(rng.uniform(-0.01, 0.01)), float(rng.uniform(-5, 5)))
        e0 = mechanical_energy(MOTOR1, s)
        s = step(MOTOR1, s, 0.0, 0.0, 1e-4)
        ok &= mechanical_energy(MOTOR1, s) <= e0 + 1e-9 * max(e0, 1e-30)
    checks["energy decrease"] = ok

    # torque clamp over 1000 random commands and controller steps
    ok = True
    st = reset()
    g = Gains(200.0, 5.0, 20.0, 1.0)
    for _ in range(1000):
        ok &= abs(saturate(MOTOR1, float(rng.uniform(-1e4, 1e4)))) <= MOTOR1.T_max
        torque, st = control_step(g, float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)),
                                  float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)),
                                  st, MOTOR1.T_max, 1e-3)
        ok &= abs(torque) <= MOTOR1.T_max
    checks["torque clamp"] = ok

    # W strict monotonicity in each component, 1000 cases
    ok = True
    for _ in range(1000):
        a, b, c = (float(v) for v in rng.uniform(0, 100, size=3))
        d = float(rng.uniform(1e-9, 10))
        k = int(rng.integers(0, 3))
        bumped = [a, b, c]
        bumped[k] += d
        ok &= composite(*bumped) > composite(a, b, c)
    checks["W monotonicity"] = ok

    # bounds containment for every candidate of a full FWA run (>1000 evals)
    seen = []
    bounds = GainBounds()

    def recording(x):
        seen.append(x.copy())
        return sphere(x)

    fwa_minimize(recording, bounds, FwaConfig(seed=123))
    lo = np.array([p[0] for p in bounds.as_pairs()])
    hi = np.array([p[1] for p in bounds.as_pairs()])
    checks["bounds containment"] = (len(seen) >= 1000
                                    and all(np.all(x >= lo) and np.all(x <= hi) for x in seen))

    # elitism: history nonincreasing across 20 seeded runs (1000 entries)
    ok = True
    entries = 0
    for seed in range(20):
        h = fwa_minimize(sphere, SPHERE_BOUNDS, FwaConfig(seed=seed)).history
        ok &= all(b <= a for a, b in zip(h, h[1:]))
        entries += len(h)
    checks["elitism monotonicity"] = ok and entries == 1000

    all_ok = all(checks.values())
    record_acceptance(10, all_ok, "; ".join(f"{name}: {'ok' if v else 'FAIL'}"
                                            for name, v in checks.items()))
    assert all_ok, checks
