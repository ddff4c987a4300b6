"""Sweep harness: row shapes, determinism, summaries, persisted outputs."""

import json
import os

import numpy as np
import pytest

from feeddrive import motion, presets, study
from feeddrive.controller import GainBounds, Gains
from feeddrive.metrics import composite
from feeddrive.optimize import FwaConfig

TINY_FWA = FwaConfig(generations=3, n_fireworks=3, total_sparks=6, gauss_sparks=2)


@pytest.fixture(scope="module")
def fixed_result():
    return study.fixed_gain_sweep()


@pytest.fixture(scope="module")
def small_decoupled():
    return study.decoupled_sweep(fwa_cfg=TINY_FWA, repeats=2, master_seed=0)


class TestFixedSweep:
    def test_grid_shape(self, fixed_result):
        assert len(fixed_result.rows) == 18  # 6 motors x 3 gain sets
        assert all(r.seed == 0 for r in fixed_result.rows)
        sources = {r.gain_source for r in fixed_result.rows}
        assert sources == {"set1", "set2", "set3"}

    def test_w_recomputable_from_components(self, fixed_result):
        for r in fixed_result.rows:
            i = r.index
            assert i.W == composite(i.max_pos_err, i.max_vel_err, i.vel_fluct)

    def test_inertia_ratio_column_exact(self, fixed_result):
        by_label = {m.label: m for m in presets.motor_catalog()}
        for r in fixed_result.rows:
            params = presets.plant_params(by_label[r.motor])
            assert r.inertia_ratio == params.J_L / params.J_m

    def test_deterministic_csv(self, fixed_result):
        again = study.fixed_gain_sweep()
        assert again.csv_text() == fixed_result.csv_text()

    def test_argmin_trend_recorded(self, fixed_result):
        trend = fixed_result.argmin_trend()
        assert trend is not None
        assert set(trend["argmin_ratio_per_source"]) == {"set1", "set2", "set3"}

    def test_csv_header(self, fixed_result):
        assert fixed_result.csv_text().split("\n")[0] == study.SWEEP_CSV_HEADER


class TestDecoupledSweep:
    def test_row_count(self, small_decoupled):
        assert len(small_decoupled.rows) == 12  # 6 motors x 2 repeats

    def test_seeds_derive_from_master(self, small_decoupled):
        seeds = {(r.motor, r.gain_source): r.seed for r in small_decoupled.rows}
        for motor in presets.motor_catalog():
            assert seeds[(motor.label, "opt1")] == 0
            assert seeds[(motor.label, "opt2")] == 1

    def test_gains_within_bounds(self, small_decoupled):
        bounds = presets.gain_bounds()
        for r in small_decoupled.rows:
            assert bounds.contains(r.gains)

    def test_w_matches_direct_simulation(self, small_decoupled):
        sim_cfg = presets.sim_config()
        cmds = motion.reciprocate(motion.plan(presets.motion_spec()), sim_cfg.Ts)
        by_label = {m.label: m for m in presets.motor_catalog()}
        r = small_decoupled.rows[0]
        params = presets.plant_params(by_label[r.motor])
        idx = study.simulate_gains(params, r.gains, cmds, sim_cfg)
        assert idx.W == r.index.W

    def test_parallel_matches_serial(self):
        serial = study.decoupled_sweep(catalog=presets.motor_catalog()[:2],
                                       fwa_cfg=TINY_FWA, repeats=2, master_seed=5)
        parallel = study.decoupled_sweep(catalog=presets.motor_catalog()[:2],
                                         fwa_cfg=TINY_FWA, repeats=2, master_seed=5,
                                         jobs=2)
        assert serial.csv_text() == parallel.csv_text()
        assert serial.summary_json() == parallel.summary_json()

    def test_rejects_zero_repeats(self):
        with pytest.raises(ValueError):
            study.decoupled_sweep(repeats=0)

    def test_summary_reports_spread_and_trend(self, small_decoupled):
        s = small_decoupled.summary()
        assert s["rows"] == 12
        assert len(s["per_motor_best"]) == 6
        for stats in s["per_motor_spread"].values():
            assert len(stats["W_values"]) == 2
            assert stats["spread"] >= 0
        assert "high_ratio_trend" in s
        assert "margin" in s["high_ratio_trend"]


class TestMotionSweep:
    def test_acceleration_grid_shape(self):
        res = study.motion_sweep(motors=presets.experiment_motors(),
                                 accelerations=[0.5, 1.0, 2.0, 5.0],
                                 fwa_cfg=TINY_FWA,
                                 J_L_kgcm2=presets.experiment_load_kgcm2())
        assert len(res.rows) == 12
        tags = {r.scenario for r in res.rows}
        assert tags == {"motion:a=0.5", "motion:a=1", "motion:a=2", "motion:a=5"}

    def test_speed_grid_plans(self):
        # v=50 mm/s at a=1 m/s^2 over 200 mm stays trapezoidal with t1=0.05 s
        spec = motion.ProfileSpec.from_mm(200.0, 50.0, 1.0)
        p = motion.plan(spec)
        assert not p.triangular
        assert p.t1 == pytest.approx(0.05, abs=1e-12)

    def test_acceleration_degrades_W(self):
        motor = [presets.experiment_motors()[0]]
        res = study.motion_sweep(motors=motor, accelerations=[0.5, 5.0],
                                 fwa_cfg=TINY_FWA,
                                 J_L_kgcm2=presets.experiment_load_kgcm2())
        W = {r.scenario: r.index.W for r in res.rows}
        assert W["motion:a=5"] > W["motion:a=0.5"]

    def test_requires_exactly_one_grid(self):
        with pytest.raises(ValueError):
            study.motion_sweep(accelerations=[1.0], speeds=[100.0], fwa_cfg=TINY_FWA)
        with pytest.raises(ValueError):
            study.motion_sweep(fwa_cfg=TINY_FWA)


class TestOutputs:
    def test_write_outputs(self, tmp_path, small_decoupled):
        paths = small_decoupled.write_outputs(tmp_path)
        names = {os.path.basename(p) for p in paths}
        assert "sweep.csv" in names
        assert "summary.json" in names
        assert "W_vs_ratio_decoupled-opt1.dat" in names
        assert "W_vs_ratio_decoupled-opt2.dat" in names
        for p in paths:
            assert os.path.commonpath([str(tmp_path), p]) == str(tmp_path)

        with open(tmp_path / "summary.json") as f:
            summary = json.load(f)
        assert summary["scenario"] == "decoupled"

        dat = np.loadtxt(tmp_path / "W_vs_ratio_decoupled-opt1.dat")
        assert dat.shape == (6, 2)
        assert np.all(np.diff(dat[:, 0]) > 0)  # sorted by ratio

    def test_csv_parses_and_recomputes(self, tmp_path, small_decoupled):
        small_decoupled.write_outputs(tmp_path)
        with open(tmp_path / "sweep.csv") as f:
            header = f.readline().strip().split(",")
            rows = [line.strip().split(",") for line in f]
        assert header == study.SWEEP_CSV_HEADER.split(",")
        for row in rows:
            rec = dict(zip(header, row))
            if rec["diverged"] == "0":
                # repr-precision floats recompose W exactly
                W = composite(float(rec["max_pos_err_mm"]), float(rec["max_vel_err_mms"]),
                              float(rec["vel_fluct"]))
                assert W == float(rec["W"])
