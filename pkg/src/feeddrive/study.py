"""Scenario harness: fixed-gain sweeps, decoupled (re-optimized) sweeps and
motion-parameter sweeps over the motor catalog, with persisted tabular output.

Every sweep is deterministic given its configuration and master seed: repeat
seeds derive as ``master_seed + repeat`` and results are assembled in cell
order, so ``jobs > 1`` changes wall time only, never bytes.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import metrics, motion, presets, simulation
from .controller import GainBounds, Gains
from .metrics import PerformanceIndex
from .optimize import FwaConfig, fwa_minimize
from .plant import MotorSpec, PlantParams
from .simulation import SimConfig

SWEEP_CSV_HEADER = ("scenario,motor,inertia_ratio,gain_source,"
                    "Kp,Kvp,Kvi,Kfv,max_pos_err_mm,max_vel_err_mms,vel_fluct,W,seed,diverged")

MID_RATIO_RANGE = (0.6, 3.0)  # interior band used by the high-ratio trend check


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    motor: str
    inertia_ratio: float
    gain_source: str
    gains: Gains
    index: PerformanceIndex
    seed: int

    def to_csv_line(self) -> str:
        g = self.gains
        i = self.index
        return (f"{self.scenario},{self.motor},{self.inertia_ratio!r},{self.gain_source},"
                f"{g.K_p!r},{g.K_vp!r},{g.K_vi!r},{g.K_fv!r},"
                f"{i.max_pos_err!r},{i.max_vel_err!r},{i.vel_fluct!r},{i.W!r},"
                f"{self.seed},{int(i.diverged)}")


@dataclass
class SweepResult:
    scenario: str
    rows: list[SweepRow]
    master_seed: int = 0

    def csv_text(self) -> str:
        return "\n".join([SWEEP_CSV_HEADER] + [r.to_csv_line() for r in self.rows]) + "\n"

    def per_motor_best(self) -> list[dict]:
        best: dict[str, SweepRow] = {}
        order: list[str] = []
        for row in self.rows:
            if row.motor not in best:
                order.append(row.motor)
            if row.motor not in best or row.index.W < best[row.motor].index.W:
                best[row.motor] = row
        out = []
        for label in order:
            r = best[label]
            out.append({"motor": label, "inertia_ratio": r.inertia_ratio,
                        "gain_source": r.gain_source, "seed": r.seed,
                        "gains": dict(zip(("K_p", "K_vp", "K_vi", "K_fv"), r.gains.as_tuple())),
                        "W": r.index.W, "diverged": r.index.diverged})
        return out

    def per_motor_spread(self) -> dict[str, dict]:
        groups: dict[str, list[float]] = {}
        for row in self.rows:
            groups.setdefault(row.motor, []).append(row.index.W)
        out = {}
        for label, vals in groups.items():
            spread = max(vals) - min(vals)
            mean = sum(vals) / len(vals)
            out[label] = {"W_values": vals, "spread": spread,
                          "rel_spread": spread / mean if mean else 0.0}
        return out

    def high_ratio_trend(self) -> dict | None:
        """Does W at the largest inertia ratio exceed the best W over the
        mid-range ratios?  (The published decoupled sweeps show performance
        deteriorating sharply once the ratio gets too large.)"""
        best = self.per_motor_best()
        if len(best) < 3:
            return None
        top = max(best, key=lambda b: b["inertia_ratio"])
        mids = [b for b in best if MID_RATIO_RANGE[0] <= b["inertia_ratio"] <= MID_RATIO_RANGE[1]]
        if not mids:
            return None
        ref = min(mids, key=lambda b: b["W"])
        return {"highest_ratio": top["inertia_ratio"], "W_at_highest_ratio": top["W"],
                "mid_ratios": [b["inertia_ratio"] for b in mids],
                "min_mid_W": ref["W"], "margin": top["W"] - ref["W"],
                "deteriorates_at_high_ratio": top["W"] > ref["W"]}

    def argmin_trend(self) -> dict | None:
        """Arg-min inertia ratio of W per gain source (fixed-gain sweeps)."""
        groups: dict[str, SweepRow] = {}
        for row in self.rows:
            cur = groups.get(row.gain_source)
            if cur is None or row.index.W < cur.index.W:
                groups[row.gain_source] = row
        if len(groups) < 2:
            return None
        argmins = {src: r.inertia_ratio for src, r in groups.items()}
        return {"argmin_ratio_per_source": argmins,
                "argmin_differs": len(set(argmins.values())) > 1}

    def summary(self) -> dict:
        s = {"scenario": self.scenario, "master_seed": self.master_seed,
             "rows": len(self.rows), "per_motor_best": self.per_motor_best(),
             "per_motor_spread": self.per_motor_spread()}
        trend = self.high_ratio_trend()
        if trend is not None:
            s["high_ratio_trend"] = trend
        argmin = self.argmin_trend()
        if argmin is not None:
            s["argmin_trend"] = argmin
        return s

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"

    def plot_series(self) -> dict[str, list[tuple[float, float]]]:
        series: dict[str, list[tuple[float, float]]] = {}
        for row in self.rows:
            # motion sweeps tag rows as "<scenario>:<grid point>"; one series per tag
            key = row.scenario.split(":", 1)[1] if ":" in row.scenario else row.gain_source
            series.setdefault(key, []).append((row.inertia_ratio, row.index.W))
        for pts in series.values():
            pts.sort(key=lambda rw: rw[0])
        return series

    def write_outputs(self, outdir) -> list[str]:
        """Write sweep.csv, summary.json and per-series W-vs-ratio data files."""
        os.makedirs(outdir, exist_ok=True)
        paths = []
        p = os.path.join(outdir, "sweep.csv")
        with open(p, "w", newline="") as f:
            f.write(self.csv_text())
        paths.append(p)
        p = os.path.join(outdir, "summary.json")
        with open(p, "w") as f:
            f.write(self.summary_json())
        paths.append(p)
        for source, pts in self.plot_series().items():
            p = os.path.join(outdir, f"W_vs_ratio_{self.scenario}-{source}.dat")
            with open(p, "w") as f:
                for ratio, W in pts:
                    f.write(f"{ratio!r} {W!r}\n")
            paths.append(p)
        return paths

    @property
    def any_diverged(self) -> bool:
        return any(r.index.diverged for r in self.rows)


def _commands_for(spec: motion.ProfileSpec, sim_cfg: SimConfig) -> motion.CommandStream:
    return motion.reciprocate(motion.plan(spec), sim_cfg.Ts)


def simulate_gains(params: PlantParams, gains: Gains, cmds: motion.CommandStream,
                   sim_cfg: SimConfig) -> PerformanceIndex:
    return metrics.evaluate(simulation.run(params, gains, cmds, sim_cfg))


def make_objective(params: PlantParams, cmds: motion.CommandStream, sim_cfg: SimConfig):
    """Objective for the optimizers: gain vector -> W (total, penalty on divergence)."""
    def objective(x: np.ndarray) -> float:
        return simulate_gains(params, Gains(*x), cmds, sim_cfg).W
    return objective


def fixed_gain_sweep(catalog: list[MotorSpec] | None = None,
                     gain_sets: list[Gains] | None = None,
                     motion_spec: motion.ProfileSpec | None = None,
                     sim_cfg: SimConfig | None = None,
                     scenario: str = "fixed",
                     J_L_kgcm2: float | None = None) -> SweepResult:
    """Simulate every motor under every fixed gain set on the standard cycle."""
    catalog = catalog if catalog is not None else presets.motor_catalog()
    gain_sets = gain_sets if gain_sets is not None else presets.fixed_gain_sets()
    motion_spec = motion_spec if motion_spec is not None else presets.motion_spec()
    sim_cfg = sim_cfg if sim_cfg is not None else presets.sim_config()
    cmds = _commands_for(motion_spec, sim_cfg)
    rows = []
    for motor in catalog:
        params = presets.plant_params(motor, J_L_kgcm2)
        for si, gains in enumerate(gain_sets):
            idx = simulate_gains(params, gains, cmds, sim_cfg)
            rows.append(SweepRow(scenario, motor.label, params.inertia_ratio,
                                 f"set{si + 1}", gains, idx, 0))
    return SweepResult(scenario, rows)


def _optimize_cell(args) -> tuple:
    """Worker for one (motor, repeat) optimization cell; module-level so it pickles."""
    (motor, J_L_kgcm2, bound_pairs, fwa_cfg, profile, sim_cfg) = args
    params = presets.plant_params(motor, J_L_kgcm2)
    cmds = _commands_for(profile, sim_cfg)
    objective = make_objective(params, cmds, sim_cfg)
    res = fwa_minimize(objective, bound_pairs, fwa_cfg)
    gains = Gains(*res.best_params)
    idx = simulate_gains(params, gains, cmds, sim_cfg)
    return gains, idx, res.evaluations


def _run_cells(cells: list[tuple], jobs: int) -> list[tuple]:
    if jobs <= 1 or len(cells) <= 1:
        return [_optimize_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_optimize_cell, cells))


def decoupled_sweep(catalog: list[MotorSpec] | None = None,
                    bounds: GainBounds | None = None,
                    fwa_cfg: FwaConfig | None = None,
                    motion_spec: motion.ProfileSpec | None = None,
                    repeats: int = 3,
                    master_seed: int = 0,
                    sim_cfg: SimConfig | None = None,
                    jobs: int = 1,
                    scenario: str = "decoupled",
                    J_L_kgcm2: float | None = None) -> SweepResult:
    """Re-optimize the gains per motor (the decoupling step), ``repeats`` times
    with seeds master_seed + repeat, and record each optimum."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    catalog = catalog if catalog is not None else presets.motor_catalog()
    bounds = bounds if bounds is not None else presets.gain_bounds()
    fwa_cfg = fwa_cfg if fwa_cfg is not None else presets.fwa_config()
    motion_spec = motion_spec if motion_spec is not None else presets.motion_spec()
    sim_cfg = sim_cfg if sim_cfg is not None else presets.sim_config()

    cells = []
    meta = []
    for motor in catalog:
        for rep in range(repeats):
            seed = master_seed + rep
            cells.append((motor, J_L_kgcm2, bounds.as_pairs(),
                          replace(fwa_cfg, seed=seed), motion_spec, sim_cfg))
            meta.append((motor, rep, seed))

    rows = []
    for (motor, rep, seed), (gains, idx, _) in zip(meta, _run_cells(cells, jobs)):
        ratio = presets.plant_params(motor, J_L_kgcm2).inertia_ratio
        rows.append(SweepRow(scenario, motor.label, ratio, f"opt{rep + 1}",
                             gains, idx, seed))
    return SweepResult(scenario, rows, master_seed)


def motion_sweep(motors: list[MotorSpec] | None = None,
                 accelerations: list[float] | None = None,
                 speeds: list[float] | None = None,
                 bounds: GainBounds | None = None,
                 fwa_cfg: FwaConfig | None = None,
                 distance_mm: float = 200.0,
                 speed_mm_s: float = 100.0,
                 accel_m_s2: float = 1.0,
                 master_seed: int = 0,
                 sim_cfg: SimConfig | None = None,
                 jobs: int = 1,
                 scenario: str = "motion",
                 J_L_kgcm2: float | None = None) -> SweepResult:
    """Decoupled optimization over a grid of accelerations [m/s^2] or maximum
    feed speeds [mm/s]; one row per (grid point, motor).

    Exactly one of ``accelerations`` / ``speeds`` must be given.  Short or slow
    moves that cannot reach the cruise speed fall back to triangular plans
    automatically.
    """
    if (accelerations is None) == (speeds is None):
        raise ValueError("give exactly one of accelerations or speeds")
    motors = motors if motors is not None else presets.experiment_motors()
    bounds = bounds if bounds is not None else presets.gain_bounds()
    fwa_cfg = fwa_cfg if fwa_cfg is not None else presets.fwa_config()
    sim_cfg = sim_cfg if sim_cfg is not None else presets.sim_config()

    if accelerations is not None:
        grid = [(f"a={a:g}", motion.ProfileSpec.from_mm(distance_mm, speed_mm_s, a))
                for a in accelerations]
    else:
        grid = [(f"v={v:g}", motion.ProfileSpec.from_mm(distance_mm, v, accel_m_s2))
                for v in speeds]

    cells = []
    meta = []
    for tag, profile in grid:
        for motor in motors:
            cells.append((motor, J_L_kgcm2, bounds.as_pairs(),
                          replace(fwa_cfg, seed=master_seed), profile, sim_cfg))
            meta.append((tag, motor))

    rows = []
    for (tag, motor), (gains, idx, _) in zip(meta, _run_cells(cells, jobs)):
        ratio = presets.plant_params(motor, J_L_kgcm2).inertia_ratio
        rows.append(SweepRow(f"{scenario}:{tag}", motor.label, ratio, "fwa",
                             gains, idx, master_seed))
    return SweepResult(scenario, rows, master_seed)
