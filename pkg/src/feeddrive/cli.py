"""Command-line entry point.

Subcommands: simulate, optimize, sweep, repro, validate.  All randomness flows
from ``--seed`` (default 0, never wall-clock) and every artifact lands inside
``--out``.  Exit codes: 0 success, 2 configuration error, 3 completed with a
divergence flag (files are still written).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from . import metrics, motion, presets, simulation, study
from .controller import GainBounds, Gains, GAIN_NAMES
from .optimize import FwaConfig, GaConfig, StabilityResult, fwa_minimize, ga_minimize
from .plant import MotorSpec, PlantParams
from .simulation import SimConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

REPRO_SCENARIOS = ("fig4-1", "fig5-3", "fig5-4", "table6-2-sim", "table6-3-sim")


class ConfigError(Exception):
    """Configuration problem; the message names the offending field."""


def _load_config(path: str) -> dict:
    if path is None:
        raise ConfigError("missing required --config PATH")
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")


def _require(cfg: dict, field: str):
    if field not in cfg:
        raise ConfigError(f"missing required config field '{field}'")
    return cfg[field]


def _parse_motor(entry) -> MotorSpec:
    if isinstance(entry, str):
        try:
            return presets.motor_by_label(entry)
        except KeyError:
            known = ", ".join(m.label for m in presets.motor_catalog())
            raise ConfigError(f"field 'motor': unknown label {entry!r} (catalog: {known})")
    try:
        return MotorSpec.from_catalog(_require(entry, "label"), _require(entry, "T_max_Nm"),
                                      _require(entry, "J_m_kgcm2"))
    except (ValueError, TypeError) as e:
        raise ConfigError(f"field 'motor': {e}")


def _parse_motion(entry) -> motion.ProfileSpec:
    try:
        return motion.ProfileSpec.from_mm(_require(entry, "distance_mm"),
                                          _require(entry, "speed_mm_s"),
                                          _require(entry, "accel_m_s2"))
    except ValueError as e:
        raise ConfigError(f"field 'motion': {e}")


def _parse_gains(entry) -> Gains:
    try:
        if isinstance(entry, dict):
            return Gains(**{k: float(entry[k]) for k in GAIN_NAMES})
        return Gains.from_sequence(entry)
    except KeyError as e:
        raise ConfigError(f"field 'gains': missing gain {e}")
    except (ValueError, TypeError) as e:
        raise ConfigError(f"field 'gains': {e}")


def _parse_bounds(entry) -> GainBounds:
    if entry is None:
        return presets.gain_bounds()
    try:
        kwargs = {name: tuple(float(v) for v in entry[name]) for name in GAIN_NAMES if name in entry}
        return GainBounds(**kwargs)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"field 'bounds': {e}")


def _parse_sim_cfg(cfg: dict) -> SimConfig:
    entry = cfg.get("control", {})
    base = presets.sim_config()
    try:
        return SimConfig(Ts=entry.get("Ts", base.Ts),
                         substeps=entry.get("substeps", base.substeps),
                         damping_placement=entry.get("damping", base.damping_placement))
    except ValueError as e:
        raise ConfigError(f"field 'control': {e}")


def _parse_fwa(cfg: dict, seed: int) -> FwaConfig:
    try:
        return replace(presets.fwa_config(seed), **cfg.get("fwa", {}))
    except (ValueError, TypeError) as e:
        raise ConfigError(f"field 'fwa': {e}")


def _parse_ga(cfg: dict, seed: int) -> GaConfig:
    try:
        return replace(presets.ga_config(seed), **cfg.get("ga", {}))
    except (ValueError, TypeError) as e:
        raise ConfigError(f"field 'ga': {e}")


def _parse_catalog(cfg: dict) -> list[MotorSpec] | None:
    if "motors" not in cfg:
        return None
    return [_parse_motor(m) for m in cfg["motors"]]


def _outdir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    motor = _parse_motor(_require(cfg, "motor"))
    gains = _parse_gains(_require(cfg, "gains"))
    profile = _parse_motion(_require(cfg, "motion"))
    sim_cfg = _parse_sim_cfg(cfg)
    params = presets.plant_params(motor, cfg.get("J_L_kgcm2"))

    cmds = motion.reciprocate(motion.plan(profile), sim_cfg.Ts)
    trace = simulation.run(params, gains, cmds, sim_cfg)
    index = metrics.evaluate(trace)

    out = _outdir(args)
    trace.to_csv(os.path.join(out, "trace.csv"))
    with open(os.path.join(out, "index.csv"), "w", newline="") as f:
        f.write(index.to_csv())
    print(f"simulate: {motor.label} W={index.W:.6g} diverged={trace.diverged}")
    return EXIT_DIVERGED if trace.diverged else EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _load_config(args.config)
    motor = _parse_motor(_require(cfg, "motor"))
    profile = _parse_motion(_require(cfg, "motion"))
    bounds = _parse_bounds(cfg.get("bounds"))
    sim_cfg = _parse_sim_cfg(cfg)
    algo = args.algo or cfg.get("algo", "fwa")
    if algo not in ("fwa", "ga"):
        raise ConfigError(f"field 'algo': must be 'fwa' or 'ga', got {algo!r}")

    params = presets.plant_params(motor, cfg.get("J_L_kgcm2"))
    cmds = motion.reciprocate(motion.plan(profile), sim_cfg.Ts)
    objective = study.make_objective(params, cmds, sim_cfg)

    if algo == "fwa":
        result = fwa_minimize(objective, bounds, _parse_fwa(cfg, args.seed))
    else:
        result = ga_minimize(objective, bounds, _parse_ga(cfg, args.seed))

    out = _outdir(args)
    with open(os.path.join(out, "result.json"), "w") as f:
        f.write(result.to_json())
    print(f"optimize[{algo}]: {motor.label} best W={result.best_W:.6g} "
          f"evaluations={result.evaluations}")
    return EXIT_OK


def _sweep_from_config(cfg: dict, seed: int, jobs: int) -> study.SweepResult:
    scenario = _require(cfg, "scenario")
    catalog = _parse_catalog(cfg)
    sim_cfg = _parse_sim_cfg(cfg)
    J_L = cfg.get("J_L_kgcm2")
    if scenario == "fixed":
        gain_sets = ([_parse_gains(g) for g in cfg["gain_sets"]]
                     if "gain_sets" in cfg else None)
        profile = _parse_motion(cfg["motion"]) if "motion" in cfg else None
        return study.fixed_gain_sweep(catalog, gain_sets, profile, sim_cfg,
                                      J_L_kgcm2=J_L)
    if scenario == "decoupled":
        profile = _parse_motion(cfg["motion"]) if "motion" in cfg else None
        return study.decoupled_sweep(catalog, _parse_bounds(cfg.get("bounds")),
                                     _parse_fwa(cfg, seed), profile,
                                     repeats=cfg.get("repeats", 3), master_seed=seed,
                                     sim_cfg=sim_cfg, jobs=jobs, J_L_kgcm2=J_L)
    if scenario == "motion":
        if ("accelerations" in cfg) == ("speeds" in cfg):
            raise ConfigError("field 'scenario': motion sweep needs exactly one of "
                              "'accelerations' or 'speeds'")
        base = cfg.get("motion", {})
        return study.motion_sweep(catalog,
                                  accelerations=cfg.get("accelerations"),
                                  speeds=cfg.get("speeds"),
                                  bounds=_parse_bounds(cfg.get("bounds")),
                                  fwa_cfg=_parse_fwa(cfg, seed),
                                  distance_mm=base.get("distance_mm", 200.0),
                                  speed_mm_s=base.get("speed_mm_s", 100.0),
                                  accel_m_s2=base.get("accel_m_s2", 1.0),
                                  master_seed=seed, sim_cfg=sim_cfg, jobs=jobs,
                                  J_L_kgcm2=J_L)
    raise ConfigError(f"field 'scenario': unknown scenario {scenario!r} "
                      "(expected fixed, decoupled or motion)")


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    result = _sweep_from_config(cfg, args.seed, args.jobs)
    result.write_outputs(_outdir(args))
    print(f"sweep[{result.scenario}]: {len(result.rows)} rows, "
          f"diverged={result.any_diverged}")
    return EXIT_DIVERGED if result.any_diverged else EXIT_OK


def cmd_repro(args) -> int:
    scenario = args.scenario_pos or args.scenario
    if scenario is None:
        raise ConfigError(f"missing scenario id (one of: {', '.join(REPRO_SCENARIOS)})")
    if scenario not in REPRO_SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; valid ids: "
                          f"{', '.join(REPRO_SCENARIOS)}")
    out = _outdir(args)
    seed, jobs = args.seed, args.jobs

    if scenario == "fig4-1":
        result = study.fixed_gain_sweep(scenario="fig4-1")
    elif scenario == "fig5-4":
        result = study.decoupled_sweep(master_seed=seed, jobs=jobs, scenario="fig5-4")
    elif scenario == "fig5-3":
        return _repro_stability(out, seed)
    elif scenario == "table6-2-sim":
        result = study.motion_sweep(accelerations=presets.defaults()["experiment"]["accel_grid_m_s2"],
                                    J_L_kgcm2=presets.experiment_load_kgcm2(),
                                    master_seed=seed, jobs=jobs, scenario="table6-2-sim")
    else:
        result = study.motion_sweep(speeds=presets.defaults()["experiment"]["speed_grid_mm_s"],
                                    J_L_kgcm2=presets.experiment_load_kgcm2(),
                                    master_seed=seed, jobs=jobs, scenario="table6-3-sim")

    result.write_outputs(out)
    print(f"repro {scenario}: {len(result.rows)} rows, diverged={result.any_diverged}")
    return EXIT_DIVERGED if result.any_diverged else EXIT_OK


def _repro_stability(out: str, seed: int) -> int:
    """Six seeded optimizations per algorithm on the mid-catalog motor objective."""
    motor = presets.motor_catalog()[2]
    params = presets.plant_params(motor)
    sim_cfg = presets.sim_config()
    cmds = motion.reciprocate(motion.plan(presets.motion_spec()), sim_cfg.Ts)
    objective = study.make_objective(params, cmds, sim_cfg)
    bounds = presets.gain_bounds()

    from .optimize import stability_trial
    fwa_res = stability_trial(objective, bounds, "fwa", repeats=6, base_seed=seed,
                              fwa_cfg=presets.fwa_config(), ga_cfg=presets.ga_config())
    ga_res = stability_trial(objective, bounds, "ga", repeats=6, base_seed=seed,
                             fwa_cfg=presets.fwa_config(), ga_cfg=presets.ga_config())
    payload = {
        "motor": motor.label,
        "base_seed": seed,
        "trials_per_algorithm": 6,
        "fwa": {"best_W": list(fwa_res.values), "spread": fwa_res.spread,
                "rel_spread": fwa_res.rel_spread},
        "ga": {"best_W": list(ga_res.values), "spread": ga_res.spread,
               "rel_spread": ga_res.rel_spread},
        "fwa_rel_spread_le_ga": fwa_res.rel_spread <= ga_res.rel_spread,
    }
    with open(os.path.join(out, "stability.json"), "w") as f:
        f.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"repro fig5-3: FWA rel spread {fwa_res.rel_spread:.4f}, "
          f"GA rel spread {ga_res.rel_spread:.4f}")
    return EXIT_OK


def cmd_validate(args) -> int:
    """Schema and invariant check; prints diagnostics, never simulates or writes."""
    if args.config is None:
        cfg = {"motion": presets.defaults()["motion"],
               "bounds": {k: list(v) for k, v in
                          zip(GAIN_NAMES, presets.gain_bounds().as_pairs())},
               "motors": [m["label"] for m in presets.defaults()["motors"]],
               "control": presets.defaults()["control"]}
        print("validating built-in defaults")
    else:
        cfg = _load_config(args.config)

    if "motor" in cfg:
        motor = _parse_motor(cfg["motor"])
        print(f"motor: {motor.label} T_max={motor.T_max} N*m J_m={motor.J_m} kg*m^2")
    if "motors" in cfg:
        for m in _parse_catalog(cfg):
            print(f"motor: {m.label} T_max={m.T_max} N*m J_m={m.J_m} kg*m^2")
    if "gains" in cfg:
        g = _parse_gains(cfg["gains"])
        print(f"gains: K_p={g.K_p} K_vp={g.K_vp} K_vi={g.K_vi} K_fv={g.K_fv}")
    if "motion" in cfg:
        profile = _parse_motion(cfg["motion"])
        print(f"motion: distance={profile.distance} m v_max={profile.v_max} m/s "
              f"a_max={profile.a_max} m/s^2")
    bounds = _parse_bounds(cfg.get("bounds"))
    for name, (lo, hi) in zip(GAIN_NAMES, bounds.as_pairs()):
        print(f"bound {name}: [{lo:g},{hi:g}]")
    sim_cfg = _parse_sim_cfg(cfg)
    print(f"control: Ts={sim_cfg.Ts} s substeps={sim_cfg.substeps} "
          f"damping={sim_cfg.damping_placement}")
    if "J_L_kgcm2" in cfg:
        params = presets.plant_params(presets.motor_catalog()[0], cfg["J_L_kgcm2"])
        print(f"load inertia override: {params.J_L} kg*m^2")
    if "scenario" in cfg and cfg["scenario"] not in ("fixed", "decoupled", "motion"):
        raise ConfigError(f"field 'scenario': unknown scenario {cfg['scenario']!r}")
    print("config OK")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feeddrive",
        description="Ball-screw feed-drive servo simulation and gain-decoupling studies")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True, out=True, seed=True, jobs=False, algo=False):
        if config:
            p.add_argument("--config", metavar="PATH", help="JSON configuration file")
        if out:
            p.add_argument("--out", metavar="DIR", default=".", help="output directory")
        if seed:
            p.add_argument("--seed", type=int, default=0, metavar="N",
                           help="master random seed (default 0)")
        if jobs:
            p.add_argument("--jobs", type=int, default=1, metavar="N",
                           help="max parallel optimization workers")
        if algo:
            p.add_argument("--algo", choices=("fwa", "ga"), help="optimizer")

    p = sub.add_parser("simulate", help="one closed-loop run -> trace.csv + index.csv")
    common(p, seed=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="one gain optimization -> result.json")
    common(p, algo=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="scenario sweep from config -> sweep.csv + summary.json")
    common(p, jobs=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("repro", help="run a bundled scenario with shipped defaults")
    p.add_argument("scenario_pos", nargs="?", metavar="SCENARIO",
                   help=f"one of: {', '.join(REPRO_SCENARIOS)}")
    p.add_argument("--scenario", metavar="ID", help="scenario id (alternative to positional)")
    common(p, config=False, jobs=True)
    p.set_defaults(func=cmd_repro)

    p = sub.add_parser("validate", help="check a config and echo resolved settings")
    common(p, out=False, seed=False)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
