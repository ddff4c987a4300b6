"""Shipped default parameter tables (mechanics, motor catalog, gain sets,
bounds, motion, algorithm budgets) loaded from ``data/defaults.json``.

Every study scenario is runnable from these without hand-typing numbers.
"""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .controller import GainBounds, Gains
from .motion import ProfileSpec
from .optimize import FwaConfig, GaConfig
from .plant import KG_CM2, MotorSpec, PlantParams
from .simulation import SimConfig

MM_PER_RAD = 1e-3  # metres per (mm/rad)

# In-bounds mid-range reference gains used as the dominance baseline for
# optimized sweeps (the published fixed sets sit outside the search box).
BASELINE_GAINS = Gains(100.0, 2.5, 10.0, 0.75)


@lru_cache(maxsize=1)
def defaults() -> dict:
    with resources.files("feeddrive.data").joinpath("defaults.json").open() as f:
        return json.load(f)


def motor_catalog() -> list[MotorSpec]:
    """The six-motor catalog, ordered by increasing inertia ratio."""
    return [MotorSpec.from_catalog(m["label"], m["T_max_Nm"], m["J_m_kgcm2"])
            for m in defaults()["motors"]]


def motor_by_label(label: str) -> MotorSpec:
    for m in motor_catalog():
        if m.label == label:
            return m
    raise KeyError(f"unknown motor label {label!r}")


def plant_params(motor: MotorSpec, J_L_kgcm2: float | None = None) -> PlantParams:
    """Combine the screw/table mechanics with one motor; J_L overridable."""
    mech = defaults()["mechanics"]
    lead_m = mech["lead_mm"] * 1e-3
    J_L = (mech["J_L_kgcm2"] if J_L_kgcm2 is None else J_L_kgcm2) * KG_CM2
    return PlantParams(
        K_shaft=mech["K_shaft_Nm_per_rad"],
        J_m=motor.J_m,
        J_L=J_L,
        B_damp=mech["B_damp_Nms_per_rad"],
        R_trans=lead_m / (2.0 * 3.141592653589793),
        T_max=motor.T_max,
    )


def fixed_gain_sets() -> list[Gains]:
    """The three published fixed servo-gain sets (K_p, K_vp, K_vi, K_fv)."""
    return [Gains.from_sequence(row) for row in defaults()["fixed_gain_sets"]]


def gain_bounds() -> GainBounds:
    b = defaults()["gain_bounds"]
    return GainBounds(tuple(b["K_p"]), tuple(b["K_vp"]), tuple(b["K_vi"]), tuple(b["K_fv"]))


def motion_spec() -> ProfileSpec:
    m = defaults()["motion"]
    return ProfileSpec.from_mm(m["distance_mm"], m["speed_mm_s"], m["accel_m_s2"])


def fwa_config(seed: int = 0) -> FwaConfig:
    return FwaConfig(seed=seed, **defaults()["fwa"])


def ga_config(seed: int = 0) -> GaConfig:
    return GaConfig(seed=seed, **defaults()["ga"])


def sim_config() -> SimConfig:
    c = defaults()["control"]
    return SimConfig(Ts=c["Ts"], substeps=c["substeps"], damping_placement=c["damping"])


def experiment_motors() -> list[MotorSpec]:
    """Catalog motors closest to the hardware test rig (ratios ~0.9/1.9/3.7
    with the 48 kg*cm^2 rig load)."""
    return [motor_by_label(lbl) for lbl in defaults()["experiment"]["motor_labels"]]


def experiment_load_kgcm2() -> float:
    return defaults()["experiment"]["J_L_kgcm2"]
