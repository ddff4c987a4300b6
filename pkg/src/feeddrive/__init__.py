"""Deterministic closed-loop simulation of a ball-screw servo feed drive with
evolutionary control-parameter optimization for gain-decoupling studies."""

from .controller import ControllerState, GainBounds, Gains, control_step, reset
from .metrics import PerformanceIndex, composite, errors, evaluate, velocity_fluctuation
from .motion import CommandStream, ProfileSpec, TrapezoidPlan, plan, reciprocate, sample
from .optimize import (FwaConfig, GaConfig, OptResult, StabilityResult, fwa_minimize,
                       ga_minimize, stability_trial)
from .plant import (DivergenceError, MotorSpec, PlantParams, PlantState, derivative,
                    saturate, step, table_position, table_velocity)
from .simulation import SimConfig, Trace, resample, run
from .study import SweepResult, SweepRow, decoupled_sweep, fixed_gain_sweep, motion_sweep

__version__ = "0.1.0"

__all__ = [
    "CommandStream", "ControllerState", "DivergenceError", "FwaConfig", "GaConfig",
    "GainBounds", "Gains", "MotorSpec", "OptResult", "PerformanceIndex", "PlantParams",
    "PlantState", "ProfileSpec", "SimConfig", "StabilityResult", "SweepResult",
    "SweepRow", "Trace", "TrapezoidPlan", "composite", "control_step", "decoupled_sweep",
    "derivative", "errors", "evaluate", "fixed_gain_sweep", "fwa_minimize", "ga_minimize",
    "motion_sweep", "plan", "reciprocate", "resample", "reset", "run", "sample",
    "saturate", "stability_trial", "step", "table_position", "table_velocity",
    "velocity_fluctuation",
]
