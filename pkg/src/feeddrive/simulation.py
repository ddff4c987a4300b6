"""Closed-loop engine: command stream -> controller -> saturated plant -> feedback.

One control tick reads the table position/velocity, runs the controller,
clamps the torque and holds it while the plant advances ``substeps`` RK4
steps.  Runs are deterministic; a diverging plant truncates the trace and
flags it rather than raising, so unstable gain candidates stay rankable.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import motion
from ._kernel import run_closed_loop
from .controller import Gains
from .plant import PlantParams

DAMPING_PLACEMENTS = ("coupling", "load")


@dataclass(frozen=True)
class SimConfig:
    """Engine settings: control period, plant substeps per tick, damping placement."""

    Ts: float = 1e-3
    substeps: int = 10
    duration: float | None = None
    damping_placement: str = "coupling"

    def __post_init__(self):
        if not (math.isfinite(self.Ts) and self.Ts > 0):
            raise ValueError(f"Ts must be > 0, got {self.Ts}")
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")
        if self.duration is not None and self.duration <= 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")
        if self.damping_placement not in DAMPING_PLACEMENTS:
            raise ValueError(f"damping_placement must be one of {DAMPING_PLACEMENTS}")


@dataclass(frozen=True)
class Trace:
    """Uniformly sampled closed-loop time series.

    ``segment_marks`` are copied from the command stream and always describe
    the full commanded cycle; a truncated (diverged) trace is shorter than the
    range they cover.
    """

    dt: float
    t: np.ndarray
    pos_cmd: np.ndarray
    pos_act: np.ndarray
    vel_cmd: np.ndarray
    vel_act: np.ndarray
    torque: np.ndarray
    segment_marks: list[tuple[int, int, int]] = field(repr=False)
    diverged: bool = False

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def commanded_samples(self) -> int:
        """Length of the full commanded cycle (marks cover [0, n-1])."""
        return self.segment_marks[-1][2] + 1

    def to_csv(self, path_or_file) -> None:
        """Write `t,pos_cmd,pos_act,vel_cmd,vel_act,torque` rows, SI units, 9 sig digits."""
        if hasattr(path_or_file, "write"):
            self._write_csv(path_or_file)
        else:
            with open(path_or_file, "w", newline="") as f:
                self._write_csv(f)

    def _write_csv(self, f) -> None:
        f.write("t,pos_cmd,pos_act,vel_cmd,vel_act,torque\n")
        for i in range(len(self)):
            f.write(f"{self.t[i]:.9g},{self.pos_cmd[i]:.9g},{self.pos_act[i]:.9g},"
                    f"{self.vel_cmd[i]:.9g},{self.vel_act[i]:.9g},{self.torque[i]:.9g}\n")

    def csv_text(self) -> str:
        buf = io.StringIO()
        self._write_csv(buf)
        return buf.getvalue()


def resample(cmds: motion.CommandStream, Ts: float) -> motion.CommandStream:
    """Re-sample a command stream at period ``Ts`` analytically from its plan."""
    if Ts <= 0:
        raise ValueError(f"Ts must be > 0, got {Ts}")
    return motion.reciprocate(cmds.plan, Ts)


def run(p: PlantParams, g: Gains, cmds: motion.CommandStream, cfg: SimConfig = SimConfig()) -> Trace:
    """Run the closed loop over ``cmds``; the command period must equal cfg.Ts."""
    if cmds.dt != cfg.Ts:
        raise ValueError(f"command stream dt={cmds.dt} must equal cfg.Ts={cfg.Ts}; "
                         "resample() first")
    n = len(cmds)
    if cfg.duration is not None:
        n = int(round(cfg.duration / cfg.Ts)) + 1
    if n <= len(cmds):
        pos_cmd = np.ascontiguousarray(cmds.pos_cmd[:n])
        vel_cmd = np.ascontiguousarray(cmds.vel_cmd[:n])
    else:
        # duration past the cycle holds the final command (settling tail)
        pad = n - len(cmds)
        pos_cmd = np.concatenate([cmds.pos_cmd, np.full(pad, cmds.pos_cmd[-1])])
        vel_cmd = np.concatenate([cmds.vel_cmd, np.zeros(pad)])

    pos_act, vel_act, torque, n_valid = run_closed_loop(
        pos_cmd, vel_cmd,
        p.K_shaft, p.J_m, p.J_L, p.B_damp, p.R_trans, p.T_max,
        g.K_p, g.K_vp, g.K_vi, g.K_fv,
        cfg.Ts, cfg.substeps, cfg.damping_placement == "load")

    diverged = n_valid < n
    t = np.arange(n_valid) * cfg.Ts
    return Trace(cfg.Ts, t,
                 pos_cmd[:n_valid], pos_act[:n_valid],
                 vel_cmd[:n_valid], vel_act[:n_valid],
                 torque[:n_valid], list(cmds.segment_marks), diverged)


def reference_run(p: PlantParams, g: Gains, cmds: motion.CommandStream,
                  cfg: SimConfig = SimConfig()) -> Trace:
    """Pure-Python engine composed from controller/plant module functions.

    Semantically identical to :func:`run` (bitwise-equal traces); kept as the
    slow cross-check of the compiled kernel.
    """
    from . import controller, plant

    if cmds.dt != cfg.Ts:
        raise ValueError("command stream dt must equal cfg.Ts")
    n = len(cmds)
    on_load = cfg.damping_placement == "load"
    h = cfg.Ts / cfg.substeps
    state = plant.rest()
    cstate = controller.reset()
    pos_act = np.zeros(n)
    vel_act = np.zeros(n)
    torque = np.zeros(n)
    diverged = False
    n_valid = n
    for i in range(n):
        pos_act[i] = plant.table_position(p, state)
        vel_act[i] = plant.table_velocity(p, state)
        torque_cmd, cstate = controller.control_step(
            g, cmds.pos_cmd[i], cmds.vel_cmd[i], pos_act[i], vel_act[i],
            cstate, p.T_max, cfg.Ts)
        tau = plant.saturate(p, torque_cmd)
        torque[i] = tau
        try:
            for _ in range(cfg.substeps):
                state = plant.step(p, state, tau, 0.0, h, on_load)
        except plant.DivergenceError:
            diverged = True
            n_valid = i + 1
            break
    t = np.arange(n_valid) * cfg.Ts
    return Trace(cfg.Ts, t, np.array(cmds.pos_cmd[:n_valid]), pos_act[:n_valid],
                 np.array(cmds.vel_cmd[:n_valid]), vel_act[:n_valid],
                 torque[:n_valid], list(cmds.segment_marks), diverged)
