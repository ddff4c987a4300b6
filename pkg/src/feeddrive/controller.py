"""Discrete cascaded servo controller: P position loop, PI velocity loop,
velocity feedforward.

Feedback is the table-side linear position and velocity; the output is a
torque command in N*m, clamped to the drive limit with conditional-integration
anti-windup.  Gains act on SI linear units, so K_vp carries N*m*s/m and
K_vi N*m/m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Gains:
    """The four servo parameters: K_p [1/s], K_vp [N*m*s/m], K_vi [N*m/m], K_fv [-]."""

    K_p: float
    K_vp: float
    K_vi: float
    K_fv: float

    def __post_init__(self):
        for name in ("K_p", "K_vp", "K_vi", "K_fv"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.K_p, self.K_vp, self.K_vi, self.K_fv)

    @classmethod
    def from_sequence(cls, values) -> "Gains":
        K_p, K_vp, K_vi, K_fv = (float(v) for v in values)
        return cls(K_p, K_vp, K_vi, K_fv)


GAIN_NAMES = ("K_p", "K_vp", "K_vi", "K_fv")


@dataclass(frozen=True)
class GainBounds:
    """Box bounds per gain, (lo, hi) each."""

    K_p: tuple[float, float] = (0.0, 200.0)
    K_vp: tuple[float, float] = (0.0, 5.0)
    K_vi: tuple[float, float] = (0.0, 20.0)
    K_fv: tuple[float, float] = (0.5, 1.0)

    def __post_init__(self):
        for name in GAIN_NAMES:
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"{name} bounds must satisfy lo <= hi, got ({lo}, {hi})")

    def as_pairs(self) -> list[tuple[float, float]]:
        return [tuple(getattr(self, name)) for name in GAIN_NAMES]

    def contains(self, g: Gains, tol: float = 0.0) -> bool:
        return all(lo - tol <= v <= hi + tol
                   for (lo, hi), v in zip(self.as_pairs(), g.as_tuple()))


@dataclass(frozen=True)
class ControllerState:
    """Velocity-error integral [m] and the last issued torque command [N*m]."""

    integ: float = 0.0
    torque_cmd: float = 0.0


def reset() -> ControllerState:
    """Fresh controller state: zero integrator, zero last torque."""
    return ControllerState()


def control_step(g: Gains, pos_cmd: float, vel_cmd: float, pos_fb: float, vel_fb: float,
                 st: ControllerState, T_max: float, Ts: float) -> tuple[float, ControllerState]:
    """One control period: returns (torque command, next state).

    vel_ref = K_p*(pos_cmd - pos_fb) + K_fv*vel_cmd, the velocity loop is PI
    on vel_ref - vel_fb with rectangular integration at Ts, and the torque is
    clamped to +-T_max.  When the clamp is active and the velocity error keeps
    pushing into it, the integrator holds (conditional integration).
    """
    if Ts <= 0:
        raise ValueError(f"Ts must be > 0, got {Ts}")
    vel_ref = g.K_p * (pos_cmd - pos_fb) + g.K_fv * vel_cmd
    e_v = vel_ref - vel_fb
    integ_new = st.integ + e_v * Ts
    torque_raw = g.K_vp * e_v + g.K_vi * integ_new
    torque_cmd = min(max(torque_raw, -T_max), T_max)
    windup = (torque_raw > T_max and e_v > 0.0) or (torque_raw < -T_max and e_v < 0.0)
    integ = st.integ if windup else integ_new
    return torque_cmd, ControllerState(integ, torque_cmd)
