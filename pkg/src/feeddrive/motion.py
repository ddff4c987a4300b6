"""Trapezoidal velocity planning and command-stream generation.

A move of length ``distance`` is planned as accelerate / cruise / decelerate
with symmetric ramps.  When the cruise speed cannot be reached within the
distance the plan degenerates to a triangular profile.  All quantities are SI
(m, s); helpers are provided for the mm-based interfaces used by study
configs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MM = 1e-3  # metres per millimetre


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ProfileSpec:
    """Requested move: total distance [m], cruise speed [m/s], ramp accel [m/s^2]."""

    distance: float
    v_max: float
    a_max: float

    def __post_init__(self):
        d = _require_finite("distance", self.distance)
        v = _require_finite("v_max", self.v_max)
        a = _require_finite("a_max", self.a_max)
        if d < 0:
            raise ValueError(f"distance must be >= 0, got {d}")
        if v <= 0 or a <= 0:
            raise ValueError(f"v_max and a_max must be > 0, got {v}, {a}")

    @classmethod
    def from_mm(cls, distance_mm: float, speed_mm_s: float, accel_m_s2: float) -> "ProfileSpec":
        """Build a spec from mm / mm/s inputs (acceleration stays in m/s^2)."""
        return cls(distance_mm * MM, speed_mm_s * MM, accel_m_s2)


@dataclass(frozen=True)
class TrapezoidPlan:
    """Phase times of one stroke: ramp up ends at t1, cruise ends at t2, stop at t3."""

    t1: float
    t2: float
    t3: float
    v_peak: float
    a: float
    distance: float

    def __post_init__(self):
        if not (0.0 <= self.t1 <= self.t2 <= self.t3):
            raise ValueError(f"phase times must satisfy 0 <= t1 <= t2 <= t3: {self}")
        err = abs(self.covered_distance() - self.distance)
        if err > 1e-12:
            raise ValueError(f"plan does not close: distance error {err:.3e} m")

    def covered_distance(self) -> float:
        """s_a + s_u + s_d from the stored phase times (closure check)."""
        s_a = 0.5 * self.a * self.t1 ** 2
        s_u = self.v_peak * (self.t2 - self.t1)
        s_d = 0.5 * self.a * (self.t3 - self.t2) ** 2
        return s_a + s_u + s_d

    @property
    def triangular(self) -> bool:
        return self.t1 == self.t2

    def phase_boundaries(self) -> list[float]:
        """Boundary times of the non-empty phases, starting at 0."""
        bounds = [0.0]
        for t in (self.t1, self.t2, self.t3):
            if t > bounds[-1]:
                bounds.append(t)
        return bounds


def plan(spec: ProfileSpec) -> TrapezoidPlan:
    """Plan a single stroke for ``spec``.

    Returns the full trapezoid when ``distance >= v_max**2 / a_max`` (the peak
    speed is reachable), otherwise a triangular plan with
    ``v_peak = sqrt(a_max * distance)`` and no cruise phase.
    """
    d, v, a = spec.distance, spec.v_max, spec.a_max
    if d == 0.0:
        return TrapezoidPlan(0.0, 0.0, 0.0, 0.0, a, 0.0)
    if d >= v * v / a:
        t1 = v / a
        s_a = 0.5 * a * t1 ** 2
        s_u = d - 2.0 * s_a
        t2 = t1 + s_u / v
        return TrapezoidPlan(t1, t2, t2 + t1, v, a, d)
    v_peak = math.sqrt(a * d)
    t1 = v_peak / a
    return TrapezoidPlan(t1, t1, 2.0 * t1, v_peak, a, d)


def sample(p: TrapezoidPlan, t: float) -> tuple[float, float, float]:
    """Evaluate (position, velocity, acceleration) of the stroke at time ``t``.

    Velocity is continuous piecewise linear and position its exact analytic
    integral; times past ``t3`` hold the terminal position at rest.
    """
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"sample time must be finite, got {t!r}")
    if t < 0.0:
        raise ValueError(f"sample time must be >= 0, got {t}")
    if t < p.t1:
        return 0.5 * p.a * t * t, p.a * t, p.a
    s_a = 0.5 * p.a * p.t1 ** 2
    if t < p.t2:
        return s_a + p.v_peak * (t - p.t1), p.v_peak, 0.0
    s_u = p.v_peak * (p.t2 - p.t1)
    if t < p.t3:
        tau = t - p.t2
        return (s_a + s_u + p.v_peak * tau - 0.5 * p.a * tau * tau,
                p.v_peak - p.a * tau, -p.a)
    return p.distance, 0.0, 0.0


def sample_array(p: TrapezoidPlan, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`sample` over a time array (same piecewise arithmetic)."""
    t = np.asarray(t, dtype=float)
    pos = np.full(t.shape, p.distance)
    vel = np.zeros(t.shape)
    acc = np.zeros(t.shape)
    s_a = 0.5 * p.a * p.t1 ** 2
    s_u = p.v_peak * (p.t2 - p.t1)

    m = t < p.t1
    pos[m] = 0.5 * p.a * t[m] * t[m]
    vel[m] = p.a * t[m]
    acc[m] = p.a

    m = (t >= p.t1) & (t < p.t2)
    pos[m] = s_a + p.v_peak * (t[m] - p.t1)
    vel[m] = p.v_peak

    m = (t >= p.t2) & (t < p.t3)
    tau = t[m] - p.t2
    pos[m] = s_a + s_u + p.v_peak * tau - 0.5 * p.a * tau * tau
    vel[m] = p.v_peak - p.a * tau
    acc[m] = -p.a
    return pos, vel, acc


@dataclass(frozen=True)
class CommandStream:
    """Uniformly sampled position/velocity/acceleration commands for one cycle.

    ``segment_marks`` lists ``(segment index, first sample, last sample)``
    triples that tile ``[0, n-1]`` with no gaps; segments follow the motion
    phases (accel / cruise / decel per stroke direction).
    """

    dt: float
    pos_cmd: np.ndarray
    vel_cmd: np.ndarray
    acc_cmd: np.ndarray
    segment_marks: list[tuple[int, int, int]]
    plan: TrapezoidPlan = field(repr=False)

    def __len__(self) -> int:
        return self.pos_cmd.shape[0]


def reciprocate(p: TrapezoidPlan, dt: float) -> CommandStream:
    """Sample a full out-and-back cycle: 0 -> distance -> 0, no dwell.

    The return stroke mirrors the forward stroke in position
    (``pos(t_turn + tau) = distance - pos(tau)``), so the strokes are
    complementary: ``pos(t) + pos(t + t_turn) = distance`` at every sample.
    Requires at least one sample per ramp phase (``dt <= t1``, or
    ``dt <= t3/2`` for triangular plans).
    """
    dt = float(dt)
    if not math.isfinite(dt) or dt <= 0.0:
        raise ValueError(f"dt must be positive and finite, got {dt!r}")
    shortest = p.t1 if not p.triangular else p.t3 / 2.0
    if dt > shortest:
        raise ValueError(
            f"dt={dt} too coarse for the shortest phase ({shortest} s); "
            "no sample would land in every phase")

    # Turnaround at the first sample at or past t3, so the peak position
    # `distance` is always hit exactly (sample() holds the terminal state).
    i_turn = int(math.ceil(p.t3 / dt - 1e-9))
    n = 2 * i_turn + 1
    t = np.arange(n) * dt

    fwd_pos, fwd_vel, fwd_acc = sample_array(p, t[: i_turn + 1])
    ret_pos = p.distance - fwd_pos[1:]
    ret_vel = -fwd_vel[1:]
    ret_acc = -fwd_acc[1:]
    pos = np.concatenate([fwd_pos, ret_pos])
    vel = np.concatenate([fwd_vel, ret_vel])
    acc = np.concatenate([fwd_acc, ret_acc])

    t_turn = i_turn * dt
    interior = p.phase_boundaries()[1:-1]
    cycle_bounds = ([0.0] + interior + [t_turn]
                    + [t_turn + b for b in interior] + [2.0 * t_turn])
    marks: list[tuple[int, int, int]] = []
    seg = 0
    for k in range(len(cycle_bounds) - 1):
        start = 0 if k == 0 else int(math.ceil(cycle_bounds[k] / dt - 1e-9))
        end = n - 1 if k == len(cycle_bounds) - 2 else int(math.ceil(cycle_bounds[k + 1] / dt - 1e-9)) - 1
        if end < start:
            continue  # phase shorter than one sample period
        marks.append((seg, start, end))
        seg += 1

    return CommandStream(dt, pos, vel, acc, marks, p)
