"""Lumped two-inertia model of the motor / screw / table chain.

The motor rotor (J_m) and the load reflected to the screw (J_L) are joined
by a torsional spring K_shaft with viscous damping B_damp acting across the
coupling (optionally on the load side instead).  Table motion is the screw
angle scaled by the transmission coefficient R_trans.  Integration is
classical fixed-step RK4 with the drive torque held constant over the step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

DIVERGENCE_LIMIT = 1e9

KG_CM2 = 1e-4  # kg*m^2 per kg*cm^2


class DivergenceError(RuntimeError):
    """Raised when an integration step produces a state beyond the divergence limit."""


@dataclass(frozen=True)
class MotorSpec:
    """One servo motor catalog entry: torque limit [N*m] and rotor inertia [kg*m^2]."""

    label: str
    T_max: float
    J_m: float

    def __post_init__(self):
        if not (self.T_max > 0 and math.isfinite(self.T_max)):
            raise ValueError(f"T_max must be > 0, got {self.T_max}")
        if not (self.J_m > 0 and math.isfinite(self.J_m)):
            raise ValueError(f"J_m must be > 0, got {self.J_m}")

    @classmethod
    def from_catalog(cls, label: str, T_max: float, J_m_kgcm2: float) -> "MotorSpec":
        """Catalog rows list rotor inertia in kg*cm^2."""
        return cls(label, T_max, J_m_kgcm2 * KG_CM2)


@dataclass(frozen=True)
class PlantParams:
    """Mechanical constants of one motor + screw + table configuration.

    K_shaft  torsional stiffness of the screw coupling [N*m/rad]
    J_m      motor rotor inertia [kg*m^2]
    J_L      load inertia reflected to the screw [kg*m^2]
    B_damp   viscous damping [N*m*s/rad]
    R_trans  screw rotation to table translation gain [m/rad]
    T_max    drive torque limit [N*m]
    """

    K_shaft: float
    J_m: float
    J_L: float
    B_damp: float
    R_trans: float
    T_max: float

    def __post_init__(self):
        for name in ("K_shaft", "J_m", "J_L", "B_damp", "R_trans", "T_max"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def inertia_ratio(self) -> float:
        return self.J_L / self.J_m

    def natural_frequency(self) -> float:
        """Free two-inertia oscillation frequency sqrt(K*(J_m+J_L)/(J_m*J_L)) [rad/s]."""
        return math.sqrt(self.K_shaft * (self.J_m + self.J_L) / (self.J_m * self.J_L))


@dataclass(frozen=True)
class PlantState:
    """Motor angle/speed and load-side screw angle/speed [rad, rad/s]."""

    theta_m: float = 0.0
    omega_m: float = 0.0
    theta_L: float = 0.0
    omega_L: float = 0.0


def rest() -> PlantState:
    return PlantState()


def derivative(p: PlantParams, s: PlantState, torque: float, disturbance: float = 0.0,
               damping_on_load: bool = False) -> tuple[float, float, float, float]:
    """State rate (theta_m', omega_m', theta_L', omega_L').

    With coupling damping (default) the shaft transmits
    ``K*(theta_m - theta_L) + B*(omega_m - omega_L)``; with ``damping_on_load``
    the damper acts on the load speed alone.  ``disturbance`` is a torque on
    the load inertia.
    """
    if damping_on_load:
        tw = p.K_shaft * (s.theta_m - s.theta_L)
        return (s.omega_m,
                (torque - tw) / p.J_m,
                s.omega_L,
                (tw - p.B_damp * s.omega_L - disturbance) / p.J_L)
    tw = p.K_shaft * (s.theta_m - s.theta_L) + p.B_damp * (s.omega_m - s.omega_L)
    return (s.omega_m,
            (torque - tw) / p.J_m,
            s.omega_L,
            (tw - disturbance) / p.J_L)


def saturate(p: PlantParams, torque_cmd: float) -> float:
    """Clamp a torque command to the drive limit [-T_max, +T_max]."""
    return min(max(torque_cmd, -p.T_max), p.T_max)


def step(p: PlantParams, s: PlantState, torque: float, disturbance: float, dt: float,
         damping_on_load: bool = False) -> PlantState:
    """Advance the plant one RK4 step of size ``dt`` under constant torque.

    Raises :class:`DivergenceError` if any state component exceeds
    ``DIVERGENCE_LIMIT`` in magnitude afterwards.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    h2 = 0.5 * dt
    a1, b1, c1, d1 = derivative(p, s, torque, disturbance, damping_on_load)
    s2 = PlantState(s.theta_m + h2 * a1, s.omega_m + h2 * b1,
                    s.theta_L + h2 * c1, s.omega_L + h2 * d1)
    a2, b2, c2, d2 = derivative(p, s2, torque, disturbance, damping_on_load)
    s3 = PlantState(s.theta_m + h2 * a2, s.omega_m + h2 * b2,
                    s.theta_L + h2 * c2, s.omega_L + h2 * d2)
    a3, b3, c3, d3 = derivative(p, s3, torque, disturbance, damping_on_load)
    s4 = PlantState(s.theta_m + dt * a3, s.omega_m + dt * b3,
                    s.theta_L + dt * c3, s.omega_L + dt * d3)
    a4, b4, c4, d4 = derivative(p, s4, torque, disturbance, damping_on_load)
    w = dt / 6.0
    out = PlantState(s.theta_m + w * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
                     s.omega_m + w * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
                     s.theta_L + w * (c1 + 2.0 * c2 + 2.0 * c3 + c4),
                     s.omega_L + w * (d1 + 2.0 * d2 + 2.0 * d3 + d4))
    if (abs(out.theta_m) > DIVERGENCE_LIMIT or abs(out.omega_m) > DIVERGENCE_LIMIT
            or abs(out.theta_L) > DIVERGENCE_LIMIT or abs(out.omega_L) > DIVERGENCE_LIMIT):
        raise DivergenceError(f"plant state diverged beyond {DIVERGENCE_LIMIT:g}")
    return out


def table_position(p: PlantParams, s: PlantState) -> float:
    """Table position x = R_trans * theta_L [m]."""
    return p.R_trans * s.theta_L


def table_velocity(p: PlantParams, s: PlantState) -> float:
    """Table velocity v = R_trans * omega_L [m/s]."""
    return p.R_trans * s.omega_L


def mechanical_energy(p: PlantParams, s: PlantState) -> float:
    """Kinetic plus shaft strain energy [J]; decays under damping with no input."""
    twist = s.theta_m - s.theta_L
    return (0.5 * p.J_m * s.omega_m ** 2 + 0.5 * p.J_L * s.omega_L ** 2
            + 0.5 * p.K_shaft * twist ** 2)
