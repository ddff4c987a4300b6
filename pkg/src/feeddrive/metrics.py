"""Composite tracking-performance index W.

W = 0.5 * max position error [mm] + 0.25 * max velocity error [mm/s]
  + 0.25 * velocity fluctuation [mm/s]

where the fluctuation term is the duration-weighted sum of per-segment
standard deviations of the velocity error, segmented by the motion phases.
Lower is better.  Diverged traces receive a penalty W that is strictly worse
than any finite run and orders partial progress.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .simulation import Trace

W_WEIGHTS = (0.5, 0.25, 0.25)

DIVERGENCE_PENALTY_BASE = 1e6


@dataclass(frozen=True)
class PerformanceIndex:
    """max_pos_err [mm], max_vel_err [mm/s], vel_fluct [mm/s], composite W."""

    max_pos_err: float
    max_vel_err: float
    vel_fluct: float
    W: float
    diverged: bool = False

    def to_csv(self) -> str:
        return ("max_pos_err_mm,max_vel_err_mms,vel_fluct,W\n"
                f"{self.max_pos_err:.9g},{self.max_vel_err:.9g},"
                f"{self.vel_fluct:.9g},{self.W:.9g}\n")


def composite(max_pos_err: float, max_vel_err: float, vel_fluct: float) -> float:
    """Weighted sum of the three components (0.5 / 0.25 / 0.25)."""
    return (W_WEIGHTS[0] * max_pos_err + W_WEIGHTS[1] * max_vel_err
            + W_WEIGHTS[2] * vel_fluct)


def errors(trace: Trace) -> tuple[np.ndarray, np.ndarray]:
    """Absolute position error [mm] and velocity error [mm/s] series."""
    if len(trace) == 0:
        raise ValueError("empty trace")
    err_p = np.abs(trace.pos_cmd - trace.pos_act) * 1e3
    err_v = np.abs(trace.vel_cmd - trace.vel_act) * 1e3
    return err_p, err_v


def velocity_fluctuation(err_v: np.ndarray, segment_marks, dt: float,
                         population: bool = True) -> float:
    """Duration-weighted sum of per-segment standard deviations of ``err_v``.

    Segment durations are sample counts times ``dt``; the weights sum to one
    over the available samples.  ``population`` picks divide-by-n deviations
    (default); single-sample segments contribute zero either way.  Marks
    extending past a truncated series are clipped.
    """
    n = err_v.shape[0]
    if n == 0:
        raise ValueError("empty error series")
    total = 0.0
    for _, start, end in segment_marks:
        if start >= n:
            continue
        end = min(end, n - 1)
        seg = err_v[start:end + 1]
        if seg.shape[0] < 2:
            std = 0.0
        else:
            std = float(np.std(seg, ddof=0 if population else 1))
        total += std * (seg.shape[0] / n)
    return total


def evaluate(trace: Trace, population: bool = True) -> PerformanceIndex:
    """Score a trace; diverged traces get the penalty W (see module docstring)."""
    err_p, err_v = errors(trace)
    max_p = float(np.max(err_p))
    max_v = float(np.max(err_v))
    fluct = velocity_fluctuation(err_v, trace.segment_marks, trace.dt, population)
    if trace.diverged:
        missing = 1.0 - len(trace) / trace.commanded_samples
        W = DIVERGENCE_PENALTY_BASE + missing * DIVERGENCE_PENALTY_BASE
    else:
        W = composite(max_p, max_v, fluct)
    return PerformanceIndex(max_p, max_v, fluct, W, trace.diverged)
