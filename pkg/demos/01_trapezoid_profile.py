"""
Trapezoidal motion planning and reciprocating command streams
=============================================================

Plans the standard 200 mm / 100 mm/s / 5 m/s^2 feed cycle, shows the phase
times, and samples a full out-and-back command stream.  A short move that
cannot reach the cruise speed falls back to a triangular profile.

Run:  python3 demos/01_trapezoid_profile.py
Writes demos/output/trapezoid_profile.png
"""
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from feeddrive import motion

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

# ----------------------------------------------------------------------------
# Plan the standard stroke.  The planner solves the three phase times from the
# distance, cruise speed and ramp acceleration; here the cruise speed is
# reachable, so we get the full trapezoid.
spec = motion.ProfileSpec.from_mm(distance_mm=200, speed_mm_s=100, accel_m_s2=5)
plan = motion.plan(spec)
print(f"standard stroke: t1={plan.t1} s  t2={plan.t2} s  t3={plan.t3} s  "
      f"v_peak={plan.v_peak} m/s")

# A 1 mm move at the same limits cannot reach 100 mm/s: triangular fallback.
short = motion.plan(motion.ProfileSpec.from_mm(1, 100, 5))
print(f"short stroke:    triangular={short.triangular}  "
      f"v_peak={short.v_peak * 1e3:.2f} mm/s  t3={short.t3 * 1e3:.2f} ms")

# ----------------------------------------------------------------------------
# Reciprocating command stream: forward stroke, immediate mirrored return.
# Segment marks tag the accel / cruise / decel phases of both strokes; the
# metrics module uses them to weight the velocity-fluctuation score.
cmds = motion.reciprocate(plan, dt=1e-3)
t = np.arange(len(cmds)) * cmds.dt
print(f"cycle: {len(cmds)} samples, {len(cmds.segment_marks)} segments, "
      f"peak position {cmds.pos_cmd.max() * 1e3:.0f} mm")

fig, (ax_v, ax_p) = plt.subplots(2, 1, sharex=True, figsize=(9, 6))
ax_v.plot(t, cmds.vel_cmd * 1e3)
ax_v.set_ylabel("velocity command (mm/s)")
for _, start, end in cmds.segment_marks:
    ax_v.axvspan(t[start], t[end], alpha=0.08, color="C1")
ax_p.plot(t, cmds.pos_cmd * 1e3)
ax_p.set_ylabel("position command (mm)")
ax_p.set_xlabel("time (s)")
fig.suptitle("Reciprocating trapezoidal cycle (segments shaded)")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "trapezoid_profile.png"), dpi=120)
print(f"wrote {OUT}/trapezoid_profile.png")
