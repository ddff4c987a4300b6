"""
Closed-loop tracking under the three published fixed gain sets
==============================================================

Wires command stream -> cascaded controller -> saturated plant -> feedback on
the largest catalog motor, and scores each run with the composite index
W = 0.5*max position error + 0.25*max velocity error + 0.25*velocity
fluctuation (mm / mm/s units).

Run:  python3 demos/03_closed_loop_tracking.py
Writes demos/output/closed_loop_tracking.png
"""
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from feeddrive import metrics, motion, presets, simulation

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

motor = presets.motor_catalog()[0]
params = presets.plant_params(motor)
sim_cfg = presets.sim_config()
cmds = motion.reciprocate(motion.plan(presets.motion_spec()), sim_cfg.Ts)
t = np.arange(len(cmds)) * sim_cfg.Ts

fig, (ax_p, ax_v) = plt.subplots(2, 1, sharex=True, figsize=(9, 6))
print(f"{'gains':>28s} {'maxEp(mm)':>10s} {'maxEv(mm/s)':>12s} {'fluct':>8s} {'W':>8s}")
for label, gains in zip(("set1", "set2", "set3"), presets.fixed_gain_sets()):
    trace = simulation.run(params, gains, cmds, sim_cfg)
    index = metrics.evaluate(trace)
    print(f"{label} {str(gains.as_tuple()):>22s} {index.max_pos_err:10.3f} "
          f"{index.max_vel_err:12.3f} {index.vel_fluct:8.3f} {index.W:8.3f}")
    ax_p.plot(t, (trace.pos_cmd - trace.pos_act) * 1e3, label=f"{label}, W={index.W:.1f}")
    ax_v.plot(t, (trace.vel_cmd - trace.vel_act) * 1e3, label=label)

ax_p.set_ylabel("position error (mm)")
ax_p.legend()
ax_v.set_ylabel("velocity error (mm/s)")
ax_v.set_xlabel("time (s)")
fig.suptitle(f"Tracking errors, {motor.label} (inertia ratio "
             f"{params.inertia_ratio:.2f})")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "closed_loop_tracking.png"), dpi=120)
print(f"wrote {OUT}/closed_loop_tracking.png")
