"""
Fireworks algorithm vs binary genetic algorithm
===============================================

Both optimizers run the published budgets (50 generations; 20 explosion + 5
mutation sparks from 6 fireworks vs a 20-chromosome, 10-bit GA) on the 4-D
sphere, then on the real servo-tuning objective for one motor with a reduced
budget so the demo stays quick.  The repro CLI (`feeddrive repro fig5-3`) runs
the full six-trial stability comparison.

Run:  python3 demos/04_fireworks_vs_ga.py
Writes demos/output/fireworks_vs_ga.png
"""
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from feeddrive import motion, presets, study
from feeddrive.optimize import FwaConfig, GaConfig, fwa_minimize, ga_minimize

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

# ----------------------------------------------------------------------------
# Benchmark objective: the 4-D sphere on [-5, 5]^4.
def sphere(x):
    return float(np.sum(x * x))

bounds = [(-5.0, 5.0)] * 4
fwa = fwa_minimize(sphere, bounds, FwaConfig(seed=0))
ga = ga_minimize(sphere, bounds, GaConfig(seed=0))
print(f"sphere: FWA best {fwa.best_W:.3e} ({fwa.evaluations} evals), "
      f"GA best {ga.best_W:.3e} ({ga.evaluations} evals)")

# ----------------------------------------------------------------------------
# Servo objective: tune the four gains for the mid-catalog motor.  Reduced
# budget (15 generations) keeps this around ten seconds.
motor = presets.motor_catalog()[2]
params = presets.plant_params(motor)
sim_cfg = presets.sim_config()
cmds = motion.reciprocate(motion.plan(presets.motion_spec()), sim_cfg.Ts)
objective = study.make_objective(params, cmds, sim_cfg)
servo_bounds = presets.gain_bounds()

fwa_servo = fwa_minimize(objective, servo_bounds, FwaConfig(seed=0, generations=15))
ga_servo = ga_minimize(objective, servo_bounds, GaConfig(seed=0, generations=15))
print(f"servo ({motor.label}): FWA best W {fwa_servo.best_W:.2f} "
      f"gains {np.round(fwa_servo.best_params, 3)}")
print(f"servo ({motor.label}): GA  best W {ga_servo.best_W:.2f} "
      f"gains {np.round(ga_servo.best_params, 3)}")

fig, (ax_s, ax_w) = plt.subplots(1, 2, figsize=(10, 4))
ax_s.semilogy(fwa.history, label="fireworks")
ax_s.semilogy(ga.history, label="genetic")
ax_s.set_title("4-D sphere")
ax_s.set_xlabel("generation")
ax_s.set_ylabel("best value")
ax_s.legend()
ax_w.plot(fwa_servo.history, label="fireworks")
ax_w.plot(ga_servo.history, label="genetic")
ax_w.set_title(f"servo tuning, {motor.label}")
ax_w.set_xlabel("generation")
ax_w.set_ylabel("best W")
ax_w.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "fireworks_vs_ga.png"), dpi=120)
print(f"wrote {OUT}/fireworks_vs_ga.png")
