"""
Two-inertia plant behaviour
===========================

The motor rotor and the reflected load are joined by a torsional
spring-damper.  Three classic behaviours:

1. free oscillation of the shaft twist at sqrt(K*(J_m+J_L)/(J_m*J_L)),
2. rigid-body spin-up under constant torque when the shaft is stiffened,
3. monotone decay of mechanical energy under damping.

Run:  python3 demos/02_two_inertia_plant.py
Writes demos/output/two_inertia_plant.png
"""
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from feeddrive import presets
from feeddrive.plant import PlantParams, PlantState, mechanical_energy, step

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

params = presets.plant_params(presets.motor_catalog()[0])
print(f"motor 1 plant: J_m={params.J_m} kg*m^2  J_L={params.J_L} kg*m^2  "
      f"K={params.K_shaft} N*m/rad")
print(f"expected resonance: {params.natural_frequency():.1f} rad/s")

# ----------------------------------------------------------------------------
# 1) Free oscillation: release from a 1 mrad twist with (almost) no damping.
undamped = PlantParams(params.K_shaft, params.J_m, params.J_L, 1e-12,
                       params.R_trans, params.T_max)
dt = 1e-5
n = 5000
twist = np.empty(n)
s = PlantState(theta_m=1e-3)
for i in range(n):
    twist[i] = s.theta_m - s.theta_L
    s = step(undamped, s, 0.0, 0.0, dt)

# ----------------------------------------------------------------------------
# 2) Rigid limit: stiffen the shaft x1e6 and push 1 N*m; both speeds follow
#    the rigid-body ramp T*t/(J_m+J_L).
stiff = PlantParams(params.K_shaft * 1e6, params.J_m, params.J_L, params.B_damp,
                    params.R_trans, params.T_max)
dt_r = 2e-6
n_r = 50000
t_r = np.arange(n_r) * dt_r
omega_m = np.empty(n_r)
s = PlantState()
for i in range(n_r):
    omega_m[i] = s.omega_m
    s = step(stiff, s, 1.0, 0.0, dt_r)
print(f"rigid spin-up after 0.1 s: {s.omega_m:.4f} rad/s "
      f"(rigid body: {0.1 / (params.J_m + params.J_L):.4f})")

# ----------------------------------------------------------------------------
# 3) Energy decay with the catalog damping.
n_e = 20000
energy = np.empty(n_e)
s = PlantState(theta_m=1e-3, omega_m=1.0, omega_L=-1.0)
for i in range(n_e):
    energy[i] = mechanical_energy(params, s)
    s = step(params, s, 0.0, 0.0, dt)

fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
axes[0].plot(np.arange(n) * dt * 1e3, twist * 1e3)
axes[0].set_title("free twist oscillation")
axes[0].set_xlabel("time (ms)")
axes[0].set_ylabel("twist (mrad)")
axes[1].plot(t_r, omega_m, label="simulated")
axes[1].plot(t_r, t_r / (params.J_m + params.J_L), "--", label="rigid body")
axes[1].set_title("rigid-limit spin-up")
axes[1].set_xlabel("time (s)")
axes[1].set_ylabel("motor speed (rad/s)")
axes[1].legend()
axes[2].semilogy(np.arange(n_e) * dt, energy)
axes[2].set_title("energy decay under damping")
axes[2].set_xlabel("time (s)")
axes[2].set_ylabel("mechanical energy (J)")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "two_inertia_plant.png"), dpi=120)
print(f"wrote {OUT}/two_inertia_plant.png")
