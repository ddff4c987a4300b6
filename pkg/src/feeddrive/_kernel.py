"""Compiled closed-loop inner loop.

This mirrors ``controller.control_step`` and ``plant.step`` operation for
operation (same expressions, same evaluation order) so that a trace produced
here is bitwise identical to one produced by composing those functions in
Python; the sweep and optimizer workloads run thousands of closed-loop
simulations and need the compiled path.  ``tests/test_simulation.py`` checks
the equivalence.
"""
from __future__ import annotations

import numpy as np
from numba import njit

DIVERGENCE_LIMIT = 1e9


@njit(cache=True)
def run_closed_loop(pos_cmd, vel_cmd,
                    K_shaft, J_m, J_L, B_damp, R_trans, T_max,
                    K_p, K_vp, K_vi, K_fv,
                    Ts, substeps, damping_on_load):
    """Simulate the full loop over the command arrays.

    Returns (pos_act, vel_act, torque, n_valid); n_valid < len(pos_cmd) means
    the plant diverged during tick n_valid - 1 and the series are only
    meaningful up to there.
    """
    n = pos_cmd.shape[0]
    pos_act = np.zeros(n)
    vel_act = np.zeros(n)
    torque_out = np.zeros(n)

    theta_m = 0.0
    omega_m = 0.0
    theta_L = 0.0
    omega_L = 0.0
    integ = 0.0

    dt = Ts / substeps
    h2 = 0.5 * dt
    w = dt / 6.0

    for i in range(n):
        pos_fb = R_trans * theta_L
        vel_fb = R_trans * omega_L
        pos_act[i] = pos_fb
        vel_act[i] = vel_fb

        # controller.control_step
        vel_ref = K_p * (pos_cmd[i] - pos_fb) + K_fv * vel_cmd[i]
        e_v = vel_ref - vel_fb
        integ_new = integ + e_v * Ts
        torque_raw = K_vp * e_v + K_vi * integ_new
        torque_cmd = min(max(torque_raw, -T_max), T_max)
        windup = (torque_raw > T_max and e_v > 0.0) or (torque_raw < -T_max and e_v < 0.0)
        if not windup:
            integ = integ_new
        # plant.saturate (idempotent after the controller clamp)
        torque = min(max(torque_cmd, -T_max), T_max)
        torque_out[i] = torque

        # plant.step x substeps, zero-order-held torque, zero disturbance
        for _ in range(substeps):
            if damping_on_load:
                tw = K_shaft * (theta_m - theta_L)
                a1 = omega_m
                b1 = (torque - tw) / J_m
                c1 = omega_L
                d1 = (tw - B_damp * omega_L - 0.0) / J_L
                tm = theta_m + h2 * a1
                wm = omega_m + h2 * b1
                tl = theta_L + h2 * c1
                wl = omega_L + h2 * d1
                tw = K_shaft * (tm - tl)
                a2 = wm
                b2 = (torque - tw) / J_m
                c2 = wl
                d2 = (tw - B_damp * wl - 0.0) / J_L
                tm = theta_m + h2 * a2
                wm = omega_m + h2 * b2
                tl = theta_L + h2 * c2
                wl = omega_L + h2 * d2
                tw = K_shaft * (tm - tl)
                a3 = wm
                b3 = (torque - tw) / J_m
                c3 = wl
                d3 = (tw - B_damp * wl - 0.0) / J_L
                tm = theta_m + dt * a3
                wm = omega_m + dt * b3
                tl = theta_L + dt * c3
                wl = omega_L + dt * d3
                tw = K_shaft * (tm - tl)
                a4 = wm
                b4 = (torque - tw) / J_m
                c4 = wl
                d4 = (tw - B_damp * wl - 0.0) / J_L
            else:
                tw = K_shaft * (theta_m - theta_L) + B_damp * (omega_m - omega_L)
                a1 = omega_m
                b1 = (torque - tw) / J_m
                c1 = omega_L
                d1 = (tw - 0.0) / J_L
                tm = theta_m + h2 * a1
                wm = omega_m + h2 * b1
                tl = theta_L + h2 * c1
                wl = omega_L + h2 * d1
                tw = K_shaft * (tm - tl) + B_damp * (wm - wl)
                a2 = wm
                b2 = (torque - tw) / J_m
                c2 = wl
                d2 = (tw - 0.0) / J_L
                tm = theta_m + h2 * a2
                wm = omega_m + h2 * b2
                tl = theta_L + h2 * c2
                wl = omega_L + h2 * d2
                tw = K_shaft * (tm - tl) + B_damp * (wm - wl)
                a3 = wm
                b3 = (torque - tw) / J_m
                c3 = wl
                d3 = (tw - 0.0) / J_L
                tm = theta_m + dt * a3
                wm = omega_m + dt * b3
                tl = theta_L + dt * c3
                wl = omega_L + dt * d3
                tw = K_shaft * (tm - tl) + B_damp * (wm - wl)
                a4 = wm
                b4 = (torque - tw) / J_m
                c4 = wl
                d4 = (tw - 0.0) / J_L

            theta_m = theta_m + w * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            omega_m = omega_m + w * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            theta_L = theta_L + w * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
            omega_L = omega_L + w * (d1 + 2.0 * d2 + 2.0 * d3 + d4)

            if (abs(theta_m) > DIVERGENCE_LIMIT or abs(omega_m) > DIVERGENCE_LIMIT
                    or abs(theta_L) > DIVERGENCE_LIMIT or abs(omega_L) > DIVERGENCE_LIMIT):
                return pos_act, vel_act, torque_out, i + 1

    return pos_act, vel_act, torque_out, n
