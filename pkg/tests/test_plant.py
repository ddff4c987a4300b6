"""Two-inertia plant: derivatives, RK4 stepping, saturation, unit maps."""

import math

import numpy as np
import pytest

from feeddrive import plant, presets
from feeddrive.plant import (DivergenceError, PlantParams, PlantState, derivative,
                             mechanical_energy, saturate, step, table_position,
                             table_velocity)

MOTOR1 = presets.plant_params(presets.motor_catalog()[0])
MOTOR6 = presets.plant_params(presets.motor_catalog()[5])


class TestParams:
    def test_catalog_inertia_ratios(self):
        # ratios r = J_L / J_m must match the published rounded column
        expected = [0.5, 0.8, 1.8, 2.4, 3.5, 4.1]
        for motor, r in zip(presets.motor_catalog(), expected):
            ratio = presets.plant_params(motor).inertia_ratio
            assert round(ratio, 1) == r

    def test_catalog_exact_ratios(self):
        ratios = [presets.plant_params(m).inertia_ratio for m in presets.motor_catalog()]
        expected = [45.5 / 88.9, 45.5 / 55.0, 45.5 / 25.5, 45.5 / 19.3, 45.5 / 13.0,
                    45.5 / 11.01]
        assert ratios == pytest.approx(expected, rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            PlantParams(0.0, 1e-3, 1e-3, 1e-2, 1e-3, 10.0)
        with pytest.raises(ValueError):
            PlantParams(612.0, -1e-3, 1e-3, 1e-2, 1e-3, 10.0)
        with pytest.raises(ValueError):
            PlantParams(612.0, 1e-3, 1e-3, 1e-2, 1e-3, float("inf"))

    def test_transmission_coefficient(self):
        # 10 mm lead: one screw turn advances the table by the lead
        assert MOTOR1.R_trans == pytest.approx(10e-3 / (2 * math.pi), rel=1e-12)


class TestDerivative:
    def test_equilibrium(self):
        assert derivative(MOTOR1, PlantState(), 0.0) == (0.0, 0.0, 0.0, 0.0)

    def test_torque_on_motor_inertia(self):
        # J_m = 88.9 kg*cm^2 = 8.89e-3 kg*m^2 -> 1 N*m gives 112.49 rad/s^2
        rates = derivative(MOTOR1, PlantState(), 1.0)
        assert rates[1] == pytest.approx(112.4859392, abs=1e-6)
        assert rates[3] == 0.0

    def test_shaft_twist_drives_load(self):
        # K = 612 N*m/rad, J_L = 4.55e-3 kg*m^2
        s = PlantState(theta_m=1e-3)
        rates = derivative(MOTOR1, s, 0.0)
        assert rates[3] == pytest.approx(612e-3 / 4.55e-3, abs=1e-6)
        assert rates[1] == pytest.approx(-612e-3 / 8.89e-3, abs=1e-6)

    def test_disturbance_loads_table_side(self):
        rates = derivative(MOTOR1, PlantState(), 0.0, disturbance=1.0)
        assert rates[3] == pytest.approx(-1.0 / MOTOR1.J_L, rel=1e-12)
        assert rates[1] == 0.0

    def test_load_damping_placement(self):
        s = PlantState(omega_m=1.0, omega_L=2.0)
        coupling = derivative(MOTOR1, s, 0.0, damping_on_load=False)
        on_load = derivative(MOTOR1, s, 0.0, damping_on_load=True)
        # coupling damping reacts on the motor side; load damping does not
        assert coupling[1] != on_load[1]
        assert on_load[1] == 0.0
        assert on_load[3] == pytest.approx(-MOTOR1.B_damp * 2.0 / MOTOR1.J_L, rel=1e-12)


class TestSaturate:
    def test_clamps_catalog_limits(self):
        assert saturate(MOTOR1, 100.0) == 71.1
        assert saturate(MOTOR6, -20.0) == -9.6
        assert saturate(MOTOR1, 0.0) == 0.0

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        for x in rng.uniform(-500.0, 500.0, size=200):
            once = saturate(MOTOR1, float(x))
            assert saturate(MOTOR1, once) == once
            assert abs(once) <= MOTOR1.T_max


class TestStep:
    def test_rest_stays_at_rest(self):
        s = step(MOTOR1, PlantState(), 0.0, 0.0, 1e-4)
        assert s == PlantState()

    def test_rigid_limit_matches_rigid_body(self):
        # K scaled x1e6 makes the shaft effectively rigid; constant torque then
        # spins both inertias up like one body: omega = T*t/(J_m+J_L)
        stiff = PlantParams(MOTOR1.K_shaft * 1e6, MOTOR1.J_m, MOTOR1.J_L,
                            MOTOR1.B_damp, MOTOR1.R_trans, MOTOR1.T_max)
        dt = 2e-6  # the stiffened resonance needs a fine step
        s = PlantState()
        for _ in range(int(round(0.1 / dt))):
            s = step(stiff, s, 1.0, 0.0, dt)
        expected = 1.0 * 0.1 / (MOTOR1.J_m + MOTOR1.J_L)
        assert s.omega_m == pytest.approx(expected, rel=1e-3)
        assert s.omega_L == pytest.approx(expected, rel=1e-3)

    def test_free_oscillation_frequency(self):
        # undamped twist oscillates at sqrt(K*(J_m+J_L)/(J_m*J_L)); measured by
        # interpolated zero crossings of theta_m - theta_L
        undamped = PlantParams(MOTOR1.K_shaft, MOTOR1.J_m, MOTOR1.J_L,
                               1e-12, MOTOR1.R_trans, MOTOR1.T_max)
        dt = 1e-5
        n = int(round(0.5 / dt))
        s = PlantState(theta_m=1e-3)
        twist = np.empty(n)
        for i in range(n):
            twist[i] = s.theta_m - s.theta_L
            s = step(undamped, s, 0.0, 0.0, dt)
        crossings = []
        for i in range(1, n):
            if twist[i - 1] < 0.0 <= twist[i]:
                frac = -twist[i - 1] / (twist[i] - twist[i - 1])
                crossings.append((i - 1 + frac) * dt)
        omega = 2.0 * math.pi * (len(crossings) - 1) / (crossings[-1] - crossings[0])
        expected = MOTOR1.natural_frequency()
        assert expected == pytest.approx(450.94, abs=0.01)
        assert omega == pytest.approx(expected, rel=0.01)

    def test_step_size_convergence(self):
        # 1 s forced run: end theta_L at dt=1e-4 vs dt=1e-5 differs < 1e-6 rad
        ends = []
        for dt in (1e-4, 1e-5):
            s = PlantState()
            for _ in range(int(round(1.0 / dt))):
                s = step(MOTOR1, s, 0.5, 0.0, dt)
            ends.append(s.theta_L)
        assert abs(ends[0] - ends[1]) < 1e-6

    def test_energy_nonincreasing_without_input(self):
        rng = np.random.default_rng(11)
        checks = 0
        while checks < 1000:
            s = PlantState(float(rng.uniform(-0.01, 0.01)), float(rng.uniform(-5, 5)),
                           float(rng.uniform(-0.01, 0.01)), float(rng.uniform(-5, 5)))
            for _ in range(10):
                e0 = mechanical_energy(MOTOR1, s)
                s = step(MOTOR1, s, 0.0, 0.0, 1e-4)
                e1 = mechanical_energy(MOTOR1, s)
                assert e1 <= e0 + 1e-9 * max(e0, 1e-30)
                checks += 1

    def test_divergence_detected(self):
        # a step far beyond the RK4 stability limit of the resonance blows up
        s = PlantState(theta_m=1.0)
        with pytest.raises(DivergenceError):
            for _ in range(200):
                s = step(MOTOR1, s, 0.0, 0.0, 0.5)

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            step(MOTOR1, PlantState(), 0.0, 0.0, 0.0)


class TestTableMaps:
    def test_one_turn_is_one_lead(self):
        s = PlantState(theta_L=2.0 * math.pi)
        assert table_position(MOTOR1, s) == pytest.approx(0.010, rel=1e-12)

    def test_zero(self):
        assert table_position(MOTOR1, PlantState()) == 0.0
        assert table_velocity(MOTOR1, PlantState()) == 0.0

    def test_velocity_map(self):
        s = PlantState(omega_L=62.832)
        assert table_velocity(MOTOR1, s) == pytest.approx(0.1, rel=1e-4)
