import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folding_assembly.config import ScenarioConfig
from folding_assembly.controller import CommandTwist, Phase
from folding_assembly.kinetostatics import ContactMode
from folding_assembly.simulator import (
    ContactInstabilityError,
    ContactParams,
    RodModel,
    RunStatus,
    SensorModel,
    SurfaceModel,
    World,
    WrenchSensor,
    initial_state,
    normal_force,
    physics_step,
    rod_pose_at_contact,
    run_loop,
    sense_wrench,
)
from folding_assembly.spatial_math import Pose, Twist

from conftest import cross_oracle

EZ = np.array([0.0, 0.0, 1.0])
DT = 1e-3


def make(world=None, s0=0.08, theta0=-1.0, depth=0.0):
    world = world or World()
    pose1 = rod_pose_at_contact(world.rod, world.surface, s0, theta0, depth)
    return world, initial_state(world, pose1, Pose(np.zeros(3)))


def cmd(v=(0, 0, 0), w=(0, 0, 0)):
    return CommandTwist(Twist(np.array(v, float), np.array(w, float)))


def run(state, world, command, steps):
    for _ in range(steps):
        state = physics_step(state, command, world, DT)
    return state


def test_initial_placement_touches_surface():
    world, state = make()
    assert np.allclose(state.p_c_true, [0.08, 0, 0], atol=1e-15)
    assert normal_force(state, EZ) == 0.0
    assert state.mode is not ContactMode.BROKEN


def test_equilibrium_without_command():
    world, state = make(depth=1e-3)
    after = run(state, world, cmd(), 50)
    assert np.allclose(after.pose1.position, state.pose1.position, rtol=0, atol=0)
    assert normal_force(after, EZ) == pytest.approx(world.contact.k_n * 1e-3)


def test_press_force_matches_penalty_law():
    world = World(contact=ContactParams(k_n=5e4))
    world, state = make(world)
    state = run(state, world, cmd(v=(0, 0, -1e-3)), 100)
    assert state.penetration == pytest.approx(1e-4, rel=1e-9)
    assert normal_force(state, EZ) == pytest.approx(5e4 * 1e-4 + 10.0 * 1e-3, rel=1e-9)
    assert state.mode is ContactMode.FIXED


def test_lift_breaks_contact():
    world, state = make(depth=1e-3)
    state = run(state, world, cmd(v=(0, 0, 0.01)), 200)
    assert state.mode is ContactMode.BROKEN
    assert np.array_equal(state.f_c, np.zeros(3))
    w = sense_wrench(state, WrenchSensor(SensorModel(0.0, 0.0)))
    assert np.array_equal(w.as_array(), np.zeros(6))


def test_sensor_torque_example():
    # 5 N pressing at (0.1, 0, 0): torque about p2 is (0, 0.5, 0)
    world, state = make(World(contact=ContactParams(k_n=5e3)), s0=0.1, depth=1e-3)
    w = sense_wrench(state, WrenchSensor(SensorModel(0.0, 0.0)))
    assert np.allclose(w.force, [0, 0, -5.0])
    assert np.allclose(w.torque, [0, 0.5, 0], atol=1e-15)
    assert np.allclose(w.torque, cross_oracle(state.p_c_true, w.force))


def test_sensor_noise_is_seeded():
    world, state = make(depth=1e-3)
    a = WrenchSensor(SensorModel(0.1, 0.02, seed=7))
    b = WrenchSensor(SensorModel(0.1, 0.02, seed=7))
    c = WrenchSensor(SensorModel(0.1, 0.02, seed=8))
    sa = [a.sample(state).as_array() for _ in range(20)]
    sb = [b.sample(state).as_array() for _ in range(20)]
    sc = [c.sample(state).as_array() for _ in range(20)]
    assert all(np.array_equal(x, y) for x, y in zip(sa, sb))
    assert not all(np.array_equal(x, y) for x, y in zip(sa, sc))


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-0.02, 0.02),
    st.floats(-2e-3, 2e-3),
    st.floats(-0.1, 0.1),
    st.floats(0.0, 1.5e-3),
)
def test_state_invariants_under_random_commands(vx, vz, wy, depth):
    world, state = make(depth=depth)
    for _ in range(40):
        state = physics_step(state, cmd(v=(vx, 0, vz), w=(0, wy, 0)), world, DT)
        # rod rigidity
        tip = state.pose1.transform(world.rod.tip_offset)
        assert np.linalg.norm(tip - state.pose1.position) == pytest.approx(0.1, rel=1e-12)
        # unilateral contact and friction cone
        fn = normal_force(state, EZ)
        assert fn >= 0.0
        ft = np.linalg.norm(state.f_c - (state.f_c @ EZ) * EZ)
        assert ft <= world.contact.mu * fn * (1 + 1e-12) + 1e-15
        if state.mode is ContactMode.SLIDING:
            assert ft == pytest.approx(world.contact.mu * fn, rel=1e-12)


def test_contact_velocity_matches_finite_difference():
    world, state = make(depth=1e-3)
    command = cmd(v=(0.01, 0, 0.0), w=(0, 0.05, 0))
    prev = state
    for _ in range(20):
        state = physics_step(prev, command, world, DT)
        tip_prev = prev.pose1.transform(world.rod.tip_offset)
        tip = state.pose1.transform(world.rod.tip_offset)
        fd = (tip - tip_prev) / DT
        fd_t = fd - (fd @ EZ) * EZ
        assert np.allclose(state.v_c_true, fd_t, rtol=0, atol=5e-6)
        prev = state


def test_instability_guard():
    world, state = make()
    with pytest.raises(ContactInstabilityError, match="penetration"):
        run(state, world, cmd(v=(0, 0, -1.0)), 20)


def test_rejects_bad_models():
    with pytest.raises(ValueError):
        RodModel(0.0)
    with pytest.raises(ValueError):
        ContactParams(k_n=-1.0)
    with pytest.raises(ValueError):
        SurfaceModel(t_hat=np.array([0.0, 0.6, 0.8]))


def test_first_order_lag_approaches_command():
    world, state = make(World(lag_tau=0.02), depth=1e-3)
    state = run(state, world, cmd(v=(0.01, 0, 0)), 5)
    assert 0 < state.twist1.linear[0] < 0.01
    state = run(state, world, cmd(v=(0.01, 0, 0)), 300)
    assert state.twist1.linear[0] == pytest.approx(0.01, rel=1e-6)


class TestRunLoop:
    def test_nominal_completes_both_phases(self, nominal_log):
        assert nominal_log.status is RunStatus.DONE
        assert set(nominal_log.phase_times) == {"ROTATE_ONLY", "DONE"}
        phases = nominal_log.column("phase")
        assert phases[0] == Phase.SLIDE and phases[-1] == Phase.DONE
        assert np.all(np.diff(phases.astype(int)) >= 0)

    def test_one_record_per_control_tick(self, nominal_log):
        t = nominal_log.column("t")
        assert t[0] == 0.0
        assert np.allclose(np.diff(t), 0.01, rtol=0, atol=1e-12)

    def test_low_force_target_faults(self):
        cfg = ScenarioConfig().with_values(**{"gains.f_d": 0.5, "sensor.sigma_f": 0.2, "run.duration": 15.0})
        log = run_loop(cfg)
        assert log.status is RunStatus.FAULT

    def test_zero_duration_is_empty(self):
        log = run_loop(ScenarioConfig().with_values(**{"run.duration": 0.0}))
        assert len(log) == 0 and log.status is RunStatus.TIMED_OUT

    def test_deterministic(self):
        cfg = ScenarioConfig().with_values(**{"run.duration": 2.0})
        a, b = run_loop(cfg), run_loop(cfg)
        assert np.array_equal(a.column("fn_raw"), b.column("fn_raw"))
        assert np.array_equal(a.column("pc_est"), b.column("pc_est"))
