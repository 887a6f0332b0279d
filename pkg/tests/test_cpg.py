import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exoplan.cpg import (
    JOINTS,
    CpgParams,
    IntegrationError,
    Intent,
    RampMode,
    _derivatives,
    _pack,
    apply_intent,
    cross_phase_error,
    initial_state,
    ramp_gain,
    set_ramp,
    step,
    wrap_angle,
)

DT = 0.01
OMEGA0 = math.pi / 2.0


def walking_state():
    return set_ramp(initial_state(), RampMode.WALKING)


def run(state, params, seconds, dt=DT):
    for _ in range(round(seconds / dt)):
        state = step(state, params, dt)
    return state


def test_joint_set_has_six_distinct_ids():
    assert len(JOINTS) == 6
    assert len(set(JOINTS)) == 6
    assert {j.side for j in JOINTS} == {"left", "right"}


def test_param_validation_catches_bad_offsets():
    params = CpgParams()
    params.validate()
    params.phase_offsets[0, 0] = 0.5
    with pytest.raises(ValueError):
        params.validate()


def test_wrap_angle_range_and_pi_inclusion():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    xs = np.linspace(-20, 20, 1001)
    wrapped = wrap_angle(xs)
    assert ((wrapped > -math.pi) & (wrapped <= math.pi)).all()


def test_equilibrium_derivatives_are_pure_rotation():
    # anti-phase offsets hold, omega at target, rates zero: theta' = omega,
    # omega'' = r'' = 0
    state = walking_state()
    params = CpgParams()
    dy = _derivatives(_pack(state), 1.0, params, state.omega_target, state.amp_target)
    assert dy[:6] == pytest.approx(np.full(6, state.omega), abs=1e-12)
    assert dy[6:] == pytest.approx([0.0, 0.0, 0.0, 0.0], abs=1e-12)


def test_equilibrium_step_advances_phases_only():
    state = walking_state()
    params = CpgParams()
    nxt = step(state, params, DT)
    assert nxt.theta == pytest.approx(state.theta + state.omega * DT, abs=1e-12)
    assert nxt.omega == pytest.approx(state.omega, abs=1e-12)
    assert nxt.r == pytest.approx(state.r, abs=1e-12)


def test_lambda_zero_freezes_modulation_dynamics():
    state = initial_state()  # ramp mode "otherwise"
    state = replace(state, omega=0.9, omega_target=2.5, amp_target=1.1)
    params = CpgParams()
    nxt = step(state, params, DT)
    assert nxt.omega == 0.9  # no pull toward the target while lambda = 0
    assert nxt.r == state.r


def test_ramp_gain_cases():
    T = 2.0
    assert ramp_gain(RampMode.STAND_TO_WALK, 0.0, T) == 0.0
    assert ramp_gain(RampMode.STAND_TO_WALK, T, T) == 1.0
    assert ramp_gain(RampMode.STAND_TO_WALK, 5 * T, T) == 1.0  # clamped
    assert ramp_gain(RampMode.WALK_TO_STOP, T / 2, T) == 0.5
    assert ramp_gain(RampMode.WALK_TO_STOP, -1.0, T) == 1.0
    assert ramp_gain(RampMode.WALKING, 123.0, T) == 1.0
    assert ramp_gain(RampMode.OTHERWISE, 123.0, T) == 0.0


def test_set_ramp_resets_clock():
    state = run(walking_state(), CpgParams(), 1.0)
    assert state.ramp_elapsed == pytest.approx(1.0)
    state = set_ramp(state, RampMode.WALK_TO_STOP)
    assert state.ramp_mode is RampMode.WALK_TO_STOP
    assert state.ramp_elapsed == 0.0


def test_apply_intent_increments_with_wide_bounds():
    params = CpgParams(amp_min=0.1, amp_max=6.0)
    state = initial_state()
    up = apply_intent(state, Intent.SPEED_UP, params)
    assert up.omega_target == pytest.approx(OMEGA0 + 2.0)
    assert up.amp_target == pytest.approx(3.5)
    down = apply_intent(up, Intent.SLOW_DOWN, params)
    assert down.omega_target == pytest.approx(OMEGA0)
    assert down.amp_target == pytest.approx(1.0)


def test_apply_intent_other_intents_do_nothing():
    params = CpgParams()
    state = initial_state()
    for k in (Intent.MAINTAIN, Intent.WALK, Intent.STOP, Intent.SIT, Intent.STAND):
        nxt = apply_intent(state, k, params)
        assert nxt.omega_target == state.omega_target
        assert nxt.amp_target == state.amp_target


def test_apply_intent_clamps_at_bounds():
    params = CpgParams()
    state = replace(initial_state(), omega_target=params.omega_min, amp_target=params.amp_min)
    down = apply_intent(state, Intent.SLOW_DOWN, params)
    assert down.omega_target == params.omega_min
    assert down.amp_target == params.amp_min
    state = replace(initial_state(), omega_target=params.omega_max, amp_target=params.amp_max)
    up = apply_intent(state, Intent.SPEED_UP, params)
    assert up.omega_target == params.omega_max
    assert up.amp_target == params.amp_max


def test_ten_seconds_walking_settles_to_reference_frequency_and_offset():
    state = run(walking_state(), CpgParams(), 10.0)
    assert abs(state.omega - OMEGA0) / OMEGA0 < 0.01
    assert cross_phase_error(state.theta) < 0.05


def test_rk4_agrees_with_adaptive_reference_integration():
    scipy_integrate = pytest.importorskip("scipy.integrate")
    params = CpgParams()
    state = walking_state()
    # start away from equilibrium so the comparison exercises the dynamics
    theta = state.theta.copy()
    theta[0] += 0.25
    theta[4] -= 0.2
    state = replace(state, theta=theta, omega=1.0, r=0.8)

    y0 = _pack(state)
    sol = scipy_integrate.solve_ivp(
        lambda _t, y: _derivatives(y, 1.0, params, state.omega_target, state.amp_target),
        (0.0, 10.0),
        y0,
        method="DOP853",
        rtol=1e-12,
        atol=1e-12,
    )
    ref = sol.y[:, -1]
    out = run(state, params, 10.0)
    assert np.abs(out.theta - ref[:6]).max() < 1e-7
    assert abs(out.omega - ref[6]) < 1e-7
    assert abs(out.r - ref[8]) < 1e-7


def test_halving_dt_changes_final_phases_below_1e6():
    params = CpgParams()
    base = walking_state()
    theta = base.theta.copy()
    theta[2] += 0.3
    base = replace(base, theta=theta, omega=1.2)
    coarse = run(base, params, 10.0, dt=0.01)
    fine = run(base, params, 10.0, dt=0.005)
    assert np.abs(coarse.theta - fine.theta).max() < 1e-6


def test_frequency_consensus_after_convergence():
    params = CpgParams()
    rng = np.random.default_rng(7)
    state = walking_state()
    state = replace(state, theta=state.theta + rng.uniform(-1.0, 1.0, 6))
    state = run(state, params, 20.0)
    dy = _derivatives(_pack(state), 1.0, params, state.omega_target, state.amp_target)
    assert np.abs(dy[:6] - state.omega).max() < 1e-3


def test_perturbation_recovery_within_ten_seconds():
    params = CpgParams()
    state = run(walking_state(), CpgParams(), 5.0)
    theta = state.theta.copy()
    theta[1] += 0.3
    state = replace(state, theta=theta)
    assert cross_phase_error(state.theta) >= 0.05  # actually perturbed
    state = run(state, params, 10.0)
    assert cross_phase_error(state.theta) < 0.05


@given(st.integers(0, 5), st.floats(-0.3, 0.3))
@settings(max_examples=12, deadline=None)
def test_any_single_phase_perturbation_recovers(joint_index, delta):
    params = CpgParams()
    state = walking_state()
    theta = state.theta.copy()
    theta[joint_index] += delta
    state = replace(state, theta=theta)
    state = run(state, params, 10.0)
    assert cross_phase_error(state.theta) < 0.05


def test_modulation_is_critically_damped_no_overshoot():
    params = CpgParams(amp_min=0.1, amp_max=6.0)
    state = walking_state()
    state = apply_intent(state, Intent.SPEED_UP, params)
    target = state.omega_target
    for _ in range(200):  # 2 s
        state = step(state, params, DT)
        assert state.omega <= target * (1.0 + 1e-6)
    assert state.omega == pytest.approx(target, rel=1e-6)


def test_speed_up_settles_within_half_second():
    params = CpgParams()
    state = walking_state()
    state = apply_intent(state, Intent.SPEED_UP, params)
    state = run(state, params, 0.5)
    assert abs(state.omega - state.omega_target) < 0.01 * params.c_theta


def test_printed_coupling_sign_flips_stability():
    stabilized = CpgParams()
    printed = CpgParams(printed_coupling_sign=True)
    state = walking_state()
    theta = state.theta.copy()
    theta[:3] += 0.2  # push the left group off the anti-phase offset
    state = replace(state, theta=theta)
    err0 = cross_phase_error(state.theta)
    err_stab = cross_phase_error(run(state, stabilized, 2.0).theta)
    err_print = cross_phase_error(run(state, printed, 2.0).theta)
    assert err_stab < err0 * 0.5
    assert err_print > err0


def test_non_finite_state_raises():
    state = walking_state()
    bad = replace(state, omega=float("nan"))
    with pytest.raises(IntegrationError):
        step(bad, CpgParams(), DT)


def test_step_rejects_non_positive_dt():
    with pytest.raises(ValueError):
        step(walking_state(), CpgParams(), 0.0)


def test_trajectories_are_bit_identical_across_runs():
    params = CpgParams()

    def trajectory():
        state = walking_state()
        out = []
        for k in range(500):
            state = step(state, params, DT)
            if k % 100 == 0:
                state = apply_intent(state, Intent.SPEED_UP, params)
            out.append((tuple(state.theta), state.omega, state.r))
        return out

    assert trajectory() == trajectory()
