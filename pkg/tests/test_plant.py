import math

import numpy as np
import pytest

from exoplan.config import EngineConfig
from exoplan.engine import Engine, schedule_commands, Scenario
from exoplan.plant import PlantParams, PlantState, actuate

DT = 0.01


def make(q=0.0, tau=0.05, v_max=1e9):
    params = PlantParams(tau_track=tau, v_max=np.full(6, float(v_max)))
    return PlantState.at_rest(np.full(6, float(q))), params


def test_at_command_is_a_fixed_point():
    state, params = make(q=7.5)
    nxt = actuate(state, params, np.full(6, 7.5), DT)
    assert nxt.q == pytest.approx(state.q, abs=0)
    assert nxt.q_dot == pytest.approx(np.zeros(6), abs=0)


def test_unsaturated_step_matches_closed_form_first_order_response():
    state, params = make(q=0.0, tau=0.05)
    nxt = actuate(state, params, np.full(6, 10.0), DT)
    expected = 10.0 * (1.0 - math.exp(-DT / 0.05))
    assert nxt.q == pytest.approx(np.full(6, expected), abs=1e-12)
    assert expected == pytest.approx(1.8127, abs=5e-5)


def test_rate_saturated_step_moves_at_v_max():
    state, params = make(q=0.0, tau=0.05, v_max=200.0)
    nxt = actuate(state, params, np.full(6, 100.0), DT)
    assert nxt.q == pytest.approx(np.full(6, 2.0), abs=1e-12)
    assert nxt.q_dot == pytest.approx(np.full(6, 200.0), abs=1e-9)


def test_partially_saturated_tick_is_exact():
    # error decays to the saturation boundary mid-tick, then exponentially
    tau, v = 0.05, 200.0
    sat = v * tau  # 10 deg
    q0, cmd = 0.0, 10.5
    t_sat = (cmd - q0 - sat) / v
    expected = cmd - sat * math.exp(-(DT - t_sat) / tau)
    state, params = make(q=q0, tau=tau, v_max=v)
    nxt = actuate(state, params, np.full(6, cmd), DT)
    assert nxt.q == pytest.approx(np.full(6, expected), abs=1e-12)


def test_pass_through_mode_tracks_exactly_with_rate_limit():
    state, params = make(q=0.0, tau=0.0, v_max=100.0)
    nxt = actuate(state, params, np.full(6, 0.5), DT)
    assert nxt.q == pytest.approx(np.full(6, 0.5))
    nxt = actuate(nxt, params, np.full(6, 50.0), DT)
    assert nxt.q == pytest.approx(np.full(6, 1.5))  # limited to 1 deg per tick


def test_convergence_over_many_ticks():
    state, params = make(q=0.0, tau=0.05)
    for _ in range(200):
        state = actuate(state, params, np.full(6, 30.0), DT)
    assert state.q == pytest.approx(np.full(6, 30.0), abs=1e-6)


def test_plant_never_moves_without_command_change(default_engine):
    # quiescent sitting: desired pose constant, plant must hold still
    samples = default_engine.run(2.0)
    q0 = samples[0].q_act
    for s in samples:
        assert s.q_act == pytest.approx(q0, abs=1e-9)
        assert s.q_dot == pytest.approx(np.zeros(6), abs=1e-9)


def test_tracking_error_below_five_degrees_in_steady_walking():
    cfg = EngineConfig()
    cfg.initial_state = "standing"
    engine = Engine(cfg)
    scenario = Scenario(name="walk", seed=0, duration=30.0, schedule=[(0.5, "walk")])
    schedule_commands(engine, scenario)
    samples = engine.run(30.0)
    steady = [s for s in samples if s.t > 10.0 and s.fsm == "walking"]
    assert steady
    worst = max(float(np.abs(s.q_des - s.q_act).max()) for s in steady)
    assert worst < 5.0
