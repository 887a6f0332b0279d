"""Simulated exoskeleton joints: rate-limited first-order position tracking.

Stands in for the hardware position controllers; the update is the exact
discrete solution of q' = clip((q_cmd - q)/tau, +-v_max) over one tick, so no
integration error accumulates regardless of step size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cpg import JOINTS


def _default_v_max() -> np.ndarray:
    return np.full(len(JOINTS), 450.0)


@dataclass
class PlantParams:
    #: First-order tracking time constant, seconds. Zero selects pass-through
    #: (still rate limited) for trajectory-only tests.
    tau_track: float = 0.03
    v_max: np.ndarray = field(default_factory=_default_v_max)


@dataclass(frozen=True)
class PlantState:
    q: np.ndarray
    q_dot: np.ndarray

    @classmethod
    def at_rest(cls, q: np.ndarray) -> "PlantState":
        return cls(q=np.asarray(q, dtype=float).copy(), q_dot=np.zeros(len(q)))


def actuate(state: PlantState, params: PlantParams, q_cmd: np.ndarray, dt: float) -> PlantState:
    """Advance the joints one control period toward the commanded angles."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    q = state.q
    err = np.asarray(q_cmd, dtype=float) - q
    vmax = params.v_max
    tau = params.tau_track
    if tau <= 0.0:
        q_next = q + np.clip(err, -vmax * dt, vmax * dt)
    else:
        sat = vmax * tau  # error magnitude at which the rate limit engages
        sign = np.sign(err)
        abs_err = np.abs(err)
        # time spent saturated before the response turns exponential
        t_sat = np.maximum(abs_err - sat, 0.0) / vmax
        t_exp = dt - np.minimum(t_sat, dt)
        exp_part = q_cmd - sign * np.minimum(abs_err, sat) * np.exp(-t_exp / tau)
        sat_part = q + sign * vmax * dt
        q_next = np.where(t_sat >= dt, sat_part, exp_part)
    return PlantState(q=q_next, q_dot=(q_next - q) / dt)


@dataclass(frozen=True)
class TelemetrySample:
    """One control-tick snapshot; angles in degrees, omega in rad/s."""

    t: float
    q_des: np.ndarray
    q_act: np.ndarray
    q_dot: np.ndarray
    fsm: str
    omega: float
    r: float
    lam: float
    last_intent: str | None


TELEMETRY_HEADER = "t,fsm,intent,omega,r,lambda," + ",".join(
    f"{jid.side}_{jid.joint}_{kind}" for jid in JOINTS for kind in ("des", "act", "vel")
)


def sample_to_csv_row(s: TelemetrySample) -> str:
    cells = [repr(s.t), s.fsm, s.last_intent or "", repr(s.omega), repr(s.r), repr(s.lam)]
    for i in range(len(JOINTS)):
        cells.extend((repr(float(s.q_des[i])), repr(float(s.q_act[i])), repr(float(s.q_dot[i]))))
    return ",".join(cells)


def sample_to_json_dict(s: TelemetrySample) -> dict:
    names = [str(jid) for jid in JOINTS]
    return {
        "t": s.t,
        "fsm": s.fsm,
        "last_intent": s.last_intent,
        "omega": s.omega,
        "r": s.r,
        "lambda": s.lam,
        "q_des": {n: float(v) for n, v in zip(names, s.q_des)},
        "q_act": {n: float(v) for n, v in zip(names, s.q_act)},
        "q_dot": {n: float(v) for n, v in zip(names, s.q_dot)},
    }
