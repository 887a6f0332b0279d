"""Coupled-oscillator gait clock: six joint phases sharing one frequency and amplitude.

The phase dynamics follow the Kuramoto model with prescribed offsets (zero
within a leg, pi across legs), while the shared frequency and amplitude track
user-adjustable targets through critically damped second-order dynamics gated
by a linear ramp.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .intent import Intent


class JointId(NamedTuple):
    side: str
    joint: str

    def __str__(self) -> str:
        return f"{self.side}_{self.joint}"


SIDES = ("left", "right")
JOINT_TYPES = ("hip", "knee", "ankle")

#: Fixed oscillator/array ordering used throughout the engine.
JOINTS: tuple[JointId, ...] = tuple(
    JointId(side, joint) for side in SIDES for joint in JOINT_TYPES
)
N_JOINTS = len(JOINTS)
JOINT_INDEX = {jid: i for i, jid in enumerate(JOINTS)}


class RampMode(enum.Enum):
    STAND_TO_WALK = "stand_to_walk"
    WALK_TO_STOP = "walk_to_stop"
    WALKING = "walking"
    OTHERWISE = "otherwise"


class IntegrationError(RuntimeError):
    """Raised when the oscillator state stops being finite."""


def _default_coupling() -> np.ndarray:
    v = np.full((N_JOINTS, N_JOINTS), 0.1)
    np.fill_diagonal(v, 0.0)
    return v


def _default_phase_offsets() -> np.ndarray:
    phi = np.zeros((N_JOINTS, N_JOINTS))
    for i, a in enumerate(JOINTS):
        for j, b in enumerate(JOINTS):
            if a.side != b.side:
                phi[i, j] = math.pi
    return phi


@dataclass
class CpgParams:
    """Oscillator network constants.

    Defaults reproduce the reference tuning: uniform all-to-all coupling 0.1,
    same-side offset 0 / cross-side offset pi, beta constants 10*pi, speed
    increments c_theta = 2 rad/s and c_r = 2.5, ramp period 2 s. The amplitude
    clamp is chosen so the synthesized walk stays inside the default joint
    limits; widen it (up to ~6) for experiments that tolerate clamping.
    """

    coupling: np.ndarray = field(default_factory=_default_coupling)
    phase_offsets: np.ndarray = field(default_factory=_default_phase_offsets)
    beta_omega: float = 10.0 * math.pi
    beta_r: float = 10.0 * math.pi
    c_theta: float = 2.0
    c_r: float = 2.5
    ramp_period: float = 2.0
    omega_min: float = 0.1
    omega_max: float = 4.0
    amp_min: float = 0.5
    amp_max: float = 1.2
    #: Use the coupling argument sign exactly as printed in the source model,
    #: which makes the anti-phase offset unstable. Kept for fidelity runs.
    printed_coupling_sign: bool = False

    def validate(self) -> None:
        v, phi = self.coupling, self.phase_offsets
        if v.shape != (N_JOINTS, N_JOINTS) or phi.shape != (N_JOINTS, N_JOINTS):
            raise ValueError("coupling and phase_offsets must be 6x6")
        if (v < 0).any():
            raise ValueError("coupling strengths must be non-negative")
        if np.abs(np.diag(phi)).max() > 1e-12:
            raise ValueError("phase offsets must vanish on the diagonal")
        skew = np.mod(phi + phi.T + math.pi, 2.0 * math.pi) - math.pi
        if np.abs(skew).max() > 1e-9:
            raise ValueError("phase offsets must be antisymmetric mod 2*pi")
        if self.ramp_period <= 0:
            raise ValueError("ramp_period must be positive")


@dataclass(frozen=True)
class CpgState:
    """Immutable snapshot of the oscillator network."""

    theta: np.ndarray
    omega: float
    omega_dot: float
    r: float
    r_dot: float
    omega_target: float
    amp_target: float
    ramp_mode: RampMode
    ramp_elapsed: float


def initial_state(
    omega0: float = math.pi / 2.0,
    amp0: float = 1.0,
    theta_left: float = 2.0 + math.pi,
    theta_right: float = 2.0,
) -> CpgState:
    """Reference initial conditions: left phases at 2+pi, right phases at 2."""
    theta = np.array([theta_left if jid.side == "left" else theta_right for jid in JOINTS])
    return CpgState(
        theta=theta,
        omega=omega0,
        omega_dot=0.0,
        r=amp0,
        r_dot=0.0,
        omega_target=omega0,
        amp_target=amp0,
        ramp_mode=RampMode.OTHERWISE,
        ramp_elapsed=0.0,
    )


def ramp_gain(mode: RampMode, elapsed: float, period: float) -> float:
    """Linear ramp gain lambda in [0, 1]; elapsed time is clamped to [0, T]."""
    t = min(max(elapsed, 0.0), period)
    if mode is RampMode.STAND_TO_WALK:
        return t / period
    if mode is RampMode.WALK_TO_STOP:
        return 1.0 - t / period
    if mode is RampMode.WALKING:
        return 1.0
    return 0.0


def wrap_angle(x):
    """Wrap angle(s) to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x), 2.0 * np.pi)


def cross_phase_error(theta: np.ndarray, offset: float = math.pi) -> float:
    """Largest circular distance of any left-right phase pair from `offset`."""
    left = theta[:3]
    right = theta[3:]
    diff = left[:, None] - right[None, :] - offset
    return float(np.abs(wrap_angle(diff)).max())


def _derivatives(y: np.ndarray, lam: float, p: CpgParams, omega_t: float, amp_t: float) -> np.ndarray:
    """Time derivative of the packed state [theta(6), omega, omega', r, r']."""
    theta = y[:N_JOINTS]
    omega, omega_dot, r, r_dot = y[N_JOINTS : N_JOINTS + 4]
    if p.printed_coupling_sign:
        delta = theta[:, None] - theta[None, :] - p.phase_offsets
    else:
        delta = theta[None, :] - theta[:, None] - p.phase_offsets
    dtheta = omega + (p.coupling * np.sin(delta)).sum(axis=1)
    ddomega = lam * p.beta_omega * (p.beta_omega / 4.0 * (omega_t - omega) - omega_dot)
    ddr = lam * p.beta_r * (p.beta_r / 4.0 * (amp_t - r) - r_dot)
    out = np.empty(N_JOINTS + 4)
    out[:N_JOINTS] = dtheta
    out[N_JOINTS:] = (omega_dot, ddomega, r_dot, ddr)
    return out


def _pack(s: CpgState) -> np.ndarray:
    return np.concatenate([s.theta, [s.omega, s.omega_dot, s.r, s.r_dot]])


def step(state: CpgState, params: CpgParams, dt: float) -> CpgState:
    """Advance one fixed step with classical 4th-order Runge-Kutta.

    The ramp gain is evaluated at the stage times so the linear ramp segments
    are integrated at full order.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    y = _pack(state)
    if not np.isfinite(y).all():
        raise IntegrationError("oscillator state is not finite")

    def lam(tau: float) -> float:
        return ramp_gain(state.ramp_mode, state.ramp_elapsed + tau, params.ramp_period)

    ot, at = state.omega_target, state.amp_target
    k1 = _derivatives(y, lam(0.0), params, ot, at)
    k2 = _derivatives(y + 0.5 * dt * k1, lam(0.5 * dt), params, ot, at)
    k3 = _derivatives(y + 0.5 * dt * k2, lam(0.5 * dt), params, ot, at)
    k4 = _derivatives(y + dt * k3, lam(dt), params, ot, at)
    y_next = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.isfinite(y_next).all():
        raise IntegrationError("integration diverged")
    return replace(
        state,
        theta=y_next[:N_JOINTS],
        omega=float(y_next[N_JOINTS]),
        omega_dot=float(y_next[N_JOINTS + 1]),
        r=float(y_next[N_JOINTS + 2]),
        r_dot=float(y_next[N_JOINTS + 3]),
        ramp_elapsed=state.ramp_elapsed + dt,
    )


def apply_intent(state: CpgState, k: Intent, params: CpgParams) -> CpgState:
    """Update the frequency/amplitude targets in response to a user intent.

    Speed-up adds (c_theta, c_r), slow-down subtracts them, every other intent
    leaves the targets alone. Results are clamped to the configured bounds.
    """
    if k is Intent.SPEED_UP:
        omega_t = state.omega_target + params.c_theta
        amp_t = state.amp_target + params.c_r
    elif k is Intent.SLOW_DOWN:
        omega_t = state.omega_target - params.c_theta
        amp_t = state.amp_target - params.c_r
    else:
        return state
    omega_t = min(max(omega_t, params.omega_min), params.omega_max)
    amp_t = min(max(amp_t, params.amp_min), params.amp_max)
    return replace(state, omega_target=omega_t, amp_target=amp_t)


def set_ramp(state: CpgState, mode: RampMode) -> CpgState:
    """Switch ramp mode and restart its clock."""
    return replace(state, ramp_mode=mode, ramp_elapsed=0.0)
