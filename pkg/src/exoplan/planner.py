"""Finite-state locomotion planner and safety clamping.

Only the edges of the state graph can fire; everything else is rejected as a
value (logged upstream, never an exception). Sit<->stand transitions are
refined into timed intermediate states so poses change over a full transition
period instead of jumping.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .cpg import JOINTS, RampMode
from .intent import Intent


class FsmState(enum.Enum):
    SITTING = "sitting"
    SIT_TO_STAND = "sit_to_stand"
    STANDING = "standing"
    STAND_TO_SIT = "stand_to_sit"
    LOCOMOTION_INITIATION = "locomotion_initiation"
    WALKING = "walking"
    LOCOMOTION_COMPLETION = "locomotion_completion"


#: States that run on a timer and exit automatically.
TIMED_STATES = (
    FsmState.SIT_TO_STAND,
    FsmState.STAND_TO_SIT,
    FsmState.LOCOMOTION_INITIATION,
    FsmState.LOCOMOTION_COMPLETION,
)

#: (state, intent) -> successor for the command-triggered edges.
EDGES: dict[tuple[FsmState, Intent], FsmState] = {
    (FsmState.SITTING, Intent.STAND): FsmState.SIT_TO_STAND,
    (FsmState.STANDING, Intent.SIT): FsmState.STAND_TO_SIT,
    (FsmState.STANDING, Intent.WALK): FsmState.LOCOMOTION_INITIATION,
    (FsmState.WALKING, Intent.STOP): FsmState.LOCOMOTION_COMPLETION,
    (FsmState.WALKING, Intent.SPEED_UP): FsmState.WALKING,
    (FsmState.WALKING, Intent.SLOW_DOWN): FsmState.WALKING,
}

#: Timer-expiry successors.
AUTO_EDGES: dict[FsmState, FsmState] = {
    FsmState.SIT_TO_STAND: FsmState.STANDING,
    FsmState.STAND_TO_SIT: FsmState.SITTING,
    FsmState.LOCOMOTION_INITIATION: FsmState.WALKING,
    FsmState.LOCOMOTION_COMPLETION: FsmState.STANDING,
}


@dataclass(frozen=True)
class Effect:
    """Side effect requested by a transition, applied by the control loop."""

    kind: str  # "none" | "ramp" | "modulate" | "rejected"
    ramp_mode: RampMode | None = None
    intent: Intent | None = None
    reason: str | None = None

    def describe(self) -> str:
        if self.kind == "ramp":
            return f"ramp:{self.ramp_mode.value}"
        if self.kind == "modulate":
            return f"modulate:{self.intent.value}"
        if self.kind == "rejected":
            return f"rejected:{self.reason}"
        return "none"


NO_EFFECT = Effect("none")


def _per_joint(values_by_type: dict[str, float]) -> np.ndarray:
    return np.array([values_by_type[jid.joint] for jid in JOINTS])


def _default_q_min() -> np.ndarray:
    return _per_joint({"hip": -30.0, "knee": -10.0, "ankle": -40.0})


def _default_q_max() -> np.ndarray:
    return _per_joint({"hip": 110.0, "knee": 120.0, "ankle": 40.0})


def _default_v_max() -> np.ndarray:
    return np.full(len(JOINTS), 450.0)


@dataclass(frozen=True)
class SafetyLimits:
    """Joint angle box and velocity ceiling, degrees and degrees/second."""

    q_min: np.ndarray = field(default_factory=_default_q_min)
    q_max: np.ndarray = field(default_factory=_default_q_max)
    v_max: np.ndarray = field(default_factory=_default_v_max)

    def __post_init__(self):
        if not (self.q_min < self.q_max).all():
            raise ValueError("q_min must be strictly below q_max")
        if not (self.v_max > 0).all():
            raise ValueError("v_max must be positive")

    @classmethod
    def from_per_joint(
        cls,
        hip: tuple[float, float] = (-30.0, 110.0),
        knee: tuple[float, float] = (-10.0, 120.0),
        ankle: tuple[float, float] = (-40.0, 40.0),
        v_max: float = 450.0,
    ) -> "SafetyLimits":
        lo = {"hip": hip[0], "knee": knee[0], "ankle": ankle[0]}
        hi = {"hip": hip[1], "knee": knee[1], "ankle": ankle[1]}
        return cls(q_min=_per_joint(lo), q_max=_per_joint(hi), v_max=np.full(len(JOINTS), v_max))


@dataclass(frozen=True)
class PlannerState:
    fsm: FsmState = FsmState.SITTING
    transition_elapsed: float = 0.0
    limits: SafetyLimits = field(default_factory=SafetyLimits)
    transition_period: float = 2.0


def handle_intent(p: PlannerState, k: Intent) -> tuple[PlannerState, Effect]:
    """Fire the edge for (state, intent) if one exists, else reject."""
    if p.fsm in TIMED_STATES:
        return p, Effect("rejected", reason=f"busy in {p.fsm.value}")
    target = EDGES.get((p.fsm, k))
    if target is None:
        return p, Effect("rejected", reason=f"no edge for {k.value} in {p.fsm.value}")
    if target is p.fsm:  # speed modulation self-loop
        return p, Effect("modulate", intent=k)
    effect = NO_EFFECT
    if target is FsmState.LOCOMOTION_INITIATION:
        effect = Effect("ramp", ramp_mode=RampMode.STAND_TO_WALK)
    elif target is FsmState.LOCOMOTION_COMPLETION:
        effect = Effect("ramp", ramp_mode=RampMode.WALK_TO_STOP)
    return replace(p, fsm=target, transition_elapsed=0.0), effect


def tick(p: PlannerState, dt: float) -> tuple[PlannerState, Effect | None]:
    """Advance transition timers; fire the auto edge when the period elapses.

    Returns (state, effect) where effect is None when no transition fired.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if p.fsm not in TIMED_STATES:
        return p, None
    elapsed = p.transition_elapsed + dt
    if elapsed < p.transition_period - 1e-9:
        return replace(p, transition_elapsed=elapsed), None
    target = AUTO_EDGES[p.fsm]
    effect = NO_EFFECT
    if target is FsmState.WALKING:
        effect = Effect("ramp", ramp_mode=RampMode.WALKING)
    elif p.fsm is FsmState.LOCOMOTION_COMPLETION:
        effect = Effect("ramp", ramp_mode=RampMode.OTHERWISE)
    return replace(p, fsm=target, transition_elapsed=0.0), effect


def clamp(q_des: np.ndarray, q_prev: np.ndarray, limits: SafetyLimits, dt: float) -> np.ndarray:
    """Clip to the joint angle box, then rate-limit against the previous output.

    Provided q_prev itself lies in the box, the result satisfies both
    constraints simultaneously and the operation is idempotent.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    boxed = np.clip(q_des, limits.q_min, limits.q_max)
    max_step = limits.v_max * dt
    return np.clip(boxed, q_prev - max_step, q_prev + max_step)
