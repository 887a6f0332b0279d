"""Speech-intent locomotion planning engine and simulator for a six-joint
lower-limb exoskeleton."""

from .config import EngineConfig, load_config
from .cpg import (
    JOINTS,
    CpgParams,
    CpgState,
    JointId,
    RampMode,
    apply_intent,
    initial_state,
    ramp_gain,
    set_ramp,
    step,
    wrap_angle,
)
from .engine import Engine, Scenario, load_scenario, run_loop, run_scenario
from .gait import (
    FourierSeries,
    GaitGenerator,
    SitStandProfile,
    build_sit_stand_profile,
    load_tables,
    sit_stand_angle,
    walk_angle,
)
from .intent import (
    Intent,
    Trial,
    Utterance,
    intent_error_rate,
    parse,
    tokenize,
    word_error_rate,
)
from .planner import FsmState, PlannerState, SafetyLimits, clamp, handle_intent
from .plant import PlantParams, PlantState, TelemetrySample, actuate
from .transport import CommandEnvelope, CommandQueue, LatencyModel

__version__ = "0.1.0"
