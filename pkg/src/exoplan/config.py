"""Engine configuration: dataclass defaults, JSON overrides, resolved dump.

Every tuned constant lives here so a single JSON file can override any of
them. Unknown keys are rejected rather than ignored.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .cpg import CpgParams
from .planner import FsmState, SafetyLimits
from .plant import PlantParams


@dataclass
class CpgConfig:
    coupling: float = 0.1
    phi_same_side: float = 0.0
    phi_cross_side: float = math.pi
    beta_omega: float = 10.0 * math.pi
    beta_r: float = 10.0 * math.pi
    c_theta: float = 2.0
    c_r: float = 2.5
    ramp_period_s: float = 2.0
    omega_init: float = math.pi / 2.0
    amp_init: float = 1.0
    theta_left_init: float = 2.0 + math.pi
    theta_right_init: float = 2.0
    omega_min: float = 0.1
    omega_max: float = 4.0
    amp_min: float = 0.5
    amp_max: float = 1.2
    printed_coupling_sign: bool = False


@dataclass
class GaitConfig:
    sit_stand_period_s: float = 4.0
    sit_stand_duration_s: float = 2.0
    #: Path to a coefficient CSV; None selects the bundled, checksummed table.
    coefficients_path: str | None = None


@dataclass
class LimitsConfig:
    hip_deg: tuple[float, float] = (-30.0, 110.0)
    knee_deg: tuple[float, float] = (-10.0, 120.0)
    ankle_deg: tuple[float, float] = (-40.0, 40.0)
    v_max_deg_s: float = 450.0


@dataclass
class PlantConfig:
    tau_track_s: float = 0.03
    v_max_deg_s: float = 450.0


@dataclass
class TransportConfig:
    udp_port: int = 9750
    ws_port: int = 9751
    decimation: int = 5
    queue_capacity: int = 256


@dataclass
class LatencyConfig:
    enabled: bool = False
    lo_ms: float = 500.0
    hi_ms: float = 1000.0
    allow_reorder: bool = False


@dataclass
class EngineConfig:
    cpg: CpgConfig = field(default_factory=CpgConfig)
    gait: GaitConfig = field(default_factory=GaitConfig)
    limits: LimitsConfig = field(default_factory=LimitsConfig)
    plant: PlantConfig = field(default_factory=PlantConfig)
    transport: TransportConfig = field(default_factory=TransportConfig)
    latency: LatencyConfig = field(default_factory=LatencyConfig)
    initial_state: str = "sitting"  # "sitting" or "standing"
    dt: float = 0.01
    seed: int = 0

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def resolved_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _apply_section(obj, section: str, values: dict) -> None:
    valid = {f.name for f in dataclasses.fields(obj)}
    for key, value in values.items():
        if key not in valid:
            raise ValueError(f"unknown config key {section}.{key}")
        if isinstance(value, list):
            value = tuple(value)
        setattr(obj, key, value)


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Defaults, overlaid with the JSON file at `path` when given."""
    cfg = EngineConfig()
    if path is None:
        return cfg
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a JSON object")
    sections = {
        "cpg": cfg.cpg,
        "gait": cfg.gait,
        "limits": cfg.limits,
        "plant": cfg.plant,
        "transport": cfg.transport,
        "latency": cfg.latency,
    }
    for key, value in raw.items():
        if key in sections:
            if not isinstance(value, dict):
                raise ValueError(f"config section {key!r} must be an object")
            _apply_section(sections[key], key, value)
        elif key in ("initial_state", "dt", "seed"):
            setattr(cfg, key, value)
        else:
            raise ValueError(f"unknown config key {key!r}")
    if cfg.initial_state not in ("sitting", "standing"):
        raise ValueError("initial_state must be 'sitting' or 'standing'")
    return cfg


def make_cpg_params(cfg: CpgConfig) -> CpgParams:
    import numpy as np

    from .cpg import JOINTS, N_JOINTS

    v = np.full((N_JOINTS, N_JOINTS), cfg.coupling)
    np.fill_diagonal(v, 0.0)
    phi = np.zeros((N_JOINTS, N_JOINTS))
    for i, a in enumerate(JOINTS):
        for j, b in enumerate(JOINTS):
            if i != j:
                phi[i, j] = cfg.phi_same_side if a.side == b.side else cfg.phi_cross_side
    params = CpgParams(
        coupling=v,
        phase_offsets=phi,
        beta_omega=cfg.beta_omega,
        beta_r=cfg.beta_r,
        c_theta=cfg.c_theta,
        c_r=cfg.c_r,
        ramp_period=cfg.ramp_period_s,
        omega_min=cfg.omega_min,
        omega_max=cfg.omega_max,
        amp_min=cfg.amp_min,
        amp_max=cfg.amp_max,
        printed_coupling_sign=cfg.printed_coupling_sign,
    )
    params.validate()
    return params


def make_limits(cfg: LimitsConfig) -> SafetyLimits:
    return SafetyLimits.from_per_joint(
        hip=tuple(cfg.hip_deg),
        knee=tuple(cfg.knee_deg),
        ankle=tuple(cfg.ankle_deg),
        v_max=cfg.v_max_deg_s,
    )


def make_plant_params(cfg: PlantConfig) -> PlantParams:
    import numpy as np

    from .cpg import N_JOINTS

    return PlantParams(tau_track=cfg.tau_track_s, v_max=np.full(N_JOINTS, cfg.v_max_deg_s))


def initial_fsm_state(cfg: EngineConfig) -> FsmState:
    return FsmState.SITTING if cfg.initial_state == "sitting" else FsmState.STANDING
