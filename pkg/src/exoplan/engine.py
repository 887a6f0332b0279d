"""The 100 Hz control loop tying intent, planner, CPG, gait, and plant together.

Per tick: drain at most one intent, let the planner react, advance the
oscillators, synthesize the desired pose, clamp it, actuate the plant, emit
telemetry. Everything is deterministic for a given command schedule.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cpg as cpg_mod
from . import planner as planner_mod
from .config import (
    EngineConfig,
    initial_fsm_state,
    make_cpg_params,
    make_limits,
    make_plant_params,
)
from .gait import GaitGenerator, load_tables
from .intent import Intent, intent_from_name, parse, tokenize
from .planner import FsmState, PlannerState
from .plant import (
    TELEMETRY_HEADER,
    PlantState,
    TelemetrySample,
    actuate,
    sample_to_csv_row,
)
from .transport import CommandQueue, LatencyModel, TelemetryBroadcast


class ScenarioError(ValueError):
    """Scenario file could not be parsed or fails its invariants."""


@dataclass
class Scenario:
    name: str
    seed: int
    duration: float
    schedule: list[tuple[float, str]]

    def validate(self) -> None:
        times = [t for t, _ in self.schedule]
        if times != sorted(times):
            raise ScenarioError("schedule must be sorted by time offset")
        if self.schedule and self.duration < times[-1]:
            raise ScenarioError("duration must cover the last scheduled command")
        if self.duration <= 0:
            raise ScenarioError("duration must be positive")


def load_scenario(path: str | Path) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    try:
        schedule = [(float(item["t"]), str(item["say"])) for item in raw.get("schedule", [])]
        scenario = Scenario(
            name=str(raw["name"]),
            seed=int(raw.get("seed", 0)),
            duration=float(raw["duration"]),
            schedule=schedule,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad scenario fields: {exc}") from exc
    scenario.validate()
    return scenario


def resolve_say(text: str) -> Intent | None:
    """Scenario entries may name an intent directly or carry an utterance."""
    direct = intent_from_name(text)
    if direct is not None:
        return direct
    if not tokenize(text):
        return None
    return parse(text)


class Engine:
    """Owns all mutable control state; one instance per run."""

    def __init__(self, config: EngineConfig | None = None, queue: CommandQueue | None = None):
        self.config = config or EngineConfig()
        self.dt = self.config.dt
        self.cpg_params = make_cpg_params(self.config.cpg)
        self.limits = make_limits(self.config.limits)
        self.plant_params = make_plant_params(self.config.plant)
        tables = load_tables(self.config.gait.coefficients_path)
        self.gait = GaitGenerator(
            tables,
            self.cpg_params,
            sit_stand_period=self.config.gait.sit_stand_period_s,
            sit_stand_duration=self.config.gait.sit_stand_duration_s,
        )
        self.planner = PlannerState(
            fsm=initial_fsm_state(self.config),
            limits=self.limits,
            transition_period=self.config.cpg.ramp_period_s,
        )
        self.cpg = cpg_mod.initial_state(
            omega0=self.config.cpg.omega_init,
            amp0=self.config.cpg.amp_init,
            theta_left=self.config.cpg.theta_left_init,
            theta_right=self.config.cpg.theta_right_init,
        )
        pose0 = self.gait.desired_pose(self.planner.fsm, self.cpg, 0.0)
        self.plant = PlantState.at_rest(pose0)
        if queue is None:
            latency = LatencyModel(
                enabled=self.config.latency.enabled,
                lo_ms=self.config.latency.lo_ms,
                hi_ms=self.config.latency.hi_ms,
                allow_reorder=self.config.latency.allow_reorder,
                seed=self.config.seed,
            )
            queue = CommandQueue(self.config.transport.queue_capacity, latency)
        self.queue = queue
        self.broadcast = TelemetryBroadcast()

        self.tick_index = 0
        self._now = 0.0
        self.transitions: list[dict] = []
        self.visit_sequence: list[str] = [self.planner.fsm.value]
        self.clamp_activations = 0
        self.violations: list[str] = []
        self.overruns = 0
        self.last_intent: Intent | None = None
        self.last_decision: dict | None = None
        self._q_cmd_prev = pose0.copy()
        self._q_raw_prev = pose0.copy()
        self._stop = False
        self._snapshot: dict = {}
        self._update_snapshot(None)

    def now(self) -> float:
        return self._now

    def request_stop(self) -> None:
        self._stop = True

    def _log_transition(self, t: float, before: FsmState, after: FsmState, intent: Intent | None, effect_desc: str) -> None:
        self.transitions.append(
            {
                "t": t,
                "from": before.value,
                "to": after.value,
                "intent": intent.value if intent else None,
                "effect": effect_desc,
            }
        )

    def _apply_effect(self, effect: planner_mod.Effect) -> None:
        if effect.kind == "ramp":
            self.cpg = cpg_mod.set_ramp(self.cpg, effect.ramp_mode)
        elif effect.kind == "modulate":
            self.cpg = cpg_mod.apply_intent(self.cpg, effect.intent, self.cpg_params)

    def _check_invariants(self, t: float, q_raw: np.ndarray, lam: float) -> None:
        step_bound = self.limits.v_max * self.dt + 1e-6
        jump = np.abs(q_raw - self._q_raw_prev)
        if (jump > step_bound).any():
            i = int(np.argmax(jump - step_bound))
            self.violations.append(
                f"t={t:.3f}: desired-angle step {jump[i]:.4f} deg on {cpg_mod.JOINTS[i]} "
                f"exceeds v_max*dt={step_bound[i]:.4f}"
            )
        if not (0.0 <= lam <= 1.0):
            self.violations.append(f"t={t:.3f}: ramp gain {lam} outside [0, 1]")
        outside_lo = self.plant.q < self.limits.q_min - 1.0
        outside_hi = self.plant.q > self.limits.q_max + 1.0
        if outside_lo.any() or outside_hi.any():
            self.violations.append(f"t={t:.3f}: plant joint left the limit box")

    def tick(self) -> TelemetrySample:
        t_start = self.tick_index * self.dt
        intent_now = self.queue.pop_due(t_start)
        if intent_now is not None:
            before = self.planner.fsm
            self.planner, effect = planner_mod.handle_intent(self.planner, intent_now)
            self._apply_effect(effect)
            self._log_transition(t_start, before, self.planner.fsm, intent_now, effect.describe())
            if effect.kind != "rejected":
                self.visit_sequence.append(self.planner.fsm.value)
            self.last_intent = intent_now
            self.last_decision = {
                "tick": self.tick_index,
                "intent": intent_now.value,
                "accepted": effect.kind != "rejected",
                "effect": effect.describe(),
                "fsm": self.planner.fsm.value,
            }

        before_auto = self.planner.fsm
        self.planner, auto_effect = planner_mod.tick(self.planner, self.dt)
        if self.planner.fsm is not before_auto:
            self._apply_effect(auto_effect)
            self._log_transition(t_start, before_auto, self.planner.fsm, None, "auto:" + auto_effect.describe())
            self.visit_sequence.append(self.planner.fsm.value)

        self.cpg = cpg_mod.step(self.cpg, self.cpg_params, self.dt)
        lam = cpg_mod.ramp_gain(self.cpg.ramp_mode, self.cpg.ramp_elapsed, self.cpg_params.ramp_period)
        q_raw = self.gait.desired_pose(self.planner.fsm, self.cpg, self.planner.transition_elapsed)

        self.tick_index += 1
        t_end = self.tick_index * self.dt
        self._now = t_end

        self._check_invariants(t_end, q_raw, lam)
        q_cmd = planner_mod.clamp(q_raw, self._q_cmd_prev, self.limits, self.dt)
        self.clamp_activations += int((np.abs(q_cmd - q_raw) > 1e-9).sum())
        self.plant = actuate(self.plant, self.plant_params, q_cmd, self.dt)
        self._q_raw_prev = q_raw
        self._q_cmd_prev = q_cmd

        sample = TelemetrySample(
            t=t_end,
            q_des=q_cmd,
            q_act=self.plant.q,
            q_dot=self.plant.q_dot,
            fsm=self.planner.fsm.value,
            omega=self.cpg.omega,
            r=self.cpg.r,
            lam=lam,
            last_intent=self.last_intent.value if self.last_intent else None,
        )
        self.broadcast.publish(sample)
        self._update_snapshot(sample)
        return sample

    def _update_snapshot(self, sample: TelemetrySample | None) -> None:
        self._snapshot = {
            "t": self._now,
            "fsm": self.planner.fsm.value,
            "omega": self.cpg.omega,
            "r": self.cpg.r,
            "omega_target": self.cpg.omega_target,
            "amp_target": self.cpg.amp_target,
            "last_intent": self.last_intent.value if self.last_intent else None,
            "limits": {
                "q_min": [float(v) for v in self.limits.q_min],
                "q_max": [float(v) for v in self.limits.q_max],
                "v_max": [float(v) for v in self.limits.v_max],
            },
            "overruns": self.overruns,
            "clamp_activations": self.clamp_activations,
            "violations": len(self.violations),
        }

    def state_snapshot(self) -> dict:
        return self._snapshot

    def run(
        self,
        duration: float | None,
        realtime: bool = False,
        collect: bool = True,
        stop_on_violation: bool = True,
    ) -> list[TelemetrySample]:
        """Run for `duration` simulated seconds (None = until stopped)."""
        samples: list[TelemetrySample] = []
        n_ticks = None if duration is None else round(duration / self.dt)
        wall_start = time.perf_counter()
        k = 0
        while not self._stop and (n_ticks is None or k < n_ticks):
            sample = self.tick()
            if collect:
                samples.append(sample)
            if stop_on_violation and self.violations:
                break
            if realtime:
                target = wall_start + self.tick_index * self.dt
                lag = time.perf_counter() - target
                if lag > self.dt:
                    self.overruns += 1
                elif lag < 0:
                    time.sleep(-lag)
            k += 1
        return samples


def run_loop(engine: Engine, duration: float, realtime: bool = False) -> list[TelemetrySample]:
    """Execute the fixed-rate pipeline and return the telemetry stream."""
    return engine.run(duration, realtime=realtime)


def schedule_commands(engine: Engine, scenario: Scenario) -> int:
    """Pre-enqueue the scenario's schedule; returns how many intents queued."""
    queued = 0
    for t_offset, say in scenario.schedule:
        k = resolve_say(say)
        if k is None:
            continue
        delay = engine.queue.latency.delay_s()
        engine.queue.push(k, now=t_offset, deliver_at=t_offset + delay)
        queued += 1
    return queued


def write_telemetry_csv(path: str | Path, samples: list[TelemetrySample]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TELEMETRY_HEADER + "\n")
        for s in samples:
            fh.write(sample_to_csv_row(s) + "\n")


def write_transitions_ndjson(path: str | Path, transitions: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry in transitions:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def summarize_run(engine: Engine, scenario_name: str, seed: int, samples: list[TelemetrySample]) -> dict:
    per_joint_vmax = {}
    if samples:
        stacked = np.abs(np.stack([s.q_dot for s in samples]))
        peak = stacked.max(axis=0)
    else:
        peak = np.zeros(len(cpg_mod.JOINTS))
    for i, jid in enumerate(cpg_mod.JOINTS):
        per_joint_vmax[str(jid)] = float(peak[i])
    return {
        "scenario": scenario_name,
        "seed": seed,
        "ticks": engine.tick_index,
        "duration_s": engine.tick_index * engine.dt,
        "completion_time_s": engine.transitions[-1]["t"] if engine.transitions else None,
        "fsm_visit_sequence": engine.visit_sequence,
        "transition_count": len(engine.transitions),
        "per_joint_max_velocity_deg_s": per_joint_vmax,
        "clamp_activation_count": engine.clamp_activations,
        "invariant_violations": engine.violations,
        "overruns": engine.overruns,
    }


def run_scenario(
    scenario: Scenario | str | Path,
    output_dir: str | Path,
    config: EngineConfig | None = None,
    realtime: bool = False,
    seed_override: int | None = None,
) -> tuple[int, dict]:
    """Execute a scenario and write telemetry.csv, transitions.ndjson, summary.json.

    Exit status: 0 clean, 1 on the first invariant violation, 2 when the
    scenario cannot be parsed (raised as ScenarioError before anything runs).
    """
    if not isinstance(scenario, Scenario):
        scenario = load_scenario(scenario)
    config = config or EngineConfig()
    seed = seed_override if seed_override is not None else scenario.seed
    config.seed = seed
    engine = Engine(config)
    schedule_commands(engine, scenario)
    samples = engine.run(scenario.duration, realtime=realtime)

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_telemetry_csv(out / "telemetry.csv", samples)
    write_transitions_ndjson(out / "transitions.ndjson", engine.transitions)
    summary = summarize_run(engine, scenario.name, seed, samples)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return (1 if engine.violations else 0), summary
