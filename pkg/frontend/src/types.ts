/** Wire types mirroring the engine's JSON payloads. */

export type JointAngles = Record<string, number>;

export interface TelemetrySample {
  t: number;
  fsm: string;
  omega: number;
  r: number;
  lambda: number;
  last_intent: string | null;
  q_des: JointAngles;
  q_act: JointAngles;
  q_dot: JointAngles;
}

export interface StateSnapshot {
  t: number;
  fsm: string;
  omega: number;
  r: number;
  omega_target: number;
  amp_target: number;
  last_intent: string | null;
  limits: { q_min: number[]; q_max: number[]; v_max: number[] };
  overruns: number;
  clamp_activations: number;
  violations: number;
}

export interface TransitionEntry {
  t: number;
  from: string;
  to: string;
  intent: string | null;
  effect: string;
}

export interface CommandEnvelope {
  type: "intent" | "text";
  payload: string;
  ts_ms: number;
  seq: number;
}

export type ConnectionStatus = "connecting" | "online" | "reconnecting" | "error";

export const INTENTS = [
  "stand",
  "sit",
  "walk",
  "stop",
  "speed_up",
  "slow_down",
  "maintain",
] as const;

export type IntentName = (typeof INTENTS)[number];
