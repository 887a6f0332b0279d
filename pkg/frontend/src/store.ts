/** Session view-model: rolling telemetry window, FSM badge, command verdicts.
 * Holds no truth of its own; everything is rebuilt from /state plus the stream.
 */

import type {
  ConnectionStatus,
  StateSnapshot,
  TelemetrySample,
  TransitionEntry,
} from "./types.js";

export type Verdict = "pending" | "accepted" | "rejected";

export interface CommandRecord {
  intent: string;
  sentAt: number;
  verdict: Verdict;
  reason?: string;
}

export class SessionStore {
  windowSeconds: number;
  status: ConnectionStatus = "connecting";
  statusDetail = "";
  fsm: string | null = null;
  omegaTarget: number | null = null;
  ampTarget: number | null = null;
  samples: TelemetrySample[] = [];
  lastCommand: CommandRecord | null = null;
  private listeners: Array<() => void> = [];

  constructor(windowSeconds = 15) {
    this.windowSeconds = windowSeconds;
  }

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  setStatus(status: ConnectionStatus, detail = ""): void {
    this.status = status;
    this.statusDetail = detail;
    this.emit();
  }

  applySnapshot(snap: StateSnapshot): void {
    // the stream overrides this the moment samples arrive
    if (this.samples.length === 0) this.fsm = snap.fsm;
    this.omegaTarget = snap.omega_target;
    this.ampTarget = snap.amp_target;
    this.emit();
  }

  pushSample(sample: TelemetrySample): void {
    this.samples.push(sample);
    const horizon = sample.t - this.windowSeconds;
    let firstKept = 0;
    while (firstKept < this.samples.length && this.samples[firstKept].t < horizon) firstKept += 1;
    if (firstKept > 0) this.samples = this.samples.slice(firstKept);
    this.fsm = sample.fsm;
    this.emit();
  }

  noteCommandSent(intent: string): void {
    this.lastCommand = { intent, sentAt: Date.now(), verdict: "pending" };
    this.emit();
  }

  applyTransitions(entries: TransitionEntry[]): void {
    if (!this.lastCommand) return;
    for (const entry of entries) {
      if (entry.intent === this.lastCommand.intent && this.lastCommand.verdict === "pending") {
        if (entry.effect.startsWith("rejected")) {
          this.lastCommand.verdict = "rejected";
          this.lastCommand.reason = entry.effect.replace("rejected:", "");
        } else {
          this.lastCommand.verdict = "accepted";
        }
      }
    }
    this.emit();
  }
}
