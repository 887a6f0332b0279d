/** Engine client: /state snapshot, /telemetry stream, /command posts,
 * /transitions verdict polling. Pure JSON transport; no planning logic here.
 */

import type {
  CommandEnvelope,
  ConnectionStatus,
  StateSnapshot,
  TelemetrySample,
  TransitionEntry,
} from "./types.js";

/** Subset of the WebSocket surface used here; satisfied by browsers and `ws`. */
export interface WsLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
}

export interface EngineClientOptions {
  /** e.g. "http://127.0.0.1:9751" (ws URL is derived). */
  url: string;
  wsFactory?: (url: string) => WsLike;
  fetchFn?: typeof fetch;
  reconnectBaseMs?: number;
  reconnectMaxMs?: number;
  transitionPollMs?: number;
  commandRetryMs?: number;
  onStatus?: (status: ConnectionStatus, detail?: string) => void;
  onSnapshot?: (snap: StateSnapshot) => void;
  onSample?: (sample: TelemetrySample) => void;
  onTransitions?: (entries: TransitionEntry[]) => void;
  onNotice?: (message: string) => void;
}

interface PendingCommand {
  envelope: CommandEnvelope;
  attempts: number;
}

export class EngineClient {
  readonly httpUrl: string;
  readonly wsUrl: string;
  status: ConnectionStatus = "connecting";
  seq = 0;

  private readonly opts: EngineClientOptions;
  private readonly fetchFn: typeof fetch;
  private ws: WsLike | null = null;
  private closed = false;
  private reconnectDelay: number;
  private transitionCursor = 0;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;
  private retryQueue: PendingCommand[] = [];

  constructor(opts: EngineClientOptions) {
    this.opts = opts;
    this.httpUrl = opts.url.replace(/\/$/, "");
    this.wsUrl = this.httpUrl.replace(/^http/, "ws") + "/telemetry";
    this.fetchFn = opts.fetchFn ?? fetch.bind(globalThis);
    this.reconnectDelay = opts.reconnectBaseMs ?? 500;
  }

  private setStatus(status: ConnectionStatus, detail?: string): void {
    this.status = status;
    this.opts.onStatus?.(status, detail);
  }

  async connect(): Promise<void> {
    this.closed = false;
    await this.syncSnapshot();
    this.openSocket();
    this.schedulePoll();
  }

  close(): void {
    this.closed = true;
    if (this.pollTimer) clearTimeout(this.pollTimer);
    this.pollTimer = null;
    this.ws?.close();
    this.ws = null;
  }

  /** Fetch /state; resynchronizes the view after connect or reconnect. */
  async syncSnapshot(): Promise<StateSnapshot | null> {
    try {
      const res = await this.fetchFn(`${this.httpUrl}/state`);
      if (!res.ok) throw new Error(`HTTP ${res.status}`);
      const snap = (await res.json()) as StateSnapshot;
      this.opts.onSnapshot?.(snap);
      return snap;
    } catch (err) {
      this.setStatus("error", `engine unreachable: ${String(err)}`);
      return null;
    }
  }

  private openSocket(): void {
    if (this.closed) return;
    const factory =
      this.opts.wsFactory ??
      ((url: string) => new (globalThis as { WebSocket: new (u: string) => WsLike }).WebSocket(url));
    let socket: WsLike;
    try {
      socket = factory(this.wsUrl);
    } catch (err) {
      this.setStatus("error", String(err));
      this.scheduleReconnect();
      return;
    }
    this.ws = socket;
    socket.onopen = () => {
      this.reconnectDelay = this.opts.reconnectBaseMs ?? 500;
      this.setStatus("online");
      void this.syncSnapshot();
      void this.flushRetries();
    };
    socket.onmessage = (ev) => {
      try {
        this.opts.onSample?.(JSON.parse(String(ev.data)) as TelemetrySample);
      } catch {
        /* ignore malformed frames */
      }
    };
    socket.onerror = () => {
      /* close always follows */
    };
    socket.onclose = () => {
      this.ws = null;
      if (!this.closed) this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    this.setStatus("reconnecting", `retrying in ${this.reconnectDelay} ms`);
    const delay = this.reconnectDelay;
    this.reconnectDelay = Math.min(this.reconnectDelay * 2, this.opts.reconnectMaxMs ?? 5000);
    setTimeout(() => this.openSocket(), delay);
  }

  /** Send one command; failures are queued for retry with a user notice. */
  async sendCommand(type: "intent" | "text", payload: string): Promise<boolean> {
    const envelope: CommandEnvelope = { type, payload, ts_ms: Date.now(), seq: ++this.seq };
    return this.postEnvelope({ envelope, attempts: 0 });
  }

  private async postEnvelope(pending: PendingCommand): Promise<boolean> {
    try {
      const res = await this.fetchFn(`${this.httpUrl}/command`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(pending.envelope),
      });
      if (!res.ok) throw new Error(`HTTP ${res.status}`);
      const body = (await res.json()) as { enqueued: boolean; reason?: string };
      if (!body.enqueued) this.opts.onNotice?.(body.reason ?? "command not enqueued");
      return body.enqueued;
    } catch (err) {
      pending.attempts += 1;
      if (pending.attempts <= 5) {
        this.retryQueue.push(pending);
        this.opts.onNotice?.(`send failed, queued for retry (${String(err)})`);
        setTimeout(() => void this.flushRetries(), this.opts.commandRetryMs ?? 1000);
      } else {
        this.opts.onNotice?.(`command dropped after ${pending.attempts} attempts`);
      }
      return false;
    }
  }

  private async flushRetries(): Promise<void> {
    const queue = this.retryQueue;
    this.retryQueue = [];
    for (const pending of queue) {
      await this.postEnvelope(pending);
    }
  }

  private schedulePoll(): void {
    if (this.closed) return;
    this.pollTimer = setTimeout(async () => {
      await this.pollTransitions();
      this.schedulePoll();
    }, this.opts.transitionPollMs ?? 150);
  }

  /** Pull new transition-log entries (accept/reject verdicts). */
  async pollTransitions(): Promise<void> {
    try {
      const res = await this.fetchFn(`${this.httpUrl}/transitions?since=${this.transitionCursor}`);
      if (!res.ok) return;
      const body = (await res.json()) as { next: number; entries: TransitionEntry[] };
      this.transitionCursor = body.next;
      if (body.entries.length > 0) this.opts.onTransitions?.(body.entries);
    } catch {
      /* transient; the status pill already reflects connectivity */
    }
  }
}
