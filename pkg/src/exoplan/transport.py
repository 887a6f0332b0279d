"""Network intake and live telemetry service.

Commands arrive as line-oriented UTF-8 JSON envelopes over UDP or HTTP/WebSocket
and land in a bounded queue the control loop drains one intent per tick. The
queue and the telemetry broadcast are the only structures shared with the loop,
and neither ever blocks it.
"""

from __future__ import annotations

import asyncio
import heapq
import json
import random
import socket
import threading
from collections import deque
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .intent import Intent, intent_from_name, parse

UDP_PORT_DEFAULT = 9750
WS_PORT_DEFAULT = 9751
MAX_DATAGRAM = 4096


class MalformedEnvelope(ValueError):
    pass


@dataclass(frozen=True)
class CommandEnvelope:
    """Wire format for one command: direct intent name or raw utterance text."""

    type: str  # "intent" | "text"
    payload: str
    ts_ms: int
    seq: int

    @classmethod
    def from_json(cls, raw: str | bytes) -> "CommandEnvelope":
        try:
            obj = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedEnvelope(f"not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise MalformedEnvelope("envelope must be a JSON object")
        try:
            env = cls(
                type=obj["type"],
                payload=obj["payload"],
                ts_ms=int(obj["ts_ms"]),
                seq=int(obj["seq"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedEnvelope(f"bad envelope fields: {exc}") from exc
        if env.type not in ("intent", "text"):
            raise MalformedEnvelope(f"unknown envelope type {env.type!r}")
        if not isinstance(env.payload, str):
            raise MalformedEnvelope("payload must be a string")
        return env

    def to_intent(self) -> Intent | None:
        """Resolve the envelope to an intent; None for unmatched text."""
        if self.type == "intent":
            k = intent_from_name(self.payload)
            if k is None:
                raise MalformedEnvelope(f"unknown intent name {self.payload!r}")
            return k
        if not self.payload.strip():
            return None
        return parse(self.payload)


@dataclass
class LatencyModel:
    """Optional simulated speech-to-actuation delay, drawn uniform per command."""

    enabled: bool = False
    lo_ms: float = 500.0
    hi_ms: float = 1000.0
    allow_reorder: bool = False
    seed: int = 0
    _rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        self._rng = random.Random(self.seed)

    def delay_s(self) -> float:
        if not self.enabled:
            return 0.0
        return self._rng.uniform(self.lo_ms, self.hi_ms) / 1000.0


class CommandQueue:
    """Bounded multi-producer single-consumer intent queue.

    Entries become visible to the consumer at their delivery time. By default
    delivery preserves enqueue order even when latency draws would reorder;
    `allow_reorder` switches to earliest-delivery-first.
    """

    def __init__(self, capacity: int = 256, latency: LatencyModel | None = None):
        self.capacity = capacity
        self.latency = latency or LatencyModel()
        self.dropped = 0
        self._lock = threading.Lock()
        self._order = 0
        self._fifo: deque = deque()
        self._heap: list = []

    def __len__(self) -> int:
        return len(self._fifo) + len(self._heap)

    def push(self, intent: Intent, now: float, deliver_at: float | None = None) -> bool:
        """Enqueue an intent; returns False (and counts a drop) when full."""
        with self._lock:
            if len(self) >= self.capacity:
                self.dropped += 1
                return False
            when = deliver_at if deliver_at is not None else now + self.latency.delay_s()
            entry = (when, self._order, intent)
            self._order += 1
            if self.latency.allow_reorder:
                heapq.heappush(self._heap, entry)
            else:
                self._fifo.append(entry)
            return True

    def pop_due(self, now: float) -> Intent | None:
        """Consumer side: take the next deliverable intent, if any."""
        eps = 1e-9
        if self.latency.allow_reorder:
            with self._lock:
                if self._heap and self._heap[0][0] <= now + eps:
                    return heapq.heappop(self._heap)[2]
            return None
        # single consumer: peeking the head without the lock is safe, the
        # producers only append
        if self._fifo and self._fifo[0][0] <= now + eps:
            with self._lock:
                if self._fifo and self._fifo[0][0] <= now + eps:
                    return self._fifo.popleft()[2]
        return None


class SubscriberQueue:
    """Per-consumer telemetry buffer with latest-sample drop semantics."""

    def __init__(self, maxlen: int = 64):
        self.buffer: deque = deque(maxlen=maxlen)
        self.dropped = 0

    def put(self, item) -> None:
        if len(self.buffer) == self.buffer.maxlen:
            self.dropped += 1
        self.buffer.append(item)

    def pop(self):
        try:
            return self.buffer.popleft()
        except IndexError:
            return None


class TelemetryBroadcast:
    """Single-producer fan-out; publishing never blocks on slow consumers."""

    def __init__(self):
        self._subscribers: list[SubscriberQueue] = []
        self._lock = threading.Lock()

    def subscribe(self, maxlen: int = 64) -> SubscriberQueue:
        q = SubscriberQueue(maxlen)
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: SubscriberQueue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def publish(self, item) -> None:
        for q in list(self._subscribers):
            q.put(item)


class UdpListener(threading.Thread):
    """Receives JSON command envelopes over UDP and feeds the command queue.

    Sequence numbers must increase per sender address; anything else is dropped
    and counted. Malformed datagrams increment a metric and never crash.
    """

    def __init__(self, queue: CommandQueue, now_fn, port: int = UDP_PORT_DEFAULT, host: str = "127.0.0.1"):
        super().__init__(daemon=True, name="exoplan-udp")
        self.queue = queue
        self.now_fn = now_fn
        self.malformed = 0
        self.duplicates = 0
        self.unparsed = 0
        self.accepted = 0
        self._last_seq: dict = {}
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self.port = self._sock.getsockname()[1]
        self._running = True

    def handle_datagram(self, data: bytes, sender) -> None:
        try:
            env = CommandEnvelope.from_json(data)
            k = env.to_intent()
        except MalformedEnvelope:
            self.malformed += 1
            return
        except ValueError:
            self.malformed += 1
            return
        last = self._last_seq.get(sender)
        if last is not None and env.seq <= last:
            self.duplicates += 1
            return
        self._last_seq[sender] = env.seq
        if k is None:
            self.unparsed += 1
            return
        self.accepted += 1
        self.queue.push(k, self.now_fn())

    def run(self) -> None:
        while self._running:
            try:
                data, sender = self._sock.recvfrom(MAX_DATAGRAM)
            except OSError:
                break
            self.handle_datagram(data, sender)

    def stop(self) -> None:
        self._running = False
        try:
            self._sock.close()
        except OSError:
            pass


def build_app(engine, decimation: int = 5):
    """FastAPI app exposing /telemetry (WebSocket), /command and /state."""
    from .plant import sample_to_json_dict

    app = FastAPI(title="exoplan engine")
    app.state.engine = engine
    app.state.decimation = max(1, int(decimation))
    app.state.http_last_seq: int | None = None
    app.state.http_duplicates = 0
    app.state.http_malformed = 0

    @app.get("/state")
    def state_snapshot():
        return engine.state_snapshot()

    @app.get("/transitions")
    def transitions(since: int = 0):
        log = engine.transitions
        since = max(0, min(since, len(log)))
        return {"next": len(log), "entries": log[since:][-200:]}

    @app.post("/command")
    async def post_command(payload: dict):
        try:
            env = CommandEnvelope.from_json(json.dumps(payload))
            k = env.to_intent()
        except MalformedEnvelope as exc:
            app.state.http_malformed += 1
            return JSONResponse({"error": str(exc)}, status_code=400)
        last = app.state.http_last_seq
        if last is not None and env.seq <= last:
            app.state.http_duplicates += 1
            return {"enqueued": False, "reason": "duplicate sequence number"}
        app.state.http_last_seq = env.seq
        if k is None:
            return {"enqueued": False, "reason": "no intent recognized"}
        ok = engine.queue.push(k, engine.now())
        return {"enqueued": bool(ok), "intent": k.value}

    @app.websocket("/telemetry")
    async def telemetry(ws: WebSocket):
        await ws.accept()
        sub = engine.broadcast.subscribe()
        dec = app.state.decimation
        dt = engine.dt
        try:
            while True:
                sample = sub.pop()
                if sample is None:
                    await asyncio.sleep(dt / 4.0)
                    continue
                tick_index = round(sample.t / dt)
                if tick_index % dec != 0:
                    continue
                await ws.send_text(json.dumps(sample_to_json_dict(sample)))
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            engine.broadcast.unsubscribe(sub)

    return app


def serve(engine, ws_port: int = WS_PORT_DEFAULT, udp_port: int = UDP_PORT_DEFAULT, decimation: int = 5,
          host: str = "127.0.0.1", static_dir=None):
    """Run the real-time engine, the UDP listener, and the HTTP/WS service.

    Blocks until interrupted. Intended for operator use; tests exercise the
    app object directly.
    """
    import uvicorn

    app = build_app(engine, decimation=decimation)
    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="dashboard")

    udp = UdpListener(engine.queue, engine.now, port=udp_port, host=host)
    udp.start()
    loop_thread = threading.Thread(
        target=engine.run, kwargs={"duration": None, "realtime": True}, daemon=True, name="exoplan-loop"
    )
    loop_thread.start()
    try:
        uvicorn.run(app, host=host, port=ws_port, log_level="warning")
    finally:
        engine.request_stop()
        udp.stop()
