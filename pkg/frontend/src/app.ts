/** DOM wiring: builds the dashboard, connects store events to widgets. */

import { EngineClient } from "./client.js";
import { StripChart } from "./charts.js";
import { SessionStore } from "./store.js";
import { INTENTS, type TelemetrySample } from "./types.js";

const JOINT_TYPES = ["hip", "knee", "ankle"] as const;

const LABELS: Record<string, string> = {
  stand: "Stand",
  sit: "Sit",
  walk: "Walk",
  stop: "Stop",
  speed_up: "Speed up",
  slow_down: "Slow down",
  maintain: "Maintain",
};

export interface Dashboard {
  client: EngineClient;
  store: SessionStore;
  /** Repaint charts once; the browser loop calls this via requestAnimationFrame. */
  renderFrame: () => void;
  elements: {
    badge: HTMLElement;
    statusPill: HTMLElement;
    banner: HTMLElement;
    toasts: HTMLElement;
    verdict: HTMLElement;
    textInput: HTMLInputElement;
    buttons: Map<string, HTMLButtonElement>;
    sideSelect: HTMLSelectElement;
  };
}

export function prettyState(fsm: string | null): string {
  return fsm ? fsm.replace(/_/g, " ") : "—";
}

export function createDashboard(doc: Document, engineUrl: string, opts: {
  wsFactory?: ConstructorParameters<typeof EngineClient>[0]["wsFactory"];
  fetchFn?: typeof fetch;
  transitionPollMs?: number;
} = {}): Dashboard {
  const store = new SessionStore(15);
  const root = doc.getElementById("app") ?? doc.body;
  root.innerHTML = `
    <header>
      <h1>exoplan dashboard</h1>
      <span id="status" class="pill connecting">connecting</span>
      <span id="badge" class="badge">—</span>
    </header>
    <div id="banner" class="banner hidden"></div>
    <section class="commands">
      <div id="buttons"></div>
      <form id="say-form">
        <span class="prefix">robot</span>
        <input id="say" type="text" placeholder="walk forward" autocomplete="off" />
        <button type="submit">Say</button>
      </form>
      <div id="verdict" class="verdict"></div>
    </section>
    <section class="charts">
      <label>side
        <select id="side"><option value="left">left</option><option value="right">right</option></select>
      </label>
      <canvas id="chart-hip" width="760" height="120"></canvas>
      <canvas id="chart-knee" width="760" height="120"></canvas>
      <canvas id="chart-ankle" width="760" height="120"></canvas>
      <canvas id="chart-scalars" width="760" height="120"></canvas>
    </section>
    <div id="toasts" class="toasts"></div>
  `;

  const el = {
    badge: doc.getElementById("badge") as HTMLElement,
    statusPill: doc.getElementById("status") as HTMLElement,
    banner: doc.getElementById("banner") as HTMLElement,
    toasts: doc.getElementById("toasts") as HTMLElement,
    verdict: doc.getElementById("verdict") as HTMLElement,
    textInput: doc.getElementById("say") as HTMLInputElement,
    buttons: new Map<string, HTMLButtonElement>(),
    sideSelect: doc.getElementById("side") as HTMLSelectElement,
  };

  const jointCharts = JOINT_TYPES.map(
    (joint) =>
      new StripChart(
        doc.getElementById(`chart-${joint}`) as HTMLCanvasElement,
        [
          { label: `${joint} desired`, color: "#e8b93e", dashed: true },
          { label: `${joint} actual`, color: "#5ec8f2" },
        ],
        store.windowSeconds,
        `${joint} [deg]`,
      ),
  );
  const scalarChart = new StripChart(
    doc.getElementById("chart-scalars") as HTMLCanvasElement,
    [
      { label: "omega", color: "#f06292" },
      { label: "r", color: "#81c784" },
      { label: "lambda", color: "#ba9cf2" },
    ],
    store.windowSeconds,
    "oscillator",
  );

  const toast = (message: string, kind = "info") => {
    const node = doc.createElement("div");
    node.className = `toast ${kind}`;
    node.textContent = message;
    el.toasts.appendChild(node);
    setTimeout(() => node.remove(), 4000);
  };

  const client = new EngineClient({
    url: engineUrl,
    wsFactory: opts.wsFactory,
    fetchFn: opts.fetchFn,
    transitionPollMs: opts.transitionPollMs,
    onStatus: (status, detail) => store.setStatus(status, detail ?? ""),
    onSnapshot: (snap) => store.applySnapshot(snap),
    onSample: (sample) => {
      store.pushSample(sample);
      feedCharts(sample);
    },
    onTransitions: (entries) => {
      const before = store.lastCommand?.verdict;
      store.applyTransitions(entries);
      const after = store.lastCommand;
      if (after && before === "pending" && after.verdict === "rejected") {
        toast(`${LABELS[after.intent] ?? after.intent} rejected: ${after.reason ?? ""}`, "error");
      }
    },
    onNotice: (message) => toast(message, "warn"),
  });

  function feedCharts(sample: TelemetrySample): void {
    const side = el.sideSelect.value;
    JOINT_TYPES.forEach((joint, i) => {
      jointCharts[i].push({
        t: sample.t,
        values: [sample.q_des[`${side}_${joint}`], sample.q_act[`${side}_${joint}`]],
      });
    });
    scalarChart.push({ t: sample.t, values: [sample.omega, sample.r, sample.lambda] });
  }

  el.sideSelect.addEventListener("change", () => {
    jointCharts.forEach((c) => c.clear());
  });

  const send = (type: "intent" | "text", payload: string, intentLabel: string) => {
    store.noteCommandSent(intentLabel);
    void client.sendCommand(type, payload);
  };

  const buttonsBox = doc.getElementById("buttons") as HTMLElement;
  for (const intent of INTENTS) {
    const button = doc.createElement("button");
    button.textContent = LABELS[intent];
    button.dataset.intent = intent;
    button.addEventListener("click", () => send("intent", intent, intent));
    buttonsBox.appendChild(button);
    el.buttons.set(intent, button);
  }

  (doc.getElementById("say-form") as HTMLFormElement).addEventListener("submit", (ev) => {
    ev.preventDefault();
    const words = el.textInput.value.trim();
    if (!words) return;
    send("text", `robot ${words}`, words); // gate word applied automatically
    el.textInput.value = "";
  });

  store.onChange(() => {
    el.badge.textContent = prettyState(store.fsm);
    el.statusPill.textContent = store.status;
    el.statusPill.className = `pill ${store.status}`;
    const isError = store.status === "error";
    el.banner.classList.toggle("hidden", !isError);
    if (isError) el.banner.textContent = `engine unreachable — ${store.statusDetail}`;
    const cmd = store.lastCommand;
    el.verdict.textContent = cmd
      ? `${LABELS[cmd.intent] ?? cmd.intent}: ${cmd.verdict}${cmd.reason ? ` (${cmd.reason})` : ""}`
      : "";
  });

  const renderFrame = () => {
    jointCharts.forEach((c) => c.render());
    scalarChart.render();
  };

  return { client, store, renderFrame, elements: el };
}
