/** End-to-end: boots the Python engine, mounts the dashboard in happy-dom,
 * drives stand -> walk -> stop -> sit through /command, and asserts the
 * rendered state-badge sequence plus the command round-trip latency.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { Window } from "happy-dom";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createDashboard, prettyState, type Dashboard } from "../src/app.js";
import type { WsLike } from "../src/client.js";

const REPO_ROOT = resolve(__dirname, "..", "..");
const WS_PORT = 29000 + Math.floor(Math.random() * 500);
const UDP_PORT = WS_PORT + 500;
const ENGINE_URL = `http://127.0.0.1:${WS_PORT}`;

let engine: ChildProcess;
let dashboard: Dashboard;
let happyWindow: Window;

async function waitFor(predicate: () => boolean, timeoutMs: number, what: string): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((r) => setTimeout(r, 10));
  }
  throw new Error(`timeout waiting for ${what}`);
}

async function engineUp(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${ENGINE_URL}/state`);
      if (res.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("engine never came up");
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "exoplan-e2e-"));
  const config = join(dir, "config.json");
  writeFileSync(
    config,
    JSON.stringify({
      initial_state: "standing",
      transport: { ws_port: WS_PORT, udp_port: UDP_PORT },
    }),
  );
  engine = spawn("python3", ["-m", "exoplan.cli", "serve", "--config", config], {
    cwd: REPO_ROOT,
    stdio: "ignore",
  });
  await engineUp();

  happyWindow = new Window({ url: ENGINE_URL });
  dashboard = createDashboard(happyWindow.document as unknown as Document, ENGINE_URL, {
    wsFactory: (url: string) => new WebSocket(url) as unknown as WsLike,
    fetchFn: fetch.bind(globalThis),
    transitionPollMs: 30,
  });
  await dashboard.client.connect();
  await waitFor(() => dashboard.store.status === "online", 5_000, "online status");
});

afterAll(() => {
  dashboard?.client.close();
  engine?.kill();
  happyWindow?.close();
});

describe("dashboard against a live engine", () => {
  it("renders state and first telemetry within one second of connecting", async () => {
    await waitFor(
      () => dashboard.elements.badge.textContent === "standing" && dashboard.store.samples.length > 0,
      1_000,
      "badge + first sample",
    );
  });

  it("drives stand->walk->stop->sit and renders every state on the way", async () => {
    const badgeSequence: string[] = [];
    dashboard.store.onChange(() => {
      const text = dashboard.elements.badge.textContent ?? "";
      if (badgeSequence[badgeSequence.length - 1] !== text) badgeSequence.push(text);
    });

    const pressAndAwait = async (intent: string, expected: string, timeoutMs: number) => {
      const t0 = Date.now();
      dashboard.elements.buttons.get(intent)!.click();
      await waitFor(
        () => dashboard.elements.badge.textContent === prettyState(expected),
        timeoutMs,
        `badge -> ${expected}`,
      );
      return Date.now() - t0;
    };

    // round trip: button press -> rendered badge change, latency sim off
    const walkMs = await pressAndAwait("walk", "locomotion_initiation", 2_000);
    expect(walkMs).toBeLessThan(200);

    await waitFor(() => dashboard.elements.badge.textContent === "walking", 4_000, "walking");
    await waitFor(() => dashboard.store.lastCommand?.verdict === "accepted", 2_000, "walk verdict");

    await pressAndAwait("stop", "locomotion_completion", 2_000);
    await waitFor(() => dashboard.elements.badge.textContent === "standing", 4_000, "standing");

    await pressAndAwait("sit", "stand_to_sit", 2_000);
    await waitFor(() => dashboard.elements.badge.textContent === "sitting", 4_000, "sitting");

    await pressAndAwait("stand", "sit_to_stand", 2_000);
    await waitFor(() => dashboard.elements.badge.textContent === "standing", 4_000, "standing again");

    for (const expected of [
      "locomotion initiation",
      "walking",
      "locomotion completion",
      "standing",
      "stand to sit",
      "sitting",
      "sit to stand",
    ]) {
      expect(badgeSequence).toContain(expected);
    }
  });

  it("shows a rejected toast verdict for an illegal edge", async () => {
    // standing + stop has no edge
    dashboard.elements.buttons.get("stop")!.click();
    dashboard.store.noteCommandSent("stop");
    await waitFor(() => dashboard.store.lastCommand?.verdict === "rejected", 3_000, "rejection");
    expect(dashboard.elements.verdict.textContent).toContain("rejected");
  });

  it("auto-prefixes the gate word for typed commands", async () => {
    dashboard.elements.textInput.value = "walk forward";
    (happyWindow.document.getElementById("say-form") as unknown as HTMLFormElement).dispatchEvent(
      new happyWindow.Event("submit", { bubbles: true, cancelable: true }) as unknown as Event,
    );
    await waitFor(
      () => dashboard.elements.badge.textContent === "locomotion initiation",
      2_000,
      "typed walk",
    );
    // return to a quiet state
    await waitFor(() => dashboard.elements.badge.textContent === "walking", 4_000, "walking");
    dashboard.elements.buttons.get("stop")!.click();
    await waitFor(() => dashboard.elements.badge.textContent === "standing", 6_000, "standing");
  });

  it("streams oscillator scalars into the store", () => {
    const latest = dashboard.store.samples[dashboard.store.samples.length - 1];
    expect(latest.omega).toBeGreaterThan(0);
    expect(Object.keys(latest.q_des)).toContain("left_knee");
  });
});
