import { createDashboard } from "./app.js";

const params = new URLSearchParams(location.search);
const engineUrl = params.get("engine") ?? `${location.protocol}//${location.host}`;

const dashboard = createDashboard(document, engineUrl);
void dashboard.client.connect();

function frame(): void {
  dashboard.renderFrame();
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
