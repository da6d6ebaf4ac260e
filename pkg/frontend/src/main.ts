/** Browser entry point: wires the client, flow, and view together. */

import { SurveyClient } from "./api.js";
import { SessionFlow } from "./flow.js";
import { render } from "./view.js";

function participantKey(): string {
  const params = new URLSearchParams(window.location.search);
  const fromUrl = params.get("participant");
  if (fromUrl) return fromUrl;
  const stored = window.localStorage.getItem("idbench-participant");
  if (stored) return stored;
  const generated = `p-${Math.random().toString(36).slice(2, 10)}`;
  window.localStorage.setItem("idbench-participant", generated);
  return generated;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const endpoint = params.get("service") ?? window.location.origin;
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const client = new SurveyClient(endpoint);
  const flow = new SessionFlow(client, participantKey());

  const stored = window.localStorage.getItem("idbench-session") ?? undefined;
  await flow.start(stored);
  if (flow.session) {
    window.localStorage.setItem("idbench-session", flow.session.session_id);
  }
  render(flow, root);
}

void boot().catch((error) => {
  const root = document.getElementById("app");
  if (root) {
    root.textContent = `Could not reach the survey service: ${error}`;
  }
});
