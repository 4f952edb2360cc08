// Browser entry point: connects to the story server, folds the message
// stream into a SessionView, and renders it. All game state lives on the
// server; this file is DOM plumbing around the pure reducer in view.ts.

import { encodeClient, parseServer } from "./protocol.js";
import { applyServer, emptyView, SessionView } from "./view.js";
import { drawChart } from "./chart.js";

const TICK_INTERVAL_MS = 5000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const addressInput = el<HTMLInputElement>("server-address");
const storySelect = el<HTMLSelectElement>("story-select");
const policySelect = el<HTMLSelectElement>("policy-select");
const seedInput = el<HTMLInputElement>("seed-input");
const connectButton = el<HTMLButtonElement>("connect");
const reconnectButton = el<HTMLButtonElement>("reconnect");
const banner = el<HTMLDivElement>("banner");
const titleLine = el<HTMLDivElement>("story-title");
const transcriptDiv = el<HTMLDivElement>("transcript");
const promptDiv = el<HTMLDivElement>("prompt");
const optionsDiv = el<HTMLDivElement>("options");
const swatch = el<HTMLDivElement>("swatch");
const avatarLabel = el<HTMLDivElement>("avatar-label");
const avatarAnimation = el<HTMLDivElement>("avatar-animation");
const statusLine = el<HTMLDivElement>("status");
const chartCanvas = el<HTMLCanvasElement>("epa-chart");
const gazeToggle = el<HTMLInputElement>("gaze-toggle");
const valenceSlider = el<HTMLInputElement>("valence-slider");
const valenceValue = el<HTMLSpanElement>("valence-value");
const proximitySlider = el<HTMLInputElement>("proximity-slider");
const proximityValue = el<HTMLSpanElement>("proximity-value");

// CSS colors for the swatch; keys are the wire color names.
const SWATCH_CSS: Record<string, string> = {
  Red: "#d32f2f",
  Black: "#111111",
  Green: "#2e7d32",
  DarkBlue: "#0d2a6b",
  White: "#f5f5f5",
};

let ws: WebSocket | null = null;
let view: SessionView = emptyView();
let epoch = Date.now();
let tickTimer: number | null = null;

function now(): number {
  return Math.max(0, Date.now() - epoch);
}

function send(msg: Parameters<typeof encodeClient>[0]): void {
  if (ws && ws.readyState === WebSocket.OPEN) {
    ws.send(encodeClient(msg));
  }
}

function connect(resumeId: string | null): void {
  if (ws) ws.close();
  ws = new WebSocket(addressInput.value);
  banner.textContent = "connecting...";
  banner.className = "banner info";

  ws.onopen = () => {
    banner.textContent = "";
    banner.className = "banner";
    if (resumeId) {
      send({ type: "resume", session_id: resumeId });
    } else {
      epoch = Date.now();
      sessionStorage.setItem("emoact-epoch", String(epoch));
      send({
        type: "start_session",
        story: storySelect.value,
        policy: policySelect.value,
        seed: Number(seedInput.value) || 0,
      });
    }
    if (tickTimer === null) {
      tickTimer = window.setInterval(() => {
        if (view.sessionId && !view.done) send({ type: "tick", t: now() });
      }, TICK_INTERVAL_MS);
    }
  };

  ws.onmessage = (ev) => {
    const msg = parseServer(String(ev.data));
    view = applyServer(view, msg);
    if (msg.type === "session_started") {
      sessionStorage.setItem("emoact-session", msg.session_id);
    }
    render();
  };

  ws.onclose = () => {
    banner.textContent = "connection lost - session is stale until you reconnect";
    banner.className = "banner error";
    reconnectButton.hidden = view.sessionId === null;
  };
}

connectButton.onclick = () => connect(null);

reconnectButton.onclick = () => {
  const stored = sessionStorage.getItem("emoact-session");
  const storedEpoch = sessionStorage.getItem("emoact-epoch");
  if (storedEpoch) epoch = Number(storedEpoch);
  if (stored) connect(stored);
};

gazeToggle.onchange = () => {
  send({ type: "perception", kind: "gaze", on_agent: gazeToggle.checked, t: now() });
};

valenceSlider.oninput = () => {
  valenceValue.textContent = valenceSlider.value;
};
valenceSlider.onchange = () => {
  send({
    type: "perception",
    kind: "user_emotion",
    valence: Number(valenceSlider.value),
    t: now(),
  });
};

proximitySlider.oninput = () => {
  proximityValue.textContent = `${proximitySlider.value} m`;
};
proximitySlider.onchange = () => {
  send({
    type: "perception",
    kind: "proximity",
    distance_m: Number(proximitySlider.value),
    t: now(),
  });
};

function render(): void {
  titleLine.textContent = view.title
    ? `${view.title} (policy ${view.policy}, seed ${view.seed})`
    : "";

  transcriptDiv.replaceChildren(
    ...view.transcript.map((sentence) => {
      const p = document.createElement("p");
      p.textContent = sentence;
      return p;
    }),
  );
  transcriptDiv.scrollTop = transcriptDiv.scrollHeight;

  // Option buttons exist exactly while a decision is pending.
  promptDiv.textContent = view.pending?.prompt ?? "";
  optionsDiv.replaceChildren(
    ...(view.pending?.options ?? []).map((opt) => {
      const button = document.createElement("button");
      button.textContent = opt.text;
      button.onclick = () => {
        // Disable until the server answers with the next decision.
        for (const b of optionsDiv.querySelectorAll("button")) {
          b.disabled = true;
        }
        send({ type: "choice", option: opt.id, t: now() });
      };
      return button;
    }),
  );

  swatch.style.background = SWATCH_CSS[view.avatar.eyeColor] ?? view.avatar.eyeColor;
  swatch.title = view.avatar.eyeColor;
  avatarLabel.textContent = view.avatar.label;
  avatarAnimation.textContent = view.avatar.animation
    ? `animation: ${view.avatar.animation}`
    : "animation: (none)";

  const similarity =
    view.similarity === null ? "-" : view.similarity.toFixed(3);
  statusLine.textContent = view.done
    ? `the end - last feeling ${view.label}`
    : `feeling ${view.label} (similarity ${similarity})`;
  if (view.lastError) {
    banner.textContent = view.lastError;
    banner.className = "banner error";
  }

  drawChart(chartCanvas, view.impressionSeries, view.emotionSeries);
}

render();
