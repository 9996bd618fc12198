/**
 * Browser entry point.  Wires DOM controls to the session view, streams
 * coalesced lead targets over the transport, and repaints the draw list at
 * the telemetry rate.  All logic lives in the imported pure modules; this
 * file only touches the DOM.
 */

import { WebSocketTransport, Transport } from "./client.js";
import { LeadCoalescer } from "./coalesce.js";
import { buildDrawList, DrawOp } from "./render.js";
import {
  applyServerLine,
  controlsEnabled,
  initialView,
  nudgeGripper,
  onConnecting,
  onDisconnected,
  SessionView,
  setLeadTarget,
  startRecording,
  stopRecording,
} from "./sessionView.js";
import {
  encode,
  leadMessage,
  N_JOINTS,
  saveMessage,
  startMessage,
  stopMessage,
} from "./protocol.js";

const MAX_LEAD_RATE = 60; // messages per second
const GRIP_NUDGE = 0.01; // rad per keypress

let view: SessionView = initialView();
let transport: Transport | null = null;
const coalescer = new LeadCoalescer(MAX_LEAD_RATE, () => performance.now() / 1000);

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
};

function sliderInputs(): HTMLInputElement[] {
  return Array.from({ length: N_JOINTS }, (_, j) =>
    $<HTMLInputElement>(`joint${j + 1}`),
  );
}

function syncControls(): void {
  const enabled = controlsEnabled(view);
  for (const el of [
    $<HTMLButtonElement>("start"),
    $<HTMLButtonElement>("stop"),
    $<HTMLButtonElement>("save"),
    $<HTMLSelectElement>("object"),
    ...sliderInputs(),
  ]) {
    (el as HTMLButtonElement).disabled = !enabled;
  }
  $("landing").style.display = enabled ? "none" : "block";
  $("panel").style.display = enabled ? "block" : "none";
  if (view.hello !== null) {
    const select = $<HTMLSelectElement>("object");
    if (select.options.length === 0) {
      for (const name of view.hello.objects) {
        const option = document.createElement("option");
        option.value = option.textContent = name;
        select.appendChild(option);
      }
    }
    sliderInputs().forEach((input, j) => {
      input.min = String(view.hello!.theta_min[j]);
      input.max = String(view.hello!.theta_max[j]);
      input.step = "0.001";
    });
  }
}

function syncSliders(): void {
  sliderInputs().forEach((input, j) => {
    if (document.activeElement !== input) {
      input.value = String(view.leadTargets[j]);
    }
  });
}

function paint(): void {
  const canvas = $<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const scale = 900;
  const toPx = (p: [number, number]): [number, number] => [
    60 + scale * p[0],
    canvas.height - 30 - scale * p[1],
  ];
  const side = $("sidebar");
  const seen = new Set<string>();
  for (const op of buildDrawList(view)) {
    if (op.kind === "line") {
      ctx.strokeStyle = op.color;
      ctx.lineWidth = op.width;
      ctx.beginPath();
      ctx.moveTo(...toPx(op.from));
      ctx.lineTo(...toPx(op.to));
      ctx.stroke();
    } else if (op.kind === "circle") {
      ctx.fillStyle = ctx.strokeStyle = op.color;
      ctx.beginPath();
      ctx.arc(...toPx(op.at), scale * op.radius, 0, 2 * Math.PI);
      if (op.fill) ctx.fill();
      else ctx.stroke();
    } else {
      seen.add(op.id);
      let row = document.getElementById(`op_${op.id}`);
      if (row === null) {
        row = document.createElement("div");
        row.id = `op_${op.id}`;
        side.appendChild(row);
      }
      if (op.kind === "bar") {
        const pct = Math.min(100, (100 * op.value) / op.max);
        row.innerHTML =
          `<span class="bar-label">${op.id}</span>` +
          `<span class="bar" style="width:${pct.toFixed(1)}%;` +
          `background:${op.color}"></span>`;
      } else {
        row.textContent = `${op.id}: ${op.text}`;
      }
    }
  }
  for (const row of Array.from(side.children)) {
    if (!seen.has(row.id.replace(/^op_/, ""))) row.remove();
  }
}

function sendControl(line: string): void {
  transport?.send(line);
}

async function connect(): Promise<void> {
  const url = $<HTMLInputElement>("endpoint").value.trim();
  view = onConnecting(view);
  syncControls();
  try {
    const ws = await WebSocketTransport.connect(url);
    transport = ws;
    ws.onLine((line) => {
      view = applyServerLine(view, line);
      syncControls();
    });
    ws.onClose(() => {
      transport = null;
      view = onDisconnected(view);
      syncControls();
    });
  } catch (err) {
    view = onDisconnected(view);
    view = { ...view, lastError: String(err) };
    syncControls();
  }
}

function wire(): void {
  $("connect").addEventListener("click", () => void connect());
  $("start").addEventListener("click", () => {
    const object = $<HTMLSelectElement>("object").value;
    view = startRecording(view);
    sendControl(encode(startMessage(object)));
  });
  $("stop").addEventListener("click", () => {
    view = stopRecording(view);
    sendControl(encode(stopMessage()));
  });
  $("save").addEventListener("click", () => sendControl(encode(saveMessage())));
  sliderInputs().forEach((input, j) => {
    input.addEventListener("input", () => {
      view = setLeadTarget(view, j, Number(input.value));
      coalescer.update(view.leadTargets);
    });
  });
  window.addEventListener("keydown", (event) => {
    if (!controlsEnabled(view)) return;
    if (event.key === "[") view = nudgeGripper(view, -GRIP_NUDGE);
    else if (event.key === "]") view = nudgeGripper(view, GRIP_NUDGE);
    else return;
    coalescer.update(view.leadTargets);
    syncSliders();
  });
  setInterval(() => {
    const q = coalescer.poll();
    if (q !== null) sendControl(encode(leadMessage(q)));
  }, 1000 / (2 * MAX_LEAD_RATE));
  const frame = (): void => {
    paint();
    syncSliders();
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
  syncControls();
}

wire();
