// Browser wiring: canvas painting, pointer-as-gaze capture, parameter
// sliders, and a client-driven tick loop capped at the clip frame rate.

import { GatewayClient } from "./client.js";
import { buildCutTimeline, buildMasterScene, buildPotentialBars, type DrawOp } from "./scene.js";
import { applyMessage, initialView, type Rect, type ViewState } from "./state.js";
import { canvasToClip, fitTransform } from "./transforms.js";

const canvas = document.getElementById("master") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const histogram = document.getElementById("histogram") as HTMLCanvasElement;
const hctx = histogram.getContext("2d")!;
const timelineEl = document.getElementById("timeline") as HTMLCanvasElement;
const tctx = timelineEl.getContext("2d")!;
const thetaEl = document.getElementById("theta") as HTMLSpanElement;
const frameEl = document.getElementById("frame") as HTMLSpanElement;
const toastEl = document.getElementById("toast") as HTMLDivElement;
const fixtureSelect = document.getElementById("fixture") as HTMLSelectElement;
const connectBtn = document.getElementById("connect") as HTMLButtonElement;

let view: ViewState = initialView();
let client: GatewayClient | null = null;
let pointer: { x: number; y: number } | null = null;
let lastTick = 0;
let actorBoxesByFrame: Map<number, Rect[]> = new Map();

function paint(ops: DrawOp[]): void {
  for (const op of ops) {
    switch (op.kind) {
      case "clear":
        ctx.fillStyle = op.color;
        ctx.fillRect(0, 0, canvas.width, canvas.height);
        break;
      case "rect":
        if (op.fill) {
          ctx.fillStyle = op.fill;
          ctx.fillRect(op.x, op.y, op.w, op.h);
        }
        ctx.strokeStyle = op.stroke;
        ctx.lineWidth = op.lineWidth;
        ctx.strokeRect(op.x, op.y, op.w, op.h);
        break;
      case "dot":
        ctx.fillStyle = op.fill;
        ctx.beginPath();
        ctx.arc(op.x, op.y, op.r, 0, 2 * Math.PI);
        ctx.fill();
        break;
      case "label":
        ctx.fillStyle = op.color;
        ctx.font = "14px system-ui, sans-serif";
        ctx.fillText(op.text, op.x, op.y);
        break;
    }
  }
}

function paintPanels(): void {
  hctx.fillStyle = "#181a1f";
  hctx.fillRect(0, 0, histogram.width, histogram.height);
  const bars = buildPotentialBars(view);
  const bw = histogram.width / Math.max(1, bars.length);
  for (let i = 0; i < bars.length; i++) {
    const b = bars[i];
    const h = b.value * (histogram.height - 14);
    hctx.fillStyle = b.color;
    hctx.globalAlpha = b.selected ? 1.0 : 0.45;
    hctx.fillRect(i * bw + 3, histogram.height - h, bw - 6, h);
    hctx.globalAlpha = 1.0;
  }
  tctx.fillStyle = "#181a1f";
  tctx.fillRect(0, 0, timelineEl.width, timelineEl.height);
  const segs = buildCutTimeline(view);
  const total = segs.reduce((acc, s) => acc + s.len, 0) || 1;
  let x = 0;
  for (const seg of segs) {
    const w = (seg.len / total) * timelineEl.width;
    tctx.fillStyle = seg.color;
    tctx.fillRect(x, 4, Math.max(1, w - 1), timelineEl.height - 8);
    x += w;
  }
  thetaEl.textContent = String(view.theta);
  frameEl.textContent = view.frame === null ? "-" : String(view.frame);
  toastEl.textContent = view.toast ?? "";
  toastEl.style.display = view.toast ? "block" : "none";
}

function render(): void {
  const boxes = view.frame !== null ? actorBoxesByFrame.get(view.frame) ?? [] : [];
  paint(buildMasterScene(view, canvas.width, canvas.height, boxes));
  paintPanels();
}

async function loadTracks(fixture: string): Promise<void> {
  actorBoxesByFrame = new Map();
  const res = await fetch(`/fixtures/${fixture}/tracks.csv`);
  if (!res.ok) {
    return;
  }
  const lines = (await res.text()).trim().split("\n");
  for (const line of lines.slice(1)) {
    const [frame, , x, y, w, h] = line.split(",");
    const f = Number(frame);
    if (!actorBoxesByFrame.has(f)) {
      actorBoxesByFrame.set(f, []);
    }
    actorBoxesByFrame.get(f)!.push([Number(x), Number(y), Number(w), Number(h)]);
  }
}

function loop(now: number): void {
  requestAnimationFrame(loop);
  if (!client || !view.clip) {
    render();
    return;
  }
  const interval = 1000 / view.clip.fps;
  if (now - lastTick < interval) {
    return;
  }
  lastTick = now;
  if (pointer) {
    const t = fitTransform(canvas.width, canvas.height, view.clip.width, view.clip.height);
    const clipPt = canvasToClip(t, pointer.x, pointer.y);
    view = { ...view, pointerClip: clipPt };
    if (clipPt) {
      client.sendGaze([{ user: 0, x: clipPt.x, y: clipPt.y }]);
    }
  } else {
    view = { ...view, pointerClip: null };
  }
  client.tick();
  render();
}

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  // CSS scaling: canvas backing pixels vs layout pixels
  pointer = {
    x: (ev.clientX - rect.left) * (canvas.width / rect.width),
    y: (ev.clientY - rect.top) * (canvas.height / rect.height),
  };
});
canvas.addEventListener("pointerleave", () => {
  pointer = null;
});

for (const id of ["alpha_continuity", "lambda_transition", "gamma_cut", "gamma_stay", "sigma_gaze"]) {
  const slider = document.getElementById(id) as HTMLInputElement | null;
  if (slider) {
    slider.addEventListener("change", () => {
      client?.setParams({ [id]: Number(slider.value) });
    });
  }
}

connectBtn.addEventListener("click", async () => {
  const fixture = fixtureSelect.value;
  await loadTracks(fixture);
  const ws = new WebSocket(`ws://${location.host}/ws`);
  ws.onopen = () => {
    client = new GatewayClient(ws as unknown as import("./client.js").SocketLike);
    client.onMessage = (msg) => {
      view = applyMessage(view, msg);
    };
    client.create(fixture);
  };
});

async function listFixtures(): Promise<void> {
  try {
    const res = await fetch("/fixtures");
    const data = (await res.json()) as { fixtures: string[] };
    for (const f of data.fixtures) {
      const opt = document.createElement("option");
      opt.value = f;
      opt.textContent = f;
      fixtureSelect.appendChild(opt);
    }
  } catch {
    // gateway offline; leave the selector empty
  }
}

void listFixtures();
requestAnimationFrame(loop);
