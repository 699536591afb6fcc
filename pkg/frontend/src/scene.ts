// Pure scene construction: ViewState -> list of draw operations.  The canvas
// painter executes these verbatim, so tests can assert on renders without a
// DOM.  Identical states produce identical op lists.

import type { Rect, ViewState } from "./state.js";
import { clipToCanvas, fitTransform, type ViewTransform } from "./transforms.js";

export type DrawOp =
  | { kind: "clear"; color: string }
  | { kind: "rect"; tag: string; x: number; y: number; w: number; h: number;
      stroke: string; lineWidth: number; fill?: string }
  | { kind: "dot"; tag: string; x: number; y: number; r: number; fill: string }
  | { kind: "label"; text: string; x: number; y: number; color: string };

export const SHOT_COLORS = [
  "#4dc9f6", "#f67019", "#f53794", "#537bc4", "#acc236",
  "#166a8f", "#00a950", "#58595b", "#8549ba", "#e6c229",
  "#7bdff2", "#ff70a6",
];

export function shotColor(shotId: number): string {
  return SHOT_COLORS[shotId % SHOT_COLORS.length];
}

function opRect(
  t: ViewTransform, tag: string, r: Rect, stroke: string, lineWidth: number, fill?: string,
): DrawOp {
  const p = clipToCanvas(t, r[0], r[1]);
  return {
    kind: "rect",
    tag,
    x: p.x,
    y: p.y,
    w: r[2] * t.scale,
    h: r[3] * t.scale,
    stroke,
    lineWidth,
    fill,
  };
}

export function buildMasterScene(
  view: ViewState,
  canvasWidth: number,
  canvasHeight: number,
  actorBoxes: Rect[] = [],
): DrawOp[] {
  const ops: DrawOp[] = [{ kind: "clear", color: "#181a1f" }];
  if (!view.clip) {
    ops.push({ kind: "label", text: "connecting...", x: 16, y: 24, color: "#aaa" });
    return ops;
  }
  const t = fitTransform(canvasWidth, canvasHeight, view.clip.width, view.clip.height);
  ops.push(
    opRect(t, "stage", [0, 0, view.clip.width, view.clip.height], "#3a3f4a", 1, "#20242c"),
  );
  for (const box of actorBoxes) {
    ops.push(opRect(t, "actor", box, "#9aa3b2", 1));
  }
  view.candidateCrops.forEach((crop, i) => {
    if (i !== view.selectedShot) {
      ops.push(opRect(t, `candidate:${i}`, crop, shotColor(i) + "55", 1));
    }
  });
  if (view.selectedCrop && view.selectedShot !== null) {
    ops.push(
      opRect(t, `selected:${view.selectedShot}`, view.selectedCrop,
             shotColor(view.selectedShot), 3),
    );
  }
  if (view.pointerClip) {
    const p = clipToCanvas(t, view.pointerClip.x, view.pointerClip.y);
    ops.push({ kind: "dot", tag: "gaze", x: p.x, y: p.y, r: 5, fill: "#ffffffcc" });
  }
  if (view.buffering !== null) {
    ops.push({
      kind: "label",
      text: `buffering look-ahead: ${view.buffering}`,
      x: 16,
      y: 24,
      color: "#e6c229",
    });
  }
  return ops;
}

export interface Bar {
  shotId: number;
  value: number;
  color: string;
  selected: boolean;
}

export function buildPotentialBars(view: ViewState): Bar[] {
  return view.potentials.map((value, shotId) => ({
    shotId,
    value,
    color: shotColor(shotId),
    selected: shotId === view.selectedShot,
  }));
}

export interface TimelineSegment {
  shotId: number;
  color: string;
  len: number;
}

export function buildCutTimeline(view: ViewState): TimelineSegment[] {
  return view.cutTimeline.map((seg) => ({
    shotId: seg.shotId,
    color: shotColor(seg.shotId),
    len: seg.len,
  }));
}
