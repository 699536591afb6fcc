// Console view state: a pure fold over server messages.  No selection logic
// lives here; every rendered decision originates from a decision message.

import type { ManifestMsg, ServerMsg, ShotInfo } from "./protocol.js";

export type Rect = [number, number, number, number];

export interface RunSegment {
  shotId: number;
  start: number;
  len: number;
}

export interface ViewState {
  connected: boolean;
  sessionId: string | null;
  clip: { width: number; height: number; fps: number; frameCount: number } | null;
  shots: ShotInfo[];
  actors: number[];
  buffering: number | null;
  frame: number | null;
  selectedShot: number | null;
  selectedCrop: Rect | null;
  candidateCrops: Rect[];
  potentials: number[];
  theta: number;
  cutTimeline: RunSegment[];
  toast: string | null;
  pointerClip: { x: number; y: number } | null;
}

export function initialView(): ViewState {
  return {
    connected: false,
    sessionId: null,
    clip: null,
    shots: [],
    actors: [],
    buffering: null,
    frame: null,
    selectedShot: null,
    selectedCrop: null,
    candidateCrops: [],
    potentials: [],
    theta: 0,
    cutTimeline: [],
    toast: null,
    pointerClip: null,
  };
}

function applyManifest(view: ViewState, msg: ManifestMsg): ViewState {
  return {
    ...view,
    connected: true,
    sessionId: msg.session_id,
    clip: {
      width: msg.clip.width,
      height: msg.clip.height,
      fps: msg.clip.fps,
      frameCount: msg.clip.frame_count,
    },
    shots: msg.shots,
    actors: msg.actors,
    buffering: msg.warmup,
    candidateCrops: msg.shots.map((s) => s.crop0),
    potentials: msg.shots.map(() => 1 / Math.max(1, msg.shots.length)),
  };
}

const TIMELINE_LIMIT = 24;

export function applyMessage(view: ViewState, msg: ServerMsg): ViewState {
  switch (msg.type) {
    case "manifest":
      return applyManifest(view, msg);
    case "buffering":
      return { ...view, buffering: msg.remaining };
    case "decision": {
      const timeline = view.cutTimeline.slice();
      const last = timeline[timeline.length - 1];
      if (last && last.shotId === msg.shot_id && !msg.cut) {
        timeline[timeline.length - 1] = { ...last, len: last.len + 1 };
      } else {
        timeline.push({ shotId: msg.shot_id, start: msg.frame, len: 1 });
        if (timeline.length > TIMELINE_LIMIT) {
          timeline.shift();
        }
      }
      return {
        ...view,
        buffering: null,
        frame: msg.frame,
        selectedShot: msg.shot_id,
        selectedCrop: msg.crop,
        candidateCrops: msg.crops ?? view.candidateCrops,
        potentials: msg.potentials,
        theta: msg.theta,
        cutTimeline: timeline,
      };
    }
    case "error":
      if (msg.code === "end_of_clip") {
        return view;
      }
      return { ...view, toast: `${msg.code}: ${msg.msg}` };
    case "ack":
      return msg.applied ? { ...view, toast: null } : view;
    default:
      return view;
  }
}
