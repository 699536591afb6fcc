// Wire types for the gateway's WebSocket protocol (JSON text frames).

export interface ClipInfo {
  width: number;
  height: number;
  fps: number;
  frame_count: number;
}

export interface ShotInfo {
  shot_id: number;
  group: [number, number];
  size_class: string;
  actor_ids: number[];
  crop0: [number, number, number, number];
}

export interface ManifestMsg {
  type: "manifest";
  session_id: string;
  clip: ClipInfo;
  actors: number[];
  shots: ShotInfo[];
  lookahead: number;
  warmup: number;
  clock: string;
}

export interface BufferingMsg {
  type: "buffering";
  session_id: string;
  remaining: number;
}

export interface DecisionMsg {
  type: "decision";
  session_id: string;
  frame: number;
  shot_id: number;
  crop: [number, number, number, number];
  potentials: number[];
  theta: number;
  cut: boolean;
  crops?: [number, number, number, number][];
}

export interface ErrorMsg {
  type: "error";
  session_id: string | null;
  code: string;
  msg: string;
}

export interface AckMsg {
  type: "ack";
  session_id: string;
  buffered?: number;
  applied?: Record<string, number>;
}

export type ServerMsg = ManifestMsg | BufferingMsg | DecisionMsg | ErrorMsg | AckMsg;

export interface GazeSampleOut {
  frame?: number;
  user: number;
  x: number;
  y: number;
}

export function createMsg(fixture: string, params?: Record<string, number>): string {
  return JSON.stringify({ type: "create", fixture, params: params ?? {} });
}

export function gazeMsg(samples: GazeSampleOut[]): string {
  return JSON.stringify({ type: "gaze", samples });
}

export function tickMsg(): string {
  return JSON.stringify({ type: "tick" });
}

export function setParamsMsg(params: Record<string, number>): string {
  return JSON.stringify({ type: "set_params", params });
}

export function closeMsg(): string {
  return JSON.stringify({ type: "close" });
}

export function parseServerMsg(text: string): ServerMsg {
  return JSON.parse(text) as ServerMsg;
}
