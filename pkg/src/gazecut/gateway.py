"""Live session service: streamed gaze in, edit decisions out.

One WebSocket connection drives one editing session over a prepared fixture
(tracks + clip, with candidate crops precomputed at session creation).  The
client streams gaze samples and tick messages; every tick after warm-up
yields exactly one decision event.  A handful of cost parameters can be tuned
live; structural parameters (look-ahead, filter windows, minimum duration)
require a new session.

Message vocabulary (JSON text frames, all carrying "type"):
  client -> server: create, gaze, tick, set_params, close
  server -> client: manifest, buffering, decision, error
Fixture data is also served over plain HTTP GET /fixtures/{id}/manifest and
/fixtures/{id}/tracks.csv.
"""
from __future__ import annotations

import asyncio
import json
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from . import ingest
from .ingest import IngestError
from .selector import OnlineEngine
from .shotgen import generate_shot_streams

LIVE_TUNABLE = {
    "alpha_continuity",
    "lambda_transition",
    "gamma_cut",
    "gamma_stay",
    "mu_overlap",
    "upsilon_overlap",
    "sigma_gaze",
}
STRUCTURAL = {
    "lookahead_frames",
    "min_shot_frames",
    "filter",
    "framing",
    "o_low",
    "o_high",
    "m_stay",
    "epsilon_gaze",
}


class Session:
    """One live editing session: engine plus gaze buffering and the tick clock."""

    def __init__(self, session_id: str, tracks, params, streams):
        self.session_id = session_id
        self.tracks = tracks
        self.params = params
        self.engine = OnlineEngine(tracks, params, streams=streams)
        self.engine_streams = streams
        self.gaze_buffer: dict[int, list[list[float]]] = {}
        self.closed = False
        self.lock = asyncio.Lock()

    @property
    def clip(self):
        return self.tracks.clip

    def ingest_gaze(self, samples: list[dict]) -> int:
        """Buffer samples for their frame (late ones go to the next tick)."""
        count = 0
        for s in samples:
            frame = int(s.get("frame", self.engine.in_frame))
            if frame < self.engine.in_frame:
                frame = self.engine.in_frame  # late: next unfilled column
            x = float(min(max(s["x"], 0.0), self.clip.width))
            y = float(min(max(s["y"], 0.0), self.clip.height))
            self.gaze_buffer.setdefault(frame, []).append([x, y])
            count += 1
        return count

    def tick(self) -> dict:
        """Advance one frame; returns the wire message for this tick."""
        engine = self.engine
        if engine.in_frame < self.clip.frame_count:
            pts = np.array(
                self.gaze_buffer.pop(engine.in_frame, []), dtype=np.float64
            ).reshape(-1, 2)
            event = engine.push_frame(pts)
        elif engine.state.window.count > 0:
            from .selector import drain_one

            event = drain_one(engine.state)
            engine.events.append(event)
        else:
            return {
                "type": "error",
                "session_id": self.session_id,
                "code": "end_of_clip",
                "msg": "all frames decided",
            }
        if event is None:
            capacity = engine.state.window.capacity
            remaining = capacity - 1 - engine.state.window.count
            return {
                "type": "buffering",
                "session_id": self.session_id,
                "remaining": int(remaining),
            }
        d = event.decision
        crops = [
            [b.x, b.y, b.w, b.h]
            for b in (s.crops[d.frame] for s in self.engine_streams)
        ]
        return {
            "type": "decision",
            "session_id": self.session_id,
            "frame": d.frame,
            "shot_id": d.shot_id,
            "crop": [d.crop.x, d.crop.y, d.crop.w, d.crop.h],
            "potentials": [float(v) for v in event.potentials],
            "theta": int(event.shot_timer),
            "cut": bool(event.cut),
            "crops": crops,
        }

    def update_params(self, subset: dict) -> dict:
        rejected = [k for k in subset if k in STRUCTURAL]
        unknown = [k for k in subset if k not in LIVE_TUNABLE and k not in STRUCTURAL]
        if rejected:
            return {
                "type": "error",
                "session_id": self.session_id,
                "code": "requires_new_session",
                "msg": f"structural parameters need a new session: {sorted(rejected)}",
            }
        if unknown:
            return {
                "type": "error",
                "session_id": self.session_id,
                "code": "invalid_param",
                "msg": f"unknown parameters: {sorted(unknown)}",
            }
        try:
            new_params = ingest.merge_params(self.params, subset)
        except IngestError as e:
            return {
                "type": "error",
                "session_id": self.session_id,
                "code": "invalid_param",
                "msg": str(e),
            }
        self.params = new_params
        engine = self.engine
        engine.params = new_params
        from .editcost import CostParams

        engine.cp = CostParams.from_params(new_params, self.clip.fps)
        engine.state.cp = engine.cp
        engine.state.alpha = new_params.alpha_continuity
        return {
            "type": "ack",
            "session_id": self.session_id,
            "applied": {k: subset[k] for k in subset},
        }


def load_fixture(fixtures_root: Path, fixture_id: str):
    fdir = fixtures_root / fixture_id
    clip_path = fdir / "clip.json"
    tracks_path = fdir / "tracks.csv"
    if not clip_path.exists() or not tracks_path.exists():
        raise IngestError(f"unknown fixture {fixture_id!r}")
    clip = ingest.load_clip(str(clip_path))
    tracks = ingest.parse_tracks(str(tracks_path), clip)
    params_path = fdir / "params.json"
    params = ingest.load_params(str(params_path) if params_path.exists() else None, clip)
    return tracks, params


def create_app(fixtures_root: str | Path, static_dir: str | Path | None = None) -> FastAPI:
    fixtures_root = Path(fixtures_root)
    app = FastAPI(title="gazecut gateway")
    sessions: dict[str, Session] = {}
    stream_cache: dict[tuple, list] = {}

    @app.get("/fixtures/{fixture_id}/manifest")
    def fixture_manifest(fixture_id: str):
        fdir = fixtures_root / fixture_id
        if not (fdir / "clip.json").exists():
            return JSONResponse({"error": f"unknown fixture {fixture_id!r}"}, status_code=404)
        clip = ingest.load_clip(str(fdir / "clip.json"))
        return {
            "id": fixture_id,
            "clip": {
                "width": clip.width,
                "height": clip.height,
                "fps": clip.fps,
                "frame_count": clip.frame_count,
            },
            "files": sorted(p.name for p in fdir.iterdir() if p.is_file()),
        }

    @app.get("/fixtures/{fixture_id}/tracks.csv")
    def fixture_tracks(fixture_id: str):
        path = fixtures_root / fixture_id / "tracks.csv"
        if not path.exists():
            return JSONResponse({"error": f"unknown fixture {fixture_id!r}"}, status_code=404)
        return FileResponse(path, media_type="text/csv")

    @app.get("/fixtures")
    def fixture_list():
        out = []
        if fixtures_root.exists():
            for p in sorted(fixtures_root.iterdir()):
                if (p / "clip.json").exists():
                    out.append(p.name)
        return {"fixtures": out}

    async def handle_create(ws: WebSocket, msg: dict) -> Session | None:
        fixture = msg.get("fixture")
        try:
            tracks, params = load_fixture(fixtures_root, str(fixture))
            if msg.get("params"):
                params = ingest.merge_params(params, msg["params"])
        except IngestError as e:
            await ws.send_json({"type": "error", "session_id": None,
                                "code": "bad_fixture", "msg": str(e)})
            return None
        key = (str(fixture), json.dumps(
            {k: v for k, v in ingest.params_to_dict(params).items() if k in ("filter", "framing")},
            sort_keys=True,
        ))
        if key not in stream_cache:
            stream_cache[key] = generate_shot_streams(tracks, params)
        streams = stream_cache[key]
        session = Session(str(uuid.uuid4()), tracks, params, streams)
        sessions[session.session_id] = session
        from .shotgen import order_actors

        ordering = order_actors(tracks)
        await ws.send_json({
            "type": "manifest",
            "session_id": session.session_id,
            "clip": {
                "width": session.clip.width,
                "height": session.clip.height,
                "fps": session.clip.fps,
                "frame_count": session.clip.frame_count,
            },
            "actors": ordering,
            "shots": [
                {
                    "shot_id": s.spec.shot_id,
                    "group": list(s.spec.group),
                    "size_class": s.spec.size_class.value,
                    "actor_ids": list(s.actor_ids),
                    "crop0": [s.crops[0].x, s.crops[0].y, s.crops[0].w, s.crops[0].h],
                }
                for s in streams
            ],
            "lookahead": session.params.lookahead_frames,
            "warmup": session.engine.state.window.capacity - 1,
            "clock": msg.get("clock", "client"),
        })
        if msg.get("clock") == "server":
            session.clock_task = asyncio.create_task(_server_clock(ws, session))
        return session

    async def _server_clock(ws: WebSocket, session: Session):
        interval = 1.0 / session.clip.fps
        try:
            while not session.closed:
                async with session.lock:
                    out = session.tick()
                await ws.send_json(out)
                if out.get("code") == "end_of_clip":
                    return
                await asyncio.sleep(interval)
        except Exception:
            return

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session: Session | None = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_json({"type": "error", "session_id": None,
                                        "code": "bad_message", "msg": "not JSON"})
                    continue
                mtype = msg.get("type")
                if mtype == "create":
                    session = await handle_create(ws, msg)
                    continue
                if session is None:
                    await ws.send_json({"type": "error", "session_id": None,
                                        "code": "no_session",
                                        "msg": "send a create message first"})
                    continue
                if mtype == "gaze":
                    async with session.lock:
                        n = session.ingest_gaze(msg.get("samples", []))
                    await ws.send_json({"type": "ack", "session_id": session.session_id,
                                        "buffered": n})
                elif mtype == "tick":
                    async with session.lock:
                        out = session.tick()
                    await ws.send_json(out)
                elif mtype == "set_params":
                    async with session.lock:
                        out = session.update_params(msg.get("params", {}))
                    await ws.send_json(out)
                elif mtype == "close":
                    session.closed = True
                    sessions.pop(session.session_id, None)
                    break
                else:
                    await ws.send_json({"type": "error", "session_id": session.session_id,
                                        "code": "bad_message",
                                        "msg": f"unknown type {mtype!r}"})
        except WebSocketDisconnect:
            pass
        finally:
            if session is not None:
                session.closed = True
                sessions.pop(session.session_id, None)

    if static_dir is not None and Path(static_dir).exists():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")
    return app


def main(argv: list[str] | None = None) -> int:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="gazecut live gateway")
    parser.add_argument("--fixtures", required=True, help="fixtures root directory")
    parser.add_argument("--static", default=None, help="console static files to serve")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8008)
    args = parser.parse_args(argv)
    app = create_app(args.fixtures, args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    import sys

    sys.exit(main())
