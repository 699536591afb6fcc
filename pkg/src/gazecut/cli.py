"""Command-line pipeline: ingest, edit, compare, benchmark, synthesize.

    gazecut run --tracks t.csv --gaze g.csv --clip clip.json --mode realtime --out out/
    gazecut compare a_edl.csv b_edl.csv
    gazecut bench --actors 3 --frames 2000
    gazecut synth --seed 7 --actors 3 --frames 2000 --out fixtures/scene7

Exit codes: 0 on success, 2 on validation errors.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import ingest, selector, stabilize
from .editcost import CostParams
from .ingest import EditParams, IngestError
from .model import (
    BBox,
    ClipInfo,
    EditDecision,
    EditDecisionList,
    edl_runs,
    match_rate,
)
from .shotgen import ShotStream, generate_shot_streams
from .synth import synth_scene


def write_edl_csv(path: Path, edl: EditDecisionList) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "shot_id", "x", "y", "w", "h"])
        for d in edl.decisions:
            writer.writerow(
                [d.frame, d.shot_id, repr(d.crop.x), repr(d.crop.y), repr(d.crop.w), repr(d.crop.h)]
            )


def read_edl_csv(path: Path, clip: ClipInfo | None = None) -> EditDecisionList:
    decisions = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["frame", "shot_id", "x", "y", "w", "h"]:
            raise IngestError(f"{path}: not an EDL CSV")
        for row in reader:
            if not row:
                continue
            decisions.append(
                EditDecision(
                    frame=int(row[0]),
                    shot_id=int(row[1]),
                    crop=BBox(float(row[2]), float(row[3]), float(row[4]), float(row[5])),
                )
            )
    if not decisions:
        raise IngestError(f"{path}: empty EDL")
    if clip is None:
        clip = ClipInfo(width=10**6, height=10**6, fps=25.0, frame_count=len(decisions))
    return EditDecisionList(clip=clip, decisions=decisions)


def write_runs_json(path: Path, edl: EditDecisionList) -> None:
    runs = [
        {"shot_id": sid, "start": start, "len": length}
        for sid, start, length in edl_runs(edl)
    ]
    path.write_text(json.dumps(runs, indent=2))


def write_rushes_csv(path: Path, streams: list[ShotStream]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "shot_id", "x", "y", "w", "h"])
        for s in streams:
            for t, b in enumerate(s.crops):
                writer.writerow([t, s.spec.shot_id, repr(b.x), repr(b.y), repr(b.w), repr(b.h)])


def write_trajectory_csv(path: Path, stream: ShotStream, signal: str = "cx") -> None:
    """Raw-vs-smoothed dump of one crop signal, ready for plotting."""
    getter = {"cx": lambda b: b.cx, "cy": lambda b: b.cy, "h": lambda b: b.h}[signal]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "raw", "smoothed"])
        for t, (raw, sm) in enumerate(zip(stream.raw_crops, stream.crops)):
            writer.writerow([t, repr(getter(raw)), repr(getter(sm))])


def _report(edl: EditDecisionList, mode: str, runtime_s: float,
            latencies_ms: list[float] | None, reference: EditDecisionList | None) -> dict:
    runs = edl_runs(edl)
    fps = edl.clip.fps
    durations = [length / fps for _, _, length in runs]
    report = {
        "mode": mode,
        "frames": len(edl.decisions),
        "cut_count": len(runs) - 1,
        "mean_shot_s": float(np.mean(durations)),
        "min_shot_s": float(np.min(durations)),
        "total_runtime_s": runtime_s,
        "match_rate": None,
        "latency": None,
    }
    if reference is not None:
        report["match_rate"] = match_rate(edl, reference)
    if latencies_ms:
        arr = np.asarray(latencies_ms)
        report["latency"] = {
            "mean_ms": float(arr.mean()),
            "p99_ms": float(np.percentile(arr, 99)),
            "max_ms": float(arr.max()),
        }
    return report


def _run_realtime_timed(tracks, gaze, params, streams) -> tuple[EditDecisionList, list[float]]:
    engine = selector.OnlineEngine(tracks, params, streams=streams)
    latencies = []
    for samples in gaze.frames:
        pts = np.array([[s.x, s.y] for s in samples], dtype=np.float64).reshape(-1, 2)
        t0 = time.perf_counter()
        engine.push_frame(pts)
        latencies.append((time.perf_counter() - t0) * 1000.0)
    engine.finish()
    return engine.to_edl(), latencies


def cmd_run(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    clip = ingest.load_clip(args.clip)
    params = ingest.load_params(args.params, clip)
    overrides = {}
    if args.lookahead is not None:
        overrides["lookahead_frames"] = args.lookahead
    if args.alpha is not None:
        overrides["alpha_continuity"] = args.alpha
    if overrides:
        params = ingest.merge_params(params, overrides)
    tracks = ingest.parse_tracks(args.tracks, clip)
    needs_gaze = args.mode in ("realtime", "offline", "greedy")
    if needs_gaze and not args.gaze:
        raise IngestError(f"gaze required for mode {args.mode}")
    gaze = ingest.parse_gaze(args.gaze, clip) if args.gaze else None
    if args.mode == "speaker" and not args.speakers:
        raise IngestError("speaker annotations required for mode speaker")
    speakers = ingest.parse_speakers(args.speakers) if args.speakers else []

    t0 = time.perf_counter()
    streams = generate_shot_streams(tracks, params)
    latencies = None
    reference = None
    if args.reference:
        reference = read_edl_csv(Path(args.reference), clip)
    if args.mode == "realtime":
        edl, latencies = _run_realtime_timed(tracks, gaze, params, streams)
    elif args.mode == "offline":
        edl, _objective = selector.run_offline_oracle(tracks, gaze, params, streams=streams)
    elif args.mode == "wide":
        edl = selector.run_wide(tracks, params, streams=streams)
    elif args.mode == "greedy":
        edl = selector.run_greedy(tracks, gaze, params, streams=streams)
    elif args.mode == "speaker":
        edl = selector.run_speaker(tracks, speakers, params, streams=streams)
    else:
        raise IngestError(f"unknown mode {args.mode}")
    runtime = time.perf_counter() - t0

    artifacts = {}
    write_edl_csv(out_dir / "edl.csv", edl)
    artifacts["edl"] = "edl.csv"
    write_runs_json(out_dir / "runs.json", edl)
    artifacts["runs"] = "runs.json"
    if args.dump_rushes:
        write_rushes_csv(out_dir / "rushes.csv", streams)
        artifacts["rushes"] = "rushes.csv"
    if args.dump_trajectory:
        sid, signal = args.dump_trajectory
        write_trajectory_csv(out_dir / "trajectory.csv", streams[int(sid)], signal)
        artifacts["trajectory"] = "trajectory.csv"
    report = _report(edl, args.mode, runtime, latencies, reference)
    (out_dir / "report.json").write_text(json.dumps(report, indent=2))
    artifacts["report"] = "report.json"
    manifest = {
        "artifacts": artifacts,
        "mode": args.mode,
        "params": ingest.params_to_dict(params),
        "clip": {
            "width": clip.width,
            "height": clip.height,
            "fps": clip.fps,
            "frame_count": clip.frame_count,
        },
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(json.dumps(report, indent=2))
    return 0


def cmd_compare(args) -> int:
    a = read_edl_csv(Path(args.edl_a))
    b = read_edl_csv(Path(args.edl_b))
    if len(a.decisions) != len(b.decisions):
        raise IngestError(
            f"length mismatch: {len(a.decisions)} vs {len(b.decisions)} frames"
        )
    runs_a = edl_runs(a)
    runs_b = edl_runs(b)
    diffs = []
    start = None
    for t, (da, db) in enumerate(zip(a.decisions, b.decisions)):
        if da.shot_id != db.shot_id:
            if start is None:
                start = t
        elif start is not None:
            diffs.append({"start": start, "len": t - start})
            start = None
    if start is not None:
        diffs.append({"start": start, "len": len(a.decisions) - start})
    result = {
        "match_rate": match_rate(a, b),
        "frames": len(a.decisions),
        "cuts_a": len(runs_a) - 1,
        "cuts_b": len(runs_b) - 1,
        "cut_count_delta": (len(runs_a) - 1) - (len(runs_b) - 1),
        "diff_segments": diffs,
    }
    text = json.dumps(result, indent=2)
    if args.out:
        Path(args.out).write_text(text)
    print(text)
    return 0


def cmd_bench(args) -> int:
    if args.frames < 1:
        raise IngestError("need at least one frame to benchmark")
    stabilize.warmup_jit()
    # filter-only throughput
    rng = np.random.default_rng(args.seed)
    w = round(0.5 * args.fps)
    state = stabilize.FilterState(w, w)
    sig = np.cumsum(rng.normal(0, 2, 10_000)) + 500 + rng.normal(0, 3, 10_000)
    for v in sig[:200]:
        state.push(float(v))
    state = stabilize.FilterState(w, w)
    t0 = time.perf_counter()
    for v in sig:
        state.push(float(v))
    filter_fps = len(sig) / (time.perf_counter() - t0)

    # full pipeline on a synthetic scene, streaming end to end
    tracks, gaze, _ = synth_scene(
        seed=args.seed, n_actors=args.actors, frames=args.frames, fps=args.fps
    )
    params = ingest.load_params(args.params, tracks.clip) if args.params else ingest.default_params(tracks.clip)
    gaze_pts = [
        np.array([[s.x, s.y] for s in fr], dtype=np.float64).reshape(-1, 2)
        for fr in gaze.frames
    ]
    warm = selector.OnlineEngine(tracks, params)
    for pts in gaze_pts[: min(200, len(gaze_pts))]:
        warm.push_frame(pts)
    engine = selector.OnlineEngine(tracks, params)
    latencies = []
    for pts in gaze_pts:
        t0 = time.perf_counter()
        engine.push_frame(pts)
        latencies.append(time.perf_counter() - t0)
    engine.finish()
    arr = np.asarray(latencies)
    report = {
        "filter_only_fps": filter_fps,
        "pipeline_actors": args.actors,
        "pipeline_frames": args.frames,
        "pipeline_fps": float(1.0 / arr.mean()),
        "pipeline_latency_ms": {
            "mean": float(arr.mean() * 1000),
            "p99": float(np.percentile(arr, 99) * 1000),
            "max": float(arr.max() * 1000),
        },
    }
    print(json.dumps(report, indent=2))
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2))
    return 0


def cmd_synth(args) -> int:
    if args.actors < 1:
        raise IngestError("need at least one actor")
    if args.frames < 1:
        raise IngestError("need at least one frame")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tracks, gaze, speakers = synth_scene(
        seed=args.seed,
        n_actors=args.actors,
        frames=args.frames,
        fps=args.fps,
        width=args.width,
        height=args.height,
        gaze_script=args.gaze_script,
        n_users=args.users,
        with_speakers=args.with_speakers,
    )
    with (out_dir / "tracks.csv").open("w", newline="") as fh:
        ingest.write_tracks_csv(fh, tracks)
    with (out_dir / "gaze.csv").open("w", newline="") as fh:
        ingest.write_gaze_csv(fh, gaze)
    with (out_dir / "clip.json").open("w") as fh:
        ingest.write_clip_json(fh, tracks.clip)
    files = ["tracks.csv", "gaze.csv", "clip.json"]
    if args.with_speakers:
        with (out_dir / "speakers.csv").open("w", newline="") as fh:
            ingest.write_speakers_csv(fh, speakers)
        files.append("speakers.csv")
    print(json.dumps({"out": str(out_dir), "files": files, "seed": args.seed}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazecut", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="edit a clip and write EDL artifacts")
    run.add_argument("--tracks", required=True)
    run.add_argument("--gaze")
    run.add_argument("--speakers")
    run.add_argument("--clip", required=True)
    run.add_argument("--params")
    run.add_argument("--mode", default="realtime",
                     choices=["realtime", "offline", "wide", "greedy", "speaker"])
    run.add_argument("--out", required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--lookahead", type=int, default=None,
                     help="override lookahead_frames from the params file")
    run.add_argument("--alpha", type=float, default=None,
                     help="override alpha_continuity from the params file")
    run.add_argument("--reference", help="EDL CSV to compute match_rate against")
    run.add_argument("--dump-rushes", action="store_true")
    run.add_argument("--dump-trajectory", nargs=2, metavar=("SHOT_ID", "SIGNAL"),
                     default=None, help="write frame,raw,smoothed for one crop signal (cx|cy|h)")
    run.set_defaults(fn=cmd_run)

    comp = sub.add_parser("compare", help="compare two EDL CSV files")
    comp.add_argument("edl_a")
    comp.add_argument("edl_b")
    comp.add_argument("--out")
    comp.set_defaults(fn=cmd_compare)

    bench = sub.add_parser("bench", help="throughput benchmarks")
    bench.add_argument("--actors", type=int, default=3)
    bench.add_argument("--frames", type=int, default=2000)
    bench.add_argument("--fps", type=float, default=25.0)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--params")
    bench.add_argument("--out")
    bench.set_defaults(fn=cmd_bench)

    synth = sub.add_parser("synth", help="write synthetic fixture files")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--actors", type=int, default=3)
    synth.add_argument("--frames", type=int, default=2000)
    synth.add_argument("--fps", type=float, default=25.0)
    synth.add_argument("--width", type=int, default=1920)
    synth.add_argument("--height", type=int, default=1080)
    synth.add_argument("--users", type=int, default=1)
    synth.add_argument("--gaze-script", default="random",
                       help='"random" or "frame:actor,frame:actor,..."')
    synth.add_argument("--with-speakers", action="store_true")
    synth.add_argument("--out", required=True)
    synth.set_defaults(fn=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (IngestError, ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
