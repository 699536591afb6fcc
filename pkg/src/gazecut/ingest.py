"""Parsing and validation of track, gaze, speaker and parameter files.

File formats (all frames 0-based, all coordinates master-shot pixels):

  tracks:   CSV ``frame,actor_id,x,y,w,h``
  gaze:     CSV ``frame,user_id,gx,gy``
  speakers: CSV ``start_frame,end_frame,speaker_ids`` with ``;``-separated
            actor ids; an empty id list marks silence
  params:   flat JSON keyed by EditParams field names; ``filter`` and
            ``framing`` are nested objects
  clip:     JSON with width, height, fps, frame_count
"""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field, asdict
from typing import IO, Iterable, Union

from .model import BBox, ClipInfo, GazeSample, GazeStream, TrackSet

Source = Union[str, "os.PathLike[str]", IO[str]]

# Tracker dropouts up to this many missing frames are bridged by linear
# interpolation; anything longer is treated as the actor leaving the stage.
MAX_GAP_FRAMES = 25


class IngestError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class SpeakerAnnotation:
    """Half-open frame interval [start_frame, end_frame) with its speakers.

    An empty speaker set is explicit silence; frames not covered by any
    interval are implicit silence.
    """

    start_frame: int
    end_frame: int
    speakers: frozenset[int]

    def __post_init__(self):
        if self.start_frame < 0 or self.end_frame <= self.start_frame:
            raise IngestError(
                f"bad speaker interval [{self.start_frame},{self.end_frame})"
            )


@dataclass(frozen=True)
class FilterParams:
    """Fixed-lag smoother window sizes and derivative penalty weights."""

    w_past: int
    w_future: int
    lam1: float = 1.0
    lam2: float = 10.0
    lam3: float = 100.0


@dataclass(frozen=True)
class FramingParams:
    """Crop framing rules: medium-shot proportions, group padding, aspect."""

    ms_height_fraction: float = 0.55
    headroom_fraction: float = 0.08
    group_pad_fraction: float = 0.10
    output_aspect: float = 16.0 / 9.0


@dataclass(frozen=True)
class EditParams:
    """Every tunable of the editing pipeline, in one place."""

    lambda_transition: float
    o_low: float
    o_high: float
    mu_overlap: float
    upsilon_overlap: float
    gamma_cut: float
    gamma_stay: float
    m_stay: int
    min_shot_frames: int
    lookahead_frames: int
    alpha_continuity: float
    sigma_gaze: float
    epsilon_gaze: float
    filter: FilterParams
    framing: FramingParams

    def __post_init__(self):
        nonneg = {
            "lambda_transition": self.lambda_transition,
            "mu_overlap": self.mu_overlap,
            "upsilon_overlap": self.upsilon_overlap,
            "gamma_cut": self.gamma_cut,
            "gamma_stay": self.gamma_stay,
            "alpha_continuity": self.alpha_continuity,
            "filter.lam1": self.filter.lam1,
            "filter.lam2": self.filter.lam2,
            "filter.lam3": self.filter.lam3,
        }
        for name, v in nonneg.items():
            if v < 0:
                raise IngestError(f"{name} must be >= 0, got {v}")
        if not (0.0 <= self.o_low < self.o_high <= 1.0):
            raise IngestError(
                f"need 0 <= o_low < o_high <= 1, got {self.o_low}, {self.o_high}"
            )
        if self.lookahead_frames < 1:
            raise IngestError("lookahead_frames must be >= 1")
        if self.epsilon_gaze <= 0:
            raise IngestError("epsilon_gaze must be > 0")
        if self.sigma_gaze <= 0:
            raise IngestError("sigma_gaze must be > 0")
        if self.min_shot_frames < 1:
            raise IngestError("min_shot_frames must be >= 1")
        if self.m_stay < 1:
            raise IngestError("m_stay must be >= 1")
        if self.filter.w_past < 0 or self.filter.w_future < 0:
            raise IngestError("filter window sizes must be >= 0")
        if self.framing.output_aspect <= 0:
            raise IngestError("output_aspect must be > 0")


def default_params(clip: ClipInfo) -> EditParams:
    """Defaults scaled to the clip's frame rate and width."""
    half_second = round(0.5 * clip.fps)
    return EditParams(
        lambda_transition=4.0,
        o_low=0.3,
        o_high=0.8,
        mu_overlap=4.0,
        upsilon_overlap=10.0,
        gamma_cut=8.0,
        gamma_stay=4.0,
        m_stay=round(10 * clip.fps),
        min_shot_frames=round(1.5 * clip.fps),
        lookahead_frames=64,
        alpha_continuity=7.0,
        sigma_gaze=0.1 * clip.width,
        epsilon_gaze=1e-3,
        filter=FilterParams(w_past=half_second, w_future=half_second),
        framing=FramingParams(),
    )


def _open(source: Source):
    if hasattr(source, "read"):
        return source, False
    return open(source, "r", newline=""), True


def _rows(source: Source, expected_header: list[str], what: str):
    fh, owned = _open(source)
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{what}: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise IngestError(
                f"{what}: expected header {','.join(expected_header)}, "
                f"got {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            yield lineno, row
    finally:
        if owned:
            fh.close()


def _clamp_box(b: BBox, clip: ClipInfo) -> BBox:
    x1 = max(0.0, b.x)
    y1 = max(0.0, b.y)
    x2 = min(float(clip.width), b.x2)
    y2 = min(float(clip.height), b.y2)
    if x2 <= x1 or y2 <= y1:
        raise IngestError(f"box {b} lies fully outside the {clip.width}x{clip.height} frame")
    return BBox(x1, y1, x2 - x1, y2 - y1)


def parse_tracks(source: Source, clip: ClipInfo) -> TrackSet:
    """Read actor tracks, bridging short tracker dropouts by interpolation."""
    per_actor: dict[int, dict[int, BBox]] = {}
    count = 0
    for lineno, row in _rows(source, ["frame", "actor_id", "x", "y", "w", "h"], "tracks"):
        try:
            frame = int(row[0])
            actor = int(row[1])
            x, y, w, h = (float(v) for v in row[2:6])
        except (ValueError, IndexError):
            raise IngestError(f"tracks line {lineno}: malformed row {row!r}") from None
        if w <= 0 or h <= 0:
            raise IngestError(f"tracks line {lineno}: non-positive box size {w}x{h}")
        if frame < 0 or frame >= clip.frame_count:
            raise IngestError(
                f"tracks line {lineno}: frame {frame} outside [0,{clip.frame_count})"
            )
        track = per_actor.setdefault(actor, {})
        if frame in track:
            raise IngestError(
                f"tracks line {lineno}: duplicate observation for actor {actor} frame {frame}"
            )
        track[frame] = BBox(x, y, w, h)
        count += 1
    if count == 0:
        raise IngestError("tracks: no observations")

    frames: list[dict[int, BBox]] = [dict() for _ in range(clip.frame_count)]
    for actor, track in per_actor.items():
        known = sorted(track)
        for f in known:
            frames[f][actor] = _clamp_box(track[f], clip)
        for a, b in zip(known, known[1:]):
            gap = b - a - 1
            if gap == 0 or gap > MAX_GAP_FRAMES:
                continue
            ba, bb = track[a], track[b]
            for f in range(a + 1, b):
                u = (f - a) / (b - a)
                box = BBox(
                    ba.x + u * (bb.x - ba.x),
                    ba.y + u * (bb.y - ba.y),
                    ba.w + u * (bb.w - ba.w),
                    ba.h + u * (bb.h - ba.h),
                )
                frames[f][actor] = _clamp_box(box, clip)
    return TrackSet(clip, frames)


def parse_gaze(source: Source, clip: ClipInfo) -> GazeStream:
    """Read gaze samples, clamping points into the clip bounds."""
    frames: list[list[GazeSample]] = [[] for _ in range(clip.frame_count)]
    for lineno, row in _rows(source, ["frame", "user_id", "gx", "gy"], "gaze"):
        try:
            frame = int(row[0])
            user = int(row[1])
            gx = float(row[2])
            gy = float(row[3])
        except (ValueError, IndexError):
            raise IngestError(f"gaze line {lineno}: malformed row {row!r}") from None
        if frame < 0 or frame >= clip.frame_count:
            raise IngestError(
                f"gaze line {lineno}: frame {frame} outside [0,{clip.frame_count})"
            )
        gx = min(max(gx, 0.0), float(clip.width))
        gy = min(max(gy, 0.0), float(clip.height))
        frames[frame].append(GazeSample(user, frame, gx, gy))
    return GazeStream(clip, frames)


def parse_speakers(source: Source) -> list[SpeakerAnnotation]:
    """Read speaker intervals; frames not covered are implicit silence."""
    out: list[SpeakerAnnotation] = []
    for lineno, row in _rows(
        source, ["start_frame", "end_frame", "speaker_ids"], "speakers"
    ):
        try:
            start = int(row[0])
            end = int(row[1])
            raw = row[2].strip() if len(row) > 2 else ""
        except (ValueError, IndexError):
            raise IngestError(f"speakers line {lineno}: malformed row {row!r}") from None
        speakers = frozenset(int(s) for s in raw.split(";") if s.strip())
        try:
            out.append(SpeakerAnnotation(start, end, speakers))
        except IngestError as e:
            raise IngestError(f"speakers line {lineno}: {e}") from None
    out.sort(key=lambda s: s.start_frame)
    for a, b in zip(out, out[1:]):
        if b.start_frame < a.end_frame:
            raise IngestError(
                f"speakers: overlapping intervals [{a.start_frame},{a.end_frame}) "
                f"and [{b.start_frame},{b.end_frame})"
            )
    return out


def load_clip(source: Source) -> ClipInfo:
    fh, owned = _open(source)
    try:
        data = json.load(fh)
    finally:
        if owned:
            fh.close()
    try:
        return ClipInfo(
            width=int(data["width"]),
            height=int(data["height"]),
            fps=float(data["fps"]),
            frame_count=int(data["frame_count"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise IngestError(f"clip.json: {e}") from None


def _parse_aspect(value) -> float:
    if isinstance(value, str):
        if ":" in value:
            w, h = value.split(":", 1)
            return float(w) / float(h)
        return float(value)
    return float(value)


def load_params(source: Source | dict | None, clip: ClipInfo) -> EditParams:
    """Load parameters, filling anything missing from the clip-scaled defaults."""
    if source is None:
        data: dict = {}
    elif isinstance(source, dict):
        data = dict(source)
    else:
        fh, owned = _open(source)
        try:
            data = json.load(fh)
        finally:
            if owned:
                fh.close()
        if not isinstance(data, dict):
            raise IngestError("params: expected a JSON object")
    return merge_params(default_params(clip), data)


def merge_params(base: EditParams, overrides: dict) -> EditParams:
    """Apply a (possibly partial) dict of overrides onto existing params."""
    data = dict(overrides)
    fields = asdict(base)
    filt = dict(fields.pop("filter"))
    frm = dict(fields.pop("framing"))
    for key, value in data.items():
        if key == "filter":
            unknown = set(value) - set(filt)
            if unknown:
                raise IngestError(f"params: unknown filter keys {sorted(unknown)}")
            filt.update(value)
        elif key == "framing":
            sub = dict(value)
            if "output_aspect" in sub:
                sub["output_aspect"] = _parse_aspect(sub["output_aspect"])
            unknown = set(sub) - set(frm)
            if unknown:
                raise IngestError(f"params: unknown framing keys {sorted(unknown)}")
            frm.update(sub)
        elif key in fields:
            fields[key] = value
        else:
            raise IngestError(f"params: unknown key {key!r}")
    for k in ("m_stay", "min_shot_frames", "lookahead_frames"):
        fields[k] = int(round(fields[k]))
    for k in ("w_past", "w_future"):
        filt[k] = int(round(filt[k]))
    try:
        return EditParams(filter=FilterParams(**filt), framing=FramingParams(**frm), **fields)
    except TypeError as e:
        raise IngestError(f"params: {e}") from None


def params_to_dict(params: EditParams) -> dict:
    return asdict(params)


# --- serialization (fixture writing and round-trips) ---


def write_tracks_csv(fh: IO[str], tracks: TrackSet) -> None:
    writer = csv.writer(fh)
    writer.writerow(["frame", "actor_id", "x", "y", "w", "h"])
    for t, obs in enumerate(tracks.frames):
        for actor in sorted(obs):
            b = obs[actor]
            writer.writerow([t, actor, repr(b.x), repr(b.y), repr(b.w), repr(b.h)])


def write_gaze_csv(fh: IO[str], gaze: GazeStream) -> None:
    writer = csv.writer(fh)
    writer.writerow(["frame", "user_id", "gx", "gy"])
    for samples in gaze.frames:
        for s in samples:
            writer.writerow([s.frame, s.user_id, repr(s.x), repr(s.y)])


def write_speakers_csv(fh: IO[str], annotations: Iterable[SpeakerAnnotation]) -> None:
    writer = csv.writer(fh)
    writer.writerow(["start_frame", "end_frame", "speaker_ids"])
    for a in annotations:
        writer.writerow([a.start_frame, a.end_frame, ";".join(str(s) for s in sorted(a.speakers))])


def write_clip_json(fh: IO[str], clip: ClipInfo) -> None:
    json.dump(
        {
            "width": clip.width,
            "height": clip.height,
            "fps": clip.fps,
            "frame_count": clip.frame_count,
        },
        fh,
        indent=2,
    )
