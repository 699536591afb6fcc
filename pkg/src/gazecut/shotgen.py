"""Candidate-shot generation: actor grouping and virtual pan-tilt-zoom crops.

For n actors ordered left to right there are n(n+1)/2 contiguous groups, each
giving one candidate shot per frame: a medium shot for single actors, a full
shot for groups.  Crop center and height are smoothed online by the fixed-lag
filter; width follows from the output aspect ratio, re-imposed after
smoothing, and the crop is then shifted (or, only if larger than the master
frame, uniformly shrunk) to lie inside the frame.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ingest import EditParams, FilterParams, FramingParams
from .model import BBox, ClipInfo, ShotSpec, SizeClass, TrackSet, union_boxes
from .stabilize import FilterBank, FilterState


def order_actors(tracks: TrackSet) -> list[int]:
    """Actor ids sorted left to right by median box center-x (ties by id)."""
    if not tracks.actor_ids:
        raise ValueError("track set has no actors")
    medians = []
    for actor in tracks.actor_ids:
        xs = [obs[actor].cx for obs in tracks.frames if actor in obs]
        medians.append((float(np.median(xs)), actor))
    medians.sort()
    return [actor for _, actor in medians]


def enumerate_groups(n: int) -> list[tuple[int, int]]:
    """All contiguous index intervals [a, b] over n actors, by size then start."""
    if n < 1:
        raise ValueError("need at least one actor")
    groups = []
    for size in range(1, n + 1):
        for a in range(0, n - size + 1):
            groups.append((a, a + size - 1))
    return groups


def build_shot_specs(n: int) -> list[ShotSpec]:
    specs = []
    for shot_id, (a, b) in enumerate(enumerate_groups(n)):
        size_class = SizeClass.MEDIUM_SHOT if a == b else SizeClass.FULL_SHOT
        specs.append(ShotSpec(shot_id=shot_id, group=(a, b), size_class=size_class))
    return specs


def fit_to_frame(cx: float, cy: float, w: float, h: float, clip: ClipInfo) -> BBox:
    """Shift a crop inside the master frame, shrinking only if it is larger."""
    scale = min(clip.width / w, clip.height / h, 1.0)
    w *= scale
    h *= scale
    x = min(max(cx - w / 2.0, 0.0), clip.width - w)
    y = min(max(cy - h / 2.0, 0.0), clip.height - h)
    return BBox(x, y, w, h)


def frame_group(
    boxes: list[BBox],
    size_class: SizeClass,
    framing: FramingParams,
    clip: ClipInfo,
) -> BBox:
    """Crop rectangle framing the given actor boxes, before stabilization.

    Medium shot: height is a fraction of the actor's box height, anchored
    with headroom above the box top.  Full shot: the union of the boxes padded
    on all sides; width follows the output aspect, growing the height only
    when the padded union is wider than that.
    """
    if not boxes:
        raise ValueError("cannot frame an empty group")
    aspect = framing.output_aspect
    if size_class is SizeClass.MEDIUM_SHOT:
        actor = boxes[0]
        h = framing.ms_height_fraction * actor.h
        y_top = actor.y - framing.headroom_fraction * h
        w = h * aspect
        cx = actor.cx
        cy = y_top + h / 2.0
    else:
        union = union_boxes(boxes)
        pad_w = framing.group_pad_fraction * union.w
        pad_h = framing.group_pad_fraction * union.h
        target_w = union.w + 2.0 * pad_w
        target_h = union.h + 2.0 * pad_h
        h = max(target_h, target_w / aspect)
        w = h * aspect
        cx = union.cx
        cy = union.cy
    return fit_to_frame(cx, cy, w, h, clip)


@dataclass
class ShotStream:
    """One virtual camera: per-frame crops for a fixed actor group."""

    spec: ShotSpec
    actor_ids: tuple[int, ...]
    crops: list[BBox] = field(default_factory=list)
    raw_crops: list[BBox] = field(default_factory=list)

    def crop_array(self) -> np.ndarray:
        return np.array([[b.x, b.y, b.w, b.h] for b in self.crops])


class RawCropper:
    """Per-group raw crop generator with hold-last semantics for absences."""

    def __init__(self, spec: ShotSpec, actor_ids: tuple[int, ...],
                 framing: FramingParams, clip: ClipInfo):
        self.spec = spec
        self.actor_ids = actor_ids
        self.framing = framing
        self.clip = clip
        self._last: BBox | None = None

    def crop(self, boxes_at_t: dict[int, BBox]) -> BBox:
        present = [boxes_at_t[a] for a in self.actor_ids if a in boxes_at_t]
        if len(present) == len(self.actor_ids):
            self._last = frame_group(present, self.spec.size_class, self.framing, self.clip)
            return self._last
        if self._last is not None:
            return self._last
        if present:
            self._last = frame_group(present, self.spec.size_class, self.framing, self.clip)
            return self._last
        raise ValueError(
            f"no member of group {self.actor_ids} visible at the start of the clip"
        )


class StreamBank:
    """Streaming crop generation for every candidate shot of a clip.

    push() takes one frame's actor boxes and returns the raw crops for that
    frame plus, once the smoothing filters are warm, the stabilized crops for
    the frame lagging w_future behind.  All center-x/center-y/height signals
    are smoothed in one filter bank call.
    """

    def __init__(self, croppers: list[RawCropper], filt: FilterParams, clip: ClipInfo,
                 parallel: bool = False):
        self.croppers = croppers
        self.clip = clip
        self.framing = croppers[0].framing
        self.bank = FilterBank(
            3 * len(croppers), filt.w_past, filt.w_future,
            filt.lam1, filt.lam2, filt.lam3, parallel=parallel,
        )

    def _assemble(self, sig: np.ndarray) -> list[BBox]:
        out = []
        for i in range(len(self.croppers)):
            cx, cy, h = sig[3 * i], sig[3 * i + 1], sig[3 * i + 2]
            w = h * self.framing.output_aspect
            out.append(fit_to_frame(cx, cy, w, h, self.clip))
        return out

    def push(self, boxes_at_t: dict[int, BBox]) -> tuple[list[BBox], list[BBox] | None]:
        raws = [c.crop(boxes_at_t) for c in self.croppers]
        sig = np.empty(3 * len(raws))
        for i, b in enumerate(raws):
            sig[3 * i] = b.cx
            sig[3 * i + 1] = b.cy
            sig[3 * i + 2] = b.h
        smoothed = self.bank.push(sig)
        if smoothed is None:
            return raws, None
        return raws, self._assemble(smoothed)

    def flush(self) -> list[list[BBox]]:
        """Remaining stabilized crops, one list per drained frame."""
        tail = self.bank.flush()
        return [self._assemble(tail[:, col]) for col in range(tail.shape[1])]


def make_stream_bank(
    tracks: TrackSet, params: EditParams, parallel: bool = False
) -> tuple[StreamBank, list[int]]:
    ordering = order_actors(tracks)
    specs = build_shot_specs(len(ordering))
    croppers = []
    for spec in specs:
        a, b = spec.group
        ids = tuple(ordering[a : b + 1])
        croppers.append(RawCropper(spec, ids, params.framing, tracks.clip))
    return StreamBank(croppers, params.filter, tracks.clip, parallel=parallel), ordering


def smooth_actor_tracks(tracks: TrackSet, filt: FilterParams) -> TrackSet:
    """Smooth each actor's center and height before framing (alternative to
    smoothing the derived crop signals)."""
    frames: list[dict[int, BBox]] = [dict() for _ in range(tracks.clip.frame_count)]
    for actor in tracks.actor_ids:
        present = [t for t, obs in enumerate(tracks.frames) if actor in obs]
        cx = FilterState(filt.w_past, filt.w_future, filt.lam1, filt.lam2, filt.lam3)
        cy = FilterState(filt.w_past, filt.w_future, filt.lam1, filt.lam2, filt.lam3)
        hh = FilterState(filt.w_past, filt.w_future, filt.lam1, filt.lam2, filt.lam3)
        out: list[tuple[float, float, float]] = []
        for t in present:
            b = tracks.frames[t][actor]
            vals = (cx.push(b.cx), cy.push(b.cy), hh.push(b.h))
            if vals[0] is not None:
                out.append(vals)  # type: ignore[arg-type]
        out.extend(zip(cx.flush(), cy.flush(), hh.flush()))
        for t, (vx, vy, vh) in zip(present, out):
            b = tracks.frames[t][actor]
            w = b.w * (vh / b.h) if b.h > 0 else b.w
            nb = BBox(vx - w / 2.0, vy - vh / 2.0, max(w, 1e-6), max(vh, 1e-6))
            frames[t][actor] = nb
    return TrackSet(tracks.clip, frames)


def generate_shot_streams(
    tracks: TrackSet, params: EditParams, smooth_actor_centers: bool = False
) -> list[ShotStream]:
    """All candidate shot streams for a clip, crops stabilized with lag.

    With smooth_actor_centers the filter runs on actor tracks before framing
    instead of on the derived crop signals.
    """
    bank, _ = make_stream_bank(tracks, params, parallel=True)
    streams = [
        ShotStream(spec=c.spec, actor_ids=c.actor_ids) for c in bank.croppers
    ]
    if smooth_actor_centers:
        smoothed = smooth_actor_tracks(tracks, params.filter)
        raw_bank, _ = make_stream_bank(tracks, params)
        for t in range(tracks.clip.frame_count):
            for stream, cropper, rawgen in zip(streams, bank.croppers, raw_bank.croppers):
                stream.crops.append(cropper.crop(smoothed.frames[t]))
                stream.raw_crops.append(rawgen.crop(tracks.frames[t]))
    else:
        for t in range(tracks.clip.frame_count):
            raws, stable = bank.push(tracks.frames[t])
            for stream, raw in zip(streams, raws):
                stream.raw_crops.append(raw)
            if stable is not None:
                for stream, crop in zip(streams, stable):
                    stream.crops.append(crop)
        for crops in bank.flush():
            for stream, crop in zip(streams, crops):
                stream.crops.append(crop)
    for stream in streams:
        assert len(stream.crops) == tracks.clip.frame_count
    return streams
