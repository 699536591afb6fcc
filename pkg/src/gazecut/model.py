"""Shared domain types for the editing pipeline.

Frames are 0-indexed everywhere; frame t of a clip at `fps` frames/second
starts at t / fps seconds.  All geometry is expressed in master-shot pixel
units (the coordinate system of the original wide-angle recording).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable


@dataclass(frozen=True)
class ClipInfo:
    """Geometry and timing of the master recording."""

    width: int
    height: int
    fps: float
    frame_count: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("clip dimensions must be positive")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.frame_count <= 0:
            raise ValueError("frame_count must be positive")

    def frame_to_seconds(self, frame: int) -> float:
        return frame / self.fps


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box, top-left corner plus size, in pixels."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"degenerate box {self.w}x{self.h}")

    @property
    def cx(self) -> float:
        return self.x + self.w / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.h / 2.0

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def union(self, other: "BBox") -> "BBox":
        x1 = min(self.x, other.x)
        y1 = min(self.y, other.y)
        x2 = max(self.x2, other.x2)
        y2 = max(self.y2, other.y2)
        return BBox(x1, y1, x2 - x1, y2 - y1)

    def contains_point(self, px: float, py: float) -> bool:
        return self.x <= px <= self.x2 and self.y <= py <= self.y2


def union_boxes(boxes: Iterable[BBox]) -> BBox:
    boxes = list(boxes)
    if not boxes:
        raise ValueError("cannot take the union of zero boxes")
    out = boxes[0]
    for b in boxes[1:]:
        out = out.union(b)
    return out


@dataclass(frozen=True)
class ActorObservation:
    """One tracked bounding box: actor `actor_id` at frame `frame`."""

    actor_id: int
    frame: int
    bbox: BBox


class TrackSet:
    """Per-frame actor boxes for a whole clip.

    `frames[t]` maps actor_id -> BBox for every actor visible at frame t.
    Every frame is guaranteed to contain at least one actor.
    """

    def __init__(self, clip: ClipInfo, frames: list[dict[int, BBox]]):
        if len(frames) != clip.frame_count:
            raise ValueError(
                f"expected {clip.frame_count} frames of observations, got {len(frames)}"
            )
        for t, obs in enumerate(frames):
            if not obs:
                raise ValueError(f"frame {t} has no actors")
        self.clip = clip
        self.frames = frames
        ids: set[int] = set()
        for obs in frames:
            ids.update(obs.keys())
        self.actor_ids = sorted(ids)

    @property
    def actor_count(self) -> int:
        return len(self.actor_ids)

    @property
    def max_simultaneous(self) -> int:
        return max(len(obs) for obs in self.frames)

    def boxes_at(self, frame: int) -> dict[int, BBox]:
        return self.frames[frame]


@dataclass(frozen=True)
class GazeSample:
    """One gaze point of user `user_id` at `frame`, in master-shot pixels."""

    user_id: int
    frame: int
    x: float
    y: float


class GazeStream:
    """Gaze samples binned per frame; a frame may have zero samples."""

    def __init__(self, clip: ClipInfo, frames: list[list[GazeSample]]):
        if len(frames) != clip.frame_count:
            raise ValueError(
                f"expected {clip.frame_count} frames of gaze, got {len(frames)}"
            )
        self.clip = clip
        self.frames = frames
        ids: set[int] = set()
        for samples in frames:
            for s in samples:
                ids.add(s.user_id)
        self.user_ids = sorted(ids)

    @property
    def user_count(self) -> int:
        return len(self.user_ids)

    def samples_at(self, frame: int) -> list[GazeSample]:
        return self.frames[frame]


class SizeClass(str, Enum):
    MEDIUM_SHOT = "MS"
    FULL_SHOT = "FS"


@dataclass(frozen=True)
class ShotSpec:
    """A candidate shot: a contiguous run of actors and its framing class.

    `group` is a half-open-free inclusive interval (a, b) of positions in the
    clip's left-to-right actor ordering.  Single-actor groups are framed as
    medium shots, larger groups as full shots; shot_id is stable per group.
    """

    shot_id: int
    group: tuple[int, int]
    size_class: SizeClass

    def __post_init__(self):
        a, b = self.group
        if a > b or a < 0:
            raise ValueError(f"bad actor interval {self.group}")
        single = a == b
        if single and self.size_class is not SizeClass.MEDIUM_SHOT:
            raise ValueError("single-actor groups must be medium shots")
        if not single and self.size_class is not SizeClass.FULL_SHOT:
            raise ValueError("multi-actor groups must be full shots")

    @property
    def size(self) -> int:
        return self.group[1] - self.group[0] + 1


@dataclass(frozen=True)
class EditDecision:
    """Selected shot and its crop rectangle for one output frame."""

    frame: int
    shot_id: int
    crop: BBox


@dataclass
class EditDecisionList:
    """One EditDecision per frame, contiguous from frame 0."""

    clip: ClipInfo
    decisions: list[EditDecision] = field(default_factory=list)

    def validate(self) -> None:
        if len(self.decisions) != self.clip.frame_count:
            raise ValueError(
                f"EDL has {len(self.decisions)} decisions for a "
                f"{self.clip.frame_count}-frame clip"
            )
        for t, d in enumerate(self.decisions):
            if d.frame != t:
                raise ValueError(f"decision {t} carries frame {d.frame}")

    def shot_ids(self) -> list[int]:
        return [d.shot_id for d in self.decisions]


def edl_runs(edl: EditDecisionList) -> list[tuple[int, int, int]]:
    """Maximal runs of equal shot_id as (shot_id, start_frame, length).

    The runs partition [0, frame_count); concatenating them reproduces the EDL.
    """
    if not edl.decisions:
        raise ValueError("empty EDL has no runs")
    runs: list[tuple[int, int, int]] = []
    start = 0
    cur = edl.decisions[0].shot_id
    for t in range(1, len(edl.decisions)):
        sid = edl.decisions[t].shot_id
        if sid != cur:
            runs.append((cur, start, t - start))
            start = t
            cur = sid
    runs.append((cur, start, len(edl.decisions) - start))
    return runs


def match_rate(a: EditDecisionList, b: EditDecisionList) -> float:
    """Fraction of frames whose selected shot agrees between two edits."""
    if len(a.decisions) != len(b.decisions):
        raise ValueError(
            f"length mismatch: {len(a.decisions)} vs {len(b.decisions)}"
        )
    if not a.decisions:
        raise ValueError("empty EDLs cannot be compared")
    agree = sum(
        1 for da, db in zip(a.decisions, b.decisions) if da.shot_id == db.shot_id
    )
    return agree / len(a.decisions)
