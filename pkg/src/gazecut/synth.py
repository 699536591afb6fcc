"""Synthetic stage scenes: actor tracks, scripted gaze, speaker annotations.

Actors sway around evenly spaced stage marks with tracker-like jitter; gaze
is a piecewise fixation on actor centers with Gaussian dispersion, switching
at scripted times.  Everything is driven by one seed, so fixtures are
bit-reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import SpeakerAnnotation
from .model import BBox, ClipInfo, GazeSample, GazeStream, TrackSet


@dataclass(frozen=True)
class GazeScriptEntry:
    start_frame: int
    actor_index: int  # index into the left-to-right actor order


def parse_gaze_script(script: str) -> list[GazeScriptEntry]:
    """Parse "frame:actor,frame:actor,..." into fixation segments."""
    entries = []
    for part in script.split(","):
        part = part.strip()
        if not part:
            continue
        frame_s, actor_s = part.split(":")
        entries.append(GazeScriptEntry(int(frame_s), int(actor_s)))
    if not entries or entries[0].start_frame != 0:
        raise ValueError("gaze script must start at frame 0")
    for a, b in zip(entries, entries[1:]):
        if b.start_frame <= a.start_frame:
            raise ValueError("gaze script frames must increase")
    return entries


def random_gaze_script(
    rng: np.random.Generator, n_actors: int, frames: int, fps: float,
    min_fix_s: float = 2.0, max_fix_s: float = 6.0,
) -> list[GazeScriptEntry]:
    entries = []
    t = 0
    actor = int(rng.integers(0, n_actors))
    while t < frames:
        entries.append(GazeScriptEntry(t, actor))
        t += int(rng.uniform(min_fix_s, max_fix_s) * fps)
        nxt = int(rng.integers(0, n_actors - 1)) if n_actors > 1 else 0
        actor = nxt if nxt < actor else nxt + 1 if n_actors > 1 else 0
    return entries


def synth_tracks(
    rng: np.random.Generator, clip: ClipInfo, n_actors: int
) -> TrackSet:
    """Swaying actors with tracker jitter, always on stage."""
    if n_actors < 1:
        raise ValueError("need at least one actor")
    frames: list[dict[int, BBox]] = [dict() for _ in range(clip.frame_count)]
    margin = 0.15 * clip.width
    marks = np.linspace(margin, clip.width - margin, n_actors)
    t = np.arange(clip.frame_count)
    for i in range(n_actors):
        height = clip.height * rng.uniform(0.28, 0.36)
        width = height * rng.uniform(0.30, 0.40)
        sway_amp = clip.width * rng.uniform(0.01, 0.03)
        sway_period = rng.uniform(8.0, 20.0) * clip.fps
        phase = rng.uniform(0, 2 * np.pi)
        cx = marks[i] + sway_amp * np.sin(2 * np.pi * t / sway_period + phase)
        cx = cx + rng.normal(0, 2.0, clip.frame_count)  # tracker jitter
        feet = clip.height * rng.uniform(0.80, 0.88)
        h = height * (1 + 0.02 * np.sin(2 * np.pi * t / (sway_period * 0.7) + phase)) \
            + rng.normal(0, 1.5, clip.frame_count)
        for f in range(clip.frame_count):
            hh = max(20.0, float(h[f]))
            ww = max(10.0, float(width))
            x = float(cx[f]) - ww / 2.0
            y = feet - hh
            x = min(max(x, 0.0), clip.width - ww)
            y = min(max(y, 0.0), clip.height - hh)
            frames[f][i] = BBox(x, y, ww, hh)
    return TrackSet(clip, frames)


def synth_gaze(
    rng: np.random.Generator,
    tracks: TrackSet,
    script: list[GazeScriptEntry],
    n_users: int = 1,
) -> GazeStream:
    """Fixations on the scripted actor's center with Gaussian dispersion."""
    clip = tracks.clip
    sigma = 0.02 * clip.width
    from .shotgen import order_actors

    ordering = order_actors(tracks)
    frames: list[list[GazeSample]] = [[] for _ in range(clip.frame_count)]
    seg = 0
    user_bias = rng.normal(0, sigma / 2, (n_users, 2))
    for f in range(clip.frame_count):
        while seg + 1 < len(script) and script[seg + 1].start_frame <= f:
            seg += 1
        actor = ordering[script[seg].actor_index % len(ordering)]
        box = tracks.frames[f].get(actor)
        if box is None:
            continue
        for u in range(n_users):
            gx = box.cx + user_bias[u, 0] + rng.normal(0, sigma)
            gy = box.cy + user_bias[u, 1] + rng.normal(0, sigma)
            frames[f].append(
                GazeSample(
                    u,
                    f,
                    float(min(max(gx, 0.0), clip.width)),
                    float(min(max(gy, 0.0), clip.height)),
                )
            )
    return GazeStream(clip, frames)


def synth_speakers(
    rng: np.random.Generator, tracks: TrackSet, long_silence_at: int | None = None
) -> list[SpeakerAnnotation]:
    """Alternating single/double speaker segments with short gaps."""
    clip = tracks.clip
    out = []
    t = 0
    while t < clip.frame_count:
        dur = int(rng.uniform(2.0, 8.0) * clip.fps)
        if long_silence_at is not None and t >= long_silence_at and not any(
            a.start_frame >= long_silence_at for a in out
        ):
            t += int(12.0 * clip.fps)  # deliberate long silence
            continue
        who = set(rng.choice(tracks.actor_ids, size=1 + int(rng.random() < 0.25),
                             replace=False).tolist())
        end = min(t + dur, clip.frame_count)
        out.append(SpeakerAnnotation(t, end, frozenset(int(a) for a in who)))
        t = end + int(rng.uniform(0.2, 1.5) * clip.fps)
    return out


def synth_scene(
    seed: int,
    n_actors: int,
    frames: int,
    fps: float = 25.0,
    width: int = 1920,
    height: int = 1080,
    gaze_script: str = "random",
    n_users: int = 1,
    with_speakers: bool = False,
) -> tuple[TrackSet, GazeStream, list[SpeakerAnnotation]]:
    """One reproducible scene: tracks, gaze and (optionally) speaker segments."""
    if frames < 1:
        raise ValueError("need at least one frame")
    rng = np.random.default_rng(seed)
    clip = ClipInfo(width=width, height=height, fps=fps, frame_count=frames)
    tracks = synth_tracks(rng, clip, n_actors)
    if gaze_script == "random":
        script = random_gaze_script(rng, n_actors, frames, fps)
    else:
        script = parse_gaze_script(gaze_script)
    gaze = synth_gaze(rng, tracks, script, n_users=n_users)
    speakers = synth_speakers(rng, tracks) if with_speakers else []
    return tracks, gaze, speakers
