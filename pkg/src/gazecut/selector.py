"""Online shot selection over a rolling look-ahead cost window.

Columns of the window hold, per candidate shot, the cheapest accumulated cost
of any path ending in that shot at that frame (unary -ln(gaze potential) plus
pairwise editing costs), a backpointer to the previous shot on that path, and
the length of the run the path has held the shot (which drives the rhythm
term).  A decision for the oldest retained frame is emitted once the window
holds lookahead + 1 columns: every shot k of the newest column is scored by
its accumulated cost plus alpha times a continuity term against the
previously emitted shot, and the winner is backtracked to the oldest column.
A shot timer enforces the minimum shot duration on the emitted stream.

Also provides the full-horizon offline optimizer (the same recurrence over
all frames with a global backtrack), an exhaustive-enumeration oracle for
small instances, and the three non-optimizing baselines (widest shot, greedy
gaze, speaker-driven).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .editcost import (
    CostParams,
    gaze_potential_from_centers,
    iou_matrix,
    overlap_cost_vec,
    pairwise_cost_matrix,
    _sigmoid,
)
from .ingest import EditParams, SpeakerAnnotation
from .model import BBox, EditDecision, EditDecisionList, GazeStream, TrackSet
from .shotgen import ShotStream, generate_shot_streams, make_stream_bank


def init_column(potentials: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """First column: unary costs only, no backpointers, run length 1."""
    g = np.asarray(potentials, dtype=np.float64)
    if np.any(g <= 0):
        raise ValueError("potentials must be strictly positive")
    costs = -np.log(g)
    backptr = np.full(g.shape[0], -1, dtype=np.int64)
    runlen = np.ones(g.shape[0], dtype=np.int64)
    return costs, backptr, runlen


def advance_column(
    prev_costs: np.ndarray,
    prev_runlen: np.ndarray,
    crops_prev: np.ndarray,
    crops_cur: np.ndarray,
    potentials: np.ndarray,
    cp: CostParams,
    renormalize: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One step of the recurrence: minimize over the previous column's shots."""
    g = np.asarray(potentials, dtype=np.float64)
    if np.any(g <= 0):
        raise ValueError("potentials must be strictly positive")
    m = pairwise_cost_matrix(crops_prev, crops_cur, prev_runlen, cp)
    total = prev_costs[:, None] + m
    backptr = np.argmin(total, axis=0)
    s = g.shape[0]
    costs = total[backptr, np.arange(s)] - np.log(g)
    runlen = np.where(backptr == np.arange(s), prev_runlen[backptr] + 1, 1)
    if renormalize:
        costs = costs - costs.min()
    return costs, backptr.astype(np.int64), runlen.astype(np.int64)


class CostWindow:
    """Ring of up to lookahead+1 cost columns (oldest first)."""

    def __init__(self, capacity: int, n_shots: int):
        if capacity < 1:
            raise ValueError("window capacity must be >= 1")
        self.capacity = capacity
        self.n_shots = n_shots
        self.costs = np.zeros((capacity, n_shots))
        self.backptr = np.full((capacity, n_shots), -1, dtype=np.int64)
        self.runlen = np.ones((capacity, n_shots), dtype=np.int64)
        self.potentials = np.zeros((capacity, n_shots))
        self.crops = np.zeros((capacity, n_shots, 4))
        self.frame_of = np.zeros(capacity, dtype=np.int64)
        self.head = 0
        self.count = 0

    def _phys(self, logical: int) -> int:
        if logical < 0 or logical >= self.count:
            raise IndexError(f"column {logical} of {self.count}")
        return (self.head + logical) % self.capacity

    def append(self, frame, costs, backptr, runlen, potentials, crops) -> None:
        if self.count == self.capacity:
            raise ValueError("window full")
        phys = (self.head + self.count) % self.capacity
        self.costs[phys] = costs
        self.backptr[phys] = backptr
        self.runlen[phys] = runlen
        self.potentials[phys] = potentials
        self.crops[phys] = crops
        self.frame_of[phys] = frame
        self.count += 1

    def pop_oldest(self) -> None:
        if self.count == 0:
            raise ValueError("window empty")
        self.head = (self.head + 1) % self.capacity
        self.count -= 1

    def col_costs(self, logical: int) -> np.ndarray:
        return self.costs[self._phys(logical)]

    def col_backptr(self, logical: int) -> np.ndarray:
        return self.backptr[self._phys(logical)]

    def col_runlen(self, logical: int) -> np.ndarray:
        return self.runlen[self._phys(logical)]

    def col_potentials(self, logical: int) -> np.ndarray:
        return self.potentials[self._phys(logical)]

    def col_crops(self, logical: int) -> np.ndarray:
        return self.crops[self._phys(logical)]

    def col_frame(self, logical: int) -> int:
        return int(self.frame_of[self._phys(logical)])


def backtrack(window: CostWindow, k: int, steps: int) -> int:
    """Follow backpointers from shot k at the newest column `steps` columns
    toward the past; returns the shot index reached."""
    if steps > window.count - 1:
        raise ValueError(f"cannot backtrack {steps} steps in a {window.count}-deep window")
    idx = k
    col = window.count - 1
    for _ in range(steps):
        idx = int(window.col_backptr(col)[idx])
        col -= 1
    return idx


def _backtrack_all(window: CostWindow) -> np.ndarray:
    """Shot reached at the oldest column from every shot of the newest."""
    q = np.arange(window.n_shots)
    for col in range(window.count - 1, 0, -1):
        q = window.col_backptr(col)[q]
    return q


@dataclass
class SelectorState:
    """Mutable per-session selection state."""

    window: CostWindow
    cp: CostParams
    alpha: float
    min_shot_frames: int
    renormalize: bool = True
    prev_shot: int | None = None
    shot_timer: int = 0


@dataclass(frozen=True)
class DecisionEvent:
    """An emitted decision plus the diagnostics a live client wants."""

    decision: EditDecision
    potentials: np.ndarray
    shot_timer: int
    cut: bool


def push_column(state: SelectorState, potentials: np.ndarray, crops: np.ndarray, frame: int) -> None:
    """Append the next frame's column without emitting (warm-up path)."""
    w = state.window
    if w.count == 0:
        costs, bp, rl = init_column(potentials)
    else:
        costs, bp, rl = advance_column(
            w.col_costs(w.count - 1),
            w.col_runlen(w.count - 1),
            w.col_crops(w.count - 1),
            crops,
            potentials,
            state.cp,
            renormalize=state.renormalize,
        )
    w.append(frame, costs, bp, rl, np.asarray(potentials, dtype=np.float64), crops)


def _emit_for_oldest(state: SelectorState) -> DecisionEvent:
    """Decide the oldest retained frame from the current window content."""
    w = state.window
    oldest_costs = w.col_costs(0)
    oldest_g = w.col_potentials(0)
    oldest_crops = w.col_crops(0)
    frame = w.col_frame(0)
    if state.prev_shot is None:
        # the very first decision: no previous shot to hold or stay close to,
        # so take the cheapest accumulated path over the whole look-ahead and
        # backtrack it to this frame
        q = _backtrack_all(w)
        k_star = int(np.argmin(w.col_costs(w.count - 1)))
        state.prev_shot = int(q[k_star])
        state.shot_timer = 1
        emit = state.prev_shot
        x, y, cw, ch = oldest_crops[emit]
        return DecisionEvent(
            decision=EditDecision(frame=frame, shot_id=emit, crop=BBox(x, y, cw, ch)),
            potentials=oldest_g.copy(),
            shot_timer=1,
            cut=False,
        )
    p = state.prev_shot
    if state.shot_timer < state.min_shot_frames:
        emit = p
        state.shot_timer += 1
        cut = False
    else:
        q = _backtrack_all(w)
        future = w.col_costs(w.count - 1)
        cp = state.cp
        s = cp.logistic_scale
        theta = state.shot_timer
        ec = np.full(w.n_shots, cp.lambda_transition)
        ec += overlap_cost_vec(
            iou_matrix(oldest_crops[p : p + 1], oldest_crops)[0], cp
        )
        ec += cp.gamma_cut * _sigmoid((cp.min_shot_frames - theta) / s)
        ec[p] = cp.gamma_stay * _sigmoid((theta - cp.m_stay) / s)
        continuity = oldest_costs[p] - np.log(oldest_g[q]) + ec[q]
        score = future + state.alpha * continuity
        k_star = int(np.argmin(score))
        emit = int(q[k_star])
        cut = emit != p
        if cut:
            state.shot_timer = 1
        else:
            state.shot_timer += 1
        state.prev_shot = emit
    x, y, cw, ch = oldest_crops[emit]
    decision = EditDecision(frame=frame, shot_id=emit, crop=BBox(x, y, cw, ch))
    return DecisionEvent(
        decision=decision,
        potentials=oldest_g.copy(),
        shot_timer=state.shot_timer,
        cut=cut,
    )


def select_online(
    state: SelectorState, newest_potentials: np.ndarray, newest_crops: np.ndarray, frame: int
) -> DecisionEvent:
    """Append the newest column, emit the oldest frame's decision, slide.

    The window must hold lookahead columns already (full at lookahead+1 once
    the newest is appended); during the end-of-clip drain use drain_one.
    """
    w = state.window
    if w.count != w.capacity - 1:
        raise ValueError(
            f"window holds {w.count} columns; needs exactly {w.capacity - 1} before select"
        )
    push_column(state, newest_potentials, newest_crops, frame)
    event = _emit_for_oldest(state)
    w.pop_oldest()
    return event


def drain_one(state: SelectorState) -> DecisionEvent:
    """Emit the oldest frame using the remaining (shrinking) look-ahead."""
    event = _emit_for_oldest(state)
    state.window.pop_oldest()
    return event


class OnlineEngine:
    """Streaming pipeline: actor boxes + gaze in, edit decisions out.

    With precomputed shot streams the columns are built as frames arrive and
    decisions lag by the look-ahead.  Without, raw crops are framed and pushed
    through the stabilizing filters first, adding their w_future lag upstream
    of the cost window; emitted decisions are identical either way.
    """

    def __init__(
        self,
        tracks: TrackSet,
        params: EditParams,
        streams: list[ShotStream] | None = None,
        renormalize: bool = True,
    ):
        self.tracks = tracks
        self.params = params
        self.clip = tracks.clip
        self.cp = CostParams.from_params(params, self.clip.fps)
        if streams is None:
            self._bank, _ = make_stream_bank(tracks, params)
            self._precomputed = None
            self._n_shots = len(self._bank.croppers)
        else:
            self._bank = None
            self._precomputed = [s.crop_array() for s in streams]
            self._n_shots = len(streams)
        capacity = min(params.lookahead_frames, self.clip.frame_count - 1) + 1
        self.state = SelectorState(
            window=CostWindow(capacity, self._n_shots),
            cp=self.cp,
            alpha=params.alpha_continuity,
            min_shot_frames=params.min_shot_frames,
            renormalize=renormalize,
        )
        self._gaze_by_frame: dict[int, np.ndarray] = {}
        self._pending_crops: list[np.ndarray] = []
        self.in_frame = 0
        self.col_frame = 0
        self.events: list[DecisionEvent] = []

    def _potentials(self, crops: np.ndarray, frame: int) -> np.ndarray:
        pts = self._gaze_by_frame.pop(frame, np.empty((0, 2)))
        centers = np.stack(
            [crops[:, 0] + crops[:, 2] / 2.0, crops[:, 1] + crops[:, 3] / 2.0], axis=1
        )
        return gaze_potential_from_centers(
            centers, pts, self.params.sigma_gaze, self.params.epsilon_gaze
        )

    def _ingest_column(self, crops: np.ndarray) -> DecisionEvent | None:
        state = self.state
        potentials = self._potentials(crops, self.col_frame)
        event = None
        if state.window.count == state.window.capacity - 1:
            event = select_online(state, potentials, crops, self.col_frame)
        else:
            push_column(state, potentials, crops, self.col_frame)
        self.col_frame += 1
        if event is not None:
            self.events.append(event)
        return event

    def push_frame(self, gaze_xy: np.ndarray) -> DecisionEvent | None:
        """Feed one frame worth of gaze (and tracks, internally); may emit."""
        t = self.in_frame
        if t >= self.clip.frame_count:
            raise ValueError("clip exhausted")
        self._gaze_by_frame[t] = np.asarray(gaze_xy, dtype=np.float64).reshape(-1, 2)
        self.in_frame += 1
        if self._precomputed is not None:
            crops = np.array([c[t] for c in self._precomputed])
            return self._ingest_column(crops)
        _, stable = self._bank.push(self.tracks.frames[t])
        if stable is None:
            return None
        return self._ingest_column(np.array([[b.x, b.y, b.w, b.h] for b in stable]))

    def finish(self) -> list[DecisionEvent]:
        """Flush filters and drain the window; returns the tail decisions."""
        out: list[DecisionEvent] = []
        if self._precomputed is None and self._bank is not None:
            for crops in self._bank.flush():
                ev = self._ingest_column(
                    np.array([[b.x, b.y, b.w, b.h] for b in crops])
                )
                if ev is not None:
                    out.append(ev)
        while self.state.window.count > 0:
            ev = drain_one(self.state)
            self.events.append(ev)
            out.append(ev)
        return out

    def to_edl(self) -> EditDecisionList:
        edl = EditDecisionList(
            clip=self.clip, decisions=[e.decision for e in self.events]
        )
        edl.validate()
        return edl


def _gaze_arrays(gaze: GazeStream) -> list[np.ndarray]:
    return [
        np.array([[s.x, s.y] for s in samples], dtype=np.float64).reshape(-1, 2)
        for samples in gaze.frames
    ]


def run_online(
    tracks: TrackSet,
    gaze: GazeStream,
    params: EditParams,
    streams: list[ShotStream] | None = None,
    renormalize: bool = True,
) -> EditDecisionList:
    """Full-clip run of the online selector; one decision per frame."""
    if streams is None:
        streams = generate_shot_streams(tracks, params)
    engine = OnlineEngine(tracks, params, streams=streams, renormalize=renormalize)
    for pts in _gaze_arrays(gaze):
        engine.push_frame(pts)
    engine.finish()
    return engine.to_edl()


def _streams_matrices(streams: list[ShotStream]) -> tuple[np.ndarray, np.ndarray]:
    crops = np.stack([s.crop_array() for s in streams], axis=1)  # (T, S, 4)
    return crops, crops[:, :, :2] + crops[:, :, 2:] / 2.0


def _potential_matrix(
    streams: list[ShotStream], gaze: GazeStream, params: EditParams
) -> np.ndarray:
    crops, centers = _streams_matrices(streams)
    out = np.empty((crops.shape[0], crops.shape[1]))
    for t, samples in enumerate(_gaze_arrays(gaze)):
        out[t] = gaze_potential_from_centers(
            centers[t], samples, params.sigma_gaze, params.epsilon_gaze
        )
    return out


def run_offline_oracle(
    tracks: TrackSet,
    gaze: GazeStream,
    params: EditParams,
    streams: list[ShotStream] | None = None,
) -> tuple[EditDecisionList, float]:
    """Full-horizon optimizer: forward recurrence over every frame, then a
    global backtrack from the cheapest terminal shot.  Returns the sequence
    and its objective value."""
    if streams is None:
        streams = generate_shot_streams(tracks, params)
    potentials = _potential_matrix(streams, gaze, params)
    crops = np.stack([s.crop_array() for s in streams], axis=1)
    cp = CostParams.from_params(params, tracks.clip.fps)
    seq, cost = _full_dp(potentials, crops, cp)
    decisions = [
        EditDecision(frame=t, shot_id=int(s), crop=streams[int(s)].crops[t])
        for t, s in enumerate(seq)
    ]
    edl = EditDecisionList(clip=tracks.clip, decisions=decisions)
    edl.validate()
    return edl, cost


def _full_dp(potentials: np.ndarray, crops: np.ndarray, cp: CostParams) -> tuple[list[int], float]:
    t_count, s_count = potentials.shape
    costs, _, runlen = init_column(potentials[0])
    backptrs = np.empty((t_count, s_count), dtype=np.int64)
    backptrs[0] = -1
    for t in range(1, t_count):
        costs, bp, runlen = advance_column(
            costs, runlen, crops[t - 1], crops[t], potentials[t], cp
        )
        backptrs[t] = bp
    k = int(np.argmin(costs))
    best = float(costs[k])
    seq = [0] * t_count
    seq[-1] = k
    for t in range(t_count - 1, 0, -1):
        k = int(backptrs[t][k])
        seq[t - 1] = k
    return seq, best


def brute_force_oracle(
    potentials: np.ndarray, crops: np.ndarray, cp: CostParams
) -> tuple[list[int], float]:
    """Exhaustive minimization of the edit objective over all shot sequences.

    Same run-length rhythm semantics as the recurrence: tau at a step is the
    length of the run ending at the previous frame.  Ties resolve to the
    lexicographically smallest sequence.
    """
    t_count, s_count = potentials.shape
    if s_count**t_count > 10**6:
        raise ValueError(f"instance too large: {s_count}^{t_count} sequences")
    unary = -np.log(potentials)
    from .model import BBox as _B

    boxes = [
        [_B(*crops[t, j]) for j in range(s_count)] for t in range(t_count)
    ]
    from .editcost import edit_cost

    best_seq: tuple[int, ...] | None = None
    best_cost = np.inf
    for seq in itertools.product(range(s_count), repeat=t_count):
        cost = unary[0][seq[0]]
        run = 1
        for t in range(1, t_count):
            i, j = seq[t - 1], seq[t]
            cost += edit_cost(i, j, boxes[t - 1][i], boxes[t][j], run, cp)
            cost += unary[t][j]
            run = run + 1 if j == i else 1
            if cost >= best_cost:
                break
        else:
            if cost < best_cost:
                best_cost = cost
                best_seq = seq
    assert best_seq is not None
    return list(best_seq), float(best_cost)


def _constant_edl(tracks: TrackSet, streams: list[ShotStream], shot_id: int) -> EditDecisionList:
    decisions = [
        EditDecision(frame=t, shot_id=shot_id, crop=streams[shot_id].crops[t])
        for t in range(tracks.clip.frame_count)
    ]
    edl = EditDecisionList(clip=tracks.clip, decisions=decisions)
    edl.validate()
    return edl


def run_wide(
    tracks: TrackSet, params: EditParams, streams: list[ShotStream] | None = None
) -> EditDecisionList:
    """Baseline: the widest shot (all performers) every frame."""
    if streams is None:
        streams = generate_shot_streams(tracks, params)
    return _constant_edl(tracks, streams, len(streams) - 1)


def run_greedy(
    tracks: TrackSet,
    gaze: GazeStream,
    params: EditParams,
    streams: list[ShotStream] | None = None,
) -> EditDecisionList:
    """Baseline: highest gaze potential each frame, minimum duration enforced."""
    if streams is None:
        streams = generate_shot_streams(tracks, params)
    potentials = _potential_matrix(streams, gaze, params)
    decisions = []
    cur = int(np.argmax(potentials[0]))
    age = 1
    decisions.append(EditDecision(0, cur, streams[cur].crops[0]))
    for t in range(1, tracks.clip.frame_count):
        if age < params.min_shot_frames:
            age += 1
        else:
            best = int(np.argmax(potentials[t]))
            if best != cur:
                cur = best
                age = 1
            else:
                age += 1
        decisions.append(EditDecision(t, cur, streams[cur].crops[t]))
    edl = EditDecisionList(clip=tracks.clip, decisions=decisions)
    edl.validate()
    return edl


def run_speaker(
    tracks: TrackSet,
    speakers: list[SpeakerAnnotation],
    params: EditParams,
    streams: list[ShotStream] | None = None,
) -> EditDecisionList:
    """Baseline: frame the current speakers, widest shot after long silence."""
    if streams is None:
        streams = generate_shot_streams(tracks, params)
    from .shotgen import order_actors

    ordering = order_actors(tracks)
    position = {actor: i for i, actor in enumerate(ordering)}
    group_to_shot = {tuple(s.spec.group): s.spec.shot_id for s in streams}
    wide = len(streams) - 1
    silence_limit = round(10 * tracks.clip.fps)

    speaking: list[frozenset[int]] = [frozenset()] * tracks.clip.frame_count
    for ann in speakers:
        for t in range(ann.start_frame, min(ann.end_frame, tracks.clip.frame_count)):
            speaking[t] = ann.speakers

    def desired_shot(t: int, silence_run: int) -> int | None:
        """Target shot at frame t, or None to keep holding the current one."""
        who = speaking[t]
        if not who:
            return wide if silence_run > silence_limit else None
        try:
            pos = sorted(position[a] for a in who)
        except KeyError as e:
            raise ValueError(f"annotated speaker {e} is not a tracked actor") from None
        return group_to_shot[(pos[0], pos[-1])]

    decisions = []
    silence_run = 0 if speaking[0] else 1
    want = desired_shot(0, silence_run)
    cur = want if want is not None else wide  # silent clip start opens wide
    age = 1
    decisions.append(EditDecision(0, cur, streams[cur].crops[0]))
    for t in range(1, tracks.clip.frame_count):
        silence_run = 0 if speaking[t] else silence_run + 1
        want = desired_shot(t, silence_run)
        if want is not None and want != cur and age >= params.min_shot_frames:
            cur = want
            age = 1
        else:
            age += 1
        decisions.append(EditDecision(t, cur, streams[cur].crops[t]))
    edl = EditDecisionList(clip=tracks.clip, decisions=decisions)
    edl.validate()
    return edl
