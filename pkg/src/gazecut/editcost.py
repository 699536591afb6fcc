"""Per-frame gaze potentials and pairwise editing costs.

The unary term scores each candidate shot by how much gaze mass falls near
its crop center (Gaussian kernel, floored and normalized so the log is always
finite).  The pairwise term prices a transition between shots: a flat cut
cost, a jump-cut penalty that ramps with crop overlap, and a cutting-rhythm
term driven by how long the current shot has been held.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import EditParams
from .model import BBox


@dataclass(frozen=True)
class CostParams:
    """Read-only view of the cost-relevant parameters, plus the logistic
    softness derived from the frame rate."""

    lambda_transition: float
    o_low: float
    o_high: float
    mu_overlap: float
    upsilon_overlap: float
    gamma_cut: float
    gamma_stay: float
    min_shot_frames: int
    m_stay: int
    logistic_scale: float

    @classmethod
    def from_params(cls, params: EditParams, fps: float) -> "CostParams":
        return cls(
            lambda_transition=params.lambda_transition,
            o_low=params.o_low,
            o_high=params.o_high,
            mu_overlap=params.mu_overlap,
            upsilon_overlap=params.upsilon_overlap,
            gamma_cut=params.gamma_cut,
            gamma_stay=params.gamma_stay,
            min_shot_frames=params.min_shot_frames,
            m_stay=params.m_stay,
            logistic_scale=fps / 5.0,
        )


def _sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.clip(x, -60, 60))),
                    np.exp(np.clip(x, -60, 60)) / (1.0 + np.exp(np.clip(x, -60, 60))))


def gaze_potential_from_centers(
    centers: np.ndarray, gaze_xy: np.ndarray, sigma: float, epsilon: float
) -> np.ndarray:
    """Normalized per-shot gaze potential from crop centers and gaze points.

    raw_i = epsilon + sum_k exp(-|g_k - c_i|^2 / (2 sigma^2)); returned vector
    is raw / sum(raw), strictly positive.
    """
    if sigma <= 0 or epsilon <= 0:
        raise ValueError("sigma and epsilon must be positive")
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim != 2 or centers.shape[0] == 0:
        raise ValueError("need at least one crop center")
    raw = np.full(centers.shape[0], epsilon)
    gaze_xy = np.asarray(gaze_xy, dtype=np.float64).reshape(-1, 2)
    if gaze_xy.shape[0]:
        d2 = np.sum((gaze_xy[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        raw = raw + np.exp(-d2 / (2.0 * sigma * sigma)).sum(axis=0)
    return raw / raw.sum()


def gaze_potential(
    crops_at_t: list[BBox], gaze_at_t, sigma: float, epsilon: float
) -> np.ndarray:
    """Convenience wrapper taking crop boxes and GazeSample objects."""
    centers = np.array([[b.cx, b.cy] for b in crops_at_t])
    pts = np.array([[s.x, s.y] for s in gaze_at_t], dtype=np.float64).reshape(-1, 2)
    return gaze_potential_from_centers(centers, pts, sigma, epsilon)


def transition_cost(i: int, j: int, lam: float) -> float:
    return 0.0 if i == j else lam


def overlap_ratio(a: BBox, b: BBox) -> float:
    """Intersection-over-union of two boxes."""
    ix = max(0.0, min(a.x2, b.x2) - max(a.x, b.x))
    iy = max(0.0, min(a.y2, b.y2) - max(a.y, b.y))
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def overlap_cost(gamma: float, params: CostParams) -> float:
    """Jump-cut penalty: zero below o_low, ramp to o_high, saturated above."""
    if gamma <= params.o_low:
        return 0.0
    if gamma >= params.o_high:
        return params.upsilon_overlap
    return params.mu_overlap * (gamma - params.o_low) / (params.o_high - params.o_low)


def rhythm_cost(i: int, j: int, tau: int, params: CostParams) -> float:
    """Cutting-rhythm penalty given tau frames since the last cut.

    Cutting early (tau below the minimum shot length) is penalized on cuts;
    holding far past the soft maximum is penalized on stays.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    s = params.logistic_scale
    if i != j:
        return float(params.gamma_cut * _sigmoid((params.min_shot_frames - tau) / s))
    return float(params.gamma_stay * _sigmoid((tau - params.m_stay) / s))


def edit_cost(i: int, j: int, crop_i: BBox, crop_j: BBox, tau: int, params: CostParams) -> float:
    """Total pairwise cost of showing shot j after shot i."""
    cost = transition_cost(i, j, params.lambda_transition)
    if i != j:
        cost += overlap_cost(overlap_ratio(crop_i, crop_j), params)
    cost += rhythm_cost(i, j, tau, params)
    return cost


# --- vectorized forms used by the selector's inner loop ---


def iou_matrix(crops_a: np.ndarray, crops_b: np.ndarray) -> np.ndarray:
    """Pairwise IoU between two (S, 4) arrays of [x, y, w, h] boxes."""
    ax1, ay1 = crops_a[:, 0], crops_a[:, 1]
    ax2, ay2 = ax1 + crops_a[:, 2], ay1 + crops_a[:, 3]
    bx1, by1 = crops_b[:, 0], crops_b[:, 1]
    bx2, by2 = bx1 + crops_b[:, 2], by1 + crops_b[:, 3]
    ix = np.clip(np.minimum(ax2[:, None], bx2[None, :]) - np.maximum(ax1[:, None], bx1[None, :]), 0.0, None)
    iy = np.clip(np.minimum(ay2[:, None], by2[None, :]) - np.maximum(ay1[:, None], by1[None, :]), 0.0, None)
    inter = ix * iy
    area_a = (crops_a[:, 2] * crops_a[:, 3])[:, None]
    area_b = (crops_b[:, 2] * crops_b[:, 3])[None, :]
    union = area_a + area_b - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=union > 0)
    return out


def overlap_cost_vec(gamma: np.ndarray, params: CostParams) -> np.ndarray:
    ramp = params.mu_overlap * (gamma - params.o_low) / (params.o_high - params.o_low)
    return np.where(
        gamma <= params.o_low,
        0.0,
        np.where(gamma >= params.o_high, params.upsilon_overlap, ramp),
    )


def pairwise_cost_matrix(
    crops_prev: np.ndarray,
    crops_cur: np.ndarray,
    run_len_prev: np.ndarray,
    params: CostParams,
) -> np.ndarray:
    """M[i, j] = edit cost of moving from shot i (held run_len_prev[i] frames,
    crop crops_prev[i]) to shot j with crop crops_cur[j]."""
    s = params.logistic_scale
    tau = run_len_prev.astype(np.float64)
    cut = params.gamma_cut * _sigmoid((params.min_shot_frames - tau) / s)
    stay = params.gamma_stay * _sigmoid((tau - params.m_stay) / s)
    m = params.lambda_transition + overlap_cost_vec(iou_matrix(crops_prev, crops_cur), params)
    m = m + cut[:, None]
    np.fill_diagonal(m, stay)
    return m
