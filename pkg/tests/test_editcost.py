"""Gaze potential and pairwise cost term tests."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gazecut.editcost import (
    CostParams,
    edit_cost,
    gaze_potential,
    gaze_potential_from_centers,
    iou_matrix,
    overlap_cost,
    overlap_ratio,
    pairwise_cost_matrix,
    rhythm_cost,
    transition_cost,
)
from gazecut.ingest import default_params
from gazecut.model import BBox, ClipInfo, GazeSample

CLIP = ClipInfo(width=1920, height=1080, fps=25.0, frame_count=10)
CP = CostParams.from_params(default_params(CLIP), CLIP.fps)


def test_single_shot_potential_is_one():
    g = gaze_potential([BBox(0, 0, 100, 100)], [GazeSample(0, 0, 5, 5)], 100.0, 1e-3)
    assert g.tolist() == [1.0]


def test_equidistant_gaze_splits_evenly():
    crops = [BBox(0, 0, 100, 100), BBox(200, 0, 100, 100)]
    # centers at (50,50) and (250,50); (150,50) is equidistant
    g = gaze_potential(crops, [GazeSample(0, 0, 150, 50)], 100.0, 1e-3)
    assert g[0] == pytest.approx(0.5)
    assert g[1] == pytest.approx(0.5)


def test_gaze_kernel_hand_computed():
    # sigma=100, gaze on center 1, center 2 is 200 px away, eps=1e-3:
    # raw = [1.001, exp(-2)+0.001] -> G ~ [0.8801, 0.1199]
    centers = np.array([[500.0, 500.0], [700.0, 500.0]])
    g = gaze_potential_from_centers(centers, np.array([[500.0, 500.0]]), 100.0, 1e-3)
    raw = np.array([1.0 + 1e-3, math.exp(-2.0) + 1e-3])
    assert g == pytest.approx(raw / raw.sum(), abs=1e-9)
    assert g[0] == pytest.approx(0.8801, abs=2e-4)
    assert g[1] == pytest.approx(0.1199, abs=2e-4)


def test_zero_gaze_gives_uniform():
    crops = [BBox(0, 0, 100, 100), BBox(200, 0, 100, 100), BBox(400, 0, 100, 100)]
    g = gaze_potential(crops, [], 100.0, 1e-3)
    assert g == pytest.approx(np.full(3, 1 / 3))


@given(st.integers(1, 6), st.integers(0, 5), st.randoms())
def test_potential_sums_to_one_and_positive(n_crops, n_gaze, rnd):
    centers = np.array([[rnd.uniform(0, 1900), rnd.uniform(0, 1000)] for _ in range(n_crops)])
    pts = np.array([[rnd.uniform(0, 1900), rnd.uniform(0, 1000)] for _ in range(n_gaze)]).reshape(-1, 2)
    g = gaze_potential_from_centers(centers, pts, 150.0, 1e-3)
    assert abs(g.sum() - 1.0) <= 1e-9
    assert np.all(g > 0)


def test_potential_gaze_permutation_invariant_and_shot_equivariant():
    centers = np.array([[100.0, 100.0], [500.0, 200.0], [900.0, 300.0]])
    pts = np.array([[120.0, 90.0], [880.0, 310.0], [400.0, 150.0]])
    g1 = gaze_potential_from_centers(centers, pts, 150.0, 1e-3)
    g2 = gaze_potential_from_centers(centers, pts[::-1], 150.0, 1e-3)
    assert g1 == pytest.approx(g2, abs=1e-12)
    perm = [2, 0, 1]
    g3 = gaze_potential_from_centers(centers[perm], pts, 150.0, 1e-3)
    assert g3 == pytest.approx(g1[perm], abs=1e-12)


def test_transition_cost():
    assert transition_cost(3, 3, 4.0) == 0.0
    assert transition_cost(1, 2, 4.0) == 4.0
    assert transition_cost(1, 2, 0.0) == 0.0


def test_overlap_ratio_cases():
    a = BBox(0, 0, 2, 2)
    assert overlap_ratio(a, a) == 1.0
    assert overlap_ratio(a, BBox(10, 10, 2, 2)) == 0.0
    assert overlap_ratio(a, BBox(1, 0, 2, 2)) == pytest.approx(2 / 6)


def test_overlap_cost_piecewise():
    assert overlap_cost(0.1, CP) == 0.0
    assert overlap_cost(1.0, CP) == CP.upsilon_overlap
    assert overlap_cost(0.55, CP) == pytest.approx(4.0 * 0.25 / 0.5)


def test_rhythm_cost_midpoint_and_tails():
    l = CP.min_shot_frames
    s = CP.logistic_scale
    assert rhythm_cost(0, 1, l, CP) == pytest.approx(CP.gamma_cut * 0.5)
    assert rhythm_cost(0, 0, 1, CP) == pytest.approx(0.0, abs=1e-6)
    assert rhythm_cost(0, 1, int(l + 10 * s), CP) < CP.gamma_cut * 1e-4
    with pytest.raises(ValueError):
        rhythm_cost(0, 1, -1, CP)


def test_rhythm_monotonicity():
    taus = range(0, 400, 7)
    cuts = [rhythm_cost(0, 1, t, CP) for t in taus]
    stays = [rhythm_cost(0, 0, t, CP) for t in taus]
    assert all(a >= b - 1e-12 for a, b in zip(cuts, cuts[1:]))
    assert all(a <= b + 1e-12 for a, b in zip(stays, stays[1:]))


@given(st.floats(0, 1), st.floats(0, 1))
def test_overlap_cost_monotone(g1, g2):
    lo, hi = min(g1, g2), max(g1, g2)
    assert overlap_cost(lo, CP) <= overlap_cost(hi, CP) + 1e-12


def test_edit_cost_same_shot_small():
    b = BBox(0, 0, 100, 100)
    assert edit_cost(2, 2, b, b, 5, CP) == pytest.approx(0.0, abs=1e-4)


def test_edit_cost_disjoint_cut_at_min_duration():
    a, b = BBox(0, 0, 100, 100), BBox(1000, 0, 100, 100)
    got = edit_cost(0, 1, a, b, CP.min_shot_frames, CP)
    assert got == pytest.approx(CP.lambda_transition + CP.gamma_cut / 2)


def test_edit_cost_identical_crops_long_run():
    b = BBox(0, 0, 100, 100)
    got = edit_cost(0, 1, b, b, CP.min_shot_frames * 20, CP)
    assert got == pytest.approx(CP.lambda_transition + CP.upsilon_overlap, abs=1e-3)


def test_pairwise_matrix_matches_scalar():
    rng = np.random.default_rng(0)
    s = 5
    crops_prev = rng.uniform(0, 500, (s, 4)) + [[0, 0, 50, 50]]
    crops_cur = rng.uniform(0, 500, (s, 4)) + [[0, 0, 50, 50]]
    runlen = rng.integers(1, 100, s)
    m = pairwise_cost_matrix(crops_prev, crops_cur, runlen, CP)
    for i in range(s):
        bi = BBox(*crops_prev[i])
        for j in range(s):
            bj = BBox(*crops_cur[j])
            assert m[i, j] == pytest.approx(
                edit_cost(i, j, bi, bj, int(runlen[i]), CP), abs=1e-12
            )


def test_iou_matrix_matches_scalar():
    rng = np.random.default_rng(1)
    a = rng.uniform(0, 500, (4, 4)) + [[0, 0, 30, 30]]
    b = rng.uniform(0, 500, (3, 4)) + [[0, 0, 30, 30]]
    m = iou_matrix(a, b)
    for i in range(4):
        for j in range(3):
            assert m[i, j] == pytest.approx(
                overlap_ratio(BBox(*a[i]), BBox(*b[j])), abs=1e-12
            )
