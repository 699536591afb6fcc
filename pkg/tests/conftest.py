"""Shared fixtures: jit warm-up and the synthetic scene suite."""
from __future__ import annotations

import dataclasses

import pytest
from hypothesis import settings

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


def pytest_configure(config):
    from gazecut import stabilize

    stabilize.warmup_jit()


@dataclasses.dataclass
class Scene:
    seed: int
    tracks: object
    gaze: object
    params: object
    streams: list
    offline: object  # EditDecisionList
    offline_cost: float


@pytest.fixture(scope="session")
def scene_suite():
    """Ten seeded 2000-frame scenes with 3-5 actors, streams precomputed.

    Shared test data for the acceptance criteria; building the candidate
    streams dominates the cost, so it happens once per session.
    """
    from gazecut.ingest import default_params
    from gazecut.selector import run_offline_oracle
    from gazecut.shotgen import generate_shot_streams
    from gazecut.synth import synth_scene

    scenes = []
    for seed in range(10):
        n_actors = 3 + seed % 3
        tracks, gaze, _ = synth_scene(seed=seed, n_actors=n_actors, frames=2000)
        params = default_params(tracks.clip)
        streams = generate_shot_streams(tracks, params)
        offline, cost = run_offline_oracle(tracks, gaze, params, streams=streams)
        scenes.append(
            Scene(
                seed=seed,
                tracks=tracks,
                gaze=gaze,
                params=params,
                streams=streams,
                offline=offline,
                offline_cost=cost,
            )
        )
    return scenes
