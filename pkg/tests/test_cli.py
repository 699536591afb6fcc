"""End-to-end CLI tests over synthesized fixtures."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from gazecut.cli import main, read_edl_csv
from gazecut.model import edl_runs


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture")
    rc = main([
        "synth", "--seed", "5", "--actors", "3", "--frames", "200",
        "--with-speakers", "--out", str(out),
    ])
    assert rc == 0
    return out


def _run(fixture_dir, out, mode, extra=()):
    argv = [
        "run",
        "--tracks", str(fixture_dir / "tracks.csv"),
        "--clip", str(fixture_dir / "clip.json"),
        "--mode", mode,
        "--out", str(out),
    ]
    if mode != "wide":
        argv += ["--gaze", str(fixture_dir / "gaze.csv")]
    if mode == "speaker":
        argv += ["--speakers", str(fixture_dir / "speakers.csv")]
    argv += list(extra)
    return main(argv)


def test_synth_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main([
            "synth", "--seed", "9", "--actors", "2", "--frames", "50", "--out", str(out)
        ]) == 0
    for name in ("tracks.csv", "gaze.csv", "clip.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_synth_rejects_zero_actors(tmp_path):
    assert main(["synth", "--actors", "0", "--frames", "10", "--out", str(tmp_path)]) == 2


def test_synth_parses_back(fixture_dir):
    from gazecut import ingest

    clip = ingest.load_clip(str(fixture_dir / "clip.json"))
    tracks = ingest.parse_tracks(str(fixture_dir / "tracks.csv"), clip)
    assert tracks.actor_count == 3
    from gazecut.shotgen import build_shot_specs

    assert len(build_shot_specs(tracks.actor_count)) == 6


@pytest.mark.parametrize("mode", ["wide", "greedy", "speaker", "offline", "realtime"])
def test_run_modes_write_artifacts(fixture_dir, tmp_path, mode):
    out = tmp_path / mode
    assert _run(fixture_dir, out, mode) == 0
    for name in ("edl.csv", "runs.json", "report.json", "manifest.json"):
        assert (out / name).exists()
    edl = read_edl_csv(out / "edl.csv")
    assert len(edl.decisions) == 200
    report = json.loads((out / "report.json").read_text())
    assert report["mode"] == mode
    runs = json.loads((out / "runs.json").read_text())
    assert report["cut_count"] == len(runs) - 1
    assert sum(r["len"] for r in runs) == 200


def test_run_wide_is_constant(fixture_dir, tmp_path):
    out = tmp_path / "wide"
    assert _run(fixture_dir, out, "wide") == 0
    edl = read_edl_csv(out / "edl.csv")
    assert len(set(edl.shot_ids())) == 1


def test_run_missing_gaze_fails(fixture_dir, tmp_path):
    rc = main([
        "run",
        "--tracks", str(fixture_dir / "tracks.csv"),
        "--clip", str(fixture_dir / "clip.json"),
        "--mode", "realtime",
        "--out", str(tmp_path / "x"),
    ])
    assert rc == 2


def test_run_flag_overrides_beat_params(fixture_dir, tmp_path):
    params_file = tmp_path / "params.json"
    params_file.write_text(json.dumps({"lookahead_frames": 16, "alpha_continuity": 5}))
    out = tmp_path / "ov"
    assert _run(
        fixture_dir, out, "realtime",
        extra=["--params", str(params_file), "--lookahead", "32", "--alpha", "9"],
    ) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["params"]["lookahead_frames"] == 32
    assert manifest["params"]["alpha_continuity"] == 9


def test_run_dumps(fixture_dir, tmp_path):
    out = tmp_path / "dumps"
    assert _run(
        fixture_dir, out, "wide",
        extra=["--dump-rushes", "--dump-trajectory", "5", "cx"],
    ) == 0
    rushes = (out / "rushes.csv").read_text().splitlines()
    assert rushes[0] == "frame,shot_id,x,y,w,h"
    assert len(rushes) == 1 + 6 * 200
    traj = (out / "trajectory.csv").read_text().splitlines()
    assert traj[0] == "frame,raw,smoothed"
    assert len(traj) == 1 + 200


def test_run_deterministic(fixture_dir, tmp_path):
    outs = []
    for name in ("d1", "d2"):
        out = tmp_path / name
        assert _run(fixture_dir, out, "realtime") == 0
        outs.append((out / "edl.csv").read_bytes())
    assert outs[0] == outs[1]


def test_compare_identical(fixture_dir, tmp_path, capsys):
    out = tmp_path / "c"
    assert _run(fixture_dir, out, "wide") == 0
    capsys.readouterr()
    assert main(["compare", str(out / "edl.csv"), str(out / "edl.csv")]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["match_rate"] == 1.0
    assert result["diff_segments"] == []
    assert result["cut_count_delta"] == 0


def test_compare_length_mismatch(fixture_dir, tmp_path):
    out = tmp_path / "c2"
    assert _run(fixture_dir, out, "wide") == 0
    short = tmp_path / "short.csv"
    lines = (out / "edl.csv").read_text().splitlines()
    short.write_text("\n".join(lines[:50]) + "\n")
    assert main(["compare", str(out / "edl.csv"), str(short)]) == 2


def test_compare_reports_diffs(fixture_dir, tmp_path, capsys):
    out_a = tmp_path / "ca"
    out_b = tmp_path / "cb"
    assert _run(fixture_dir, out_a, "wide") == 0
    assert _run(fixture_dir, out_b, "greedy") == 0
    capsys.readouterr()
    assert main(["compare", str(out_a / "edl.csv"), str(out_b / "edl.csv")]) == 0
    result = json.loads(capsys.readouterr().out)
    assert 0.0 <= result["match_rate"] <= 1.0
    total_diff = sum(d["len"] for d in result["diff_segments"])
    assert total_diff == round((1 - result["match_rate"]) * result["frames"])


def test_bench_rejects_zero_frames(tmp_path):
    assert main(["bench", "--frames", "0"]) == 2


def test_run_realtime_latency_reported(fixture_dir, tmp_path):
    out = tmp_path / "lat"
    assert _run(fixture_dir, out, "realtime") == 0
    report = json.loads((out / "report.json").read_text())
    assert report["latency"] is not None
    assert report["latency"]["mean_ms"] > 0


def test_run_min_duration_invariant(fixture_dir, tmp_path):
    for mode in ("realtime", "greedy", "speaker"):
        out = tmp_path / f"md_{mode}"
        assert _run(fixture_dir, out, mode) == 0
        edl = read_edl_csv(out / "edl.csv")
        runs = edl_runs(edl)
        for _, _, length in runs[:-1]:
            assert length >= round(1.5 * 25)
