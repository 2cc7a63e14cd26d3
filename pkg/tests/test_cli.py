import json
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from prosody_editor.cli import main
from prosody_editor.stats import load_stats
from prosody_editor.synth import decode_wav
from prosody_editor.track import load_track, save_track

from conftest import make_track

FIXTURES = Path(__file__).parent / "fixtures"
TRACKS = FIXTURES / "tracks"


@pytest.fixture
def runner():
    return CliRunner()


def test_stats_matches_hand_check(runner, tmp_path):
    out = tmp_path / "corpus.stats.json"
    result = runner.invoke(main, ["stats", str(TRACKS), "--out", str(out)])
    assert result.exit_code == 0, result.output
    stats = load_stats(out)
    # tiny track (0.2 s) is excluded by the default min duration filter
    tracks = [
        load_track(p)
        for p in sorted(TRACKS.glob("*.track.json"))
        if "tiny" not in p.name
    ]
    voiced = [p.f0 for t in tracks for p in t.phones if p.voiced]
    assert stats.f0.count == len(voiced)
    assert stats.f0.mean == pytest.approx(sum(voiced) / len(voiced))


def test_stats_min_dur_zero_keeps_short_tracks(runner, tmp_path):
    out = tmp_path / "all.stats.json"
    result = runner.invoke(
        main, ["stats", str(TRACKS), "--out", str(out), "--min-dur", "0"]
    )
    assert result.exit_code == 0
    assert load_stats(out).f0.count == 13  # tiny track's voiced phone now counts


def test_stats_empty_dir_exits_2(runner, tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    result = runner.invoke(main, ["stats", str(empty), "--out", str(tmp_path / "s.json")])
    assert result.exit_code == 2
    assert "no surviving tracks" in result.output


def _make_stats(runner, tmp_path):
    stats_path = tmp_path / "corpus.stats.json"
    assert (
        runner.invoke(main, ["stats", str(TRACKS), "--out", str(stats_path)]).exit_code
        == 0
    )
    return stats_path


def test_apply_empty_script_is_identity(runner, tmp_path):
    stats_path = _make_stats(runner, tmp_path)
    script = tmp_path / "none.edits.json"
    script.write_text("[]\n", encoding="utf-8")
    out = tmp_path / "out.track.json"
    track_in = TRACKS / "fx-greeting.track.json"
    result = runner.invoke(
        main, ["apply", str(track_in), str(script), "--stats", str(stats_path), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert out.read_bytes() == track_in.read_bytes()


def test_apply_fixture_edits(runner, tmp_path):
    stats_path = _make_stats(runner, tmp_path)
    out = tmp_path / "edited.track.json"
    result = runner.invoke(
        main,
        [
            "apply",
            str(TRACKS / "fx-greeting.track.json"),
            str(FIXTURES / "sample.edits.json"),
            "--stats",
            str(stats_path),
            "--out",
            str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    edited = load_track(out)
    baseline = load_track(TRACKS / "fx-greeting.track.json")
    voiced = [p.f0 for p in edited.phones[:3] if p.voiced]
    assert sum(voiced) / len(voiced) == pytest.approx(175.0, rel=1e-9)
    assert edited.phones[0].duration == pytest.approx(1.25 * baseline.phones[0].duration)


def test_apply_out_of_range_exits_3(runner, tmp_path):
    stats_path = _make_stats(runner, tmp_path)
    script = tmp_path / "bad.edits.json"
    script.write_text(
        json.dumps([{"scope": "word", "word_index": 0, "feature": "f0", "value": 9999.0}]),
        encoding="utf-8",
    )
    result = runner.invoke(
        main,
        [
            "apply",
            str(TRACKS / "fx-greeting.track.json"),
            str(script),
            "--stats",
            str(stats_path),
            "--out",
            str(tmp_path / "x.json"),
        ],
    )
    assert result.exit_code == 3
    assert "feasible" in result.output
    assert "edit 0" in result.output


def test_synth_deterministic(runner, tmp_path):
    a, b = tmp_path / "a.wav", tmp_path / "b.wav"
    for out in (a, b):
        result = runner.invoke(
            main, ["synth", str(TRACKS / "fx-question.track.json"), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
    assert a.read_bytes() == b.read_bytes()
    track = load_track(TRACKS / "fx-question.track.json")
    buf = decode_wav(a.read_bytes())
    assert abs(len(buf) - round(track.total_duration() * 22050)) <= 1


def test_synth_nyquist_exits_4(runner, tmp_path):
    bad = make_track([(True, 12000.0, 1.0, 0.1)])
    track_path = tmp_path / "bad.track.json"
    save_track(track_path, bad)
    result = runner.invoke(
        main, ["synth", str(track_path), "--out", str(tmp_path / "x.wav")]
    )
    assert result.exit_code == 4
    assert "Nyquist" in result.output


def test_analyze_export_only(runner, tmp_path):
    out = tmp_path / "analysis.json"
    result = runner.invoke(
        main, ["analyze", "--export", str(FIXTURES / "sample.export.json"), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    bundle = json.loads(out.read_text())
    assert "edit_distribution" in bundle
    assert "table" not in bundle
    assert "effort_vs_quality" not in bundle


def test_analyze_full_bundle(runner, tmp_path):
    out = tmp_path / "analysis.json"
    result = runner.invoke(
        main,
        [
            "analyze",
            "--export", str(FIXTURES / "sample.export.json"),
            "--ratings", str(FIXTURES / "sample.ratings.jsonl"),
            "--embeddings", str(FIXTURES / "sample.embeddings.jsonl"),
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    bundle = json.loads(out.read_text())
    assert set(bundle) == {
        "export_summary",
        "edit_distribution",
        "table",
        "distance_vs_mushra",
        "effort_vs_quality",
    }
    assert bundle["table"]["table"]["total"]["edited"]["mos"]["n"] == 3
    assert set(bundle["effort_vs_quality"]) == {"mos_1_5", "mushra_0_100", "ab_choice"}


def test_analyze_malformed_ratings_line_exits_2(runner, tmp_path):
    ratings = tmp_path / "bad.jsonl"
    ratings.write_text('{"item_id": "a"}\n', encoding="utf-8")
    result = runner.invoke(
        main, ["analyze", "--ratings", str(ratings), "--out", str(tmp_path / "x.json")]
    )
    assert result.exit_code == 2
    assert "line 1" in result.output


def test_analyze_nothing_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["analyze", "--out", str(tmp_path / "x.json")])
    assert result.exit_code == 2


def test_serve_bad_stats_path_exits_2(runner, tmp_path):
    result = runner.invoke(
        main,
        [
            "serve",
            "--stats", str(tmp_path / "missing.stats.json"),
            "--journal-dir", str(tmp_path / "journal"),
        ],
    )
    assert result.exit_code == 2
    assert "missing.stats.json" in result.output


def test_serve_bad_listen_exits_2(runner, tmp_path):
    stats_path = _make_stats(runner, tmp_path)
    result = runner.invoke(
        main,
        [
            "serve",
            "--stats", str(stats_path),
            "--journal-dir", str(tmp_path / "journal"),
            "--listen", "nonsense",
        ],
    )
    assert result.exit_code == 2
    assert "host:port" in result.output


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_serve_subprocess_start_and_clean_stop(tmp_path):
    import requests

    stats_path = tmp_path / "corpus.stats.json"
    CliRunner().invoke(main, ["stats", str(TRACKS), "--out", str(stats_path)])
    port = _free_port()
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "prosody_editor.cli", "serve",
            "--stats", str(stats_path),
            "--journal-dir", str(tmp_path / "journal"),
            "--listen", f"127.0.0.1:{port}",
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
    )
    try:
        deadline = time.time() + 15
        while True:
            try:
                resp = requests.get(f"http://127.0.0.1:{port}/export", timeout=1)
                break
            except requests.RequestException:
                if time.time() > deadline or proc.poll() is not None:
                    raise AssertionError(
                        f"server did not start: {proc.stdout.read().decode()}"
                    )
                time.sleep(0.2)
        assert resp.status_code == 200
        assert resp.json()["summary"]["count"] == 0
    finally:
        proc.send_signal(signal.SIGINT)
        assert proc.wait(timeout=10) == 0
