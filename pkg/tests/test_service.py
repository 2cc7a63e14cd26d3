import numpy as np
import pytest
from fastapi.testclient import TestClient

from prosody_editor.service import create_app
from prosody_editor.session import SessionStore
from prosody_editor.synth import decode_wav, encode_wav, render_mock, save_wav
from prosody_editor.track import track_to_obj

from conftest import FIXTURE_STATS, make_track

SR = 22050


@pytest.fixture
def store(tmp_path):
    return SessionStore(FIXTURE_STATS, tmp_path / "journal", sample_rate=SR)


@pytest.fixture
def client(store):
    return TestClient(create_app(store))


@pytest.fixture
def fixture_track():
    return make_track(
        [(True, 100.0, 1.0, 0.1), (True, 200.0, 1.2, 0.2), (True, 300.0, 1.4, 0.1)]
    )


def create(client, track, **extra):
    resp = client.post("/sessions", json={"track": track_to_obj(track), **extra})
    assert resp.status_code == 200, resp.text
    return resp.json()


def test_create_and_get_state(client, fixture_track):
    state = create(client, fixture_track)
    assert state["op_count"] == 0
    assert state["status"] == "open"
    assert state["current"] == track_to_obj(fixture_track)
    sid = state["session_id"]
    assert client.get(f"/sessions/{sid}").json() == state


def test_create_rejects_invalid_track(client, fixture_track):
    obj = track_to_obj(fixture_track)
    obj["words"] = [{"text": "w0", "phones": [0, 1, 5]}]
    resp = client.post("/sessions", json={"track": obj})
    assert resp.status_code == 422
    detail = resp.json()["detail"]
    assert "word partition violation" in detail["error"]
    assert "path" in detail


def test_edit_updates_current_and_sliders(client, fixture_track):
    state = create(client, fixture_track)
    sid = state["session_id"]
    resp = client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "word", "word_index": 0, "feature": "f0", "value": 220.0},
    )
    assert resp.status_code == 200
    state = resp.json()
    assert [p["f0"] for p in state["current"]["phones"]] == [110.0, 220.0, 330.0]
    assert state["op_count"] == 1
    slider = state["sliders"]["words"][0]["sliders"]["f0"]
    assert slider["enabled"]
    assert slider["lo"] <= slider["value"] <= slider["hi"]


def test_range_violation_echoes_feasible_interval(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    resp = client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "word", "word_index": 0, "feature": "f0", "value": 5000.0},
    )
    assert resp.status_code == 409
    detail = resp.json()["detail"]
    assert detail["feasible"]["lo"] == pytest.approx(100.0)
    assert detail["feasible"]["hi"] == pytest.approx(800.0 / 3.0)


def test_malformed_edit_rejected(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    resp = client.post(f"/sessions/{sid}/edits", json={"scope": "phone"})
    assert resp.status_code == 422


def test_edit_after_submit_conflicts(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    assert client.post(f"/sessions/{sid}/submit", json={"confidence": "high"}).status_code == 200
    resp = client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "word", "word_index": 0, "feature": "duration", "value": 1.5},
    )
    assert resp.status_code == 409
    assert client.post(f"/sessions/{sid}/submit", json={"confidence": "low"}).status_code == 409


def test_submit_requires_confidence(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    assert client.post(f"/sessions/{sid}/submit", json={}).status_code == 422
    assert (
        client.post(f"/sessions/{sid}/submit", json={"confidence": "maybe"}).status_code
        == 422
    )


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/sessions/nope/reset").status_code == 404


def test_reset_endpoint(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "word", "word_index": 0, "feature": "f0", "value": 150.0},
    )
    state = client.post(f"/sessions/{sid}/reset").json()
    assert state["current"] == track_to_obj(fixture_track)
    assert state["op_count"] == 2
    assert state["op_log"][-1]["op"] == {"scope": "reset"}


def test_audio_identity_edit_keeps_bytes(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    original = client.get(f"/sessions/{sid}/audio", params={"variant": "original"})
    assert original.status_code == 200
    assert original.headers["content-type"] == "audio/wav"
    client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "word", "word_index": 0, "feature": "f0", "value": 200.0},
    )
    edited = client.get(f"/sessions/{sid}/audio", params={"variant": "edited"})
    assert edited.content == original.content


def test_audio_duration_doubling(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    original = client.get(f"/sessions/{sid}/audio", params={"variant": "original"}).content
    client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "utterance", "feature": "duration", "value": 2.0},
    )
    edited = client.get(f"/sessions/{sid}/audio", params={"variant": "edited"}).content
    assert abs(len(decode_wav(edited)) - 2 * len(decode_wav(original))) <= 1


def test_audio_unknown_variant_400(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    resp = client.get(f"/sessions/{sid}/audio", params={"variant": "remix"})
    assert resp.status_code == 400


def test_reference_audio_served_and_missing_404(client, fixture_track, tmp_path):
    sid = create(client, fixture_track)["session_id"]
    assert (
        client.get(f"/sessions/{sid}/audio", params={"variant": "reference"}).status_code
        == 404
    )
    ref = tmp_path / "ref.wav"
    save_wav(ref, render_mock(fixture_track, SR))
    sid2 = create(client, fixture_track, reference_audio=str(ref))["session_id"]
    resp = client.get(f"/sessions/{sid2}/audio", params={"variant": "reference"})
    assert resp.status_code == 200
    assert resp.content == ref.read_bytes()


def test_export_endpoint_with_filters(client, fixture_track):
    a = create(client, fixture_track)["session_id"]
    client.post(
        f"/sessions/{a}/edits",
        json={"scope": "word", "word_index": 0, "feature": "duration", "value": 1.5},
    )
    client.post(f"/sessions/{a}/submit", json={"confidence": "high"})
    b = create(client, fixture_track)["session_id"]
    client.post(f"/sessions/{b}/submit", json={"confidence": "low"})

    everything = client.get("/export").json()
    assert [r["session_id"] for r in everything["records"]] == [a, b]
    assert everything["summary"]["count"] == 2
    assert everything["summary"]["modified_count"] == 1

    modified = client.get("/export", params={"modified_only": "true"}).json()
    assert [r["session_id"] for r in modified["records"]] == [a]
    low = client.get("/export", params={"confidence": "low"}).json()
    assert [r["session_id"] for r in low["records"]] == [b]


def test_edit_script_export(client, fixture_track):
    sid = create(client, fixture_track)["session_id"]
    client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "word", "word_index": 0, "feature": "f0", "value": 220.0},
    )
    client.post(f"/sessions/{sid}/reset")
    client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "utterance", "feature": "duration", "value": 1.25},
    )
    script = client.get(f"/sessions/{sid}/edits").json()
    assert script == [{"scope": "utterance", "feature": "duration", "value": 1.25}]


def test_service_restart_preserves_export(tmp_path, fixture_track):
    journal = tmp_path / "journal"
    store = SessionStore(FIXTURE_STATS, journal, sample_rate=SR)
    client = TestClient(create_app(store))
    sid = create(client, fixture_track)["session_id"]
    client.post(
        f"/sessions/{sid}/edits",
        json={"scope": "word", "word_index": 0, "feature": "f0", "value": 180.0},
    )
    client.post(f"/sessions/{sid}/submit", json={"confidence": "high"})
    before = client.get("/export").json()
    store.close()

    client2 = TestClient(create_app(SessionStore(FIXTURE_STATS, journal, sample_rate=SR)))
    assert client2.get("/export").json() == before
