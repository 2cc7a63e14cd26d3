"""HTTP/JSON API around the session store.

Endpoints:
    POST /sessions                  create a session from a track document
    GET  /sessions/{id}             full session state incl. slider ranges
    POST /sessions/{id}/edits       apply one word/utterance edit
    GET  /sessions/{id}/edits       effective ops as an edit script
    POST /sessions/{id}/reset       restore the baseline (logged)
    GET  /sessions/{id}/audio       ?variant=reference|original|edited -> WAV
    POST /sessions/{id}/submit      freeze with a confidence label
    GET  /export                    submitted sessions + summary statistics

Ranges shown to clients always come from the engine via the store, so any
value inside the returned bounds is accepted and any value outside is
rejected.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware

from . import engine, synth
from .session import (
    EditSession,
    SessionConflict,
    SessionStore,
    UnknownSession,
    _op_to_obj,
    export_to_obj,
    record_to_obj,
)
from .track import TrackFormatError, track_from_obj, track_to_obj

AUDIO_VARIANTS = ("reference", "original", "edited")


def _error(status: int, message: str, **extra) -> HTTPException:
    return HTTPException(status_code=status, detail={"error": message, **extra})


def _feasible_obj(feasible: engine.FeasibleRange) -> dict:
    return {"lo": feasible.lo, "hi": feasible.hi, "degenerate": feasible.degenerate}


def _map_engine_error(err: engine.EngineError) -> HTTPException:
    extra: dict[str, Any] = {}
    if err.index is not None:
        extra["edit_index"] = err.index
    if isinstance(err, (engine.RangeViolation, engine.DegenerateRange)):
        extra["feasible"] = _feasible_obj(err.feasible)
    return _error(409, str(err), **extra)


def session_state(store: SessionStore, session: EditSession) -> dict:
    return {
        "session_id": session.session_id,
        "status": session.status,
        "confidence": session.confidence,
        "created_at": session.created_at,
        "submitted_at": session.submitted_at,
        "backend": session.backend,
        "has_reference": session.reference_audio is not None,
        "text": session.baseline.text,
        "op_count": len(session.op_log),
        "op_log": [
            {"op": _op_to_obj(logged), "wall_time_ms": logged.wall_time_ms}
            for logged in session.op_log
        ],
        "baseline": track_to_obj(session.baseline),
        "current": track_to_obj(session.current),
        "sliders": store.slider_state(session),
    }


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="prosody-editor session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    def get_session(session_id: str) -> EditSession:
        try:
            return store.get(session_id)
        except UnknownSession as e:
            raise _error(404, str(e)) from None

    @app.post("/sessions")
    def create_session(body: dict = Body(...)):
        track_obj = body.get("track")
        if track_obj is None:
            raise _error(422, "missing 'track'")
        try:
            track = track_from_obj(track_obj)
        except TrackFormatError as e:
            raise _error(422, str(e), path=e.path) from None
        backend = body.get("backend")
        if backend is not None and not synth.is_valid_backend(backend):
            raise _error(422, f"unknown backend {backend!r}")
        try:
            session = store.create_session(
                track,
                reference_audio=body.get("reference_audio"),
                backend=backend,
            )
        except Exception as e:  # stats/domain mismatch
            raise _error(422, str(e)) from None
        return session_state(store, session)

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return session_state(store, get_session(session_id))

    @app.post("/sessions/{session_id}/edits")
    def apply_edit(session_id: str, body: dict = Body(...)):
        get_session(session_id)
        try:
            op = engine.edit_from_obj(body)
        except engine.EditScriptError as e:
            raise _error(422, str(e)) from None
        try:
            session = store.apply_edit(session_id, op)
        except SessionConflict as e:
            raise _error(409, str(e)) from None
        except engine.EngineError as e:
            raise _map_engine_error(e) from None
        return session_state(store, session)

    @app.get("/sessions/{session_id}/edits")
    def edit_script(session_id: str):
        session = get_session(session_id)
        return [engine.edit_to_obj(e) for e in session.effective_edits()]

    @app.post("/sessions/{session_id}/reset")
    def reset(session_id: str):
        get_session(session_id)
        try:
            session = store.reset(session_id)
        except SessionConflict as e:
            raise _error(409, str(e)) from None
        return session_state(store, session)

    @app.get("/sessions/{session_id}/audio")
    def audio(session_id: str, variant: str = Query(...)):
        session = get_session(session_id)
        if variant not in AUDIO_VARIANTS:
            raise _error(400, f"unknown variant {variant!r}, expected one of {AUDIO_VARIANTS}")
        if variant == "reference":
            if session.reference_audio is None:
                raise _error(404, "session has no reference audio")
            path = Path(session.reference_audio)
            if not path.exists():
                raise _error(404, f"reference audio missing: {path}")
            data = path.read_bytes()
        else:
            track = session.baseline if variant == "original" else session.current
            try:
                buffer = synth.synthesize(track, session.backend, store.sample_rate)
            except synth.SynthesisError as e:
                raise _error(502, str(e)) from None
            data = synth.encode_wav(buffer)
        return Response(content=data, media_type="audio/wav")

    @app.post("/sessions/{session_id}/submit")
    def submit(session_id: str, body: dict = Body(...)):
        get_session(session_id)
        confidence = body.get("confidence")
        if confidence not in ("low", "high"):
            raise _error(422, "confidence must be 'low' or 'high'")
        try:
            record = store.submit(session_id, confidence)
        except SessionConflict as e:
            raise _error(409, str(e)) from None
        return record_to_obj(record)

    @app.get("/export")
    def export(
        modified_only: bool = Query(False),
        confidence: str | None = Query(None),
    ):
        if confidence is not None and confidence not in ("low", "high"):
            raise _error(422, "confidence filter must be 'low' or 'high'")
        return export_to_obj(store.export(modified_only=modified_only, confidence=confidence))

    return app
