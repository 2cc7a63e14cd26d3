"""Edit sessions: state, operation logging, journal persistence, export.

A session holds a baseline track and a current track that is always the fold
of the effective operations (those after the last reset) over the baseline.
Every accepted operation is appended to an on-disk journal, one JSON document
per line, and replaying the journal reconstructs every session bit-exactly.
Submitted sessions are frozen and become original/edited export records.
"""

from __future__ import annotations

import json
import math
import statistics
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import engine
from .engine import Edit, UtteranceEdit, WordEdit, FeasibleRange
from .stats import CorpusStats
from .track import (
    FeatureKind,
    UtteranceTrack,
    canonical_json,
    track_from_obj,
    track_to_obj,
    validate_track,
)

CONFIDENCE_LEVELS = ("low", "high")


class SessionError(Exception):
    pass


class UnknownSession(SessionError):
    pass


class SessionConflict(SessionError):
    """Operation not allowed in the session's current state."""


class JournalError(SessionError):
    pass


@dataclass(frozen=True)
class LoggedOp:
    """One logged control input; op is None for a reset marker."""

    op: Edit | None
    wall_time_ms: int

    @property
    def is_reset(self) -> bool:
        return self.op is None


@dataclass
class EditSession:
    session_id: str
    baseline: UtteranceTrack
    current: UtteranceTrack
    backend: str
    reference_audio: str | None = None
    op_log: list[LoggedOp] = field(default_factory=list)
    created_at: float = 0.0
    submitted_at: float | None = None
    confidence: str = "unset"
    status: str = "open"

    def effective_edits(self) -> list[Edit]:
        edits: list[Edit] = []
        for logged in self.op_log:
            if logged.is_reset:
                edits.clear()
            else:
                edits.append(logged.op)
        return edits

    @property
    def elapsed_seconds(self) -> float | None:
        if self.submitted_at is None:
            return None
        return self.submitted_at - self.created_at


@dataclass(frozen=True)
class ExportRecord:
    session_id: str
    baseline: UtteranceTrack
    edited: UtteranceTrack
    op_count: int
    elapsed_seconds: float
    confidence: str
    modified: bool


def _op_to_obj(logged: LoggedOp) -> dict:
    if logged.is_reset:
        return {"scope": "reset"}
    return engine.edit_to_obj(logged.op)


def _op_from_obj(obj) -> Edit | None:
    if isinstance(obj, dict) and obj.get("scope") == "reset":
        return None
    return engine.edit_from_obj(obj)


def record_to_obj(record: ExportRecord) -> dict:
    return {
        "session_id": record.session_id,
        "confidence": record.confidence,
        "modified": record.modified,
        "op_count": record.op_count,
        "elapsed_seconds": float(record.elapsed_seconds),
        "baseline": track_to_obj(record.baseline),
        "edited": track_to_obj(record.edited),
    }


def record_from_obj(obj, path: str = "record") -> ExportRecord:
    if not isinstance(obj, dict):
        raise SessionError(f"{path}: expected object")
    try:
        record = ExportRecord(
            session_id=obj["session_id"],
            baseline=track_from_obj(obj["baseline"]),
            edited=track_from_obj(obj["edited"]),
            op_count=int(obj["op_count"]),
            elapsed_seconds=float(obj["elapsed_seconds"]),
            confidence=obj["confidence"],
            modified=bool(obj["modified"]),
        )
    except KeyError as e:
        raise SessionError(f"{path}: missing field {e}") from None
    if record.confidence not in CONFIDENCE_LEVELS:
        raise SessionError(f"{path}.confidence: expected one of {CONFIDENCE_LEVELS}")
    return record


def summarize_records(records: list[ExportRecord]) -> dict:
    """Counts plus mean±std (sample) of op_count and elapsed_seconds."""

    def mean_std(values: list[float]) -> dict | None:
        if not values:
            return None
        mean = statistics.fmean(values)
        std = statistics.stdev(values) if len(values) > 1 else 0.0
        return {
            "mean": mean,
            "std": std,
            "n": len(values),
            "single_sample": len(values) == 1,
        }

    return {
        "count": len(records),
        "modified_count": sum(1 for r in records if r.modified),
        "unmodified_count": sum(1 for r in records if not r.modified),
        "op_count": mean_std([float(r.op_count) for r in records]),
        "elapsed_seconds": mean_std([r.elapsed_seconds for r in records]),
    }


def export_to_obj(records: list[ExportRecord]) -> dict:
    return {
        "records": [record_to_obj(r) for r in records],
        "summary": summarize_records(records),
    }


def parse_export(document: str | bytes) -> list[ExportRecord]:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as e:
        raise SessionError(f"invalid JSON: {e}") from None
    if not isinstance(obj, dict) or not isinstance(obj.get("records"), list):
        raise SessionError("export document: expected object with 'records' array")
    return [
        record_from_obj(o, f"records[{i}]") for i, o in enumerate(obj["records"])
    ]


def load_export(path: str | Path) -> list[ExportRecord]:
    return parse_export(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Store


class SessionStore:
    """In-memory session state backed by an append-only JSONL journal.

    All mutations happen under one lock; current tracks are recomputed from
    the baseline and the effective op list on every change, so replaying the
    journal after a restart reproduces the exact same tracks.
    """

    def __init__(
        self,
        stats: CorpusStats,
        journal_dir: str | Path,
        backend: str = "mock",
        sample_rate: int = 22050,
        clock: Callable[[], float] = time.time,
    ):
        self.stats = stats
        self.backend = backend
        self.sample_rate = sample_rate
        self.clock = clock
        self.journal_dir = Path(journal_dir)
        self.journal_dir.mkdir(parents=True, exist_ok=True)
        self.journal_path = self.journal_dir / "journal.jsonl"
        self._lock = threading.RLock()
        self.sessions: dict[str, EditSession] = {}
        self._replay()
        self._journal_file = open(self.journal_path, "a", encoding="utf-8")

    def close(self) -> None:
        self._journal_file.close()

    # -- journal ------------------------------------------------------------

    def _append(self, event: dict) -> None:
        self._journal_file.write(json.dumps(event, ensure_ascii=False) + "\n")
        self._journal_file.flush()

    def _replay(self) -> None:
        if not self.journal_path.exists():
            return
        with open(self.journal_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                    self._replay_event(event)
                except (ValueError, KeyError, engine.EngineError) as e:
                    raise JournalError(
                        f"{self.journal_path}:{lineno}: unreadable journal: {e}"
                    ) from None

    def _replay_event(self, event: dict) -> None:
        kind = event["event"]
        if kind == "created":
            baseline = track_from_obj(event["baseline"])
            session = EditSession(
                session_id=event["session_id"],
                baseline=baseline,
                current=baseline,
                backend=event.get("backend", self.backend),
                reference_audio=event.get("reference_audio"),
                created_at=event["created_at"],
            )
            self.sessions[session.session_id] = session
        elif kind == "op":
            session = self.sessions[event["session_id"]]
            session.op_log.append(
                LoggedOp(op=_op_from_obj(event["op"]), wall_time_ms=event["wall_time_ms"])
            )
            session.current = engine.apply_edits(
                session.baseline, session.effective_edits(), self.stats
            )
        elif kind == "submitted":
            session = self.sessions[event["session_id"]]
            session.status = "submitted"
            session.confidence = event["confidence"]
            session.submitted_at = event["submitted_at"]
        else:
            raise JournalError(f"unknown journal event {kind!r}")

    # -- session lifecycle ----------------------------------------------------

    def create_session(
        self,
        baseline: UtteranceTrack,
        reference_audio: str | None = None,
        backend: str | None = None,
    ) -> EditSession:
        validate_track(baseline)
        if baseline.f0_domain is not self.stats.f0_domain:
            raise SessionError(
                f"track f0_domain {baseline.f0_domain.value!r} does not match "
                f"stats f0_domain {self.stats.f0_domain.value!r}"
            )
        with self._lock:
            session = EditSession(
                session_id=uuid.uuid4().hex,
                baseline=baseline,
                current=baseline,
                backend=backend or self.backend,
                reference_audio=reference_audio,
                created_at=self.clock(),
            )
            self.sessions[session.session_id] = session
            self._append(
                {
                    "event": "created",
                    "session_id": session.session_id,
                    "created_at": session.created_at,
                    "backend": session.backend,
                    "reference_audio": session.reference_audio,
                    "baseline": track_to_obj(baseline),
                }
            )
            return session

    def get(self, session_id: str) -> EditSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(f"unknown session {session_id!r}") from None

    def _open_session(self, session_id: str) -> EditSession:
        session = self.get(session_id)
        if session.status != "open":
            raise SessionConflict(f"session {session_id} already submitted")
        return session

    def _wall_time_ms(self, session: EditSession) -> int:
        now = int(round((self.clock() - session.created_at) * 1000.0))
        last = session.op_log[-1].wall_time_ms if session.op_log else 0
        return max(now, last, 0)

    def apply_edit(self, session_id: str, op: Edit) -> EditSession:
        """Validate, apply and log one control input. Invalid ops raise and
        are not logged; identity edits are logged like any interaction."""
        with self._lock:
            session = self._open_session(session_id)
            new_current = engine.apply_edits(
                session.baseline, session.effective_edits() + [op], self.stats
            )
            logged = LoggedOp(op=op, wall_time_ms=self._wall_time_ms(session))
            session.op_log.append(logged)
            session.current = new_current
            self._append(
                {
                    "event": "op",
                    "session_id": session_id,
                    "wall_time_ms": logged.wall_time_ms,
                    "op": _op_to_obj(logged),
                }
            )
            return session

    def reset(self, session_id: str) -> EditSession:
        with self._lock:
            session = self._open_session(session_id)
            logged = LoggedOp(op=None, wall_time_ms=self._wall_time_ms(session))
            session.op_log.append(logged)
            session.current = session.baseline
            self._append(
                {
                    "event": "op",
                    "session_id": session_id,
                    "wall_time_ms": logged.wall_time_ms,
                    "op": _op_to_obj(logged),
                }
            )
            return session

    def submit(self, session_id: str, confidence: str) -> ExportRecord:
        if confidence not in CONFIDENCE_LEVELS:
            raise SessionError(
                f"confidence must be one of {CONFIDENCE_LEVELS}, got {confidence!r}"
            )
        with self._lock:
            session = self._open_session(session_id)
            session.confidence = confidence
            session.submitted_at = self.clock()
            session.status = "submitted"
            self._append(
                {
                    "event": "submitted",
                    "session_id": session_id,
                    "confidence": confidence,
                    "submitted_at": session.submitted_at,
                }
            )
            return self._record(session)

    def _record(self, session: EditSession) -> ExportRecord:
        return ExportRecord(
            session_id=session.session_id,
            baseline=session.baseline,
            edited=session.current,
            op_count=len(session.op_log),
            elapsed_seconds=session.elapsed_seconds,
            confidence=session.confidence,
            modified=session.current != session.baseline,
        )

    def export(
        self, modified_only: bool = False, confidence: str | None = None
    ) -> list[ExportRecord]:
        """Submitted sessions as export records, ordered by submission time."""
        with self._lock:
            submitted = [s for s in self.sessions.values() if s.status == "submitted"]
            submitted.sort(key=lambda s: (s.submitted_at, s.session_id))
            records = [self._record(s) for s in submitted]
        if modified_only:
            records = [r for r in records if r.modified]
        if confidence is not None:
            records = [r for r in records if r.confidence == confidence]
        return records

    # -- slider state ---------------------------------------------------------

    def slider_state(self, session: EditSession) -> dict:
        """Per-word and utterance slider triplets (value, lo, hi, enabled).

        The engine accepts exactly the values inside the returned bounds, so
        the UI never computes ranges itself. Disabled sliders carry a reason.
        """
        current = session.current
        words = []
        for w, word in enumerate(current.words):
            entry: dict = {"word_index": w, "text": word.text, "sliders": {}}
            for feature in (FeatureKind.F0, FeatureKind.ENERGY):
                entry["sliders"][feature.value] = self._scalar_slider(current, w, feature)
            entry["sliders"]["duration"] = self._duration_slider(session, w)
            words.append(entry)
        return {"words": words, "utterance": self._utterance_sliders(session)}

    def _scalar_slider(self, current: UtteranceTrack, w: int, feature: FeatureKind) -> dict:
        try:
            feasible = engine.allowed_target_range(current, w, feature, self.stats)
            value = engine.word_mean(current, w, feature)
        except engine.NoContributingPhones:
            return _slider(None, None, None, False, "no voiced phones")
        except engine.ZeroValuedPhone:
            return _slider(None, None, None, False, "zero-valued phone")
        if feasible.degenerate:
            return _slider(
                value, feasible.lo, feasible.hi, False, "value already outside clamp bounds"
            )
        # current mean can sit an ulp outside its own feasible interval; clamp
        # for presentation so lo <= value <= hi always holds when enabled
        value = min(max(value, feasible.lo), feasible.hi)
        return _slider(value, feasible.lo, feasible.hi, True)

    def _duration_slider(self, session: EditSession, w: int) -> dict:
        base = math.fsum(
            session.baseline.phones[i].duration
            for i in session.baseline.words[w].phone_indices
        )
        if base <= 0:
            return _slider(None, None, None, False, "zero-duration word")
        cur = math.fsum(
            session.current.phones[i].duration
            for i in session.current.words[w].phone_indices
        )
        value = min(max(cur / base, engine.DURATION_SCALE_MIN), engine.DURATION_SCALE_MAX)
        return _slider(value, engine.DURATION_SCALE_MIN, engine.DURATION_SCALE_MAX, True)

    def _utterance_sliders(self, session: EditSession) -> dict:
        current = session.current
        sliders = {}
        for feature in (FeatureKind.F0, FeatureKind.ENERGY):
            try:
                feasible = engine.allowed_utterance_range(current, feature, self.stats)
            except engine.NoContributingPhones:
                sliders[feature.value] = _slider(None, None, None, False, "no voiced phones")
                continue
            except engine.ZeroValuedPhone:
                sliders[feature.value] = _slider(None, None, None, False, "zero-valued phone")
                continue
            if feasible.degenerate:
                sliders[feature.value] = _slider(
                    0.0, feasible.lo, feasible.hi, False, "empty feasible range"
                )
            else:
                # shift slider re-centers at 0 after every committed edit
                sliders[feature.value] = _slider(0.0, feasible.lo, feasible.hi, True)
        base_total = session.baseline.total_duration()
        if base_total <= 0:
            sliders["duration"] = _slider(None, None, None, False, "zero-duration utterance")
        else:
            value = session.current.total_duration() / base_total
            value = min(max(value, engine.DURATION_SCALE_MIN), engine.DURATION_SCALE_MAX)
            sliders["duration"] = _slider(
                value, engine.DURATION_SCALE_MIN, engine.DURATION_SCALE_MAX, True
            )
        return sliders


def _slider(value, lo, hi, enabled: bool, reason: str | None = None) -> dict:
    state = {"value": value, "lo": lo, "hi": hi, "enabled": enabled}
    if reason is not None:
        state["reason"] = reason
    return state


def save_export(path: str | Path, records: list[ExportRecord]) -> None:
    Path(path).write_text(
        canonical_json(export_to_obj(records)), encoding="utf-8", newline="\n"
    )
