"""Phone-level prosody track model and its canonical on-disk format.

A track is the object every edit acts on: an ordered list of phones, each
carrying F0, energy and duration, grouped into words. Files use a canonical
JSON layout (fixed key order, shortest round-tripping float repr, trailing
newline) so that serialization is byte-deterministic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path


class TrackFormatError(ValueError):
    """Malformed track document or violated track invariant."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class F0Domain(str, Enum):
    HZ = "hz"
    LOG_HZ = "log_hz"


class FeatureKind(str, Enum):
    F0 = "f0"
    ENERGY = "energy"
    DURATION = "duration"


# F0 and energy edits retarget a word mean; duration edits apply a scale.
SCALAR_FEATURES = (FeatureKind.F0, FeatureKind.ENERGY)


@dataclass(frozen=True)
class Phone:
    symbol: str
    voiced: bool
    f0: float
    energy: float
    duration: float


@dataclass(frozen=True)
class Word:
    text: str
    phone_indices: tuple[int, ...]


@dataclass(frozen=True)
class UtteranceTrack:
    id: str
    text: str
    phones: tuple[Phone, ...]
    words: tuple[Word, ...]
    f0_domain: F0Domain = F0Domain.HZ

    def total_duration(self) -> float:
        return math.fsum(p.duration for p in self.phones)

    def word_phones(self, word_index: int) -> tuple[Phone, ...]:
        return tuple(self.phones[i] for i in self.words[word_index].phone_indices)

    def with_phones(self, phones: tuple[Phone, ...]) -> "UtteranceTrack":
        return replace(self, phones=phones)


def validate_track(track: UtteranceTrack) -> None:
    """Check all track invariants; raise TrackFormatError with a field path."""
    if not track.phones:
        raise TrackFormatError("track has no phones", "phones")
    if not track.words:
        raise TrackFormatError("track has no words", "words")
    for i, p in enumerate(track.phones):
        where = f"phones[{i}]"
        for name, value in (("f0", p.f0), ("energy", p.energy), ("duration", p.duration)):
            if not isinstance(value, float) or not math.isfinite(value):
                raise TrackFormatError("non-finite number", f"{where}.{name}")
        if p.duration < 0:
            raise TrackFormatError("negative duration", f"{where}.duration")
        if p.energy < 0:
            raise TrackFormatError("negative energy", f"{where}.energy")
        if not p.voiced:
            if p.f0 != 0.0:
                raise TrackFormatError(
                    "voiceless phone must store f0 = 0", f"{where}.f0"
                )
        else:
            if track.f0_domain is F0Domain.LOG_HZ and p.f0 <= 0:
                raise TrackFormatError(
                    "voiced log-domain f0 must be strictly positive (store offset values)",
                    f"{where}.f0",
                )
            if track.f0_domain is F0Domain.HZ and p.f0 < 0:
                raise TrackFormatError("negative f0", f"{where}.f0")
    seen: list[int] = []
    for w, word in enumerate(track.words):
        if not word.phone_indices:
            raise TrackFormatError("word has no phones", f"words[{w}].phones")
        for idx in word.phone_indices:
            if not 0 <= idx < len(track.phones):
                raise TrackFormatError(
                    f"word partition violation: phone index {idx} out of range",
                    f"words[{w}].phones",
                )
        seen.extend(word.phone_indices)
    if seen != list(range(len(track.phones))):
        raise TrackFormatError(
            "word partition violation: words must cover phones 0..n-1 exactly, in order",
            "words",
        )


# ---------------------------------------------------------------------------
# Canonical document form


def canonical_json(obj) -> str:
    """Canonical JSON text: 2-space indent, fixed key order (from dict order),
    shortest round-tripping floats, newline-terminated."""
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def track_to_obj(track: UtteranceTrack) -> dict:
    return {
        "id": track.id,
        "text": track.text,
        "f0_domain": track.f0_domain.value,
        "words": [
            {"text": w.text, "phones": list(w.phone_indices)} for w in track.words
        ],
        "phones": [
            {
                "symbol": p.symbol,
                "voiced": p.voiced,
                "f0": float(p.f0),
                "energy": float(p.energy),
                "duration": float(p.duration),
            }
            for p in track.phones
        ],
    }


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise TrackFormatError(f"missing field '{key}'", path)
    return obj[key]


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise TrackFormatError("expected string", path)
    return value


def _as_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise TrackFormatError("expected boolean", path)
    return value


def _as_float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TrackFormatError("expected number", path)
    value = float(value)
    if not math.isfinite(value):
        raise TrackFormatError("non-finite number", path)
    return value


def _check_keys(obj: dict, allowed: tuple[str, ...], path: str) -> None:
    extra = set(obj) - set(allowed)
    if extra:
        raise TrackFormatError(f"unknown field(s): {sorted(extra)}", path)


def track_from_obj(obj, path: str = "") -> UtteranceTrack:
    """Build and validate a track from a decoded JSON object."""
    if not isinstance(obj, dict):
        raise TrackFormatError("expected object", path or "document root")
    _check_keys(obj, ("id", "text", "f0_domain", "words", "phones"), path or "document root")
    track_id = _as_str(_require(obj, "id", path), f"{path}id")
    text = _as_str(_require(obj, "text", path), f"{path}text")
    domain_raw = _as_str(_require(obj, "f0_domain", path), f"{path}f0_domain")
    try:
        domain = F0Domain(domain_raw)
    except ValueError:
        raise TrackFormatError(
            f"f0_domain must be one of {[d.value for d in F0Domain]}", f"{path}f0_domain"
        ) from None

    raw_words = _require(obj, "words", path)
    if not isinstance(raw_words, list):
        raise TrackFormatError("expected array", f"{path}words")
    words = []
    for w, rw in enumerate(raw_words):
        wpath = f"{path}words[{w}]"
        if not isinstance(rw, dict):
            raise TrackFormatError("expected object", wpath)
        _check_keys(rw, ("text", "phones"), wpath)
        wtext = _as_str(_require(rw, "text", wpath), f"{wpath}.text")
        idx_raw = _require(rw, "phones", wpath)
        if not isinstance(idx_raw, list):
            raise TrackFormatError("expected array of phone indices", f"{wpath}.phones")
        indices = []
        for k, v in enumerate(idx_raw):
            if isinstance(v, bool) or not isinstance(v, int):
                raise TrackFormatError("expected integer", f"{wpath}.phones[{k}]")
            indices.append(v)
        words.append(Word(text=wtext, phone_indices=tuple(indices)))

    raw_phones = _require(obj, "phones", path)
    if not isinstance(raw_phones, list):
        raise TrackFormatError("expected array", f"{path}phones")
    phones = []
    for i, rp in enumerate(raw_phones):
        ppath = f"{path}phones[{i}]"
        if not isinstance(rp, dict):
            raise TrackFormatError("expected object", ppath)
        _check_keys(rp, ("symbol", "voiced", "f0", "energy", "duration"), ppath)
        phones.append(
            Phone(
                symbol=_as_str(_require(rp, "symbol", ppath), f"{ppath}.symbol"),
                voiced=_as_bool(_require(rp, "voiced", ppath), f"{ppath}.voiced"),
                f0=_as_float(_require(rp, "f0", ppath), f"{ppath}.f0"),
                energy=_as_float(_require(rp, "energy", ppath), f"{ppath}.energy"),
                duration=_as_float(_require(rp, "duration", ppath), f"{ppath}.duration"),
            )
        )

    track = UtteranceTrack(
        id=track_id, text=text, phones=tuple(phones), words=tuple(words), f0_domain=domain
    )
    validate_track(track)
    return track


def parse_track(document: str | bytes) -> UtteranceTrack:
    """Parse a track document (UTF-8 text); validates every invariant."""
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as e:
            raise TrackFormatError(f"not valid UTF-8: {e}") from None
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as e:
        raise TrackFormatError(f"invalid JSON: {e}") from None
    return track_from_obj(obj)


def serialize_track(track: UtteranceTrack) -> str:
    """Canonical document for a valid track. Deterministic: two calls on the
    same track produce identical bytes."""
    validate_track(track)
    return canonical_json(track_to_obj(track))


def load_track(path: str | Path) -> UtteranceTrack:
    return parse_track(Path(path).read_text(encoding="utf-8"))


def save_track(path: str | Path, track: UtteranceTrack) -> None:
    Path(path).write_text(serialize_track(track), encoding="utf-8", newline="\n")
