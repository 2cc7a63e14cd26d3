"""Word- and utterance-level prosody edits.

F0 and energy edits move a word's mean feature value to a new target: every
contributing phone is rescaled proportionally to its original value, so the
word keeps its internal shape while its mean lands on the target. Voiceless
phones neither contribute to F0 means nor are touched by F0 edits. Duration
edits scale every phone in the word by a constant in [0, 2], always relative
to the baseline prediction. Utterance-level controls decompose into one
word-level edit per eligible word.

Feasible ranges are derived from the corpus clamp bounds so that no edited
phone value can leave them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .stats import CorpusStats, clamp_bounds
from .track import (
    FeatureKind,
    Phone,
    UtteranceTrack,
    canonical_json,
)

# Relative floor applied to scalar target ranges whose clamp-derived lower
# bound is not positive (possible for energy when mean - mult*std <= 0).
TARGET_FLOOR_REL = 1e-9

DURATION_SCALE_MIN = 0.0
DURATION_SCALE_MAX = 2.0


class EngineError(ValueError):
    """Base for edit rejections. `index` is set by apply_edits."""

    def __init__(self, message: str):
        super().__init__(message)
        self.index: int | None = None


class NoContributingPhones(EngineError):
    pass


class ZeroValuedPhone(EngineError):
    pass


class RangeViolation(EngineError):
    """Requested value outside the feasible interval (attached)."""

    def __init__(self, message: str, feasible: "FeasibleRange"):
        super().__init__(message)
        self.feasible = feasible


class DegenerateRange(EngineError):
    """The word (or utterance) admits no legal value at all."""

    def __init__(self, message: str, feasible: "FeasibleRange"):
        super().__init__(message)
        self.feasible = feasible


@dataclass(frozen=True)
class FeasibleRange:
    lo: float
    hi: float

    @property
    def degenerate(self) -> bool:
        return self.lo > self.hi

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


@dataclass(frozen=True)
class WordEdit:
    word_index: int
    feature: FeatureKind
    value: float  # target word mean for f0/energy; scale in [0, 2] for duration


@dataclass(frozen=True)
class UtteranceEdit:
    feature: FeatureKind
    value: float  # additive mean shift for f0/energy; scale in [0, 2] for duration


Edit = WordEdit | UtteranceEdit


def _contributing(track: UtteranceTrack, word_index: int, feature: FeatureKind) -> list[float]:
    phones = track.word_phones(word_index)
    if feature is FeatureKind.F0:
        return [p.f0 for p in phones if p.voiced]
    if feature is FeatureKind.ENERGY:
        return [p.energy for p in phones]
    raise EngineError("duration has no word mean; use a duration scale edit")


def word_mean(track: UtteranceTrack, word_index: int, feature: FeatureKind) -> float:
    """Mean feature value over the word's contributing phones (voiced only
    for F0)."""
    values = _contributing(track, word_index, feature)
    if not values:
        raise NoContributingPhones(f"word {word_index}: no voiced phones")
    return math.fsum(values) / len(values)


def allowed_target_range(
    track: UtteranceTrack,
    word_index: int,
    feature: FeatureKind,
    stats: CorpusStats,
) -> FeasibleRange:
    """Interval of word-mean targets for which every rescaled phone stays
    inside the clamp bounds.

    With clamp bounds (L, H) and contributing values v_i whose mean is K, a
    target K' rescales phone i to K'*v_i/K, so K' must lie in
    [L*K/min(v), H*K/max(v)]. The lower end is floored to stay positive. A
    word already holding an out-of-range value yields lo > hi (degenerate).
    """
    if feature not in (FeatureKind.F0, FeatureKind.ENERGY):
        raise EngineError("duration is not sigma-clamped; its scale range is [0, 2]")
    values = _contributing(track, word_index, feature)
    if not values:
        raise NoContributingPhones(f"word {word_index}: no voiced phones")
    if any(v <= 0 for v in values):
        raise ZeroValuedPhone(
            f"word {word_index}: zero-valued phone makes {feature.value} scaling undefined"
        )
    lo_clamp, hi_clamp = clamp_bounds(stats, feature)
    k = math.fsum(values) / len(values)
    k_lo = lo_clamp * k / min(values)
    k_hi = hi_clamp * k / max(values)
    k_lo = max(k_lo, TARGET_FLOOR_REL * k)
    return FeasibleRange(k_lo, k_hi)


def _check_scalar_target(
    track: UtteranceTrack,
    word_index: int,
    feature: FeatureKind,
    value: float,
    stats: CorpusStats,
) -> FeasibleRange:
    feasible = allowed_target_range(track, word_index, feature, stats)
    if feasible.degenerate:
        raise DegenerateRange(
            f"word {word_index}: {feature.value} already outside clamp bounds, no legal target",
            feasible,
        )
    if not feasible.contains(value):
        raise RangeViolation(
            f"word {word_index}: {feature.value} target {value!r} outside "
            f"[{feasible.lo!r}, {feasible.hi!r}]",
            feasible,
        )
    return feasible


def _rescaled_phones(
    current: UtteranceTrack,
    anchor: UtteranceTrack,
    word_index: int,
    feature: FeatureKind,
    target: float,
) -> tuple[Phone, ...]:
    """Phones of `current` with the word's contributing values replaced by
    target * v/K computed from `anchor`'s values."""
    anchor_values = _contributing(anchor, word_index, feature)
    k = math.fsum(anchor_values) / len(anchor_values)
    phones = list(current.phones)
    for i in current.words[word_index].phone_indices:
        src = anchor.phones[i]
        if feature is FeatureKind.F0:
            if not src.voiced:
                continue  # voiceless phones are never modified by F0 edits
            phones[i] = replace(phones[i], f0=target * src.f0 / k)
        else:
            phones[i] = replace(phones[i], energy=target * src.energy / k)
    return tuple(phones)


def apply_word_scalar_edit(
    track: UtteranceTrack, edit: WordEdit, stats: CorpusStats
) -> UtteranceTrack:
    """Retarget one word's F0 or energy mean. Phones outside the word (and
    voiceless phones, for F0) are returned bit-identical; a target equal to
    the current mean returns the input unchanged."""
    if edit.feature not in (FeatureKind.F0, FeatureKind.ENERGY):
        raise EngineError("use apply_word_duration_edit for duration")
    _check_scalar_target(track, edit.word_index, edit.feature, edit.value, stats)
    if edit.value == word_mean(track, edit.word_index, edit.feature):
        return track
    return track.with_phones(
        _rescaled_phones(track, track, edit.word_index, edit.feature, edit.value)
    )


def apply_word_duration_edit(
    track: UtteranceTrack,
    edit: WordEdit,
    *,
    baseline: UtteranceTrack | None = None,
) -> UtteranceTrack:
    """Scale one word's phone durations by edit.value in [0, 2], relative to
    `baseline` durations (the track itself when no baseline is given)."""
    if edit.feature is not FeatureKind.DURATION:
        raise EngineError("apply_word_duration_edit requires a duration edit")
    if not DURATION_SCALE_MIN <= edit.value <= DURATION_SCALE_MAX:
        raise RangeViolation(
            f"word {edit.word_index}: duration scale {edit.value!r} outside [0, 2]",
            FeasibleRange(DURATION_SCALE_MIN, DURATION_SCALE_MAX),
        )
    src = baseline if baseline is not None else track
    phones = list(track.phones)
    for i in track.words[edit.word_index].phone_indices:
        phones[i] = replace(phones[i], duration=edit.value * src.phones[i].duration)
    return track.with_phones(tuple(phones))


def _eligible_words(track: UtteranceTrack, feature: FeatureKind) -> list[int]:
    return [
        w for w in range(len(track.words)) if _contributing(track, w, feature)
    ]


def allowed_utterance_range(
    track: UtteranceTrack, feature: FeatureKind, stats: CorpusStats
) -> FeasibleRange:
    """Feasible utterance-level control range.

    For F0/energy this is the intersection over eligible words of the
    word-level target ranges expressed as shifts from each word's current
    mean; it contains 0 whenever every word is individually in range. For
    duration it is always [0, 2].
    """
    if feature is FeatureKind.DURATION:
        return FeasibleRange(DURATION_SCALE_MIN, DURATION_SCALE_MAX)
    eligible = _eligible_words(track, feature)
    if not eligible:
        raise NoContributingPhones("no word has voiced phones")
    lo = -math.inf
    hi = math.inf
    for w in eligible:
        r = allowed_target_range(track, w, feature, stats)
        k = word_mean(track, w, feature)
        lo = max(lo, r.lo - k)
        hi = min(hi, r.hi - k)
    return FeasibleRange(lo, hi)


def decompose_utterance_edit(
    track: UtteranceTrack, edit: UtteranceEdit, stats: CorpusStats
) -> list[WordEdit]:
    """Expand an utterance-level control input into word-level edits.

    F0/energy shifts become one target-mean edit per eligible word
    (K' = K + shift, nudged into the word's feasible interval so boundary
    rounding can never make a decomposed edit rejectable). A duration scale
    becomes one identical scale edit per word.
    """
    if edit.feature is FeatureKind.DURATION:
        if not DURATION_SCALE_MIN <= edit.value <= DURATION_SCALE_MAX:
            raise RangeViolation(
                f"utterance duration scale {edit.value!r} outside [0, 2]",
                FeasibleRange(DURATION_SCALE_MIN, DURATION_SCALE_MAX),
            )
        return [
            WordEdit(w, FeatureKind.DURATION, edit.value)
            for w in range(len(track.words))
        ]
    feasible = allowed_utterance_range(track, edit.feature, stats)
    if feasible.degenerate:
        raise DegenerateRange(
            f"utterance {edit.feature.value} range is empty", feasible
        )
    if not feasible.contains(edit.value):
        raise RangeViolation(
            f"utterance {edit.feature.value} shift {edit.value!r} outside "
            f"[{feasible.lo!r}, {feasible.hi!r}]",
            feasible,
        )
    edits = []
    for w in _eligible_words(track, edit.feature):
        r = allowed_target_range(track, w, edit.feature, stats)
        target = word_mean(track, w, edit.feature) + edit.value
        target = min(max(target, r.lo), r.hi)
        edits.append(WordEdit(w, edit.feature, target))
    return edits


def _apply_one(
    current: UtteranceTrack,
    edit: WordEdit,
    stats: CorpusStats,
    baseline: UtteranceTrack,
) -> UtteranceTrack:
    if not 0 <= edit.word_index < len(current.words):
        raise EngineError(f"word index {edit.word_index} out of range")
    if edit.feature is FeatureKind.DURATION:
        return apply_word_duration_edit(current, edit, baseline=baseline)
    _check_scalar_target(current, edit.word_index, edit.feature, edit.value, stats)
    if edit.value == word_mean(current, edit.word_index, edit.feature):
        return current
    return current.with_phones(
        _rescaled_phones(current, baseline, edit.word_index, edit.feature, edit.value)
    )


def apply_edits(
    track: UtteranceTrack, edits: Sequence[Edit], stats: CorpusStats
) -> UtteranceTrack:
    """Fold an ordered edit list over a baseline track.

    Utterance edits expand via decompose_utterance_edit against the current
    state. Each edit is validated at its application point; the first invalid
    edit aborts with its list index attached. Scalar targets and duration
    scales are both anchored to the baseline track, which makes consecutive
    edits on the same (word, feature) collapse to the last one exactly.
    """
    current = track
    for idx, edit in enumerate(edits):
        try:
            if isinstance(edit, UtteranceEdit):
                for word_edit in decompose_utterance_edit(current, edit, stats):
                    current = _apply_one(current, word_edit, stats, track)
            elif isinstance(edit, WordEdit):
                current = _apply_one(current, edit, stats, track)
            else:
                raise EngineError(f"not an edit: {edit!r}")
        except EngineError as err:
            err.index = idx
            raise
    return current


# ---------------------------------------------------------------------------
# Edit-script files (.edits.json)


class EditScriptError(ValueError):
    pass


def edit_to_obj(edit: Edit) -> dict:
    if isinstance(edit, WordEdit):
        return {
            "scope": "word",
            "word_index": edit.word_index,
            "feature": edit.feature.value,
            "value": float(edit.value),
        }
    return {
        "scope": "utterance",
        "feature": edit.feature.value,
        "value": float(edit.value),
    }


def edit_from_obj(obj, path: str = "edit") -> Edit:
    if not isinstance(obj, dict):
        raise EditScriptError(f"{path}: expected object")
    scope = obj.get("scope")
    if scope not in ("word", "utterance"):
        raise EditScriptError(f"{path}.scope: expected 'word' or 'utterance'")
    try:
        feature = FeatureKind(obj.get("feature"))
    except ValueError:
        raise EditScriptError(
            f"{path}.feature: expected one of {[f.value for f in FeatureKind]}"
        ) from None
    value = obj.get("value")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise EditScriptError(f"{path}.value: expected number")
    value = float(value)
    if not math.isfinite(value):
        raise EditScriptError(f"{path}.value: non-finite number")
    if scope == "word":
        word_index = obj.get("word_index")
        if isinstance(word_index, bool) or not isinstance(word_index, int) or word_index < 0:
            raise EditScriptError(f"{path}.word_index: expected non-negative integer")
        return WordEdit(word_index=word_index, feature=feature, value=value)
    if "word_index" in obj:
        raise EditScriptError(f"{path}.word_index: not allowed for utterance scope")
    return UtteranceEdit(feature=feature, value=value)


def parse_edit_script(document: str | bytes) -> list[Edit]:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as e:
        raise EditScriptError(f"invalid JSON: {e}") from None
    if not isinstance(obj, list):
        raise EditScriptError("edit script: expected array")
    return [edit_from_obj(o, f"edit[{i}]") for i, o in enumerate(obj)]


def serialize_edit_script(edits: Iterable[Edit]) -> str:
    return canonical_json([edit_to_obj(e) for e in edits])


def load_edit_script(path: str | Path) -> list[Edit]:
    return parse_edit_script(Path(path).read_text(encoding="utf-8"))


def save_edit_script(path: str | Path, edits: Iterable[Edit]) -> None:
    Path(path).write_text(serialize_edit_script(edits), encoding="utf-8", newline="\n")
