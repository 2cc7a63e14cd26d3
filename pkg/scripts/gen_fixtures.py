#!/usr/bin/env python3
"""Regenerate the static fixtures under tests/fixtures/.

Everything here is deterministic; the files are committed so the CLI
end-to-end test can compare bytes across runs.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from prosody_editor.engine import (
    UtteranceEdit,
    WordEdit,
    allowed_target_range,
    apply_edits,
    save_edit_script,
)
from prosody_editor.session import ExportRecord, export_to_obj
from prosody_editor.stats import compute_stats
from prosody_editor.track import (
    FeatureKind,
    Phone,
    UtteranceTrack,
    Word,
    canonical_json,
    save_track,
)

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def track(track_id, text, words, phones):
    return UtteranceTrack(
        id=track_id,
        text=text,
        phones=tuple(Phone(*p) for p in phones),
        words=tuple(Word(text=t, phone_indices=tuple(idx)) for t, idx in words),
    )


TRACK_A = track(
    "fx-greeting",
    "hello there",
    [("hello", [0, 1, 2]), ("there", [3, 4])],
    [
        ("HH", False, 0.0, 0.9, 0.06),
        ("EH", True, 180.0, 1.3, 0.12),
        ("LOW", True, 150.0, 1.2, 0.14),
        ("DH", True, 130.0, 1.0, 0.08),
        ("EIR", True, 170.0, 1.4, 0.18),
    ],
)

TRACK_B = track(
    "fx-question",
    "was that it",
    [("was", [0, 1]), ("that", [2, 3, 4]), ("it", [5, 6])],
    [
        ("W", True, 210.0, 1.1, 0.09),
        ("AZ", True, 240.0, 1.5, 0.13),
        ("TH", False, 0.0, 0.8, 0.05),
        ("AE", True, 260.0, 1.6, 0.11),
        ("T", False, 0.0, 0.7, 0.04),
        ("IH", True, 280.0, 1.2, 0.1),
        ("T2", False, 0.0, 0.6, 0.05),
    ],
)

TRACK_C = track(
    "fx-statement",
    "go now",
    [("go", [0, 1]), ("now", [2, 3])],
    [
        ("G", True, 110.0, 1.0, 0.07),
        ("OH", True, 125.0, 1.35, 0.2),
        ("N", True, 140.0, 1.05, 0.09),
        ("AW", True, 160.0, 1.45, 0.22),
    ],
)

# below the default 0.3 s filter; present to exercise exclusion
TRACK_TINY = track(
    "fx-tiny",
    "oh",
    [("oh", [0])],
    [("OH", True, 190.0, 1.1, 0.2)],
)

EDITS = [
    WordEdit(0, FeatureKind.F0, 175.0),
    WordEdit(1, FeatureKind.ENERGY, 1.3),
    UtteranceEdit(FeatureKind.DURATION, 1.25),
]


def main():
    tracks_dir = FIXTURES / "tracks"
    tracks_dir.mkdir(parents=True, exist_ok=True)
    for t in (TRACK_A, TRACK_B, TRACK_C, TRACK_TINY):
        save_track(tracks_dir / f"{t.id}.track.json", t)

    stats = compute_stats([TRACK_A, TRACK_B, TRACK_C])
    for w, feature in ((0, FeatureKind.F0), (1, FeatureKind.ENERGY)):
        r = allowed_target_range(TRACK_A, w, feature, stats)
        target = next(e.value for e in EDITS if e.feature is feature)
        assert r.lo <= target <= r.hi, (feature, target, r)
    save_edit_script(FIXTURES / "sample.edits.json", EDITS)

    # export corpus: three submitted sessions over track A, one unmodified
    edited_1 = apply_edits(TRACK_A, EDITS, stats)
    edited_2 = apply_edits(
        TRACK_A, [WordEdit(1, FeatureKind.DURATION, 0.75)], stats
    )
    records = [
        ExportRecord("item-001", TRACK_A, edited_1, 3, 95.0, "high", True),
        ExportRecord("item-002", TRACK_A, edited_2, 4, 210.5, "low", True),
        ExportRecord("item-003", TRACK_A, TRACK_A, 0, 12.0, "high", False),
    ]
    (FIXTURES / "sample.export.json").write_text(
        canonical_json(export_to_obj(records)), encoding="utf-8", newline="\n"
    )

    ratings = [
        {"item_id": "item-001", "kind": "mos_1_5", "condition": "original", "confidence": "high", "value": 3},
        {"item_id": "item-001", "kind": "mos_1_5", "condition": "edited", "confidence": "high", "value": 4},
        {"item_id": "item-001", "kind": "mushra_0_100", "condition": "original", "confidence": "high", "value": 61.0},
        {"item_id": "item-001", "kind": "mushra_0_100", "condition": "edited", "confidence": "high", "value": 57.5},
        {"item_id": "item-001", "kind": "mushra_0_100", "condition": "anchor", "confidence": "high", "value": 18.0},
        {"item_id": "item-001", "kind": "ab_choice", "condition": "edited", "confidence": "high", "value": "edited"},
        {"item_id": "item-002", "kind": "mos_1_5", "condition": "original", "confidence": "low", "value": 3},
        {"item_id": "item-002", "kind": "mos_1_5", "condition": "edited", "confidence": "low", "value": 2},
        {"item_id": "item-002", "kind": "mushra_0_100", "condition": "original", "confidence": "low", "value": 58.0},
        {"item_id": "item-002", "kind": "mushra_0_100", "condition": "edited", "confidence": "low", "value": 49.0},
        {"item_id": "item-002", "kind": "ab_choice", "condition": "edited", "confidence": "low", "value": "original"},
        {"item_id": "item-003", "kind": "mos_1_5", "condition": "original", "confidence": "high", "value": 4},
        {"item_id": "item-003", "kind": "mos_1_5", "condition": "edited", "confidence": "high", "value": 4},
        {"item_id": "item-003", "kind": "mushra_0_100", "condition": "original", "confidence": "high", "value": 66.0},
        {"item_id": "item-003", "kind": "mushra_0_100", "condition": "edited", "confidence": "high", "value": 64.0},
        {"item_id": "item-003", "kind": "ab_choice", "condition": "edited", "confidence": "high", "value": "edited"},
    ]
    (FIXTURES / "sample.ratings.jsonl").write_text(
        "".join(json.dumps(r) + "\n" for r in ratings), encoding="utf-8", newline="\n"
    )

    embeddings = [
        {"item_id": "item-001", "reference": [0.2, 0.9, -0.1, 0.4], "sample": [0.25, 0.8, 0.0, 0.5], "mushra": 57.5},
        {"item_id": "item-002", "reference": [0.7, -0.2, 0.5, 0.1], "sample": [-0.1, 0.6, -0.4, 0.3], "mushra": 49.0},
        {"item_id": "item-003", "reference": [0.3, 0.3, 0.3, 0.3], "sample": [0.3, 0.32, 0.28, 0.3], "mushra": 64.0},
        {"item_id": "item-004", "reference": [0.9, 0.1, 0.0, -0.3], "sample": [0.2, -0.8, 0.55, 0.1], "mushra": 38.0},
    ]
    (FIXTURES / "sample.embeddings.jsonl").write_text(
        "".join(json.dumps(r) + "\n" for r in embeddings), encoding="utf-8", newline="\n"
    )
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
