"""Human-in-the-loop prosody editing toolkit.

Word- and utterance-level retargeting of phone-level F0, energy and duration,
an edit-session service that logs every control input, a deterministic mock
synthesizer, and the evaluation analytics for original/edited corpora.
"""

from .track import (
    F0Domain,
    FeatureKind,
    Phone,
    TrackFormatError,
    UtteranceTrack,
    Word,
    load_track,
    parse_track,
    save_track,
    serialize_track,
    validate_track,
)
from .stats import CorpusStats, FeatureStats, StatsError, clamp_bounds, compute_stats
from .engine import (
    DegenerateRange,
    EngineError,
    FeasibleRange,
    RangeViolation,
    UtteranceEdit,
    WordEdit,
    allowed_target_range,
    allowed_utterance_range,
    apply_edits,
    apply_word_duration_edit,
    apply_word_scalar_edit,
    decompose_utterance_edit,
    word_mean,
)
from .synth import AudioBuffer, SynthesisError, render_mock, synthesize

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "CorpusStats",
    "DegenerateRange",
    "EngineError",
    "F0Domain",
    "FeasibleRange",
    "FeatureKind",
    "FeatureStats",
    "Phone",
    "RangeViolation",
    "StatsError",
    "SynthesisError",
    "TrackFormatError",
    "UtteranceEdit",
    "UtteranceTrack",
    "Word",
    "WordEdit",
    "allowed_target_range",
    "allowed_utterance_range",
    "apply_edits",
    "apply_word_duration_edit",
    "apply_word_scalar_edit",
    "clamp_bounds",
    "compute_stats",
    "decompose_utterance_edit",
    "load_track",
    "parse_track",
    "render_mock",
    "save_track",
    "serialize_track",
    "synthesize",
    "validate_track",
    "word_mean",
]
