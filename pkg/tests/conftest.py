"""Shared fixtures and generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from prosody_editor.stats import CorpusStats, FeatureStats
from prosody_editor.track import F0Domain, Phone, UtteranceTrack, Word


def make_track(phone_specs, word_sizes=None, track_id="t0", text=None, domain=F0Domain.HZ):
    """Build a track from (voiced, f0, energy, duration) tuples.

    word_sizes partitions the phones in order; default is one word holding
    every phone.
    """
    phones = tuple(
        Phone(symbol=f"P{i}", voiced=v, f0=float(f0), energy=float(en), duration=float(du))
        for i, (v, f0, en, du) in enumerate(phone_specs)
    )
    if word_sizes is None:
        word_sizes = [len(phones)]
    words = []
    start = 0
    for w, size in enumerate(word_sizes):
        words.append(Word(text=f"w{w}", phone_indices=tuple(range(start, start + size))))
        start += size
    assert start == len(phones), "word_sizes must cover all phones"
    return UtteranceTrack(
        id=track_id,
        text=text if text is not None else " ".join(w.text for w in words),
        phones=phones,
        words=tuple(words),
        f0_domain=domain,
    )


@pytest.fixture
def simple_track():
    """One word, voiced f0 {100, 200, 300}; the spec's worked fixture."""
    return make_track(
        [(True, 100.0, 1.0, 0.1), (True, 200.0, 1.2, 0.2), (True, 300.0, 0.8, 0.1)]
    )


@pytest.fixture
def mixed_track():
    """Three words incl. a voiceless phone and an all-voiceless word."""
    return make_track(
        [
            (True, 150.0, 1.0, 0.12),
            (False, 0.0, 1.25, 0.08),
            (True, 250.0, 1.5, 0.1),
            (False, 0.0, 1.6, 0.07),
            (False, 0.0, 1.2, 0.05),
            (True, 180.0, 1.1, 0.2),
            (True, 220.0, 0.9, 0.15),
        ],
        word_sizes=[3, 2, 2],
        track_id="mixed",
    )


# Clamp bounds that dominate the value bands used by the random generators:
# f0 in [80, 300] within [70, 310]; energy in [1, 2] within [0.775, 2.225].
WIDE_STATS = CorpusStats(
    f0=FeatureStats(mean=190.0, std=40.0, count=1000),
    energy=FeatureStats(mean=1.5, std=float(29 / 60), count=1000),
    f0_sigma_mult=3.0,
    energy_sigma_mult=1.5,
    f0_floor=1e-3,
)


@pytest.fixture
def wide_stats():
    return WIDE_STATS


def stats_with(f0_mean, f0_std, e_mean=1.5, e_std=0.5, f0_mult=3.0, e_mult=1.5, floor=1e-3):
    return CorpusStats(
        f0=FeatureStats(f0_mean, f0_std, 100),
        energy=FeatureStats(e_mean, e_std, 100),
        f0_sigma_mult=f0_mult,
        energy_sigma_mult=e_mult,
        f0_floor=floor,
    )


# f0 clamp bounds (50, 400): wide enough for the {100, 200, 300} -> 220 example
FIXTURE_STATS = stats_with(225.0, float(175 / 3))


def random_track(rng: np.random.Generator, track_id="fuzz", max_words=5, allow_voiceless=True):
    """Random valid track: f0 in [80, 300], energy in [1, 2]; every track has
    at least one voiced phone, individual words may be all-voiceless."""
    n_words = int(rng.integers(1, max_words + 1))
    specs = []
    sizes = []
    for _ in range(n_words):
        size = int(rng.integers(1, 5))
        sizes.append(size)
        for _ in range(size):
            voiced = bool(rng.random() < 0.75) if allow_voiceless else True
            f0 = float(rng.uniform(80.0, 300.0)) if voiced else 0.0
            specs.append((voiced, f0, float(rng.uniform(1.0, 2.0)), float(rng.uniform(0.03, 0.4))))
    if not any(v for v, *_ in specs):
        voiced_spec = (True, float(rng.uniform(80.0, 300.0)),
                       float(rng.uniform(1.0, 2.0)), float(rng.uniform(0.03, 0.4)))
        specs[0] = voiced_spec
    return make_track(specs, word_sizes=sizes, track_id=track_id)
