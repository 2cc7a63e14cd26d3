"""Corpus-level phone statistics and the clamp bounds that bound every edit.

F0 statistics are computed over voiced phones only; energy over all phones.
Clamp ranges follow the mean ± multiplier·std convention (3σ for F0, 1.5σ for
energy by default), with a positive floor on the F0 lower bound so edit math
never sees non-positive targets.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .track import (
    F0Domain,
    FeatureKind,
    UtteranceTrack,
    canonical_json,
    _as_float,
    _as_str,
)

DEFAULT_MIN_DURATION = 0.3
DEFAULT_MAX_DURATION = 15.0
DEFAULT_F0_SIGMA_MULT = 3.0
DEFAULT_ENERGY_SIGMA_MULT = 1.5
DEFAULT_F0_FLOOR = 1e-3


class StatsError(ValueError):
    """Unusable corpus or malformed stats document."""


@dataclass(frozen=True)
class FeatureStats:
    mean: float
    std: float
    count: int


@dataclass(frozen=True)
class CorpusStats:
    f0: FeatureStats
    energy: FeatureStats
    f0_sigma_mult: float = DEFAULT_F0_SIGMA_MULT
    energy_sigma_mult: float = DEFAULT_ENERGY_SIGMA_MULT
    f0_floor: float = DEFAULT_F0_FLOOR
    f0_domain: F0Domain = F0Domain.HZ


def _feature_stats(values: Sequence[float], feature: str) -> FeatureStats:
    if len(values) < 2:
        raise StatsError(
            f"degenerate corpus: fewer than 2 contributing phones for {feature}"
        )
    mean = statistics.fmean(values)
    std = statistics.stdev(values)
    if std <= 0:
        raise StatsError(f"degenerate corpus: {feature} standard deviation is 0")
    return FeatureStats(mean=mean, std=std, count=len(values))


def compute_stats(
    tracks: Iterable[UtteranceTrack],
    min_dur: float = DEFAULT_MIN_DURATION,
    max_dur: float = DEFAULT_MAX_DURATION,
    *,
    f0_sigma_mult: float = DEFAULT_F0_SIGMA_MULT,
    energy_sigma_mult: float = DEFAULT_ENERGY_SIGMA_MULT,
    f0_floor: float = DEFAULT_F0_FLOOR,
) -> CorpusStats:
    """Sample mean/std (n-1 denominator) of phone-level F0 and energy.

    Tracks whose total duration falls outside [min_dur, max_dur] are excluded
    before any phone is counted.
    """
    tracks = list(tracks)
    if not tracks:
        raise StatsError("no surviving tracks")
    domains = {t.f0_domain for t in tracks}
    if len(domains) > 1:
        raise StatsError(
            f"mixed f0_domain: {sorted(d.value for d in domains)}"
        )
    survivors = [t for t in tracks if min_dur <= t.total_duration() <= max_dur]
    if not survivors:
        raise StatsError("no surviving tracks")

    f0_values = [p.f0 for t in survivors for p in t.phones if p.voiced]
    energy_values = [p.energy for t in survivors for p in t.phones]
    if not f0_values or not energy_values:
        raise StatsError("zero surviving phones")

    stats = CorpusStats(
        f0=_feature_stats(f0_values, "f0"),
        energy=_feature_stats(energy_values, "energy"),
        f0_sigma_mult=f0_sigma_mult,
        energy_sigma_mult=energy_sigma_mult,
        f0_floor=f0_floor,
        f0_domain=domains.pop(),
    )
    _check_bounds(stats)
    return stats


def _check_bounds(stats: CorpusStats) -> None:
    if stats.f0_floor <= 0:
        raise StatsError("f0_floor must be positive")
    for feature in (FeatureKind.F0, FeatureKind.ENERGY):
        lo, hi = clamp_bounds(stats, feature)
        if not lo < hi:
            raise StatsError(f"clamp bounds collapsed for {feature.value}: [{lo}, {hi}]")


def clamp_bounds(stats: CorpusStats, feature: FeatureKind) -> tuple[float, float]:
    """[mean - mult*std, mean + mult*std]; the F0 lower bound is floored to
    keep it positive. Duration is range-scaled, never sigma-clamped."""
    if feature is FeatureKind.F0:
        lo = stats.f0.mean - stats.f0_sigma_mult * stats.f0.std
        hi = stats.f0.mean + stats.f0_sigma_mult * stats.f0.std
        return max(lo, stats.f0_floor), hi
    if feature is FeatureKind.ENERGY:
        lo = stats.energy.mean - stats.energy_sigma_mult * stats.energy.std
        hi = stats.energy.mean + stats.energy_sigma_mult * stats.energy.std
        return lo, hi
    raise StatsError("duration is range-scaled, not clamped by sigma")


# ---------------------------------------------------------------------------
# Stats file (.stats.json)


def stats_to_obj(stats: CorpusStats) -> dict:
    return {
        "f0_domain": stats.f0_domain.value,
        "f0": {
            "mean": float(stats.f0.mean),
            "std": float(stats.f0.std),
            "count": stats.f0.count,
        },
        "energy": {
            "mean": float(stats.energy.mean),
            "std": float(stats.energy.std),
            "count": stats.energy.count,
        },
        "clamp": {
            "f0_sigma_mult": float(stats.f0_sigma_mult),
            "energy_sigma_mult": float(stats.energy_sigma_mult),
            "f0_floor": float(stats.f0_floor),
        },
    }


def _feature_from_obj(obj, path: str) -> FeatureStats:
    if not isinstance(obj, dict):
        raise StatsError(f"{path}: expected object")
    try:
        mean = _as_float(obj["mean"], f"{path}.mean")
        std = _as_float(obj["std"], f"{path}.std")
        count = obj["count"]
    except KeyError as e:
        raise StatsError(f"{path}: missing field {e}") from None
    if isinstance(count, bool) or not isinstance(count, int) or count < 2:
        raise StatsError(f"{path}.count: expected integer >= 2")
    if std <= 0:
        raise StatsError(f"{path}.std: must be positive")
    return FeatureStats(mean=mean, std=std, count=count)


def stats_from_obj(obj) -> CorpusStats:
    if not isinstance(obj, dict):
        raise StatsError("stats document: expected object")
    try:
        domain = F0Domain(_as_str(obj["f0_domain"], "f0_domain"))
        clamp = obj["clamp"]
        stats = CorpusStats(
            f0=_feature_from_obj(obj["f0"], "f0"),
            energy=_feature_from_obj(obj["energy"], "energy"),
            f0_sigma_mult=_as_float(clamp["f0_sigma_mult"], "clamp.f0_sigma_mult"),
            energy_sigma_mult=_as_float(
                clamp["energy_sigma_mult"], "clamp.energy_sigma_mult"
            ),
            f0_floor=_as_float(clamp["f0_floor"], "clamp.f0_floor"),
            f0_domain=domain,
        )
    except KeyError as e:
        raise StatsError(f"stats document: missing field {e}") from None
    except ValueError as e:
        raise StatsError(str(e)) from None
    _check_bounds(stats)
    return stats


def parse_stats(document: str | bytes) -> CorpusStats:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as e:
        raise StatsError(f"invalid JSON: {e}") from None
    return stats_from_obj(obj)


def serialize_stats(stats: CorpusStats) -> str:
    _check_bounds(stats)
    return canonical_json(stats_to_obj(stats))


def load_stats(path: str | Path) -> CorpusStats:
    return parse_stats(Path(path).read_text(encoding="utf-8"))


def save_stats(path: str | Path, stats: CorpusStats) -> None:
    Path(path).write_text(serialize_stats(stats), encoding="utf-8", newline="\n")
