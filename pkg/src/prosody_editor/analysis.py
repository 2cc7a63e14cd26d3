"""Evaluation analytics over rating records, embeddings and export corpora.

Covers the study-style computations: MOS / MUSHRA-like / A-B aggregation
broken down by editor confidence, relative edit-size histograms, cosine
distance between reference and sample embeddings, and OLS regressions with a
95% confidence band for the conditional mean.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats as sps

from .session import ExportRecord
from .track import FeatureKind

RATING_KINDS = ("mos_1_5", "mushra_0_100", "ab_choice")
CONDITIONS = ("original", "edited", "anchor")
STRATA = ("low", "high", "total")

HISTOGRAM_BIN_WIDTH = 0.05
HISTOGRAM_BINS = 40  # 0.05-wide bins covering ratios in [0, 2]


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class RatingRecord:
    item_id: str
    kind: str
    condition: str
    confidence: str
    value: float | str


@dataclass(frozen=True)
class EmbeddingPair:
    item_id: str
    reference: tuple[float, ...]
    sample: tuple[float, ...]
    mushra_score: float


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r: float
    n: int
    x_mean: float
    sxx: float
    resid_std: float
    t_crit: float

    def predict(self, x: float) -> float:
        return self.intercept + self.slope * x

    def band(self, x: float) -> tuple[float, float]:
        """95% confidence interval for the conditional mean at x."""
        half = self.t_crit * self.resid_std * math.sqrt(
            1.0 / self.n + (x - self.x_mean) ** 2 / self.sxx
        )
        center = self.predict(x)
        return center - half, center + half

    def to_obj(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r": self.r,
            "n": self.n,
            "x_mean": self.x_mean,
            "sxx": self.sxx,
            "resid_std": self.resid_std,
            "t_crit": self.t_crit,
            "band": "prediction +/- t_crit*resid_std*sqrt(1/n + (x-x_mean)^2/sxx)",
        }


# ---------------------------------------------------------------------------
# Input files


def _validate_rating(rec: RatingRecord, path: str) -> None:
    if rec.kind not in RATING_KINDS:
        raise AnalysisError(f"{path}: kind must be one of {RATING_KINDS}")
    if rec.condition not in CONDITIONS:
        raise AnalysisError(f"{path}: condition must be one of {CONDITIONS}")
    if rec.confidence not in ("low", "high"):
        raise AnalysisError(f"{path}: confidence must be 'low' or 'high'")
    if rec.kind == "ab_choice":
        if rec.value not in ("original", "edited"):
            raise AnalysisError(f"{path}: ab_choice value must be 'original' or 'edited'")
        return
    if isinstance(rec.value, bool) or not isinstance(rec.value, (int, float)):
        raise AnalysisError(f"{path}: value must be numeric")
    if rec.kind == "mos_1_5" and rec.value not in (1, 2, 3, 4, 5):
        raise AnalysisError(f"{path}: MOS value must be an integer in 1..5")
    if rec.kind == "mushra_0_100" and not 0 <= rec.value <= 100:
        raise AnalysisError(f"{path}: MUSHRA value must lie in [0, 100]")


def parse_ratings(document: str | bytes) -> list[RatingRecord]:
    """Line-delimited rating records; errors carry the 1-based line number."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    records = []
    for lineno, line in enumerate(document.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise AnalysisError(f"ratings line {lineno}: invalid JSON: {e}") from None
        if not isinstance(obj, dict):
            raise AnalysisError(f"ratings line {lineno}: expected object")
        try:
            value = obj["value"]
            rec = RatingRecord(
                item_id=str(obj["item_id"]),
                kind=obj["kind"],
                condition=obj["condition"],
                confidence=obj["confidence"],
                value=value if isinstance(value, str) else float(value),
            )
        except KeyError as e:
            raise AnalysisError(f"ratings line {lineno}: missing field {e}") from None
        _validate_rating(rec, f"ratings line {lineno}")
        records.append(rec)
    return records


def parse_embeddings(document: str | bytes) -> list[EmbeddingPair]:
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    pairs = []
    for lineno, line in enumerate(document.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            pair = EmbeddingPair(
                item_id=str(obj["item_id"]),
                reference=tuple(float(x) for x in obj["reference"]),
                sample=tuple(float(x) for x in obj["sample"]),
                mushra_score=float(obj["mushra"]),
            )
        except (ValueError, KeyError, TypeError) as e:
            raise AnalysisError(f"embeddings line {lineno}: {e}") from None
        if len(pair.reference) == 0 or len(pair.reference) != len(pair.sample):
            raise AnalysisError(
                f"embeddings line {lineno}: vectors must share one nonzero dimension"
            )
        if not all(math.isfinite(x) for x in pair.reference + pair.sample):
            raise AnalysisError(f"embeddings line {lineno}: non-finite entry")
        if not 0 <= pair.mushra_score <= 100:
            raise AnalysisError(f"embeddings line {lineno}: mushra must lie in [0, 100]")
        pairs.append(pair)
    return pairs


def load_ratings(path: str | Path) -> list[RatingRecord]:
    return parse_ratings(Path(path).read_text(encoding="utf-8"))


def load_embeddings(path: str | Path) -> list[EmbeddingPair]:
    return parse_embeddings(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Aggregations


def _mean_std(values: Sequence[float]) -> dict | None:
    if not values:
        return None
    n = len(values)
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    return {"mean": mean, "std": std, "n": n, "single_sample": n == 1}


def ab_preference(choices: Sequence[str]) -> tuple[float, float]:
    """Percentage of votes for (original, edited); sums to 100."""
    if not choices:
        raise AnalysisError("no A/B choices")
    bad = [c for c in choices if c not in ("original", "edited")]
    if bad:
        raise AnalysisError(f"invalid A/B choice(s): {bad[:3]}")
    n = len(choices)
    original = sum(1 for c in choices if c == "original")
    return 100.0 * original / n, 100.0 * (n - original) / n


def aggregate_table(records: Sequence[RatingRecord]) -> dict:
    """Confidence-stratified summary shaped like the subjective-results table:
    strata low/high/total x condition original/edited, each with MOS and
    MUSHRA mean±std and the A/B preference percentage."""
    if not records:
        raise AnalysisError("no rating records")

    def stratum_table(recs: list[RatingRecord]) -> dict | None:
        if not recs:
            return None
        ab = [r.value for r in recs if r.kind == "ab_choice"]
        ab_pct = dict(zip(("original", "edited"), ab_preference(ab))) if ab else {}
        out = {}
        for condition in ("original", "edited"):
            mos = [r.value for r in recs if r.kind == "mos_1_5" and r.condition == condition]
            mushra = [
                r.value for r in recs if r.kind == "mushra_0_100" and r.condition == condition
            ]
            out[condition] = {
                "mos": _mean_std(mos),
                "mushra": _mean_std(mushra),
                "ab_pct": ab_pct.get(condition),
            }
        return out

    table = {}
    for stratum in ("low", "high"):
        rows = stratum_table([r for r in records if r.confidence == stratum])
        if rows is not None:
            table[stratum] = rows
    table["total"] = stratum_table(list(records))
    return {
        "table": table,
        "metadata": {
            "std": "sample std (n-1); single-rating cells report std 0 with single_sample",
            "mushra": "raw 0-100 scores, not normalized per rater",
            "anchor": "anchor-condition ratings are excluded from the table",
        },
    }


def cosine_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """1 - cosine similarity; 0 for identical directions, up to 2 for opposite."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.ndim != 1 or vb.ndim != 1 or va.size == 0:
        raise AnalysisError("embeddings must be nonempty vectors")
    if va.shape != vb.shape:
        raise AnalysisError(f"dimension mismatch: {va.size} vs {vb.size}")
    norm = float(np.linalg.norm(va)) * float(np.linalg.norm(vb))
    if norm == 0.0:
        raise AnalysisError("zero vector has no cosine distance")
    return 1.0 - float(np.dot(va, vb)) / norm


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> RegressionFit:
    """Ordinary least squares with the standard t-based 95% band for the
    conditional mean. Requires n >= 3 and non-constant xs."""
    if len(xs) != len(ys):
        raise AnalysisError("xs and ys must have equal length")
    n = len(xs)
    if n < 3:
        raise AnalysisError(f"need at least 3 points, got {n}")
    x_mean = math.fsum(xs) / n
    y_mean = math.fsum(ys) / n
    sxx = math.fsum((x - x_mean) ** 2 for x in xs)
    if sxx == 0.0:
        raise AnalysisError("degenerate xs: all values equal")
    sxy = math.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    syy = math.fsum((y - y_mean) ** 2 for y in ys)
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    r = 0.0 if syy == 0.0 else max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    sse = math.fsum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    resid_std = math.sqrt(max(sse, 0.0) / (n - 2))
    t_crit = float(sps.t.ppf(0.975, n - 2))
    return RegressionFit(
        slope=slope,
        intercept=intercept,
        r=r,
        n=n,
        x_mean=x_mean,
        sxx=sxx,
        resid_std=resid_std,
        t_crit=t_crit,
    )


def fit_with_band(xs: Sequence[float], ys: Sequence[float]) -> dict:
    """Fit plus per-x band samples, ready for external plotting."""
    fit = linear_fit(xs, ys)
    grid = sorted(set(xs))
    band = []
    for x in grid:
        lo, hi = fit.band(x)
        band.append({"x": x, "fit": fit.predict(x), "lo": lo, "hi": hi})
    obj = fit.to_obj()
    obj["points"] = [{"x": x, "y": y} for x, y in zip(xs, ys)]
    obj["band_samples"] = band
    return obj


# ---------------------------------------------------------------------------
# Export-derived analyses


def _ratio_histogram(ratios: list[float]) -> dict:
    edges = np.arange(HISTOGRAM_BINS + 1) / 20.0  # exact 0.05 grid over [0, 2]
    clipped = np.clip(np.asarray(ratios, dtype=np.float64), 0.0, 2.0)
    counts, _ = np.histogram(clipped, bins=edges)
    return {"counts": [int(c) for c in counts], "total": len(ratios)}


def edit_distribution(records: Sequence[ExportRecord]) -> dict:
    """Histograms of relative phone-level changes (edited/baseline) per
    feature. Unchanged values are omitted; voiceless phones contribute no F0
    entries; baseline-zero values are skipped; ratios beyond [0, 2] land in
    the edge bins."""
    if not records:
        raise AnalysisError("empty export")
    ratios: dict[str, list[float]] = {f.value: [] for f in FeatureKind}
    for record in records:
        if len(record.baseline.phones) != len(record.edited.phones):
            raise AnalysisError(
                f"record {record.session_id}: baseline/edited phone counts differ"
            )
        for base, edit in zip(record.baseline.phones, record.edited.phones):
            for feature, bval, eval_ in (
                ("f0", base.f0, edit.f0),
                ("energy", base.energy, edit.energy),
                ("duration", base.duration, edit.duration),
            ):
                if feature == "f0" and not base.voiced:
                    continue
                if bval == 0.0:
                    continue
                if eval_ == bval:
                    continue
                ratios[feature].append(eval_ / bval)
    return {
        "bin_edges": [k / 20.0 for k in range(HISTOGRAM_BINS + 1)],
        "features": {name: _ratio_histogram(values) for name, values in ratios.items()},
        "metadata": {
            "ratio": "edited/baseline per phone-level value; unchanged values omitted; "
            "bin width 0.05 over [0, 2], outliers clamped into edge bins",
        },
    }


def _numeric_rating(rec: RatingRecord) -> float:
    if rec.kind == "ab_choice":
        return 1.0 if rec.value == "edited" else 0.0
    return float(rec.value)


def effort_vs_quality(
    records: Sequence[ExportRecord],
    ratings: Sequence[RatingRecord],
    condition: str = "edited",
) -> dict[str, RegressionFit]:
    """Per rating kind, regress the per-item mean rating on editing time.

    Items join on export session_id == rating item_id. MOS/MUSHRA ratings are
    filtered to `condition`; A/B choices are encoded as edited-preference
    share (edited=1, original=0).
    """
    elapsed = {r.session_id: r.elapsed_seconds for r in records}
    fits: dict[str, RegressionFit] = {}
    kinds = [k for k in RATING_KINDS if any(r.kind == k for r in ratings)]
    if not kinds:
        raise AnalysisError("no ratings to join")
    for kind in kinds:
        per_item: dict[str, list[float]] = {}
        for rec in ratings:
            if rec.kind != kind or rec.item_id not in elapsed:
                continue
            if kind != "ab_choice" and rec.condition != condition:
                continue
            per_item.setdefault(rec.item_id, []).append(_numeric_rating(rec))
        if not per_item:
            raise AnalysisError(f"{kind}: empty join between export and ratings")
        xs, ys = [], []
        for item_id in sorted(per_item):
            xs.append(elapsed[item_id])
            ys.append(math.fsum(per_item[item_id]) / len(per_item[item_id]))
        try:
            fits[kind] = linear_fit(xs, ys)
        except AnalysisError as e:
            raise AnalysisError(f"{kind}: {e}") from None
    return fits


def distance_vs_score(pairs: Sequence[EmbeddingPair]) -> dict:
    """Cosine distance between reference and sample embeddings against the
    MUSHRA-like score, with an OLS fit and 95% band."""
    if not pairs:
        raise AnalysisError("no embedding pairs")
    xs = [cosine_distance(p.reference, p.sample) for p in pairs]
    ys = [p.mushra_score for p in pairs]
    return fit_with_band(xs, ys)
