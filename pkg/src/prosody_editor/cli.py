"""Command-line surface: stats, apply, synth, serve, analyze.

Exit codes: 0 success, 2 input error, 3 range violation, 4 synthesis error.
Every flag can also be set through a PROSODY_-prefixed environment variable.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import analysis, engine, session as session_mod, stats as stats_mod, synth
from .stats import StatsError, compute_stats, load_stats, save_stats
from .track import TrackFormatError, canonical_json, load_track, save_track

EXIT_INPUT = 2
EXIT_RANGE = 3
EXIT_SYNTH = 4

INPUT_ERRORS = (
    TrackFormatError,
    StatsError,
    engine.EditScriptError,
    analysis.AnalysisError,
    session_mod.SessionError,
    OSError,
)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _handle(err: Exception):
    if isinstance(err, (engine.RangeViolation, engine.DegenerateRange)):
        where = f"edit {err.index}: " if err.index is not None else ""
        _fail(
            EXIT_RANGE,
            f"{where}{err} (feasible: [{err.feasible.lo!r}, {err.feasible.hi!r}])",
        )
    if isinstance(err, engine.EngineError):
        where = f"edit {err.index}: " if err.index is not None else ""
        _fail(EXIT_INPUT, f"{where}{err}")
    if isinstance(err, synth.SynthesisError):
        _fail(EXIT_SYNTH, str(err))
    if isinstance(err, INPUT_ERRORS):
        _fail(EXIT_INPUT, str(err))
    raise err


@click.group()
def main():
    """Prosody editing toolkit: corpus stats, batch edits, audio rendering,
    the edit-session service and evaluation analytics."""


@main.command("stats")
@click.argument("track_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, envvar="PROSODY_OUT", type=click.Path())
@click.option("--min-dur", default=stats_mod.DEFAULT_MIN_DURATION, show_default=True,
              envvar="PROSODY_MIN_DUR", help="Exclude tracks shorter than this (seconds).")
@click.option("--max-dur", default=stats_mod.DEFAULT_MAX_DURATION, show_default=True,
              envvar="PROSODY_MAX_DUR", help="Exclude tracks longer than this (seconds).")
@click.option("--f0-sigma-mult", default=stats_mod.DEFAULT_F0_SIGMA_MULT, show_default=True,
              envvar="PROSODY_F0_SIGMA_MULT")
@click.option("--energy-sigma-mult", default=stats_mod.DEFAULT_ENERGY_SIGMA_MULT,
              show_default=True, envvar="PROSODY_ENERGY_SIGMA_MULT")
@click.option("--f0-floor", default=stats_mod.DEFAULT_F0_FLOOR, show_default=True,
              envvar="PROSODY_F0_FLOOR")
def cmd_stats(track_dir, out, min_dur, max_dur, f0_sigma_mult, energy_sigma_mult, f0_floor):
    """Compute corpus statistics over a directory of .track.json files."""
    try:
        paths = sorted(Path(track_dir).glob("*.track.json"))
        if not paths:
            raise StatsError("no surviving tracks")
        tracks = [load_track(p) for p in paths]
        result = compute_stats(
            tracks,
            min_dur=min_dur,
            max_dur=max_dur,
            f0_sigma_mult=f0_sigma_mult,
            energy_sigma_mult=energy_sigma_mult,
            f0_floor=f0_floor,
        )
        save_stats(out, result)
    except Exception as e:
        _handle(e)
    click.echo(f"wrote {out}")


@main.command("apply")
@click.argument("track_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("edits_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--stats", "stats_path", required=True, envvar="PROSODY_STATS",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, envvar="PROSODY_OUT", type=click.Path())
def cmd_apply(track_path, edits_path, stats_path, out):
    """Apply an edit script to a track, writing the edited track."""
    try:
        track = load_track(track_path)
        edits = engine.load_edit_script(edits_path)
        stats = load_stats(stats_path)
        edited = engine.apply_edits(track, edits, stats)
        save_track(out, edited)
    except Exception as e:
        _handle(e)
    click.echo(f"wrote {out}")


@main.command("synth")
@click.argument("track_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, envvar="PROSODY_OUT", type=click.Path())
@click.option("--backend", default="mock", show_default=True, envvar="PROSODY_BACKEND",
              help="'mock' or 'remote:<base-url>'.")
@click.option("--sample-rate", default=synth.DEFAULT_SAMPLE_RATE, show_default=True,
              envvar="PROSODY_SAMPLE_RATE")
def cmd_synth(track_path, out, backend, sample_rate):
    """Render a track to a PCM-16 mono WAV file."""
    try:
        track = load_track(track_path)
        buffer = synth.synthesize(track, backend, sample_rate)
        synth.save_wav(out, buffer)
    except Exception as e:
        _handle(e)
    click.echo(f"wrote {out}")


@main.command("serve")
@click.option("--stats", "stats_path", required=True, envvar="PROSODY_STATS",
              type=click.Path())
@click.option("--journal-dir", required=True, envvar="PROSODY_JOURNAL_DIR",
              type=click.Path())
@click.option("--backend", default="mock", show_default=True, envvar="PROSODY_BACKEND")
@click.option("--listen", default="127.0.0.1:8765", show_default=True,
              envvar="PROSODY_LISTEN", help="host:port to bind.")
@click.option("--sample-rate", default=synth.DEFAULT_SAMPLE_RATE, show_default=True,
              envvar="PROSODY_SAMPLE_RATE")
def cmd_serve(stats_path, journal_dir, backend, listen, sample_rate):
    """Run the edit-session HTTP service (replays the journal on start)."""
    import uvicorn

    from .service import create_app
    from .session import SessionStore

    host, _, port_text = listen.rpartition(":")
    if not port_text.isdigit():
        _fail(EXIT_INPUT, f"bad --listen address {listen!r}, expected host:port")
    port = int(port_text)
    try:
        stats = load_stats(stats_path)
        if not synth.is_valid_backend(backend):
            raise StatsError(f"unknown backend {backend!r}")
        store = SessionStore(
            stats, journal_dir, backend=backend, sample_rate=sample_rate
        )
    except Exception as e:
        _handle(e)
    app = create_app(store)
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
    except OSError as e:
        _fail(EXIT_INPUT, f"cannot bind {listen}: {e}")
    finally:
        store.close()


@main.command("analyze")
@click.option("--export", "export_path", envvar="PROSODY_EXPORT",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--ratings", "ratings_path", envvar="PROSODY_RATINGS",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", "embeddings_path", envvar="PROSODY_EMBEDDINGS",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, envvar="PROSODY_OUT", type=click.Path())
@click.option("--modified-only", is_flag=True, envvar="PROSODY_MODIFIED_ONLY",
              help="Drop unmodified export records before analysis.")
@click.option("--confidence", type=click.Choice(["low", "high"]),
              envvar="PROSODY_CONFIDENCE", help="Keep only this confidence stratum.")
@click.option("--effort-condition", default="edited", show_default=True,
              type=click.Choice(["original", "edited"]),
              help="Rating condition joined in the effort regression.")
def cmd_analyze(export_path, ratings_path, embeddings_path, out, modified_only,
                confidence, effort_condition):
    """Produce the analysis bundle from whichever inputs are given."""
    if not (export_path or ratings_path or embeddings_path):
        _fail(EXIT_INPUT, "nothing to analyze: pass --export, --ratings or --embeddings")
    bundle: dict = {}
    try:
        records = ratings = None
        if export_path:
            records = session_mod.load_export(export_path)
            if modified_only:
                records = [r for r in records if r.modified]
            if confidence:
                records = [r for r in records if r.confidence == confidence]
            bundle["export_summary"] = session_mod.summarize_records(records)
            bundle["edit_distribution"] = _guarded(analysis.edit_distribution, records)
        if ratings_path:
            ratings = analysis.load_ratings(ratings_path)
            bundle["table"] = _guarded(analysis.aggregate_table, ratings)
        if embeddings_path:
            pairs = analysis.load_embeddings(embeddings_path)
            bundle["distance_vs_mushra"] = _guarded(analysis.distance_vs_score, pairs)
        if records is not None and ratings is not None:
            bundle["effort_vs_quality"] = _guarded(
                lambda: {
                    kind: fit.to_obj()
                    for kind, fit in analysis.effort_vs_quality(
                        records, ratings, condition=effort_condition
                    ).items()
                }
            )
        Path(out).write_text(canonical_json(bundle), encoding="utf-8", newline="\n")
    except Exception as e:
        _handle(e)
    click.echo(f"wrote {out}")


def _guarded(fn, *args):
    """Run one analysis; join/shape failures are reported in place so the
    other analyses are still produced."""
    try:
        return fn(*args)
    except analysis.AnalysisError as e:
        return {"error": str(e)}


if __name__ == "__main__":
    main()
