"""Deterministic audible feedback for edited tracks.

The built-in mock renderer turns each voiced phone into a continuous-phase
sine at its F0 and each voiceless phone into fixed-seed noise, amplitude
driven by normalized energy, with a short linear crossfade at phone
boundaries. It stands in for a neural vocoder so the whole edit loop runs
and is testable offline; a remote adapter can be plugged in over HTTP.
"""

from __future__ import annotations

import io
import math
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .track import F0Domain, UtteranceTrack, serialize_track

DEFAULT_SAMPLE_RATE = 22050
CROSSFADE_SECONDS = 0.005
PEAK_AMPLITUDE = 0.9
NOISE_SEED = 22050911  # fixed so voiceless segments are bit-reproducible

MOCK_BACKEND = "mock"
REMOTE_PREFIX = "remote:"


class SynthesisError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    sample_rate: int
    samples: np.ndarray  # mono float64 in [-1, 1]

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def _voiced_hz(track: UtteranceTrack, index: int, sample_rate: int) -> float:
    phone = track.phones[index]
    hz = math.exp(phone.f0) if track.f0_domain is F0Domain.LOG_HZ else phone.f0
    if hz <= 0:
        raise SynthesisError(
            f"phones[{index}]: non-positive hertz value on voiced phone"
        )
    if hz >= sample_rate / 2:
        raise SynthesisError(
            f"phones[{index}]: f0 {hz:g} Hz at or above Nyquist ({sample_rate / 2:g} Hz)"
        )
    return hz


def _phone_noise(index: int, count: int) -> np.ndarray:
    rng = np.random.default_rng([NOISE_SEED, index])
    return rng.uniform(-1.0, 1.0, count)


def render_mock(track: UtteranceTrack, sample_rate: int = DEFAULT_SAMPLE_RATE) -> AudioBuffer:
    """Render a track to mono audio.

    Segment boundaries come from rounding cumulative phone times, so total
    length is round(total_duration * sample_rate). Sines keep a running phase
    so voiced-voiced boundaries are phase-continuous; a 5 ms linear crossfade
    smooths every boundary between non-empty segments.
    """
    n = len(track.phones)
    if n == 0:
        return AudioBuffer(sample_rate, np.zeros(0))

    hz = [0.0] * n
    for i, phone in enumerate(track.phones):
        if phone.voiced:
            hz[i] = _voiced_hz(track, i, sample_rate)

    bounds = [0]
    t = 0.0
    for phone in track.phones:
        t += phone.duration
        bounds.append(int(round(t * sample_rate)))
    total = bounds[-1]

    e_max = max(p.energy for p in track.phones)
    amps = [
        PEAK_AMPLITUDE * p.energy / e_max if e_max > 0 else 0.0
        for p in track.phones
    ]

    fade = int(round(CROSSFADE_SECONDS * sample_rate))
    out = np.zeros(total)
    start_phase = [0.0] * n
    phase = 0.0
    two_pi = 2.0 * math.pi
    for i, phone in enumerate(track.phones):
        seg_start, seg_end = bounds[i], bounds[i + 1]
        length = seg_end - seg_start
        if length <= 0:
            continue
        start_phase[i] = phase
        if phone.voiced:
            k = np.arange(length, dtype=np.float64)
            out[seg_start:seg_end] = amps[i] * np.sin(phase + two_pi * hz[i] * k / sample_rate)
            phase = math.fmod(phase + two_pi * hz[i] * length / sample_rate, two_pi)
        else:
            out[seg_start:seg_end] = amps[i] * _phone_noise(i, length)

    # Crossfades: continue phone i's waveform into phone i+1's segment and
    # ramp between the two. Convex mix of amplitudes <= PEAK keeps |x| <= 1.
    for i in range(n - 1):
        left = bounds[i + 1] - bounds[i]
        right = bounds[i + 2] - bounds[i + 1]
        width = min(fade, left, right)
        if width <= 0:
            continue
        boundary = bounds[i + 1]
        if track.phones[i].voiced:
            k = np.arange(left, left + width, dtype=np.float64)
            ext = amps[i] * np.sin(start_phase[i] + two_pi * hz[i] * k / sample_rate)
        else:
            ext = amps[i] * _phone_noise(i, left + width)[left:]
        ramp = (np.arange(width, dtype=np.float64) + 1.0) / (width + 1.0)
        out[boundary : boundary + width] = (
            (1.0 - ramp) * ext + ramp * out[boundary : boundary + width]
        )

    return AudioBuffer(sample_rate, out)


# ---------------------------------------------------------------------------
# WAV encoding (RIFF, PCM 16-bit mono)


def encode_wav(buffer: AudioBuffer) -> bytes:
    pcm = np.round(np.clip(buffer.samples, -1.0, 1.0) * 32767.0).astype("<i2")
    bio = io.BytesIO()
    with wave.open(bio, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(buffer.sample_rate)
        w.writeframes(pcm.tobytes())
    return bio.getvalue()


def decode_wav(data: bytes) -> AudioBuffer:
    try:
        with wave.open(io.BytesIO(data), "rb") as w:
            channels = w.getnchannels()
            width = w.getsampwidth()
            rate = w.getframerate()
            frames = w.readframes(w.getnframes())
    except (wave.Error, EOFError) as e:
        raise SynthesisError(f"malformed WAV: {e}") from None
    if channels != 1 or width != 2:
        raise SynthesisError(
            f"unsupported encoding: need 16-bit mono PCM, got {8 * width}-bit {channels}-channel"
        )
    samples = np.frombuffer(frames, dtype="<i2").astype(np.float64) / 32767.0
    return AudioBuffer(rate, samples)


def save_wav(path: str | Path, buffer: AudioBuffer) -> None:
    Path(path).write_bytes(encode_wav(buffer))


def load_wav(path: str | Path) -> AudioBuffer:
    return decode_wav(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# Backend dispatch


def is_valid_backend(backend: str) -> bool:
    return backend == MOCK_BACKEND or backend.startswith(REMOTE_PREFIX)


def synthesize(
    track: UtteranceTrack,
    backend: str = MOCK_BACKEND,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    timeout: float = 30.0,
) -> AudioBuffer:
    """Render via the named backend: "mock" or "remote:<base-url>".

    Remote adapters receive the canonical track document on POST
    <base-url>/synthesize and must answer with 16-bit mono PCM WAV at the
    requested sample rate.
    """
    if backend == MOCK_BACKEND:
        return render_mock(track, sample_rate)
    if backend.startswith(REMOTE_PREFIX):
        url = backend[len(REMOTE_PREFIX):].rstrip("/") + "/synthesize"
        body = serialize_track(track).encode("utf-8")
        try:
            resp = requests.post(
                url,
                data=body,
                headers={"content-type": "application/json"},
                timeout=timeout,
            )
        except requests.RequestException as e:
            raise SynthesisError(f"synthesis adapter unreachable: {e}") from None
        if resp.status_code != 200:
            raise SynthesisError(f"synthesis adapter returned HTTP {resp.status_code}")
        buffer = decode_wav(resp.content)
        if buffer.sample_rate != sample_rate:
            raise SynthesisError(
                f"sample-rate mismatch: adapter produced {buffer.sample_rate} Hz, "
                f"session expects {sample_rate} Hz"
            )
        return buffer
    raise SynthesisError(f"unknown backend {backend!r} (use 'mock' or 'remote:<url>')")
