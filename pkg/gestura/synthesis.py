"""
Audio rendering: structure-dependent envelope, glottal pulse train, a cascade of
four formant resonators updated frame by frame, and PCM16 WAV output.
"""
from itertools import groupby
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.io import wavfile
from scipy.signal import lfilter

from gestura.data_types import EnvelopeCurve, FormantTrack, Marker, Waveform
from gestura.errors import ConsistencyError, DomainError, OutputError
from gestura.utils import normalize_peak, raised_cosine

F0_RANGE = (50.0, 400.0)
MIN_SAMPLE_RATE = 8000
DEFAULT_SAMPLE_RATE = 16000
DEFAULT_F0 = 120.0
BANDWIDTHS = (60.0, 90.0, 120.0, 150.0)
FALLBACK_FORMANTS = (500.0, 1500.0, 2500.0, 3500.0)
PEAK = 0.9
PCM_SCALE = 32767

OPEN_QUOTIENT = 0.6
RISE_FRACTION = 2.0 / 3.0
RAMP_PERIODS = 0.25
PLATEAU_PERIODS = 0.1


def _consonant_groups(markers: Sequence[Marker]) -> List[List[Marker]]:
    consonants = sorted((m for m in markers if m.is_consonant), key=lambda m: m.frame)
    return [list(group) for _, group in groupby(consonants, key=lambda m: m.segment)]


def _pause_ranges(markers: Sequence[Marker]) -> List[Tuple[int, int]]:
    starts = {m.segment: m.frame for m in markers if m.role == 'pause_start'}
    ends = {m.segment: m.frame for m in markers if m.role == 'pause_end'}
    return [(starts[segment], ends[segment]) for segment in sorted(starts) if segment in ends]


def build_envelope(markers: Sequence[Marker], n_frames: int, dt: float) -> EnvelopeCurve:
    """
    Gain per frame: 1 on vowels, 0 around consonant closures and during pauses.

    Each group of consonant markers sharing a segment gets a zero plateau running
    from 0.05T before its first marker to 0.05T after its last one, framed by
    raised-cosine ramps of 0.25T. Overlapping dips combine by minimum.

    Parameters
    ----------
    markers: sequence of Marker
        as produced by compile_word
    n_frames: int
    dt: float
        frame period in ms

    Returns
    -------
    EnvelopeCurve
    """
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    gains = np.ones(n_frames)
    frames = np.arange(n_frames, dtype=float)
    for group in _consonant_groups(markers):
        half_plateau = 0.5 * PLATEAU_PERIODS * group[0].period_ms / dt
        ramp = RAMP_PERIODS * group[0].period_ms / dt
        start = group[0].frame - half_plateau
        stop = group[-1].frame + half_plateau
        distance = np.where(frames < start, start - frames, np.where(frames >= stop, frames - stop + 1, 0.0))
        dip = raised_cosine(distance / ramp) if ramp > 0 else (distance > 0) * 1.0
        gains = np.minimum(gains, dip)
    for start, stop in _pause_ranges(markers):
        gains[start:stop] = 0.0
    return EnvelopeCurve(gains, dt)


def envelope_to_frame(envelope: EnvelopeCurve) -> pd.DataFrame:
    return pd.DataFrame({'frame': np.arange(envelope.n_frames), 'gain': envelope.gains})


def _check_source(f0: float, sample_rate: int, f0_end: Optional[float]):
    for value in (f0, f0 if f0_end is None else f0_end):
        if not F0_RANGE[0] <= value <= F0_RANGE[1]:
            raise DomainError(f"f0 must lie in [{F0_RANGE[0]:.0f}, {F0_RANGE[1]:.0f}] Hz, got {value}")
    if sample_rate < MIN_SAMPLE_RATE:
        raise DomainError(f"sample rate must be at least {MIN_SAMPLE_RATE} Hz, got {sample_rate}")


def _phase(n_samples: int, f0: float, sample_rate: int, f0_end: Optional[float]) -> np.ndarray:
    n = np.arange(n_samples, dtype=float)
    phase = n * f0 / sample_rate
    if f0_end is not None and n_samples > 0:
        phase += (f0_end - f0) * n ** 2 / (2 * n_samples * sample_rate)
    return phase


def pulse_onsets(f0: float, n_samples: int, sample_rate: int = DEFAULT_SAMPLE_RATE,
                 f0_end: Optional[float] = None) -> np.ndarray:
    """
    Sample indices at which glottal pulses start: 0 and every integer crossing of the f0 phase.

    With f0_end the instantaneous f0 falls (or rises) linearly over the signal.
    """
    _check_source(f0, sample_rate, f0_end)
    if n_samples <= 0:
        return np.zeros(0, dtype=int)
    cycles = np.floor(_phase(n_samples, f0, sample_rate, f0_end))
    return np.concatenate([[0], np.flatnonzero(np.diff(cycles) > 0) + 1]).astype(int)


def glottal_source(f0: float = DEFAULT_F0, duration_s: float = 1.0, sample_rate: int = DEFAULT_SAMPLE_RATE,
                   f0_end: Optional[float] = None) -> np.ndarray:
    """
    Differentiated polynomial glottal pulse train.

    Each period opens with a 3x^2 - 2x^3 rise and closes with a 1 - x^2 fall, the
    open phase covering 0.6 of the period. The train is differentiated once and
    made zero-mean.

    Parameters
    ----------
    f0: float
        fundamental frequency in Hz, within [50, 400]
    duration_s: float
    sample_rate: int
        at least 8000 Hz
    f0_end: float, optional
        f0 at the end of the signal for a linear declination

    Returns
    -------
    ndarray
        round(duration_s * sample_rate) samples
    """
    _check_source(f0, sample_rate, f0_end)
    if duration_s < 0:
        raise DomainError(f"duration must not be negative, got {duration_s}")
    n_samples = int(round(duration_s * sample_rate))
    onsets = pulse_onsets(f0, n_samples, sample_rate, f0_end)
    if n_samples == 0:
        return np.zeros(0)

    last_f0 = f0 if f0_end is None else f0_end
    periods = np.diff(np.append(onsets, onsets[-1] + sample_rate / last_f0)).astype(float)
    owner = np.searchsorted(onsets, np.arange(n_samples), side='right') - 1
    elapsed = np.arange(n_samples) - onsets[owner]
    rise = RISE_FRACTION * OPEN_QUOTIENT * periods[owner]
    fall = (1 - RISE_FRACTION) * OPEN_QUOTIENT * periods[owner]

    x_rise = np.clip(elapsed / rise, 0.0, 1.0)
    x_fall = np.clip((elapsed - rise) / fall, 0.0, 1.0)
    pulses = np.where(elapsed < rise, 3 * x_rise ** 2 - 2 * x_rise ** 3,
                      np.where(elapsed < rise + fall, 1 - x_fall ** 2, 0.0))
    source = np.diff(pulses, prepend=0.0)
    return source - source.mean()


def resonator_coefficients(frequency: float, bandwidth: float, sample_rate: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Two-pole resonator with unity gain at DC.

    Returns
    -------
    (ndarray, ndarray)
        numerator and denominator for scipy.signal.lfilter
    """
    if bandwidth <= 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth}")
    r = np.exp(-np.pi * bandwidth / sample_rate)
    cosine = np.cos(2 * np.pi * frequency / sample_rate)
    a = np.array([1.0, -2 * r * cosine, r ** 2])
    return np.array([a.sum()]), a


def held_formants(track: FormantTrack) -> np.ndarray:
    """
    Formants with invalid frames replaced by the last valid frame (the first valid one before it starts).
    """
    if track.n_frames == 0:
        return np.zeros((0, 4))
    if not track.valid.any():
        return np.tile(FALLBACK_FORMANTS, (track.n_frames, 1))
    source = np.where(track.valid, np.arange(track.n_frames), -1)
    source = np.maximum.accumulate(source)
    source[source < 0] = np.flatnonzero(track.valid)[0]
    return track.values[source]


def frame_boundaries(n_frames: int, dt: float, sample_rate: int) -> np.ndarray:
    hop = dt / 1000.0 * sample_rate
    return np.rint(np.arange(n_frames + 1) * hop).astype(int)


def render(track: FormantTrack, envelope: EnvelopeCurve, f0: float = DEFAULT_F0,
           sample_rate: int = DEFAULT_SAMPLE_RATE, f0_end: Optional[float] = None,
           bandwidths: Sequence[float] = BANDWIDTHS, verbose: int = 0) -> Waveform:
    """
    Filters the glottal source through the formant track and applies the envelope.

    Parameters
    ----------
    track: FormantTrack
    envelope: EnvelopeCurve
        one gain per track frame
    f0: float
    sample_rate: int
    f0_end: float, optional
    bandwidths: sequence of float
        one bandwidth in Hz per resonator
    verbose: int

    Returns
    -------
    Waveform
        round(n_frames * dt / 1000 * sample_rate) samples, peak 0.9 unless silent
    """
    if track.n_frames != envelope.n_frames:
        raise ConsistencyError(f"the track has {track.n_frames} frames but the envelope {envelope.n_frames}")
    if track.dt != envelope.dt:
        raise ConsistencyError(f"the track uses dt={track.dt} ms but the envelope dt={envelope.dt} ms")
    if len(bandwidths) != 4:
        raise DomainError(f"four bandwidths are needed, got {len(bandwidths)}")

    bounds = frame_boundaries(track.n_frames, track.dt, sample_rate)
    n_samples = int(bounds[-1])
    if verbose >= 1:
        print(f"Rendering {n_samples} samples at {sample_rate} Hz", flush=True)
    signal = glottal_source(f0, n_samples / sample_rate, sample_rate, f0_end)[:n_samples]
    formant_values = held_formants(track)

    output = np.zeros(n_samples)
    states = [np.zeros(2) for _ in bandwidths]
    for i in range(track.n_frames):
        start, stop = bounds[i], bounds[i + 1]
        if stop <= start:
            continue
        chunk = signal[start:stop]
        for k, bandwidth in enumerate(bandwidths):
            b, a = resonator_coefficients(formant_values[i, k], bandwidth, sample_rate)
            chunk, states[k] = lfilter(b, a, chunk, zi=states[k])
        output[start:stop] = chunk

    if track.n_frames:
        hop = track.dt / 1000.0 * sample_rate
        output *= np.interp(np.arange(n_samples), np.arange(track.n_frames) * hop, envelope.gains)
    return Waveform(normalize_peak(output, PEAK), sample_rate)


def write_wav(waveform: Waveform, path: Union[str, Path]):
    """
    Writes a mono 16-bit PCM WAV file.
    """
    pcm = np.clip(np.rint(waveform.samples * PCM_SCALE), -PCM_SCALE, PCM_SCALE).astype(np.int16)
    try:
        wavfile.write(str(path), int(waveform.sample_rate), pcm)
    except OSError as err:
        raise OutputError(f"cannot write {path}: {err}") from err


def read_wav(path: Union[str, Path]) -> Waveform:
    try:
        sample_rate, pcm = wavfile.read(str(path))
    except (OSError, ValueError) as err:
        raise OutputError(f"cannot read {path}: {err}") from err
    return Waveform(np.asarray(pcm, dtype=float) / PCM_SCALE, int(sample_rate))
