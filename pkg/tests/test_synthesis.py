import numpy as np
import pytest
from scipy.signal import find_peaks, freqz

from gestura.data_types import EnvelopeCurve, FormantTrack, SegmentKind, Waveform
from gestura.errors import ConsistencyError, DomainError, OutputError
from gestura.flow import compile_word
from gestura.parsing import parse_word
from gestura.synthesis import (BANDWIDTHS, build_envelope, glottal_source, held_formants, pulse_onsets, read_wav,
                               render, resonator_coefficients, write_wav)

A_FORMANTS = (859.0, 1169.0, 2681.0, 3707.0)


def get_envelope(text):
    flow = compile_word(parse_word(text))
    return flow, build_envelope(flow.markers, flow.n_frames, flow.dt)


def get_track(values=A_FORMANTS, n_frames=300, dt=1.0):
    return FormantTrack(np.tile(values, (n_frames, 1)), np.ones(n_frames, dtype=bool), dt)


def strongest(waveform, low, high, start=0, stop=None):
    samples = waveform.samples[start:stop]
    spectrum = np.abs(np.fft.rfft(samples * np.hanning(len(samples))))
    freqs = np.fft.rfftfreq(len(samples), 1 / waveform.sample_rate)
    band = (freqs >= low) & (freqs <= high)
    return freqs[band][np.argmax(spectrum[band])]


def test_vowel_envelope_is_flat():
    _, envelope = get_envelope('ia')
    assert envelope.n_frames == 300
    assert np.all(envelope.gains == 1.0)


def test_consonant_envelope():
    _, envelope = get_envelope('bi')
    zeros = np.flatnonzero(envelope.gains == 0.0)
    assert list(zeros) == list(range(95, 105))
    assert np.all(np.diff(envelope.gains[70:96]) <= 0)
    assert np.all(np.diff(envelope.gains[104:131]) >= 0)
    assert envelope.gains[0] == 1.0 and np.all(envelope.gains[130:] == 1.0)
    assert np.all((envelope.gains >= 0) & (envelope.gains <= 1))


def test_pause_envelope():
    flow, envelope = get_envelope('a a')
    pause = flow.spans_of(SegmentKind.pause)[0]
    assert np.all(envelope.gains[pause.start:pause.stop] == 0.0)
    assert envelope.gains[pause.start - 1] == 1.0 and envelope.gains[pause.stop] == 1.0


def test_pulse_counts():
    assert len(pulse_onsets(100.0, 16000)) == 100
    assert len(pulse_onsets(60.0, 16000)) == 60
    assert np.all(np.diff(pulse_onsets(100.0, 16000)) == 160)
    assert np.all(np.diff(pulse_onsets(200.0, 16000)) == 80)


def test_declination():
    intervals = np.diff(pulse_onsets(200.0, 16000, f0_end=100.0))
    assert intervals[0] < 90 and intervals[-1] > 150
    assert np.all(np.diff(intervals) >= -1)


def test_glottal_source():
    source = glottal_source(120.0, 0.3)
    assert len(source) == 4800
    assert abs(source.mean()) < 1e-12
    assert len(glottal_source(120.0, 0.0)) == 0


def test_source_domain():
    with pytest.raises(DomainError):
        glottal_source(40.0, 1.0)
    with pytest.raises(DomainError):
        glottal_source(120.0, 1.0, f0_end=500.0)
    with pytest.raises(DomainError):
        glottal_source(120.0, 1.0, sample_rate=4000)
    with pytest.raises(DomainError):
        resonator_coefficients(500.0, 0.0, 16000)


def test_resonator_is_stable():
    for frequency in (200.0, 1000.0, 3500.0):
        for bandwidth in (60.0, 150.0):
            b, a = resonator_coefficients(frequency, bandwidth, 16000)
            assert np.all(np.abs(np.roots(a)) < 1)
            assert b[0] == pytest.approx(a.sum())


def test_held_formants():
    values = np.array([[np.nan] * 4, A_FORMANTS, [np.nan] * 4, [500.0, 1500.0, 2500.0, 3500.0]])
    track = FormantTrack(values, np.array([False, True, False, True]), 1.0)
    held = held_formants(track)
    assert np.all(held[0] == A_FORMANTS) and np.all(held[2] == A_FORMANTS)
    assert not np.any(np.isnan(held))


def test_render_vowel():
    waveform = render(get_track(), EnvelopeCurve(np.ones(300), 1.0), f0=50.0)
    assert waveform.n_samples == 4800
    assert waveform.duration_s == pytest.approx(0.3)
    assert np.max(np.abs(waveform.samples)) == pytest.approx(0.9)
    # 50 Hz harmonics on the steady part put one harmonic within 25 Hz of every formant
    assert abs(strongest(waveform, 600, 1000, start=1600) - A_FORMANTS[0]) < 40
    assert abs(strongest(waveform, 1000, 1400, start=1600) - A_FORMANTS[1]) < 40


def test_cascade_response():
    freqs = np.arange(100.0, 4500.0, 1.0)
    response = np.ones(len(freqs), dtype=complex)
    for frequency, bandwidth in zip(A_FORMANTS, BANDWIDTHS):
        b, a = resonator_coefficients(frequency, bandwidth, 16000)
        response *= freqz(b, a, worN=freqs, fs=16000)[1]
    peaks, _ = find_peaks(np.abs(response))
    assert np.allclose(freqs[peaks], A_FORMANTS, atol=20)


def test_render_silence():
    waveform = render(get_track(), EnvelopeCurve(np.zeros(300), 1.0))
    assert waveform.n_samples == 4800
    assert np.all(waveform.samples == 0)


def test_render_consistency():
    with pytest.raises(ConsistencyError):
        render(get_track(), EnvelopeCurve(np.ones(200), 1.0))
    with pytest.raises(ConsistencyError):
        render(get_track(), EnvelopeCurve(np.ones(300), 2.0))


def test_wav_round_trip(tmp_path):
    samples = 0.9 * np.sin(2 * np.pi * 440 * np.arange(16000) / 16000)
    path = tmp_path / 'out.wav'
    write_wav(Waveform(samples, 16000), path)
    assert path.stat().st_size == 44 + 32000
    restored = read_wav(path)
    assert restored.sample_rate == 16000
    assert np.max(np.abs(restored.samples - samples)) <= 1 / 32767
    with pytest.raises(OutputError):
        read_wav(tmp_path / 'missing.wav')
    with pytest.raises(OutputError):
        write_wav(Waveform(samples, 16000), tmp_path / 'missing' / 'out.wav')
