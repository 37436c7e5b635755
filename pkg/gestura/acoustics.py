"""
Vocal-tract acoustics: parameter vectors to area functions, area functions to
transfer functions by the chain-matrix (transmission line) method, and formants.

The area map deforms a uniform neutral tract exponentially. Each articulator owns
a profile of weights over the tube sections, built from Gaussian bumps, and acts
through its deviation from the parameter mean, so the mean parameter vector gives
the neutral tract back.

Closures are carried by extra weights whose psi-weighted sum is zero. They leave
every coordinated vector untouched and only act on superimposed frames, where the
consonantal articulators and the vocalic ones point at different planning values.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.signal import find_peaks
from sklearn.metrics import pairwise_distances
from tqdm import tqdm

from gestura.coordination import DEFAULT_PSI_TABLE, PsiTable, coordinate
from gestura.data_types import (AREA_MAX, AREA_MIN, ARTICULATORS, N_ARTICULATORS, AreaFunction, FormantTrack,
                                ParameterFlow, PolarPoint, SelectionVector, as_parameter_vector)
from gestura.errors import ConfigError, DomainError

SOUND_SPEED = 35000.0  # cm/s
AIR_DENSITY = 1.14e-3  # g/cm^3
MAX_FREQUENCY = 5000.0
MIN_FORMANT_FREQUENCY = 50.0
FREQUENCY_STEP = 10.0
N_FORMANTS = 4
BATCH_SIZE = 256

NEUTRAL_SECTIONS = 29
NEUTRAL_LENGTH = 17.5
NEUTRAL_AREA = 3.0
LENGTH_GAIN = 0.3
LIP_SECTIONS = 3

# (articulator, center section, width in sections, amplitude)
DEFAULT_BUMPS = (
    ('Body', 6.0, 3.0, -0.8),
    ('Hy', 5.0, 3.0, -0.8),
    ('Dorsum', 13.0, 2.0, -0.6),
    ('Body', 13.0, 2.0, -0.3),
    ('Body', 18.5, 2.5, 1.0),
    ('Dorsum', 18.5, 2.5, -0.32),
    ('Jaw', 18.5, 2.5, -0.3),
    ('Tip', 23.5, 1.5, -0.4),
    ('Jaw', 23.5, 1.5, -0.3),
    ('Body', 23.5, 1.5, 0.3),
    ('LipH', 27.0, 1.0, 0.6),
    ('LipP', 27.0, 1.0, -0.35),
    ('Jaw', 27.0, 1.0, -0.2),
)
MAX_PROFILE_WEIGHT = 5.0
CLOSURE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ClosureSpec:
    """
    A place of articulation closed by the consonants of one selection.

    On a superimposed frame the closing term is Re[c * conj(z_c - z_v)] with
    c = -gain * exp(i * direction): the place narrows most when the consonant lies
    from the vowel in the closing direction. Frames driven by a selection listed in
    neutral leave the place alone.
    """
    place: str
    center: float
    width: float
    selection: Tuple[int, ...]
    gain: float
    direction: float
    neutral: Tuple[Tuple[int, ...], ...] = ()

    @property
    def target(self) -> complex:
        return -self.gain * np.exp(1j * self.direction)

    def to_dict(self) -> dict:
        return {'place': self.place, 'center': self.center, 'width': self.width,
                'selection': list(self.selection), 'gain': self.gain, 'direction': self.direction,
                'neutral': [list(s) for s in self.neutral]}


DEFAULT_CLOSURES = (
    ClosureSpec('lips', 28.0, 1.0, (1, 2, 6), 2.75, np.pi / 2, ((1, 2, 3, 4),)),
    ClosureSpec('alveolar', 23.5, 1.5, (1, 2, 3, 4), 1.5, -11 * np.pi / 36, ((1, 2, 6),)),
)


def _bump(sections: np.ndarray, center: float, width: float) -> np.ndarray:
    return np.exp(-0.5 * ((sections - center) / width) ** 2)


def closure_weights(selection: SelectionVector, target: complex, table: PsiTable = DEFAULT_PSI_TABLE,
                    neutral: Sequence[SelectionVector] = ()) -> np.ndarray:
    """
    Articulator weights w with sum(w * psi) = 0 and sum(S * w * psi) = target.

    Parameters
    ----------
    selection: SelectionVector
        the consonantal selection S that drives the closure
    target: complex
        the value of the selected sum
    table: PsiTable
    neutral: sequence of SelectionVector
        selections whose sum must vanish

    Returns
    -------
    ndarray
        the minimum-norm weights, one per articulator

    Raises
    ------
    ConfigError
        if the psi table admits no such weights
    """
    rows = np.array([table.psi, selection.mask * table.psi] + [s.mask * table.psi for s in neutral])
    values = np.array([0.0, target] + [0.0] * len(neutral), dtype=complex)
    system = np.concatenate([rows.real, rows.imag])
    rhs = np.concatenate([values.real, values.imag])
    weights = np.linalg.lstsq(system, rhs, rcond=None)[0]
    if not np.allclose(system @ weights, rhs, atol=CLOSURE_TOLERANCE):
        raise ConfigError(f"the psi table admits no closure weights for selection {selection}")
    return weights


class ArticulatoryMap(object):
    """
    Maps articulatory parameter vectors onto area functions.

    Parameters
    ----------
    neutral: AreaFunction
        the tract of the mean parameter vector
    profiles: ndarray
        7 x M weights within +-MAX_PROFILE_WEIGHT, one row per articulator
    length_gain: float
        cm of lip extension per unit of LipP deviation, spread over the last lip_sections
    center: ndarray, optional
        the parameter vector that yields the neutral tract, defaults to the psi table means
    lip_sections: int
    """

    def __init__(self, neutral: AreaFunction, profiles: np.ndarray, length_gain: float = LENGTH_GAIN,
                 center: Optional[Sequence[float]] = None, lip_sections: int = LIP_SECTIONS):
        profiles = np.asarray(profiles, dtype=float)
        if profiles.shape != (N_ARTICULATORS, neutral.n_sections):
            raise ConfigError(f"profiles must have shape ({N_ARTICULATORS}, {neutral.n_sections}), "
                              f"got {profiles.shape}")
        if not np.all(np.isfinite(profiles)) or np.any(np.abs(profiles) > MAX_PROFILE_WEIGHT):
            raise ConfigError(f"profiles must be finite and within [-{MAX_PROFILE_WEIGHT:g}, {MAX_PROFILE_WEIGHT:g}]")
        if not 1 <= lip_sections <= neutral.n_sections:
            raise ConfigError(f"lip_sections must be in 1..{neutral.n_sections}, got {lip_sections}")
        if not np.isfinite(length_gain):
            raise ConfigError("length_gain must be finite")
        self.neutral = neutral
        self.profiles = profiles
        self.length_gain = float(length_gain)
        self.center = DEFAULT_PSI_TABLE.omega.copy() if center is None else as_parameter_vector(center)
        self.lip_sections = int(lip_sections)

    @classmethod
    def from_bumps(cls, bumps: Sequence[Tuple[str, float, float, float]] = DEFAULT_BUMPS,
                   n_sections: int = NEUTRAL_SECTIONS, length: float = NEUTRAL_LENGTH,
                   area: float = NEUTRAL_AREA, length_gain: float = LENGTH_GAIN,
                   table: PsiTable = DEFAULT_PSI_TABLE, lip_sections: int = LIP_SECTIONS,
                   closures: Sequence[ClosureSpec] = ()) -> ArticulatoryMap:
        """
        Builds the profiles from Gaussian bumps (articulator, center section, width, amplitude)
        plus the closure weights of every ClosureSpec, solved against table.
        """
        sections = np.arange(n_sections)
        profiles = np.zeros((N_ARTICULATORS, n_sections))
        for articulator, center, width, amplitude in bumps:
            if articulator not in ARTICULATORS:
                raise ConfigError(f"unknown articulator {articulator!r}")
            profiles[ARTICULATORS.index(articulator)] += amplitude * _bump(sections, center, width)
        for closure in closures:
            weights = closure_weights(SelectionVector.from_indices(closure.selection), closure.target, table,
                                      [SelectionVector.from_indices(s) for s in closure.neutral])
            profiles += np.outer(weights, _bump(sections, closure.center, closure.width))
        return cls(AreaFunction.uniform(length, area, n_sections), profiles, length_gain, table.omega, lip_sections)

    @classmethod
    def default(cls, table: PsiTable = DEFAULT_PSI_TABLE) -> ArticulatoryMap:
        return cls.from_bumps(table=table, closures=DEFAULT_CLOSURES)

    def to_dict(self) -> dict:
        return {'neutral': {'lengths': self.neutral.lengths.tolist(), 'areas': self.neutral.areas.tolist()},
                'profiles': self.profiles.tolist(), 'length_gain': self.length_gain,
                'center': self.center.tolist(), 'lip_sections': self.lip_sections}


DEFAULT_MAP = ArticulatoryMap.default()


def _section_arrays(parameters: np.ndarray, amap: ArticulatoryMap) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lengths and areas (each N x M) for a 7 x N matrix of parameter vectors.
    """
    deviations = parameters - amap.center[:, None]
    areas = np.clip(amap.neutral.areas[None, :] * np.exp(deviations.T @ amap.profiles), AREA_MIN, AREA_MAX)
    lengths = np.tile(amap.neutral.lengths, (parameters.shape[1], 1))
    extension = amap.length_gain * deviations[ARTICULATORS.index('LipP')]
    lengths[:, -amap.lip_sections:] += extension[:, None] / amap.lip_sections
    return np.maximum(lengths, 1e-3), areas


def area_from_parameters(p: Sequence[float], amap: ArticulatoryMap = DEFAULT_MAP) -> AreaFunction:
    p = as_parameter_vector(p)
    lengths, areas = _section_arrays(p[:, None], amap)
    return AreaFunction(lengths[0], areas[0])


def _check_frequencies(freqs: np.ndarray):
    if freqs.size == 0:
        raise DomainError("the frequency grid is empty")
    if np.any(freqs <= 0) or np.any(freqs > MAX_FREQUENCY):
        raise DomainError(f"frequencies must lie in (0, {MAX_FREQUENCY:.0f}] Hz")


def _chain_denominator(lengths: np.ndarray, areas: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """
    |D| of the glottis-to-lips chain matrix [[A, B], [C, D]] for each tract (rows) and frequency (columns).

    With zero pressure at the lips U_glottis = D * U_lips, so |H| = 1 / |D|. Only the
    second row of the product is needed.
    """
    k = 2 * np.pi * freqs / SOUND_SPEED
    c = np.zeros((lengths.shape[0], len(freqs)), dtype=complex)
    d = np.ones((lengths.shape[0], len(freqs)), dtype=complex)
    for m in range(lengths.shape[1]):
        phase = k[None, :] * lengths[:, m:m + 1]
        cos, sin = np.cos(phase), np.sin(phase)
        impedance = (AIR_DENSITY * SOUND_SPEED / areas[:, m])[:, None]
        c, d = c * cos + d * (1j * sin / impedance), c * (1j * impedance * sin) + d * cos
    return np.abs(d)


def transfer_function(area: AreaFunction, freqs: Sequence[float]) -> np.ndarray:
    """
    Magnitude of the glottis-to-lips volume-velocity transfer function.

    Lossless cylindrical sections, closed glottis, zero-impedance lips.

    Parameters
    ----------
    area: AreaFunction
    freqs: sequence of float
        frequencies in Hz, within (0, 5000]

    Returns
    -------
    ndarray
        |H(f)| per frequency
    """
    freqs = np.asarray(freqs, dtype=float).ravel()
    _check_frequencies(freqs)
    denominator = _chain_denominator(area.lengths[None, :], area.areas[None, :], freqs)[0]
    return 1.0 / (denominator + 1e-12)


def formant_grid() -> np.ndarray:
    return FREQUENCY_STEP * np.arange(1, int(MAX_FREQUENCY / FREQUENCY_STEP) + 1)


def _peaks(log_magnitude: np.ndarray, freqs: np.ndarray, count: int) -> Tuple[np.ndarray, bool]:
    values = np.full(count, np.nan)
    indices, _ = find_peaks(log_magnitude)
    indices = indices[freqs[indices] > MIN_FORMANT_FREQUENCY][:count]
    for slot, i in enumerate(indices):
        h0, h1, h2 = log_magnitude[i - 1:i + 2]
        curvature = h0 - 2 * h1 + h2
        delta = 0.5 * (h0 - h2) / curvature if curvature != 0 else 0.0
        values[slot] = freqs[i] + delta * FREQUENCY_STEP
    valid = len(indices) == count and bool(np.all(np.diff(values) > 0)) and values[-1] < MAX_FREQUENCY
    return values, valid


def _formants_batch(lengths: np.ndarray, areas: np.ndarray, count: int) -> Tuple[np.ndarray, np.ndarray]:
    freqs = formant_grid()
    log_magnitude = -np.log(_chain_denominator(lengths, areas, freqs) + 1e-12)
    results = [_peaks(row, freqs, count) for row in log_magnitude]
    return np.array([r[0] for r in results]).reshape(-1, count), np.array([r[1] for r in results], dtype=bool)


def formants(area: AreaFunction, count: int = N_FORMANTS) -> Tuple[np.ndarray, bool]:
    """
    The count lowest resonances of the tract.

    Local maxima of log|H| on a 10 Hz grid over (50, 5000] Hz, refined by
    parabolic interpolation.

    Returns
    -------
    (ndarray, bool)
        the frequencies in Hz (NaN where missing) and whether all count were found
    """
    values, valid = _formants_batch(area.lengths[None, :], area.areas[None, :], count)
    return values[0], bool(valid[0])


def formants_of_parameters(parameters: np.ndarray, amap: ArticulatoryMap = DEFAULT_MAP,
                           count: int = N_FORMANTS, verbose: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Formants of every column of a 7 x N parameter matrix; repeated columns are evaluated once.
    """
    parameters = np.asarray(parameters, dtype=float).reshape(N_ARTICULATORS, -1)
    if parameters.shape[1] == 0:
        return np.zeros((0, count)), np.zeros(0, dtype=bool)
    unique, inverse = np.unique(parameters.T, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    values = np.empty((len(unique), count))
    valid = np.empty(len(unique), dtype=bool)
    for start in tqdm(range(0, len(unique), BATCH_SIZE), disable=not verbose):
        lengths, areas = _section_arrays(unique[start:start + BATCH_SIZE].T, amap)
        values[start:start + BATCH_SIZE], valid[start:start + BATCH_SIZE] = _formants_batch(lengths, areas, count)
    return values[inverse], valid[inverse]


def track_formants(flow: ParameterFlow, amap: ArticulatoryMap = DEFAULT_MAP, verbose: int = 0) -> FormantTrack:
    if verbose >= 1:
        print(f"Tracking formants over {flow.n_frames} frames", flush=True)
    values, valid = formants_of_parameters(flow.frames, amap, N_FORMANTS, verbose)
    values[~valid] = np.nan
    return FormantTrack(values, valid, flow.dt)


def track_to_frame(track: FormantTrack) -> pd.DataFrame:
    frame = pd.DataFrame({f'F{k}': track.formant(k) for k in range(1, 5)})
    frame.insert(0, 'frame', np.arange(track.n_frames))
    frame['valid'] = track.valid.astype(int)
    return frame


def sample_surface(rho_grid: Sequence[float], theta_grid: Sequence[float], table: PsiTable = DEFAULT_PSI_TABLE,
                   amap: ArticulatoryMap = DEFAULT_MAP, verbose: int = 0) -> pd.DataFrame:
    """
    F1-F3 of the coordinated surface on a polar grid.

    Returns
    -------
    DataFrame
        columns rho, theta, F1, F2, F3; one row per (rho, theta), rho varying slowest
    """
    rho_grid = np.asarray(rho_grid, dtype=float).ravel()
    theta_grid = np.asarray(theta_grid, dtype=float).ravel()
    if np.any(rho_grid < 0) or np.any(rho_grid > 1):
        raise DomainError("surface radii must lie in [0, 1]")
    if np.any(theta_grid < 0) or np.any(theta_grid >= 2 * np.pi):
        raise DomainError("surface angles must lie in [0, 2pi)")
    rho, theta = (grid.ravel() for grid in np.meshgrid(rho_grid, theta_grid, indexing='ij'))
    if verbose >= 1:
        print(f"Sampling the surface on {len(rho_grid)} x {len(theta_grid)} points", flush=True)
    parameters = np.stack([coordinate(PolarPoint(r, t), table) for r, t in zip(rho, theta)], axis=1) \
        if len(rho) else np.zeros((N_ARTICULATORS, 0))
    values, _ = formants_of_parameters(parameters, amap, N_FORMANTS, verbose)
    return pd.DataFrame({'rho': rho, 'theta': theta, 'F1': values[:, 0], 'F2': values[:, 1], 'F3': values[:, 2]})


def surface_distance(values: np.ndarray, surface: pd.DataFrame) -> np.ndarray:
    """
    Euclidean distance (Hz) from each (F1, F2, F3) row to the closest surface sample; NaN rows stay NaN.
    """
    values = np.asarray(values, dtype=float)[:, :3]
    points = surface[['F1', 'F2', 'F3']].dropna().to_numpy()
    distances = np.full(len(values), np.nan)
    finite = np.all(np.isfinite(values), axis=1)
    if finite.any():
        distances[finite] = pairwise_distances(values[finite], points).min(axis=1)
    return distances
