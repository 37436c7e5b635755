from typing import Sequence

import numpy as np

TWO_PI = 2 * np.pi


def canonical_angle(theta: float) -> float:
    """
    Maps an angle in radians onto [0, 2pi).
    """
    if not np.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta}")
    angle = float(np.mod(theta, TWO_PI))
    # np.mod can round up to exactly 2pi for tiny negative inputs
    if angle >= TWO_PI:
        angle = 0.0
    return angle


def is_front(theta: float) -> bool:
    """
    A vowel angle is front when it lies strictly on the /i/ side of the circle, (pi, 2pi).
    """
    theta = canonical_angle(theta)
    return bool(np.pi < theta < TWO_PI)


def cumulative_counts(cumulative: np.ndarray) -> np.ndarray:
    edges = np.rint(np.concatenate([[0.0], cumulative])).astype(int)
    return np.diff(edges)


def frame_counts(durations_ms: Sequence[float], dt: float) -> np.ndarray:
    """
    Number of frames of each duration when they are laid end to end.

    Rounding is done on the running sum, so the counts always add up to the
    rounded total duration and no remainder is lost between pieces.

    Parameters
    ----------
    durations_ms: sequence of float
        consecutive durations in ms
    dt: float
        frame period in ms

    Returns
    -------
    ndarray
        integer frame count per duration
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    durations = np.asarray(durations_ms, dtype=float)
    if durations.size == 0:
        return np.zeros(0, dtype=int)
    return cumulative_counts(np.cumsum(durations) / dt)


def split_frames(durations_ms: Sequence[float], total_frames: int) -> np.ndarray:
    """
    Distributes total_frames over the durations proportionally, with cumulative rounding.
    """
    durations = np.asarray(durations_ms, dtype=float)
    total = durations.sum()
    if total <= 0:
        counts = np.zeros(len(durations), dtype=int)
        if len(counts):
            counts[-1] = total_frames
        return counts
    return cumulative_counts(np.cumsum(durations) / total * total_frames)


def raised_cosine(x: np.ndarray) -> np.ndarray:
    """
    Smooth step from 0 at x <= 0 to 1 at x >= 1.
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return 0.5 * (1.0 - np.cos(np.pi * x))


def normalize_peak(samples: np.ndarray, peak: float = 0.9) -> np.ndarray:
    """
    Scales a signal so that its largest absolute sample equals peak.

    Parameters
    ----------
    samples: ndarray
        the signal to normalize
    peak: float
        target peak value

    Returns
    -------
    ndarray
        the normalized signal; a silent signal is returned as zeros
    """
    samples = np.asarray(samples, dtype=float)
    largest = np.max(np.abs(samples)) if samples.size else 0.0
    if largest == 0:
        return np.zeros_like(samples)
    return samples * (peak / largest)
