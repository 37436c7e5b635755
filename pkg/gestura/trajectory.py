from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from gestura.data_types import ArcOrientation, PolarPoint
from gestura.errors import DomainError, RangeError

VOWEL_SHAPE_K = 30.0
CONSONANT_SHAPE_K = 10.0
DEFAULT_NU = 1
TIME_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ArcSpec:
    """
    An arc of the planning plane between two points, lasting n_periods * period_T ms.

    Under O1 the phase runs from 0 to pi and the spiral term rides on the origin;
    under O2 it runs from -pi to 0 and the spiral term rides on the target.
    """
    from_point: PolarPoint
    to_point: PolarPoint
    orientation: ArcOrientation
    n_periods: int
    period_T: float
    nu: int = DEFAULT_NU
    K: float = VOWEL_SHAPE_K

    def __post_init__(self):
        if self.n_periods < 1:
            raise DomainError(f"an arc lasts at least one period, got n={self.n_periods}")
        if not self.period_T > 0:
            raise DomainError(f"the period must be positive, got T={self.period_T}")
        if self.nu not in (-1, 1):
            raise DomainError(f"nu must be +1 or -1, got {self.nu}")
        if not self.K > 0:
            raise DomainError(f"K must be positive, got {self.K}")

    @property
    def duration(self) -> float:
        return self.n_periods * self.period_T

    @property
    def is_stationary(self) -> bool:
        return self.from_point == self.to_point

    def endpoints(self) -> Tuple[PolarPoint, PolarPoint]:
        """
        (point 1, point 2) of the arc equation for this orientation.
        """
        if self.orientation == ArcOrientation.O1:
            return self.to_point, self.from_point
        return self.from_point, self.to_point


def _check_time(t: np.ndarray, arc: ArcSpec):
    tolerance = TIME_TOLERANCE * max(arc.duration, 1.0)
    if np.any(t < -tolerance) or np.any(t > arc.duration + tolerance):
        raise RangeError(f"time outside the arc [0, {arc.duration}] ms: "
                         f"{float(np.min(t)):.6g}..{float(np.max(t)):.6g}")


def _phase(t: np.ndarray, arc: ArcSpec) -> Tuple[np.ndarray, np.ndarray]:
    fraction = np.clip(t / arc.duration, 0.0, 1.0)
    # rho = cos(theta / 2), written as a sine so the endpoints come out exact
    if arc.orientation == ArcOrientation.O1:
        return np.pi * fraction, np.sin(0.5 * np.pi * (1.0 - fraction))
    return np.pi * (fraction - 1.0), np.sin(0.5 * np.pi * fraction)


def phase(t: float, arc: ArcSpec) -> Tuple[float, float]:
    """
    Phase angle and velocity-profile radius (theta(t), rho(t)) at time t of the arc.
    """
    t = np.asarray(t, dtype=float)
    _check_time(t, arc)
    theta, rho = _phase(t, arc)
    return float(theta), float(rho)


def _positions(t: np.ndarray, arc: ArcSpec) -> np.ndarray:
    if arc.is_stationary:
        return np.full(t.shape, arc.from_point.z, dtype=complex)
    theta, rho = _phase(t, arc)
    first, second = arc.endpoints()
    spiral = second.rho * np.exp(1j * (second.theta + (arc.nu / arc.K) * theta))
    return (1.0 - rho) * first.z + rho * spiral


def arc_position(t: float, arc: ArcSpec) -> complex:
    t = np.asarray(t, dtype=float)
    _check_time(t, arc)
    return complex(_positions(t.reshape(1), arc)[0])


def sample_arc(arc: ArcSpec, dt: float) -> np.ndarray:
    """
    Samples the arc every dt ms, both endpoints included.

    Parameters
    ----------
    arc: ArcSpec
        the arc to sample
    dt: float
        sampling period in ms

    Returns
    -------
    ndarray
        complex planning values z(0), z(dt), ..., z(nT)
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    steps = arc.duration / dt
    count = int(round(steps)) if abs(steps - round(steps)) < 1e-6 else int(np.ceil(steps))
    return _positions(np.linspace(0.0, arc.duration, count + 1), arc)


def arc_samples(arc: ArcSpec, n_frames: int, include_end: bool = False) -> np.ndarray:
    """
    n_frames values at t = j * duration / n_frames, plus the end point when include_end is set.
    """
    step = arc.duration / n_frames if n_frames else 0.0
    t = np.arange(n_frames + int(include_end)) * step
    if include_end:
        t[-1] = arc.duration
    return _positions(t, arc)

