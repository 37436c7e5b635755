"""
The coordination function: one complex planning point drives all 7 articulators.

p_i = omega_i + psi1_i * rho * cos(psi2_i - theta), or in complex form
p = omega + Re[psi * conj(z)] with psi_i = psi1_i * exp(i * psi2_i).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from gestura.data_types import ARTICULATORS, CROWN_RADIUS, N_ARTICULATORS, PolarPoint, SelectionVector
from gestura.errors import ConfigError, DomainError

RADIUS_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PsiEntry:
    name: str
    omega: float
    psi1: float
    psi2: float


class PsiTable(object):
    """
    The 7-row coordination table, rows ordered Jaw, Body, Dorsum, Tip, LipP, LipH, Hy.

    Parameters
    ----------
    omega: sequence of float
        parameter means
    psi1: sequence of float
        parameter ranges, may be negative
    psi2: sequence of float
        the cardinal-vowel angle of every articulator, in radians
    names: sequence of str
        articulator names, defaults to ARTICULATORS
    """

    def __init__(self, omega: Sequence[float], psi1: Sequence[float], psi2: Sequence[float],
                 names: Sequence[str] = ARTICULATORS):
        self.names = tuple(names)
        self.omega = np.asarray(omega, dtype=float)
        self.psi1 = np.asarray(psi1, dtype=float)
        self.psi2 = np.asarray(psi2, dtype=float)
        for label, values in (('names', self.names), ('omega', self.omega), ('psi1', self.psi1), ('psi2', self.psi2)):
            if len(values) != N_ARTICULATORS:
                raise ConfigError(f"psi table field '{label}' needs {N_ARTICULATORS} entries, got {len(values)}")
        if not (np.all(np.isfinite(self.omega)) and np.all(np.isfinite(self.psi1)) and np.all(np.isfinite(self.psi2))):
            raise ConfigError("psi table values must be finite")
        self.psi = self.psi1 * np.exp(1j * self.psi2)
        # real 7x2 matrix of the map (x, y) -> p - omega
        self.planar = np.stack([self.psi1 * np.cos(self.psi2), self.psi1 * np.sin(self.psi2)], axis=1)

    @classmethod
    def default(cls) -> PsiTable:
        return cls(omega=(0, 0, 0, 0, 0, 0.5, 0),
                   psi1=(-1.5, -2.5, 3, -3, 3, 2.5, -2),
                   psi2=(np.pi, 5 * np.pi / 3, np.pi / 3, np.pi, np.pi / 3, np.pi, np.pi / 3))

    @property
    def entries(self) -> List[PsiEntry]:
        return [PsiEntry(n, float(o), float(a), float(b))
                for n, o, a, b in zip(self.names, self.omega, self.psi1, self.psi2)]

    def __len__(self):
        return N_ARTICULATORS

    def to_dict(self) -> dict:
        return {'names': list(self.names), 'omega': self.omega.tolist(),
                'psi1': self.psi1.tolist(), 'psi2': self.psi2.tolist()}


DEFAULT_PSI_TABLE = PsiTable.default()


def _check_radius(radius: Union[float, np.ndarray]):
    largest = float(np.max(radius)) if np.size(radius) else 0.0
    if largest > CROWN_RADIUS + RADIUS_TOLERANCE:
        raise DomainError(f"planning radius {largest:.6g} is outside the crown (max {CROWN_RADIUS})")


def coordinate(point: PolarPoint, table: PsiTable = DEFAULT_PSI_TABLE) -> np.ndarray:
    """
    Articulatory parameter vector of a planning point.
    """
    _check_radius(point.rho)
    return table.omega + table.psi1 * point.rho * np.cos(table.psi2 - point.theta)


def coordinate_complex(z: complex, table: PsiTable = DEFAULT_PSI_TABLE) -> np.ndarray:
    _check_radius(abs(z))
    return table.omega + np.real(table.psi * np.conj(z))


def coordinate_trajectory(z: np.ndarray, table: PsiTable = DEFAULT_PSI_TABLE,
                          selection: Optional[SelectionVector] = None) -> np.ndarray:
    """
    Parameter deviations Re[S * psi * conj(z)] for a sequence of planning values.

    Parameters
    ----------
    z: ndarray
        complex planning values, one per frame
    table: PsiTable
        coordination table
    selection: SelectionVector, optional
        restricts the contribution to the selected articulators; rows outside the
        selection are zero. The mean omega is NOT added.

    Returns
    -------
    ndarray
        7 x len(z) matrix of deviations from omega
    """
    z = np.asarray(z, dtype=complex).ravel()
    _check_radius(np.abs(z))
    psi = table.psi if selection is None else selection.mask * table.psi
    return np.real(psi[:, None] * np.conj(z)[None, :])


def planning_residual(p: np.ndarray, table: PsiTable = DEFAULT_PSI_TABLE) -> np.ndarray:
    """
    Distance of parameter vectors from the coordinated surface.

    Solves the least-squares problem p - omega = Re[psi * conj(z)] for a single
    planning value z per column and returns the norm of what is left. A column
    produced by the coordination function has residual 0 up to rounding.

    Parameters
    ----------
    p: ndarray
        a parameter vector of 7 values, or a 7 x N matrix of them

    Returns
    -------
    ndarray or float
        the residual norm per column
    """
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    deviations = (p.reshape(N_ARTICULATORS, -1) - table.omega[:, None])
    solution, _, _, _ = np.linalg.lstsq(table.planar, deviations, rcond=None)
    residual = np.linalg.norm(deviations - table.planar @ solution, axis=0)
    return float(residual[0]) if single else residual
