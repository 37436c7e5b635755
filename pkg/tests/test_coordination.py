import numpy as np
import pytest

from gestura.coordination import (DEFAULT_PSI_TABLE, PsiTable, coordinate, coordinate_complex,
                                  coordinate_trajectory, planning_residual)
from gestura.data_types import PolarPoint, SelectionVector
from gestura.errors import ConfigError, DomainError

A_VECTOR = np.array([-1.5, 1.25, -1.5, -3, -1.5, 3.0, 1.0])
I_VECTOR = np.array([0.75, -2.5, -1.5, 1.5, -1.5, -0.75, 1.0])


def get_random_points(n=1000, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0, 1.2, n), rng.uniform(0, 2 * np.pi, n)


def test_default_table():
    table = PsiTable.default()
    assert np.all(table.omega == np.array([0, 0, 0, 0, 0, 0.5, 0]))
    assert np.all(table.psi1 == np.array([-1.5, -2.5, 3, -3, 3, 2.5, -2]))
    assert np.allclose(table.psi2, [np.pi, 5 * np.pi / 3, np.pi / 3, np.pi, np.pi / 3, np.pi, np.pi / 3])
    assert [e.name for e in table.entries] == ['Jaw', 'Body', 'Dorsum', 'Tip', 'LipP', 'LipH', 'Hy']


def test_table_needs_seven_rows():
    with pytest.raises(ConfigError):
        PsiTable([0] * 6, [1] * 6, [0] * 6)
    with pytest.raises(ConfigError):
        PsiTable([0] * 7, [np.nan] * 7, [0] * 7)


def test_center_is_omega():
    assert np.all(coordinate(PolarPoint(0, 1.234)) == DEFAULT_PSI_TABLE.omega)
    assert np.all(coordinate_complex(0j) == DEFAULT_PSI_TABLE.omega)


def test_corner_vowels():
    assert np.allclose(coordinate(PolarPoint(1, np.pi)), A_VECTOR, atol=1e-12)
    assert np.allclose(coordinate(PolarPoint(1, 5 * np.pi / 3)), I_VECTOR, atol=1e-12)
    assert np.allclose(coordinate_complex(np.exp(1j * np.pi)), A_VECTOR, atol=1e-12)


def test_closed_form_on_random_points():
    table = DEFAULT_PSI_TABLE
    rhos, thetas = get_random_points()
    for rho, theta in zip(rhos, thetas):
        expected = table.omega + table.psi1 * rho * np.cos(table.psi2 - theta)
        assert np.allclose(coordinate(PolarPoint(rho, theta)), expected, rtol=0, atol=1e-12)
        assert np.allclose(coordinate_complex(rho * np.exp(1j * theta)), expected, rtol=0, atol=1e-12)


def test_half_radius_example():
    table = DEFAULT_PSI_TABLE
    expected = table.omega + 0.5 * table.psi1 * np.cos(table.psi2 - np.pi / 3)
    assert np.allclose(coordinate_complex(0.5 * np.exp(1j * np.pi / 3)), expected, atol=1e-12)


def test_linearity_and_periodicity():
    omega = DEFAULT_PSI_TABLE.omega
    base = coordinate(PolarPoint(0.8, 2.0)) - omega
    for alpha in (0.0, 0.3, 1.0, 1.5):
        assert np.allclose(coordinate(PolarPoint(alpha * 0.8, 2.0)) - omega, alpha * base, atol=1e-12)
    assert np.allclose(coordinate(PolarPoint(0.8, 2.0)), coordinate(PolarPoint(0.8, 2.0 + 2 * np.pi)), atol=1e-12)


def test_cardinal_alignment():
    table = DEFAULT_PSI_TABLE
    for i in range(7):
        p = coordinate(PolarPoint(1, table.psi2[i]))
        assert p[i] - table.omega[i] == pytest.approx(table.psi1[i], abs=1e-12)


def test_crown_bound():
    coordinate(PolarPoint(1.2, 0.3))
    with pytest.raises(DomainError):
        coordinate(PolarPoint(1.21, 0.3))
    with pytest.raises(DomainError):
        coordinate_complex(1.3j)
    with pytest.raises(DomainError):
        PolarPoint(-0.1, 0)


def test_trajectory_selection():
    z = np.array([0.5, 1j, -0.8 + 0.1j])
    full = coordinate_trajectory(z)
    selection = SelectionVector.from_indices((1, 2, 6))
    part = coordinate_trajectory(z, selection=selection)
    assert full.shape == (7, 3)
    assert np.all(part[[0, 1, 5]] == full[[0, 1, 5]])
    assert np.all(part[[2, 3, 4, 6]] == 0)
    assert np.allclose(DEFAULT_PSI_TABLE.omega + full[:, 1], coordinate_complex(1j), atol=1e-12)


def test_planning_residual():
    assert planning_residual(coordinate(PolarPoint(0.7, 4.0))) < 1e-12
    mixed = DEFAULT_PSI_TABLE.omega.copy()
    mixed[0] += 1.0
    assert planning_residual(mixed) > 1e-3
