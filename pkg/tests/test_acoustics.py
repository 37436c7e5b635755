import numpy as np
import pytest

from gestura.acoustics import (DEFAULT_MAP, ArticulatoryMap, area_from_parameters, closure_weights, formants,
                               formants_of_parameters, sample_surface, surface_distance, track_formants,
                               track_to_frame, transfer_function)
from gestura.coordination import DEFAULT_PSI_TABLE, coordinate
from gestura.data_types import AREA_MIN, AreaFunction, PolarPoint, SelectionVector
from gestura.errors import ConfigError, DomainError
from gestura.experiments import surface_grid
from gestura.flow import compile_word
from gestura.parsing import parse_word


def get_vowel_formants(theta):
    return formants(area_from_parameters(coordinate(PolarPoint(1, theta))))[0]


def test_uniform_tube():
    values, valid = formants(AreaFunction.uniform())
    assert valid
    assert np.allclose(values, [500, 1500, 2500, 3500], rtol=0.02)


def test_half_tube():
    values, valid = formants(AreaFunction.uniform(length=8.75), count=2)
    assert valid
    assert np.allclose(values, [1000, 3000], rtol=0.02)
    _, valid = formants(AreaFunction.uniform(length=8.75))
    assert not valid


def test_transfer_function_peak():
    freqs = np.arange(10, 1000, 10.0)
    magnitude = transfer_function(AreaFunction.uniform(), freqs)
    assert abs(freqs[np.argmax(magnitude)] - 500) <= 10


def test_area_scaling_invariance():
    lengths = np.full(20, 17.5 / 20)
    areas = np.linspace(1.0, 5.0, 20)
    low, _ = formants(AreaFunction(lengths, areas))
    high, _ = formants(AreaFunction(lengths, 2 * areas))
    assert np.allclose(low, high, atol=1e-6)


def test_corner_vowels():
    i, a, u = (get_vowel_formants(theta) for theta in (5 * np.pi / 3, np.pi, np.pi / 3))
    assert a[0] > i[0] + 50 and a[0] > u[0] + 50
    assert i[1] > a[1] + 50 > u[1] + 100


def test_neutral_tract():
    area = area_from_parameters(coordinate(PolarPoint(0, 0)))
    assert np.allclose(area.areas, DEFAULT_MAP.neutral.areas)
    assert area.total_length == pytest.approx(17.5)
    values, valid = formants(area)
    assert valid
    assert np.allclose(values, [500, 1500, 2500, 3500], rtol=0.15)


def test_lip_closure_lowers_f1():
    uniform = AreaFunction.uniform()
    areas = uniform.areas.copy()
    areas[-1] = AREA_MIN
    closed, _ = formants(AreaFunction(uniform.lengths, areas))
    assert closed[0] < formants(uniform)[0][0] - 100


def test_lip_protrusion_lengthens_tract():
    p = DEFAULT_PSI_TABLE.omega.copy()
    p[4] += 1.0
    assert area_from_parameters(p).total_length == pytest.approx(17.5 + DEFAULT_MAP.length_gain)


def test_frequency_domain():
    with pytest.raises(DomainError):
        transfer_function(AreaFunction.uniform(), [])
    with pytest.raises(DomainError):
        transfer_function(AreaFunction.uniform(), [100, 6000])
    with pytest.raises(DomainError):
        transfer_function(AreaFunction.uniform(), [0, 100])


def test_repeated_columns():
    p = coordinate(PolarPoint(1, np.pi))
    values, valid = formants_of_parameters(np.stack([p, p, DEFAULT_PSI_TABLE.omega], axis=1))
    assert values.shape == (3, 4) and np.all(valid)
    assert np.array_equal(values[0], values[1])
    assert not np.allclose(values[0], values[2])


def test_track_formants():
    track = track_formants(compile_word(parse_word('ia')))
    assert track.n_frames == 300
    frame = track_to_frame(track)
    assert list(frame.columns) == ['frame', 'F1', 'F2', 'F3', 'F4', 'valid']
    assert np.all(np.isnan(track.values[~track.valid]))


def test_formant_track_is_continuous():
    for word in ('ibia', 'ia'):
        track = track_formants(compile_word(parse_word(word)))
        both = track.valid[1:] & track.valid[:-1]
        assert np.any(both)
        for number in (1, 2, 3):
            assert np.max(np.abs(np.diff(track.formant(number)))[both]) < 200


def test_surface_layout():
    surface = sample_surface([0.0, 0.5, 1.0], [0.0, np.pi])
    assert len(surface) == 6
    assert list(surface['rho']) == [0.0, 0.0, 0.5, 0.5, 1.0, 1.0]
    assert list(surface['theta']) == [0.0, np.pi] * 3
    with pytest.raises(DomainError):
        sample_surface([1.5], [0.0])
    with pytest.raises(DomainError):
        sample_surface([1.0], [2 * np.pi])


def test_surface_distance():
    surface = sample_surface(*surface_grid(41, 180))
    ia = track_formants(compile_word(parse_word('ia')))
    assert np.nanmax(surface_distance(ia.values, surface)) < 25
    ibi = track_formants(compile_word(parse_word('ibi')))
    assert np.nanmax(surface_distance(ibi.values, surface)) > 50
    assert np.isnan(surface_distance(np.full((1, 4), np.nan), surface)[0])


def test_map_validation():
    neutral = AreaFunction.uniform()
    with pytest.raises(ConfigError):
        ArticulatoryMap(neutral, np.zeros((7, 10)))
    with pytest.raises(ConfigError):
        ArticulatoryMap(neutral, np.full((7, 29), 6.0))
    with pytest.raises(ConfigError):
        ArticulatoryMap(neutral, np.zeros((7, 29)), lip_sections=0)
    with pytest.raises(ConfigError):
        ArticulatoryMap.from_bumps([('Tongue', 10.0, 2.0, 0.5)])
    flat = ArticulatoryMap(neutral, np.zeros((7, 29)), length_gain=0.0)
    assert np.allclose(area_from_parameters(coordinate(PolarPoint(1, 0.3)), flat).areas, 3.0)


def get_marker_area(word, label):
    flow = compile_word(parse_word(word))
    frame = next(m.frame for m in flow.markers if m.label == label and m.role == 'C')
    return area_from_parameters(flow.frames[:, frame]), area_from_parameters(flow.frames[:, 0])


def test_closure_weights_vanish_on_the_surface():
    bare = ArticulatoryMap.from_bumps()
    for theta in np.linspace(0, 2 * np.pi, 7, endpoint=False):
        p = coordinate(PolarPoint(1.1, theta))
        assert np.allclose(area_from_parameters(p).areas, area_from_parameters(p, bare).areas)
    weights = closure_weights(SelectionVector.from_indices((1, 2, 6)), -2j)
    assert abs(np.sum(weights * DEFAULT_PSI_TABLE.psi)) < 1e-9
    assert np.sum(SelectionVector.from_indices((1, 2, 6)).mask * weights * DEFAULT_PSI_TABLE.psi) == pytest.approx(-2j)
    with pytest.raises(ConfigError):
        closure_weights(SelectionVector.neutral(), 1.0)


def test_labial_closure():
    closure, vowel = get_marker_area('ibi', 'b')
    assert closure.areas[-1] == pytest.approx(AREA_MIN)
    assert vowel.areas[-1] > 1.0
    assert formants(closure)[0][0] < 300


def test_alveolar_closure():
    closure, vowel = get_marker_area('ada', 'd')
    assert 20 <= np.argmin(closure.areas) <= 26
    assert closure.areas[23] < 0.1 * vowel.areas[23]
    assert closure.areas[-1] > 1.0
