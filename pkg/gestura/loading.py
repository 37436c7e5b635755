"""
JSON loaders for the coordination table, the phoneme inventory, the articulatory map and
exported syllable graphs.
"""
import json
from pathlib import Path
from typing import Any, Dict, Union

from gestura.acoustics import (LENGTH_GAIN, LIP_SECTIONS, NEUTRAL_AREA, NEUTRAL_LENGTH, NEUTRAL_SECTIONS,
                               ArticulatoryMap, ClosureSpec)
from gestura.coordination import DEFAULT_PSI_TABLE, PsiTable
from gestura.data_types import ARTICULATORS, AreaFunction, PolarPoint, SelectionVector
from gestura.errors import ConfigError, GesturaError
from gestura.inventory import (ConsonantSpec, FixedLocation, FrontBackLocation, LeaningLocation, LocationRule,
                               PhonemeInventory)
from gestura.syllable_graph import SyllableGraph


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path} is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    return data


def _point(data: Dict[str, Any]) -> PolarPoint:
    return PolarPoint(float(data['rho']), float(data['theta']))


def _location(data: Dict[str, Any]) -> LocationRule:
    kind = data.get('type', 'fixed')
    if kind == 'fixed':
        return FixedLocation(_point(data))
    if kind == 'front_back':
        cluster = data.get('cluster', 'front')
        if cluster not in ('front', 'back'):
            raise ConfigError(f"cluster place must be 'front' or 'back', got {cluster!r}")
        return FrontBackLocation(_point(data['back']), _point(data['front']), cluster)
    if kind == 'leaning':
        optional = {key: float(data[key]) for key in ('lean', 'max_offset') if key in data}
        return LeaningLocation(_point(data), **optional)
    raise ConfigError(f"unknown location type {kind!r}")


def psi_table_from_dict(data: Dict[str, Any]) -> PsiTable:
    try:
        return PsiTable(data['omega'], data['psi1'], data['psi2'], data.get('names', ARTICULATORS))
    except (KeyError, TypeError) as err:
        raise ConfigError(f"malformed psi table: missing or invalid {err}") from err


def inventory_from_dict(data: Dict[str, Any]) -> PhonemeInventory:
    try:
        vowels = {symbol: _point(point) for symbol, point in data['vowels'].items()}
        consonants = {symbol: ConsonantSpec(symbol, _location(spec['location']),
                                            SelectionVector.from_indices(spec['selection']))
                      for symbol, spec in data.get('consonants', {}).items()}
        clusters = {}
        for rule in data.get('clusters', []):
            pair = frozenset(rule['pair'])
            if len(pair) != 2:
                raise ConfigError(f"a cluster rule needs two distinct consonants, got {rule['pair']}")
            clusters[pair] = SelectionVector.from_indices(rule['selection'])
    except (KeyError, TypeError, AttributeError) as err:
        raise ConfigError(f"malformed inventory: missing or invalid {err}") from err
    except GesturaError:
        raise
    except ValueError as err:
        raise ConfigError(f"malformed inventory: {err}") from err
    return PhonemeInventory(vowels, consonants, clusters)


def _closure(data: Dict[str, Any]) -> ClosureSpec:
    return ClosureSpec(str(data['place']), float(data['center']), float(data['width']),
                       tuple(int(i) for i in data['selection']), float(data['gain']), float(data['direction']),
                       tuple(tuple(int(i) for i in s) for s in data.get('neutral', [])))


def articulatory_map_from_dict(data: Dict[str, Any], table: PsiTable = DEFAULT_PSI_TABLE) -> ArticulatoryMap:
    """
    Builds a map either from explicit profiles or from the compact list of Gaussian bumps.

    The compact form may add 'closures', each solved against the psi table.
    """
    try:
        length_gain = float(data.get('length_gain', LENGTH_GAIN))
        lip_sections = int(data.get('lip_sections', LIP_SECTIONS))
        if 'bumps' in data:
            bumps = [(str(a), float(c), float(w), float(h)) for a, c, w, h in data['bumps']]
            closures = [_closure(c) for c in data.get('closures', [])]
            amap = ArticulatoryMap.from_bumps(bumps, int(data.get('n_sections', NEUTRAL_SECTIONS)),
                                              float(data.get('length', NEUTRAL_LENGTH)),
                                              float(data.get('area', NEUTRAL_AREA)), length_gain, table,
                                              lip_sections, closures)
        else:
            neutral = AreaFunction(data['neutral']['lengths'], data['neutral']['areas'])
            amap = ArticulatoryMap(neutral, data['profiles'], length_gain, data.get('center', table.omega),
                                   lip_sections)
    except (KeyError, TypeError, ValueError) as err:
        if isinstance(err, GesturaError):
            raise ConfigError(f"malformed articulatory map: {err}") from err
        raise ConfigError(f"malformed articulatory map: missing or invalid {err}") from err
    return amap


def load_psi_table(path: Union[str, Path]) -> PsiTable:
    return psi_table_from_dict(read_json(path))


def load_inventory(path: Union[str, Path]) -> PhonemeInventory:
    return inventory_from_dict(read_json(path))


def load_articulatory_map(path: Union[str, Path], table: PsiTable = DEFAULT_PSI_TABLE) -> ArticulatoryMap:
    return articulatory_map_from_dict(read_json(path), table)


def load_syllable_graph(path: Union[str, Path]) -> SyllableGraph:
    return SyllableGraph.from_dict(read_json(path))
