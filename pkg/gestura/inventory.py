from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from gestura.data_types import CROWN_RADIUS, PolarPoint, SelectionVector
from gestura.errors import ConfigError, InventoryError, UnsupportedStructureError
from gestura.utils import canonical_angle, is_front


class LocationRule(object):
    """
    Where a consonant sits in the planning plane, possibly depending on its vowel.
    """

    def resolve(self, vowel_theta: float, in_cluster: bool = False) -> PolarPoint:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FixedLocation(LocationRule):
    point: PolarPoint

    def resolve(self, vowel_theta: float, in_cluster: bool = False) -> PolarPoint:
        return self.point

    def to_dict(self) -> dict:
        return {'type': 'fixed', 'rho': self.point.rho, 'theta': self.point.theta}


@dataclass(frozen=True)
class FrontBackLocation(LocationRule):
    """
    One place for back vowels and another for front vowels, e.g. velar vs palatal /g/.

    Inside a cluster the consonant always takes the cluster_place location.
    """
    back: PolarPoint
    front: PolarPoint
    cluster_place: str = 'front'

    def resolve(self, vowel_theta: float, in_cluster: bool = False) -> PolarPoint:
        if in_cluster:
            return self.front if self.cluster_place == 'front' else self.back
        return self.front if is_front(vowel_theta) else self.back

    def to_dict(self) -> dict:
        return {'type': 'front_back',
                'back': {'rho': self.back.rho, 'theta': self.back.theta},
                'front': {'rho': self.front.rho, 'theta': self.front.theta},
                'cluster': self.cluster_place}


@dataclass(frozen=True)
class LeaningLocation(LocationRule):
    """
    A place that leans towards the vowel angle: theta = c + lean * (theta_V - c), kept within max_offset of c.
    """
    center: PolarPoint
    lean: float = 0.1
    max_offset: float = np.pi / 6

    def resolve(self, vowel_theta: float, in_cluster: bool = False) -> PolarPoint:
        offset = self.lean * (canonical_angle(vowel_theta) - self.center.theta)
        offset = float(np.clip(offset, -self.max_offset, self.max_offset))
        return PolarPoint(self.center.rho, self.center.theta + offset)

    def to_dict(self) -> dict:
        return {'type': 'leaning', 'rho': self.center.rho, 'theta': self.center.theta,
                'lean': self.lean, 'max_offset': self.max_offset}


@dataclass(frozen=True)
class ConsonantSpec:
    symbol: str
    location: LocationRule
    selection: SelectionVector


@dataclass
class PhonemeInventory:
    """
    Vowels, consonants and cluster selection rules known to the planner.

    Parameters
    ----------
    vowels: dict
        symbol -> PolarPoint on the unit disc
    consonants: dict
        symbol -> ConsonantSpec
    cluster_rules: dict
        unordered consonant pair (frozenset) -> SelectionVector of the cluster
    """
    vowels: Dict[str, PolarPoint]
    consonants: Dict[str, ConsonantSpec]
    cluster_rules: Dict[FrozenSet[str], SelectionVector] = field(default_factory=dict)

    def __post_init__(self):
        shared = set(self.vowels) & set(self.consonants)
        if shared:
            raise ConfigError(f"symbols declared both as vowel and consonant: {sorted(shared)}")
        for symbol in list(self.vowels) + list(self.consonants):
            if not symbol or any(ch.isspace() or ch == '.' for ch in symbol):
                raise ConfigError(f"invalid phoneme symbol {symbol!r}")
        for symbol, point in self.vowels.items():
            if not point.is_vowel_point():
                raise ConfigError(f"vowel {symbol!r} lies outside the unit disc: {point}")
        for pair in self.cluster_rules:
            unknown = [c for c in pair if c not in self.consonants]
            if unknown:
                raise ConfigError(f"cluster rule names unknown consonants {unknown}")

    @property
    def symbols(self) -> List[str]:
        """
        All symbols, longest first, the order used for greedy tokenization.
        """
        return sorted(list(self.vowels) + list(self.consonants), key=lambda s: (-len(s), s))

    def is_vowel(self, symbol: str) -> bool:
        return symbol in self.vowels

    def is_consonant(self, symbol: str) -> bool:
        return symbol in self.consonants

    def vowel(self, symbol: str) -> PolarPoint:
        if symbol not in self.vowels:
            raise InventoryError(f"unknown vowel {symbol!r}")
        return self.vowels[symbol]

    def consonant(self, symbol: str) -> ConsonantSpec:
        if symbol not in self.consonants:
            raise InventoryError(f"unknown consonant {symbol!r}")
        return self.consonants[symbol]

    def consonant_location(self, symbol: str, vowel_theta: float, in_cluster: bool = False) -> PolarPoint:
        location = self.consonant(symbol).location.resolve(vowel_theta, in_cluster)
        if location.rho > CROWN_RADIUS:
            raise ConfigError(f"consonant {symbol!r} resolves outside the crown: {location}")
        return location

    def has_cluster(self, first: str, second: str) -> bool:
        return frozenset((first, second)) in self.cluster_rules

    def cluster_selection(self, first: str, second: str) -> SelectionVector:
        pair = frozenset((first, second))
        if pair not in self.cluster_rules:
            raise UnsupportedStructureError(f"no cluster rule for /{first}{second}/")
        return self.cluster_rules[pair]

    def selection(self, consonants: Tuple[str, ...]) -> SelectionVector:
        """
        Consonant-branch selection of a chain of one or two consonants.
        """
        if len(consonants) == 1:
            return self.consonant(consonants[0]).selection
        if len(consonants) == 2:
            return self.cluster_selection(*consonants)
        raise UnsupportedStructureError(f"chains of {len(consonants)} consonants are not supported")

    def match(self, text: str, position: int = 0) -> Optional[str]:
        """
        Longest symbol starting at position, or None.
        """
        for symbol in self.symbols:
            if text.startswith(symbol, position):
                return symbol
        return None

    def split_symbols(self, text: str) -> Tuple[str, ...]:
        symbols = []
        position = 0
        while position < len(text):
            symbol = self.match(text, position)
            if symbol is None:
                raise InventoryError(f"unknown symbol {text[position]!r}", position)
            symbols.append(symbol)
            position += len(symbol)
        return tuple(symbols)

    def to_dict(self) -> dict:
        return {
            'vowels': {s: {'rho': p.rho, 'theta': p.theta} for s, p in self.vowels.items()},
            'consonants': {s: {'location': c.location.to_dict(), 'selection': list(c.selection.indices)}
                           for s, c in self.consonants.items()},
            'clusters': [{'pair': sorted(pair), 'selection': list(sel.indices)}
                         for pair, sel in self.cluster_rules.items()],
        }


VOWEL_ORDER = ('u', 'o', 'ɔ', 'a', 'ɛ', 'e', 'i')
SCHWA = 'ə'


def default_vowels() -> Dict[str, PolarPoint]:
    """
    Seven peripheral vowels spaced 2pi/9 apart from /u/ at pi/3, so /a/ lands on pi and /i/ on 5pi/3, plus schwa at the center.
    """
    vowels = {symbol: PolarPoint(1.0, np.pi / 3 + k * 2 * np.pi / 9) for k, symbol in enumerate(VOWEL_ORDER)}
    vowels['a'] = PolarPoint(1.0, np.pi)
    vowels['i'] = PolarPoint(1.0, 5 * np.pi / 3)
    vowels[SCHWA] = PolarPoint(0.0, 0.0)
    return vowels


def default_cluster_rules(consonants: Iterable[str]) -> Dict[FrozenSet[str], SelectionVector]:
    consonants = sorted(consonants)
    rules = {}
    for i, first in enumerate(consonants):
        for second in consonants[i + 1:]:
            labial = 'b' in (first, second)
            rules[frozenset((first, second))] = SelectionVector.from_indices((1, 2, 3, 6) if labial else (1, 2, 3, 4))
    return rules


def default_inventory() -> PhonemeInventory:
    consonants = {
        'b': ConsonantSpec('b', FixedLocation(PolarPoint(1.0, np.pi / 3)), SelectionVector.from_indices((1, 2, 6))),
        'd': ConsonantSpec('d', LeaningLocation(PolarPoint(1.2, 3 * np.pi / 2)),
                           SelectionVector.from_indices((1, 2, 3, 4))),
        'g': ConsonantSpec('g', FrontBackLocation(back=PolarPoint(1.2, np.pi / 3), front=PolarPoint(1.1, 23 * np.pi / 12)),
                           SelectionVector.from_indices((1, 2, 3, 4))),
    }
    return PhonemeInventory(default_vowels(), consonants, default_cluster_rules(consonants))
