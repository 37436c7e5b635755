from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from bitarray import frozenbitarray

from gestura.errors import ConsistencyError, DomainError
from gestura.utils import canonical_angle

ARTICULATORS = ('Jaw', 'Body', 'Dorsum', 'Tip', 'LipP', 'LipH', 'Hy')
N_ARTICULATORS = len(ARTICULATORS)

VOWEL_RADIUS = 1.0
CROWN_RADIUS = 1.2

AREA_MIN = 0.05
AREA_MAX = 15.0
MIN_SECTIONS = 8


class ExtendedEnum(Enum):

    @classmethod
    def list(cls):
        return list(map(lambda c: c.value, cls))


@unique
class NodeRole(ExtendedEnum):
    anchor_onset = 'Vo'
    vowel = 'V'
    consonant = 'C'
    anchor_coda = 'Ve'

    def __str__(self):
        return self.value


@unique
class Branch(ExtendedEnum):
    consonantal = 'consonantal'
    vocalic = 'vocalic'
    neutral = 'neutral'

    def __str__(self):
        return self.value


@unique
class ArcOrientation(ExtendedEnum):
    O1 = 'T1'
    O2 = 'T2'

    def __str__(self):
        return self.value


@unique
class SegmentKind(ExtendedEnum):
    superimposed = 'superimposed'
    vocalic = 'vocalic'
    hold = 'hold'
    pause = 'pause'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PolarPoint:
    """
    A point of the complex planning plane.

    Vowels live on the unit disc, consonants on the crown up to radius 1.2. The
    angle is canonicalized to [0, 2pi) on construction.
    """
    rho: float
    theta: float

    def __post_init__(self):
        if not np.isfinite(self.rho) or self.rho < 0:
            raise DomainError(f"radius must be a finite value >= 0, got {self.rho}")
        if not np.isfinite(self.theta):
            raise DomainError(f"angle must be finite, got {self.theta}")
        object.__setattr__(self, 'rho', float(self.rho))
        object.__setattr__(self, 'theta', canonical_angle(self.theta))

    @property
    def z(self) -> complex:
        return complex(self.rho * np.exp(1j * self.theta))

    def scaled(self, delta: float) -> PolarPoint:
        return PolarPoint(delta * self.rho, self.theta)

    def is_vowel_point(self) -> bool:
        return self.rho <= VOWEL_RADIUS

    def __str__(self):
        return f"({self.rho:.4g}, {self.theta:.4g})"


class SelectionVector(object):
    """
    Binary assignment of the 7 articulators to one branch of a superimposed segment.

    Written as the 1-based index set of its ones, e.g. {1,2,6} for /b/.
    """
    __slots__ = ('bits',)

    def __init__(self, bits: Iterable[bool]):
        bits = frozenbitarray(list(map(bool, bits)))
        if len(bits) != N_ARTICULATORS:
            raise DomainError(f"selection needs {N_ARTICULATORS} entries, got {len(bits)}")
        self.bits = bits

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> SelectionVector:
        indices = set(indices)
        unknown = [i for i in indices if not 1 <= i <= N_ARTICULATORS]
        if unknown:
            raise DomainError(f"selection indices must be in 1..{N_ARTICULATORS}, got {sorted(unknown)}")
        return cls(i in indices for i in range(1, N_ARTICULATORS + 1))

    @classmethod
    def neutral(cls) -> SelectionVector:
        return cls([True] * N_ARTICULATORS)

    @classmethod
    def empty(cls) -> SelectionVector:
        return cls([False] * N_ARTICULATORS)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i, bit in enumerate(self.bits) if bit)

    @property
    def mask(self) -> np.ndarray:
        return np.array(self.bits.tolist(), dtype=float)

    def complement(self) -> SelectionVector:
        return SelectionVector(~self.bits)

    def is_exclusive_with(self, other: SelectionVector) -> bool:
        return not (self.bits & other.bits).any() and (self.bits | other.bits).all()

    def __eq__(self, other) -> bool:
        return isinstance(other, SelectionVector) and self.bits == other.bits

    def __hash__(self):
        return hash(self.bits)

    def __str__(self) -> str:
        return '{' + ','.join(map(str, self.indices)) + '}'

    def __repr__(self) -> str:
        return f"SelectionVector({self})"


@dataclass(frozen=True)
class Marker:
    """
    Arrival of the plan at a graph node (or the edge of a pause), in frames.
    """
    frame: int
    label: str
    role: str
    segment: int
    period_ms: float

    @property
    def is_consonant(self) -> bool:
        return self.role == NodeRole.consonant.value

    def to_dict(self) -> dict:
        return {'frame': self.frame, 'label': self.label, 'role': self.role,
                'segment': self.segment, 'period_ms': self.period_ms}


@dataclass(frozen=True)
class SegmentSpan:
    kind: SegmentKind
    segment: int
    start: int
    stop: int

    def __len__(self):
        return self.stop - self.start


@dataclass
class ParameterFlow:
    """
    Articulatory parameters over time.

    frames is a 7 x N matrix, one column per frame of dt ms, rows ordered as
    ARTICULATORS.
    """
    frames: np.ndarray
    dt: float
    markers: List[Marker] = field(default_factory=list)
    spans: List[SegmentSpan] = field(default_factory=list)

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=float).reshape(N_ARTICULATORS, -1)
        if self.dt <= 0:
            raise DomainError(f"dt must be positive, got {self.dt}")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[1]

    @property
    def duration_ms(self) -> float:
        return self.n_frames * self.dt

    def row(self, articulator: str) -> np.ndarray:
        return self.frames[ARTICULATORS.index(articulator)]

    def consonant_markers(self) -> List[Marker]:
        return [m for m in self.markers if m.is_consonant]

    def spans_of(self, kind: SegmentKind) -> List[SegmentSpan]:
        return [s for s in self.spans if s.kind == kind]


@dataclass(frozen=True)
class AreaFunction:
    """
    Glottis-to-lips tube sections: lengths in cm, areas in cm^2.
    """
    lengths: np.ndarray
    areas: np.ndarray

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=float)
        areas = np.asarray(self.areas, dtype=float)
        if lengths.shape != areas.shape or lengths.ndim != 1:
            raise DomainError(f"lengths and areas must be 1d of equal size, got {lengths.shape} and {areas.shape}")
        if len(lengths) < MIN_SECTIONS:
            raise DomainError(f"an area function needs at least {MIN_SECTIONS} sections, got {len(lengths)}")
        if np.any(lengths <= 0):
            raise DomainError("section lengths must be positive")
        if np.any(areas < AREA_MIN - 1e-12) or np.any(areas > AREA_MAX + 1e-12):
            raise DomainError(f"section areas must lie in [{AREA_MIN}, {AREA_MAX}] cm^2")
        object.__setattr__(self, 'lengths', lengths)
        object.__setattr__(self, 'areas', areas)

    @classmethod
    def uniform(cls, length: float = 17.5, area: float = 3.0, n_sections: int = 29) -> AreaFunction:
        return cls(np.full(n_sections, length / n_sections), np.full(n_sections, area))

    @property
    def n_sections(self) -> int:
        return len(self.areas)

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())


@dataclass
class FormantTrack:
    """
    Per-frame F1..F4 in Hz with a validity flag; invalid frames hold NaN.
    """
    values: np.ndarray
    valid: np.ndarray
    dt: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1, 4)
        self.valid = np.asarray(self.valid, dtype=bool)
        if len(self.valid) != len(self.values):
            raise ConsistencyError(f"{len(self.values)} formant frames but {len(self.valid)} validity flags")

    @property
    def n_frames(self) -> int:
        return len(self.values)

    def formant(self, number: int) -> np.ndarray:
        return self.values[:, number - 1]


@dataclass
class EnvelopeCurve:
    gains: np.ndarray
    dt: float

    @property
    def n_frames(self) -> int:
        return len(self.gains)


@dataclass
class Waveform:
    samples: np.ndarray
    sample_rate: int

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate


def as_parameter_vector(p: Sequence[float]) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (N_ARTICULATORS,):
        raise DomainError(f"a parameter vector has {N_ARTICULATORS} entries, got shape {p.shape}")
    return p
