"""
Syllable graphs: nodes are planning-plane locations with a role, arcs carry timing,
orientation and the selection of articulators that follow them.

A superimposed segment is a chain of consonantal arcs V_o -> C1 [-> C2] -> V (or
V -> C1 [-> C2] -> V_e for a coda) that runs concurrently with one vocalic arc
between the same two anchors. The chain takes one period per arc; the vocalic arc
takes as many periods as the chain.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from gestura.data_types import ArcOrientation, Branch, NodeRole, PolarPoint, SegmentKind, SelectionVector
from gestura.errors import ConfigError, DomainError, GesturaError, InventoryError, UnsupportedStructureError
from gestura.inventory import PhonemeInventory, default_inventory
from gestura.trajectory import CONSONANT_SHAPE_K, DEFAULT_NU, VOWEL_SHAPE_K, ArcSpec

HOLD = 'T'
PAUSE = 'Tp'
MAX_CHAIN_CONSONANTS = 2


@dataclass(frozen=True)
class WordOptions:
    """
    Planning options shared by every syllable of a word.

    Parameters
    ----------
    period_ms: float
        the period T
    pause_ms: float
        duration T_p of a pause between words
    delta_onset, delta_coda: float
        radial scaling of the onset / coda anchor vowels, in (0, 1]
    coda_hold_ms: float
        stationary vowel duration between the two segments of a CVC syllable
    nu, vowel_K, consonant_K:
        arc shape parameters
    periods: tuple of float, optional
        per-syllable override of period_ms
    """
    period_ms: float = 100.0
    pause_ms: float = 150.0
    delta_onset: float = 0.7
    delta_coda: float = 0.7
    coda_hold_ms: float = 0.0
    nu: int = DEFAULT_NU
    vowel_K: float = VOWEL_SHAPE_K
    consonant_K: float = CONSONANT_SHAPE_K
    periods: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        for name in ('period_ms', 'pause_ms', 'coda_hold_ms', 'vowel_K', 'consonant_K'):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite, got {getattr(self, name)}")
        if not self.period_ms > 0:
            raise DomainError(f"the period T must be positive, got {self.period_ms}")
        if self.pause_ms < 0:
            raise DomainError(f"the pause duration must be >= 0, got {self.pause_ms}")
        if self.coda_hold_ms < 0:
            raise DomainError(f"the coda hold must be >= 0, got {self.coda_hold_ms}")
        check_deltas((self.delta_onset, self.delta_coda))
        if self.periods is not None:
            object.__setattr__(self, 'periods', tuple(float(p) for p in self.periods))
            if any(not 0 < p < np.inf for p in self.periods):
                raise DomainError(f"per-syllable periods must be positive and finite, got {self.periods}")

    @property
    def deltas(self) -> Tuple[float, float]:
        return self.delta_onset, self.delta_coda

    def period_of(self, syllable: int) -> float:
        if self.periods is None:
            return self.period_ms
        if syllable >= len(self.periods):
            raise DomainError(f"no period given for syllable {syllable + 1} ({len(self.periods)} periods)")
        return self.periods[syllable]


def check_deltas(deltas: Sequence[float]):
    for delta in deltas:
        if not 0 < delta <= 1:
            raise DomainError(f"anchor deltas must lie in (0, 1], got {delta}")


@dataclass(frozen=True)
class GraphNode:
    id: int
    role: NodeRole
    location: PolarPoint
    symbol: str
    syllable: int


@dataclass(frozen=True)
class GraphArc:
    """
    One arc of a syllable graph.

    timing is the label of the arc: T1 / T2 for consonantal chain arcs, nT2 for
    vocalic and diphthong arcs, T for a stationary vowel and Tp for a pause.
    order is the position of the arc in its segment; the vocalic arc of a
    superimposed segment comes after its chain.
    """
    source: int
    target: int
    timing: str
    n_periods: int
    orientation: ArcOrientation
    duration_ms: float
    selection: SelectionVector
    branch: Branch
    segment: int
    order: int
    nu: int = DEFAULT_NU
    K: float = VOWEL_SHAPE_K

    @property
    def period_ms(self) -> float:
        return self.duration_ms / self.n_periods

    @property
    def is_stationary(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class Syllable:
    onset: Tuple[str, ...]
    nucleus: Tuple[str, ...]
    coda: Tuple[str, ...]
    period_ms: float
    delta_onset: float
    delta_coda: float

    @property
    def text(self) -> str:
        return ''.join(self.onset + self.nucleus + self.coda)

    @property
    def shape(self) -> str:
        return 'C' * len(self.onset) + 'V' * len(self.nucleus) + 'C' * len(self.coda)


@dataclass(frozen=True)
class Junction:
    """
    Boundary between syllable `left` and the next one.

    case is one of xV.Cx, xC.Cx, xC.Vx, xV.Vx (concatenation) or pause; node is the
    shared node, or the node the pause or hiatus arc starts from.
    """
    left: int
    case: str
    node: int
    pause_ms: float = 0.0


@dataclass(frozen=True)
class Segment:
    index: int
    kind: SegmentKind
    chain: Tuple[GraphArc, ...]
    vocalic: GraphArc

    @property
    def duration_ms(self) -> float:
        return self.vocalic.duration_ms

    @property
    def arcs(self) -> Tuple[GraphArc, ...]:
        return self.chain + (self.vocalic,)


class SyllableGraph(object):
    """
    A syllable or a word: a networkx MultiDiGraph plus the bookkeeping needed to join words.

    Node data lives under the 'node' attribute (GraphNode), arc data under 'arc'
    (GraphArc). The graph is never mutated after construction; every operation
    returns a new SyllableGraph.
    """

    def __init__(self, graph: nx.MultiDiGraph, syllables: Sequence[Syllable],
                 junctions: Sequence[Junction] = (), first_node: Optional[int] = None,
                 last_node: Optional[int] = None):
        self.graph = graph
        self.syllables = tuple(syllables)
        self.junctions = tuple(junctions)
        self.first_node = first_node
        self.last_node = last_node

    @classmethod
    def empty(cls) -> SyllableGraph:
        return cls(nx.MultiDiGraph(), ())

    @property
    def is_empty(self) -> bool:
        return self.graph.number_of_nodes() == 0

    @property
    def nodes(self) -> List[GraphNode]:
        return [replace(data['node'], id=key) for key, data in sorted(self.graph.nodes(data=True))]

    def node(self, node_id: int) -> GraphNode:
        return replace(self.graph.nodes[node_id]['node'], id=node_id)

    @property
    def arcs(self) -> List[GraphArc]:
        arcs = [replace(data['arc'], source=u, target=v) for u, v, data in self.graph.edges(data=True)]
        return sorted(arcs, key=lambda arc: (arc.segment, arc.order))

    @property
    def n_nodes(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def n_arcs(self) -> int:
        return self.graph.number_of_edges()

    @property
    def n_segments(self) -> int:
        return 1 + max((arc.segment for arc in self.arcs), default=-1)

    @property
    def deltas(self) -> Tuple[Tuple[float, float], ...]:
        return tuple((s.delta_onset, s.delta_coda) for s in self.syllables)

    @property
    def starts_with_consonant(self) -> bool:
        return self.node(self.first_node).role == NodeRole.anchor_onset

    @property
    def ends_with_consonant(self) -> bool:
        return self.node(self.last_node).role == NodeRole.anchor_coda

    def segments(self) -> List[Segment]:
        segments = []
        for index, arcs in itertools.groupby(self.arcs, key=lambda arc: arc.segment):
            arcs = list(arcs)
            chain = tuple(arc for arc in arcs if arc.branch == Branch.consonantal)
            rest = [arc for arc in arcs if arc.branch != Branch.consonantal]
            if len(rest) != 1:
                raise UnsupportedStructureError(f"segment {index} has {len(rest)} non-consonantal arcs")
            vocalic = rest[0]
            if chain:
                kind = SegmentKind.superimposed
            elif vocalic.timing == PAUSE:
                kind = SegmentKind.pause
            elif vocalic.is_stationary:
                kind = SegmentKind.hold
            else:
                kind = SegmentKind.vocalic
            segments.append(Segment(index, kind, chain, vocalic))
        return segments

    @property
    def duration_ms(self) -> float:
        return float(sum(segment.duration_ms for segment in self.segments()))

    @property
    def transcription(self) -> str:
        if not self.syllables:
            return ''
        pieces = [self.syllables[0].text]
        pauses = {j.left for j in self.junctions if j.case == 'pause'}
        for index, syllable in enumerate(self.syllables[1:]):
            pieces.append(' ' if index in pauses else '.')
            pieces.append(syllable.text)
        return ''.join(pieces)

    def arc_spec(self, arc: GraphArc) -> ArcSpec:
        return ArcSpec(self.node(arc.source).location, self.node(arc.target).location,
                       arc.orientation, arc.n_periods, arc.period_ms, arc.nu, arc.K)

    def with_syllables(self, syllables: Sequence[Syllable], junctions: Optional[Sequence[Junction]] = None,
                       graph: Optional[nx.MultiDiGraph] = None) -> SyllableGraph:
        return SyllableGraph(self.graph.copy() if graph is None else graph, syllables,
                             self.junctions if junctions is None else junctions, self.first_node, self.last_node)

    def to_dict(self, dt: Optional[float] = None) -> dict:
        arcs = []
        for arc in self.arcs:
            entry = {'source': arc.source, 'target': arc.target, 'timing': arc.timing,
                     'n_periods': arc.n_periods, 'orientation': str(arc.orientation),
                     'duration_ms': arc.duration_ms, 'selection': list(arc.selection.indices),
                     'branch': str(arc.branch), 'segment': arc.segment, 'order': arc.order,
                     'nu': arc.nu, 'K': arc.K}
            if dt is not None:
                entry['frames'] = int(round(arc.duration_ms / dt))
            arcs.append(entry)
        return {
            'transcription': self.transcription,
            'duration_ms': self.duration_ms,
            'nodes': [{'id': n.id, 'role': str(n.role), 'symbol': n.symbol, 'syllable': n.syllable,
                       'rho': n.location.rho, 'theta': n.location.theta} for n in self.nodes],
            'arcs': arcs,
            'first_node': self.first_node,
            'last_node': self.last_node,
            'syllables': [{'text': s.text, 'shape': s.shape, 'onset': list(s.onset), 'nucleus': list(s.nucleus),
                           'coda': list(s.coda), 'period_ms': s.period_ms,
                           'delta_onset': s.delta_onset, 'delta_coda': s.delta_coda} for s in self.syllables],
            'junctions': [{'left': j.left, 'case': j.case, 'node': j.node, 'pause_ms': j.pause_ms}
                          for j in self.junctions],
        }

    def to_json(self, dt: Optional[float] = None) -> str:
        return json.dumps(self.to_dict(dt), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> SyllableGraph:
        """
        Rebuilds a graph written by to_dict. Derived entries (transcription, durations, frames) are ignored.
        """
        try:
            graph = nx.MultiDiGraph()
            for node in data['nodes']:
                key = int(node['id'])
                graph.add_node(key, node=GraphNode(key, NodeRole(node['role']),
                                                   PolarPoint(float(node['rho']), float(node['theta'])),
                                                   str(node['symbol']), int(node['syllable'])))
            for arc in data['arcs']:
                source, target = int(arc['source']), int(arc['target'])
                if source not in graph or target not in graph:
                    raise ConfigError(f"arc {source} -> {target} joins unknown nodes")
                graph.add_edge(source, target, arc=GraphArc(
                    source, target, str(arc['timing']), int(arc['n_periods']), ArcOrientation(arc['orientation']),
                    float(arc['duration_ms']), SelectionVector.from_indices(arc['selection']), Branch(arc['branch']),
                    int(arc['segment']), int(arc['order']), int(arc['nu']), float(arc['K'])))
            syllables = [Syllable(tuple(s['onset']), tuple(s['nucleus']), tuple(s['coda']), float(s['period_ms']),
                                  float(s['delta_onset']), float(s['delta_coda'])) for s in data['syllables']]
            junctions = [Junction(int(j['left']), str(j['case']), int(j['node']), float(j.get('pause_ms', 0.0)))
                         for j in data.get('junctions', [])]
            first_node, last_node = int(data['first_node']), int(data['last_node'])
        except GesturaError:
            raise
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"malformed syllable graph: missing or invalid {err}") from err
        for s, text in zip(syllables, data['syllables']):
            if 'shape' in text and text['shape'] != s.shape:
                raise ConfigError(f"syllable /{s.text}/ has shape {s.shape}, the file says {text['shape']}")
        if first_node not in graph or last_node not in graph:
            raise ConfigError(f"first or last node ({first_node}, {last_node}) is not in the graph")
        return cls(graph, syllables, junctions, first_node, last_node)

    @classmethod
    def from_json(cls, text: str) -> SyllableGraph:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"syllable graph is not valid JSON: {err}") from err
        if not isinstance(data, dict):
            raise ConfigError("a syllable graph must be a JSON object")
        return cls.from_dict(data)

    def __repr__(self):
        return f"SyllableGraph('{self.transcription}', nodes={self.n_nodes}, arcs={self.n_arcs})"


def _as_symbols(value: Union[str, Sequence[str]], inventory: PhonemeInventory) -> Tuple[str, ...]:
    if isinstance(value, str):
        return inventory.split_symbols(value)
    return tuple(value)


def add_superimposed(graph: nx.MultiDiGraph, path: Sequence[int], selection: SelectionVector,
                     segment: int, period_ms: float, options: WordOptions):
    """
    Adds the consonantal chain along path and the vocalic arc between its two ends.
    """
    n = len(path) - 1
    for k, (u, v) in enumerate(zip(path[:-1], path[1:])):
        orientation = ArcOrientation.O1 if k == 0 else ArcOrientation.O2
        graph.add_edge(u, v, arc=GraphArc(u, v, str(orientation), 1, orientation, period_ms, selection,
                                          Branch.consonantal, segment, k, options.nu, options.consonant_K))
    graph.add_edge(path[0], path[-1], arc=GraphArc(path[0], path[-1], f'{n}T2', n, ArcOrientation.O2, n * period_ms,
                                                   selection.complement(), Branch.vocalic, segment, n,
                                                   options.nu, options.vowel_K))


def neutral_arc(source: int, target: int, timing: str, n_periods: int, duration_ms: float,
                segment: int, options: WordOptions) -> GraphArc:
    return GraphArc(source, target, timing, n_periods, ArcOrientation.O2, duration_ms, SelectionVector.neutral(),
                    Branch.neutral, segment, 0, options.nu, options.vowel_K)


def build_syllable(onset: Union[str, Sequence[str]], vowel: Union[str, Sequence[str]],
                   coda: Union[str, Sequence[str]], deltas: Optional[Tuple[float, float]] = None,
                   inventory: Optional[PhonemeInventory] = None, options: Optional[WordOptions] = None,
                   period_ms: Optional[float] = None) -> SyllableGraph:
    """
    Builds the graph of one syllable.

    Parameters
    ----------
    onset, coda: str or sequence of str
        up to two consonants each; a string is split into inventory symbols
    vowel: str or sequence of str
        the nucleus; a string is one vowel symbol, a sequence of two or more vowels
        is a diphthong
    deltas: (float, float), optional
        (delta_onset, delta_coda), defaults to the options
    inventory: PhonemeInventory, optional
    options: WordOptions, optional
    period_ms: float, optional
        the period T of this syllable, defaults to options.period_ms

    Returns
    -------
    SyllableGraph
    """
    inventory = default_inventory() if inventory is None else inventory
    options = WordOptions() if options is None else options
    delta_onset, delta_coda = options.deltas if deltas is None else deltas
    check_deltas((delta_onset, delta_coda))
    period = options.period_ms if period_ms is None else period_ms
    if not period > 0:
        raise DomainError(f"the period T must be positive, got {period}")

    onset = _as_symbols(onset, inventory)
    coda = _as_symbols(coda, inventory)
    nucleus = (vowel,) if isinstance(vowel, str) else tuple(vowel)
    if not nucleus or not all(nucleus):
        raise InventoryError("a syllable needs a vowel")
    for part, name in ((onset, 'onset'), (coda, 'coda')):
        if len(part) > MAX_CHAIN_CONSONANTS:
            raise UnsupportedStructureError(f"{name} /{''.join(part)}/ has more than {MAX_CHAIN_CONSONANTS} consonants")
    vowels = [inventory.vowel(symbol) for symbol in nucleus]
    onset_selection = inventory.selection(onset) if onset else None
    coda_selection = inventory.selection(coda) if coda else None

    graph = nx.MultiDiGraph()
    ids = itertools.count()

    def add_node(role: NodeRole, location: PolarPoint, symbol: str) -> int:
        node_id = next(ids)
        graph.add_node(node_id, node=GraphNode(node_id, role, location, symbol, 0))
        return node_id

    segment = 0
    if onset:
        first = add_node(NodeRole.anchor_onset, vowels[0].scaled(delta_onset), nucleus[0])
        chain = [add_node(NodeRole.consonant, inventory.consonant_location(c, vowels[0].theta, len(onset) > 1), c)
                 for c in onset]
        vowel_ids = [add_node(NodeRole.vowel, vowels[0], nucleus[0])]
        add_superimposed(graph, [first] + chain + vowel_ids, onset_selection, segment, period, options)
        segment += 1
    else:
        vowel_ids = [add_node(NodeRole.vowel, vowels[0], nucleus[0])]
        first = vowel_ids[0]

    for symbol, location in zip(nucleus[1:], vowels[1:]):
        vowel_ids.append(add_node(NodeRole.vowel, location, symbol))
        graph.add_edge(vowel_ids[-2], vowel_ids[-1],
                       arc=neutral_arc(vowel_ids[-2], vowel_ids[-1], '2T2', 2, 2 * period, segment, options))
        segment += 1

    hold = options.coda_hold_ms if onset and coda else period
    graph.add_edge(vowel_ids[-1], vowel_ids[-1],
                   arc=neutral_arc(vowel_ids[-1], vowel_ids[-1], HOLD, 1, hold, segment, options))
    segment += 1

    last = vowel_ids[-1]
    if coda:
        chain = [add_node(NodeRole.consonant, inventory.consonant_location(c, vowels[-1].theta, len(coda) > 1), c)
                 for c in coda]
        last = add_node(NodeRole.anchor_coda, vowels[-1].scaled(delta_coda), nucleus[-1])
        add_superimposed(graph, [vowel_ids[-1]] + chain + [last], coda_selection, segment, period, options)

    syllable = Syllable(onset, nucleus, coda, period, delta_onset, delta_coda)
    return SyllableGraph(graph, [syllable], (), first, last)


def _shifted(graph: nx.MultiDiGraph, node_offset: int, segment_offset: int, syllable_offset: int) -> nx.MultiDiGraph:
    shifted = nx.relabel_nodes(graph, {n: n + node_offset for n in graph.nodes}, copy=True)
    for key, data in shifted.nodes(data=True):
        data['node'] = replace(data['node'], id=key, syllable=data['node'].syllable + syllable_offset)
    for u, v, data in shifted.edges(data=True):
        data['arc'] = replace(data['arc'], source=u, target=v, segment=data['arc'].segment + segment_offset)
    return shifted


def _union(left: SyllableGraph, right: SyllableGraph, gap_segments: int):
    node_offset = 1 + max(left.graph.nodes)
    right_graph = _shifted(right.graph, node_offset, left.n_segments + gap_segments, len(left.syllables))
    junctions = [replace(j, left=j.left + len(left.syllables), node=j.node + node_offset) for j in right.junctions]
    return nx.compose(left.graph, right_graph), node_offset, junctions


def junction_case(left: SyllableGraph, right: SyllableGraph) -> str:
    left_side = 'C' if left.ends_with_consonant else 'V'
    right_side = 'C' if right.starts_with_consonant else 'V'
    return f'x{left_side}.{right_side}x'


def _options_of(graph: SyllableGraph) -> WordOptions:
    reference = [arc for arc in graph.arcs if arc.branch != Branch.consonantal][-1]
    return WordOptions(nu=reference.nu, vowel_K=reference.K)


def concatenate(left: SyllableGraph, right: SyllableGraph, options: Optional[WordOptions] = None) -> SyllableGraph:
    """
    Joins two graphs without a pause ('.' operator).

    xV.Cx shares the left vowel with the right onset anchor, xC.Cx shares the left
    coda anchor with the right onset anchor, xC.Vx shares the left coda anchor with
    the right vowel. Two vowels meeting (xV.Vx) are linked by a diphthong arc.
    """
    if left.is_empty:
        return right
    if right.is_empty:
        return left
    case = junction_case(left, right)
    graph, offset, right_junctions = _union(left, right, int(case == 'xV.Vx'))
    right_first = right.first_node + offset

    if case in ('xV.Cx', 'xC.Cx'):
        graph = nx.contracted_nodes(graph, left.last_node, right_first, self_loops=True, copy=True)
        shared = left.last_node
    elif case == 'xC.Vx':
        graph = nx.contracted_nodes(graph, right_first, left.last_node, self_loops=True, copy=True)
        shared = right_first
    else:
        options = _options_of(left) if options is None else options
        period = right.syllables[0].period_ms
        graph.add_edge(left.last_node, right_first,
                       arc=neutral_arc(left.last_node, right_first, '2T2', 2, 2 * period, left.n_segments, options))
        shared = left.last_node

    junctions = list(left.junctions) + [Junction(len(left.syllables) - 1, case, shared)] + right_junctions
    return SyllableGraph(graph, left.syllables + right.syllables, junctions, left.first_node,
                         right.last_node + offset)


def insert_pause(left: SyllableGraph, right: SyllableGraph, pause_ms: float,
                 options: Optional[WordOptions] = None) -> SyllableGraph:
    """
    Joins two graphs with a neutral arc of pause_ms from the left's last node to the right's first node.

    A zero pause is a plain concatenation.
    """
    if pause_ms < 0:
        raise DomainError(f"the pause duration must be >= 0, got {pause_ms}")
    if pause_ms == 0 or left.is_empty or right.is_empty:
        return concatenate(left, right, options)
    options = _options_of(left) if options is None else options
    graph, offset, right_junctions = _union(left, right, 1)
    right_first = right.first_node + offset
    graph.add_edge(left.last_node, right_first,
                   arc=neutral_arc(left.last_node, right_first, PAUSE, 1, pause_ms, left.n_segments, options))
    junctions = (list(left.junctions) + [Junction(len(left.syllables) - 1, 'pause', left.last_node, pause_ms)]
                 + right_junctions)
    return SyllableGraph(graph, left.syllables + right.syllables, junctions, left.first_node,
                         right.last_node + offset)
