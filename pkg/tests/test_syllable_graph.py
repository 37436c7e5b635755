import json

import numpy as np
import pytest

from gestura.data_types import Branch, NodeRole, PolarPoint, SegmentKind, SelectionVector
from gestura.errors import ConfigError, DomainError, InventoryError, UnsupportedStructureError
from gestura.flow import compile_word
from gestura.inventory import FrontBackLocation, default_inventory
from gestura.parsing import parse_word
from gestura.syllable_graph import SyllableGraph, WordOptions, build_syllable, concatenate, insert_pause


def get_timings(graph):
    return [arc.timing for arc in graph.arcs]


def roles(graph):
    return sorted(str(node.role) for node in graph.nodes)


def test_default_inventory():
    inventory = default_inventory()
    assert inventory.vowel('a') == PolarPoint(1, np.pi)
    assert inventory.vowel('i') == PolarPoint(1, 5 * np.pi / 3)
    assert inventory.vowel('u').theta == pytest.approx(np.pi / 3)
    assert inventory.vowel('ə').rho == 0
    assert len(inventory.vowels) == 8
    assert inventory.consonant('b').selection == SelectionVector.from_indices((1, 2, 6))
    assert inventory.cluster_selection('g', 'b') == SelectionVector.from_indices((1, 2, 3, 6))
    assert inventory.cluster_selection('d', 'g') == SelectionVector.from_indices((1, 2, 3, 4))


def test_g_front_back():
    inventory = default_inventory()
    assert isinstance(inventory.consonant('g').location, FrontBackLocation)
    assert inventory.consonant_location('g', inventory.vowel('u').theta) == PolarPoint(1.2, np.pi / 3)
    assert inventory.consonant_location('g', inventory.vowel('i').theta) == PolarPoint(1.1, 23 * np.pi / 12)
    assert inventory.consonant_location('g', inventory.vowel('a').theta, in_cluster=True) == \
        PolarPoint(1.1, 23 * np.pi / 12)


def test_d_leans_towards_vowel():
    inventory = default_inventory()
    near_i = inventory.consonant_location('d', inventory.vowel('i').theta)
    near_a = inventory.consonant_location('d', inventory.vowel('a').theta)
    assert near_i.rho == near_a.rho == 1.2
    assert near_i.theta > 3 * np.pi / 2 > near_a.theta
    assert abs(near_a.theta - 3 * np.pi / 2) <= np.pi / 6 + 1e-12


def test_selection_vector():
    selection = SelectionVector.from_indices((1, 2, 6))
    assert str(selection) == '{1,2,6}'
    assert selection.complement().indices == (3, 4, 5, 7)
    assert selection.is_exclusive_with(selection.complement())
    assert not selection.is_exclusive_with(SelectionVector.neutral())
    assert np.all(selection.mask == np.array([1, 1, 0, 0, 0, 1, 0]))
    with pytest.raises(DomainError):
        SelectionVector.from_indices((0, 8))


def test_cv_structure():
    graph = build_syllable('b', 'i', '')
    assert graph.n_nodes == 3
    assert graph.n_arcs == 4
    assert roles(graph) == ['C', 'V', 'Vo']
    assert get_timings(graph) == ['T1', 'T2', '2T2', 'T']
    consonant = SelectionVector.from_indices((1, 2, 6))
    assert [arc.selection for arc in graph.arcs] == [consonant, consonant, consonant.complement(),
                                                     SelectionVector.neutral()]
    assert [arc.branch for arc in graph.arcs] == [Branch.consonantal, Branch.consonantal, Branch.vocalic,
                                                  Branch.neutral]
    assert graph.duration_ms == 300


def test_cvc_structure():
    graph = build_syllable('b', 'i', 'g')
    assert graph.n_nodes == 5
    assert roles(graph) == ['C', 'C', 'V', 'Ve', 'Vo']
    assert [s.kind for s in graph.segments()] == [SegmentKind.superimposed, SegmentKind.hold,
                                                  SegmentKind.superimposed]
    assert graph.duration_ms == 400


def test_ccv_structure():
    graph = build_syllable('gb', 'i', '')
    assert graph.n_nodes == 4
    assert graph.n_arcs == 5
    assert get_timings(graph) == ['T1', 'T2', 'T2', '3T2', 'T']
    assert graph.arcs[0].selection == SelectionVector.from_indices((1, 2, 3, 6))
    g_node = next(n for n in graph.nodes if n.symbol == 'g')
    assert g_node.location == PolarPoint(1.1, 23 * np.pi / 12)


def test_anchor_scaling():
    graph = build_syllable('b', 'a', 'd', deltas=(0.5, 0.7))
    anchors = {node.role: node.location for node in graph.nodes if node.role != NodeRole.consonant}
    assert anchors[NodeRole.anchor_onset] == PolarPoint(0.5, np.pi)
    assert anchors[NodeRole.anchor_coda] == PolarPoint(0.7, np.pi)
    with pytest.raises(DomainError):
        build_syllable('b', 'a', '', deltas=(0.0, 1.0))


def test_exclusive_segments():
    for onset, vowel, coda in (('b', 'i', ''), ('gb', 'a', ''), ('d', 'u', 'g'), ('', 'o', 'bg')):
        for segment in build_syllable(onset, vowel, coda).segments():
            if segment.kind == SegmentKind.superimposed:
                assert all(arc.selection.is_exclusive_with(segment.vocalic.selection) for arc in segment.chain)
                assert sum(arc.duration_ms for arc in segment.chain) == segment.vocalic.duration_ms


def test_build_errors():
    with pytest.raises(InventoryError):
        build_syllable('b', 'y', '')
    with pytest.raises(InventoryError):
        build_syllable('q', 'a', '')
    with pytest.raises(UnsupportedStructureError):
        build_syllable('bdg', 'a', '')


def test_concatenate_cases():
    options = WordOptions(delta_onset=1.0, delta_coda=1.0)
    bi, gbi = build_syllable('b', 'i', '', options=options), build_syllable('gb', 'i', '', options=options)
    word = concatenate(bi, gbi)
    assert word.junctions[0].case == 'xV.Cx'
    assert word.n_nodes == 3 + 4 - 1
    assert word.duration_ms == bi.duration_ms + gbi.duration_ms

    big = build_syllable('b', 'i', 'g', options=options)
    word = concatenate(big, bi)
    assert word.junctions[0].case == 'xC.Cx'
    assert word.n_nodes == 5 + 3 - 1

    ib, i = build_syllable('', 'i', 'b'), build_syllable('', 'i', '')
    word = concatenate(ib, i)
    assert word.junctions[0].case == 'xC.Vx'
    assert word.n_nodes == 3
    assert word.node(word.junctions[0].node).role == NodeRole.vowel


def test_hiatus_adds_diphthong():
    word = concatenate(build_syllable('', 'i', ''), build_syllable('', 'a', ''))
    assert word.junctions[0].case == 'xV.Vx'
    assert '2T2' in get_timings(word)
    assert word.duration_ms == 100 + 200 + 100


def test_insert_pause():
    bi, ba = build_syllable('b', 'i', ''), build_syllable('b', 'a', '')
    word = insert_pause(bi, ba, 150.0)
    pause = next(arc for arc in word.arcs if arc.timing == 'Tp')
    assert pause.duration_ms == 150.0
    assert word.node(pause.source).location == PolarPoint(1, 5 * np.pi / 3)
    assert word.node(pause.target).location == PolarPoint(0.7, np.pi)
    assert word.duration_ms == 750.0
    assert word.transcription == 'bi ba'

    plain = concatenate(bi, ba)
    zero = insert_pause(bi, ba, 0.0)
    assert zero.n_nodes == plain.n_nodes
    assert [(a.source, a.target, a.timing) for a in zero.arcs] == [(a.source, a.target, a.timing) for a in plain.arcs]
    with pytest.raises(DomainError):
        insert_pause(bi, ba, -1.0)


def test_graph_json():
    graph = build_syllable('b', 'i', '')
    data = json.loads(graph.to_json(dt=1.0))
    assert len(data['nodes']) == 3
    assert [arc['frames'] for arc in data['arcs']] == [100, 100, 200, 100]
    assert data['arcs'][0]['selection'] == [1, 2, 6]
    assert data['syllables'][0]['shape'] == 'CV'
    assert (data['first_node'], data['last_node']) == (graph.first_node, graph.last_node)


def test_graph_import():
    for text in ('ibia', 'big.bi', 'gbabu', 'bi ba', 'ia'):
        graph = parse_word(text)
        imported = SyllableGraph.from_json(graph.to_json(dt=1.0))
        assert imported.transcription == graph.transcription
        assert [s.shape for s in imported.syllables] == [s.shape for s in graph.syllables]
        assert imported.junctions == graph.junctions
        first, second = compile_word(graph), compile_word(imported)
        assert np.array_equal(first.frames, second.frames)
        assert first.markers == second.markers


def test_graph_import_errors():
    data = build_syllable('b', 'i', '').to_dict()
    with pytest.raises(ConfigError):
        SyllableGraph.from_json('[1, 2]')
    with pytest.raises(ConfigError):
        SyllableGraph.from_dict({key: value for key, value in data.items() if key != 'arcs'})
    with pytest.raises(ConfigError):
        SyllableGraph.from_dict(dict(data, syllables=[dict(data['syllables'][0], shape='CVC')]))
    with pytest.raises(ConfigError):
        SyllableGraph.from_dict(dict(data, last_node=99))


def test_word_options_reject_non_finite():
    for field in ('period_ms', 'pause_ms', 'coda_hold_ms', 'vowel_K'):
        for value in (np.nan, np.inf):
            with pytest.raises(DomainError):
                WordOptions(**{field: value})
    with pytest.raises(DomainError):
        WordOptions(delta_onset=np.nan)
    with pytest.raises(DomainError):
        WordOptions(periods=(100.0, np.inf))
