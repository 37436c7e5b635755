import numpy as np
import pytest

from gestura.data_types import SelectionVector
from gestura.errors import NotApplicableError
from gestura.flow import compile_word
from gestura.parsing import parse_word
from gestura.syllable_graph import WordOptions
from gestura.transformations import find_rewrite, fuse_cluster, resyllabify_vc_chain

UNIT = WordOptions(delta_onset=1.0, delta_coda=1.0, pause_ms=0.0)


def get_graph(text, options=UNIT):
    return parse_word(text, options=options)


def junction_duration(graph):
    chains = [segment for segment in graph.segments() if segment.chain][1:]
    return sum(arc.duration_ms for segment in chains for arc in segment.chain)


def test_fuse_big_bi():
    graph = get_graph('big.bi')
    fused = fuse_cluster(graph, 0)
    assert fused.transcription == 'bi.gbi'
    assert fused.duration_ms == graph.duration_ms - 100.0
    assert fused.n_nodes == graph.n_nodes - 1
    assert junction_duration(graph) == 400.0
    assert junction_duration(fused) == 300.0
    chains = [s for s in fused.segments() if s.chain]
    assert [len(s.chain) for s in chains] == [2, 3]
    assert chains[1].chain[0].selection == SelectionVector.from_indices((1, 2, 3, 6))
    assert chains[1].vocalic.timing == '3T2'


def test_fused_graph_compiles():
    fused = fuse_cluster(get_graph('big.bi'), 0)
    flow = compile_word(fused)
    assert flow.n_frames == 600
    assert [m.label for m in flow.consonant_markers()] == ['b', 'g', 'b']


def test_fuse_preconditions():
    with pytest.raises(NotApplicableError):
        fuse_cluster(get_graph('big.bi', WordOptions()), 0)
    with pytest.raises(NotApplicableError):
        fuse_cluster(get_graph('bi.bi'), 0)
    with pytest.raises(NotApplicableError):
        fuse_cluster(get_graph('big.bi'), 3)


def test_resyllabify_ib_ib():
    graph = get_graph('ib.ib')
    rewritten = resyllabify_vc_chain(graph)
    assert rewritten.transcription == 'i.bi.b'
    assert rewritten.n_nodes == graph.n_nodes
    assert rewritten.duration_ms == graph.duration_ms
    assert np.array_equal(compile_word(graph).frames, compile_word(rewritten).frames)


def test_resyllabify_single_and_idempotent():
    once = resyllabify_vc_chain(get_graph('ib'))
    assert once.transcription == 'i.b'
    twice = resyllabify_vc_chain(once)
    assert twice.transcription == once.transcription
    assert np.array_equal(compile_word(once).frames, compile_word(twice).frames)


def test_resyllabify_preconditions():
    with pytest.raises(NotApplicableError):
        resyllabify_vc_chain(get_graph('ib ib', WordOptions(delta_onset=1.0, delta_coda=1.0, pause_ms=150.0)))
    with pytest.raises(NotApplicableError):
        resyllabify_vc_chain(get_graph('ib.ib', WordOptions(pause_ms=0.0)))
    with pytest.raises(NotApplicableError):
        resyllabify_vc_chain(get_graph('bi.bi'))


def test_find_rewrite():
    assert find_rewrite(get_graph('big.bi'), 'big.bi')[0] == 'identity'
    name, fused = find_rewrite(get_graph('big.bi'), 'bi.gbi')
    assert name == 'fuse_cluster' and fused.transcription == 'bi.gbi'
    assert find_rewrite(get_graph('ib.ib'), 'i.bi.b')[0] == 'resyllabify'
    with pytest.raises(NotApplicableError):
        find_rewrite(get_graph('big.bi'), 'ba.ba')
