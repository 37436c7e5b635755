import pytest

from gestura.errors import InventoryError, ParseError, UnsupportedStructureError
from gestura.inventory import default_inventory
from gestura.parsing import parse_word, syllabify, tokenize
from gestura.syllable_graph import WordOptions


def get_shapes(text):
    return [[(s.onset, s.nucleus, s.coda) for s in word] for word in syllabify(text)]


def test_tokenize():
    tokens = tokenize('bi.ga ə', default_inventory())
    assert [t.symbol for t in tokens] == ['b', 'i', '.', 'g', 'a', ' ', 'ə']
    assert [t.position for t in tokens] == [0, 1, 2, 3, 4, 5, 6]
    assert tokens[1].is_vowel and not tokens[0].is_vowel


def test_single_syllable():
    graph = parse_word('bi')
    assert graph.n_nodes == 3 and graph.n_arcs == 4
    assert graph.transcription == 'bi'


def test_ibia():
    assert get_shapes('ibia') == [[((), ('i',), ()), (('b',), ('i', 'a'), ())]]
    graph = parse_word('ibia')
    assert graph.transcription == 'i.bia'
    assert graph.junctions[0].case == 'xV.Cx'
    assert graph.duration_ms == 100 + 200 + 200 + 100


def test_explicit_boundary_wins():
    assert get_shapes('big.bi') == [[(('b',), ('i',), ('g',)), (('b',), ('i',), ())]]
    assert parse_word('big.bi').junctions[0].case == 'xC.Cx'


def test_maximal_onset():
    assert get_shapes('adba') == [[((), ('a',), ()), (('d', 'b'), ('a',), ())]]
    assert get_shapes('ibib') == [[((), ('i',), ()), (('b',), ('i',), ('b',))]]


def test_words_and_pauses():
    graph = parse_word('bi ba', options=WordOptions(pause_ms=150.0))
    assert [j.case for j in graph.junctions] == ['pause']
    assert graph.duration_ms == 750.0
    assert len(syllabify('  bi   ba ')) == 2


def test_periods_override():
    graph = parse_word('bi.ba', options=WordOptions(periods=(100.0, 150.0)))
    assert [s.period_ms for s in graph.syllables] == [100.0, 150.0]
    assert graph.duration_ms == 300 + 450
    with pytest.raises(UnsupportedStructureError):
        parse_word('bi.ba', options=WordOptions(periods=(100.0,)))


def test_parse_errors():
    with pytest.raises(ParseError) as info:
        parse_word('xq')
    assert info.value.position == 0
    assert 'pos=0' in info.value.describe()
    with pytest.raises(ParseError) as info:
        parse_word('bix')
    assert info.value.position == 2
    with pytest.raises(ParseError):
        parse_word('   ')
    with pytest.raises(ParseError) as info:
        parse_word('bi..ba')
    assert info.value.position == 3
    with pytest.raises(ParseError):
        parse_word('bi.')
    with pytest.raises(ParseError):
        parse_word('b')
    with pytest.raises(UnsupportedStructureError) as info:
        parse_word('abdg.a')
    assert info.value.position == 1


def test_error_kinds():
    assert issubclass(InventoryError, ParseError)
    with pytest.raises(ValueError):
        parse_word('')
