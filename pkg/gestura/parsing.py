"""
Phonetic strings to word graphs.

    text     := word (whitespace word)*
    word     := syllable ('.' syllable)*
    syllable := C* V+ C*

Symbols are matched greedily against the inventory, longest first. A '.' chunk
holding several vowel runs is split by maximal onset: each boundary gives the
following syllable as many consonants as possible (at most two, and a pair only
when the inventory has a cluster rule for it). Words are joined by a pause.
"""
from dataclasses import dataclass
from functools import reduce
from typing import List, Optional, Sequence, Tuple

from gestura.errors import ParseError, UnsupportedStructureError
from gestura.inventory import PhonemeInventory, default_inventory
from gestura.syllable_graph import (MAX_CHAIN_CONSONANTS, SyllableGraph, WordOptions, build_syllable,
                                    concatenate, insert_pause)

BOUNDARY = '.'


@dataclass(frozen=True)
class Token:
    symbol: str
    position: int
    kind: str

    @property
    def is_vowel(self) -> bool:
        return self.kind == 'vowel'

    @property
    def is_phoneme(self) -> bool:
        return self.kind in ('vowel', 'consonant')


@dataclass(frozen=True)
class SyllableSpec:
    onset: Tuple[str, ...]
    nucleus: Tuple[str, ...]
    coda: Tuple[str, ...]
    position: int


def tokenize(text: str, inventory: PhonemeInventory) -> List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        char = text[position]
        if char.isspace():
            tokens.append(Token(char, position, 'space'))
            position += 1
            continue
        if char == BOUNDARY:
            tokens.append(Token(char, position, 'boundary'))
            position += 1
            continue
        symbol = inventory.match(text, position)
        if symbol is None:
            raise ParseError(f"unknown symbol {char!r}", position)
        tokens.append(Token(symbol, position, 'vowel' if inventory.is_vowel(symbol) else 'consonant'))
        position += len(symbol)
    return tokens


def _check_chain(consonants: Sequence[Token], inventory: PhonemeInventory, name: str):
    if len(consonants) > MAX_CHAIN_CONSONANTS:
        raise UnsupportedStructureError(
            f"more than {MAX_CHAIN_CONSONANTS} consonants in the {name} "
            f"/{''.join(t.symbol for t in consonants)}/", consonants[0].position)
    if len(consonants) == 2 and not inventory.has_cluster(consonants[0].symbol, consonants[1].symbol):
        raise UnsupportedStructureError(
            f"no cluster rule for /{consonants[0].symbol}{consonants[1].symbol}/", consonants[0].position)


def _onset_size(consonants: Sequence[Token], inventory: PhonemeInventory) -> int:
    if len(consonants) >= 2 and inventory.has_cluster(consonants[-2].symbol, consonants[-1].symbol):
        return 2
    return min(len(consonants), 1)


def _split_chunk(chunk: Sequence[Token], inventory: PhonemeInventory) -> List[SyllableSpec]:
    """
    Splits one '.'-delimited chunk into syllables by maximal onset.
    """
    runs: List[List[Token]] = []
    gaps: List[List[Token]] = [[]]
    for token in chunk:
        if token.is_vowel:
            if gaps[-1] or not runs:
                runs.append([])
                gaps.append([])
            runs[-1].append(token)
        else:
            gaps[-1].append(token)
    if not runs:
        raise ParseError("syllable without a vowel", chunk[0].position)

    onsets = [gaps[0]]
    codas = []
    for gap in gaps[1:-1]:
        size = _onset_size(gap, inventory)
        codas.append(gap[:len(gap) - size])
        onsets.append(gap[len(gap) - size:])
    codas.append(gaps[-1])

    syllables = []
    for onset, run, coda in zip(onsets, runs, codas):
        _check_chain(onset, inventory, 'onset')
        _check_chain(coda, inventory, 'coda')
        start = onset[0].position if onset else run[0].position
        syllables.append(SyllableSpec(tuple(t.symbol for t in onset), tuple(t.symbol for t in run),
                                      tuple(t.symbol for t in coda), start))
    return syllables


def syllabify(text: str, inventory: Optional[PhonemeInventory] = None) -> List[List[SyllableSpec]]:
    """
    Splits a phonetic string into words and syllables.

    Returns
    -------
    list of list of SyllableSpec
        one list of syllables per whitespace-separated word
    """
    inventory = default_inventory() if inventory is None else inventory
    tokens = tokenize(text, inventory)
    words: List[List[Token]] = [[]]
    for token in tokens:
        if token.kind == 'space':
            if words[-1]:
                words.append([])
        else:
            words[-1].append(token)
    words = [word for word in words if word]
    if not words:
        raise ParseError("empty input", 0)

    syllabified = []
    for word in words:
        chunks: List[List[Token]] = [[]]
        for token in word:
            if token.kind == 'boundary':
                if not chunks[-1]:
                    raise ParseError("empty syllable", token.position)
                chunks.append([])
            else:
                chunks[-1].append(token)
        if not chunks[-1]:
            raise ParseError("empty syllable", word[-1].position + len(word[-1].symbol))
        syllabified.append([spec for chunk in chunks for spec in _split_chunk(chunk, inventory)])
    return syllabified


def parse_word(text: str, inventory: Optional[PhonemeInventory] = None,
               options: Optional[WordOptions] = None) -> SyllableGraph:
    """
    Builds the word graph of a phonetic string.

    Parameters
    ----------
    text: str
        e.g. 'ibia', 'big.bi' or 'bi ba' (two words separated by a pause)
    inventory: PhonemeInventory, optional
    options: WordOptions, optional
        T, T_p, anchor deltas and shape parameters

    Returns
    -------
    SyllableGraph
    """
    inventory = default_inventory() if inventory is None else inventory
    options = WordOptions() if options is None else options
    words = syllabify(text, inventory)
    if options.periods is not None:
        n_syllables = sum(len(word) for word in words)
        if len(options.periods) != n_syllables:
            raise UnsupportedStructureError(
                f"{len(options.periods)} periods given for {n_syllables} syllables", 0)

    index = 0
    graphs = []
    for word in words:
        syllables = []
        for spec in word:
            try:
                syllables.append(build_syllable(spec.onset, spec.nucleus, spec.coda, inventory=inventory,
                                                options=options, period_ms=options.period_of(index)))
            except ParseError as err:
                if err.position is not None:
                    raise
                raise type(err)(str(err), spec.position) from err
            index += 1
        graphs.append(reduce(lambda left, right: concatenate(left, right, options), syllables))
    return reduce(lambda left, right: insert_pause(left, right, options.pause_ms, options), graphs)
