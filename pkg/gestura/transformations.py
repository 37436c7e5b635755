"""
Verbal transformations as graph rewrites.
"""
from dataclasses import replace
from typing import List, Optional, Tuple

from gestura.data_types import Branch, NodeRole
from gestura.errors import NotApplicableError
from gestura.inventory import PhonemeInventory, default_inventory
from gestura.syllable_graph import Junction, Syllable, SyllableGraph, WordOptions, add_superimposed


def _require_unit_deltas(graph: SyllableGraph):
    for index, (delta_onset, delta_coda) in enumerate(graph.deltas):
        if delta_onset != 1.0 or delta_coda != 1.0:
            raise NotApplicableError(
                f"syllable {index + 1} has anchor deltas ({delta_onset}, {delta_coda}); the rewrite needs 1")


def _is_cv_aligned(syllables) -> bool:
    if len(syllables) < 2 or syllables[0].onset or syllables[0].coda:
        return False
    middle_ok = all(s.onset and s.nucleus and not s.coda for s in syllables[1:-1])
    last = syllables[-1]
    return middle_ok and bool(last.onset) and not last.nucleus and not last.coda


def resyllabify_vc_chain(graph: SyllableGraph) -> SyllableGraph:
    """
    Relabels a chain of VC syllables joined without pause as V.CV...C (ib.ib -> i.bi.b).

    Only the syllable bookkeeping changes; nodes, locations and arcs stay as they
    are, so the compiled flow is unchanged. A graph that is already CV-aligned is
    returned as is.
    """
    if any(j.case == 'pause' for j in graph.junctions):
        raise NotApplicableError("the word contains a pause; resyllabification needs T_p = 0")
    _require_unit_deltas(graph)
    if _is_cv_aligned(graph.syllables):
        return graph
    if not graph.syllables or any(s.onset or not s.coda for s in graph.syllables):
        raise NotApplicableError(f"/{graph.transcription}/ is not a chain of VC syllables")

    old = graph.syllables
    syllables = [Syllable((), old[0].nucleus, (), old[0].period_ms, 1.0, 1.0)]
    for previous, current in zip(old[:-1], old[1:]):
        syllables.append(Syllable(previous.coda, current.nucleus, (), current.period_ms, 1.0, 1.0))
    syllables.append(Syllable(old[-1].coda, (), (), old[-1].period_ms, 1.0, 1.0))

    relabeled = graph.graph.copy()
    for key, data in relabeled.nodes(data=True):
        node = data['node']
        if node.role in (NodeRole.consonant, NodeRole.anchor_coda):
            data['node'] = replace(node, syllable=node.syllable + 1)

    vowels = {data['node'].syllable: key for key, data in relabeled.nodes(data=True)
              if data['node'].role == NodeRole.vowel}
    junctions = [Junction(index, 'xV.Cx', vowels[index]) for index in range(len(syllables) - 1)]
    return graph.with_syllables(syllables, junctions, relabeled)


def fuse_cluster(graph: SyllableGraph, junction: int, inventory: Optional[PhonemeInventory] = None) -> SyllableGraph:
    """
    Fuses the coda consonant of syllable `junction` with the onset consonant of the next one (big.bi -> bi.gbi).

    The two superimposed segments of 2T anchored on the shared node become one CC
    segment of 3T running from the left vowel to the right vowel, with the cluster
    selection. The shared node disappears.

    Parameters
    ----------
    graph: SyllableGraph
        a word graph
    junction: int
        0-based index of the syllable left of the boundary
    inventory: PhonemeInventory, optional
        supplies the cluster selection and cluster locations

    Returns
    -------
    SyllableGraph
    """
    inventory = default_inventory() if inventory is None else inventory
    matches = [j for j in graph.junctions if j.left == junction]
    if not matches:
        raise NotApplicableError(f"there is no boundary after syllable {junction + 1}")
    boundary = matches[0]
    if boundary.case != 'xC.Cx':
        raise NotApplicableError(f"boundary {junction + 1} is {boundary.case}; fusion needs xC.Cx")
    left, right = graph.syllables[junction], graph.syllables[junction + 1]
    if len(left.coda) != 1 or len(right.onset) != 1:
        raise NotApplicableError("fusion needs a single coda consonant followed by a single onset consonant")
    if left.delta_coda != 1.0 or right.delta_onset != 1.0:
        raise NotApplicableError(
            f"the consonants are not anchored on the same vowel (deltas {left.delta_coda}, {right.delta_onset})")

    shared = boundary.node
    arcs = graph.arcs
    incoming = [a for a in arcs if a.target == shared and a.source != shared]
    outgoing = [a for a in arcs if a.source == shared and a.target != shared]
    coda_vocalic = next(a for a in incoming if a.branch == Branch.vocalic)
    onset_vocalic = next(a for a in outgoing if a.branch == Branch.vocalic)
    coda_segment, onset_segment = coda_vocalic.segment, onset_vocalic.segment
    first_consonant = next(a for a in incoming if a.branch == Branch.consonantal).source
    second_consonant = next(a for a in outgoing if a.branch == Branch.consonantal).target
    left_vowel, right_vowel = coda_vocalic.source, onset_vocalic.target
    symbols = (graph.node(first_consonant).symbol, graph.node(second_consonant).symbol)
    selection = inventory.cluster_selection(*symbols)
    vowel_theta = graph.node(right_vowel).location.theta

    fused = graph.graph.copy()
    fused.remove_edges_from([(u, v, k) for u, v, k, data in graph.graph.edges(keys=True, data=True)
                             if data['arc'].segment in (coda_segment, onset_segment)])
    fused.remove_node(shared)
    for node_id, symbol in zip((first_consonant, second_consonant), symbols):
        node = fused.nodes[node_id]['node']
        fused.nodes[node_id]['node'] = replace(
            node, location=inventory.consonant_location(symbol, vowel_theta, in_cluster=True), syllable=junction + 1)
    for u, v, data in fused.edges(data=True):
        if data['arc'].segment > onset_segment:
            data['arc'] = replace(data['arc'], segment=data['arc'].segment - 1)
    options = WordOptions(nu=onset_vocalic.nu, vowel_K=onset_vocalic.K,
                          consonant_K=next(a for a in outgoing if a.branch == Branch.consonantal).K)
    add_superimposed(fused, [left_vowel, first_consonant, second_consonant, right_vowel], selection,
                     coda_segment, right.period_ms, options)

    syllables: List[Syllable] = list(graph.syllables)
    syllables[junction] = replace(left, coda=())
    syllables[junction + 1] = replace(right, onset=symbols)
    junctions = [Junction(junction, 'xV.Cx', left_vowel) if j.left == junction else j for j in graph.junctions]
    return graph.with_syllables(syllables, junctions, fused)


def find_rewrite(graph: SyllableGraph, target: str,
                 inventory: Optional[PhonemeInventory] = None) -> Tuple[str, SyllableGraph]:
    """
    Finds the rewrite of graph whose syllabification reads as target.

    Tries the identity, cluster fusion at every boundary and VC-chain
    resyllabification, in that order.

    Returns
    -------
    (str, SyllableGraph)
        'identity', 'fuse_cluster' or 'resyllabify', and the rewritten graph
    """
    target = target.strip()
    if graph.transcription == target:
        return 'identity', graph
    candidates = []
    for junction in graph.junctions:
        try:
            candidates.append(('fuse_cluster', fuse_cluster(graph, junction.left, inventory)))
        except NotApplicableError:
            continue
    try:
        candidates.append(('resyllabify', resyllabify_vc_chain(graph)))
    except NotApplicableError:
        pass
    for name, rewritten in candidates:
        if rewritten.transcription == target:
            return name, rewritten
    raise NotApplicableError(f"no rewrite turns /{graph.transcription}/ into /{target}/")
