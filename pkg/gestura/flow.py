"""
Compiles word graphs into articulatory parameter flows.

A vocalic segment gives P(t) = omega + Re[psi * conj(z_v(t))]. A superimposed
segment gives P(t) = omega + Re[S_v * psi * conj(z_v(t))] + Re[S_c * psi * conj(z_c(t))],
where z_c is the consonantal chain sampled arc by arc.
"""
import json
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from gestura.coordination import DEFAULT_PSI_TABLE, PsiTable, coordinate_trajectory
from gestura.data_types import ARTICULATORS, Marker, NodeRole, ParameterFlow, SegmentKind, SegmentSpan, SelectionVector
from gestura.errors import ConsistencyError, GesturaError, OutputError, with_context
from gestura.syllable_graph import Segment, SyllableGraph
from gestura.trajectory import ArcSpec, arc_samples
from gestura.utils import frame_counts, split_frames

DURATION_TOLERANCE = 1e-9
CSV_FORMAT = '%.17g'
PAUSE_ROLES = ('pause_start', 'pause_end')


def _frames_of(duration_ms: float, dt: float, n_frames: Optional[int]) -> int:
    if n_frames is not None:
        return n_frames
    return int(frame_counts([duration_ms], dt)[0])


def compile_vocalic(arc: ArcSpec, table: PsiTable = DEFAULT_PSI_TABLE, dt: float = 1.0,
                    n_frames: Optional[int] = None, include_end: bool = False) -> ParameterFlow:
    """
    Parameter flow of a single vocalic, diphthong, pause or stationary arc.

    Parameters
    ----------
    arc: ArcSpec
    table: PsiTable
    dt: float
        frame period in ms
    n_frames: int, optional
        number of frames to produce, defaults to the arc duration rounded to frames
    include_end: bool
        also emit the column at the end of the arc

    Returns
    -------
    ParameterFlow
    """
    n = _frames_of(arc.duration, dt, n_frames)
    z = arc_samples(arc, n, include_end)
    return ParameterFlow(table.omega[:, None] + coordinate_trajectory(z, table), dt)


def compile_superimposed(chain: Sequence[ArcSpec], vocalic: ArcSpec, consonant_selection: SelectionVector,
                         table: PsiTable = DEFAULT_PSI_TABLE, dt: float = 1.0,
                         vowel_selection: Optional[SelectionVector] = None, n_frames: Optional[int] = None,
                         include_end: bool = False) -> ParameterFlow:
    """
    Parameter flow of a superimposed segment.

    The vocalic arc drives the articulators of vowel_selection (by default the
    complement of consonant_selection), the consonantal chain drives the others.

    Parameters
    ----------
    chain: sequence of ArcSpec
        consonantal arcs in temporal order, one period each
    vocalic: ArcSpec
        the concurrent vocalic arc
    consonant_selection: SelectionVector
    table: PsiTable
    dt: float
    vowel_selection: SelectionVector, optional
    n_frames: int, optional
    include_end: bool

    Returns
    -------
    ParameterFlow
    """
    vowel_selection = consonant_selection.complement() if vowel_selection is None else vowel_selection
    if not vowel_selection.is_exclusive_with(consonant_selection):
        raise ConsistencyError(f"selections {vowel_selection} and {consonant_selection} are not exclusive")
    if not chain:
        raise ConsistencyError("a superimposed segment needs at least one consonantal arc")
    chain_duration = sum(arc.duration for arc in chain)
    if abs(chain_duration - vocalic.duration) > DURATION_TOLERANCE * max(vocalic.duration, 1.0):
        raise ConsistencyError(f"consonantal chain lasts {chain_duration} ms but the vocalic arc "
                               f"{vocalic.duration} ms")

    n = _frames_of(vocalic.duration, dt, n_frames)
    z_vowel = arc_samples(vocalic, n, include_end)
    counts = split_frames([arc.duration for arc in chain], n)
    pieces = [arc_samples(arc, count) for arc, count in zip(chain, counts)]
    if include_end:
        pieces.append(arc_samples(chain[-1], 0, include_end=True))
    z_consonant = np.concatenate(pieces)

    frames = (table.omega[:, None] + coordinate_trajectory(z_vowel, table, vowel_selection)
              + coordinate_trajectory(z_consonant, table, consonant_selection))
    return ParameterFlow(frames, dt)


def _segment_flow(graph: SyllableGraph, segment: Segment, n: int, table: PsiTable, dt: float) -> np.ndarray:
    vocalic = segment.vocalic
    if vocalic.duration_ms == 0 or n == 0:
        return np.zeros((len(ARTICULATORS), 0))
    if segment.kind == SegmentKind.superimposed:
        chain = [graph.arc_spec(arc) for arc in segment.chain]
        return compile_superimposed(chain, graph.arc_spec(vocalic), segment.chain[0].selection, table, dt,
                                    vowel_selection=vocalic.selection, n_frames=n).frames
    return compile_vocalic(graph.arc_spec(vocalic), table, dt, n_frames=n).frames


def _segment_markers(graph: SyllableGraph, segment: Segment, start: int, n: int) -> List[Marker]:
    markers = []
    period = segment.vocalic.period_ms
    if segment.kind == SegmentKind.superimposed:
        counts = split_frames([arc.duration_ms for arc in segment.chain], n)
        frame = start
        for arc, count in zip(segment.chain, counts):
            frame += int(count)
            node = graph.node(arc.target)
            markers.append(Marker(frame, node.symbol, str(node.role), segment.index, arc.period_ms))
    elif segment.kind == SegmentKind.pause:
        node = graph.node(segment.vocalic.target)
        markers.append(Marker(start, 'pause', PAUSE_ROLES[0], segment.index, period))
        markers.append(Marker(start + n, 'pause', PAUSE_ROLES[1], segment.index, period))
        markers.append(Marker(start + n, node.symbol, str(node.role), segment.index, period))
    elif segment.kind == SegmentKind.vocalic:
        node = graph.node(segment.vocalic.target)
        markers.append(Marker(start + n, node.symbol, str(node.role), segment.index, period))
    return markers


def compile_word(graph: SyllableGraph, table: PsiTable = DEFAULT_PSI_TABLE, dt: float = 1.0,
                 verbose: int = 0) -> ParameterFlow:
    """
    Compiles a whole word graph into a parameter flow.

    Segments are laid end to end, each sampled half-open so that the node shared
    by two segments appears once, as the first column of the later one. Frame
    counts are rounded on the running time, so the flow has exactly
    round(duration / dt) frames.

    Parameters
    ----------
    graph: SyllableGraph
    table: PsiTable
    dt: float
        frame period in ms
    verbose: int
        1 prints a summary, 2 also shows a progress bar over segments

    Returns
    -------
    ParameterFlow
    """
    if graph.is_empty:
        return ParameterFlow(np.zeros((len(ARTICULATORS), 0)), dt)
    segments = graph.segments()
    counts = frame_counts([segment.duration_ms for segment in segments], dt)
    first = graph.node(graph.first_node)
    markers = [Marker(0, first.symbol, str(first.role), 0, graph.syllables[0].period_ms)]
    spans = []
    columns = []
    start = 0
    if verbose >= 1:
        print(f"Compiling /{graph.transcription}/: {len(segments)} segments, {int(counts.sum())} frames", flush=True)
    for segment, n in tqdm(list(zip(segments, counts)), disable=verbose < 2):
        n = int(n)
        try:
            columns.append(_segment_flow(graph, segment, n, table, dt))
        except GesturaError as err:
            raise with_context(err, f"segment {segment.index}") from err
        markers.extend(_segment_markers(graph, segment, start, n))
        spans.append(SegmentSpan(segment.kind, segment.index, start, start + n))
        start += n

    frames = np.concatenate(columns, axis=1)
    last = max(frames.shape[1] - 1, 0)
    markers = [m if m.frame <= last else Marker(last, m.label, m.role, m.segment, m.period_ms) for m in markers]
    return ParameterFlow(frames, dt, markers, spans)


def flow_to_frame(flow: ParameterFlow) -> pd.DataFrame:
    return pd.DataFrame(flow.frames.T, columns=list(ARTICULATORS))


def write_flow(flow: ParameterFlow, path: Union[str, Path], markers_path: Optional[Union[str, Path]] = None):
    """
    Writes the flow as CSV (one row per frame, one column per articulator) and its markers as JSON.
    """
    path = Path(path)
    markers_path = path.with_name('markers.json') if markers_path is None else Path(markers_path)
    try:
        flow_to_frame(flow).to_csv(path, index=False, float_format=CSV_FORMAT)
        markers_path.write_text(json.dumps({'dt': flow.dt, 'markers': [m.to_dict() for m in flow.markers]},
                                           indent=2, ensure_ascii=False), encoding='utf-8')
    except OSError as err:
        raise OutputError(f"cannot write flow to {path}: {err}") from err


def read_flow(path: Union[str, Path], markers_path: Optional[Union[str, Path]] = None,
              dt: Optional[float] = None) -> ParameterFlow:
    path = Path(path)
    markers_path = path.with_name('markers.json') if markers_path is None else Path(markers_path)
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
        sidecar = json.loads(markers_path.read_text(encoding='utf-8')) if markers_path.exists() else {}
    except OSError as err:
        raise OutputError(f"cannot read flow from {path}: {err}") from err
    missing = [name for name in ARTICULATORS if name not in frame.columns]
    if missing:
        raise ConsistencyError(f"{path} lacks articulator columns {missing}")
    markers = [Marker(**entry) for entry in sidecar.get('markers', [])]
    unknown = sorted({m.role for m in markers} - set(NodeRole.list()) - set(PAUSE_ROLES))
    if unknown:
        raise ConsistencyError(f"{markers_path} has markers with unknown roles {unknown}")
    dt = sidecar.get('dt', 1.0) if dt is None else dt
    return ParameterFlow(frame[list(ARTICULATORS)].to_numpy().T, dt, markers)


def junction_columns(graph: SyllableGraph, table: PsiTable = DEFAULT_PSI_TABLE,
                     dt: float = 1.0) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    (end column of segment k, first column of segment k+1) for every pair of non-empty consecutive segments.
    """
    closed = []
    for segment in graph.segments():
        if segment.duration_ms == 0:
            continue
        spec = graph.arc_spec(segment.vocalic)
        if segment.kind == SegmentKind.superimposed:
            flow = compile_superimposed([graph.arc_spec(arc) for arc in segment.chain], spec,
                                        segment.chain[0].selection, table, dt, vowel_selection=segment.vocalic.selection,
                                        include_end=True)
        else:
            flow = compile_vocalic(spec, table, dt, include_end=True)
        closed.append(flow.frames)
    return [(left[:, -1], right[:, 0]) for left, right in zip(closed[:-1], closed[1:])]

