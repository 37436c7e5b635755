"""
Pipeline runners behind the command line: word synthesis, locus equations,
the coordination surface and verbal transformations.

Every runner is pure: it returns data frames, dataclasses and dictionaries, and
the write_* helpers turn them into files.
"""
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score
from tqdm import tqdm

from gestura.acoustics import (DEFAULT_MAP, ArticulatoryMap, formants_of_parameters, sample_surface,
                               surface_distance, track_formants, track_to_frame)
from gestura.coordination import DEFAULT_PSI_TABLE, PsiTable
from gestura.data_types import EnvelopeCurve, FormantTrack, ParameterFlow, SegmentKind, Waveform
from gestura.errors import ConfigError, OutputError
from gestura.flow import compile_word, write_flow
from gestura.inventory import SCHWA, VOWEL_ORDER, FrontBackLocation, PhonemeInventory, default_inventory
from gestura.parsing import parse_word
from gestura.syllable_graph import SyllableGraph, WordOptions
from gestura.synthesis import (DEFAULT_F0, DEFAULT_SAMPLE_RATE, build_envelope, envelope_to_frame, render,
                               write_wav)
from gestura.transformations import find_rewrite
from gestura.utils import is_front

LOCUS_VOWELS = VOWEL_ORDER + (SCHWA,)
LOCUS_OFFSET_MS = 30.0
LOCUS_DELTA_ONSET = 0.5
ONSET_CONVENTION = "onset = consonant arrival marker + offset; vowel = center frame of the stationary hold"
CORNER_THETAS = (5 * np.pi / 3, np.pi, np.pi / 3)


@dataclass(frozen=True)
class SynthesisSettings:
    """
    Everything a synthesis needs besides the word itself.
    """
    table: PsiTable = DEFAULT_PSI_TABLE
    inventory: PhonemeInventory = field(default_factory=default_inventory)
    amap: ArticulatoryMap = DEFAULT_MAP
    options: WordOptions = field(default_factory=WordOptions)
    dt: float = 1.0
    f0: float = DEFAULT_F0
    f0_end: Optional[float] = None
    sample_rate: int = DEFAULT_SAMPLE_RATE


@dataclass
class SynthesisResult:
    graph: SyllableGraph
    flow: ParameterFlow
    track: FormantTrack
    envelope: EnvelopeCurve
    waveform: Waveform


def synthesize_graph(graph: SyllableGraph, settings: SynthesisSettings, verbose: int = 0) -> SynthesisResult:
    flow = compile_word(graph, settings.table, settings.dt, verbose)
    track = track_formants(flow, settings.amap, verbose)
    envelope = build_envelope(flow.markers, flow.n_frames, settings.dt)
    waveform = render(track, envelope, settings.f0, settings.sample_rate, settings.f0_end, verbose=verbose)
    return SynthesisResult(graph, flow, track, envelope, waveform)


def synthesize_word(text: str, settings: Optional[SynthesisSettings] = None, verbose: int = 0) -> SynthesisResult:
    """
    Parses, compiles, tracks and renders one phonetic string.

    Parameters
    ----------
    text: str
        e.g. 'ibia'
    settings: SynthesisSettings, optional
    verbose: int

    Returns
    -------
    SynthesisResult
    """
    settings = SynthesisSettings() if settings is None else settings
    graph = parse_word(text, settings.inventory, settings.options)
    if verbose >= 1:
        print(f"Parsed /{graph.transcription}/: {graph.n_nodes} nodes, {graph.n_arcs} arcs, "
              f"{graph.duration_ms:g} ms", flush=True)
    return synthesize_graph(graph, settings, verbose)


def write_synthesis(result: SynthesisResult, out_dir: Union[str, Path], envelope: bool = False,
                    seed: Optional[int] = None) -> Dict[str, Path]:
    """
    Writes flow.csv, markers.json, formants.csv, out.wav, graph.json and optionally envelope.csv.

    The run seed is recorded in graph.json; nothing in the pipeline draws from it.
    """
    out_dir = Path(out_dir)
    paths = {name: out_dir / name for name in ('flow.csv', 'markers.json', 'formants.csv', 'out.wav', 'graph.json')}
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_flow(result.flow, paths['flow.csv'], paths['markers.json'])
        track_to_frame(result.track).to_csv(paths['formants.csv'], index=False, float_format='%.6f')
        write_wav(result.waveform, paths['out.wav'])
        graph = dict(result.graph.to_dict(result.flow.dt), seed=seed)
        paths['graph.json'].write_text(json.dumps(graph, indent=2, ensure_ascii=False), encoding='utf-8')
        if envelope:
            paths['envelope.csv'] = out_dir / 'envelope.csv'
            envelope_to_frame(result.envelope).to_csv(paths['envelope.csv'], index=False, float_format='%.6f')
    except OSError as err:
        raise OutputError(f"cannot write synthesis results to {out_dir}: {err}") from err
    return paths


def _locus_group(vowel: str, inventory: PhonemeInventory, split: bool) -> str:
    if not split:
        return 'all'
    return 'front' if is_front(inventory.vowel(vowel).theta) else 'back'


def _locus_row(consonant: str, vowel: str, settings: SynthesisSettings, offset_ms: float, split: bool) -> dict:
    graph = parse_word(consonant + vowel, settings.inventory, settings.options)
    flow = compile_word(graph, settings.table, settings.dt)
    release = flow.consonant_markers()[0].frame
    onset = min(release + int(round(offset_ms / settings.dt)), flow.n_frames - 1)
    hold = flow.spans_of(SegmentKind.hold)[-1]
    middle = (hold.start + hold.stop) // 2
    values, valid = formants_of_parameters(flow.frames[:, [onset, middle]], settings.amap)
    values[~valid] = np.nan
    return {'consonant': consonant, 'vowel': vowel, 'group': _locus_group(vowel, settings.inventory, split),
            'onset_frame': onset, 'vowel_frame': middle,
            'F2_onset': values[0, 1], 'F2_vowel': values[1, 1], 'F3_onset': values[0, 2], 'F3_vowel': values[1, 2]}


def fit_locus(rows: pd.DataFrame, formant: str = 'F2') -> dict:
    """
    Least-squares line formant_onset = slope * formant_vowel + intercept.
    """
    rows = rows.dropna(subset=[f'{formant}_onset', f'{formant}_vowel'])
    if len(rows) < 2:
        return {'formant': formant, 'n': len(rows), 'slope': np.nan, 'intercept': np.nan, 'r2': np.nan}
    x = rows[[f'{formant}_vowel']].to_numpy()
    y = rows[f'{formant}_onset'].to_numpy()
    model = LinearRegression().fit(x, y)
    return {'formant': formant, 'n': len(rows), 'slope': float(model.coef_[0]),
            'intercept': float(model.intercept_), 'r2': float(r2_score(y, model.predict(x)))}


def locus_experiment(consonant: str, settings: Optional[SynthesisSettings] = None,
                     vowels: Sequence[str] = LOCUS_VOWELS, offset_ms: float = LOCUS_OFFSET_MS,
                     n_jobs: int = 1, verbose: int = 0) -> Tuple[pd.DataFrame, List[dict]]:
    """
    Locus equations of one consonant across vowels.

    Each CV is synthesized with the settings' onset delta (the command line uses
    0.5). F2 and F3 are read offset_ms after the consonant arrival marker and at
    the center of the vowel hold. Consonants whose place depends on vowel frontness
    (such as /g/) get one regression per vowel group.

    Returns
    -------
    (DataFrame, list of dict)
        one row per vowel, and the regressions (consonant, group, formant, n, slope, intercept, r2)
    """
    if settings is None:
        settings = SynthesisSettings(options=WordOptions(delta_onset=LOCUS_DELTA_ONSET))
    inventory = settings.inventory
    if not inventory.is_consonant(consonant):
        raise ConfigError(f"invalid consonant {consonant!r}, expected one of {sorted(inventory.consonants)}")
    unknown = [v for v in vowels if not inventory.is_vowel(v)]
    if unknown:
        raise ConfigError(f"unknown vowels {unknown}")
    split = isinstance(inventory.consonant(consonant).location, FrontBackLocation)

    if verbose >= 1:
        print(f"Locus of /{consonant}/ over {len(vowels)} vowels", flush=True)
    rows = Parallel(n_jobs=n_jobs)(delayed(_locus_row)(consonant, v, settings, offset_ms, split)
                                   for v in tqdm(vowels, disable=not verbose))
    table = pd.DataFrame(rows)

    regressions = []
    for group, members in table.groupby('group', sort=True):
        for formant in ('F2', 'F3'):
            regressions.append({'consonant': consonant, 'group': group, **fit_locus(members, formant)})
    if verbose >= 2:
        for regression in regressions:
            print(f"  {regression['group']} {regression['formant']}: slope {regression['slope']:.3f}, "
                  f"intercept {regression['intercept']:.1f}, r2 {regression['r2']:.3f}", flush=True)
    return table, regressions


def write_locus(table: pd.DataFrame, regressions: List[dict], out_dir: Union[str, Path],
                offset_ms: float = LOCUS_OFFSET_MS, seed: Optional[int] = None) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    paths = {'locus.csv': out_dir / 'locus.csv', 'locus.json': out_dir / 'locus.json'}
    summary = {'convention': ONSET_CONVENTION, 'offset_ms': offset_ms, 'seed': seed, 'regressions': regressions}
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        table.to_csv(paths['locus.csv'], index=False, float_format='%.6f')
        paths['locus.json'].write_text(json.dumps(summary, indent=2), encoding='utf-8')
    except OSError as err:
        raise OutputError(f"cannot write locus results to {out_dir}: {err}") from err
    return paths


def surface_grid(n_rho: int = 11, n_theta: int = 72) -> Tuple[np.ndarray, np.ndarray]:
    if n_rho < 1 or n_theta < 1:
        raise ConfigError(f"the surface grid needs at least one radius and one angle, got {n_rho} x {n_theta}")
    rho = np.linspace(0.0, 1.0, n_rho) if n_rho > 1 else np.ones(1)
    return rho, np.arange(n_theta) * 2 * np.pi / n_theta


def surface_experiment(rho_grid: Sequence[float], theta_grid: Sequence[float],
                       settings: Optional[SynthesisSettings] = None, track_word: Optional[str] = None,
                       verbose: int = 0) -> Tuple[pd.DataFrame, Optional[pd.DataFrame]]:
    """
    Samples the coordination surface and, for track_word, the distance of its formant track to it.

    Returns
    -------
    (DataFrame, DataFrame or None)
        the surface (rho, theta, F1, F2, F3) and the per-frame track distances (frame, F1, F2, F3, distance)
    """
    settings = SynthesisSettings() if settings is None else settings
    surface = sample_surface(rho_grid, theta_grid, settings.table, settings.amap, verbose)
    if track_word is None:
        return surface, None
    graph = parse_word(track_word, settings.inventory, settings.options)
    track = track_formants(compile_word(graph, settings.table, settings.dt, verbose), settings.amap, verbose)
    distances = pd.DataFrame(track.values[:, :3], columns=['F1', 'F2', 'F3'])
    distances.insert(0, 'frame', np.arange(track.n_frames))
    distances['distance'] = surface_distance(track.values, surface)
    return surface, distances


@dataclass
class TransformResult:
    rewrite: str
    before: SynthesisResult
    after: SynthesisResult
    report: dict


def _consonant_selections(graph: SyllableGraph) -> List[str]:
    selections = []
    for segment in graph.segments():
        if segment.chain:
            selection = str(segment.chain[0].selection)
            if not selections or selections[-1] != selection:
                selections.append(selection)
    return selections


def transform_experiment(before: str, after: str, settings: Optional[SynthesisSettings] = None,
                         verbose: int = 0) -> TransformResult:
    """
    Rewrites the graph of `before` into `after` and synthesizes both.

    Both words are planned with unit anchor deltas and no pause, the setting in
    which the rewrites are defined.
    """
    settings = SynthesisSettings() if settings is None else settings
    options = replace(settings.options, delta_onset=1.0, delta_coda=1.0, pause_ms=0.0)
    settings = replace(settings, options=options)
    graph = parse_word(before, settings.inventory, options)
    rewrite, rewritten = find_rewrite(graph, after, settings.inventory)
    if verbose >= 1:
        print(f"/{graph.transcription}/ -> /{rewritten.transcription}/ by {rewrite}", flush=True)

    first = synthesize_graph(graph, settings, verbose)
    second = synthesize_graph(rewritten, settings, verbose)
    report = {
        'rewrite': rewrite,
        'before': graph.transcription,
        'after': rewritten.transcription,
        'node_delta': rewritten.n_nodes - graph.n_nodes,
        'duration_delta_ms': rewritten.duration_ms - graph.duration_ms,
        'frame_delta': second.flow.n_frames - first.flow.n_frames,
        'selections_before': _consonant_selections(graph),
        'selections_after': _consonant_selections(rewritten),
        'flows_equal': bool(first.flow.frames.shape == second.flow.frames.shape
                            and np.array_equal(first.flow.frames, second.flow.frames)),
    }
    return TransformResult(rewrite, first, second, report)


def write_transform(result: TransformResult, out_dir: Union[str, Path], envelope: bool = False,
                    seed: Optional[int] = None) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    write_synthesis(result.before, out_dir / 'before', envelope, seed)
    write_synthesis(result.after, out_dir / 'after', envelope, seed)
    path = out_dir / 'report.json'
    try:
        path.write_text(json.dumps(dict(result.report, seed=seed), indent=2, ensure_ascii=False), encoding='utf-8')
    except OSError as err:
        raise OutputError(f"cannot write {path}: {err}") from err
    return {'before': out_dir / 'before', 'after': out_dir / 'after', 'report.json': path}
