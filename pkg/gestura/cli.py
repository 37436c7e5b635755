"""
Command line front end: gestura synth | locus | surface | transform.
"""
import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from gestura.acoustics import DEFAULT_MAP, ArticulatoryMap
from gestura.coordination import DEFAULT_PSI_TABLE, PsiTable
from gestura.errors import ConfigError, GesturaError, OutputError
from gestura.experiments import (CORNER_THETAS, LOCUS_DELTA_ONSET, LOCUS_OFFSET_MS, SynthesisSettings,
                                 locus_experiment, surface_experiment, surface_grid, synthesize_word,
                                 transform_experiment, write_locus, write_synthesis, write_transform)
from gestura.inventory import PhonemeInventory, default_inventory
from gestura.loading import load_articulatory_map, load_inventory, load_psi_table
from gestura.synthesis import DEFAULT_F0, DEFAULT_SAMPLE_RATE, F0_RANGE, MIN_SAMPLE_RATE
from gestura.syllable_graph import WordOptions
from gestura.trajectory import CONSONANT_SHAPE_K, DEFAULT_NU, VOWEL_SHAPE_K

DEFAULT_DELTA = 0.7
FLOAT_FIELDS = ('period_ms', 'pause_ms', 'delta_onset', 'delta_coda', 'coda_hold_ms', 'vowel_K', 'consonant_K', 'dt',
                'f0', 'f0_end', 'offset_ms', 'rho')


@dataclass
class RunConfig:
    """
    Settings of one command line run, validated once at startup.
    """
    command: str
    word: Optional[str] = None
    after: Optional[str] = None
    consonant: Optional[str] = None
    period_ms: float = 100.0
    pause_ms: float = 150.0
    delta_onset: float = DEFAULT_DELTA
    delta_coda: float = DEFAULT_DELTA
    coda_hold_ms: float = 0.0
    periods: Optional[Tuple[float, ...]] = None
    nu: int = DEFAULT_NU
    vowel_K: float = VOWEL_SHAPE_K
    consonant_K: float = CONSONANT_SHAPE_K
    dt: float = 1.0
    f0: float = DEFAULT_F0
    f0_end: Optional[float] = None
    sample_rate: int = DEFAULT_SAMPLE_RATE
    inventory_path: Optional[Path] = None
    map_path: Optional[Path] = None
    psi_path: Optional[Path] = None
    out_dir: Path = Path('.')
    seed: Optional[int] = None
    jobs: int = 1
    envelope: bool = False
    offset_ms: float = LOCUS_OFFSET_MS
    n_rho: int = 11
    n_theta: int = 72
    rho: Optional[float] = None
    thetas: Optional[str] = None
    track: Optional[str] = None
    verbose: int = 0

    def validate(self):
        for name in FLOAT_FIELDS:
            value = getattr(self, name)
            if value is not None and not np.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value}")
        if self.periods is not None and not np.all(np.isfinite(self.periods)):
            raise ConfigError(f"periods must be finite, got {self.periods}")
        for name in ('period_ms', 'dt'):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ('pause_ms', 'coda_hold_ms', 'offset_ms'):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must not be negative, got {getattr(self, name)}")
        for name in ('delta_onset', 'delta_coda'):
            if not 0 < getattr(self, name) <= 1:
                raise ConfigError(f"{name} must lie in (0, 1], got {getattr(self, name)}")
        for value in (self.f0, self.f0 if self.f0_end is None else self.f0_end):
            if not F0_RANGE[0] <= value <= F0_RANGE[1]:
                raise ConfigError(f"f0 must lie in [{F0_RANGE[0]:.0f}, {F0_RANGE[1]:.0f}] Hz, got {value}")
        if self.sample_rate < MIN_SAMPLE_RATE:
            raise ConfigError(f"the sample rate must be at least {MIN_SAMPLE_RATE} Hz, got {self.sample_rate}")
        if self.jobs == 0:
            raise ConfigError("--jobs must not be 0")
        if self.rho is not None and not 0 <= self.rho <= 1:
            raise ConfigError(f"--rho must lie in [0, 1], got {self.rho}")
        for path in (self.inventory_path, self.map_path, self.psi_path):
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"no such file: {path}")
        if self.out_dir.exists() and not self.out_dir.is_dir():
            raise OutputError(f"{self.out_dir} exists and is not a directory")
        return self

    def word_options(self) -> WordOptions:
        return WordOptions(self.period_ms, self.pause_ms, self.delta_onset, self.delta_coda, self.coda_hold_ms,
                           self.nu, self.vowel_K, self.consonant_K, self.periods)

    def settings(self) -> SynthesisSettings:
        table: PsiTable = DEFAULT_PSI_TABLE if self.psi_path is None else load_psi_table(self.psi_path)
        inventory: PhonemeInventory = default_inventory() if self.inventory_path is None \
            else load_inventory(self.inventory_path)
        if self.map_path is not None:
            amap = load_articulatory_map(self.map_path, table)
        elif self.psi_path is not None:
            amap = ArticulatoryMap.default(table)
        else:
            amap = DEFAULT_MAP
        return SynthesisSettings(table, inventory, amap, self.word_options(), self.dt, self.f0, self.f0_end,
                                 self.sample_rate)


class ArgumentParser(argparse.ArgumentParser):
    """
    Reports usage errors as ConfigError instead of exiting.
    """

    def error(self, message):
        raise ConfigError(message)


def _periods(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated periods in ms, got {text!r}")


def _common_arguments() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--T', dest='period_ms', type=float, default=100.0, help='syllable period in ms')
    common.add_argument('--Tp', dest='pause_ms', type=float, default=150.0, help='pause between words in ms')
    common.add_argument('--delta-onset', type=float, default=None,
                        help=f'onset anchor scaling (default {DEFAULT_DELTA}, {LOCUS_DELTA_ONSET} for locus)')
    common.add_argument('--delta-coda', type=float, default=DEFAULT_DELTA, help='coda anchor scaling')
    common.add_argument('--coda-hold', dest='coda_hold_ms', type=float, default=0.0,
                        help='vowel hold of CVC syllables in ms')
    common.add_argument('--periods', type=_periods, default=None, help='per-syllable periods, e.g. 100,150')
    common.add_argument('--nu', type=int, default=DEFAULT_NU, help='number of spiral turns of vocalic arcs')
    common.add_argument('--vowel-k', dest='vowel_K', type=float, default=VOWEL_SHAPE_K)
    common.add_argument('--consonant-k', dest='consonant_K', type=float, default=CONSONANT_SHAPE_K)
    common.add_argument('--dt', type=float, default=1.0, help='frame period in ms')
    common.add_argument('--f0', type=float, default=DEFAULT_F0, help='fundamental frequency in Hz')
    common.add_argument('--f0-end', type=float, default=None, help='f0 at the end of the utterance')
    common.add_argument('--sample-rate', type=int, default=DEFAULT_SAMPLE_RATE)
    common.add_argument('--inventory', dest='inventory_path', type=Path, default=None)
    common.add_argument('--map', dest='map_path', type=Path, default=None)
    common.add_argument('--psi', dest='psi_path', type=Path, default=None)
    common.add_argument('--out-dir', type=Path, default=Path('.'))
    common.add_argument('--seed', type=int, default=None,
                        help='recorded in graph.json, locus.json and report.json; nothing is random')
    common.add_argument('--jobs', type=int, default=1, help='parallel jobs for independent syntheses')
    common.add_argument('--envelope', action='store_true', help='also write envelope.csv')
    common.add_argument('-v', '--verbose', action='count', default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_arguments()
    parser = ArgumentParser(prog='gestura', description='Articulatory speech synthesis from syllable graphs.')
    commands = parser.add_subparsers(dest='command', required=True)

    synth = commands.add_parser('synth', parents=[common], help='synthesize a word')
    synth.add_argument('word')

    locus = commands.add_parser('locus', parents=[common], help='locus equations of a consonant')
    locus.add_argument('consonant')
    locus.add_argument('--offset-ms', type=float, default=LOCUS_OFFSET_MS,
                       help='onset reading after the consonant marker')

    surface = commands.add_parser('surface', parents=[common], help='sample the formant surface')
    surface.add_argument('--n-rho', type=int, default=11)
    surface.add_argument('--n-theta', type=int, default=72)
    surface.add_argument('--rho', type=float, default=None, help='a single radius instead of the grid')
    surface.add_argument('--thetas', choices=['corners'], default=None, help="'corners': the /i a u/ angles")
    surface.add_argument('--track', default=None, help='also tabulate the distance of this word to the surface')

    transform = commands.add_parser('transform', parents=[common], help='verbal transformation')
    transform.add_argument('word', metavar='before')
    transform.add_argument('after')
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    arguments = vars(build_parser().parse_args(argv))
    if arguments['delta_onset'] is None:
        arguments['delta_onset'] = LOCUS_DELTA_ONSET if arguments['command'] == 'locus' else DEFAULT_DELTA
    return RunConfig(**arguments).validate()


def _surface_grid(config: RunConfig) -> Tuple[np.ndarray, np.ndarray]:
    rho, theta = surface_grid(config.n_rho, config.n_theta)
    if config.rho is not None:
        rho = np.array([config.rho])
    if config.thetas == 'corners':
        theta = np.array(CORNER_THETAS)
    return rho, theta


def run(config: RunConfig) -> List[Path]:
    """
    Runs the configured command and returns the paths it wrote.
    """
    settings = config.settings()
    out_dir = config.out_dir
    if config.command == 'synth':
        result = synthesize_word(config.word, settings, config.verbose)
        paths = write_synthesis(result, out_dir, config.envelope, config.seed)
        print(f"/{result.graph.transcription}/: {result.flow.n_frames} frames, "
              f"{result.waveform.duration_s:.3f} s")
    elif config.command == 'locus':
        table, regressions = locus_experiment(config.consonant, settings, offset_ms=config.offset_ms,
                                              n_jobs=config.jobs, verbose=config.verbose)
        paths = write_locus(table, regressions, out_dir, config.offset_ms, config.seed)
        for regression in regressions:
            print(f"/{config.consonant}/ {regression['group']} {regression['formant']}: "
                  f"slope={regression['slope']:.3f} intercept={regression['intercept']:.1f} "
                  f"r2={regression['r2']:.3f} n={regression['n']}")
    elif config.command == 'surface':
        rho, theta = _surface_grid(config)
        surface, distances = surface_experiment(rho, theta, settings, config.track, config.verbose)
        paths = {'surface.csv': out_dir / 'surface.csv'}
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            surface.to_csv(paths['surface.csv'], index=False, float_format='%.6f')
            if distances is not None:
                paths['track_distance.csv'] = out_dir / 'track_distance.csv'
                distances.to_csv(paths['track_distance.csv'], index=False, float_format='%.6f')
        except OSError as err:
            raise OutputError(f"cannot write surface results to {out_dir}: {err}") from err
        print(f"{len(surface)} surface points")
    else:
        result = transform_experiment(config.word, config.after, settings, config.verbose)
        paths = write_transform(result, out_dir, config.envelope, config.seed)
        report = result.report
        print(f"{report['rewrite']}: /{report['before']}/ -> /{report['after']}/, "
              f"nodes {report['node_delta']:+d}, duration {report['duration_delta_ms']:+g} ms")
    return list(paths.values())


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        run(parse_config(argv))
    except GesturaError as err:
        print(err.describe(), file=sys.stderr)
        return err.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
