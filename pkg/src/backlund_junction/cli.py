"""
COMMAND LINE - solve / sequence / verify / reservoir / reproduce

    python -m backlund_junction solve --bc neutral --c0 0.3333 --c1 0.6667 --lambda 0.5 --alpha-plus 0.8 --out run1
    python -m backlund_junction sequence --seed planck --c0 0.3333 --A 0.3333 --lambda2 0.01 --n-min -8 --n-max 8
    python -m backlund_junction verify --suite all

Settings come from the built-in defaults, then an optional key = value file (--config; an INI
[run] section and a section named after the subcommand are read), then the flags. The effective
settings are echoed into every JSON document.

Exit codes: 0 success, 1 usage or validation error, 2 solver did not converge, 3 verification failed.
"""
import argparse
import configparser
import logging
import os
import sys

import numpy as np
import pandas as pd

from backlund_junction.analysis import SolutionAnalyzer
from backlund_junction.bvp import (
    FAMILIES, FLUX_CONDITIONS, SCHEMES, BoundarySpec, MeshSolution, SolverConfig,
    assemble_full_domain, solve,
)
from backlund_junction.config import DEFAULT_SCAN_POINTS, FIGURES_DIR, RESERVOIR_DEBYE_SPAN, RESERVOIR_POINTS, SOLVER_DEFAULTS
from backlund_junction.errors import JunctionError, NonConvergence
from backlund_junction.exact_solutions import (
    RESERVOIR_MODES, RESERVOIR_SIDES, PlanckSeedParams, ReservoirProfile, matched_amplitude,
    planck_seed, reservoir_fields, reservoir_potential,
)
from backlund_junction.export_results import export_tables, read_json, write_result
from backlund_junction.model_core import ModelParams
from backlund_junction.transforms import SEQUENCE_FAMILIES, generate_sequence
from backlund_junction.verify import SUITES, format_table, run_suites

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGENCE = 2
EXIT_VERIFY_FAILED = 3

CONFIG_SECTION = 'run'


def _flag(value):
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


# (flag, dest, type, default, choices, help); defaults apply when neither the config file nor a flag sets a value
OPTIONS = {
    'solve': [
        ('--bc', 'bc', str, 'neutral', FAMILIES, 'boundary-condition family'),
        ('--c0', 'c0', float, None, None, 'concentration at x = 0 (neutral)'),
        ('--c1', 'c1', float, None, None, 'concentration at x = 1 (neutral)'),
        ('--cinf-left', 'cinf_left', float, None, None, 'left reservoir concentration (radiation, exact)'),
        ('--cinf-right', 'cinf_right', float, None, None, 'right reservoir concentration (radiation, exact)'),
        ('--lambda', 'lambda_', float, None, None, 'dimensionless Debye length of the slab'),
        ('--alpha-plus', 'alpha_plus', float, 0.5, None, 'diffusivity fraction of the cation'),
        ('--j0', 'j0', float, 0.0, None, 'prescribed current density'),
        ('--flux-condition', 'flux_condition', str, 'current', FLUX_CONDITIONS, 'fifth boundary datum'),
        ('--mesh', 'mesh', int, SOLVER_DEFAULTS['mesh_size'], None, 'number of mesh intervals'),
        ('--tol', 'tol', float, SOLVER_DEFAULTS['tolerance'], None, 'Newton residual tolerance'),
        ('--scheme', 'scheme', str, SOLVER_DEFAULTS['scheme'], SCHEMES, 'collocation scheme'),
        ('--out', 'out', str, 'solve_output', None, 'output directory'),
    ],
    'sequence': [
        ('--seed', 'seed', str, 'planck', None, "'planck' or the JSON document written by solve"),
        ('--c0', 'c0', float, None, None, 'Planck seed concentration at x = 0'),
        ('--A', 'A', float, None, None, 'Planck seed flux constant A+ = A-'),
        ('--lambda2', 'lambda2', float, None, None, 'lambda^2 of the Planck seed'),
        ('--alpha-plus', 'alpha_plus', float, 0.5, None, 'diffusivity fraction of the cation'),
        ('--n-min', 'n_min', int, 0, None, 'lowest member index'),
        ('--n-max', 'n_max', int, 0, None, 'highest member index'),
        ('--scan', 'scan', int, DEFAULT_SCAN_POINTS, None, 'positivity scan points'),
        ('--family', 'family', str, 'direct', SEQUENCE_FAMILIES, 'direct, conjugate or reflected sequence'),
        ('--profiles', 'profiles', _flag, False, None, 'also write one profile CSV per member'),
        ('--points', 'points', int, 201, None, 'points per profile CSV'),
        ('--out', 'out', str, 'sequence_output', None, 'output directory'),
    ],
    'verify': [
        ('--suite', 'suite', str, 'all', SUITES + ('all',), 'property suite to run'),
        ('--out', 'out', str, None, None, 'optional directory for verify.csv'),
    ],
    'reservoir': [
        ('--side', 'side', str, 'left', RESERVOIR_SIDES, 'reservoir side'),
        ('--mode', 'mode', str, 'exact', RESERVOIR_MODES, 'exact or linearized profile'),
        ('--cinf', 'cinf', float, None, None, 'far-field concentration'),
        ('--lambda', 'lambda_', float, None, None, 'dimensionless Debye length of the slab'),
        ('--amplitude', 'amplitude', float, None, None, 'exact-profile amplitude, |A| < 1'),
        ('--phi0', 'phi0', float, None, None, 'interface potential'),
        ('--span', 'span', float, RESERVOIR_DEBYE_SPAN, None, 'extent in reservoir Debye lengths'),
        ('--points', 'points', int, RESERVOIR_POINTS, None, 'number of points'),
        ('--out', 'out', str, 'reservoir_output', None, 'output directory'),
    ],
    'reproduce': [
        ('--out', 'out', str, FIGURES_DIR, None, 'output directory'),
    ],
}

REQUIRED = {
    'solve': ['lambda_'],
    'sequence': [],
    'verify': [],
    'reservoir': ['cinf', 'lambda_'],
    'reproduce': [],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage errors with exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog='backlund_junction', description='Steady two-ion junction: Backlund flux quantization')
    parser.add_argument('--config', help='key = value settings file')
    parser.add_argument('--verbose', action='store_true', help='debug logging on standard error')
    parser.add_argument('--xlsx', help='also write every table into this workbook')
    sub = parser.add_subparsers(dest='command', required=True)
    for command, options in OPTIONS.items():
        p = sub.add_parser(command)
        for flag, dest, kind, _, choices, text in options:
            if kind is _flag:
                p.add_argument(flag, dest=dest, action='store_const', const=True, default=None, help=text)
            else:
                p.add_argument(flag, dest=dest, type=kind, choices=choices, default=None, help=text)
        if command == 'solve':
            p.add_argument('--full-domain', dest='full_domain', action='store_const', const=True, default=None,
                           help='also write the reservoir profiles (radiation, exact)')
    return parser


def read_config(path):
    """Sections [run] and [<command>] of a key = value file; a file without sections is read as [run]"""
    with open(path, encoding='utf-8') as fh:
        text = fh.read()
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError:
        parser.read_string(f'[{CONFIG_SECTION}]\n{text}')
    return {section: {key.replace('-', '_'): value for key, value in parser.items(section)}
            for section in parser.sections()}


def effective_settings(args):
    """Defaults, overridden by the config file, overridden by the flags"""
    options = OPTIONS[args.command]
    settings = {dest: default for _, dest, _, default, _, _ in options}
    if args.command == 'solve':
        settings['full_domain'] = False
    if args.config:
        sections = read_config(args.config)
        from_file = {**sections.get(CONFIG_SECTION, {}), **sections.get(args.command, {})}
        kinds = {dest: (kind, choices) for _, dest, kind, _, choices, _ in options}
        kinds['full_domain'] = (_flag, None)
        aliases = {'lambda': 'lambda_', 'a': 'A'}
        for key, raw in from_file.items():
            key = aliases.get(key, key)
            if key not in kinds:
                logger.warning(f'ignoring unknown setting {key!r} in {args.config}')
                continue
            kind, choices = kinds[key]
            try:
                value = kind(raw)
            except ValueError as exc:
                raise UsageError(f'{key} = {raw!r} in {args.config}: {exc}') from exc
            if choices and value not in choices:
                raise UsageError(f'{key} must be one of {choices}, got {value!r}')
            settings[key] = value
    for key in settings:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    missing = [key for key in REQUIRED[args.command] if settings.get(key) is None]
    if missing:
        names = ', '.join('--' + key.rstrip('_').replace('_', '-') for key in missing)
        raise UsageError(f'missing required settings: {names}')
    return settings


def _settings_echo(settings):
    return {key.rstrip('_'): value for key, value in sorted(settings.items())}


def _boundary_spec(s):
    if s['bc'] == 'neutral':
        left, right = s['c0'], s['c1']
    else:
        left = s['cinf_left'] if s['cinf_left'] is not None else s['c0']
        right = s['cinf_right'] if s['cinf_right'] is not None else s['c1']
    if left is None or right is None:
        raise UsageError('boundary concentrations missing: --c0/--c1 or --cinf-left/--cinf-right')
    return BoundarySpec(s['bc'], left, right, s['j0'], s['flux_condition'])


def cmd_solve(settings, xlsx=None):
    spec = _boundary_spec(settings)
    params = ModelParams(settings['lambda_'], settings['alpha_plus'])
    cfg = SolverConfig(mesh_size=settings['mesh'], tolerance=settings['tol'], scheme=settings['scheme'])
    m = solve(spec, params, cfg)
    analyzer = SolutionAnalyzer(m, name=f'{spec.family} solve')
    results = analyzer.run_full_analysis()
    print(analyzer.get_report(), file=sys.stderr)

    out = settings['out']
    frames = {'solve': m.table()}
    doc = {'config': _settings_echo(settings), 'solution': m.as_dict(), 'analysis': results}
    if settings['full_domain']:
        profile = assemble_full_domain(m, spec)
        frames.update({'reservoir_left': profile.left, 'slab': profile.slab, 'reservoir_right': profile.right})
        doc['full_domain'] = {'reservoirs': profile.reservoirs, 'continuity': profile.continuity}
    write_result(doc, os.path.join(out, 'solve.json'))
    export_tables(frames, out, xlsx)
    return EXIT_OK


def _load_seed(settings):
    if settings['seed'] == 'planck':
        missing = [flag for flag, key in (('--c0', 'c0'), ('--A', 'A'), ('--lambda2', 'lambda2'))
                   if settings[key] is None]
        if missing:
            raise UsageError(f'the Planck seed needs {", ".join(missing)}')
        return planck_seed(PlanckSeedParams(settings['c0'], settings['A']),
                           ModelParams.from_lambda2(settings['lambda2'], settings['alpha_plus']))
    if not os.path.isfile(settings['seed']):
        raise UsageError(f"--seed must be 'planck' or an existing solve JSON, got {settings['seed']!r}")
    doc = read_json(settings['seed'])
    return MeshSolution.from_dict(doc.get('solution', doc))


def member_profiles(report, points):
    """One (x, c_plus, c_minus, E, regular) table per member; singular points carry NaN"""
    x = np.linspace(0.0, 1.0, points)
    frames = {}
    for n in sorted(report.members):
        sample = report.members[n].sample(x)
        mask = sample.regular
        frames[f'member_{n:+d}'] = pd.DataFrame({
            'x': x,
            'c_plus': np.where(mask, sample.c_plus, np.nan),
            'c_minus': np.where(mask, sample.c_minus, np.nan),
            'E': np.where(mask, sample.e, np.nan),
            'regular': mask,
        })
    return frames


def cmd_sequence(settings, xlsx=None):
    seed = _load_seed(settings)
    if settings['n_min'] > 0 or settings['n_max'] < 0:
        raise UsageError('need --n-min <= 0 <= --n-max')
    report = generate_sequence(seed, settings['n_min'], settings['n_max'], settings['scan'], settings['family'])
    out = settings['out']
    frames = {'sequence': report.table}
    if settings['profiles']:
        frames.update(member_profiles(report, settings['points']))
    doc = {'config': _settings_echo(settings), 'sequence': report.as_dict(), 'positive_reach': report.positive_reach()}
    write_result(doc, os.path.join(out, 'sequence.json'))
    export_tables(frames, out, xlsx)
    return EXIT_OK


def cmd_verify(settings, xlsx=None):
    table = run_suites(settings['suite'])
    print(format_table(table))
    if settings['out']:
        export_tables({'verify': table}, settings['out'], xlsx)
    failed = int((~table['passed']).sum())
    if failed:
        logger.error(f'{failed} verification checks failed')
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def reservoir_table(r, span, points):
    """(x, c_plus, c_minus, E, phi) over `span` Debye lengths from the interface"""
    depth = span * r.lambda0
    x = np.linspace(-depth, 0.0, points) if r.side == 'left' else np.linspace(1.0, 1.0 + depth, points)
    c_plus, c_minus, e = reservoir_fields(r, x)
    return pd.DataFrame({'x': x, 'c_plus': c_plus, 'c_minus': c_minus, 'E': e, 'phi': reservoir_potential(r, x)})


def cmd_reservoir(settings, xlsx=None):
    amplitude, phi0 = settings['amplitude'], settings['phi0']
    if settings['mode'] == 'exact':
        if amplitude is None:
            if phi0 is None:
                raise UsageError('exact mode needs --amplitude or --phi0')
            amplitude = matched_amplitude(phi0)
        r = ReservoirProfile(settings['side'], settings['cinf'], settings['lambda_'], amplitude=amplitude)
    else:
        if phi0 is None:
            raise UsageError('linearized mode needs --phi0')
        r = ReservoirProfile(settings['side'], settings['cinf'], settings['lambda_'], mode='linearized', phi0=phi0)
    table = reservoir_table(r, settings['span'], settings['points'])
    out = settings['out']
    write_result({'config': _settings_echo(settings), 'reservoir': r.as_dict()}, os.path.join(out, 'reservoir.json'))
    export_tables({'reservoir': table}, out, xlsx)
    return EXIT_OK


def cmd_reproduce(settings, xlsx=None):
    from backlund_junction.run_pipeline import run_full_pipeline

    failures = run_full_pipeline(settings['out'], xlsx)
    return EXIT_VERIFY_FAILED if failures else EXIT_OK


COMMANDS = {
    'solve': cmd_solve,
    'sequence': cmd_sequence,
    'verify': cmd_verify,
    'reservoir': cmd_reservoir,
    'reproduce': cmd_reproduce,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
    try:
        settings = effective_settings(args)
        return COMMANDS[args.command](settings, args.xlsx)
    except UsageError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    except NonConvergence as exc:
        print(f'error: {exc}', file=sys.stderr)
        for key, value in sorted(exc.diagnostics.items()):
            print(f'  {key}: {value}', file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (JunctionError, OSError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
