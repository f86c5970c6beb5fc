import json
import os

import pandas as pd
import pytest

from backlund_junction import cli
from backlund_junction.errors import NonConvergence

FIG2_LEFT = ['solve', '--bc', 'neutral', '--c0', '0.3333333333333333', '--c1', '0.6666666666666666',
             '--lambda', '0.5', '--alpha-plus', '0.8']


def run(argv, out):
    return cli.main(argv + ['--out', str(out)])


class TestSolve:
    def test_writes_results(self, tmp_path):
        assert run(FIG2_LEFT, tmp_path) == cli.EXIT_OK
        doc = json.loads((tmp_path / 'solve.json').read_text())
        assert doc['config']['lambda'] == 0.5
        assert doc['config']['alpha_plus'] == 0.8
        assert doc['analysis']['monotonicity'] == 'decreasing'
        assert (tmp_path / 'solve.meta.json').exists()
        table = pd.read_csv(tmp_path / 'solve.csv')
        assert list(table.columns) == ['x', 'c_plus', 'c_minus', 'E']
        assert (table['E'] > 0).all()
        assert not [name for name in os.listdir(tmp_path) if name.startswith('.tmp-')]

    def test_output_is_deterministic(self, tmp_path):
        assert run(FIG2_LEFT, tmp_path) == cli.EXIT_OK
        first = [(tmp_path / name).read_bytes() for name in ('solve.json', 'solve.csv')]
        assert run(FIG2_LEFT, tmp_path) == cli.EXIT_OK
        assert [(tmp_path / name).read_bytes() for name in ('solve.json', 'solve.csv')] == first

    @pytest.mark.parametrize('argv', [
        ['solve', '--c0', '0.3', '--c1', '0.6', '--lambda', '0.5', '--alpha-plus', '1.2'],
        ['solve', '--c0', '0.3', '--c1', '0.6'],
        ['solve', '--c0', '0.6', '--c1', '0.3', '--lambda', '0.5'],
        ['solve', '--lambda', '0.5'],
        ['solve', '--lambda', '0.5', '--bc', 'dirichlet'],
        ['solve', '--lambda', 'half'],
    ])
    def test_usage_errors(self, tmp_path, argv):
        assert run(argv, tmp_path) == cli.EXIT_USAGE

    def test_nonconvergence(self, tmp_path, monkeypatch, capsys):
        def failing(spec, params, cfg=None):
            raise NonConvergence('no convergence in 50 iterations', {'iterations': 50, 'residual_norm': 1.5})

        monkeypatch.setattr(cli, 'solve', failing)
        assert run(FIG2_LEFT, tmp_path) == cli.EXIT_NONCONVERGENCE
        err = capsys.readouterr().err
        assert 'residual_norm: 1.5' in err
        assert not (tmp_path / 'solve.json').exists()

    def test_full_domain(self, tmp_path):
        argv = ['solve', '--bc', 'radiation', '--cinf-left', '0.3333333333333333', '--cinf-right',
                '0.6666666666666666', '--lambda', '0.7', '--alpha-plus', '0.4', '--j0', '0.16', '--full-domain']
        assert run(argv, tmp_path) == cli.EXIT_OK
        for name in ('solve', 'reservoir_left', 'slab', 'reservoir_right'):
            assert (tmp_path / f'{name}.csv').exists()
        doc = json.loads((tmp_path / 'solve.json').read_text())
        assert doc['full_domain']['continuity']['jump_left'] < 1e-8

    def test_workbook(self, tmp_path):
        xlsx = tmp_path / 'tables.xlsx'
        assert cli.main(['--xlsx', str(xlsx)] + FIG2_LEFT + ['--out', str(tmp_path)]) == cli.EXIT_OK
        assert pd.ExcelFile(xlsx).sheet_names == ['solve']


class TestConfig:
    def test_file_without_header(self, tmp_path):
        config = tmp_path / 'run.cfg'
        config.write_text('c0 = 0.3333333333333333\nc1 = 0.6666666666666666\nlambda = 0.5\nalpha_plus = 0.4\n')
        out = tmp_path / 'out'
        assert cli.main(['--config', str(config), 'solve', '--alpha-plus', '0.8', '--out', str(out)]) == cli.EXIT_OK
        doc = json.loads((out / 'solve.json').read_text())
        assert doc['config']['alpha_plus'] == 0.8
        assert doc['config']['lambda'] == 0.5

    def test_command_section_overrides_run_section(self, tmp_path):
        config = tmp_path / 'run.ini'
        config.write_text('[run]\nn_max = 1\n[sequence]\nn_max = 2\nc0 = 0.3333333333333333\nA = 0.3333333333333333\n'
                          'lambda2 = 0.01\n')
        args = cli.build_parser().parse_args(['--config', str(config), 'sequence'])
        settings = cli.effective_settings(args)
        assert settings['n_max'] == 2
        assert settings['c0'] == pytest.approx(1 / 3)
        assert settings['A'] == pytest.approx(1 / 3)

    def test_bad_value(self, tmp_path):
        config = tmp_path / 'run.cfg'
        config.write_text('mesh = many\n')
        assert cli.main(['--config', str(config), 'solve', '--lambda', '0.5']) == cli.EXIT_USAGE


class TestSequence:
    PLANCK = ['sequence', '--seed', 'planck', '--c0', '0.3333333333333333', '--A', '0.3333333333333333',
              '--lambda2', '0.01']

    def test_ladder(self, tmp_path):
        argv = self.PLANCK + ['--n-min', '-8', '--n-max', '8', '--scan', '251']
        assert run(argv, tmp_path) == cli.EXIT_OK
        doc = json.loads((tmp_path / 'sequence.json').read_text())
        assert doc['positive_reach'] == 7
        table = pd.read_csv(tmp_path / 'sequence.csv')
        assert table['n'].tolist() == list(range(-8, 9))
        positive = dict(zip(table['n'], table['positive']))
        assert positive[7] and positive[-7] and not positive[8]

    def test_single_member_with_profiles(self, tmp_path):
        assert run(self.PLANCK + ['--scan', '51', '--profiles', '--points', '11'], tmp_path) == cli.EXIT_OK
        assert len(pd.read_csv(tmp_path / 'sequence.csv')) == 1
        profile = pd.read_csv(tmp_path / 'member_+0.csv')
        assert list(profile.columns) == ['x', 'c_plus', 'c_minus', 'E', 'regular']
        assert len(profile) == 11

    def test_seed_from_solve_output(self, tmp_path):
        assert run(FIG2_LEFT, tmp_path / 'solve') == cli.EXIT_OK
        argv = ['sequence', '--seed', str(tmp_path / 'solve' / 'solve.json'), '--n-min', '-1', '--n-max', '1',
                '--scan', '101']
        assert run(argv, tmp_path / 'seq') == cli.EXIT_OK
        assert len(pd.read_csv(tmp_path / 'seq' / 'sequence.csv')) == 3

    @pytest.mark.parametrize('extra', [['--n-min', '1', '--n-max', '2'], ['--family', 'sideways']])
    def test_usage_errors(self, tmp_path, extra):
        assert run(self.PLANCK + extra, tmp_path) == cli.EXIT_USAGE

    def test_planck_needs_parameters(self, tmp_path):
        assert run(['sequence', '--c0', '0.3'], tmp_path) == cli.EXIT_USAGE


class TestVerify:
    def test_suite_passes(self, tmp_path, capsys):
        assert run(['verify', '--suite', 'reservoir'], tmp_path) == cli.EXIT_OK
        assert 'reservoir' in capsys.readouterr().out
        table = pd.read_csv(tmp_path / 'verify.csv')
        assert table['passed'].all()

    def test_failure_exit_code(self, tmp_path, monkeypatch):
        failing = pd.DataFrame([{'suite': 'airy', 'check': 'wronskian', 'value': 1.0, 'tolerance': 1e-12,
                                 'passed': False}])
        monkeypatch.setattr(cli, 'run_suites', lambda suite: failing)
        assert run(['verify'], tmp_path) == cli.EXIT_VERIFY_FAILED


class TestReservoir:
    def test_exact_profile(self, tmp_path):
        argv = ['reservoir', '--side', 'right', '--cinf', '0.5', '--lambda', '1.0', '--amplitude', '0.2',
                '--points', '21']
        assert run(argv, tmp_path) == cli.EXIT_OK
        table = pd.read_csv(tmp_path / 'reservoir.csv')
        assert list(table.columns) == ['x', 'c_plus', 'c_minus', 'E', 'phi']
        assert len(table) == 21
        assert table['x'].iloc[0] == 1.0
        assert (table['c_plus'] * table['c_minus']).to_numpy() == pytest.approx(0.25, abs=1e-12)

    def test_linearized_profile(self, tmp_path):
        argv = ['reservoir', '--mode', 'linearized', '--cinf', '0.5', '--lambda', '1.0', '--phi0', '0.01']
        assert run(argv, tmp_path) == cli.EXIT_OK
        doc = json.loads((tmp_path / 'reservoir.json').read_text())
        assert doc['reservoir']['mode'] == 'linearized'

    @pytest.mark.parametrize('extra', [[], ['--amplitude', '1.5']])
    def test_usage_errors(self, tmp_path, extra):
        argv = ['reservoir', '--cinf', '0.5', '--lambda', '1.0'] + extra
        assert run(argv, tmp_path) == cli.EXIT_USAGE
