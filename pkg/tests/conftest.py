import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

from backlund_junction.bvp import BoundarySpec, solve  # noqa: E402
from backlund_junction.config import FIGURE_CASES  # noqa: E402
from backlund_junction.exact_solutions import PlanckSeedParams, planck_seed  # noqa: E402
from backlund_junction.model_core import ModelParams  # noqa: E402

settings.register_profile('default', max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile('ci', max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'default'))


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: full-size random sweeps; deselect with -m "not slow"')


def assert_same_solution(a, b, points=None, rtol=1e-12):
    """Fields and flux constants of two solutions agree at the common regular points"""
    x = np.linspace(0.0, 1.0, 11) if points is None else points
    sa, sb = a.sample(x), b.sample(x)
    both = sa.regular & sb.regular
    assert both.any()
    for u, v in ((sa.c_plus, sb.c_plus), (sa.c_minus, sb.c_minus), (sa.e, sb.e)):
        scale = max(1.0, float(np.max(np.abs(v[both]))))
        assert np.max(np.abs(u[both] - v[both])) <= rtol * scale
    assert a.a_plus == pytest.approx(b.a_plus, abs=rtol)
    assert a.a_minus == pytest.approx(b.a_minus, abs=rtol)


@pytest.fixture(scope='session')
def fig1():
    return FIGURE_CASES['fig1_ladder']


@pytest.fixture(scope='session')
def planck(fig1):
    return planck_seed(PlanckSeedParams(fig1['c0'], fig1['A']), ModelParams.from_lambda2(fig1['lambda2']))


def solve_case(name, **overrides):
    case = {**FIGURE_CASES[name], **overrides}
    if case['bc'] == 'neutral':
        spec = BoundarySpec.charge_neutral(case['c0'], case['c1'], case['j0'], case.get('flux_condition', 'current'))
    else:
        spec = BoundarySpec(case['bc'], case['c0'], case['c1'], case['j0'])
    return solve(spec, ModelParams(case['lambda'], case['alpha_plus']))


@pytest.fixture(scope='session')
def fig2_left():
    return solve_case('fig2_left')


@pytest.fixture(scope='session')
def fig2_right():
    return solve_case('fig2_right')


@pytest.fixture(scope='session')
def a_plus_zero_solution():
    return solve_case('fig2_left', flux_condition='a_plus_zero')
