"""Acceptance values of the four figure cases"""
import numpy as np
import pytest

from conftest import solve_case
from backlund_junction.run_pipeline import (
    EXPECTED_POSITIVE_STATES, reproduce_airy, reproduce_ladder, reproduce_neutral, reproduce_reservoirs,
)


@pytest.fixture(scope='module')
def neutral_run():
    tables, summary, failures = {}, {}, []
    reproduce_neutral(tables, summary, failures)
    return tables, summary, failures


def test_fig1_ladder():
    tables, summary, failures = {}, {}, []
    reproduce_ladder(tables, summary, failures)
    assert failures == []
    assert summary['fig1']['positive_states'] == EXPECTED_POSITIVE_STATES
    assert summary['fig1']['stability']['positive_states'] == [7, 7, 7]
    ladder = tables['fig1_ladder']
    assert ladder['n'].tolist() == list(range(-8, 9))
    dimensional = tables['fig1_dimensional']
    steps = np.diff(dimensional['J'].to_numpy())
    np.testing.assert_allclose(steps, dimensional['delta_J'].iloc[0], rtol=1e-12)


def test_fig2_charge_neutral_fields(neutral_run):
    _, summary, failures = neutral_run
    assert failures == []
    left, right = summary['fig2_left'], summary['fig2_right']
    assert left['c0_E0'] == pytest.approx(0.15, abs=0.02)
    assert left['c1_E1'] == pytest.approx(0.25, abs=0.02)
    assert right['c0_E0'] == pytest.approx(-0.049, abs=0.005)
    assert right['c1_E1'] == pytest.approx(-0.083, abs=0.005)
    assert left['zero_current']['image']['positive']
    assert right['zero_current']['image']['positive']


def test_fig3_sign_patterns(neutral_run):
    _, summary, _ = neutral_run
    assert summary['fig3_left']['A_plus'] > 0 and summary['fig3_left']['A_minus'] > 0
    assert summary['fig3_right']['A_plus'] < 0 < summary['fig3_right']['A_minus']


def test_fig3_concentrations_stay_positive():
    for name in ('fig3_left', 'fig3_right'):
        m = solve_case(name)
        assert not m.negative_concentration


def test_fig4_reservoirs():
    tables, summary, failures = {}, {}, []
    reproduce_reservoirs(tables, summary, failures)
    assert failures == []
    continuity = summary['fig4']['continuity']
    assert max(continuity['jump_left'], continuity['jump_right']) < 1e-8
    linear, exact = tables['fig4_left'], tables['fig4_exact_reservoir']
    np.testing.assert_allclose(exact['x'], linear['x'])
    # the linearized profile is first order in the interface potential
    phi0 = summary['fig4']['reservoirs']['left']['phi0']
    c_inf = summary['fig4']['reservoirs']['left']['c_infinity']
    assert np.max(np.abs(exact['c_plus'] - linear['c_plus'])) < 2 * c_inf * phi0 ** 2 + 1e-12


def test_airy_seed_tables():
    tables, summary, failures = {}, {}, []
    reproduce_airy(tables, summary, failures)
    assert summary['airy_seed']['A_plus'] == 0.0
    assert summary['airy_seed']['image_A_plus'] == pytest.approx(summary['airy_seed']['image_A_minus'])
    assert list(tables['airy_seed'].columns) == ['x', 'c_plus', 'c_minus', 'E']
