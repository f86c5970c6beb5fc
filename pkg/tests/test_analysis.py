from types import SimpleNamespace

import numpy as np
import pytest

from conftest import solve_case
from backlund_junction.analysis import (
    SWEEP_COLUMNS, SolutionAnalyzer, bc_noninvariance_demo, count_positive_states, first_integral_variation,
    j_zero_transform_positivity, ladder_spacing_defect, positivity_count_stability, positivity_scan,
    sign_lemma_check, sign_lemma_sweep,
)
from backlund_junction.bvp import BoundarySpec, solve
from backlund_junction.errors import AllSingular, PreconditionFailed
from backlund_junction.exact_solutions import rational_member
from backlund_junction.model_core import FieldSample, ModelParams, SolutionState
from backlund_junction.transforms import backlund, conjugate, generate_sequence


class Nowhere(SolutionState):
    provenance = 'nowhere'

    def _sample(self, x):
        zeros = np.zeros_like(x)
        return FieldSample(x, zeros, zeros, zeros, np.zeros(x.shape, dtype=bool))


class OnePole(SolutionState):
    provenance = 'one pole'

    def _sample(self, x):
        ones = np.ones_like(x)
        return FieldSample(x, ones, ones, np.zeros_like(x), np.abs(x - 0.5) > 1e-9)


class TestPositivityScan:
    def test_planck_seed(self, planck, fig1):
        report = positivity_scan(planck, 101)
        assert report.positive
        assert report.min_c_plus == pytest.approx(fig1['c0'])
        assert report.argmin_c_plus == 0.0
        assert report.singular_points == 0

    def test_ladder_edge(self, planck):
        assert positivity_scan(rational_member(planck.seed, planck.params, 7)).positive
        assert not positivity_scan(rational_member(planck.seed, planck.params, 8)).positive

    def test_conjugate_swaps_minima(self, planck):
        member = rational_member(planck.seed, planck.params, 3)
        report, swapped = positivity_scan(member, 201), positivity_scan(conjugate(member), 201)
        assert swapped.min_c_plus == pytest.approx(report.min_c_minus)
        assert swapped.min_c_minus == pytest.approx(report.min_c_plus)

    def test_all_singular(self):
        with pytest.raises(AllSingular):
            positivity_scan(Nowhere(0.1, 0.1, ModelParams(0.5)), 11)

    def test_pole_on_grid_is_not_positive(self):
        report = positivity_scan(OnePole(0.1, 0.1, ModelParams(0.5)), 11)
        assert report.singular_points == 1
        assert report.min_c_plus == 1.0 and report.min_c_minus == 1.0
        assert not report.positive


class TestSignLemma:
    @pytest.mark.parametrize('name', ['fig3_left', 'fig3_right', 'fig2_left'])
    def test_holds(self, name):
        assert sign_lemma_check(solve_case(name))

    def test_needs_neutral_data(self):
        stub = SimpleNamespace(spec=BoundarySpec.radiation(1 / 3, 2 / 3), a_plus=-0.1, a_minus=-0.2)
        with pytest.raises(PreconditionFailed):
            sign_lemma_check(stub)

    def test_sweep(self):
        table = sign_lemma_sweep(cases=4, random_state=3)
        assert list(table.columns) == SWEEP_COLUMNS
        assert len(table) == 4
        converged = table[table['converged']]
        assert not converged.empty
        assert converged['lemma_holds'].astype(bool).all()
        assert converged['positive'].astype(bool).all()
        np.testing.assert_allclose(converged['c0'] + converged['c1'], 1.0)

    @pytest.mark.slow
    def test_full_sweep(self):
        table = sign_lemma_sweep(cases=20, random_state=0)
        assert len(table) == 20
        converged = table[table['converged']]
        assert not converged.empty
        assert converged['lemma_holds'].astype(bool).all()
        assert converged['positive'].astype(bool).all()


class TestZeroCurrent:
    def test_more_mobile_cation(self, fig2_left):
        report = j_zero_transform_positivity(fig2_left, 201)
        assert report.direction == 'backlund'
        assert report.sign_condition
        assert report.source.positive and report.image.positive

    def test_more_mobile_anion(self, fig2_right):
        report = j_zero_transform_positivity(fig2_right, 201)
        assert report.direction == 'backlund_inv'
        assert report.sign_condition
        assert report.image.positive

    def test_equal_mobilities(self):
        m = solve(BoundarySpec.charge_neutral(1 / 3, 2 / 3), ModelParams(0.5, 0.5))
        report = j_zero_transform_positivity(m, 51)
        assert report.direction == 'conjugate'
        assert report.image.positive

    def test_needs_zero_current(self):
        with pytest.raises(PreconditionFailed):
            j_zero_transform_positivity(solve_case('fig3_left'))


class TestNeutralityDefects:
    def test_planck_image_is_not_neutral(self, planck):
        defects = bc_noninvariance_demo(planck)
        assert defects.defect_left != pytest.approx(0.0, abs=1e-6)
        assert defects.defect_left == pytest.approx(defects.predicted_left, rel=1e-8)
        assert not defects.reduces_to_conjugate

    def test_numeric_source(self, fig2_left):
        defects = bc_noninvariance_demo(fig2_left)
        assert defects.defect_left == pytest.approx(defects.predicted_left, rel=1e-6, abs=1e-9)

    def test_vanishing_cation_flux(self, a_plus_zero_solution):
        defects = bc_noninvariance_demo(a_plus_zero_solution)
        assert defects.reduces_to_conjugate
        assert defects.defect_left == pytest.approx(0.0, abs=1e-8)
        assert defects.defect_right == pytest.approx(0.0, abs=1e-8)

    def test_needs_neutral_faces(self, planck):
        with pytest.raises(PreconditionFailed):
            bc_noninvariance_demo(backlund(planck))


class TestLadderHelpers:
    def test_positive_state_count(self, planck):
        assert count_positive_states(planck, 8, 251) == 7

    def test_count_is_stable_under_refinement(self, planck):
        table = positivity_count_stability(planck, 8)
        assert table['positive_states'].tolist() == [7, 7, 7]

    def test_spacing_and_first_integral(self, planck):
        report = generate_sequence(planck, -3, 3, scan_points=51)
        assert ladder_spacing_defect(report) < 1e-12
        assert first_integral_variation(report.members[2]) < 1e-8


def test_analyzer_report(fig2_left):
    analyzer = SolutionAnalyzer(fig2_left, name='fig2 left')
    results = analyzer.run_full_analysis()
    assert results['positivity']['positive']
    assert results['sign_lemma'] is True
    assert results['monotonicity'] == 'decreasing'
    assert results['zero_current']['direction'] == 'backlund'
    text = analyzer.get_report()
    assert 'SOLUTION REPORT - fig2 left' in text
    assert '✓ Concentrations positive' in text
    assert '⚠' not in text
