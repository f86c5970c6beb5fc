import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import assert_same_solution
from backlund_junction.errors import (
    ConstraintViolation, DomainError, IdenticallyZeroField,
)
from backlund_junction.exact_solutions import (
    AirySeedParams, PlanckSeedParams, airy_seed, airy_seed_minus, first_excited_state, planck_seed,
)
from backlund_junction.model_core import DimensionalParams, ModelParams, dimensionalize, invariants_of, physical_current
from backlund_junction.transforms import (
    Conjugated, TransformKind, backlund, backlund_inv, conjugate, current_ladder_dimensional,
    gambier_minus, gambier_minus_inv, gambier_plus, gambier_plus_inv, generate_sequence, iterate_backlund,
    quantized_fluxes, quantized_physical_fluxes, reflect, seed_normalization,
)

seeds = st.builds(
    lambda c0, a, lam, alpha: planck_seed(PlanckSeedParams(c0, a), ModelParams(lam, alpha)),
    st.floats(0.1, 1.0), st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.05, 0.95),
)


class TestGroupRelations:
    @given(seeds)
    def test_involutions(self, s):
        assert_same_solution(conjugate(conjugate(s)), s)
        assert_same_solution(reflect(reflect(s)), s)

    @given(seeds)
    def test_backlund_inverse(self, s):
        assert_same_solution(backlund_inv(backlund(s)), s, rtol=1e-11)
        assert_same_solution(backlund(backlund_inv(s)), s, rtol=1e-11)

    @given(seeds)
    def test_commutation(self, s):
        assert_same_solution(conjugate(backlund(s)), backlund_inv(conjugate(s)))
        assert_same_solution(reflect(backlund(s)), backlund(reflect(s)))
        assert_same_solution(reflect(backlund_inv(s)), backlund_inv(reflect(s)))

    def test_numeric_solution(self, fig2_left):
        assert_same_solution(backlund_inv(backlund(fig2_left)), fig2_left, rtol=1e-11)
        assert_same_solution(reflect(backlund(fig2_left)), backlund(reflect(fig2_left)))


class TestInvariants:
    @given(seeds)
    def test_first_integral_and_theta(self, s):
        inv = invariants_of(s)
        for image in (conjugate(s), backlund(s), backlund_inv(s)):
            moved = invariants_of(image)
            assert moved.B == pytest.approx(inv.B, abs=1e-10)
            assert moved.theta == pytest.approx(inv.theta, abs=1e-12)

    @given(seeds)
    def test_reflection_shifts_first_integral(self, s):
        inv = invariants_of(s)
        moved = invariants_of(reflect(s))
        assert moved.B == pytest.approx(inv.B + inv.theta, abs=1e-10)
        assert moved.theta == pytest.approx(-inv.theta)

    def test_flux_constant_maps(self, planck):
        a = planck.a_plus
        assert (backlund(planck).a_plus, backlund(planck).a_minus) == pytest.approx((3 * a, -a))
        assert (backlund_inv(planck).a_plus, backlund_inv(planck).a_minus) == pytest.approx((-a, 3 * a))
        assert (reflect(planck).a_plus, reflect(planck).a_minus) == (-a, -a)


def test_first_excited_state_matches_closed_form(planck):
    assert_same_solution(backlund(planck), first_excited_state(planck.seed, planck.params, up=True))
    assert_same_solution(backlund_inv(planck), first_excited_state(planck.seed, planck.params, up=False))


def test_backlund_reduces_to_conjugation(fig1):
    seed = airy_seed(AirySeedParams(fig1['c0'], fig1['A']), ModelParams.from_lambda2(fig1['lambda2']))
    image = backlund(seed)
    assert isinstance(image, Conjugated)
    assert image.tag.kind is TransformKind.C
    assert isinstance(backlund_inv(conjugate(seed)), Conjugated)


def test_depth_cap(planck):
    assert iterate_backlund(planck, 3, max_depth=3).depth == 3
    with pytest.raises(DomainError):
        iterate_backlund(planck, 4, max_depth=3)


class TestGambier:
    def test_preconditions(self, planck):
        with pytest.raises(ConstraintViolation):
            gambier_plus(planck)
        with pytest.raises(ConstraintViolation):
            gambier_plus_inv(backlund(planck))
        with pytest.raises(IdenticallyZeroField):
            gambier_plus_inv(planck)

    def test_airy_seed_image_is_planck(self, fig1):
        p = AirySeedParams(fig1['c0'], fig1['A'])
        params = ModelParams.from_lambda2(fig1['lambda2'])
        expected = planck_seed(PlanckSeedParams(fig1['c0'], fig1['A']), params)
        assert_same_solution(gambier_plus(airy_seed(p, params)), expected, rtol=1e-10)
        assert_same_solution(gambier_minus(airy_seed_minus(p, params)), expected, rtol=1e-10)

    def test_round_trip_on_numeric_solution(self, a_plus_zero_solution):
        source = a_plus_zero_solution
        image = gambier_plus(source)
        assert image.a_plus == image.a_minus == pytest.approx(-source.a_minus / 4)
        assert np.all(image.sample(np.linspace(0, 1, 21)).e > 0)
        assert_same_solution(gambier_plus_inv(image), source, rtol=1e-6)
        assert_same_solution(gambier_plus(gambier_plus_inv(image)), image, rtol=1e-6)

    def test_minus_inverse_is_conjugate_of_plus_inverse(self, a_plus_zero_solution):
        image = gambier_plus(a_plus_zero_solution)
        assert_same_solution(gambier_minus_inv(image), conjugate(gambier_plus_inv(image)))


class TestLadder:
    @given(st.floats(-2, 2), st.floats(-2, 2), st.integers(-10, 10), st.floats(0.05, 0.95))
    def test_spacing(self, a_plus, a_minus, n, alpha):
        step, nxt = (quantized_fluxes(a_plus, a_minus, n=k, alpha_plus=alpha) for k in (n, n + 1))
        theta = a_plus + a_minus
        if theta == 0:
            assert step.degenerate
            return
        assert step.a_plus + step.a_minus == pytest.approx(theta, abs=1e-12)
        assert nxt.j - step.j == pytest.approx(-theta, abs=1e-12)

    def test_fig1_current(self, fig1):
        a = fig1['A']
        for n in range(-10, 11):
            step = quantized_fluxes(a, a, n=n, alpha_plus=0.4)
            assert step.a_plus == pytest.approx((2 * n + 1) * a)
            assert step.a_minus == pytest.approx((1 - 2 * n) * a)
            assert step.j == pytest.approx(-((2 * n + 1) * 0.4 + (2 * n - 1) * 0.6) * a)

    @pytest.mark.parametrize('a_plus, a_minus', [(5.0, -1.0), (-3.0, 1.0), (0.2, 0.1)])
    def test_seed_normalization(self, a_plus, a_minus):
        theta, phi, shift = seed_normalization(a_plus, a_minus)
        assert -abs(theta) <= phi < abs(theta)
        step = quantized_fluxes(a_plus, a_minus, n=shift)
        assert step.a_plus - step.a_minus == pytest.approx(phi)

    def test_physical_ladder_matches_dimensionless(self):
        d = DimensionalParams(delta=1e-4, D_plus=1.33e-5, D_minus=2.03e-5)
        a_plus, a_minus = 0.3, -0.1
        f0 = dimensionalize(d, a_plus, a_minus)
        table = current_ladder_dimensional(d, f0, range(-3, 4))
        for n in range(-3, 4):
            step = quantized_fluxes(a_plus, a_minus, n=n)
            expected = dimensionalize(d, step.a_plus, step.a_minus)
            got = quantized_physical_fluxes(f0.phi_plus, f0.phi_minus, d.D_plus, d.D_minus, n)
            assert got.phi_plus == pytest.approx(expected.phi_plus)
            assert got.phi_minus == pytest.approx(expected.phi_minus)
            row = table.loc[table['n'] == n].iloc[0]
            assert row['J'] == pytest.approx(physical_current(d, got))


class TestSequences:
    def test_fig1_positivity_window(self, planck, fig1):
        report = generate_sequence(planck, fig1['n_min'], fig1['n_max'])
        assert report.positive_reach() == 7
        assert not report.row(8)['positive']
        assert not report.row(-8)['positive']
        assert report.row(7)['positive'] and report.row(-7)['positive']

    def test_table_constants_match_members(self, planck):
        report = generate_sequence(planck, -4, 4, scan_points=101)
        params = planck.params
        for n, member in report.members.items():
            row = report.row(n)
            assert (row['A_plus'], row['A_minus']) == (member.a_plus, member.a_minus)
            step = quantized_fluxes(planck.a_plus, planck.a_minus, n=n,
                                    alpha_plus=params.alpha_plus, alpha_minus=params.alpha_minus)
            assert row['A_plus'] == pytest.approx(step.a_plus, rel=1e-12, abs=1e-14)
            assert row['A_minus'] == pytest.approx(step.a_minus, rel=1e-12, abs=1e-14)
            assert row['j'] == pytest.approx(step.j, rel=1e-12, abs=1e-14)
        assert report.B == pytest.approx(invariants_of(planck).B)

    def test_single_row(self, planck):
        report = generate_sequence(planck, 0, 0, scan_points=51)
        assert len(report.table) == 1
        assert report.members[0] is planck
        assert bool(report.row(0)['positive'])

    def test_reflected_family(self, planck):
        report = generate_sequence(planck, -1, 1, scan_points=51, family='reflected')
        inv = invariants_of(planck)
        assert report.theta == pytest.approx(-inv.theta)
        assert report.B == pytest.approx(inv.B + inv.theta)

    def test_conjugate_family(self, planck):
        report = generate_sequence(planck, -2, 2, scan_points=51, family='conjugate')
        assert_same_solution(report.members[1], conjugate(backlund_inv(planck)))

    def test_rejects_bad_ranges(self, planck):
        with pytest.raises(DomainError):
            generate_sequence(planck, 1, 3)
        with pytest.raises(DomainError):
            generate_sequence(planck, 0, 1, family='sideways')
