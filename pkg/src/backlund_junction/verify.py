"""
VERIFY - Property suites run by `python -m backlund_junction verify`

Each suite returns rows (suite, check, value, tolerance, passed); value is the measured defect.
  group      group relations of C, R, B, B^-1, invariance of (B, theta), Gambier round trip, flux ladder
  residuals  ODE and Painleve residuals of exact and numeric solutions, first-integral constancy
  reservoir  interface identities and Poisson-Boltzmann residual of the exact reservoir profile
  airy       Wronskian, Airy ODE, Airy seed constants and its Gambier image
"""
import logging
import math
from functools import lru_cache

import numpy as np
import pandas as pd

from backlund_junction.analysis import first_integral_variation, ladder_spacing_defect
from backlund_junction.bvp import BoundarySpec, solve
from backlund_junction.config import FIGURE_CASES
from backlund_junction.exact_solutions import (
    AirySeedParams, PlanckSeedParams, ReservoirProfile, airy_seed, first_excited_state,
    interface_concentrations, planck_seed, poisson_boltzmann_residual, rational_member,
    reservoir_exact,
)
from backlund_junction.model_core import (
    ModelParams, invariants_of, painleve_residual, system_residual,
)
from backlund_junction.specfun import airy_array, wronskian
from backlund_junction.transforms import (
    backlund, backlund_inv, conjugate, gambier_plus, gambier_plus_inv, generate_sequence,
    quantized_fluxes, reflect,
)

logger = logging.getLogger(__name__)

SUITES = ('group', 'residuals', 'reservoir', 'airy')
CHECK_COLUMNS = ['suite', 'check', 'value', 'tolerance', 'passed']

GROUP_TOL = 1e-12
INVARIANT_TOL = 1e-10
FIRST_INTEGRAL_TOL = 1e-8
RESIDUAL_TOL = 1e-8
MESH_RESIDUAL_TOL = 1e-6
MESH_PAINLEVE_TOL = 1e-5
IDENTITY_POINTS = np.linspace(0.0, 1.0, 11)
INTERIOR_POINTS = np.linspace(0.1, 0.9, 9)


def _row(suite, check, value, tolerance):
    value = float(value)
    return {'suite': suite, 'check': check, 'value': value, 'tolerance': tolerance,
            'passed': bool(math.isfinite(value) and value <= tolerance)}


@lru_cache(maxsize=None)
def _planck():
    case = FIGURE_CASES['fig1_ladder']
    return planck_seed(PlanckSeedParams(case['c0'], case['A']), ModelParams.from_lambda2(case['lambda2']))


@lru_cache(maxsize=None)
def _neutral(flux_condition='current'):
    case = FIGURE_CASES['fig2_left']
    spec = BoundarySpec.charge_neutral(case['c0'], case['c1'], case['j0'], flux_condition)
    return solve(spec, ModelParams(case['lambda'], case['alpha_plus']))


def field_defect(a, b, points=IDENTITY_POINTS):
    """Largest scaled difference of (c+, c-, E, A+, A-) between two solutions at their common regular points"""
    sa, sb = a.sample(points), b.sample(points)
    both = sa.regular & sb.regular
    if not both.any():
        return math.inf
    worst = 0.0
    for u, v in ((sa.c_plus, sb.c_plus), (sa.c_minus, sb.c_minus), (sa.e, sb.e)):
        scale = max(1.0, float(np.max(np.abs(v[both]))))
        worst = max(worst, float(np.max(np.abs(u[both] - v[both]))) / scale)
    constants = max(abs(a.a_plus - b.a_plus), abs(a.a_minus - b.a_minus)) / max(1.0, abs(b.a_plus), abs(b.a_minus))
    return max(worst, constants)


def _group_rows(label, s):
    pairs = {
        'C^2 = I': (conjugate(conjugate(s)), s),
        'R^2 = I': (reflect(reflect(s)), s),
        'B^-1 B = I': (backlund_inv(backlund(s)), s),
        'B B^-1 = I': (backlund(backlund_inv(s)), s),
        'C B = B^-1 C': (conjugate(backlund(s)), backlund_inv(conjugate(s))),
        'R B = B R': (reflect(backlund(s)), backlund(reflect(s))),
        'R B^-1 = B^-1 R': (reflect(backlund_inv(s)), backlund_inv(reflect(s))),
    }
    return [_row('group', f'{label}: {name}', field_defect(u, v), GROUP_TOL) for name, (u, v) in pairs.items()]


def _invariant_rows(label, s):
    inv = invariants_of(s)
    rows = []
    for name, image in (('C', conjugate(s)), ('B', backlund(s)), ('B^-1', backlund_inv(s))):
        moved = invariants_of(image)
        rows.append(_row('group', f'{label}: (B, theta) under {name}',
                         max(abs(moved.B - inv.B), abs(moved.theta - inv.theta)), INVARIANT_TOL))
    reflected = invariants_of(reflect(s))
    rows.append(_row('group', f'{label}: R maps (B, theta) to (B + theta, -theta)',
                     max(abs(reflected.B - inv.B - inv.theta), abs(reflected.theta + inv.theta)), INVARIANT_TOL))
    return rows


def suite_group():
    rows = []
    for label, s in (('planck', _planck()), ('neutral', _neutral())):
        rows += _group_rows(label, s)
        rows += _invariant_rows(label, s)

    # A+ = 0 numeric solution -> A+ = A- class and back
    source = _neutral('a_plus_zero')
    image = gambier_plus(source)
    rows.append(_row('group', 'gambier: image has A+ = A-', abs(image.a_plus - image.a_minus), GROUP_TOL))
    rows.append(_row('group', 'gambier: G+^-1 G+ = I', field_defect(gambier_plus_inv(image), source),
                     MESH_RESIDUAL_TOL))
    rows.append(_row('group', 'gambier: G+ G+^-1 = I', field_defect(gambier_plus(gambier_plus_inv(image)), image),
                     MESH_RESIDUAL_TOL))

    case = FIGURE_CASES['fig1_ladder']
    seed = _planck()
    report = generate_sequence(seed, -10, 10, scan_points=101)
    ladder = 0.0
    for n, member in report.members.items():
        expected = quantized_fluxes(seed.a_plus, seed.a_minus, n=n)
        ladder = max(ladder, abs(member.a_plus - expected.a_plus), abs(member.a_minus - expected.a_minus))
    rows.append(_row('group', 'ladder: member constants match the closed form', ladder, 1e-12))
    closed = max(abs(report.row(n)['j'] + ((2 * n + 1) * seed.params.alpha_plus
                                           + (2 * n - 1) * seed.params.alpha_minus) * case['A'])
                 for n in range(-10, 11))
    rows.append(_row('group', 'ladder: current matches -[(2n+1)a+ + (2n-1)a-] A', closed, 1e-12))
    rows.append(_row('group', 'ladder: spacing is -theta', ladder_spacing_defect(report), 1e-12))
    return rows


def suite_residuals():
    rows = []
    seed = _planck()
    p = seed.seed
    for n in (-3, -2, -1, 1, 2, 3):
        member = rational_member(p, seed.params, n)
        worst = max(max(abs(r) for r in system_residual(member, x)) for x in INTERIOR_POINTS)
        rows.append(_row('residuals', f'rational member n={n}: system residual', worst, RESIDUAL_TOL))
        rows.append(_row('residuals', f'rational member n={n}: P - theta x constant',
                         first_integral_variation(member), FIRST_INTEGRAL_TOL))
    for up, n in ((True, 1), (False, -1)):
        rows.append(_row('residuals', f'closed-form first excited state equals B^{n} of the seed',
                         field_defect(first_excited_state(p, seed.params, up), rational_member(p, seed.params, n)),
                         GROUP_TOL))

    member = rational_member(p, seed.params, 2)
    inv = invariants_of(member)
    worst = max(abs(painleve_residual(member, x, invariants=inv)) for x in INTERIOR_POINTS)
    rows.append(_row('residuals', 'rational member n=2: Painleve residual', worst, 1e-5))

    m = _neutral()
    worst = max(max(abs(r) for r in system_residual(m, x)) for x in INTERIOR_POINTS)
    rows.append(_row('residuals', 'charge-neutral solve: system residual', worst, MESH_RESIDUAL_TOL))
    inv = invariants_of(m)
    worst = max(abs(painleve_residual(m, x, invariants=inv)) for x in INTERIOR_POINTS)
    rows.append(_row('residuals', 'charge-neutral solve: Painleve residual', worst, MESH_PAINLEVE_TOL))
    rows.append(_row('residuals', 'charge-neutral solve: P - theta x constant',
                     first_integral_variation(m, m.x), FIRST_INTEGRAL_TOL))
    return rows


def suite_reservoir():
    rows = []
    c_inf, lam = 0.2, 1.0
    for side, amplitude in (('left', 0.1), ('left', -0.4), ('right', 0.1), ('right', -0.4)):
        r = ReservoirProfile(side, c_inf, lam, amplitude=amplitude)
        face = r.interface
        c_plus, c_minus, e, _ = reservoir_exact(r, np.array([face]))
        label = f'{side} reservoir A={amplitude:g}'
        rows.append(_row('reservoir', f'{label}: c+ c- = c_inf^2 at the interface',
                         abs(c_plus[0] * c_minus[0] - c_inf ** 2), GROUP_TOL))
        root_gap = math.sqrt(2 * c_plus[0]) - math.sqrt(2 * c_minus[0])
        expected = lam * e[0] if side == 'left' else -lam * e[0]
        rows.append(_row('reservoir', f'{label}: lambda E = sqrt(2c+) - sqrt(2c-) at the interface',
                         abs(expected - root_gap), GROUP_TOL))
        from_field = interface_concentrations(c_inf, lam, e[0], side)
        rows.append(_row('reservoir', f'{label}: interface concentrations from the field',
                         max(abs(from_field[0] - c_plus[0]), abs(from_field[1] - c_minus[0])), GROUP_TOL))
        depth = -1.0 if side == 'left' else 1.0
        worst = max(abs(poisson_boltzmann_residual(r, face + depth * d, h=3e-4)) for d in (0.5, 1.0, 2.0))
        rows.append(_row('reservoir', f'{label}: Poisson-Boltzmann residual', worst, RESIDUAL_TOL))
    return rows


def suite_airy():
    rows = []
    s = np.linspace(-12.0, 12.0, 241)
    rows.append(_row('airy', "Wronskian Ai Bi' - Ai' Bi = 1/pi on [-12, 12]",
                     max(abs(wronskian(value) - 1 / math.pi) for value in s), GROUP_TOL))
    h = 1e-5
    grid = np.linspace(-8.0, 8.0, 33)
    up, down, mid = airy_array(grid + h), airy_array(grid - h), airy_array(grid)
    worst = 0.0
    for prime_up, prime_down, value in ((up.ai_prime, down.ai_prime, mid.ai), (up.bi_prime, down.bi_prime, mid.bi)):
        second = (prime_up - prime_down) / (2 * h)
        worst = max(worst, float(np.max(np.abs(second - grid * value) / np.maximum(1.0, np.abs(grid * value)))))
    rows.append(_row('airy', 'y\'\' = s y on [-8, 8]', worst, 1e-7))

    case = FIGURE_CASES['fig1_ladder']
    p = AirySeedParams(case['c0'], case['A'])
    seed = airy_seed(p, ModelParams.from_lambda2(case['lambda2']))
    worst = max(max(abs(r) for r in system_residual(seed, x)) for x in INTERIOR_POINTS)
    rows.append(_row('airy', 'Airy seed: system residual', worst, RESIDUAL_TOL))
    inv = invariants_of(seed)
    rows.append(_row('airy', 'Airy seed: A+ = 0, A- = -4A, B = -4c0',
                     max(abs(seed.a_plus), abs(seed.a_minus + 4 * p.A), abs(inv.B + 4 * p.c0)), INVARIANT_TOL))
    image = gambier_plus(seed)
    image_inv = invariants_of(image)
    rows.append(_row('airy', 'Gambier image of the Airy seed: A+ = A-, B = 2c0',
                     max(abs(image.a_plus - image.a_minus), abs(image_inv.B - 2 * p.c0)), INVARIANT_TOL))
    return rows


SUITE_FUNCTIONS = {
    'group': suite_group,
    'residuals': suite_residuals,
    'reservoir': suite_reservoir,
    'airy': suite_airy,
}


def run_suites(suite='all'):
    """Run one suite (or all) and return the pass/fail table"""
    names = SUITES if suite == 'all' else (suite,)
    rows = []
    for name in names:
        logger.info(f'running suite {name}')
        rows += SUITE_FUNCTIONS[name]()
    return pd.DataFrame(rows, columns=CHECK_COLUMNS)


def format_table(table):
    lines = ["=" * 78]
    for suite, group in table.groupby('suite', sort=False):
        passed = int(group['passed'].sum())
        lines.append(f"  {suite.upper()} ({passed}/{len(group)} passed)")
        for _, row in group.iterrows():
            marker = '✓' if row['passed'] else '✗'
            lines.append(f"    {marker} {row['check']:<58} {row['value']:.2e} <= {row['tolerance']:.0e}")
    lines.append("=" * 78)
    return "\n".join(lines)
