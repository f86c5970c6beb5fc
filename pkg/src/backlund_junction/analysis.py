"""
JUNCTION ANALYZER
Positivity scans, the sign lemma of the charge-neutral problem, and viability of Backlund images
"""
import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from backlund_junction.bvp import BoundarySpec, SolverConfig, monotonicity, neumann_check, solve
from backlund_junction.config import DEFAULT_SCAN_POINTS, INTERFACE_TOL, SCAN_DENSITIES
from backlund_junction.errors import AllSingular, NonConvergence, PreconditionFailed
from backlund_junction.model_core import ModelParams, current_density, invariants_of, work_energy
from backlund_junction.transforms import backlund, backlund_inv, conjugate, generate_sequence

logger = logging.getLogger(__name__)

J_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class PositivityReport:
    """positive iff both minima are > 0 and no grid point was singular"""
    min_c_plus: float
    min_c_minus: float
    argmin_c_plus: float
    argmin_c_minus: float
    positive: bool
    grid_points: int
    singular_points: int = 0

    def as_dict(self):
        return asdict(self)


def positivity_scan(s, grid_points=DEFAULT_SCAN_POINTS):
    grid = np.linspace(0.0, 1.0, grid_points)
    sample = s.sample(grid)
    regular = sample.regular
    if not regular.any():
        raise AllSingular(f'no regular point among {grid_points} scan points')
    x = grid[regular]
    c_plus, c_minus = sample.c_plus[regular], sample.c_minus[regular]
    i_plus, i_minus = int(np.argmin(c_plus)), int(np.argmin(c_minus))
    singular = int((~regular).sum())
    if singular:
        logger.warning(f'{singular} singular scan points skipped')
    positive = singular == 0 and c_plus[i_plus] > 0 and c_minus[i_minus] > 0
    return PositivityReport(float(c_plus[i_plus]), float(c_minus[i_minus]), float(x[i_plus]), float(x[i_minus]),
                            bool(positive), grid_points, singular)


def sign_lemma_check(m):
    """At least one of A+, A- is positive for a charge-neutral solution with c1 > c0"""
    spec = m.spec
    if spec.family != 'neutral' or not spec.right > spec.left:
        raise PreconditionFailed('sign lemma applies to charge-neutral data with c1 > c0')
    return max(m.a_plus, m.a_minus) > 0


@dataclass(frozen=True)
class ZeroCurrentReport:
    j: float
    direction: str
    sign_condition: bool
    source: PositivityReport
    image: PositivityReport

    def as_dict(self):
        return {'j': self.j, 'direction': self.direction, 'sign_condition': self.sign_condition,
                'source': self.source.as_dict(), 'image': self.image.as_dict()}


def j_zero_transform_positivity(s, grid_points=DEFAULT_SCAN_POINTS):
    """
    For j = 0 the field opposes the more mobile species: E A+ > 0 when alpha+ > alpha-, E A- < 0 when
    alpha+ < alpha-. The Backlund image (resp. inverse image) of a positive solution is then positive.
    """
    j = current_density(s)
    if abs(j) > J_ZERO_TOL:
        raise PreconditionFailed(f'current density must vanish, got j = {j:.3e}')
    p = s.params
    sample = s.sample(np.linspace(0.0, 1.0, grid_points))
    e = sample.e[sample.regular]
    if p.alpha_plus > p.alpha_minus:
        direction, image = 'backlund', backlund(s)
        sign_condition = bool(np.all(e * s.a_plus > 0))
    elif p.alpha_plus < p.alpha_minus:
        direction, image = 'backlund_inv', backlund_inv(s)
        sign_condition = bool(np.all(e * s.a_minus < 0))
    else:
        direction, image = 'conjugate', conjugate(s)
        sign_condition = True
    return ZeroCurrentReport(j, direction, sign_condition, positivity_scan(s, grid_points),
                             positivity_scan(image, grid_points))


@dataclass(frozen=True)
class NeutralityDefects:
    """c+^ - c-^ at both faces of the Backlund image of a charge-neutral solution"""
    defect_left: float
    defect_right: float
    predicted_left: float
    reduces_to_conjugate: bool

    def as_dict(self):
        return asdict(self)


def bc_noninvariance_demo(s, tol=INTERFACE_TOL):
    c_plus, c_minus, e = s.evaluate(np.array([0.0, 1.0]))
    if np.max(np.abs(c_plus - c_minus)) > tol:
        raise PreconditionFailed('source is not charge-neutral at both faces')
    image = backlund(s)
    hat_plus, hat_minus, _ = image.evaluate(np.array([0.0, 1.0]))
    c0, a = c_plus[0], s.a_plus
    predicted = 2 * a * s.lambda2 * (c0 * e[0] + a) / c0 ** 2
    return NeutralityDefects(float(hat_plus[0] - hat_minus[0]), float(hat_plus[1] - hat_minus[1]),
                             float(predicted), image.tag.kind.value == 'C')


def first_integral_variation(s, points=None):
    """max - min of P(x) - theta x over the regular points"""
    x = np.linspace(0.0, 1.0, 11) if points is None else np.asarray(points, dtype=float)
    sample = s.sample(x)
    x = x[sample.regular]
    values = work_energy(s, x)
    return float(np.max(values) - np.min(values))


def ladder_spacing_defect(report):
    """max |j(n+1) - j(n) + theta| along a sequence table"""
    steps = np.diff(report.table.sort_values('n')['j'].to_numpy())
    return float(np.max(np.abs(steps + report.theta))) if steps.size else 0.0


def count_positive_states(seed, n_max, grid_points=DEFAULT_SCAN_POINTS):
    """Number k of excited states with B^n(seed) and B^-n(seed) positive for all 1 <= n <= k"""
    report = generate_sequence(seed, -n_max, n_max, grid_points)
    return report.positive_reach()


def positivity_count_stability(seed, n_max, densities=SCAN_DENSITIES):
    rows = [{'grid_points': g, 'positive_states': count_positive_states(seed, n_max, g)} for g in densities]
    table = pd.DataFrame(rows, columns=['grid_points', 'positive_states'])
    if table['positive_states'].nunique() > 1:
        logger.warning('positive-state count depends on the scan density')
    return table


SWEEP_COLUMNS = ['case', 'c0', 'c1', 'lambda', 'alpha_plus', 'j0', 'converged', 'A_plus', 'A_minus',
                 'lemma_holds', 'min_c_plus', 'min_c_minus', 'positive']


def sign_lemma_sweep(cases=20, random_state=0, cfg=None):
    """Random admissible charge-neutral problems; one row per case, non-converged cases flagged"""
    rng = np.random.default_rng(random_state)
    cfg = cfg or SolverConfig()
    rows = []
    for case in range(cases):
        c0 = float(rng.uniform(0.05, 0.45))
        lam = float(rng.uniform(0.2, 1.0))
        alpha_plus = float(rng.uniform(0.05, 0.95))
        j0 = float(rng.uniform(-0.5, 0.8))
        row = {'case': case, 'c0': c0, 'c1': 1 - c0, 'lambda': lam, 'alpha_plus': alpha_plus, 'j0': j0,
               'converged': False, 'A_plus': np.nan, 'A_minus': np.nan, 'lemma_holds': None,
               'min_c_plus': np.nan, 'min_c_minus': np.nan, 'positive': None}
        try:
            m = solve(BoundarySpec.charge_neutral(c0, 1 - c0, j0), ModelParams(lam, alpha_plus), cfg)
        except NonConvergence as exc:
            logger.info(f'sweep case {case} did not converge: {exc}')
            rows.append(row)
            continue
        row.update({'converged': True, 'A_plus': m.a_plus, 'A_minus': m.a_minus,
                    'lemma_holds': sign_lemma_check(m), 'min_c_plus': float(np.min(m.c_plus)),
                    'min_c_minus': float(np.min(m.c_minus)), 'positive': not m.negative_concentration})
        rows.append(row)
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


class SolutionAnalyzer:
    """
    Checks a solution against the structural results of the model

    1. Positivity - are both concentrations positive on the scan grid?
    2. First integral - is P(x) - theta x constant?
    3. Charge-neutral data - Neumann condition, sign lemma, monotonicity of E
    4. Zero current - is the Backlund (or inverse) image positive?
    """

    def __init__(self, solution, name=None, grid_points=DEFAULT_SCAN_POINTS):
        self.solution = solution
        self.name = name or solution.provenance
        self.grid_points = grid_points
        self.results = {}
        self.notes = []

    def analyze_positivity(self):
        report = positivity_scan(self.solution, self.grid_points)
        self.results['positivity'] = report.as_dict()
        if report.positive:
            self.notes.append(f"✓ Concentrations positive (min c+ = {report.min_c_plus:.4g}, "
                              f"min c- = {report.min_c_minus:.4g})")
        else:
            self.notes.append(f"⚠ Non-positive concentrations (min c+ = {report.min_c_plus:.4g} at "
                              f"x = {report.argmin_c_plus:.3f}, min c- = {report.min_c_minus:.4g})")
        return report

    def analyze_first_integral(self):
        inv = invariants_of(self.solution)
        variation = first_integral_variation(self.solution)
        self.results['invariants'] = {'B': inv.B, 'theta': inv.theta, 'phi': inv.phi,
                                      'first_integral_variation': variation}
        marker = '✓' if variation < 1e-8 else '⚠'
        self.notes.append(f"{marker} B = {inv.B:.10g}, theta = {inv.theta:.10g}, variation {variation:.2e}")
        return inv

    def analyze_neutral_data(self):
        spec = getattr(self.solution, 'spec', None)
        if spec is None or spec.family != 'neutral':
            return
        left, right = neumann_check(self.solution)
        trend = monotonicity(self.solution)
        self.results['neumann'] = {'left': left, 'right': right}
        self.results['monotonicity'] = trend
        self.notes.append(f"ℹ lambda^2 E'(0) = {left:.2e}, lambda^2 E'(1) = {right:.2e}; E {trend}")
        if spec.right > spec.left:
            holds = sign_lemma_check(self.solution)
            self.results['sign_lemma'] = holds
            sign = '✓' if holds else '⚠'
            self.notes.append(f"{sign} Sign lemma: A+ = {self.solution.a_plus:.6g}, A- = {self.solution.a_minus:.6g}")

    def analyze_zero_current(self):
        if abs(current_density(self.solution)) > J_ZERO_TOL:
            return
        report = j_zero_transform_positivity(self.solution, self.grid_points)
        self.results['zero_current'] = report.as_dict()
        marker = '✓' if report.image.positive else '⚠'
        self.notes.append(f"{marker} j = 0: {report.direction} image positive = {report.image.positive}")

    def run_full_analysis(self):
        self.analyze_positivity()
        self.analyze_first_integral()
        self.analyze_neutral_data()
        self.analyze_zero_current()
        return self.results

    def get_report(self):
        report = []
        report.append("=" * 60)
        report.append(f"  SOLUTION REPORT - {self.name}")
        report.append(f"  A+ = {self.solution.a_plus:.10g}, A- = {self.solution.a_minus:.10g}, "
                      f"j = {current_density(self.solution):.10g}")
        report.append("=" * 60)
        for note in self.notes:
            report.append(f"  {note}")
        report.append("")
        return "\n".join(report)
