"""
TRANSFORMS - The discrete symmetry group acting on solutions, and the flux-quantization ladder

Every map returns a lazy wrapper around its source: evaluating the wrapper evaluates the source at
the needed points and applies the closed-form field map. Chains of maps are evaluation chains, so
group identities hold to rounding error and nothing is ever resampled.

    conjugate          C     c+ <-> c-, E -> -E, A+ <-> A-
    reflect            R     x -> 1 - x, E -> -E, A -> -A
    backlund           B     A+ -> 2A+ + A-, A- -> -A+
    backlund_inv       B^-1  A+ -> -A-, A- -> 2A- + A+
    gambier_plus/minus       A+ = 0 (A- = 0) class -> A+ = A- class
    gambier_plus_inv/minus_inv   A+ = A- class -> A+ = 0 (A- = 0) class
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
import pandas as pd

from backlund_junction.config import (
    DEFAULT_SCAN_POINTS, MAX_TRANSFORM_DEPTH, PRECONDITION_TOL, SINGULAR_TOL, ZERO_FIELD_TOL,
)
from backlund_junction.errors import (
    ConstraintViolation, DomainError, IdenticallyZeroField, SingularEvaluation,
)
from backlund_junction.model_core import (
    FieldSample, FluxPair, SolutionState, current_density, invariants_of, safe_divide,
)

logger = logging.getLogger(__name__)

SEQUENCE_COLUMNS = ['n', 'A_plus', 'A_minus', 'j', 'min_c_plus', 'min_c_minus', 'positive', 'singular']
SEQUENCE_FAMILIES = ('direct', 'conjugate', 'reflected')


class TransformKind(str, Enum):
    C = 'C'
    R = 'R'
    BACKLUND = 'Backlund'
    BACKLUND_INV = 'BacklundInv'
    GAMBIER_PLUS = 'GambierPlus'
    GAMBIER_MINUS = 'GambierMinus'
    GAMBIER_PLUS_INV = 'GambierPlusInv'
    GAMBIER_MINUS_INV = 'GambierMinusInv'


@dataclass(frozen=True)
class TransformTag:
    kind: TransformKind
    source: SolutionState = field(repr=False)


class Transformed(SolutionState):
    """Base of all lazy transform wrappers"""
    provenance = 'transformed'
    kind = None

    def __init__(self, source, a_plus, a_minus, max_depth=MAX_TRANSFORM_DEPTH):
        depth = source.depth + 1
        if depth > max_depth:
            raise DomainError(f'transform chain depth {depth} exceeds the cap {max_depth}')
        super().__init__(a_plus, a_minus, source.params, depth)
        self.source = source
        self.tag = TransformTag(self.kind, source)


class Conjugated(Transformed):
    kind = TransformKind.C

    def __init__(self, source, max_depth=MAX_TRANSFORM_DEPTH):
        super().__init__(source, source.a_minus, source.a_plus, max_depth)

    def _sample(self, x):
        s = self.source.sample(x)
        return FieldSample(x, s.c_minus, s.c_plus, -s.e, s.regular)


class Reflected(Transformed):
    kind = TransformKind.R

    def __init__(self, source, max_depth=MAX_TRANSFORM_DEPTH):
        super().__init__(source, -source.a_plus, -source.a_minus, max_depth)

    def _sample(self, x):
        s = self.source.sample(1.0 - x)
        return FieldSample(x, s.c_plus, s.c_minus, -s.e, s.regular)


class Backlund(Transformed):
    kind = TransformKind.BACKLUND

    def __init__(self, source, max_depth=MAX_TRANSFORM_DEPTH):
        a_plus = source.a_plus
        super().__init__(source, 2 * a_plus + source.a_minus, -a_plus, max_depth)

    def _sample(self, x):
        s = self.source.sample(x)
        a = self.source.a_plus
        lambda2 = self.lambda2
        inv, regular = safe_divide(1.0, s.c_plus, s.regular)
        c_plus = s.c_minus + 2 * lambda2 * a * s.e * inv + 2 * lambda2 * a * a * inv * inv
        e = -s.e - 2 * a * inv
        return FieldSample(x, c_plus, s.c_plus, e, regular)


class BacklundInverse(Transformed):
    kind = TransformKind.BACKLUND_INV

    def __init__(self, source, max_depth=MAX_TRANSFORM_DEPTH):
        a_minus = source.a_minus
        super().__init__(source, -a_minus, 2 * a_minus + source.a_plus, max_depth)

    def _sample(self, x):
        s = self.source.sample(x)
        a = self.source.a_minus
        lambda2 = self.lambda2
        inv, regular = safe_divide(1.0, s.c_minus, s.regular)
        c_minus = s.c_plus - 2 * lambda2 * a * s.e * inv + 2 * lambda2 * a * a * inv * inv
        e = -s.e + 2 * a * inv
        return FieldSample(x, s.c_minus, c_minus, e, regular)


class Gambier(Transformed):
    """
    G+ (plus=True) on the A+ = 0 class, G- on the A- = 0 class

    With A the nonzero flux constant of the source and B its first integral:
        c+^ = +-(1/4) lambda E sqrt(2c) + c/2 - (Ax + B)/4     (c = c+ for G+, c- for G-)
        c-^ = -+(1/4) lambda E sqrt(2c) + c/2 - (Ax + B)/4
        E^  = sqrt(2c) / lambda,  A+^ = A-^ = -A/4,  B^ = -B/2
    The nonnegative root is taken.
    """

    def __init__(self, source, plus=True, max_depth=MAX_TRANSFORM_DEPTH):
        vanishing, flux = (source.a_plus, source.a_minus) if plus else (source.a_minus, source.a_plus)
        if abs(vanishing) > PRECONDITION_TOL:
            side = 'A+' if plus else 'A-'
            raise ConstraintViolation(f'Gambier map needs {side} = 0, got {vanishing:.3e}')
        self.kind = TransformKind.GAMBIER_PLUS if plus else TransformKind.GAMBIER_MINUS
        self.plus = plus
        self.flux = flux
        self.source_b = invariants_of(source).B
        super().__init__(source, -0.25 * flux, -0.25 * flux, max_depth)

    def _sample(self, x):
        s = self.source.sample(x)
        c = s.c_plus if self.plus else s.c_minus
        negative = s.regular & (c < -SINGULAR_TOL)
        if negative.any():
            raise DomainError(f'square-root argument negative at x = {x[negative][:5]}')
        with np.errstate(invalid='ignore'):
            root = np.sqrt(2 * np.clip(c, 0.0, None))
        lam = self.params.lambda_
        cross = 0.25 * lam * s.e * root
        if not self.plus:
            cross = -cross
        base = 0.5 * c - 0.25 * (self.flux * x + self.source_b)
        return FieldSample(x, base + cross, base - cross, root / lam, s.regular)


class GambierInverse(Transformed):
    """
    G+^-1 (plus=True) and G-^-1 = C G+^-1 on the A+ = A- = A class

        c+^ = lambda^2 E^2 / 2,  E^ = 2(c+ - c-) / (lambda^2 E)
        c-^ = -lambda^2 E^2 / 2 + 2(c+ - c-)^2 / (lambda^2 E^2) - 4Ax - 2B
        A+^ = 0, A-^ = -4A, B^ = -2B
    """

    def __init__(self, source, plus=True, scan_points=DEFAULT_SCAN_POINTS, max_depth=MAX_TRANSFORM_DEPTH):
        if abs(source.a_plus - source.a_minus) > PRECONDITION_TOL:
            raise ConstraintViolation(
                f'inverse Gambier map needs A+ = A-, got {source.a_plus:.6g} and {source.a_minus:.6g}')
        _reject_vanishing_field(source, scan_points)
        self.kind = TransformKind.GAMBIER_PLUS_INV if plus else TransformKind.GAMBIER_MINUS_INV
        self.plus = plus
        self.flux = source.a_plus
        self.source_b = invariants_of(source).B
        a_hat = (0.0, -4 * self.flux) if plus else (-4 * self.flux, 0.0)
        super().__init__(source, *a_hat, max_depth=max_depth)

    def _sample(self, x):
        s = self.source.sample(x)
        lambda2 = self.lambda2
        inv, regular = safe_divide(1.0, s.e, s.regular)
        diff = s.c_plus - s.c_minus
        square = 0.5 * lambda2 * s.e ** 2
        e = 2 * diff * inv / lambda2
        other = -square + 2 * diff ** 2 * inv ** 2 / lambda2 - 4 * self.flux * x - 2 * self.source_b
        if self.plus:
            return FieldSample(x, square, other, e, regular)
        return FieldSample(x, other, square, -e, regular)


def _reject_vanishing_field(s, scan_points):
    """Heuristic E == 0 test: max|E| over the regular scan points below ZERO_FIELD_TOL"""
    sample = s.sample(np.linspace(0.0, 1.0, scan_points))
    if not sample.regular.any():
        raise SingularEvaluation(sample.x, 'source is singular on the whole scan grid')
    peak = float(np.max(np.abs(sample.e[sample.regular])))
    if peak < ZERO_FIELD_TOL:
        raise IdenticallyZeroField(
            f'E vanishes on the scan grid (max|E| = {peak:.2e}); build the Airy seed instead')


def conjugate(s, max_depth=MAX_TRANSFORM_DEPTH):
    return Conjugated(s, max_depth)


def reflect(s, max_depth=MAX_TRANSFORM_DEPTH):
    return Reflected(s, max_depth)


def backlund(s, max_depth=MAX_TRANSFORM_DEPTH):
    """B(S); reduces to C(S) when A+ = 0"""
    if abs(s.a_plus) <= PRECONDITION_TOL:
        logger.debug('A+ = 0: Backlund map reduces to conjugation')
        return Conjugated(s, max_depth)
    return Backlund(s, max_depth)


def backlund_inv(s, max_depth=MAX_TRANSFORM_DEPTH):
    """B^-1(S); reduces to C(S) when A- = 0"""
    if abs(s.a_minus) <= PRECONDITION_TOL:
        logger.debug('A- = 0: inverse Backlund map reduces to conjugation')
        return Conjugated(s, max_depth)
    return BacklundInverse(s, max_depth)


def gambier_plus(s, max_depth=MAX_TRANSFORM_DEPTH):
    return Gambier(s, plus=True, max_depth=max_depth)


def gambier_minus(s, max_depth=MAX_TRANSFORM_DEPTH):
    return Gambier(s, plus=False, max_depth=max_depth)


def gambier_plus_inv(s, scan_points=DEFAULT_SCAN_POINTS, max_depth=MAX_TRANSFORM_DEPTH):
    return GambierInverse(s, plus=True, scan_points=scan_points, max_depth=max_depth)


def gambier_minus_inv(s, scan_points=DEFAULT_SCAN_POINTS, max_depth=MAX_TRANSFORM_DEPTH):
    return GambierInverse(s, plus=False, scan_points=scan_points, max_depth=max_depth)


TRANSFORMS = {
    TransformKind.C: conjugate,
    TransformKind.R: reflect,
    TransformKind.BACKLUND: backlund,
    TransformKind.BACKLUND_INV: backlund_inv,
    TransformKind.GAMBIER_PLUS: gambier_plus,
    TransformKind.GAMBIER_MINUS: gambier_minus,
    TransformKind.GAMBIER_PLUS_INV: gambier_plus_inv,
    TransformKind.GAMBIER_MINUS_INV: gambier_minus_inv,
}


def iterate_backlund(s, n, max_depth=MAX_TRANSFORM_DEPTH):
    """B^n(S) for any integer n (B^-1 for negative n)"""
    step = backlund if n > 0 else backlund_inv
    for _ in range(abs(n)):
        s = step(s, max_depth)
    return s


# ---------------------------------------------------------------------------
# Flux quantization
# ---------------------------------------------------------------------------

class LadderStep(NamedTuple):
    a_plus: float
    a_minus: float
    j: float
    degenerate: bool


def quantized_fluxes(seed_a_plus, seed_a_minus, theta=None, phi=None, n=0, alpha_plus=0.5, alpha_minus=None):
    """
    Closed-form n-th rung of the Backlund ladder through a seed with constants (A+, A-)

        A+(n) = (1/2 + n) theta + phi/2
        A-(n) = (1/2 - n) theta - phi/2
        j(n)  = [alpha-(theta - phi) - alpha+(theta + phi)] / 2 - n theta
    theta = 0 gives no quantization: the seed constants come back with degenerate=True.
    """
    if alpha_minus is None:
        alpha_minus = 1.0 - alpha_plus
    theta = seed_a_plus + seed_a_minus if theta is None else theta
    phi = seed_a_plus - seed_a_minus if phi is None else phi
    if theta == 0:
        return LadderStep(seed_a_plus, seed_a_minus, alpha_minus * seed_a_minus - alpha_plus * seed_a_plus, True)
    a_plus = (0.5 + n) * theta + 0.5 * phi
    a_minus = (0.5 - n) * theta - 0.5 * phi
    j = (alpha_minus * (theta - phi) - alpha_plus * (theta + phi)) / 2 - n * theta * (alpha_plus + alpha_minus)
    return LadderStep(a_plus, a_minus, j, False)


def seed_normalization(a_plus, a_minus):
    """
    Move a seed along its own ladder until -|theta| <= phi < |theta|

    Returns (theta, phi, shift): the normalized member is B^shift of the given one.
    """
    theta = a_plus + a_minus
    phi = a_plus - a_minus
    if theta == 0:
        return theta, phi, 0
    width = abs(theta)
    k = math.floor((phi + width) / (2 * width))
    shift = -k if theta > 0 else k
    return theta, phi + 2 * shift * theta, shift


def quantized_physical_fluxes(phi_plus0, phi_minus0, D_plus, D_minus, n):
    """Dimensional flux ladder Phi+-(n) from the seed fluxes Phi+-(0)"""
    return FluxPair((n + 1) * phi_plus0 + n * (D_plus / D_minus) * phi_minus0,
                    -(n - 1) * phi_minus0 - n * (D_minus / D_plus) * phi_plus0)


def current_ladder_dimensional(d, f0, n_values):
    """J(n) = J(0) + n dJ with dJ = z e (D+ + D-)(Phi+(0)/D+ + Phi-(0)/D-); one row per n"""
    charge = d.charge
    j0 = charge * (f0.phi_plus - f0.phi_minus)
    delta_j = charge * (d.D_plus + d.D_minus) * (f0.phi_plus / d.D_plus + f0.phi_minus / d.D_minus)
    rows = []
    for n in n_values:
        fluxes = quantized_physical_fluxes(f0.phi_plus, f0.phi_minus, d.D_plus, d.D_minus, n)
        rows.append({'n': n, 'phi_plus': fluxes.phi_plus, 'phi_minus': fluxes.phi_minus,
                     'J': j0 + n * delta_j, 'delta_J': delta_j})
    return pd.DataFrame(rows, columns=['n', 'phi_plus', 'phi_minus', 'J', 'delta_J'])


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------

@dataclass
class SequenceReport:
    family: str
    theta: float
    phi: float
    B: Optional[float]
    scan_points: int
    table: pd.DataFrame
    members: dict = field(default_factory=dict, repr=False)

    def row(self, n):
        return self.table.loc[self.table['n'] == n].iloc[0]

    def positive_reach(self):
        """Largest k with every member |n| <= k positive (-1 if the seed itself is not)"""
        reach = -1
        flags = dict(zip(self.table['n'], self.table['positive']))
        k = 0
        while k in flags and -k in flags and flags[k] and flags[-k]:
            reach = k
            k += 1
        return reach

    def as_dict(self):
        return {
            'family': self.family,
            'theta': self.theta,
            'phi': self.phi,
            'B': self.B,
            'scan_points': self.scan_points,
            'ladder': self.table.to_dict(orient='records'),
        }


def concentration_minima(s, grid):
    """(min c+, min c-, all regular, any regular) over the regular points of grid"""
    sample = s.sample(grid)
    if not sample.regular.any():
        return math.nan, math.nan, False, False
    return (float(np.min(sample.c_plus[sample.regular])), float(np.min(sample.c_minus[sample.regular])),
            bool(sample.regular.all()), True)


def generate_sequence(seed, n_min, n_max, scan_points=DEFAULT_SCAN_POINTS, family='direct',
                      max_depth=MAX_TRANSFORM_DEPTH):
    """
    Members B^n(base) for n_min <= n <= n_max with their ladder constants and positivity

    base is the seed (family='direct'), C(seed) ('conjugate') or R(seed) ('reflected').
    Singular members are flagged per row; nothing in the scan is fatal.
    """
    if not n_min <= 0 <= n_max:
        raise DomainError(f'need n_min <= 0 <= n_max, got [{n_min}, {n_max}]')
    if family not in SEQUENCE_FAMILIES:
        raise DomainError(f'unknown sequence family {family!r}')
    base = seed
    if family == 'conjugate':
        base = conjugate(seed, max_depth)
    elif family == 'reflected':
        base = reflect(seed, max_depth)
    if base.theta == 0:
        logger.warning('theta = 0: no flux quantization along this sequence')
    if base.depth + max(-n_min, n_max) > max_depth:
        raise DomainError(f'|n| up to {max(-n_min, n_max)} exceeds the depth cap {max_depth}')

    members = {0: base}
    for n in range(1, n_max + 1):
        members[n] = backlund(members[n - 1], max_depth)
    for n in range(-1, n_min - 1, -1):
        members[n] = backlund_inv(members[n + 1], max_depth)

    try:
        b_value = invariants_of(base).B
    except SingularEvaluation:
        logger.warning('first integral of the sequence base could not be evaluated')
        b_value = None

    grid = np.linspace(0.0, 1.0, scan_points)
    rows = []
    for n in range(n_min, n_max + 1):
        member = members[n]
        min_plus, min_minus, all_regular, any_regular = concentration_minima(member, grid)
        if not all_regular:
            logger.warning(f'member n={n}: singular points on the scan grid')
        positive = all_regular and min_plus > 0 and min_minus > 0
        rows.append({'n': n, 'A_plus': member.a_plus, 'A_minus': member.a_minus, 'j': current_density(member),
                     'min_c_plus': min_plus, 'min_c_minus': min_minus,
                     'positive': bool(positive), 'singular': not all_regular})
    table = pd.DataFrame(rows, columns=SEQUENCE_COLUMNS)
    logger.info(f'{family} sequence n in [{n_min}, {n_max}]: {int(table["positive"].sum())} positive members')
    return SequenceReport(family, base.theta, base.phi, b_value, scan_points, table, members)
