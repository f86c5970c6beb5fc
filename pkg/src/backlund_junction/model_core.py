"""
MODEL CORE - Domain types and the governing equations of the steady two-ion junction

Dimensionless system on 0 < x < 1:
    c+' =  E c+ + A+
    c-' = -E c- + A-
    lambda^2 E' = c+ - c-
with current density j = alpha- A- - alpha+ A+ and first integral P(x) - theta x = B.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from backlund_junction.config import (
    FD_STEP, PAINLEVE_FD_STEP, INTEGRAL_FALLBACK, INTEGRAL_POINT, SINGULAR_TOL,
)
from backlund_junction.errors import DomainError, SingularEvaluation

# Gaussian (cgs) constants, matching the form lambda = sqrt(eps kT / 4 pi (ze)^2 delta^2 c_ref)
ELEMENTARY_CHARGE_ESU = 4.80320471e-10
BOLTZMANN_ERG_PER_K = 1.380649e-16


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless lambda and diffusivity fractions alpha+, alpha- (alpha+ + alpha- = 1)"""
    lambda_: float
    alpha_plus: float = 0.5
    alpha_minus: Optional[float] = None

    def __post_init__(self):
        if self.alpha_minus is None:
            object.__setattr__(self, 'alpha_minus', 1.0 - self.alpha_plus)
        if not self.lambda_ > 0:
            raise DomainError(f'lambda must be positive, got {self.lambda_}')
        if not (self.alpha_plus > 0 and self.alpha_minus > 0):
            raise DomainError(f'alpha+ and alpha- must be positive, got {self.alpha_plus}, {self.alpha_minus}')
        if abs(self.alpha_plus + self.alpha_minus - 1.0) > 1e-12:
            raise DomainError('alpha+ + alpha- must equal 1')

    @property
    def lambda2(self):
        return self.lambda_ ** 2

    @classmethod
    def from_lambda2(cls, lambda2, alpha_plus=0.5):
        return cls(math.sqrt(lambda2), alpha_plus)

    def as_dict(self):
        return {'lambda': self.lambda_, 'alpha_plus': self.alpha_plus, 'alpha_minus': self.alpha_minus}


@dataclass(frozen=True)
class DimensionalParams:
    """Physical constants of the junction (cgs units)"""
    delta: float            # junction width, cm
    D_plus: float           # cm^2/s
    D_minus: float
    z_tilde: float = 1.0
    temperature: float = 298.15
    epsilon: float = 78.5   # relative permittivity of water
    c_ref: float = 6.022e19  # 1/cm^3 (0.1 M)
    e: float = ELEMENTARY_CHARGE_ESU
    k_B: float = BOLTZMANN_ERG_PER_K

    def __post_init__(self):
        for name in ('delta', 'D_plus', 'D_minus', 'z_tilde', 'temperature', 'epsilon', 'c_ref', 'e', 'k_B'):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f'{name} must be strictly positive, got {value}')

    @property
    def charge(self):
        return self.z_tilde * self.e

    @property
    def lambda_(self):
        return math.sqrt(self.epsilon * self.k_B * self.temperature
                         / (4 * math.pi * self.charge ** 2 * self.delta ** 2 * self.c_ref))

    @property
    def alphas(self):
        total = self.D_plus + self.D_minus
        return self.D_plus / total, self.D_minus / total

    def model_params(self):
        alpha_plus, alpha_minus = self.alphas
        return ModelParams(self.lambda_, alpha_plus, alpha_minus)


@dataclass(frozen=True)
class FluxPair:
    """Dimensional ionic fluxes Phi+, Phi- (1/cm^2 s); signs are free"""
    phi_plus: float
    phi_minus: float


class FieldSample(NamedTuple):
    """Fields on a set of points; regular=False marks points at or next to a pole"""
    x: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    e: np.ndarray
    regular: np.ndarray


@dataclass(frozen=True)
class InvariantPair:
    B: float
    theta: float
    phi: float
    point: float = INTEGRAL_POINT


def safe_divide(numerator, denominator, regular):
    """Divide where |denominator| is above the pole tolerance; returns (quotient, regular mask)"""
    denominator = np.asarray(denominator, dtype=float)
    ok = regular & (np.abs(denominator) >= SINGULAR_TOL)
    quotient = np.asarray(numerator, dtype=float) / np.where(ok, denominator, 1.0)
    return np.where(ok, quotient, 0.0), ok


class SolutionState:
    """
    A solution (c+, c-, E, A+, A-) of the dimensionless system, held as an evaluator

    Subclasses implement _sample(x) on a 1-D array. Values are immutable after construction.
    """
    provenance = 'abstract'

    def __init__(self, a_plus, a_minus, params, depth=0):
        self.a_plus = float(a_plus)
        self.a_minus = float(a_minus)
        self.params = params
        self.depth = depth

    @property
    def theta(self):
        return self.a_plus + self.a_minus

    @property
    def phi(self):
        return self.a_plus - self.a_minus

    @property
    def lambda2(self):
        return self.params.lambda2

    def _sample(self, x):
        raise NotImplementedError

    def sample(self, x):
        """Evaluate on points x, flagging singular points instead of raising"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        c_plus, c_minus, e, regular = self._sample(x)[1:]
        regular = regular & np.isfinite(c_plus) & np.isfinite(c_minus) & np.isfinite(e)
        return FieldSample(x, c_plus, c_minus, e, regular)

    def evaluate(self, x):
        """Evaluate (c+, c-, E) at x; raises SingularEvaluation if any point is singular"""
        scalar = np.ndim(x) == 0
        sample = self.sample(x)
        if not sample.regular.all():
            raise SingularEvaluation(sample.x[~sample.regular])
        if scalar:
            return float(sample.c_plus[0]), float(sample.c_minus[0]), float(sample.e[0])
        return sample.c_plus, sample.c_minus, sample.e

    __call__ = evaluate

    def constants(self):
        return {'A_plus': self.a_plus, 'A_minus': self.a_minus, 'theta': self.theta, 'phi': self.phi}

    def __repr__(self):
        return (f'{type(self).__name__}(provenance={self.provenance!r}, A+={self.a_plus:.6g}, '
                f'A-={self.a_minus:.6g}, lambda={self.params.lambda_:.6g})')


def _stencil(x, h):
    x = float(x)
    if not (0.0 < x - h and x + h < 1.0):
        raise DomainError(f'stencil [{x - h}, {x + h}] leaves the open interval (0, 1)')
    return np.array([x - h, x, x + h])


def system_residual(s, x, h=FD_STEP):
    """Residuals of the three ODEs at x, with central differences of step h"""
    c_plus, c_minus, e = s.evaluate(_stencil(x, h))
    dc_plus = (c_plus[2] - c_plus[0]) / (2 * h)
    dc_minus = (c_minus[2] - c_minus[0]) / (2 * h)
    de = (e[2] - e[0]) / (2 * h)
    r1 = dc_plus - e[1] * c_plus[1] - s.a_plus
    r2 = dc_minus + e[1] * c_minus[1] - s.a_minus
    r3 = s.lambda2 * de - (c_plus[1] - c_minus[1])
    return float(r1), float(r2), float(r3)


def pressure(s, x):
    """P(x) = c+ + c- - lambda^2 E^2 / 2"""
    c_plus, c_minus, e = s.evaluate(x)
    return c_plus + c_minus - 0.5 * s.lambda2 * e ** 2


def work_energy(s, x):
    """P(x) - theta x; constant (= B) along any regular solution"""
    return pressure(s, x) - s.theta * np.asarray(x, dtype=float)


def invariants_of(s, point=INTEGRAL_POINT):
    """First integral B, theta = A+ + A-, phi = A+ - A-"""
    for x in [point] + [p for p in INTEGRAL_FALLBACK if p != point]:
        try:
            b = float(work_energy(s, x))
        except SingularEvaluation:
            continue
        return InvariantPair(b, s.theta, s.phi, x)
    raise SingularEvaluation([point] + INTEGRAL_FALLBACK, 'no regular point for the first integral')


def current_density(s):
    """j = alpha- A- - alpha+ A+"""
    return s.params.alpha_minus * s.a_minus - s.params.alpha_plus * s.a_plus


def painleve_residual(s, x, h=PAINLEVE_FD_STEP, invariants=None):
    """lambda^2 E'' - lambda^2 E^3 / 2 - (theta x + B) E - (A+ - A-) at x"""
    inv = invariants or invariants_of(s)
    e = s.evaluate(_stencil(x, h))[2]
    e2 = (e[2] - 2 * e[1] + e[0]) / h ** 2
    return float(s.lambda2 * e2 - 0.5 * s.lambda2 * e[1] ** 3
                 - (inv.theta * float(x) + inv.B) * e[1] - (s.a_plus - s.a_minus))


@dataclass(frozen=True)
class NondimensionalResult:
    params: ModelParams
    a_plus: float
    a_minus: float
    j: float
    fields: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DimensionalResult:
    """Fluxes in 1/cm^2 s plus any fields mapped back to cgs units"""
    phi_plus: float
    phi_minus: float
    fields: dict = field(default_factory=dict)

    @property
    def fluxes(self):
        return FluxPair(self.phi_plus, self.phi_minus)


def _scale_fields(d, fields, inverse=False):
    # multiplier taking each physical field to its unit-slab value
    factors = {'x': 1.0 / d.delta, 'c_plus': 1.0 / d.c_ref, 'c_minus': 1.0 / d.c_ref,
               'E': d.charge * d.delta / (d.k_B * d.temperature)}
    scaled = {}
    for key, value in (fields or {}).items():
        if key not in factors:
            raise DomainError(f'unknown field {key!r}')
        value = np.asarray(value, dtype=float)
        scaled[key] = value / factors[key] if inverse else value * factors[key]
    return scaled


def nondimensionalize(d, f, fields=None):
    """
    Physical constants and fluxes -> (ModelParams, A+, A-, j)

    fields, when given, maps 'x' (cm), 'c_plus', 'c_minus' (1/cm^3) and 'E' (statvolt/cm)
    to arrays; they are returned scaled to the unit slab.
    """
    params = d.model_params()
    a_plus = -f.phi_plus * d.delta / (d.c_ref * d.D_plus)
    a_minus = -f.phi_minus * d.delta / (d.c_ref * d.D_minus)
    j = params.alpha_minus * a_minus - params.alpha_plus * a_plus
    return NondimensionalResult(params, a_plus, a_minus, j, _scale_fields(d, fields))


def dimensionalize(d, a_plus, a_minus, fields=None):
    """Inverse of nondimensionalize: flux constants and unit-slab fields back to cgs"""
    return DimensionalResult(-a_plus * d.c_ref * d.D_plus / d.delta, -a_minus * d.c_ref * d.D_minus / d.delta,
                             _scale_fields(d, fields, inverse=True))


def dimensional_current(d, j):
    """J = z e c_ref (D+ + D-) j / delta"""
    return d.charge * d.c_ref * (d.D_plus + d.D_minus) * j / d.delta


def physical_current(d, f):
    """J = z e (Phi+ - Phi-)"""
    return d.charge * (f.phi_plus - f.phi_minus)


def debye_length_cm(d, c_inf):
    """Dimensional Debye length lambda_0 delta of a reservoir at dimensionless concentration c_inf"""
    if not c_inf > 0:
        raise DomainError('reservoir concentration must be positive')
    return math.sqrt(d.epsilon * d.k_B * d.temperature / (8 * math.pi * d.charge ** 2 * c_inf * d.c_ref))
