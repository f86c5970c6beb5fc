"""
EXACT SOLUTIONS - Closed-form solutions of the junction system and of the reservoir problem

Slab solutions (SolutionState):
  - Planck seed c+ = c- = c0 + Ax, E = 0, root of the rational Backlund sequence
  - the small-lambda Planck profile (approximate unless A+ = A-)
  - rational members B^n of the Planck seed, with the n = +-1 closed forms for cross-checks
  - the Airy seed reached from the Planck seed by the inverse Gambier map, and its conjugate
Reservoir profiles (x <= 0 on the left, x >= 1 on the right):
  - the exact Poisson-Boltzmann profile and its linearization
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from backlund_junction.config import (
    AIRY_ZERO_SCAN_POINTS, INTERFACE_TOL, MAX_TRANSFORM_DEPTH, PAINLEVE_FD_STEP,
)
from backlund_junction.errors import ConsistencyError, DomainError, PoleOnInterval
from backlund_junction.model_core import FieldSample, SolutionState, safe_divide
from backlund_junction.specfun import airy, airy_array
from backlund_junction.transforms import iterate_backlund

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Planck family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanckSeedParams:
    c0: float
    A: float

    def __post_init__(self):
        if not self.c0 > 0:
            raise DomainError(f'c0 must be positive, got {self.c0}')
        if not self.c0 + self.A > 0:
            raise DomainError(f'c0 + A must be positive (concentration at x = 1), got {self.c0 + self.A}')


class PlanckSeed(SolutionState):
    provenance = 'planck'

    def __init__(self, p, params):
        super().__init__(p.A, p.A, params)
        self.seed = p

    def _sample(self, x):
        c = self.seed.c0 + self.seed.A * x
        return FieldSample(x, c, c.copy(), np.zeros_like(x), np.ones_like(x, dtype=bool))


def planck_seed(p, params):
    """Exact zero-field solution with A+ = A- = A"""
    return PlanckSeed(p, params)


class PlanckProfile(SolutionState):
    """
    Small-lambda Planck profile: c+ = c- = c(x) = c0 + (A+ + A-)x/2, E = (A- - A+) / (2 c(x))

    Only an approximate solution unless A+ = A- (then it is the Planck seed).
    """
    provenance = 'planck'

    def __init__(self, c0, a_plus, a_minus, params):
        super().__init__(a_plus, a_minus, params)
        self.c0 = float(c0)
        self.c1 = self.c0 + 0.5 * (a_plus + a_minus)
        if not (self.c0 > 0 and self.c1 > 0):
            raise DomainError(f'c(x) vanishes on [0, 1] (c0 = {self.c0}, c1 = {self.c1})')
        self.approximate = a_plus != a_minus

    def _sample(self, x):
        c = self.c0 + (self.c1 - self.c0) * x
        e = 0.5 * (self.a_minus - self.a_plus) / c
        return FieldSample(x, c, c.copy(), e, np.ones_like(x, dtype=bool))


def planck_small_lambda(c0, a_plus, a_minus, params):
    return PlanckProfile(c0, a_plus, a_minus, params)


def planck_field_decomposition(c0, a_plus, a_minus, params, x):
    """
    Split the small-lambda field into its ohmic part j / c(x) and the diffusion-potential part
    (alpha+ - alpha-)(c1 - c0) / c(x); the two sum to E(x)
    """
    profile = PlanckProfile(c0, a_plus, a_minus, params)
    c = profile.c0 + (profile.c1 - profile.c0) * np.asarray(x, dtype=float)
    j = params.alpha_minus * a_minus - params.alpha_plus * a_plus
    ohmic = j / c
    gradient = (params.alpha_plus - params.alpha_minus) * (profile.c1 - profile.c0) / c
    return ohmic, gradient


class FirstExcitedState(SolutionState):
    """
    Closed forms of B(S) (up=True) and B^-1(S) (up=False) for the Planck seed S:
        c(x) = c0 + Ax,  c_big = c + 2 lambda^2 A^2 / c^2
        up:    c+ = c_big, c- = c, E = -2A/c, A+ = 3A, A- = -A
        down:  c+ = c, c- = c_big, E =  2A/c, A+ = -A, A- = 3A
    """
    provenance = 'planck'

    def __init__(self, p, params, up=True):
        a = p.A
        super().__init__(3 * a if up else -a, -a if up else 3 * a, params, depth=1)
        self.seed = p
        self.up = up

    def _sample(self, x):
        a = self.seed.A
        c = self.seed.c0 + a * x
        inv, regular = safe_divide(1.0, c, np.ones_like(x, dtype=bool))
        big = c + 2 * self.lambda2 * a * a * inv * inv
        e = 2 * a * inv
        if self.up:
            return FieldSample(x, big, c, -e, regular)
        return FieldSample(x, c, big, e, regular)


def first_excited_state(p, params, up=True):
    return FirstExcitedState(p, params, up)


def rational_member(p, params, n, max_depth=MAX_TRANSFORM_DEPTH):
    """n-th member B^n of the rational sequence through the Planck seed"""
    if abs(n) > max_depth:
        raise DomainError(f'|n| = {abs(n)} exceeds the depth cap {max_depth}')
    return iterate_backlund(planck_seed(p, params), n, max_depth)


# ---------------------------------------------------------------------------
# Airy seed
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AirySeedParams:
    """F(x) = a Ai(s) + b Bi(s) with s = 2(c0 + Ax) / (4 lambda^2 A^2)^(1/3); lambda comes from ModelParams"""
    c0: float
    A: float
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if self.A == 0:
            raise DomainError('A = 0 leaves the Airy argument undefined')
        if self.a == 0 and self.b == 0:
            raise DomainError('a and b cannot both vanish')


class AirySeed(SolutionState):
    """
    Airy seed and its conjugate (minus=True), with r = F'/F:
        c+ = 0,  c- = 2 lambda^2 r^2 - 4Ax - 4c0,  E = 2r,  A+ = 0,  A- = -4A,  B = -4c0
    """
    provenance = 'airy-seed'

    def __init__(self, p, params, minus=False):
        flux = -4 * p.A
        super().__init__(flux if minus else 0.0, 0.0 if minus else flux, params)
        self.seed = p
        self.minus = minus
        self.scale = (4 * params.lambda2 * p.A ** 2) ** (1.0 / 3.0)
        self.ds_dx = 2 * p.A / self.scale
        self._check_poles()

    def argument(self, x):
        return 2 * (self.seed.c0 + self.seed.A * np.asarray(x, dtype=float)) / self.scale

    def f_and_derivative(self, x):
        v = airy_array(self.argument(x))
        f = self.seed.a * v.ai + self.seed.b * v.bi
        fp = self.ds_dx * (self.seed.a * v.ai_prime + self.seed.b * v.bi_prime)
        return f, fp

    def _f_scalar(self, x):
        v = airy(float(self.argument(x)))
        return self.seed.a * v.ai + self.seed.b * v.bi

    def _check_poles(self):
        grid = np.linspace(0.0, 1.0, AIRY_ZERO_SCAN_POINTS)
        f, _ = self.f_and_derivative(grid)
        exact = np.flatnonzero(f == 0)
        if exact.size:
            raise PoleOnInterval(grid[exact[0]])
        flips = np.flatnonzero(np.sign(f[:-1]) != np.sign(f[1:]))
        if flips.size:
            lo, hi = grid[flips[0]], grid[flips[0] + 1]
            f_lo = f[flips[0]]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                f_mid = self._f_scalar(mid)
                if f_mid == 0:
                    lo = hi = mid
                    break
                if np.sign(f_mid) == np.sign(f_lo):
                    lo, f_lo = mid, f_mid
                else:
                    hi = mid
            raise PoleOnInterval(0.5 * (lo + hi))

    def _sample(self, x):
        f, fp = self.f_and_derivative(x)
        r, regular = safe_divide(fp, f, np.ones_like(x, dtype=bool))
        loaded = 2 * self.lambda2 * r * r - 4 * self.seed.A * x - 4 * self.seed.c0
        zero = np.zeros_like(x)
        if self.minus:
            return FieldSample(x, loaded, zero, -2 * r, regular)
        return FieldSample(x, zero, loaded, 2 * r, regular)


def airy_seed(p, params):
    return AirySeed(p, params, minus=False)


def airy_seed_minus(p, params):
    """Conjugate Airy seed, the image of the same starting point under the minus inverse Gambier map"""
    return AirySeed(p, params, minus=True)


# ---------------------------------------------------------------------------
# Reservoirs
# ---------------------------------------------------------------------------

RESERVOIR_SIDES = ('left', 'right')
RESERVOIR_MODES = ('exact', 'linearized')


@dataclass(frozen=True)
class ReservoirProfile:
    """
    Neutral reservoir joined to one face of the slab

    lambda_ is the slab lambda; the reservoir Debye length is lambda0 = lambda / sqrt(2 c_infinity).
    amplitude is used in exact mode (|amplitude| < 1), phi0 in linearized mode.
    """
    side: str
    c_infinity: float
    lambda_: float
    amplitude: float = 0.0
    mode: str = 'exact'
    phi0: float = 0.0

    def __post_init__(self):
        if self.side not in RESERVOIR_SIDES:
            raise DomainError(f'side must be one of {RESERVOIR_SIDES}, got {self.side!r}')
        if self.mode not in RESERVOIR_MODES:
            raise DomainError(f'mode must be one of {RESERVOIR_MODES}, got {self.mode!r}')
        if not (self.c_infinity > 0 and self.lambda_ > 0):
            raise DomainError('c_infinity and lambda must be positive')
        if self.mode == 'exact' and not -1 < self.amplitude < 1:
            raise DomainError(f'amplitude must lie in (-1, 1), got {self.amplitude}')

    @property
    def lambda0(self):
        return self.lambda_ / math.sqrt(2 * self.c_infinity)

    @property
    def interface(self):
        return 0.0 if self.side == 'left' else 1.0

    def depth_coordinate(self, x):
        """Signed distance into the reservoir measured as x - 0 on the left and 1 - x on the right (<= 0)"""
        x = np.asarray(x, dtype=float)
        xi = x if self.side == 'left' else 1.0 - x
        if np.any(xi > 1e-12):
            raise DomainError(f'points outside the {self.side} reservoir')
        return np.minimum(xi, 0.0)

    def as_dict(self):
        return {'side': self.side, 'c_infinity': self.c_infinity, 'lambda': self.lambda_,
                'lambda0': self.lambda0, 'amplitude': self.amplitude, 'mode': self.mode, 'phi0': self.phi0}


def matched_amplitude(phi0):
    """Exact-profile amplitude with the same interface potential phi(0)"""
    return math.tanh(phi0 / 4.0)


def _exact_left(c_inf, lambda0, amplitude, xi):
    u = amplitude * np.exp(xi / lambda0)
    if np.any(np.abs(u) >= 1):
        raise DomainError('|A exp(x / lambda0)| >= 1: pole of the reservoir profile')
    ratio = (1 - u) / (1 + u)
    phi = 2 * np.log((1 + u) / (1 - u))
    e = -4 * u / (lambda0 * (1 - u * u))
    return c_inf * ratio ** 2, c_inf / ratio ** 2, e, phi


def reservoir_exact(r, x):
    """
    Exact reservoir fields (c+, c-, E, phi) at x

    Left:  u = A exp(x/lambda0),  phi = 2 ln((1+u)/(1-u)),  c+- = c_inf exp(-+phi),
           E = -4u / (lambda0 (1 - u^2))
    Right: the left profile at 1 - x with E reversed.
    """
    if r.mode != 'exact':
        raise DomainError('reservoir_exact needs an exact-mode profile')
    c_plus, c_minus, e, phi = _exact_left(r.c_infinity, r.lambda0, r.amplitude, r.depth_coordinate(x))
    if r.side == 'right':
        e = -e
    return c_plus, c_minus, e, phi


def reservoir_linearized(r, x):
    """c+- = c_inf (1 -+ phi0 exp(x/lambda0)), E = -phi0 exp(x/lambda0) / lambda0 (left; right by reflection)"""
    decay = np.exp(r.depth_coordinate(x) / r.lambda0)
    c_plus = r.c_infinity * (1 - r.phi0 * decay)
    c_minus = r.c_infinity * (1 + r.phi0 * decay)
    e = -r.phi0 * decay / r.lambda0
    if r.side == 'right':
        e = -e
    return c_plus, c_minus, e


def reservoir_fields(r, x):
    """(c+, c-, E) in whichever mode the profile carries"""
    if r.mode == 'exact':
        return reservoir_exact(r, x)[:3]
    return reservoir_linearized(r, x)


def reservoir_potential(r, x):
    """phi(x); linearized mode gives phi0 exp(x/lambda0)"""
    if r.mode == 'exact':
        return reservoir_exact(r, x)[3]
    return r.phi0 * np.exp(r.depth_coordinate(x) / r.lambda0)


def _reservoir_stencil(r, x, h):
    """Three-point stencil centred at x, pulled inside the reservoir when x sits on the interface"""
    x = float(x)
    centre = min(x, -h) if r.side == 'left' else max(x, 1.0 + h)
    return np.array([centre - h, centre, centre + h])


def poisson_boltzmann_residual(r, x, h=PAINLEVE_FD_STEP):
    """-lambda^2 phi'' - c_inf (exp(-phi) - exp(phi)) at x by central differences"""
    points = _reservoir_stencil(r, x, h)
    phi = reservoir_potential(r, points)
    second = (phi[2] - 2 * phi[1] + phi[0]) / h ** 2
    return float(-r.lambda_ ** 2 * second - r.c_infinity * (math.exp(-phi[1]) - math.exp(phi[1])))


def reservoir_residual(r, x, h=PAINLEVE_FD_STEP):
    """Residuals of c+' = E c+, c-' = -E c-, lambda^2 E' = c+ - c- (zero fluxes) at x"""
    points = _reservoir_stencil(r, x, h)
    c_plus, c_minus, e = reservoir_fields(r, points)
    dc_plus, dc_minus, de = ((v[2] - v[0]) / (2 * h) for v in (c_plus, c_minus, e))
    return (float(dc_plus - e[1] * c_plus[1]),
            float(dc_minus + e[1] * c_minus[1]),
            float(r.lambda_ ** 2 * de - (c_plus[1] - c_minus[1])))


def amplitude_from_interface(c_plus_0, c_minus_0, c_infinity, tol=INTERFACE_TOL):
    """
    Amplitude A of the exact reservoir with the given interface concentrations

    Inverts c+(0) = c_inf ((1 - A)/(1 + A))^2; the data must satisfy c+(0) c-(0) = c_inf^2.
    """
    if not (c_plus_0 > 0 and c_minus_0 > 0 and c_infinity > 0):
        raise DomainError('interface concentrations must be positive')
    defect = c_plus_0 * c_minus_0 - c_infinity ** 2
    if abs(defect) > tol:
        raise ConsistencyError(f'c+(0) c-(0) - c_inf^2 = {defect:.3e}: not an exact reservoir interface')
    ratio = math.sqrt(c_plus_0 / c_infinity)
    return (1 - ratio) / (1 + ratio)


def interface_concentrations(c_infinity, lambda_, e_interface, side='left'):
    """
    Interface concentrations of an exact reservoir as functions of the interface field:
        left:  c+-(0) = c_inf + lambda^2 E^2/4 +- (lambda E/4) sqrt(8 c_inf + lambda^2 E^2)
        right: c+-(1) = c_inf + lambda^2 E^2/4 -+ (lambda E/4) sqrt(8 c_inf + lambda^2 E^2)
    """
    q = lambda_ * e_interface
    root = np.sqrt(8 * c_infinity + q * q)
    cross = 0.25 * q * root if side == 'left' else -0.25 * q * root
    base = c_infinity + 0.25 * q * q
    return base + cross, base - cross
