"""
BVP SOLVER - Two-point boundary-value solver for the five-component first-order system

    c+' = E c+ + A+,  c-' = -E c- + A-,  lambda^2 E' = c+ - c-,  A+' = 0,  A-' = 0

on a uniform mesh of [0, 1] under three boundary-condition families:
  neutral    c+- = c0 at x = 0, c+- = c1 at x = 1
  radiation  linearized reservoir matching at both faces
  exact      exact (Poisson-Boltzmann) reservoir matching at both faces
plus one flux condition at x = 0 (prescribed current j0 by default).

Discretization is a box scheme on node pairs (Hermite-Simpson by default, midpoint as the
second-order alternative). Unknowns are ordered node by node and equations as
[3 left conditions, 5 per interval, 2 right conditions], which makes the Newton matrix banded
with 7 sub- and 6 super-diagonals.
"""
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd
from scipy.interpolate import BPoly
from scipy.linalg import LinAlgError, solve_banded

from backlund_junction.config import (
    INTERFACE_TOL, RESERVOIR_DEBYE_SPAN, RESERVOIR_POINTS, SOLVER_DEFAULTS,
)
from backlund_junction.errors import (
    ConsistencyError, DomainError, NonConvergence, SingularJacobian,
)
from backlund_junction.exact_solutions import (
    ReservoirProfile, amplitude_from_interface, interface_concentrations, reservoir_fields,
)
from backlund_junction.model_core import FieldSample, ModelParams, SolutionState, invariants_of

logger = logging.getLogger(__name__)

FAMILIES = ('neutral', 'radiation', 'exact')
FLUX_CONDITIONS = ('current', 'a_plus_zero', 'a_minus_zero')
SCHEMES = ('hermite-simpson', 'midpoint')

N_COMPONENTS = 5
LOWER_BANDS = 7
UPPER_BANDS = 6


@dataclass(frozen=True)
class BoundarySpec:
    """
    Boundary data of one family

    left/right are (c0, c1) for 'neutral' and the reservoir concentrations (c_-inf, c_+inf) otherwise.
    flux_condition picks the fifth equation: alpha- A- - alpha+ A+ = j0 ('current'), A+(0) = 0 or A-(0) = 0.
    """
    family: str
    left: float
    right: float
    j0: float = 0.0
    flux_condition: str = 'current'

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f'boundary family must be one of {FAMILIES}, got {self.family!r}')
        if self.flux_condition not in FLUX_CONDITIONS:
            raise DomainError(f'flux condition must be one of {FLUX_CONDITIONS}, got {self.flux_condition!r}')
        if not 0 < self.left <= self.right:
            raise DomainError(f'need 0 < left <= right, got {self.left}, {self.right}')
        if not self.normalized:
            logger.info(f'boundary concentrations sum to {self.left + self.right:.6g}, not 1')

    @classmethod
    def charge_neutral(cls, c0, c1, j0=0.0, flux_condition='current'):
        return cls('neutral', c0, c1, j0, flux_condition)

    @classmethod
    def radiation(cls, c_minus_inf, c_plus_inf, j0=0.0, flux_condition='current'):
        return cls('radiation', c_minus_inf, c_plus_inf, j0, flux_condition)

    @classmethod
    def exact_reservoir(cls, c_minus_inf, c_plus_inf, j0=0.0, flux_condition='current'):
        return cls('exact', c_minus_inf, c_plus_inf, j0, flux_condition)

    @property
    def normalized(self):
        return abs(self.left + self.right - 1.0) <= 1e-12

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SolverConfig:
    mesh_size: int = SOLVER_DEFAULTS['mesh_size']
    tolerance: float = SOLVER_DEFAULTS['tolerance']
    max_iterations: int = SOLVER_DEFAULTS['max_iterations']
    max_halvings: int = SOLVER_DEFAULTS['max_halvings']
    continuation_steps: int = SOLVER_DEFAULTS['continuation_steps']
    continuation_factor: float = SOLVER_DEFAULTS['continuation_factor']
    scheme: str = SOLVER_DEFAULTS['scheme']
    continuation: bool = True

    def __post_init__(self):
        if self.mesh_size < 16:
            raise DomainError(f'mesh size must be at least 16, got {self.mesh_size}')
        if not self.tolerance > 0:
            raise DomainError('tolerance must be positive')
        if self.max_iterations < 1 or self.max_halvings < 0 or self.continuation_steps < 1:
            raise DomainError('iteration counts must be positive')
        if not self.continuation_factor > 1:
            raise DomainError('continuation factor must exceed 1')
        if self.scheme not in SCHEMES:
            raise DomainError(f'scheme must be one of {SCHEMES}, got {self.scheme!r}')

    def as_dict(self):
        return asdict(self)


# ---------------------------------------------------------------------------
# Right-hand side and its partials
# ---------------------------------------------------------------------------

def _rhs(y, lambda2):
    out = np.zeros_like(y)
    c_plus, c_minus, e, a_plus, a_minus = y.T
    out[:, 0] = e * c_plus + a_plus
    out[:, 1] = -e * c_minus + a_minus
    out[:, 2] = (c_plus - c_minus) / lambda2
    return out


def _rhs_jacobian(y, lambda2):
    jac = np.zeros((len(y), N_COMPONENTS, N_COMPONENTS))
    jac[:, 0, 0] = y[:, 2]
    jac[:, 0, 2] = y[:, 0]
    jac[:, 0, 3] = 1.0
    jac[:, 1, 1] = -y[:, 2]
    jac[:, 1, 2] = -y[:, 1]
    jac[:, 1, 4] = 1.0
    jac[:, 2, 0] = 1.0 / lambda2
    jac[:, 2, 1] = -1.0 / lambda2
    return jac


def _interval_equations(y, h, lambda2, scheme):
    """Box-scheme residuals per interval (N, 5) and their blocks d/dy_i, d/dy_{i+1} (N, 5, 5)"""
    left, right = y[:-1], y[1:]
    f = _rhs(y, lambda2)
    f_left, f_right = f[:-1], f[1:]
    eye = np.eye(N_COMPONENTS)
    if scheme == 'midpoint':
        mid = 0.5 * (left + right)
        jac_mid = _rhs_jacobian(mid, lambda2)
        residual = (right - left) / h - _rhs(mid, lambda2)
        return residual, -eye / h - 0.5 * jac_mid, eye / h - 0.5 * jac_mid
    # Hermite-Simpson (Lobatto IIIA): cubic through both nodes, collocated at the midpoint
    mid = 0.5 * (left + right) - h / 8 * (f_right - f_left)
    f_mid = _rhs(mid, lambda2)
    jac = _rhs_jacobian(y, lambda2)
    jac_left, jac_right = jac[:-1], jac[1:]
    jac_mid = _rhs_jacobian(mid, lambda2)
    residual = (right - left) / h - (f_left + 4 * f_mid + f_right) / 6
    d_left = -eye / h - (jac_left + 4 * jac_mid @ (0.5 * eye + h / 8 * jac_left)) / 6
    d_right = eye / h - (4 * jac_mid @ (0.5 * eye - h / 8 * jac_right) + jac_right) / 6
    return residual, d_left, d_right


# ---------------------------------------------------------------------------
# Boundary conditions
# ---------------------------------------------------------------------------

def _flux_row(spec, params, y0):
    grad = np.zeros(N_COMPONENTS)
    if spec.flux_condition == 'current':
        grad[3], grad[4] = -params.alpha_plus, params.alpha_minus
        return params.alpha_minus * y0[4] - params.alpha_plus * y0[3] - spec.j0, grad
    index = 3 if spec.flux_condition == 'a_plus_zero' else 4
    grad[index] = 1.0
    return y0[index], grad


def _face_rows(spec, params, y, c_face, side):
    """Two field conditions at one face; side is 'left' (x = 0) or 'right' (x = 1)"""
    c_plus, c_minus, e = y[0], y[1], y[2]
    values = np.zeros(2)
    jac = np.zeros((2, N_COMPONENTS))
    if spec.family == 'neutral':
        values[:] = c_plus - c_face, c_minus - c_face
        jac[0, 0] = jac[1, 1] = 1.0
        return values, jac
    lam = params.lambda_
    if spec.family == 'radiation':
        # c+ + c- = 2c, c+ - c- = +-2 c lambda0 E with lambda0 = lambda / sqrt(2c)
        debye = lam / math.sqrt(2 * c_face)
        sign = 1.0 if side == 'left' else -1.0
        values[:] = c_plus + c_minus - 2 * c_face, c_plus - c_minus - sign * 2 * c_face * debye * e
        jac[0, 0] = jac[0, 1] = 1.0
        jac[1, 0], jac[1, 1], jac[1, 2] = 1.0, -1.0, -sign * 2 * c_face * debye
        return values, jac
    # exact reservoir: c+- at the face as explicit functions of E there
    target_plus, target_minus = interface_concentrations(c_face, lam, e, side)
    q = lam * e
    root = math.sqrt(8 * c_face + q * q)
    d_base = 0.5 * q * lam
    d_cross = 0.25 * lam * (root + q * q / root)
    if side == 'right':
        d_cross = -d_cross
    values[:] = c_plus - target_plus, c_minus - target_minus
    jac[0, 0], jac[0, 2] = 1.0, -(d_base + d_cross)
    jac[1, 1], jac[1, 2] = 1.0, -(d_base - d_cross)
    return values, jac


def _boundary_equations(spec, params, y):
    face_left, jac_face_left = _face_rows(spec, params, y[0], spec.left, 'left')
    flux, flux_grad = _flux_row(spec, params, y[0])
    left = np.append(face_left, flux)
    jac_left = np.vstack([jac_face_left, flux_grad])
    right, jac_right = _face_rows(spec, params, y[-1], spec.right, 'right')
    return left, jac_left, right, jac_right


# ---------------------------------------------------------------------------
# Newton iteration
# ---------------------------------------------------------------------------

def _residual(y, spec, params, h, scheme):
    interval, _, _ = _interval_equations(y, h, params.lambda2, scheme)
    left, _, right, _ = _boundary_equations(spec, params, y)
    return np.concatenate([left, interval.ravel(), right])


def _banded_jacobian(y, spec, params, h, scheme):
    n_nodes = len(y)
    n = N_COMPONENTS * n_nodes
    u = UPPER_BANDS
    ab = np.zeros((LOWER_BANDS + UPPER_BANDS + 1, n))
    interval, d_left, d_right = _interval_equations(y, h, params.lambda2, scheme)
    left, jac_left, right, jac_right = _boundary_equations(spec, params, y)
    starts = N_COMPONENTS * np.arange(n_nodes - 1)
    last = N_COMPONENTS * (n_nodes - 1)
    for c in range(N_COMPONENTS):
        for r in range(3):
            ab[u + r - c, c] = jac_left[r, c]
        for r in range(N_COMPONENTS):
            # row 3 + 5i + r against columns 5i + c and 5(i+1) + c
            ab[u + 3 + r - c, starts + c] = d_left[:, r, c]
            ab[u - 2 + r - c, starts + N_COMPONENTS + c] = d_right[:, r, c]
        for r in range(2):
            ab[u + 3 + r - c, last + c] = jac_right[r, c]
    residual = np.concatenate([left, interval.ravel(), right])
    return ab, residual


def _newton(y, spec, params, cfg, h):
    """Damped Newton from y; returns (solution, iterations, final max-norm residual, step halvings)"""
    shape = y.shape
    ab, residual = _banded_jacobian(y, spec, params, h, cfg.scheme)
    norm = float(np.max(np.abs(residual)))
    halvings = 0
    for iteration in range(cfg.max_iterations + 1):
        logger.debug(f'lambda={params.lambda_:.4g} iteration {iteration}: |F| = {norm:.3e}')
        if norm < cfg.tolerance:
            return y, iteration, norm, halvings
        if iteration == cfg.max_iterations:
            break
        try:
            step = solve_banded((LOWER_BANDS, UPPER_BANDS), ab, -residual).reshape(shape)
        except (LinAlgError, ValueError) as exc:
            raise SingularJacobian(f'Newton matrix is singular: {exc}',
                                   {'iterations': iteration, 'residual_norm': norm}, y) from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobian('Newton step is not finite', {'iterations': iteration, 'residual_norm': norm}, y)
        t = 1.0
        for _ in range(cfg.max_halvings + 1):
            trial = y + t * step
            trial_residual = _residual(trial, spec, params, h, cfg.scheme)
            trial_norm = float(np.max(np.abs(trial_residual)))
            if np.isfinite(trial_norm) and trial_norm <= (1 - 1e-4 * t) * norm:
                break
            t *= 0.5
            halvings += 1
        else:
            raise NonConvergence(f'line search failed after {cfg.max_halvings} halvings (|F| = {norm:.3e})',
                                 {'iterations': iteration, 'residual_norm': norm, 'halvings': halvings}, y)
        y = trial
        ab, residual = _banded_jacobian(y, spec, params, h, cfg.scheme)
        norm = float(np.max(np.abs(residual)))
    raise NonConvergence(f'no convergence in {cfg.max_iterations} iterations (|F| = {norm:.3e})',
                         {'iterations': cfg.max_iterations, 'residual_norm': norm, 'halvings': halvings}, y)


def initial_guess(spec, params, mesh):
    """Linear concentrations between the face data with the Planck field and flux split"""
    c = spec.left + (spec.right - spec.left) * mesh
    theta = 2 * (spec.right - spec.left)
    if spec.flux_condition == 'a_plus_zero':
        a_plus, a_minus = 0.0, theta
    elif spec.flux_condition == 'a_minus_zero':
        a_plus, a_minus = theta, 0.0
    else:
        a_plus = params.alpha_minus * theta - spec.j0
        a_minus = params.alpha_plus * theta + spec.j0
    y = np.empty((len(mesh), N_COMPONENTS))
    y[:, 0] = c
    y[:, 1] = c
    y[:, 2] = 0.5 * (a_minus - a_plus) / c
    y[:, 3] = a_plus
    y[:, 4] = a_minus
    return y


# ---------------------------------------------------------------------------
# Mesh solutions
# ---------------------------------------------------------------------------

class MeshSolution(SolutionState):
    """
    Solver output on the mesh, evaluated anywhere in [0, 1] through a piecewise quintic Hermite
    interpolant of (c+, c-, E) that matches values, first and second derivatives at the nodes
    """
    provenance = 'mesh'

    def __init__(self, mesh, y, spec, params, diagnostics=None):
        mesh = np.asarray(mesh, dtype=float)
        y = np.asarray(y, dtype=float)
        a_plus, a_minus = float(y[0, 3]), float(y[0, 4])
        # A+(0) = 0 and A-(0) = 0 are linear rows satisfied to rounding
        if spec.flux_condition == 'a_plus_zero':
            a_plus = 0.0
        elif spec.flux_condition == 'a_minus_zero':
            a_minus = 0.0
        super().__init__(a_plus, a_minus, params)
        y = y.copy()
        y[:, 3], y[:, 4] = a_plus, a_minus
        self.x = mesh
        self.nodes = y
        self.spec = spec
        self.diagnostics = dict(diagnostics or {})
        slope = _rhs(y, params.lambda2)
        curvature = np.einsum('nij,nj->ni', _rhs_jacobian(y, params.lambda2), slope)
        self._interpolants = [
            BPoly.from_derivatives(mesh, np.column_stack([y[:, k], slope[:, k], curvature[:, k]]))
            for k in range(3)
        ]
        self.negative_concentration = bool(np.min(y[:, :2]) <= 0)
        if self.negative_concentration:
            logger.warning(f'{spec.family} solution has non-positive concentrations on the mesh')

    @property
    def c_plus(self):
        return self.nodes[:, 0]

    @property
    def c_minus(self):
        return self.nodes[:, 1]

    @property
    def e(self):
        return self.nodes[:, 2]

    def _sample(self, x):
        regular = (x >= -1e-12) & (x <= 1 + 1e-12)
        inside = np.clip(x, 0.0, 1.0)
        c_plus, c_minus, e = (p(inside) for p in self._interpolants)
        return FieldSample(x, c_plus, c_minus, e, regular)

    def table(self):
        return pd.DataFrame({'x': self.x, 'c_plus': self.c_plus, 'c_minus': self.c_minus, 'E': self.e},
                            columns=['x', 'c_plus', 'c_minus', 'E'])

    def as_dict(self):
        inv = invariants_of(self)
        return {
            'params': self.params.as_dict(),
            'boundary': self.spec.as_dict(),
            'mesh': self.x.tolist(),
            'c_plus': self.c_plus.tolist(),
            'c_minus': self.c_minus.tolist(),
            'E': self.e.tolist(),
            'A_plus': self.a_plus,
            'A_minus': self.a_minus,
            'invariants': {'B': inv.B, 'theta': inv.theta, 'phi': inv.phi},
            'negative_concentration': self.negative_concentration,
            'diagnostics': self.diagnostics,
        }

    @classmethod
    def from_dict(cls, doc):
        """Rebuild a solution from as_dict() output without re-solving"""
        params = ModelParams(doc['params']['lambda'], doc['params']['alpha_plus'], doc['params']['alpha_minus'])
        spec = BoundarySpec(**doc['boundary'])
        n = len(doc['mesh'])
        y = np.column_stack([doc['c_plus'], doc['c_minus'], doc['E'],
                             np.full(n, doc['A_plus']), np.full(n, doc['A_minus'])])
        return cls(doc['mesh'], y, spec, params, doc.get('diagnostics'))


def solve(spec, params, cfg=None):
    """
    Solve the boundary-value problem; continuation in lambda (from continuation_factor * lambda
    down to lambda in continuation_steps geometric steps) is tried when the direct solve fails
    """
    cfg = cfg or SolverConfig()
    mesh = np.linspace(0.0, 1.0, cfg.mesh_size + 1)
    h = 1.0 / cfg.mesh_size
    guess = initial_guess(spec, params, mesh)
    diagnostics = {'scheme': cfg.scheme, 'mesh_size': cfg.mesh_size, 'tolerance': cfg.tolerance,
                   'initial_guess': 'linear concentrations with the Planck field', 'continuation': False}
    try:
        y, iterations, norm, halvings = _newton(guess, spec, params, cfg, h)
        lambda_path = [params.lambda_]
    except NonConvergence as failure:
        if not cfg.continuation:
            raise
        logger.info(f'direct solve failed ({failure}); continuing in lambda')
        y, iterations, norm, halvings, lambda_path = _continuation(guess, spec, params, cfg, h)
        diagnostics['continuation'] = True
    diagnostics.update({'iterations': iterations, 'residual_norm': norm, 'halvings': halvings,
                        'lambda_path': lambda_path})
    solution = MeshSolution(mesh, y, spec, params, diagnostics)
    solution.diagnostics['min_c_plus'] = float(np.min(solution.c_plus))
    solution.diagnostics['min_c_minus'] = float(np.min(solution.c_minus))
    logger.info(f'{spec.family} solve converged: {iterations} iterations, |F| = {norm:.2e}, '
                f'A+ = {solution.a_plus:.6g}, A- = {solution.a_minus:.6g}')
    return solution


def _continuation(y, spec, params, cfg, h):
    steps = cfg.continuation_steps
    lambdas = [params.lambda_ * cfg.continuation_factor ** ((steps - k) / steps) for k in range(steps + 1)]
    total_iterations = total_halvings = 0
    norm = math.inf
    for lam in lambdas:
        stage = ModelParams(lam, params.alpha_plus, params.alpha_minus)
        try:
            y, iterations, norm, halvings = _newton(y, spec, stage, cfg, h)
        except NonConvergence as exc:
            exc.diagnostics['lambda_reached'] = lam
            exc.diagnostics['continuation'] = True
            raise
        total_iterations += iterations
        total_halvings += halvings
        logger.info(f'continuation lambda = {lam:.6g}: {iterations} iterations')
    return y, total_iterations, norm, total_halvings, lambdas


# ---------------------------------------------------------------------------
# Post-processing
# ---------------------------------------------------------------------------

def neumann_check(m):
    """lambda^2 E' at x = 0 and x = 1, computed as c+ - c- there"""
    c_plus, c_minus, _ = m.evaluate(np.array([0.0, 1.0]))
    return float(c_plus[0] - c_minus[0]), float(c_plus[1] - c_minus[1])


def radiation_check(m, spec):
    """Defects of lambda0 E'(0) = E(0) and lambda1 E'(1) = -E(1)"""
    c_plus, c_minus, e = m.evaluate(np.array([0.0, 1.0]))
    lambda0 = m.params.lambda_ / math.sqrt(2 * spec.left)
    lambda1 = m.params.lambda_ / math.sqrt(2 * spec.right)
    slope = (c_plus - c_minus) / m.lambda2
    return float(lambda0 * slope[0] - e[0]), float(lambda1 * slope[1] + e[1])


def monotonicity(m):
    """'increasing', 'decreasing' or 'none' for E over the mesh nodes"""
    step = np.diff(m.e)
    if np.all(step > 0):
        return 'increasing'
    if np.all(step < 0):
        return 'decreasing'
    return 'none'


@dataclass
class FullDomainProfile:
    left: pd.DataFrame
    slab: pd.DataFrame
    right: pd.DataFrame
    reservoirs: dict
    continuity: dict = field(default_factory=dict)

    def combined(self):
        frames = [frame.assign(region=name) for name, frame in
                  (('left', self.left), ('slab', self.slab), ('right', self.right))]
        return pd.concat(frames, ignore_index=True)


def _reservoirs_for(m, spec):
    lam = m.params.lambda_
    c_plus, c_minus, e = m.evaluate(np.array([0.0, 1.0]))
    if spec.family == 'radiation':
        lambda0 = lam / math.sqrt(2 * spec.left)
        lambda1 = lam / math.sqrt(2 * spec.right)
        left = ReservoirProfile('left', spec.left, lam, mode='linearized', phi0=-lambda0 * e[0])
        right = ReservoirProfile('right', spec.right, lam, mode='linearized', phi0=lambda1 * e[1])
        return left, right, {}
    # amplitude_from_interface enforces c+ c- = c_inf^2 at each face
    amp_left = amplitude_from_interface(c_plus[0], c_minus[0], spec.left)
    amp_right = amplitude_from_interface(c_plus[1], c_minus[1], spec.right)
    defects = {'product_left': float(c_plus[0] * c_minus[0] - spec.left ** 2),
               'product_right': float(c_plus[1] * c_minus[1] - spec.right ** 2)}
    return (ReservoirProfile('left', spec.left, lam, amplitude=amp_left),
            ReservoirProfile('right', spec.right, lam, amplitude=amp_right), defects)


def assemble_full_domain(m, spec, x_range_left=None, x_range_right=None, points=RESERVOIR_POINTS,
                         tol=INTERFACE_TOL):
    """
    Stitch reservoir profiles onto a slab solution: linearized reservoirs for 'radiation',
    exact ones for 'exact'. Field jumps at both interfaces must stay below tol.
    """
    if spec.family not in ('radiation', 'exact'):
        raise DomainError('full-domain assembly needs the radiation or exact reservoir family')
    left_res, right_res, defects = _reservoirs_for(m, spec)
    if x_range_left is None:
        x_range_left = (-RESERVOIR_DEBYE_SPAN * left_res.lambda0, 0.0)
    if x_range_right is None:
        x_range_right = (1.0, 1.0 + RESERVOIR_DEBYE_SPAN * right_res.lambda0)
    frames = {}
    for name, res, (lo, hi) in (('left', left_res, x_range_left), ('right', right_res, x_range_right)):
        x = np.linspace(lo, hi, points)
        c_plus, c_minus, e = reservoir_fields(res, x)
        frames[name] = pd.DataFrame({'x': x, 'c_plus': c_plus, 'c_minus': c_minus, 'E': e})
    slab = m.table()

    continuity = dict(defects)
    for name, slab_row, frame_row in (('left', 0, -1), ('right', -1, 0)):
        jump = (frames[name].iloc[frame_row][['c_plus', 'c_minus', 'E']].to_numpy()
                - slab.iloc[slab_row][['c_plus', 'c_minus', 'E']].to_numpy())
        continuity[f'jump_{name}'] = float(np.max(np.abs(jump)))
    worst = max(continuity['jump_left'], continuity['jump_right'])
    if worst > tol:
        raise ConsistencyError(f'reservoir and slab fields disagree at an interface by {worst:.3e}')
    reservoirs = {'left': left_res.as_dict(), 'right': right_res.as_dict()}
    return FullDomainProfile(frames['left'], slab, frames['right'], reservoirs, continuity)
