"""
Configuration file for the electrodiffusion junction toolkit
"""
import os

# Path configs
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..'))  # src/backlund_junction -> repo root
PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(PROJECT_ROOT, 'data')

# Outputs of the reproduction pipeline
OUTPUT_DIR = os.path.join(DATA_DIR, 'output')
FIGURES_DIR = os.path.join(OUTPUT_DIR, 'figures')  # one folder per figure case, CSV + JSON

# Numerical tolerances
SINGULAR_TOL = 1e-12        # |c+|, |c-| or a denominator below this at a point -> movable pole
PRECONDITION_TOL = 1e-12    # A+=0, A-=0, A+=A- checks of the Gambier maps
ZERO_FIELD_TOL = 1e-13      # max|E| below this on the scan grid -> E identically zero (heuristic)
FD_STEP = 1e-5              # central differences for the residual checks
PAINLEVE_FD_STEP = 1e-4     # second differences need a larger step
INTERFACE_TOL = 1e-8        # c+(0)c-(0)=c_inf^2 consistency of interface data

# Where the first integral B is evaluated, with a fallback scan if that point is a pole
INTEGRAL_POINT = 0.5
INTEGRAL_FALLBACK = [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9]

# Backlund chains are lazy; depth is capped to bound evaluation cost
MAX_TRANSFORM_DEPTH = 32

# Scan grids
DEFAULT_SCAN_POINTS = 1001
SCAN_DENSITIES = [251, 1001, 4001]
AIRY_ZERO_SCAN_POINTS = 256

# Collocation solver defaults
SOLVER_DEFAULTS = {
    'mesh_size': 400,
    'tolerance': 1e-10,
    'max_iterations': 50,
    'max_halvings': 8,
    'continuation_steps': 8,
    'continuation_factor': 2.0,
    'scheme': 'hermite-simpson',
}

# Airy functions: documented validity range and regime switchovers
AIRY_MAX_ARGUMENT = 30.0
AIRY_SERIES_RADIUS = 2.0
AIRY_ASYMPTOTIC_RADIUS = 8.0

# Parameter sets of the published figures (dimensionless)
FIGURE_CASES = {
    'fig1_ladder': {'c0': 1 / 3, 'A': 1 / 3, 'lambda2': 0.01, 'n_min': -8, 'n_max': 8},
    'fig2_left': {'bc': 'neutral', 'c0': 1 / 3, 'c1': 2 / 3, 'lambda': 0.5, 'alpha_plus': 0.8, 'j0': 0.0},
    'fig2_right': {'bc': 'neutral', 'c0': 1 / 3, 'c1': 2 / 3, 'lambda': 0.5, 'alpha_plus': 0.4, 'j0': 0.0},
    'fig3_left': {'bc': 'neutral', 'c0': 1 / 3, 'c1': 2 / 3, 'lambda': 0.7, 'alpha_plus': 0.4, 'j0': 0.16},
    'fig3_right': {'bc': 'neutral', 'c0': 1 / 3, 'c1': 2 / 3, 'lambda': 0.7, 'alpha_plus': 0.4, 'j0': 0.6},
    'fig4_radiation': {'bc': 'radiation', 'c0': 1 / 3, 'c1': 2 / 3, 'lambda': 0.7, 'alpha_plus': 0.4, 'j0': 0.16},
}

# Reservoir plotting range, in Debye lengths on each side of the slab
RESERVOIR_DEBYE_SPAN = 6.0
RESERVOIR_POINTS = 201

# CSV numbers are written with 17 significant digits
CSV_FLOAT_FORMAT = '%.17g'
