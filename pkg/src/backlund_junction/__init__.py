"""
Steady two-ion electrodiffusion across a liquid junction: exact solution families generated by
Backlund and Gambier maps, the quantized flux ladder, and a collocation solver for the
charge-neutral and reservoir-matched boundary-value problems.
"""
from backlund_junction.bvp import BoundarySpec, MeshSolution, SolverConfig, solve
from backlund_junction.errors import JunctionError
from backlund_junction.model_core import ModelParams, SolutionState

__version__ = '0.1.0'

__all__ = ['BoundarySpec', 'JunctionError', 'MeshSolution', 'ModelParams', 'SolutionState', 'SolverConfig', 'solve']
