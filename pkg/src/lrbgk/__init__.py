"""Low-rank kinetic solver for the 1d2v BGK equation.

Nodal discontinuous Galerkin in position, truncated-SVD low-rank matrices in
velocity, and a stiffly accurate IMEX-RK2 advance with quadrature-corrected
moments for discrete conservation.
"""

from .discretization import DGDiscretization, VelocityGrid, build_dg, build_velocity_grid
from .errors import ConfigurationError, NumericalError, SolverError, StepError
from .integrator import IMEXTableau, StepConfig, cfl_dt, imex_step, run
from .lowrank import LowRankMatrix, hierarchical_sum, lrdi, truncated_sum
from .moments import compute_moment_field, compute_moments
from .problems import get_problem, build_initial_state
from .qcm import qcm_solve, qcm_solve_field
from .transport import BoundaryCondition, SolutionState, transport_rhs

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "ConfigurationError",
    "DGDiscretization",
    "IMEXTableau",
    "LowRankMatrix",
    "NumericalError",
    "SolutionState",
    "SolverError",
    "StepConfig",
    "StepError",
    "VelocityGrid",
    "build_dg",
    "build_initial_state",
    "build_velocity_grid",
    "cfl_dt",
    "compute_moment_field",
    "compute_moments",
    "get_problem",
    "hierarchical_sum",
    "imex_step",
    "lrdi",
    "qcm_solve",
    "qcm_solve_field",
    "run",
    "transport_rhs",
    "truncated_sum",
]
