"""Fitted difference schemes for singularly perturbed reaction-diffusion problems.

Solves eps^2 y'' = f(x, y), y(0) = y(1) = 0 with f_y >= m > 0 on
layer-adapted meshes, using a one-parameter family of exponentially fitted
schemes and Newton's method.
"""

from .errors import ConfigError, ConvergenceError, SingularSystemError, StabilityError
from .harness import ConvergenceReport, conv_order, discrete_error, run_convergence
from .mesh import KINDS, Mesh, build_mesh, psi, transition_point, uniform_mesh
from .problem import Problem, eval_f, make_builtin_example1
from .scheme import SchemeParams, Tridiagonal, check_m_matrix, jacobian, kernels, residual
from .solver import DiscreteSolution, SolverConfig, newton_solve, thomas_solve
from .spline import GlobalSolution, cubic_moments, cubic_spline, eval_global, linear_spline

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "ConvergenceReport",
    "DiscreteSolution",
    "GlobalSolution",
    "KINDS",
    "Mesh",
    "Problem",
    "SchemeParams",
    "SingularSystemError",
    "SolverConfig",
    "StabilityError",
    "Tridiagonal",
    "build_mesh",
    "check_m_matrix",
    "conv_order",
    "cubic_moments",
    "cubic_spline",
    "discrete_error",
    "eval_f",
    "eval_global",
    "jacobian",
    "kernels",
    "linear_spline",
    "make_builtin_example1",
    "newton_solve",
    "psi",
    "residual",
    "run_convergence",
    "thomas_solve",
    "transition_point",
    "uniform_mesh",
]
