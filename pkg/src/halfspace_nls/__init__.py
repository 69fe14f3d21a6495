"""Numerics for -Delta v + v = v^p on the half-space with boundary value c.

Modules: ``closed_form`` (1D solutions and the threshold c_p),
``nonlinearity`` (transformed nonlinearity and sampled inequalities),
``grid`` (finite-difference substrate), ``energy`` (functional, gradient,
coercivity), ``ground_state`` (radial ground state, b_inf, bump functions)
and ``mountain_pass`` (solver and certification).
"""
from .closed_form import (
    ClosedForm1D,
    Params,
    Trichotomy,
    boundary_shift,
    critical_threshold,
    first_integral_criterion,
    homoclinic,
    profiles,
)
from .energy import coercivity_constant, energy, gradient
from .errors import (
    ConvergenceError,
    GeometryError,
    GridMismatchError,
    ParameterError,
    SupportOverflowError,
    ThresholdError,
)
from .grid import Field, Grid2D
from .ground_state import ground_level, radial_ground_state
from .mountain_pass import MountainPassResult, solve_on_grid
from .nonlinearity import NonlinearityCtx, kappa_q

__version__ = "0.1.0"

__all__ = [
    "ClosedForm1D",
    "Params",
    "Trichotomy",
    "boundary_shift",
    "critical_threshold",
    "first_integral_criterion",
    "homoclinic",
    "profiles",
    "coercivity_constant",
    "energy",
    "gradient",
    "ConvergenceError",
    "GeometryError",
    "GridMismatchError",
    "ParameterError",
    "SupportOverflowError",
    "ThresholdError",
    "Field",
    "Grid2D",
    "ground_level",
    "radial_ground_state",
    "MountainPassResult",
    "solve_on_grid",
    "NonlinearityCtx",
    "kappa_q",
]
