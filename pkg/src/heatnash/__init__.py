"""Nash equilibria of a two-player game steered through a 1D heat equation."""

from heatnash.errors import (
    ConfigurationError,
    ContractViolation,
    HeatNashError,
    LinearSolveError,
    StructuralError,
)
from heatnash.grid import SpatialGrid, SubdomainMask, TimeGrid, inner_product_h, norm_h
from heatnash.game import GameSpec
from heatnash.controls import (
    Control,
    bang_bang_from_adjoint,
    project_admissible,
    saturation_profile,
    vi_residual,
)
from heatnash.heat import solve_adjoint, solve_forward, solve_linearized
from heatnash.best_response import (
    BestResponseOptions,
    BestResponseOutcome,
    finite_difference_gradient,
    gradient,
    objective,
    solve_best_response,
)
from heatnash.nash import EquilibriumResult, NashOptions, check_equilibrium, solve_nash
from heatnash.analysis import BangBangReport, adjoint_nondegeneracy, export_report, verify_bang_bang

__version__ = "0.1.0"

__all__ = [
    "BangBangReport",
    "BestResponseOptions",
    "BestResponseOutcome",
    "ConfigurationError",
    "ContractViolation",
    "Control",
    "EquilibriumResult",
    "GameSpec",
    "HeatNashError",
    "LinearSolveError",
    "NashOptions",
    "SpatialGrid",
    "StructuralError",
    "SubdomainMask",
    "TimeGrid",
    "adjoint_nondegeneracy",
    "bang_bang_from_adjoint",
    "check_equilibrium",
    "export_report",
    "finite_difference_gradient",
    "gradient",
    "inner_product_h",
    "norm_h",
    "objective",
    "project_admissible",
    "saturation_profile",
    "solve_adjoint",
    "solve_best_response",
    "solve_forward",
    "solve_linearized",
    "solve_nash",
    "verify_bang_bang",
    "vi_residual",
]
