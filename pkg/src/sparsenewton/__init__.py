"""Sparse trajectory optimization via Newton methods for under-determined systems.

Find control sequences with few nonzero samples (and small l1 norm) that
steer a discrete nonlinear system between fixed endpoints.  The terminal
condition is treated as an under-determined nonlinear equation; each Newton
step takes the minimal-l1-norm solution of the linearized system, which is
a vertex of a linear program and touches at most m new control components.
"""

from .bounds import (ConvergenceReport, ProblemConstants, distance_estimate,
                     h0_series, h_tail, k_eps_bound, k_max_bound,
                     kantorovich_check, mysovskikh_check)
from .config import bundled_config_path
from .dynamics import (ControlAffineModel, LinearModel, PendulumModel,
                       SystemModel, finite_diff_jacobians, rollout)
from .errors import (ConfigError, DivergenceError, DomainError,
                     InputContractError)
from .lsolve import (DirectionResult, brute_force_l1, min_l1_direction,
                     min_l2_direction)
from .newton import (Adaptive, FixedL, FixedMuL, IterationRecord, Pure,
                     SolveResult, SolverConfig, refine_support, solve,
                     step_size_l, step_size_mu_l)
from .shooting import (ShootingProblem, residual, residual_and_jacobian,
                       stack_controls, unstack_controls)

__version__ = "0.1.0"

__all__ = [
    "Adaptive", "ConfigError", "ControlAffineModel", "ConvergenceReport",
    "DirectionResult", "DivergenceError", "DomainError", "FixedL", "FixedMuL",
    "InputContractError", "IterationRecord", "LinearModel", "PendulumModel",
    "ProblemConstants", "Pure", "ShootingProblem", "SolveResult",
    "SolverConfig", "SystemModel", "brute_force_l1", "bundled_config_path",
    "distance_estimate", "finite_diff_jacobians", "h0_series", "h_tail",
    "k_eps_bound", "k_max_bound", "kantorovich_check", "min_l1_direction",
    "min_l2_direction", "mysovskikh_check", "refine_support", "residual",
    "residual_and_jacobian", "rollout", "solve", "stack_controls",
    "step_size_l", "step_size_mu_l", "unstack_controls",
]
