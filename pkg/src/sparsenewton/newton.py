"""Newton-type drivers for the under-determined shooting equation.

The iteration is u <- u - gamma_k w_k, where w_k solves the linearized
system P'(u_k) w = P(u_k) with minimal l1 or l2 norm.  Residual sizes are
always measured in the sup norm, step sizes in the l1 norm; this is the
norm pairing under which the step-size formulas and sparsity counts hold.

Step-size policies:
  * Pure: gamma = 1 at every step.
  * FixedMuL / FixedL: damped steps from known problem constants.
  * Adaptive: backtracking on a scalar parameter beta, no constants needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import lsolve
from .errors import DivergenceError, InputContractError
from .lsolve import ZERO_TOL
from .shooting import ShootingProblem, residual, residual_and_jacobian

CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"
STALLED = "stalled"
SINGULAR_LINEARIZATION = "singular_linearization"


@dataclass(frozen=True)
class Pure:
    """Full Newton steps, gamma = 1."""


@dataclass(frozen=True)
class FixedMuL:
    """gamma_k = min(1, mu^2 / (L * p_k)) from known constants."""

    mu: float
    L_const: float

    def __post_init__(self):
        if self.mu <= 0 or self.L_const <= 0:
            raise InputContractError("FixedMuL requires mu > 0 and L_const > 0")


@dataclass(frozen=True)
class FixedL:
    """gamma_k = min(1, p_k / (L * ||w_k||_1^2)) from a known Lipschitz constant."""

    L_const: float

    def __post_init__(self):
        if self.L_const <= 0:
            raise InputContractError("FixedL requires L_const > 0")


@dataclass(frozen=True)
class Adaptive:
    """Backtracking policy; beta0 = None means start from the initial residual."""

    beta0: float | None = None
    shrink: float = 0.5

    def __post_init__(self):
        if self.beta0 is not None and self.beta0 <= 0:
            raise InputContractError("Adaptive beta0 must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise InputContractError("Adaptive shrink must lie in (0, 1)")


StepPolicy = Pure | FixedMuL | FixedL | Adaptive


@dataclass
class SolverConfig:
    """Algorithm selection and tolerances for :func:`solve`."""

    policy: StepPolicy = field(default_factory=Adaptive)
    direction_norm: str = "l1"
    eps: float = 1e-9
    max_iterations: int = 100
    max_backtracks: int = 60
    u0: np.ndarray | None = None

    def __post_init__(self):
        if self.direction_norm not in ("l1", "l2"):
            raise InputContractError("direction_norm must be 'l1' or 'l2'")
        if self.eps <= 0:
            raise InputContractError("eps must be positive")
        if self.max_iterations < 1:
            raise InputContractError("max_iterations must be at least 1")
        if self.max_backtracks < 1:
            raise InputContractError("max_backtracks must be at least 1")
        if self.u0 is not None:
            self.u0 = np.asarray(self.u0, dtype=float)


@dataclass(frozen=True)
class IterationRecord:
    """One accepted Newton step.

    p_k is the residual sup norm before the step; nnz_u counts the nonzero
    components of the committed iterate u_{k+1}; beta_k is the adaptive
    parameter carried forward (None for non-adaptive policies); backtracks
    counts shrink operations performed within this step.
    """

    k: int
    p_k: float
    gamma: float
    step_l1_norm: float
    direction_support: tuple
    nnz_u: int
    beta_k: float | None
    backtracks: int


@dataclass
class SolveResult:
    """Final control with its objectives and the per-iteration history."""

    u_final: np.ndarray
    status: str
    residual_inf: float
    u_l1_norm: float
    u_nnz: int
    history: list

    @property
    def iterations(self) -> int:
        return len(self.history)

    def residual_norms(self) -> list:
        """The sequence p_0, p_1, ..., ending at the final residual."""
        return [rec.p_k for rec in self.history] + [self.residual_inf]


def step_size_mu_l(mu: float, L_const: float, p_k: float) -> float:
    """Damping from uniform non-degeneracy mu and Lipschitz constant L."""
    if mu <= 0 or L_const <= 0 or p_k <= 0:
        raise InputContractError("step_size_mu_l requires positive arguments")
    return min(1.0, mu * mu / (L_const * p_k))

def step_size_l(L_const: float, p_k: float, w_l1_norm: float) -> float:
    """Damping from the Lipschitz constant and the current step's l1 norm.

    A zero-norm direction means the linearized residual is already zero;
    the clamp value 1 is returned and the driver treats that situation as
    convergence rather than an error.
    """
    if L_const <= 0 or p_k <= 0 or w_l1_norm < 0:
        raise InputContractError("step_size_l requires positive arguments")
    if w_l1_norm == 0.0:
        return 1.0
    return min(1.0, p_k / (L_const * w_l1_norm * w_l1_norm))


def _inf_norm(v) -> float:
    return float(np.max(np.abs(v), initial=0.0))


def _nnz(v) -> int:
    return int(np.count_nonzero(np.abs(v) > ZERO_TOL))


def _make_result(u, status, p, history):
    return SolveResult(u_final=u, status=status, residual_inf=p,
                       u_l1_norm=float(np.sum(np.abs(u))), u_nnz=_nnz(u),
                       history=history)


def _iterate(residual_fn, jacobian_fn, u0, config: SolverConfig) -> SolveResult:
    """Generic driver over residual/Jacobian callables on stacked vectors."""
    direction = (lsolve.min_l1_direction if config.direction_norm == "l1"
                 else lsolve.min_l2_direction)
    policy = config.policy
    adaptive = isinstance(policy, Adaptive)

    u = np.array(u0, dtype=float)
    p = _inf_norm(residual_fn(u))
    history = []
    if p <= config.eps:
        return _make_result(u, CONVERGED, p, history)
    beta = policy.beta0 if adaptive and policy.beta0 is not None else p

    for k in range(config.max_iterations):
        r, J = jacobian_fn(u)
        dres = direction(J, r)
        if dres.status != lsolve.OPTIMAL:
            return _make_result(u, SINGULAR_LINEARIZATION, p, history)
        w = dres.w
        w_l1 = float(np.sum(np.abs(w)))
        if w_l1 <= ZERO_TOL:
            # linearized residual is zero but p > eps: tolerance mismatch
            return _make_result(u, STALLED, p, history)

        backtracks = 0
        if isinstance(policy, Pure):
            gamma = 1.0
        elif isinstance(policy, FixedMuL):
            gamma = step_size_mu_l(policy.mu, policy.L_const, p)
        elif isinstance(policy, FixedL):
            gamma = step_size_l(policy.L_const, p, w_l1)

        if not adaptive:
            u_next = u - gamma * w
            p_next = _inf_norm(residual_fn(u_next))
        else:
            while True:
                gamma = min(1.0, beta / p)
                u_next = u - gamma * w
                try:
                    p_next = _inf_norm(residual_fn(u_next))
                except DivergenceError:
                    p_next = np.inf  # treat a blown-up trial as a rejection
                if beta < p:
                    accepted = p_next < p - beta / 2.0
                else:
                    accepted = p_next < p * p / (2.0 * beta)
                if accepted:
                    break
                if backtracks >= config.max_backtracks:
                    return _make_result(u, STALLED, p, history)
                beta *= policy.shrink
                backtracks += 1

        u = u_next
        history.append(IterationRecord(
            k=k, p_k=p, gamma=float(gamma), step_l1_norm=w_l1,
            direction_support=tuple(int(i) for i in dres.support),
            nnz_u=_nnz(u), beta_k=beta if adaptive else None,
            backtracks=backtracks))
        p = p_next
        if p <= config.eps:
            return _make_result(u, CONVERGED, p, history)

    return _make_result(u, MAX_ITERATIONS, p, history)


def solve(problem: ShootingProblem, config: SolverConfig) -> SolveResult:
    """Drive the shooting residual to zero with the configured policy.

    Iterates u <- u - gamma_k w_k from config.u0 (all zeros by default)
    until ||P(u)||_inf <= eps, the iteration budget runs out, backtracking
    stalls, or a linearization turns out singular.
    """
    u0 = config.u0 if config.u0 is not None else np.zeros(problem.n)
    u0 = problem.check_control(u0)
    return _iterate(lambda u: residual(problem, u),
                    lambda u: residual_and_jacobian(problem, u),
                    u0, config)


def refine_support(problem: ShootingProblem, config: SolverConfig,
                   probe_steps: int = 1, refine_eps: float = 1e-9) -> SolveResult:
    """Probe with sparse steps, then re-solve exactly on the found support.

    Runs ``probe_steps`` iterations with l1 directions from u = 0 and takes
    the union S of the direction supports.  All components outside S are
    frozen at zero and the reduced equation in the |S| remaining unknowns is
    solved by the adaptive driver with l2 directions (the reduced Jacobian
    is square or under-determined, so both norms coincide or the l2 choice
    avoids LP degeneracy).  The result embeds the reduced control back into
    the full horizon.
    """
    if probe_steps < 1:
        raise InputContractError("probe_steps must be at least 1")
    if refine_eps <= 0:
        raise InputContractError("refine_eps must be positive")

    probe_cfg = replace(config, direction_norm="l1",
                        max_iterations=probe_steps, u0=np.zeros(problem.n))
    probe = solve(problem, probe_cfg)
    if not probe.history:
        # p_0 was already below eps (or the very first direction failed)
        return probe

    support = sorted({i for rec in probe.history for i in rec.direction_support})
    if not support:
        return probe
    S = np.asarray(support, dtype=int)

    def embed(v):
        u = np.zeros(problem.n)
        u[S] = v
        return u

    def reduced_residual(v):
        return residual(problem, embed(v))

    def reduced_jacobian(v):
        r, J = residual_and_jacobian(problem, embed(v))
        return r, J[:, S]

    shrink = config.policy.shrink if isinstance(config.policy, Adaptive) else 0.5
    reduced_cfg = SolverConfig(policy=Adaptive(shrink=shrink), direction_norm="l2",
                               eps=refine_eps, max_iterations=config.max_iterations,
                               max_backtracks=config.max_backtracks)
    reduced = _iterate(reduced_residual, reduced_jacobian,
                       probe.u_final[S], reduced_cfg)

    u = embed(reduced.u_final)
    offset = len(probe.history)
    mapped = [replace(rec, k=rec.k + offset,
                      direction_support=tuple(int(S[i]) for i in rec.direction_support))
              for rec in reduced.history]
    return SolveResult(u_final=u, status=reduced.status,
                       residual_inf=reduced.residual_inf,
                       u_l1_norm=float(np.sum(np.abs(u))), u_nnz=_nnz(u),
                       history=probe.history + mapped)
