"""Single-shooting residual and its derivative.

The boundary-value problem "steer x0 to target in N steps" is recast as the
under-determined equation P(u) = x[N](u) - target = 0, where u stacks all
control samples into one vector of length n = q_dim * N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import SystemModel, rollout
from .errors import InputContractError


def stack_controls(steps) -> np.ndarray:
    """Flatten an (N, q_dim) control sequence into a single vector.

    u[0] occupies the first q_dim entries, u[1] the next q_dim, and so on.
    """
    return np.asarray(steps, dtype=float).reshape(-1)


def unstack_controls(u, q_dim: int) -> np.ndarray:
    """Inverse of :func:`stack_controls`; returns an (N, q_dim) array."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size % q_dim != 0:
        raise InputContractError(
            f"stacked control length {u.size} is not a multiple of q_dim={q_dim}")
    return u.reshape(-1, q_dim)


@dataclass(frozen=True)
class ShootingProblem:
    """Boundary-value problem data: dynamics, endpoints, horizon."""

    model: SystemModel
    x0: np.ndarray
    target: np.ndarray
    N: int

    def __post_init__(self):
        object.__setattr__(self, "x0", np.asarray(self.x0, dtype=float))
        object.__setattr__(self, "target", np.asarray(self.target, dtype=float))
        m = self.model.m
        if self.x0.shape != (m,):
            raise InputContractError(f"x0 must have shape ({m},)")
        if self.target.shape != (m,):
            raise InputContractError(f"target must have shape ({m},)")
        if self.N < 1:
            raise InputContractError("N must be at least 1")

    @property
    def n(self) -> int:
        """Number of stacked control variables."""
        return self.model.q_dim * self.N

    def check_control(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n,):
            raise InputContractError(f"u must have shape ({self.n},), got {u.shape}")
        return u


def residual(problem: ShootingProblem, u) -> np.ndarray:
    """Terminal mismatch x[N](u) - target for the stacked control u."""
    u = problem.check_control(u)
    traj = rollout(problem.model, problem.x0,
                   unstack_controls(u, problem.model.q_dim), problem.N)
    return traj[-1] - problem.target


def residual_and_jacobian(problem: ShootingProblem, u):
    """Residual together with the m-by-n derivative of the shooting map.

    One forward rollout stores the trajectory; a single backward pass then
    assembles the Jacobian.  With per-step Jacobians A_j and B_j evaluated
    along the realized trajectory, the block of columns belonging to u[j] is
    A_{N-1} A_{N-2} ... A_{j+1} B_j.  The backward accumulator keeps the
    running product so the whole matrix costs O(N) small matrix products.
    """
    u = problem.check_control(u)
    model = problem.model
    m, q = model.m, model.q_dim
    steps = unstack_controls(u, q)
    traj = rollout(model, problem.x0, steps, problem.N)

    J = np.empty((m, problem.n))
    acc = np.eye(m)
    for j in range(problem.N - 1, -1, -1):
        J[:, j * q:(j + 1) * q] = acc @ model.jac_u(j, traj[j], steps[j])
        acc = acc @ model.jac_x(j, traj[j], steps[j])
    return traj[-1] - problem.target, J


def jacobian_blocks_naive(problem: ShootingProblem, u) -> np.ndarray:
    """Reference Jacobian assembled block by block from explicit products.

    O(N^2) in matrix products; kept as an oracle for the backward pass in
    :func:`residual_and_jacobian`.  Products are accumulated left to right so
    the two routines perform the identical sequence of float operations.
    """
    u = problem.check_control(u)
    model = problem.model
    m, q = model.m, model.q_dim
    steps = unstack_controls(u, q)
    traj = rollout(model, problem.x0, steps, problem.N)

    J = np.empty((m, problem.n))
    for j in range(problem.N):
        acc = np.eye(m)
        for i in range(problem.N - 1, j, -1):
            acc = acc @ model.jac_x(i, traj[i], steps[i])
        J[:, j * q:(j + 1) * q] = acc @ model.jac_u(j, traj[j], steps[j])
    return J
