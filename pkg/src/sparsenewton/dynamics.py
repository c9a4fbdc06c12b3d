"""Discrete-time system models and rollout machinery.

A system is a sequence of one-step maps x[j+1] = f_j(x[j], u[j]) together
with their Jacobians with respect to state and control.  All bundled models
are time-invariant and ignore the step index, but the interface carries it
so time-varying systems plug in unchanged.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable, Sequence

import numpy as np

from .errors import DivergenceError, InputContractError

#: default central-difference step; balances truncation vs rounding at float64
DEFAULT_FD_STEP = 1e-6


def _as_vector(x, dim: int, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (dim,):
        raise InputContractError(f"{name} must have shape ({dim},), got {v.shape}")
    return v


class SystemModel(ABC):
    """One-step dynamics f_j(x, u) with analytic Jacobians.

    Subclasses set ``m`` (state dimension) and ``q_dim`` (control dimension)
    and implement ``step``, ``jac_x`` and ``jac_u``.  Models are immutable
    after construction; all methods are pure functions of their inputs.
    """

    m: int
    q_dim: int

    @abstractmethod
    def step(self, j: int, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Return x[j+1] given x[j] and u[j]."""

    @abstractmethod
    def jac_x(self, j: int, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Return the m-by-m Jacobian of ``step`` with respect to x."""

    @abstractmethod
    def jac_u(self, j: int, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Return the m-by-q_dim Jacobian of ``step`` with respect to u."""


class ControlAffineModel(SystemModel):
    """System of the form x[j+1] = f(x[j]) + B u[j] with constant B."""

    def __init__(self, f: Callable[[np.ndarray], np.ndarray],
                 jac_f: Callable[[np.ndarray], np.ndarray], B):
        self.f = f
        self.jac_f = jac_f
        self.B = np.asarray(B, dtype=float)
        if self.B.ndim != 2:
            raise InputContractError("B must be a 2-d matrix")
        if not np.all(np.isfinite(self.B)):
            raise InputContractError("B must be finite")
        self.m, self.q_dim = self.B.shape

    def step(self, j, x, u):
        x = _as_vector(x, self.m, "x")
        u = _as_vector(u, self.q_dim, "u")
        return self.f(x) + self.B @ u

    def jac_x(self, j, x, u):
        return self.jac_f(_as_vector(x, self.m, "x"))

    def jac_u(self, j, x, u):
        return self.B


class PendulumModel(ControlAffineModel):
    """Forward-Euler pendulum with friction, driven by a scalar torque.

    State is (angle, angular velocity).  The drift is
        f(x) = (x1 + h x2, x2 + h(-alpha x2 - beta sin x1))
    and the control enters through B = (0, 1)^T.
    """

    def __init__(self, alpha: float, beta: float, h_step: float):
        for name, value in (("alpha", alpha), ("beta", beta), ("h_step", h_step)):
            if not np.isfinite(value):
                raise InputContractError(f"{name} must be finite, got {value!r}")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.h_step = float(h_step)
        super().__init__(self._drift, self._drift_jac, [[0.0], [1.0]])

    def _drift(self, x: np.ndarray) -> np.ndarray:
        h = self.h_step
        return np.array([
            x[0] + h * x[1],
            x[1] + h * (-self.alpha * x[1] - self.beta * np.sin(x[0])),
        ])

    def _drift_jac(self, x: np.ndarray) -> np.ndarray:
        h = self.h_step
        return np.array([
            [1.0, h],
            [-h * self.beta * np.cos(x[0]), 1.0 - h * self.alpha],
        ])


class LinearModel(SystemModel):
    """Time-invariant linear system x[j+1] = A x[j] + B u[j]."""

    def __init__(self, A, B):
        self.A = np.asarray(A, dtype=float)
        self.B = np.asarray(B, dtype=float)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise InputContractError("A must be square")
        if self.B.ndim != 2 or self.B.shape[0] != self.A.shape[0]:
            raise InputContractError("B must have the same number of rows as A")
        self.m = self.A.shape[0]
        self.q_dim = self.B.shape[1]

    def step(self, j, x, u):
        x = _as_vector(x, self.m, "x")
        u = _as_vector(u, self.q_dim, "u")
        return self.A @ x + self.B @ u

    def jac_x(self, j, x, u):
        return self.A

    def jac_u(self, j, x, u):
        return self.B


def rollout(model: SystemModel, x0, controls: Sequence, N: int | None = None) -> np.ndarray:
    """Simulate the system forward under the given control sequence.

    Args:
        model: the dynamics.
        x0: initial state, dimension ``model.m``.
        controls: N control samples, each of dimension ``model.q_dim``.
        N: optional horizon; must match ``len(controls)`` when given.

    Returns:
        Array of shape (N+1, m); row j is x[j], row 0 is x0.

    Raises:
        DivergenceError: if any state becomes non-finite (carries the step index).
    """
    controls = np.atleast_2d(np.asarray(controls, dtype=float))
    if N is None:
        N = controls.shape[0]
    elif N != controls.shape[0]:
        raise InputContractError(f"expected {N} controls, got {controls.shape[0]}")
    if controls.shape != (N, model.q_dim):
        raise InputContractError(
            f"controls must have shape ({N}, {model.q_dim}), got {controls.shape}")
    x = _as_vector(x0, model.m, "x0")
    if not np.all(np.isfinite(x)):
        raise InputContractError("x0 must be finite")

    traj = np.empty((N + 1, model.m))
    traj[0] = x
    for j in range(N):
        x = np.asarray(model.step(j, x, controls[j]), dtype=float)
        if not np.all(np.isfinite(x)):
            raise DivergenceError(j)
        traj[j + 1] = x
    return traj


def finite_diff_jacobians(model: SystemModel, j: int, x, u,
                          fd_step: float = DEFAULT_FD_STEP):
    """Central-difference approximations of (jac_x, jac_u) at (j, x, u)."""
    if fd_step <= 0:
        raise InputContractError("fd_step must be positive")
    x = _as_vector(x, model.m, "x")
    u = _as_vector(u, model.q_dim, "u")
    Jx = np.empty((model.m, model.m))
    for i in range(model.m):
        e = np.zeros(model.m)
        e[i] = fd_step
        Jx[:, i] = (model.step(j, x + e, u) - model.step(j, x - e, u)) / (2 * fd_step)
    Ju = np.empty((model.m, model.q_dim))
    for i in range(model.q_dim):
        e = np.zeros(model.q_dim)
        e[i] = fd_step
        Ju[:, i] = (model.step(j, x, u + e) - model.step(j, x, u - e)) / (2 * fd_step)
    return Jx, Ju
