import numpy as np
import pytest

from sparsenewton import PendulumModel, ShootingProblem
from sparsenewton.dynamics import SystemModel


class TanhDriftModel(SystemModel):
    """x' = x + h*tanh(W x + V u + c): smooth, globally bounded increments.

    Not control-affine (jac_u depends on the state), so it exercises the
    general chain-rule path.
    """

    def __init__(self, W, V, c, h=0.15):
        self.W = np.asarray(W, dtype=float)
        self.V = np.asarray(V, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.h = float(h)
        self.m = self.W.shape[0]
        self.q_dim = self.V.shape[1]

    def _gain(self, x, u):
        z = self.W @ x + self.V @ u + self.c
        return 1.0 / np.cosh(z) ** 2

    def step(self, j, x, u):
        return x + self.h * np.tanh(self.W @ x + self.V @ u + self.c)

    def jac_x(self, j, x, u):
        return np.eye(self.m) + self.h * (self._gain(x, u)[:, None] * self.W)

    def jac_u(self, j, x, u):
        return self.h * (self._gain(x, u)[:, None] * self.V)


def random_tanh_model(rng, m, q):
    W = 0.8 * rng.standard_normal((m, m))
    V = rng.uniform(0.5, 1.5, (m, q)) * rng.choice([-1.0, 1.0], (m, q))
    c = 0.3 * rng.standard_normal(m)
    return TanhDriftModel(W, V, c)


def random_solvable_problem(rng, m, q, N):
    """Problem whose target is reachable by construction."""
    model = random_tanh_model(rng, m, q)
    x0 = 0.5 * rng.standard_normal(m)
    u_true = 0.3 * rng.standard_normal((N, q))
    x = x0.copy()
    for j in range(N):
        x = model.step(j, x, u_true[j])
    return ShootingProblem(model=model, x0=x0, target=x, N=N)


@pytest.fixture
def pendulum_problem():
    model = PendulumModel(alpha=0.3, beta=0.9, h_step=0.04)
    return ShootingProblem(model=model, x0=np.array([1.0, 0.5]),
                           target=np.array([0.4, 0.0]), N=160)
