import math

import numpy as np
import pytest

from sparsenewton import (ControlAffineModel, DivergenceError, InputContractError,
                          LinearModel, PendulumModel, finite_diff_jacobians,
                          rollout)
from tests.conftest import random_tanh_model


def _rel_err(approx, exact):
    return np.max(np.abs(approx - exact)) / max(1.0, np.max(np.abs(exact)))


class TestPendulumStep:
    def test_hand_evaluated_step(self):
        model = PendulumModel(alpha=0.3, beta=0.9, h_step=0.04)
        got = model.step(0, np.array([1.0, 0.5]), np.array([0.0]))
        expected = np.array([
            1.0 + 0.04 * 0.5,
            0.5 + 0.04 * (-0.3 * 0.5 - 0.9 * math.sin(1.0)),
        ])
        assert np.allclose(got, expected, rtol=0, atol=1e-15)
        assert got[0] == pytest.approx(1.02, abs=1e-15)
        assert got[1] == pytest.approx(0.46370704454691569, abs=1e-14)

    def test_origin_is_drift_fixed_point(self):
        for alpha, beta, h in [(0.3, 0.9, 0.04), (1.0, 2.0, 0.5), (0.0, 0.0, 1.0)]:
            model = PendulumModel(alpha, beta, h)
            assert np.array_equal(model.step(0, np.zeros(2), np.zeros(1)), np.zeros(2))

    def test_control_enters_second_component_unscaled(self):
        model = PendulumModel(alpha=0.0, beta=0.0, h_step=1.0)
        got = model.step(0, np.zeros(2), np.array([5.0]))
        assert np.array_equal(got, np.array([0.0, 5.0]))

    def test_dimension_mismatch(self):
        model = PendulumModel(0.3, 0.9, 0.04)
        with pytest.raises(InputContractError):
            model.step(0, np.zeros(3), np.zeros(1))
        with pytest.raises(InputContractError):
            model.step(0, np.zeros(2), np.zeros(2))

    def test_nonfinite_parameters_rejected(self):
        with pytest.raises(InputContractError):
            PendulumModel(alpha=np.nan, beta=0.9, h_step=0.04)


class TestPendulumJacobian:
    def test_at_zero_angle(self):
        model = PendulumModel(alpha=0.3, beta=0.9, h_step=0.04)
        J = model.jac_x(0, np.array([0.0, 7.3]), np.zeros(1))
        assert np.allclose(J, [[1.0, 0.04], [-0.036, 0.988]], rtol=0, atol=1e-15)

    def test_linear_drift_when_beta_zero(self):
        model = PendulumModel(alpha=0.25, beta=0.0, h_step=0.1)
        J = model.jac_x(0, np.array([0.4, -1.0]), np.zeros(1))
        assert np.allclose(J, [[1.0, 0.1], [0.0, 1.0 - 0.1 * 0.25]], atol=1e-15)

    def test_against_finite_differences(self):
        model = PendulumModel(alpha=0.3, beta=0.9, h_step=0.04)
        x, u = np.array([1.0, 0.5]), np.zeros(1)
        Jx_fd, Ju_fd = finite_diff_jacobians(model, 0, x, u, fd_step=1e-6)
        assert _rel_err(Jx_fd, model.jac_x(0, x, u)) <= 1e-8
        assert _rel_err(Ju_fd, model.jac_u(0, x, u)) <= 1e-8


class TestRollout:
    def test_identity_stays_at_origin(self):
        model = LinearModel(np.eye(2), np.eye(2))
        traj = rollout(model, np.zeros(2), np.zeros((5, 2)), 5)
        assert traj.shape == (6, 2)
        assert np.array_equal(traj, np.zeros((6, 2)))

    def test_additive_integrator(self):
        model = LinearModel(np.eye(2), np.eye(2))
        controls = np.zeros((3, 2))
        controls[0] = [0.0, 1.0]
        traj = rollout(model, np.array([1.0, 0.0]), controls, 3)
        assert np.array_equal(traj[-1], np.array([1.0, 1.0]))

    def test_pendulum_free_rollout_regression(self):
        # golden value frozen from this implementation's first run
        model = PendulumModel(alpha=0.3, beta=0.9, h_step=0.04)
        traj = rollout(model, np.array([1.0, 0.5]), np.zeros((160, 1)), 160)
        assert traj.shape == (161, 2)
        assert traj[-1] == pytest.approx(
            [0.17689258482929499, 0.42551448856488028], abs=1e-14)

    def test_length_contract(self):
        model = LinearModel(np.eye(1), np.eye(1))
        for N in (1, 4, 9):
            assert rollout(model, np.zeros(1), np.zeros((N, 1))).shape == (N + 1, 1)
        with pytest.raises(InputContractError):
            rollout(model, np.zeros(1), np.zeros((4, 1)), N=5)

    def test_divergence_reports_failing_index(self):
        model = LinearModel(np.array([[1e200]]), np.eye(1))
        with pytest.raises(DivergenceError) as err:
            rollout(model, np.array([1.0]), np.zeros((5, 1)), 5)
        assert err.value.step_index == 1


class TestFiniteDifferences:
    def test_recovers_linear_model_exactly(self):
        rng = np.random.default_rng(3)
        A, B = rng.standard_normal((3, 3)), rng.standard_normal((3, 2))
        model = LinearModel(A, B)
        Jx, Ju = finite_diff_jacobians(model, 0, rng.standard_normal(3),
                                       rng.standard_normal(2))
        assert np.max(np.abs(Jx - A)) <= 1e-10
        assert np.max(np.abs(Ju - B)) <= 1e-10

    def test_matches_pendulum_analytic(self):
        model = PendulumModel(0.3, 0.9, 0.04)
        x, u = np.array([1.0, 0.5]), np.array([0.2])
        Jx, Ju = finite_diff_jacobians(model, 0, x, u)
        assert _rel_err(Jx, model.jac_x(0, x, u)) <= 1e-8
        assert _rel_err(Ju, model.jac_u(0, x, u)) <= 1e-8

    def test_zero_step_rejected(self):
        model = PendulumModel(0.3, 0.9, 0.04)
        with pytest.raises(InputContractError):
            finite_diff_jacobians(model, 0, np.zeros(2), np.zeros(1), fd_step=0.0)


def _bundled_models(rng):
    return [
        PendulumModel(alpha=0.3, beta=0.9, h_step=0.04),
        LinearModel(rng.standard_normal((3, 3)), rng.standard_normal((3, 2))),
        ControlAffineModel(lambda x: np.sin(x),
                           lambda x: np.diag(np.cos(x)),
                           rng.standard_normal((2, 2))),
    ]


def test_analytic_jacobians_match_fd_at_random_points():
    rng = np.random.default_rng(42)
    for model in _bundled_models(rng):
        for _ in range(100):
            x = rng.standard_normal(model.m)
            u = rng.standard_normal(model.q_dim)
            Jx_fd, Ju_fd = finite_diff_jacobians(model, 0, x, u, fd_step=1e-6)
            assert _rel_err(Jx_fd, model.jac_x(0, x, u)) <= 1e-5
            assert _rel_err(Ju_fd, model.jac_u(0, x, u)) <= 1e-5


def test_control_affine_jac_u_is_constant():
    rng = np.random.default_rng(5)
    B = rng.standard_normal((2, 2))
    model = ControlAffineModel(lambda x: np.sin(x), lambda x: np.diag(np.cos(x)), B)
    samples = [model.jac_u(j, rng.standard_normal(2), rng.standard_normal(2))
               for j in range(5)]
    for J in samples:
        assert np.array_equal(J, samples[0])


def test_tanh_test_model_jacobians_are_consistent():
    rng = np.random.default_rng(11)
    model = random_tanh_model(rng, 3, 2)
    x, u = rng.standard_normal(3), rng.standard_normal(2)
    Jx_fd, Ju_fd = finite_diff_jacobians(model, 0, x, u)
    assert _rel_err(Jx_fd, model.jac_x(0, x, u)) <= 1e-8
    assert _rel_err(Ju_fd, model.jac_u(0, x, u)) <= 1e-8
