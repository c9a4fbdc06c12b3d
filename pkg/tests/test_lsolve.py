import numpy as np
import pytest

from sparsenewton import (InputContractError, brute_force_l1, min_l1_direction,
                          min_l2_direction)


def random_full_rank_system(rng):
    m = int(rng.integers(1, 4))
    n = int(rng.integers(m, 7))
    while True:
        A = rng.uniform(-1.0, 1.0, (m, n))
        if np.linalg.matrix_rank(A) == m:
            break
    r = rng.uniform(-1.0, 1.0, m)
    return A, r


class TestMinL1:
    def test_picks_cheaper_column(self):
        res = min_l1_direction(np.array([[1.0, 2.0]]), np.array([2.0]))
        assert res.status == "optimal"
        assert np.allclose(res.w, [0.0, 1.0], atol=1e-12)
        assert res.objective == pytest.approx(1.0, abs=1e-12)
        assert list(res.support) == [1]

    def test_square_invertible(self):
        res = min_l1_direction(np.eye(2), np.array([3.0, -4.0]))
        assert np.allclose(res.w, [3.0, -4.0], atol=1e-12)
        assert res.objective == pytest.approx(7.0, abs=1e-12)

    def test_inconsistent_system_is_infeasible(self):
        res = min_l1_direction(np.array([[1.0, 1.0], [1.0, 1.0]]),
                               np.array([1.0, 0.0]))
        assert res.status == "infeasible"
        # Phase-I certificate: min ||A w - r||_1 = 1 for this system
        assert res.certificate_residual == pytest.approx(1.0, abs=1e-9)

    def test_zero_rhs_short_circuits(self):
        res = min_l1_direction(np.zeros((2, 5)), np.zeros(2))
        assert res.status == "optimal"
        assert np.array_equal(res.w, np.zeros(5))
        assert res.objective == 0.0
        assert res.support.size == 0

    def test_rejects_nonfinite(self):
        with pytest.raises(InputContractError):
            min_l1_direction(np.array([[np.inf, 1.0]]), np.array([1.0]))


class TestMinL2:
    def test_row_vector_pseudoinverse(self):
        res = min_l2_direction(np.array([[1.0, 2.0]]), np.array([2.0]))
        assert np.allclose(res.w, [0.4, 0.8], atol=1e-12)

    def test_square_invertible(self):
        res = min_l2_direction(np.eye(2), np.array([3.0, -4.0]))
        assert np.allclose(res.w, [3.0, -4.0], atol=1e-12)

    def test_rank_deficient_inconsistent_is_infeasible(self):
        res = min_l2_direction(np.array([[1.0, 1.0], [1.0, 1.0]]),
                               np.array([1.0, 0.0]))
        assert res.status == "infeasible"

    def test_l1_objective_never_exceeded_by_l2_solution(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            A, r = random_full_rank_system(rng)
            w1 = min_l1_direction(A, r)
            w2 = min_l2_direction(A, r)
            assert np.sum(np.abs(w1.w)) <= np.sum(np.abs(w2.w)) + 1e-9


class TestBruteForce:
    def test_enumerates_both_columns(self):
        res = brute_force_l1(np.array([[1.0, 2.0]]), np.array([2.0]))
        assert np.allclose(res.w, [0.0, 1.0], atol=1e-12)
        assert res.objective == pytest.approx(1.0, abs=1e-12)

    def test_zero_rhs(self):
        res = brute_force_l1(np.eye(2), np.zeros(2))
        assert np.array_equal(res.w, np.zeros(2))

    def test_infeasible(self):
        res = brute_force_l1(np.array([[1.0, 1.0], [1.0, 1.0]]),
                             np.array([1.0, 0.0]))
        assert res.status == "infeasible"

    def test_size_guard(self):
        with pytest.raises(InputContractError):
            brute_force_l1(np.ones((1, 13)), np.ones(1))


def test_simplex_matches_brute_force_on_200_random_instances():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        A, r = random_full_rank_system(rng)
        lp = min_l1_direction(A, r)
        oracle = brute_force_l1(A, r)
        assert lp.status == "optimal"
        assert oracle.status == "optimal"
        assert abs(lp.objective - oracle.objective) <= 1e-8


def test_vertex_solutions_have_at_most_m_nonzeros():
    rng = np.random.default_rng(77)
    for _ in range(100):
        A, r = random_full_rank_system(rng)
        res = min_l1_direction(A, r)
        assert res.support.size <= A.shape[0]


def test_optimal_solutions_satisfy_constraints():
    rng = np.random.default_rng(31)
    for _ in range(100):
        A, r = random_full_rank_system(rng)
        res = min_l1_direction(A, r)
        assert np.max(np.abs(A @ res.w - r)) <= 1e-9 * (1.0 + np.max(np.abs(r)))


def test_scaling_equivariance():
    rng = np.random.default_rng(13)
    for _ in range(30):
        A, r = random_full_rank_system(rng)
        base = min_l1_direction(A, r)
        for c in (2.0, 0.25, 10.0):
            scaled = min_l1_direction(A, c * r)
            assert scaled.objective == pytest.approx(c * base.objective, rel=1e-12)


def test_determinism_bitwise():
    rng = np.random.default_rng(8)
    for _ in range(20):
        A, r = random_full_rank_system(rng)
        first = min_l1_direction(A, r)
        second = min_l1_direction(A, r)
        assert np.array_equal(first.w, second.w)
        assert first.objective == second.objective
        assert np.array_equal(first.support, second.support)
