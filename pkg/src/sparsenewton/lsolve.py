"""Minimum-norm solutions of under-determined linear systems A w = r.

Each Newton iteration needs the solution of the linearized equation with
the smallest norm.  Minimizing the l1 norm is what makes the steps sparse:
the problem is a linear program in the split variables w = wp - wn with
wp, wn >= 0, and any optimal vertex has at most m nonzero entries of w.
The LP is solved by a two-phase revised simplex with Bland's anticycling
rule, so identical inputs always produce identical outputs.  The l2
variant (minimum Euclidean norm) is the classical pseudo-inverse step and
serves as the dense baseline.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InputContractError

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
#: absolute magnitude below which a component counts as zero everywhere in
#: the package (direction supports, control nonzero counts)
ZERO_TOL = 1e-12

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class DirectionResult:
    """Outcome of one direction subproblem.

    Attributes:
        w: the solution vector (length n).
        objective: value of the minimized norm at w.
        support: indices of entries with magnitude above ``ZERO_TOL``.
        status: ``"optimal"`` or ``"infeasible"``.
        certificate_residual: for an infeasible l1 solve, the Phase-I
            optimum min ||A w - r||_1, strictly positive by construction.
    """

    w: np.ndarray
    objective: float
    support: np.ndarray
    status: str
    certificate_residual: float | None = None


def _check_system(A, r):
    A = np.asarray(A, dtype=float)
    r = np.asarray(r, dtype=float)
    if A.ndim != 2:
        raise InputContractError("A must be a 2-d matrix")
    if r.shape != (A.shape[0],):
        raise InputContractError(
            f"r must have shape ({A.shape[0]},), got {r.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(r))):
        raise InputContractError("A and r must be finite")
    return A, r


def _support(w):
    return np.flatnonzero(np.abs(w) > ZERO_TOL)


def _feasible(A, w, r):
    return np.max(np.abs(A @ w - r), initial=0.0) <= FEAS_TOL * (1.0 + np.max(np.abs(r), initial=0.0))


class _Unbounded(RuntimeError):
    pass


def _revised_simplex(M, b, c, basis):
    """Minimize c@z s.t. M z = b, z >= 0, starting from the given basis.

    Bland's rule throughout: the entering column is the lowest index with
    reduced cost below -PIVOT_TOL; ratio-test ties break toward the lowest
    basic variable index.  Returns the final basis and its variable values.
    """
    m, ncols = M.shape
    basis = list(basis)
    in_basis = np.zeros(ncols, dtype=bool)
    in_basis[basis] = True
    max_pivots = 200 * (ncols + m) + 1000

    for _ in range(max_pivots):
        B = M[:, basis]
        xB = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, c[basis])
        reduced = c - M.T @ y

        entering = -1
        for j in np.flatnonzero(reduced < -PIVOT_TOL):
            if not in_basis[j]:
                entering = int(j)
                break
        if entering < 0:
            return basis, xB

        t = np.linalg.solve(B, M[:, entering])
        ratio_best = np.inf
        leave_pos = -1
        for i in range(m):
            if t[i] <= PIVOT_TOL:
                continue
            ratio = max(xB[i], 0.0) / t[i]
            if leave_pos < 0:
                ratio_best, leave_pos = ratio, i
                continue
            tie_tol = 1e-12 * max(1.0, abs(ratio_best))
            if ratio < ratio_best - tie_tol:
                ratio_best, leave_pos = ratio, i
            elif ratio <= ratio_best + tie_tol and basis[i] < basis[leave_pos]:
                ratio_best, leave_pos = min(ratio_best, ratio), i
        if leave_pos < 0:
            raise _Unbounded("LP is unbounded")

        in_basis[basis[leave_pos]] = False
        in_basis[entering] = True
        basis[leave_pos] = entering

    raise RuntimeError("simplex exceeded its pivot budget")


def min_l1_direction(A, r) -> DirectionResult:
    """Vertex solution of min ||w||_1 subject to A w = r.

    The split formulation min sum(wp + wn) over [A, -A] (wp; wn) = r is
    solved by two-phase simplex: Phase I introduces one artificial variable
    per row to find a basic feasible point (or an infeasibility certificate),
    Phase II minimizes the l1 objective from there.  The returned w is a
    basic solution, so its support has at most m entries.
    """
    A, r = _check_system(A, r)
    m, n = A.shape
    if np.all(r == 0.0):
        return DirectionResult(np.zeros(n), 0.0, np.empty(0, dtype=int), OPTIMAL)

    # flip rows so the right-hand side is nonnegative for the artificial start
    sign = np.where(r < 0, -1.0, 1.0)
    M = np.hstack([A * sign[:, None], -A * sign[:, None], np.eye(m)])
    b = r * sign

    # Phase I: minimize the sum of artificials from the all-artificial basis
    c1 = np.concatenate([np.zeros(2 * n), np.ones(m)])
    basis, xB = _revised_simplex(M, b, c1, range(2 * n, 2 * n + m))
    phase1_obj = float(c1[basis] @ xB)
    if phase1_obj > FEAS_TOL * (1.0 + np.max(np.abs(r))):
        return DirectionResult(np.zeros(n), float("nan"), np.empty(0, dtype=int),
                               INFEASIBLE, certificate_residual=phase1_obj)

    # pivot leftover zero-value artificials out of the basis; a row whose
    # every real coefficient vanishes under the current basis is redundant
    keep = np.ones(m, dtype=bool)
    while True:
        art_pos = next((p for p, v in enumerate(basis) if v >= 2 * n), None)
        if art_pos is None:
            break
        B = M[np.ix_(keep, basis)]
        # row art_pos of B^{-1} M restricted to the real columns
        e = np.zeros(len(basis))
        e[art_pos] = 1.0
        row = M[keep, :2 * n].T @ np.linalg.solve(B.T, e)
        pivot_cols = np.flatnonzero(np.abs(row) > PIVOT_TOL)
        pivot_col = next((int(j) for j in pivot_cols if j not in basis), None)
        if pivot_col is None:
            keep[np.flatnonzero(keep)[art_pos]] = False
            del basis[art_pos]
        else:
            basis[art_pos] = pivot_col
    M2 = M[keep][:, :2 * n]
    b2 = b[keep]

    # Phase II: minimize the actual l1 objective
    c2 = np.ones(2 * n)
    basis, xB = _revised_simplex(M2, b2, c2, basis)

    z = np.zeros(2 * n)
    z[basis] = xB
    w = z[:n] - z[n:]
    return DirectionResult(w, float(np.sum(np.abs(w))), _support(w), OPTIMAL)


def min_l2_direction(A, r) -> DirectionResult:
    """Minimum-Euclidean-norm solution of A w = r via orthogonal factorization.

    Uses the SVD-backed least-squares path (never an explicit inverse),
    which doubles as the rank-revealing fallback: if r lies outside the
    range of a rank-deficient A the result cannot satisfy the equations and
    is reported infeasible.
    """
    A, r = _check_system(A, r)
    w = np.linalg.lstsq(A, r, rcond=None)[0]
    if not _feasible(A, w, r):
        gap = float(np.max(np.abs(A @ w - r)))
        return DirectionResult(w, float(np.linalg.norm(w)), _support(w),
                               INFEASIBLE, certificate_residual=gap)
    return DirectionResult(w, float(np.linalg.norm(w)), _support(w), OPTIMAL)


def brute_force_l1(A, r) -> DirectionResult:
    """Exhaustive oracle for :func:`min_l1_direction` on tiny systems.

    Enumerates every column subset of size at most m, solves each candidate
    system in the least-squares sense, and keeps the consistent solution of
    least l1 norm.  Any l1-optimal vertex is supported on at most m columns,
    so the enumeration covers the true optimum.
    """
    A, r = _check_system(A, r)
    m, n = A.shape
    if n > 12:
        raise InputContractError("brute_force_l1 is combinatorial; requires n <= 12")
    if np.all(r == 0.0):
        return DirectionResult(np.zeros(n), 0.0, np.empty(0, dtype=int), OPTIMAL)

    best_w = None
    best_obj = np.inf
    for size in range(1, min(m, n) + 1):
        for cols in itertools.combinations(range(n), size):
            sub = A[:, cols]
            v = np.linalg.lstsq(sub, r, rcond=None)[0]
            if not _feasible(sub, v, r):
                continue
            obj = float(np.sum(np.abs(v)))
            if obj < best_obj - 1e-15:
                best_obj = obj
                best_w = np.zeros(n)
                best_w[list(cols)] = v
    if best_w is None:
        return DirectionResult(np.zeros(n), float("nan"), np.empty(0, dtype=int),
                               INFEASIBLE)
    return DirectionResult(best_w, best_obj, _support(best_w), OPTIMAL)
