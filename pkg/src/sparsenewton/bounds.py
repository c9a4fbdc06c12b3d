"""Convergence-condition checkers and a-priori rate estimates.

Pure formula evaluation over user-supplied problem constants: the
non-degeneracy moduli mu0 (at the start point) and mu (uniform on the
l1-ball of radius rho), the Lipschitz constant L of the derivative in the
l1-to-sup operator norm, and the initial residual size s.  Nothing here
estimates the constants from a problem; a violated precondition is
reported as a DomainError with a diagnostic instead of being clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InputContractError

#: series terms below this are beneath double-precision resolution
SERIES_CUTOFF = 1e-17


@dataclass(frozen=True)
class ProblemConstants:
    """Constants entering the semi-local convergence conditions.

    s = 0 (already at a solution) is allowed; all other constants must be
    strictly positive.
    """

    mu0: float
    mu: float
    L_const: float
    rho: float
    s: float

    def __post_init__(self):
        for name in ("mu0", "mu", "L_const", "rho"):
            if getattr(self, name) <= 0:
                raise InputContractError(f"{name} must be strictly positive")
        if self.s < 0:
            raise InputContractError("s must be nonnegative")


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of a semi-local convergence test.

    radius_bound is the l1-ball radius the iterates provably stay within;
    the condition holds only when it fits inside rho.  series_diverged
    marks the case where the double-exponent series argument reached 1.
    """

    condition_holds: bool
    h_ratio: float
    radius_bound: float
    u_star_distance_bound: float | None
    series_diverged: bool = False


def h0_series(delta: float) -> float:
    """Sum of double exponents: delta^1 + delta^2 + delta^4 + delta^8 + ...

    Terms are added until they fall below SERIES_CUTOFF.  Diverges for
    delta >= 1, which is reported as a DomainError.
    """
    return h_tail(0, delta)


def h_tail(j: int, delta: float) -> float:
    """Tail sum of the double-exponent series starting at exponent 2^j.

    h_tail(0, delta) equals h0_series(delta); successive tails satisfy
    h_tail(j+1, d) = h_tail(j, d) - d^(2^j).
    """
    if j < 0:
        raise InputContractError("j must be nonnegative")
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"double-exponent series needs 0 <= delta < 1, got {delta}")
    total = 0.0
    exponent = 2 ** j
    while True:
        term = delta ** exponent
        if term < SERIES_CUTOFF:
            return total
        total += term
        exponent *= 2


def _ceil_snapped(x: float) -> int:
    # guard ceil against float noise around exact integers
    nearest = round(x)
    if abs(x - nearest) <= 1e-9 * max(1.0, abs(x)):
        return int(nearest)
    return math.ceil(x)


def kantorovich_check(c: ProblemConstants) -> ConvergenceReport:
    """Semi-local test using non-degeneracy at the start point only.

    Requires h = L s / mu0^2 < 1/2 and that the guaranteed containment
    radius ((1 - sqrt(1 - 2h)) / h) * (s / mu0) fits within rho.  When the
    test passes, the distance from the start point to the limit solution
    is bounded by (mu0 / L) * (1 - sqrt(1 - 2 L s / mu0^2)).
    """
    h = c.L_const * c.s / (c.mu0 * c.mu0)
    if c.s == 0.0:
        return ConvergenceReport(True, 0.0, 0.0, 0.0)
    if h >= 0.5:
        return ConvergenceReport(False, h, float("inf"), None)
    root = math.sqrt(1.0 - 2.0 * h)
    radius = (1.0 - root) / h * (c.s / c.mu0)
    distance = c.mu0 / c.L_const * (1.0 - root)
    return ConvergenceReport(radius <= c.rho, h, radius, distance)


def mysovskikh_check(c: ProblemConstants) -> ConvergenceReport:
    """Semi-local test using the uniform non-degeneracy constant mu.

    Requires h = L s / mu^2 < 2 and (2 mu / L) * H0(h/2) < rho.  The
    distance bound to the limit solution is (mu / L) * H0(L s / (2 mu^2)).
    """
    h = c.L_const * c.s / (c.mu * c.mu)
    if c.s == 0.0:
        return ConvergenceReport(True, 0.0, 0.0, 0.0)
    if h >= 2.0:
        return ConvergenceReport(False, h, float("inf"), None, series_diverged=True)
    series = h0_series(h / 2.0)
    radius = 2.0 * c.mu / c.L_const * series
    distance = c.mu / c.L_const * series
    return ConvergenceReport(radius < c.rho, h, radius, distance)


def k_max_bound(mu: float, L_const: float, s: float) -> int:
    """Number of damped steps before the adaptive method turns pure Newton."""
    if mu <= 0 or L_const <= 0 or s < 0:
        raise InputContractError("k_max_bound requires mu, L > 0 and s >= 0")
    return max(0, _ceil_snapped(2.0 * L_const * s / (mu * mu)) - 2)


def _v_bar(mu: float, L_const: float, s: float):
    k_max = k_max_bound(mu, L_const, s)
    v = L_const * s / (mu * mu) - k_max / 2.0
    if not 0.0 < v < 1.0:
        raise DomainError(
            f"v_bar = L*s/mu^2 - k_max/2 = {v} falls outside (0, 1); "
            "the rate formulas do not apply")
    return k_max, v


def k_eps_bound(mu: float, L_const: float, s: float, eps: float) -> int:
    """Total step count to reach residual accuracy eps, damped plus pure."""
    if mu <= 0 or L_const <= 0 or s <= 0 or eps <= 0:
        raise InputContractError("k_eps_bound requires positive arguments")
    k_max, v = _v_bar(mu, L_const, s)
    ratio = eps * L_const / (2.0 * mu * mu)
    if not 0.0 < ratio < v / 2.0:
        raise DomainError(
            f"eps*L/(2 mu^2) = {ratio} must lie in (0, v_bar/2) = (0, {v / 2.0})")
    inner = math.log(ratio) / math.log(v / 2.0)
    return k_max + _ceil_snapped(math.log2(inner))


def distance_estimate(k: int, mu: float, L_const: float, s: float) -> float:
    """Upper bound on the l1 distance from iterate k to the limit solution.

    At k = 0 with a zero start this doubles as an upper estimate for the
    l1 norm of the reachable solution itself.
    """
    if k < 0:
        raise InputContractError("k must be nonnegative")
    if mu <= 0 or L_const <= 0 or s <= 0:
        raise InputContractError("distance_estimate requires positive arguments")
    k_max, v = _v_bar(mu, L_const, s)
    if k < k_max:
        return mu / L_const * (k_max - k + 2.0 * h0_series(v / 2.0))
    return 2.0 * mu / L_const * h_tail(k - k_max, v / 2.0)
