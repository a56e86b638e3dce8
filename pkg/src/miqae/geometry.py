"""Quadrant arithmetic, angle conversions, and round scheduling.

The estimation loop works on a confidence interval [theta_l, theta_u] for
theta_a and maintains the invariant that the scaled interval
[K*theta_l, K*theta_u] stays inside a single quadrant (a single multiple of
pi/2), which keeps sin^2 invertible on it.  This module holds everything
about that bookkeeping: quadrant counts with the boundary rule, the
amplitude-to-angle conversion split by quadrant parity, the search for the
next usable odd multiplier, and the per-round failure budgets and shot caps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

HALF_PI = math.pi / 2.0

# Width margin sin(pi/21)*sin(8*pi/21) under which an interval can always be
# rescaled into a single quadrant by an odd factor >= 3, and the constant
# C = 1/margin^2 it induces in the shot budgets.
QUADRANT_MARGIN = math.sin(math.pi / 21.0) * math.sin(8.0 * math.pi / 21.0)
SHOT_BUDGET_CONSTANT = 1.0 / QUADRANT_MARGIN**2

# Relative snap tolerance for scaled angles that land on a quadrant boundary
# up to floating error.
_BOUNDARY_RTOL = 1e-9


@dataclass(frozen=True)
class AngleInterval:
    """Confidence interval for theta_a, in radians within [0, pi/2]."""

    theta_l: float
    theta_u: float

    def __post_init__(self):
        if not 0.0 <= self.theta_l <= self.theta_u <= HALF_PI:
            raise ValueError(f"invalid angle interval [{self.theta_l}, {self.theta_u}]")

    @property
    def width(self) -> float:
        return self.theta_u - self.theta_l

    @classmethod
    def full(cls) -> "AngleInterval":
        return cls(0.0, HALF_PI)


@dataclass(frozen=True)
class RoundSchedule:
    """Per-round scheduling state: odd power, failure budget, shot cap."""

    k_i: int
    alpha_i: float
    n_max_i: int
    quadrant: int

    @property
    def K_i(self) -> int:
        return 2 * self.k_i + 1


def k_max(epsilon: float) -> float:
    """Upper bound pi/(4*epsilon) on the odd multiplier K over a whole run."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return math.pi / (4.0 * epsilon)


def _snap(x: float) -> float:
    # Scaled angles that should sit exactly on a quadrant boundary drift off
    # it in floating point; snap before floor/ceil.
    r = round(x)
    if abs(x - r) < _BOUNDARY_RTOL * max(1.0, abs(x)):
        return float(r)
    return x


def quadrant_lower(K: int, theta: float) -> int:
    """Quadrant count floor(K*theta / (pi/2)) with boundary snapping."""
    return int(math.floor(_snap(K * theta / HALF_PI)))


def quadrant_upper(K: int, theta: float) -> int:
    """Quadrant count ceil(K*theta / (pi/2)) - 1: exact boundaries map to
    the previous quadrant so that e.g. scaled angles pi and 3*pi/2 both
    bracket quadrant 2."""
    return int(math.ceil(_snap(K * theta / HALF_PI))) - 1


def invariant_holds(K: int, interval: AngleInterval) -> bool:
    """True iff the scaled interval [K*theta_l, K*theta_u] lies in one quadrant."""
    return quadrant_lower(K, interval.theta_l) == quadrant_upper(K, interval.theta_u)


def gamma_from_amplitude(ci, quadrant: int) -> tuple[float, float]:
    """Convert an amplitude interval to the in-quadrant angle interval.

    In even quadrants sin^2 increases with the angle, in odd quadrants it
    decreases, so the endpoints swap and reflect:

        even: (arcsin sqrt(a_min), arcsin sqrt(a_max))
        odd:  (pi/2 - arcsin sqrt(a_max), pi/2 - arcsin sqrt(a_min))
    """
    lo = math.asin(math.sqrt(ci.a_min))
    hi = math.asin(math.sqrt(ci.a_max))
    if quadrant % 2 == 0:
        return lo, hi
    return HALF_PI - hi, HALF_PI - lo


def update_theta(quadrant: int, gammas: tuple[float, float], K: int) -> AngleInterval:
    """Lift the in-quadrant angle interval back to an interval for theta_a:
    theta = (quadrant * pi/2 + gamma) / K."""
    g_min, g_max = gammas
    if not 0.0 <= g_min <= g_max <= HALF_PI:
        raise ValueError(f"invalid gamma interval ({g_min}, {g_max})")
    theta_l = (quadrant * HALF_PI + g_min) / K
    theta_u = (quadrant * HALF_PI + g_max) / K
    # Division can overshoot pi/2 by an ulp when the scaled upper endpoint
    # is exactly K * pi/2.
    return AngleInterval(min(theta_l, HALF_PI), min(theta_u, HALF_PI))


def find_next_k(k_i: int, interval: AngleInterval) -> int:
    """Largest odd K in [3*K_i, (pi/2)/width] keeping the scaled interval in
    a single quadrant, returned as (K-1)/2; returns k_i unchanged if no such
    K exists (including the degenerate zero-width interval)."""
    width = interval.width
    if width <= 0.0:
        return k_i
    K_i = 2 * k_i + 1
    K = int(math.floor(_snap(HALF_PI / width)))
    if K % 2 == 0:
        K -= 1
    while K >= 3 * K_i:
        if quadrant_lower(K, interval.theta_l) == quadrant_upper(K, interval.theta_u):
            return (K - 1) // 2
        K -= 2
    return k_i


def alpha_schedule(K_i: int, K_max: float, alpha: float) -> float:
    """Depth-scaled per-round failure budget (2*alpha/3) * K_i / K_max.

    Deep rounds tolerate more statistical risk; summed over any admissible
    K sequence the budgets stay below alpha.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return (2.0 * alpha / 3.0) * K_i / K_max


def round_count_bound(epsilon: float) -> int:
    """Upper bound ceil(log3(pi/(4*epsilon))) on the number of rounds."""
    return max(1, math.ceil(math.log(k_max(epsilon)) / math.log(3.0)))


def uniform_alpha_schedule(alpha: float, epsilon: float) -> float:
    """Baseline budget alpha/T with T the round-count bound, i.e. the same
    failure probability in every round."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return alpha / round_count_bound(epsilon)


def n_max_for_round(alpha_i: float) -> int:
    """Shot cap ceil(2*C*ln(2/alpha_i)) guaranteeing the round can advance.

    At this many shots the Chernoff half-width shrinks to half the quadrant
    margin, which is exactly the width at which an odd rescaling factor
    >= 3 is guaranteed to exist.
    """
    if not 0.0 < alpha_i < 1.0:
        raise ValueError(f"alpha_i must be in (0, 1), got {alpha_i}")
    return math.ceil(2.0 * SHOT_BUDGET_CONSTANT * math.log(2.0 / alpha_i))
