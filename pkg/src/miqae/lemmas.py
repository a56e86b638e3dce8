"""Brute-force and closed-form checks behind the termination guarantees.

These are executable versions of the geometric facts the estimator relies
on: the piecewise quadrant-distance functions, the width bound under which
an odd rescaling factor always exists, and the sum bound used to aggregate
per-round costs over a geometrically growing multiplier sequence.  They act
as independent oracles in the property tests and back the ``verify`` CLI
subcommand.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import HALF_PI, QUADRANT_MARGIN

_SUBDIVISIONS = (3, 5, 7)


def f_j(j: int, theta):
    """Angular distance from theta to the nearest of the j-fold quadrant
    subdivision points {0, pi/(2j), ..., pi/2}; j in {3, 5, 7}.

    Accepts scalars or arrays.
    """
    if j not in _SUBDIVISIONS:
        raise ValueError(f"j must be one of {_SUBDIVISIONS}, got {j}")
    slice_width = HALF_PI / j
    d = np.mod(theta, slice_width)
    return np.minimum(d, slice_width - d)


def f_max(theta):
    """Pointwise max of f_3, f_5, f_7: the widest half-interval around theta
    that some odd subdivision keeps inside a single slice."""
    return np.maximum.reduce([f_j(j, theta) for j in _SUBDIVISIONS])


def epsilon_theta_bound(theta):
    """Largest half-width eps_theta(theta) the quadrant margin permits:

        min( (1/2) arcsin(S / sin(2 theta)), theta, pi/2 - theta )

    with S the quadrant margin.  Where sin(2 theta) <= S the arcsin argument
    would exceed 1; the linear branches dominate there, so the arcsin branch
    is only evaluated on the valid region.  Accepts scalars or arrays.
    """
    scalar = np.ndim(theta) == 0
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    s2 = np.sin(2.0 * theta)
    arc = np.full_like(theta, np.inf)
    valid = s2 > QUADRANT_MARGIN
    arc[valid] = 0.5 * np.arcsin(QUADRANT_MARGIN / s2[valid])
    out = np.minimum.reduce([arc, theta, HALF_PI - theta])
    if scalar:
        return float(out[0])
    return out


def existence_witness(theta_a: float, theta_b: float) -> Optional[int]:
    """Brute-force search for an odd q in [3, (pi/2)/(theta_b - theta_a)]
    keeping [q*theta_a, q*theta_b] inside a single quadrant.

    The inputs must satisfy the hypotheses under which such a q is
    guaranteed: a positive gap, sin^2 endpoints within the quadrant margin,
    and both angles in the same quadrant.  Returns the first (smallest)
    witness, or None — which, under the hypotheses, indicates a bug.
    """
    if theta_b <= theta_a:
        raise ValueError("need theta_b > theta_a")
    gap = abs(math.sin(theta_b) ** 2 - math.sin(theta_a) ** 2)
    if gap > QUADRANT_MARGIN + 1e-15:
        raise ValueError(f"sin^2 gap {gap} exceeds the quadrant margin")
    if math.floor(theta_a / HALF_PI) != math.ceil(theta_b / HALF_PI) - 1:
        raise ValueError("angles must lie in the same quadrant")
    q_top = int(math.floor(HALF_PI / (theta_b - theta_a)))
    for q in range(3, q_top + 1, 2):
        if math.floor(q * theta_a / HALF_PI) == math.ceil(q * theta_b / HALF_PI) - 1:
            return q
    return None


def geometric_sum_bound_holds(
    k_sequence: Sequence[float],
    f: Callable[[float], float],
    K_max: float,
) -> bool:
    """Check sum_{i=1}^t f(K_i) <= sum_{i=0}^{t-1} f(K_max / 3^i) for a
    sequence K_0 = 1, K_i >= 3*K_{i-1}, K_t <= K_max and f positive
    increasing on [1, K_max]."""
    ks = list(k_sequence)
    if not ks or ks[0] != 1:
        raise ValueError("sequence must start at K_0 = 1")
    for prev, cur in zip(ks, ks[1:]):
        if cur < 3 * prev:
            raise ValueError(f"ratio below 3: {prev} -> {cur}")
    if ks[-1] > K_max:
        raise ValueError(f"final term {ks[-1]} exceeds K_max={K_max}")
    t = len(ks) - 1
    lhs = sum(f(k) for k in ks[1:])
    rhs = sum(f(K_max / 3.0**i) for i in range(t))
    return lhs <= rhs + 1e-9 * max(1.0, abs(rhs))
