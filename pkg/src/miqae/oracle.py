"""Simulated measurement of the amplified circuit as seeded Bernoulli trials.

Measuring the state produced by k Grover applications on top of the state
preparation returns |1> with probability sin^2((2k+1) * theta_a), where
sin^2(theta_a) is the hidden amplitude.  The oracle keeps exact counters for
Grover applications (k per shot), state preparations (k+1 per shot), and
shots, so query accounting in the estimator can be cross-checked against it.
"""

from __future__ import annotations

import math

import numpy as np


class SimulatedOracle:
    """Seeded sampler for the boosted measurement distribution.

    Parameters
    ----------
    true_amplitude : float
        Ground-truth amplitude in [0, 1].  Hidden from the estimator; kept
        here so experiments can score coverage.
    seed : int or sequence of ints or numpy.random.SeedSequence
        Seed for the per-instance random stream.  Identical seed and call
        sequence replay bit-identically.  Each call to :meth:`measure` with
        ``m`` shots consumes exactly ``m`` uniform draws (one per shot).
    """

    def __init__(self, true_amplitude, seed=0):
        if not 0.0 <= true_amplitude <= 1.0:
            raise ValueError(f"amplitude must be in [0, 1], got {true_amplitude}")
        self.true_amplitude = float(true_amplitude)
        self.theta_a = math.asin(math.sqrt(self.true_amplitude))
        self._rng = np.random.default_rng(seed)
        self.queries = 0
        self.state_preparations = 0
        self.shots = 0

    def outcome_probability(self, k: int) -> float:
        """P[|1>] when measuring after k Grover applications."""
        return math.sin((2 * k + 1) * self.theta_a) ** 2

    def measure(self, k: int, m: int) -> int:
        """Measure the k-amplified circuit m times, returning the |1> count.

        Advances ``queries`` by k*m, ``state_preparations`` by (k+1)*m and
        ``shots`` by m.
        """
        if k < 0:
            raise ValueError(f"grover power must be nonnegative, got {k}")
        if m < 1:
            raise ValueError(f"shot count must be positive, got {m}")
        p = self.outcome_probability(k)
        ones = int(np.count_nonzero(self._rng.random(m) < p))
        self.queries += k * m
        self.state_preparations += (k + 1) * m
        self.shots += m
        return ones

    def __repr__(self):
        return (
            f"SimulatedOracle(a={self.true_amplitude!r}, "
            f"queries={self.queries}, shots={self.shots})"
        )
