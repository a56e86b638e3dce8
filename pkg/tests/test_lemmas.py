import math

import numpy as np
import pytest

from miqae import QUADRANT_MARGIN, k_max
from miqae.geometry import HALF_PI
from miqae.lemmas import (
    epsilon_theta_bound,
    existence_witness,
    f_j,
    f_max,
    geometric_sum_bound_holds,
)

# Grid size divisible by 21 so rational multiples of pi like 4*pi/21 land
# exactly on grid points.
GRID = np.linspace(0.0, HALF_PI, 105_001)


class TestQuadrantDistances:
    def test_zero_at_subdivision_points(self):
        for j in (3, 5, 7):
            for m in range(j + 1):
                assert f_j(j, m * HALF_PI / j) == pytest.approx(0.0, abs=1e-12)

    def test_midpoint_of_first_slice(self):
        assert f_j(3, math.pi / 12) == pytest.approx(math.pi / 12, abs=1e-12)

    def test_nonnegative_on_grid(self):
        for j in (3, 5, 7):
            assert np.all(f_j(j, GRID) >= 0.0)

    def test_rejects_bad_subdivision(self):
        with pytest.raises(ValueError):
            f_j(4, 0.3)


class TestFMax:
    def test_zero_at_quadrant_edges(self):
        assert f_max(0.0) == pytest.approx(0.0, abs=1e-12)
        assert f_max(HALF_PI) == pytest.approx(0.0, abs=1e-12)

    def test_minimum_is_pi_over_42_at_4pi_over_21(self):
        # f_max vanishes at the quadrant edges (all subdivisions share those
        # zeros); the pi/42 minimum is over the middle region where the
        # width bound's arcsin branch is active.
        edge = 0.5 * math.asin(math.sqrt(QUADRANT_MARGIN))
        middle = GRID[(GRID >= edge) & (GRID <= HALF_PI - edge)]
        values = f_max(middle)
        assert float(np.min(values)) == pytest.approx(math.pi / 42, abs=1e-9)
        # The minimum is attained at 4*pi/21 (and at its mirror image about
        # pi/4); the grid is aligned so the point is hit exactly.
        assert f_max(4 * math.pi / 21) == pytest.approx(math.pi / 42, abs=1e-12)
        argmin = float(middle[int(np.argmin(values))])
        step = HALF_PI / (len(GRID) - 1)
        assert min(abs(argmin - 4 * math.pi / 21),
                   abs(argmin - (HALF_PI - 4 * math.pi / 21))) <= step

    def test_symmetric_about_pi_over_4(self):
        assert np.allclose(f_max(GRID), f_max(HALF_PI - GRID), atol=1e-12)


class TestEpsilonThetaBound:
    def test_value_at_4pi_over_21(self):
        assert epsilon_theta_bound(4 * math.pi / 21) == pytest.approx(
            math.pi / 42, abs=1e-12)

    def test_boundary_branches(self):
        assert epsilon_theta_bound(0.0) == 0.0
        assert epsilon_theta_bound(HALF_PI) == pytest.approx(0.0, abs=1e-12)

    def test_below_f_max_everywhere(self):
        excess = epsilon_theta_bound(GRID) - f_max(GRID)
        assert float(np.max(excess)) <= 1e-9

    def test_touches_f_max_at_the_minimum(self):
        theta = 4 * math.pi / 21
        assert abs(epsilon_theta_bound(theta) - f_max(theta)) <= 1e-9


class TestExistenceWitness:
    def test_known_pair(self):
        q = existence_witness(0.18, 0.19)
        assert q is not None
        assert 3 <= q <= 157 and q % 2 == 1

    def test_witness_is_valid(self):
        q = existence_witness(0.18, 0.19)
        assert math.floor(q * 0.18 / HALF_PI) == math.ceil(q * 0.19 / HALF_PI) - 1

    def test_randomized_pairs_always_find_witness(self):
        rng = np.random.default_rng(31)
        found = 0
        for _ in range(2000):
            theta_a = rng.uniform(1e-6, HALF_PI - 2e-3)
            theta_b = theta_a + rng.uniform(1e-3, min(HALF_PI - theta_a - 1e-9, 0.05))
            if abs(math.sin(theta_b) ** 2 - math.sin(theta_a) ** 2) > QUADRANT_MARGIN:
                continue
            assert existence_witness(theta_a, theta_b) is not None
            found += 1
        assert found > 1500

    def test_hypothesis_violations_rejected(self):
        with pytest.raises(ValueError):
            existence_witness(0.3, 0.2)  # reversed
        with pytest.raises(ValueError):
            existence_witness(0.1, 0.9)  # sin^2 gap too large


class TestGeometricSumBound:
    def test_extremal_sequence_saturates(self):
        # f(x)=x, sequence (1,3,9), K_max=9: 3+9 <= 9+3.
        assert geometric_sum_bound_holds([1, 3, 9], lambda x: x, 9)

    @staticmethod
    def random_sequence(rng, K_cap):
        ks = [1.0]
        while ks[-1] * 3 <= K_cap and rng.random() < 0.9:
            nxt = ks[-1] * rng.uniform(3.0, 5.0)
            ks.append(min(nxt, K_cap))
            if ks[-1] == K_cap:
                break
        return ks

    def test_random_sequences_with_identity_f(self):
        rng = np.random.default_rng(37)
        for _ in range(1000):
            K_cap = float(rng.uniform(27, 1e5))
            ks = self.random_sequence(rng, K_cap)
            assert geometric_sum_bound_holds(ks, lambda x: x, K_cap)

    def test_random_sequences_with_log_weighted_f(self):
        rng = np.random.default_rng(41)
        alpha = 0.05
        for _ in range(1000):
            K_cap = float(rng.uniform(27, 1e5))
            ks = self.random_sequence(rng, K_cap)
            c = 3 * K_cap / alpha
            assert geometric_sum_bound_holds(ks, lambda x: x * math.log(c / x), K_cap)

    def test_estimator_k_sequences_satisfy_bound(self):
        from miqae import EstimatorConfig, SimulatedOracle, run_modified_iqae

        rng = np.random.default_rng(43)
        alpha = 0.05
        for _ in range(20):
            eps = float(10 ** rng.uniform(-4, -2))
            a = float(rng.uniform(0, 1))
            oracle = SimulatedOracle(a, seed=int(rng.integers(0, 2**31)))
            result = run_modified_iqae(EstimatorConfig(epsilon=eps, alpha=alpha), oracle)
            K_cap = k_max(eps)
            ks = [1.0] + [float(r.K_i) for r in result.rounds[1:]]
            c = 3 * K_cap / alpha
            assert geometric_sum_bound_holds(ks, lambda x: x, K_cap)
            assert geometric_sum_bound_holds(ks, lambda x: x * math.log(c / x), K_cap)

    def test_invalid_sequences_rejected(self):
        with pytest.raises(ValueError):
            geometric_sum_bound_holds([2, 6], lambda x: x, 10)  # K_0 != 1
        with pytest.raises(ValueError):
            geometric_sum_bound_holds([1, 2], lambda x: x, 10)  # ratio < 3
        with pytest.raises(ValueError):
            geometric_sum_bound_holds([1, 30], lambda x: x, 10)  # exceeds K_max
