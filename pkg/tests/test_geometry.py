import math

import numpy as np
import pytest

from miqae import (
    AmplitudeCI,
    AngleInterval,
    SHOT_BUDGET_CONSTANT,
    alpha_schedule,
    chernoff_halfwidth,
    find_next_k,
    gamma_from_amplitude,
    invariant_holds,
    k_max,
    n_max_for_round,
    quadrant_lower,
    quadrant_upper,
    round_count_bound,
    uniform_alpha_schedule,
    update_theta,
)
from miqae.geometry import HALF_PI, QUADRANT_MARGIN


def brute_force_next_k(k_i, interval):
    """Exhaustive reference for the largest odd K in [3*K_i, (pi/2)/width]
    keeping the scaled interval inside one quadrant."""
    K_i = 2 * k_i + 1
    best = k_i
    K_top = int(HALF_PI // interval.width)
    for K in range(3 * K_i, K_top + 1):
        if K % 2 == 1 and invariant_holds(K, interval):
            best = (K - 1) // 2
    return best


class TestKMax:
    def test_exact_cancellation(self):
        assert k_max(math.pi / 400) == pytest.approx(100.0, rel=1e-12)

    def test_generic_value(self):
        assert k_max(1e-3) == pytest.approx(785.3981634, abs=1e-6)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            k_max(0.0)


class TestQuadrantCounts:
    def test_exact_boundaries(self):
        # Scaled angle pi (x = 2) and 3*pi/2 (x = 3) both bracket quadrant 2.
        assert quadrant_lower(1, math.pi) == 2
        assert quadrant_upper(1, 3 * math.pi / 2) == 2

    def test_interior(self):
        theta = 2.5 * HALF_PI
        assert quadrant_lower(1, theta) == 2
        assert quadrant_upper(1, theta) == 2

    def test_boundary_rule_upper_maps_down(self):
        theta = 4.0 * HALF_PI
        assert quadrant_lower(1, theta) == 4
        assert quadrant_upper(1, theta) == 3

    def test_boundary_rule_on_dyadic_inputs(self):
        # x = K * theta / (pi/2) exactly integer: upper must equal lower - 1.
        for x in (1.0, 2.0, 5.0, 16.0, 128.0):
            theta = x * HALF_PI
            assert quadrant_upper(1, theta) == quadrant_lower(1, theta) - 1

    def test_snapping_absorbs_float_noise(self):
        theta = 3 * HALF_PI * (1 + 3e-12)
        assert quadrant_upper(1, theta) == 2
        theta = 3 * HALF_PI * (1 - 3e-12)
        assert quadrant_lower(1, theta) == 3


class TestInvariant:
    def test_full_first_quadrant(self):
        assert invariant_holds(1, AngleInterval.full())

    def test_spanning_interval_fails(self):
        assert not invariant_holds(3, AngleInterval.full())

    def test_narrow_interval_at_k65(self):
        assert invariant_holds(65, AngleInterval(0.1, 0.12))

    def test_implies_width_bound(self):
        rng = np.random.default_rng(3)
        for _ in range(2000):
            lo = rng.uniform(0, HALF_PI * 0.999)
            hi = rng.uniform(lo, HALF_PI)
            interval = AngleInterval(lo, hi)
            K = int(rng.integers(0, 100)) * 2 + 1
            if invariant_holds(K, interval):
                assert interval.width <= HALF_PI / K + 1e-9


class TestGammaConversion:
    def test_even_full_interval(self):
        assert gamma_from_amplitude(AmplitudeCI(0.0, 1.0, 0.05), 0) == (0.0, HALF_PI)

    def test_odd_interval(self):
        g_min, g_max = gamma_from_amplitude(AmplitudeCI(0.2, 0.5, 0.05), 1)
        assert g_min == pytest.approx(math.pi / 4, abs=1e-12)
        assert g_max == pytest.approx(HALF_PI - math.asin(math.sqrt(0.2)), abs=1e-12)
        assert g_max == pytest.approx(1.1071487, abs=1e-6)

    def test_even_round_trip(self):
        rng = np.random.default_rng(8)
        for _ in range(500):
            a_min = rng.uniform(0, 1)
            a_max = rng.uniform(a_min, 1)
            g_min, g_max = gamma_from_amplitude(AmplitudeCI(a_min, a_max, 0.1), 2)
            assert math.sin(g_min) ** 2 == pytest.approx(a_min, abs=1e-12)
            assert math.sin(g_max) ** 2 == pytest.approx(a_max, abs=1e-12)

    def test_ordering_and_gap_preserved_both_parities(self):
        rng = np.random.default_rng(9)
        for parity in (0, 1):
            for _ in range(500):
                a_min = rng.uniform(0, 1)
                a_max = rng.uniform(a_min, 1)
                g_min, g_max = gamma_from_amplitude(AmplitudeCI(a_min, a_max, 0.1), parity)
                assert 0.0 <= g_min <= g_max <= HALF_PI
                gap = abs(math.sin(g_max) ** 2 - math.sin(g_min) ** 2)
                assert gap == pytest.approx(a_max - a_min, abs=1e-12)


class TestUpdateTheta:
    def test_identity_round(self):
        interval = update_theta(0, (0.0, HALF_PI), 1)
        assert interval == AngleInterval.full()

    def test_direct_formula(self):
        interval = update_theta(4, (0.2, 0.3), 65)
        assert interval.theta_l == pytest.approx((2 * math.pi + 0.2) / 65, abs=1e-15)
        assert interval.theta_u == pytest.approx((2 * math.pi + 0.3) / 65, abs=1e-15)

    def test_output_satisfies_invariant_and_width_bound(self):
        rng = np.random.default_rng(21)
        for _ in range(2000):
            k = int(rng.integers(0, 300))
            K = 2 * k + 1
            R = int(rng.integers(0, K))
            g_min = rng.uniform(0, HALF_PI)
            g_max = rng.uniform(g_min, HALF_PI)
            interval = update_theta(R, (g_min, g_max), K)
            assert interval.width <= HALF_PI / K + 1e-12
            assert invariant_holds(K, interval)
            assert 0.0 <= interval.theta_l <= interval.theta_u <= HALF_PI


class TestFindNextK:
    def test_widest_interval_has_no_candidate(self):
        assert find_next_k(0, AngleInterval.full()) == 0

    def test_known_interval(self):
        interval = AngleInterval(0.1, 0.12)
        assert find_next_k(0, interval) == 32
        assert brute_force_next_k(0, interval) == 32

    def test_zero_width_returns_current(self):
        assert find_next_k(5, AngleInterval(0.3, 0.3)) == 5

    def test_matches_brute_force_on_random_intervals(self):
        rng = np.random.default_rng(17)
        for _ in range(10_000):
            k_i = int(rng.integers(0, 30))
            lo = rng.uniform(0, HALF_PI - 0.005)
            hi = lo + rng.uniform(0.004, min(HALF_PI - lo, 0.3))
            interval = AngleInterval(lo, hi)
            assert find_next_k(k_i, interval) == brute_force_next_k(k_i, interval)

    def test_result_contract(self):
        rng = np.random.default_rng(19)
        for _ in range(2000):
            k_i = int(rng.integers(0, 50))
            lo = rng.uniform(0, HALF_PI - 0.01)
            hi = lo + rng.uniform(0.005, min(HALF_PI - lo, 0.2))
            interval = AngleInterval(lo, hi)
            k_new = find_next_k(k_i, interval)
            if k_new == k_i:
                continue
            K_new = 2 * k_new + 1
            assert K_new % 2 == 1
            assert 3 * (2 * k_i + 1) <= K_new <= HALF_PI / interval.width
            assert invariant_holds(K_new, interval)


class TestSchedules:
    def test_alpha_at_k_max(self):
        assert alpha_schedule(100, 100.0, 0.3) == pytest.approx(0.2, abs=1e-15)

    def test_first_round_alpha(self):
        alpha_1 = alpha_schedule(1, k_max(1e-3), 0.05)
        assert alpha_1 == pytest.approx(2 * 0.05 / (3 * 785.3981634), rel=1e-9)
        assert alpha_1 == pytest.approx(4.244e-5, abs=5e-8)

    def test_worst_case_sum_below_alpha(self):
        # Extremal sequence K_i = K_max / 3^i saturates the union budget.
        alpha, K_cap = 0.05, k_max(1e-4)
        ks = []
        K = K_cap
        while K >= 1:
            ks.append(K)
            K /= 3.0
        total = sum(alpha_schedule(K, K_cap, alpha) for K in ks)
        assert total <= alpha + 1e-12

    def test_uniform_budget(self):
        eps = 1e-3
        T = round_count_bound(eps)
        assert T == math.ceil(math.log(math.pi / (4 * eps)) / math.log(3))
        assert uniform_alpha_schedule(0.05, eps) == pytest.approx(0.05 / T, rel=1e-12)


class TestShotBudget:
    def test_halfwidth_at_budget_within_margin(self):
        for alpha_i in (1e-6, 1e-4, 0.01, 0.3):
            n = n_max_for_round(alpha_i)
            assert chernoff_halfwidth(n, alpha_i) <= QUADRANT_MARGIN / 2.0 + 1e-15

    def test_known_value(self):
        alpha_1 = alpha_schedule(1, k_max(1e-3), 0.05)
        expected = math.ceil(2 * SHOT_BUDGET_CONSTANT * math.log(2 / alpha_1))
        assert n_max_for_round(alpha_1) == expected == 1119

    def test_limit_as_alpha_to_one(self):
        assert n_max_for_round(1 - 1e-12) == math.ceil(
            2 * SHOT_BUDGET_CONSTANT * math.log(2))

    def test_constant_value(self):
        assert SHOT_BUDGET_CONSTANT == pytest.approx(51.95167, abs=5e-5)
