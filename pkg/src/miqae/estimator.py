"""The modified iterative amplitude estimation loop and its relative-error wrapper.

The absolute-error estimator narrows a confidence interval for theta_a round
by round: each round measures at a fixed odd multiplier K_i = 2*k_i + 1,
pools the shots taken at that multiplier into a binomial confidence
interval, maps it back through the quadrant bookkeeping, and advances to a
multiplier at least 3x larger as soon as one fits the narrowed interval.
The per-round failure budgets grow with circuit depth so that late
(expensive) rounds need fewer shots while the budgets still sum below the
global alpha.

Contract violations (a round exhausting its shot cap without advancing, or
the round count exceeding its bound) indicate an implementation bug and
raise :class:`EstimationError` instead of continuing silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator

from .confidence import CI_METHODS, BinomialSample
from .geometry import (
    AngleInterval,
    RoundSchedule,
    alpha_schedule,
    find_next_k,
    gamma_from_amplitude,
    invariant_holds,
    k_max,
    n_max_for_round,
    quadrant_lower,
    round_count_bound,
    uniform_alpha_schedule,
    update_theta,
)
from .oracle import SimulatedOracle

SCHEDULES = ("modified", "uniform")


class EstimationError(RuntimeError):
    """A runtime invariant of the estimation loop was violated."""


@dataclass(frozen=True)
class EstimatorConfig:
    """Run parameters for a single estimation."""

    epsilon: float
    alpha: float
    n_shots: int = 100
    ci_method: str = "chernoff"
    schedule: str = "modified"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.epsilon < math.pi / 4.0:
            raise ValueError(f"epsilon must be in (0, pi/4), got {self.epsilon}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.n_shots < 1:
            raise ValueError(f"n_shots must be positive, got {self.n_shots}")
        if self.ci_method not in CI_METHODS:
            raise ValueError(f"unknown ci_method {self.ci_method!r}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}")


@dataclass
class RoundRecord:
    """Telemetry for one round (one value of the odd multiplier)."""

    index: int
    k_i: int
    K_i: int
    alpha_i: float
    n_max_i: int
    quadrant: int
    shots_used: int
    ones_observed: int
    interval_before: AngleInterval
    interval_after: AngleInterval
    queries_this_round: int


@dataclass
class EstimationResult:
    theta_interval: AngleInterval
    amplitude_interval: tuple[float, float]
    point_estimate: float
    total_queries: int
    total_shots: int
    rounds: list[RoundRecord] = field(default_factory=list)
    relative_iterations: int | None = None

    @property
    def amplitude_width(self) -> float:
        return self.amplitude_interval[1] - self.amplitude_interval[0]

    def contains(self, a: float) -> bool:
        return self.amplitude_interval[0] <= a <= self.amplitude_interval[1]

    def to_dict(self) -> dict:
        d = {
            "theta_lower": self.theta_interval.theta_l,
            "theta_upper": self.theta_interval.theta_u,
            "a_lower": self.amplitude_interval[0],
            "a_upper": self.amplitude_interval[1],
            "point_estimate": self.point_estimate,
            "total_queries": self.total_queries,
            "total_shots": self.total_shots,
            "rounds": [
                {
                    "index": r.index,
                    "k_i": r.k_i,
                    "K_i": r.K_i,
                    "alpha_i": r.alpha_i,
                    "n_max_i": r.n_max_i,
                    "quadrant": r.quadrant,
                    "shots_used": r.shots_used,
                    "ones_observed": r.ones_observed,
                    "theta_l_before": r.interval_before.theta_l,
                    "theta_u_before": r.interval_before.theta_u,
                    "theta_l_after": r.interval_after.theta_l,
                    "theta_u_after": r.interval_after.theta_u,
                    "queries_this_round": r.queries_this_round,
                }
                for r in self.rounds
            ],
        }
        if self.relative_iterations is not None:
            d["relative_iterations"] = self.relative_iterations
        return d


def _round_alpha(schedule: str, K_i: int, K_cap: float, alpha: float, epsilon: float) -> float:
    if schedule == "modified":
        return alpha_schedule(K_i, K_cap, alpha)
    return uniform_alpha_schedule(alpha, epsilon)


def run_modified_iqae(config: EstimatorConfig, oracle: SimulatedOracle) -> EstimationResult:
    """Run the absolute-error estimation loop against the given oracle.

    The oracle may carry nonzero counters; query and shot totals in the
    result are the deltas attributed to this run.
    """
    ci_fn = CI_METHODS[config.ci_method]
    eps = config.epsilon
    K_cap = k_max(eps)
    max_rounds = round_count_bound(eps) + 2

    queries_before = oracle.queries
    shots_before = oracle.shots

    interval = AngleInterval.full()
    k = 0
    rounds: list[RoundRecord] = []

    while interval.width > 2.0 * eps:
        index = len(rounds) + 1
        if index > max_rounds:
            raise EstimationError(
                f"round count exceeded bound {max_rounds}; loop failed to advance"
            )
        K = 2 * k + 1
        alpha_i = _round_alpha(config.schedule, K, K_cap, config.alpha, eps)
        n_cap = n_max_for_round(alpha_i)
        schedule = RoundSchedule(k_i=k, alpha_i=alpha_i, n_max_i=n_cap, quadrant=quadrant_lower(K, interval.theta_l))
        interval_before = interval
        queries_round_start = oracle.queries

        shots = 0
        ones = 0
        advanced = False
        while not advanced:
            batch = min(config.n_shots, n_cap - shots)
            if batch <= 0:
                raise EstimationError(
                    f"round {index} exhausted its shot cap {n_cap} without advancing"
                )
            ones += oracle.measure(k, batch)
            shots += batch

            ci = ci_fn(BinomialSample(ones, shots), alpha_i)
            gammas = gamma_from_amplitude(ci, schedule.quadrant)
            interval = update_theta(schedule.quadrant, gammas, K)
            if not invariant_holds(K, interval):
                raise EstimationError(
                    f"quadrant invariant broken after update in round {index} (K={K})"
                )
            if interval.width < 2.0 * eps:
                break
            k_next = find_next_k(k, interval)
            if k_next > k:
                k = k_next
                advanced = True

        rounds.append(
            RoundRecord(
                index=index,
                k_i=schedule.k_i,
                K_i=K,
                alpha_i=alpha_i,
                n_max_i=n_cap,
                quadrant=schedule.quadrant,
                shots_used=shots,
                ones_observed=ones,
                interval_before=interval_before,
                interval_after=interval,
                queries_this_round=oracle.queries - queries_round_start,
            )
        )

    a_l = math.sin(interval.theta_l) ** 2
    a_u = math.sin(interval.theta_u) ** 2
    mid = 0.5 * (interval.theta_l + interval.theta_u)
    return EstimationResult(
        theta_interval=interval,
        amplitude_interval=(a_l, a_u),
        point_estimate=math.sin(mid) ** 2,
        total_queries=oracle.queries - queries_before,
        total_shots=oracle.shots - shots_before,
        rounds=rounds,
    )


def run_relative_iqae(
    epsilon: float,
    alpha: float,
    oracle: SimulatedOracle,
    n_shots: int = 100,
    ci_method: str = "chernoff",
    schedule: str = "modified",
    eps_floor: float = 1e-10,
) -> EstimationResult:
    """Multiplicative (1 +/- epsilon) estimation by repeated halving.

    Calls the absolute-error loop with the target halved each iteration
    until the returned interval is narrow relative to its midpoint.  Query
    and shot totals cover all iterations; the round records are those of the
    final iteration.  Amplitudes near zero would halve forever, hence the
    configurable ``eps_floor`` abort.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"relative epsilon must be in (0, 1), got {epsilon}")
    queries_before = oracle.queries
    shots_before = oracle.shots

    a_l, a_u = 0.0, 1.0
    a_hat = 0.5
    eps_i = epsilon
    iterations = 0
    result = None
    while a_u - a_l > 2.0 * a_hat * epsilon:
        eps_i /= 2.0
        if eps_i < eps_floor:
            raise EstimationError(
                f"relative target underflowed eps_floor={eps_floor}; "
                "amplitude is too close to zero for relative estimation"
            )
        config = EstimatorConfig(
            epsilon=eps_i,
            alpha=alpha,
            n_shots=n_shots,
            ci_method=ci_method,
            schedule=schedule,
        )
        result = run_modified_iqae(config, oracle)
        a_l, a_u = result.amplitude_interval
        a_hat = 0.5 * (a_l + a_u)
        iterations += 1

    result.total_queries = oracle.queries - queries_before
    result.total_shots = oracle.shots - shots_before
    result.relative_iterations = iterations
    return result


class ModifiedIQAE(BaseEstimator):
    """Estimator-style front end over :func:`run_modified_iqae`.

    Follows scikit-learn parameter conventions (constructor stores
    hyperparameters verbatim, ``get_params``/``set_params`` work, fitted
    state lives in trailing-underscore attributes) so runs compose with
    generic grid tooling.  ``fit`` takes a :class:`SimulatedOracle` in place
    of a data matrix; when given a float it is treated as a ground-truth
    amplitude and a fresh seeded oracle is built from it.
    """

    def __init__(self, epsilon=1e-3, alpha=0.05, n_shots=100,
                 ci_method="chernoff", schedule="modified", seed=0,
                 relative=False):
        self.epsilon = epsilon
        self.alpha = alpha
        self.n_shots = n_shots
        self.ci_method = ci_method
        self.schedule = schedule
        self.seed = seed
        self.relative = relative

    def fit(self, oracle, y=None):
        if not isinstance(oracle, SimulatedOracle):
            oracle = SimulatedOracle(float(oracle), seed=self.seed)
        if self.relative:
            result = run_relative_iqae(
                self.epsilon, self.alpha, oracle,
                n_shots=self.n_shots, ci_method=self.ci_method,
                schedule=self.schedule,
            )
        else:
            config = EstimatorConfig(
                epsilon=self.epsilon, alpha=self.alpha, n_shots=self.n_shots,
                ci_method=self.ci_method, schedule=self.schedule, seed=self.seed,
            )
            result = run_modified_iqae(config, oracle)
        self.result_ = result
        self.interval_ = result.amplitude_interval
        self.estimate_ = result.point_estimate
        return self

    def predict(self, oracle=None):
        """Point estimate from the last fit."""
        if not hasattr(self, "result_"):
            raise RuntimeError("call fit before predict")
        return self.estimate_
