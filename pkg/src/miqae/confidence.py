"""Binomial confidence intervals used by the estimation loop.

Two backends: the Chernoff-Hoeffding half-width (closed form, the one the
schedule analysis is built around) and the exact Clopper-Pearson interval
from Beta-distribution quantiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special


@dataclass(frozen=True)
class BinomialSample:
    """Pooled measurement outcomes: ``successes`` ones out of ``trials`` shots."""

    successes: int
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if not 0 <= self.successes <= self.trials:
            raise ValueError(
                f"successes must be in [0, trials], got {self.successes}/{self.trials}"
            )

    @property
    def fraction(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class AmplitudeCI:
    """Confidence interval [a_min, a_max] at failure budget ``level_alpha``."""

    a_min: float
    a_max: float
    level_alpha: float

    def __post_init__(self):
        if not 0.0 <= self.a_min <= self.a_max <= 1.0:
            raise ValueError(f"invalid interval [{self.a_min}, {self.a_max}]")

    @property
    def width(self) -> float:
        return self.a_max - self.a_min


def chernoff_halfwidth(n, alpha_i: float) -> float:
    """Half-width sqrt(ln(2/alpha_i) / (2n)) of the Hoeffding interval.

    With this choice the two-sided failure probability 2*exp(-2*n*eps^2)
    equals alpha_i.  Accepts a real-valued n so the shot-budget analysis can
    evaluate it at the unrounded budget.
    """
    if n <= 0:
        raise ValueError(f"sample size must be positive, got {n}")
    if not 0.0 < alpha_i < 1.0:
        raise ValueError(f"alpha_i must be in (0, 1), got {alpha_i}")
    return math.sqrt(math.log(2.0 / alpha_i) / (2.0 * n))


def chernoff_interval(sample: BinomialSample, alpha_i: float) -> AmplitudeCI:
    """Hoeffding interval for the success probability, clamped to [0, 1]."""
    eps = chernoff_halfwidth(sample.trials, alpha_i)
    a_hat = sample.fraction
    return AmplitudeCI(max(0.0, a_hat - eps), min(1.0, a_hat + eps), alpha_i)


def clopper_pearson_interval(sample: BinomialSample, alpha_i: float) -> AmplitudeCI:
    """Exact equal-tailed binomial interval via Beta quantiles.

    lower = Beta(n, N-n+1) quantile at alpha_i/2 (0 when n = 0),
    upper = Beta(n+1, N-n) quantile at 1 - alpha_i/2 (1 when n = N).
    """
    if not 0.0 < alpha_i < 1.0:
        raise ValueError(f"alpha_i must be in (0, 1), got {alpha_i}")
    n, trials = sample.successes, sample.trials
    if n == 0:
        lower = 0.0
    else:
        lower = float(special.betaincinv(n, trials - n + 1, alpha_i / 2.0))
    if n == trials:
        upper = 1.0
    else:
        upper = float(special.betaincinv(n + 1, trials - n, 1.0 - alpha_i / 2.0))
    if math.isnan(lower) or math.isnan(upper):
        raise ArithmeticError(
            f"beta quantile inversion failed for {n}/{trials} at alpha={alpha_i}"
        )
    return AmplitudeCI(lower, upper, alpha_i)


CI_METHODS = {
    "chernoff": chernoff_interval,
    "clopper_pearson": clopper_pearson_interval,
}
