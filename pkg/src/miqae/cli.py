"""Command-line experiment harness.

Subcommands:
    run        — a single estimation, printed as JSON or a short summary.
    grid       — a replicated parameter grid, exported as CSVs.
    verify     — numerical checks of the termination and sum lemmas.
    roundstats — per-k and per-round summary tables from grid output.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from . import lemmas
from .estimator import EstimatorConfig, run_modified_iqae, run_relative_iqae
from .geometry import (
    AngleInterval,
    HALF_PI,
    QUADRANT_MARGIN,
    find_next_k,
    invariant_holds,
    k_max,
)
from .harness import load_grid_spec, roundstats_from_csvs, run_grid, write_grid_csvs
from .oracle import SimulatedOracle

_METHOD_ALIASES = {"chernoff": "chernoff", "beta": "clopper_pearson",
                   "clopper_pearson": "clopper_pearson"}


@click.group()
def main():
    """Simulation laboratory for modified iterative amplitude estimation."""


@main.command()
@click.option("--epsilon", type=float, required=True, help="Target half-width.")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--amplitude", type=float, required=True, help="Ground-truth amplitude.")
@click.option("--n-shots", type=int, default=100, show_default=True)
@click.option("--method", type=click.Choice(sorted(_METHOD_ALIASES)), default="chernoff",
              show_default=True)
@click.option("--schedule", type=click.Choice(["modified", "uniform"]), default="modified",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--relative", is_flag=True, help="Run the relative-error wrapper.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full result as JSON.")
def run(epsilon, alpha, amplitude, n_shots, method, schedule, seed, relative, as_json):
    """Run one estimation against a simulated oracle."""
    oracle = SimulatedOracle(amplitude, seed=seed)
    ci_method = _METHOD_ALIASES[method]
    if relative:
        result = run_relative_iqae(epsilon, alpha, oracle, n_shots=n_shots,
                                   ci_method=ci_method, schedule=schedule)
    else:
        config = EstimatorConfig(epsilon=epsilon, alpha=alpha, n_shots=n_shots,
                                 ci_method=ci_method, schedule=schedule, seed=seed)
        result = run_modified_iqae(config, oracle)
    if as_json:
        click.echo(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    else:
        a_l, a_u = result.amplitude_interval
        click.echo(f"estimate   {result.point_estimate:.12g}")
        click.echo(f"interval   [{a_l:.12g}, {a_u:.12g}]")
        click.echo(f"queries    {result.total_queries}")
        click.echo(f"shots      {result.total_shots}")
        click.echo(f"rounds     {len(result.rounds)}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="Grid spec as a YAML/JSON mapping.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def grid(config_path, out_dir):
    """Run a replicated parameter grid and export CSVs."""
    spec = load_grid_spec(config_path)
    aggregates, outcomes = run_grid(spec)
    paths = write_grid_csvs(out_dir, spec, aggregates, outcomes)
    errors = sum(a.errors for a in aggregates)
    for name, path in paths.items():
        click.echo(f"wrote {path}")
    if errors:
        click.echo(f"WARNING: {errors} runs aborted on contract violations", err=True)
        sys.exit(2)


@main.command()
@click.option("--grid-points", type=int, default=100_000, show_default=True,
              help="Grid density for the angle-bound sweep.")
@click.option("--trials", type=int, default=10_000, show_default=True,
              help="Randomized trials for the existence and sum checks.")
@click.option("--seed", type=int, default=0, show_default=True)
def verify(grid_points, trials, seed):
    """Numerically verify the geometric facts behind the guarantees."""
    rng = np.random.default_rng(seed)
    failures = 0

    def report(name, ok, detail=""):
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        click.echo(f"[{status}] {name}" + (f" ({detail})" if detail else ""))

    # Angle-bound sweep: eps_theta <= f_max everywhere, min of f_max = pi/42.
    thetas = np.linspace(0.0, HALF_PI, grid_points)
    fmax = lemmas.f_max(thetas)
    eps_t = lemmas.epsilon_theta_bound(thetas)
    gap = np.max(eps_t - fmax)
    report("eps_theta <= f_max on grid", gap <= 1e-9, f"max excess {gap:.3e}")
    # The pi/42 minimum lives in the middle region where the arcsin branch
    # of the width bound is active; at the quadrant edges f_max vanishes.
    edge = 0.5 * math.asin(math.sqrt(QUADRANT_MARGIN))
    middle_mask = (thetas >= edge) & (thetas <= HALF_PI - edge)
    fmid = fmax[middle_mask]
    tmid = thetas[middle_mask]
    fmin = float(np.min(fmid))
    argmin = float(tmid[int(np.argmin(fmid))])
    step = HALF_PI / (grid_points - 1)
    near_min_point = min(abs(argmin - 4 * math.pi / 21.0),
                         abs(argmin - (HALF_PI - 4 * math.pi / 21.0)))
    report("min f_max = pi/42 at 4*pi/21 (or its mirror about pi/4)",
           abs(fmin - math.pi / 42.0) <= 2 * step and near_min_point <= 2 * step,
           f"min {fmin:.9f} at {argmin:.9f}")

    # Existence of an odd rescaling factor on hypothesis-satisfying pairs.
    missing = 0
    for _ in range(trials):
        theta_a = rng.uniform(1e-6, HALF_PI - 2e-3)
        width_cap = min(HALF_PI - theta_a - 1e-9, 0.05)
        theta_b = theta_a + rng.uniform(1e-3, width_cap)
        if abs(math.sin(theta_b) ** 2 - math.sin(theta_a) ** 2) > QUADRANT_MARGIN:
            continue
        if lemmas.existence_witness(theta_a, theta_b) is None:
            missing += 1
    report("odd rescaling factor always exists", missing == 0, f"{missing} missing")

    # Sum bound over random admissible multiplier sequences.
    bad = 0
    for _ in range(max(1, trials // 10)):
        K_cap = float(rng.uniform(27, 1e4))
        ks = [1.0]
        while ks[-1] * 3 <= K_cap and rng.random() < 0.9:
            ks.append(ks[-1] * rng.uniform(3.0, 4.0))
            if ks[-1] > K_cap:
                ks[-1] = K_cap
                break
        alpha = 0.05
        c = 3.0 * K_cap / alpha
        for f in (lambda x: x, lambda x: x * math.log(c / x)):
            if not lemmas.geometric_sum_bound_holds(ks, f, K_cap):
                bad += 1
    report("geometric sum bound holds", bad == 0, f"{bad} violations")

    # FindNextK agrees with exhaustive search on random valid intervals.
    mismatches = 0
    for _ in range(max(1, trials // 10)):
        k_i = int(rng.integers(0, 20))
        K_i = 2 * k_i + 1
        lo = rng.uniform(0.0, HALF_PI * 0.99)
        hi = lo + rng.uniform(1e-5, min(HALF_PI - lo, HALF_PI / K_i))
        interval = AngleInterval(lo, hi)
        got = find_next_k(k_i, interval)
        best = k_i
        K = int(HALF_PI // interval.width)
        if K % 2 == 0:
            K -= 1
        while K >= 3 * K_i:
            if invariant_holds(K, interval):
                best = (K - 1) // 2
                break
            K -= 2
        if got != best:
            mismatches += 1
    report("FindNextK matches brute force", mismatches == 0, f"{mismatches} mismatches")

    if failures:
        sys.exit(1)


@main.command()
@click.option("--in", "runs_dir", type=click.Path(exists=True), required=True,
              help="Directory holding runs.csv and rounds.csv from `grid`.")
@click.option("--out", "out_path", type=click.Path(), required=True)
def roundstats(runs_dir, out_path):
    """Per-k table (and per-round-index companion) from grid output."""
    per_k, by_round = roundstats_from_csvs(runs_dir, out_path)
    click.echo(f"wrote {per_k}")
    click.echo(f"wrote {by_round}")


if __name__ == "__main__":
    main()
