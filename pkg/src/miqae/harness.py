"""Experiment harness: parameter grids, replication, aggregation, CSV export.

Every run gets its own random substream derived from
(master_seed, cell_index, replication), so results are independent of
execution order and a grid reruns byte-for-byte.  Failure means the ground
truth fed to the oracle (after optional perturbation) fell outside the
returned interval; runs that abort on a contract violation are counted in a
separate error column, never folded into failures.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np
import yaml

from .estimator import EstimationError, EstimatorConfig, run_modified_iqae
from .geometry import k_max
from .oracle import SimulatedOracle

DEFAULT_PERTURB_SIGMA = 1.0 / 320.0

AGGREGATE_COLUMNS = [
    "epsilon", "alpha", "amplitude", "method", "schedule", "n_shots",
    "replications", "mean_queries", "mean_shots", "failure_count",
    "failure_frequency", "mean_rounds", "mean_width", "errors",
]
RUNS_COLUMNS = [
    "run_id", "epsilon", "alpha", "amplitude", "true_amplitude", "method",
    "schedule", "n_shots", "replication", "a_lower", "a_upper",
    "theta_lower", "theta_upper", "point_estimate", "total_queries",
    "total_shots", "rounds", "failure", "error",
]
ROUNDS_COLUMNS = [
    "run_id", "round_index", "k_i", "K_i", "alpha_i", "n_max_i", "R_i",
    "shots_used", "ones_observed", "theta_l", "theta_u", "queries_round",
]


@dataclass(frozen=True)
class GridSpec:
    """A full experiment: the Cartesian product of the parameter lists,
    replicated and seeded reproducibly."""

    epsilons: tuple
    amplitudes: tuple
    ci_methods: tuple = ("chernoff", "clopper_pearson")
    schedules: tuple = ("modified",)
    n_shots_values: tuple = (100,)
    replications: int = 500
    alpha: float = 0.05
    master_seed: int = 0
    perturb_amplitudes: bool = True
    perturb_sigma: float = DEFAULT_PERTURB_SIGMA

    def __post_init__(self):
        for name in ("epsilons", "amplitudes", "ci_methods", "schedules", "n_shots_values"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        for a in self.amplitudes:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"amplitude {a} outside [0, 1]")

    @classmethod
    def from_mapping(cls, data: dict) -> "GridSpec":
        kwargs = dict(data)
        for name in ("epsilons", "amplitudes", "ci_methods", "schedules", "n_shots_values"):
            if name in kwargs:
                kwargs[name] = tuple(kwargs[name])
        return cls(**kwargs)

    def cells(self) -> list[tuple]:
        """(epsilon, amplitude, method, schedule, n_shots) in grid order."""
        return list(product(self.epsilons, self.amplitudes, self.ci_methods,
                            self.schedules, self.n_shots_values))


def load_grid_spec(path) -> GridSpec:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"grid config {path} must be a mapping")
    return GridSpec.from_mapping(data)


@dataclass
class RunOutcome:
    run_id: str
    cell: tuple
    replication: int
    true_amplitude: float
    result: object = None
    error: str = ""

    @property
    def failed(self) -> bool:
        return self.result is not None and not self.result.contains(self.true_amplitude)


@dataclass
class AggregateRow:
    epsilon: float
    alpha: float
    amplitude: float
    method: str
    schedule: str
    n_shots: int
    replications: int
    mean_queries: float
    mean_shots: float
    failure_count: int
    failure_frequency: float
    mean_rounds: float
    mean_width: float
    errors: int


def run_single(spec: GridSpec, cell_index: int, cell: tuple, replication: int) -> RunOutcome:
    """One seeded replication of one grid cell."""
    epsilon, amplitude, method, schedule, n_shots = cell
    ss = np.random.SeedSequence(entropy=spec.master_seed,
                                spawn_key=(cell_index, replication))
    perturb_seed, oracle_seed = ss.spawn(2)

    a_true = float(amplitude)
    if spec.perturb_amplitudes:
        rng = np.random.default_rng(perturb_seed)
        a_true = float(np.clip(rng.normal(amplitude, spec.perturb_sigma), 0.0, 1.0))

    outcome = RunOutcome(
        run_id=f"c{cell_index:04d}_r{replication:05d}",
        cell=cell,
        replication=replication,
        true_amplitude=a_true,
    )
    oracle = SimulatedOracle(a_true, seed=oracle_seed)
    config = EstimatorConfig(epsilon=epsilon, alpha=spec.alpha, n_shots=n_shots,
                             ci_method=method, schedule=schedule)
    try:
        outcome.result = run_modified_iqae(config, oracle)
    except EstimationError as exc:
        outcome.error = str(exc)
    return outcome


def run_grid(spec: GridSpec) -> tuple[list[AggregateRow], list[RunOutcome]]:
    """Execute the whole grid; returns aggregates (in grid order) and every
    per-run outcome."""
    outcomes: list[RunOutcome] = []
    aggregates: list[AggregateRow] = []
    for cell_index, cell in enumerate(spec.cells()):
        cell_outcomes = [run_single(spec, cell_index, cell, r)
                         for r in range(spec.replications)]
        outcomes.extend(cell_outcomes)
        aggregates.append(aggregate_cell(spec, cell, cell_outcomes))
    return aggregates, outcomes


def aggregate_cell(spec: GridSpec, cell: tuple, outcomes: list[RunOutcome]) -> AggregateRow:
    epsilon, amplitude, method, schedule, n_shots = cell
    ok = [o for o in outcomes if o.error == ""]
    failures = sum(1 for o in ok if o.failed)
    n_ok = len(ok)
    mean = lambda xs: sum(xs) / n_ok if n_ok else float("nan")
    return AggregateRow(
        epsilon=epsilon,
        alpha=spec.alpha,
        amplitude=amplitude,
        method=method,
        schedule=schedule,
        n_shots=n_shots,
        replications=spec.replications,
        mean_queries=mean([o.result.total_queries for o in ok]),
        mean_shots=mean([o.result.total_shots for o in ok]),
        failure_count=failures,
        failure_frequency=failures / spec.replications,
        mean_rounds=mean([len(o.result.rounds) for o in ok]),
        mean_width=mean([o.result.amplitude_width for o in ok]),
        errors=len(outcomes) - n_ok,
    )


def _fmt(value) -> str:
    # 17 significant digits round-trips doubles; locale-independent.
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_grid_csvs(out_dir, spec: GridSpec, aggregates: list[AggregateRow],
                    outcomes: list[RunOutcome]) -> dict:
    """Write aggregate.csv, runs.csv and rounds.csv under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    agg_rows = [[getattr(a, c) for c in AGGREGATE_COLUMNS] for a in aggregates]

    run_rows = []
    round_rows = []
    for o in outcomes:
        epsilon, amplitude, method, schedule, n_shots = o.cell
        if o.result is None:
            run_rows.append([
                o.run_id, epsilon, spec.alpha, amplitude, o.true_amplitude,
                method, schedule, n_shots, o.replication, "", "", "", "", "",
                "", "", "", "", o.error,
            ])
            continue
        res = o.result
        run_rows.append([
            o.run_id, epsilon, spec.alpha, amplitude, o.true_amplitude, method,
            schedule, n_shots, o.replication,
            res.amplitude_interval[0], res.amplitude_interval[1],
            res.theta_interval.theta_l, res.theta_interval.theta_u,
            res.point_estimate, res.total_queries, res.total_shots,
            len(res.rounds), o.failed, "",
        ])
        for r in res.rounds:
            round_rows.append([
                o.run_id, r.index, r.k_i, r.K_i, r.alpha_i, r.n_max_i,
                r.quadrant, r.shots_used, r.ones_observed,
                r.interval_after.theta_l, r.interval_after.theta_u,
                r.queries_this_round,
            ])

    paths = {
        "aggregate": out / "aggregate.csv",
        "runs": out / "runs.csv",
        "rounds": out / "rounds.csv",
    }
    _write_csv(paths["aggregate"], AGGREGATE_COLUMNS, agg_rows)
    _write_csv(paths["runs"], RUNS_COLUMNS, run_rows)
    _write_csv(paths["rounds"], ROUNDS_COLUMNS, round_rows)
    return paths


def per_round_report(outcomes: list[RunOutcome]) -> dict:
    """Per-k and per-round-index summary tables from in-memory outcomes.

    Keys group by (epsilon, method, schedule, n_shots) so the tables line up
    with the paper-style per-round figures; each group also carries the
    k_max reference value pi/(4*epsilon).
    """
    by_k: dict = {}
    by_round: dict = {}
    for o in outcomes:
        if o.result is None:
            continue
        epsilon, _, method, schedule, n_shots = o.cell
        group = (epsilon, method, schedule, n_shots)
        for r in o.result.rounds:
            shots, queries, count = by_k.get(group, {}).get(r.k_i, (0, 0, 0))
            by_k.setdefault(group, {})[r.k_i] = (
                shots + r.shots_used, queries + r.queries_this_round, count + 1)
            ksum, count2 = by_round.get(group, {}).get(r.index, (0, 0))
            by_round.setdefault(group, {})[r.index] = (ksum + r.k_i, count2 + 1)

    per_k_rows = []
    for group in sorted(by_k):
        epsilon, method, schedule, n_shots = group
        for k_i in sorted(by_k[group]):
            shots, queries, count = by_k[group][k_i]
            per_k_rows.append([epsilon, method, schedule, n_shots, k_i,
                               shots / count, queries / count, count])
    per_round_rows = []
    for group in sorted(by_round):
        epsilon, method, schedule, n_shots = group
        for index in sorted(by_round[group]):
            ksum, count = by_round[group][index]
            per_round_rows.append([epsilon, method, schedule, n_shots, index,
                                   ksum / count, k_max(epsilon)])
    return {"per_k": per_k_rows, "per_round": per_round_rows}


PER_K_COLUMNS = ["epsilon", "method", "schedule", "n_shots", "k_i",
                 "mean_shots", "mean_queries", "rounds_observed"]
PER_ROUND_COLUMNS = ["epsilon", "method", "schedule", "n_shots",
                     "round_index", "mean_k", "k_max"]


def roundstats_from_csvs(runs_dir, out_path) -> tuple[Path, Path]:
    """Rebuild the per-k and per-round tables from a grid output directory.

    Writes the per-k table to out_path and the per-round-index table next to
    it with a ``_by_round`` suffix.
    """
    runs_dir = Path(runs_dir)
    runs = _read_csv(runs_dir / "runs.csv")
    rounds = _read_csv(runs_dir / "rounds.csv")

    coords = {}
    for row in runs:
        coords[row["run_id"]] = (float(row["epsilon"]), row["method"],
                                 row["schedule"], int(row["n_shots"]))

    by_k: dict = {}
    by_round: dict = {}
    for row in rounds:
        group = coords.get(row["run_id"])
        if group is None:
            raise ValueError(f"rounds.csv references unknown run_id {row['run_id']}")
        k_i = int(row["k_i"])
        shots, queries, count = by_k.get(group, {}).get(k_i, (0, 0, 0))
        by_k.setdefault(group, {})[k_i] = (
            shots + int(row["shots_used"]),
            queries + int(row["queries_round"]), count + 1)
        index = int(row["round_index"])
        ksum, count2 = by_round.get(group, {}).get(index, (0, 0))
        by_round.setdefault(group, {})[index] = (ksum + k_i, count2 + 1)

    per_k_rows = []
    for group in sorted(by_k):
        for k_i in sorted(by_k[group]):
            shots, queries, count = by_k[group][k_i]
            per_k_rows.append(list(group) + [k_i, shots / count, queries / count, count])
    per_round_rows = []
    for group in sorted(by_round):
        for index in sorted(by_round[group]):
            ksum, count = by_round[group][index]
            per_round_rows.append(list(group) + [index, ksum / count, k_max(group[0])])

    out_path = Path(out_path)
    by_round_path = out_path.with_name(out_path.stem + "_by_round" + out_path.suffix)
    _write_csv(out_path, PER_K_COLUMNS, per_k_rows)
    _write_csv(by_round_path, PER_ROUND_COLUMNS, per_round_rows)
    return out_path, by_round_path


def _read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
