"""Figure kinds rendered from the harness CSV schemas.

Four kinds:
    complexity    — log-log mean queries vs target half-width, one line per
                    (method, schedule) pair.  Input: aggregate table.
    per_round     — three panels: mean shots per multiplier, mean queries per
                    multiplier, and the multiplier growth per round with the
                    multiplier-cap reference line.  Inputs: the per-k and
                    per-round tables produced by the harness's roundstats.
    per_amplitude — mean queries vs true amplitude, one panel per target
                    half-width.  Input: aggregate table.
    failures      — failure-frequency bars with the confidence-budget
                    reference line.  Input: aggregate table.

Rendering is deterministic: fixed style, Agg backend, pinned svg hash salt,
and timestamp-free metadata, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "miqae-plots"

import matplotlib.pyplot as plt  # noqa: E402


class SchemaError(ValueError):
    """An input CSV does not match the expected harness schema."""


AGGREGATE_REQUIRED = ["epsilon", "alpha", "amplitude", "method", "schedule",
                      "n_shots", "mean_queries", "failure_frequency"]
PER_K_REQUIRED = ["epsilon", "method", "schedule", "n_shots", "k_i",
                  "mean_shots", "mean_queries"]
PER_ROUND_REQUIRED = ["epsilon", "method", "schedule", "n_shots",
                      "round_index", "mean_k", "k_max"]


def read_table(path, required):
    """Load a CSV, checking the required columns exist and parse."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise SchemaError(f"{path}: missing required column {column!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    numeric = [c for c in required if c not in ("method", "schedule")]
    for row in rows:
        for column in numeric:
            try:
                row[column] = float(row[column])
            except ValueError:
                raise SchemaError(
                    f"{path}: non-numeric value {row[column]!r} in column "
                    f"{column!r}") from None
    return rows


def _groups(rows, keys):
    """Ordered mapping from key tuple to the rows carrying it."""
    out = {}
    for row in rows:
        out.setdefault(tuple(row[k] for k in keys), []).append(row)
    return dict(sorted(out.items()))


def _series(rows, x, y):
    pts = sorted((row[x], row[y]) for row in rows)
    return [p[0] for p in pts], [p[1] for p in pts]


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    output: str
    log_x: bool | None = None  # None = the kind's default
    log_y: bool | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {sorted(FIGURE_KINDS)}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _apply_scales(axes, spec, default_x, default_y):
    log_x = default_x if spec.log_x is None else spec.log_x
    log_y = default_y if spec.log_y is None else spec.log_y
    for ax in axes:
        if log_x:
            ax.set_xscale("log")
        if log_y:
            ax.set_yscale("log")


def _save(fig, output):
    output = Path(output)
    suffix = output.suffix.lower()
    if suffix not in (".png", ".svg"):
        raise ValueError(f"unsupported output format {suffix!r}; use .png or .svg")
    # Strip the volatile metadata fields each writer would otherwise embed.
    metadata = {"Date": None} if suffix == ".svg" else {"Software": None}
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=150, metadata=metadata)
    plt.close(fig)
    return output


def _single_input(spec):
    if len(spec.inputs) != 1:
        raise ValueError(f"kind {spec.kind!r} takes exactly one input CSV "
                         f"(the aggregate table), got {len(spec.inputs)}")
    return spec.inputs[0]


def render_complexity(spec):
    rows = read_table(_single_input(spec), AGGREGATE_REQUIRED)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for (method, schedule, n_shots), group in _groups(
            rows, ["method", "schedule", "n_shots"]).items():
        by_eps = _groups(group, ["epsilon"])
        xs = [eps for (eps,) in by_eps]
        ys = [sum(r["mean_queries"] for r in g) / len(g)
              for g in by_eps.values()]
        ax.plot(xs, ys, marker="o",
                label=f"{method}/{schedule}, shots={n_shots:g}")
    _apply_scales([ax], spec, default_x=True, default_y=True)
    ax.set_xlabel("target half-width")
    ax.set_ylabel("mean oracle queries")
    ax.set_title("Query complexity")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, spec.output)


def _split_per_round_inputs(spec):
    if len(spec.inputs) != 2:
        raise ValueError("kind 'per_round' takes two input CSVs: the per-k "
                         f"table and the per-round table, got {len(spec.inputs)}")
    per_k = per_round = None
    for path in spec.inputs:
        with open(path, newline="") as fh:
            header = next(csv.reader(fh), [])
        if "k_i" in header:
            per_k = path
        elif "round_index" in header:
            per_round = path
    if per_k is None or per_round is None:
        raise SchemaError("per_round inputs must be one per-k table (column "
                          "'k_i') and one per-round table (column 'round_index')")
    return per_k, per_round


def render_per_round(spec):
    per_k_path, per_round_path = _split_per_round_inputs(spec)
    per_k = read_table(per_k_path, PER_K_REQUIRED)
    per_round = read_table(per_round_path, PER_ROUND_REQUIRED)

    fig, axes = plt.subplots(1, 3, figsize=(12.8, 4.2))
    group_keys = ["epsilon", "method", "schedule", "n_shots"]

    def label(key):
        eps, method, schedule, n_shots = key
        return f"eps={eps:g} {method}/{schedule} shots={n_shots:g}"

    for key, group in _groups(per_k, group_keys).items():
        xs, ys = _series(group, "k_i", "mean_shots")
        axes[0].plot(xs, ys, marker="o", label=label(key))
        xs, ys = _series(group, "k_i", "mean_queries")
        axes[1].plot(xs, ys, marker="o", label=label(key))
    for key, group in _groups(per_round, group_keys).items():
        xs, ks = _series(group, "round_index", "mean_k")
        axes[2].plot(xs, [2 * k + 1 for k in ks], marker="o", label=label(key))
    for cap in sorted({row["k_max"] for row in per_round}):
        axes[2].axhline(cap, color="red", linestyle=":",
                        label=f"multiplier cap {cap:g}")

    axes[0].set_xlabel("amplification power k")
    axes[0].set_ylabel("mean shots")
    axes[0].set_title("Shots per multiplier")
    axes[1].set_xlabel("amplification power k")
    axes[1].set_ylabel("mean queries")
    axes[1].set_title("Queries per multiplier")
    axes[2].set_xlabel("round index")
    axes[2].set_ylabel("multiplier K")
    axes[2].set_title("Multiplier growth")
    _apply_scales(axes[:2], spec, default_x=True, default_y=True)
    _apply_scales(axes[2:], spec, default_x=False, default_y=True)
    for ax in axes:
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=6)
    fig.tight_layout()
    return _save(fig, spec.output)


def render_per_amplitude(spec):
    rows = read_table(_single_input(spec), AGGREGATE_REQUIRED)
    by_eps = _groups(rows, ["epsilon"])
    fig, axes = plt.subplots(1, len(by_eps),
                             figsize=(4.2 * len(by_eps), 4.2),
                             squeeze=False, sharey=False)
    axes = axes[0]
    for ax, ((eps,), group) in zip(axes, by_eps.items()):
        for (method, schedule, n_shots), sub in _groups(
                group, ["method", "schedule", "n_shots"]).items():
            xs, ys = _series(sub, "amplitude", "mean_queries")
            ax.plot(xs, ys, marker="o",
                    label=f"{method}/{schedule}, shots={n_shots:g}")
        ax.set_title(f"target half-width {eps:g}")
        ax.set_xlabel("amplitude")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=7)
    axes[0].set_ylabel("mean oracle queries")
    _apply_scales(axes, spec, default_x=False, default_y=True)
    fig.tight_layout()
    return _save(fig, spec.output)


def render_failures(spec):
    rows = read_table(_single_input(spec), AGGREGATE_REQUIRED)
    rows = sorted(rows, key=lambda r: (r["epsilon"], r["method"],
                                       r["schedule"], r["n_shots"],
                                       r["amplitude"]))
    fig, ax = plt.subplots(figsize=(max(6.4, 0.12 * len(rows)), 4.2))
    methods = sorted({r["method"] for r in rows})
    cmap = plt.get_cmap("tab10")
    colors = {m: cmap(i % 10) for i, m in enumerate(methods)}
    ax.bar(range(len(rows)),
           [r["failure_frequency"] for r in rows],
           color=[colors[r["method"]] for r in rows], width=0.9)
    for alpha in sorted({r["alpha"] for r in rows}):
        ax.axhline(alpha, color="black", linestyle="--",
                   label=f"confidence budget {alpha:g}")
    handles, labels = ax.get_legend_handles_labels()
    handles += [plt.Rectangle((0, 0), 1, 1, color=colors[m]) for m in methods]
    labels += methods
    ax.legend(handles, labels, fontsize=8)
    ax.set_xlabel("grid cell (sorted by half-width, method, schedule, "
                  "shots, amplitude)")
    ax.set_ylabel("failure frequency")
    ax.set_title("Interval failure frequency per cell")
    _apply_scales([ax], spec, default_x=False, default_y=False)
    fig.tight_layout()
    return _save(fig, spec.output)


FIGURE_KINDS = {
    "complexity": render_complexity,
    "per_round": render_per_round,
    "per_amplitude": render_per_amplitude,
    "failures": render_failures,
}


def render(spec: FigureSpec) -> Path:
    """Render the figure described by spec; returns the output path."""
    return FIGURE_KINDS[spec.kind](spec)
