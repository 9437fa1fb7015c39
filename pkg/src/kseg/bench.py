"""Benchmark harness: run algorithms over a corpus, score, and summarize.

Produces three artifacts: per-run rows (one per signal and algorithm),
a per-algorithm summary with runtimes and costs relative to a chosen
baseline algorithm, and deficit-CDF rows for plotting score distributions.
Timing wraps the prefix-stat build plus the algorithm call; file handling
stays outside the clock.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import covering_score, deficit_cdf, rand_index
from .registry import RunOptions, run_algorithm
from .signal import Signal, build_prefix_stats, ksegment_cost

# Relative costs divide two near-zero numbers on noise-free corpora; both
# sides are floored here so exact recoveries compare as exactly 1.0.
COST_FLOOR = 1e-9


@dataclass(frozen=True)
class EvalReport:
    """Outcome of one algorithm on one signal."""

    algorithm: str
    signal_id: str
    n: int
    d: int
    k: int
    change_points: tuple[int, ...]
    cost: float
    covering: float | None
    rand: float | None
    elapsed_seconds: float

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError("cost must be >= 0")
        for score in (self.covering, self.rand):
            if score is not None and not (0.0 <= score <= 1.0):
                raise ValueError("scores must lie in [0, 1]")


@dataclass(frozen=True)
class CorpusItem:
    """One benchmark input: a signal, its segment count, optional truth."""

    signal_id: str
    signal: Signal
    k: int
    truth: np.ndarray | None = None


def evaluate(
    items: list[CorpusItem],
    algorithms: list[str],
    options: RunOptions = RunOptions(),
) -> list[EvalReport]:
    """Run every algorithm on every item; rows come back sorted by
    (signal id, algorithm) regardless of execution order."""
    reports = []
    for item in items:
        for name in algorithms:
            start = time.perf_counter()
            stats = build_prefix_stats(item.signal)
            seg = run_algorithm(name, item.signal, stats, item.k, options)
            elapsed = time.perf_counter() - start
            covering = rand = None
            if item.truth is not None:
                pred = seg.change_points
                covering = float(
                    covering_score(item.truth, pred, item.signal.n)
                )
                rand = float(rand_index(item.truth, pred, item.signal.n))
            reports.append(
                EvalReport(
                    algorithm=name,
                    signal_id=item.signal_id,
                    n=item.signal.n,
                    d=item.signal.d,
                    k=item.k,
                    change_points=tuple(int(b) for b in seg.change_points),
                    cost=ksegment_cost(item.signal, seg),
                    covering=covering,
                    rand=rand,
                    elapsed_seconds=elapsed,
                )
            )
    return sorted(reports, key=lambda r: (r.signal_id, r.algorithm))


def summarize(
    reports: list[EvalReport], baseline: str, algorithms: list[str]
) -> list[dict]:
    """Per-algorithm means: runtime and cost relative to the baseline on
    each signal, plus raw covering and Rand averages."""
    base = {r.signal_id: r for r in reports if r.algorithm == baseline}
    if not base:
        raise ValueError(f"baseline {baseline!r} has no rows")
    rows = []
    for name in algorithms:
        mine = [r for r in reports if r.algorithm == name]
        if not mine:
            continue
        rel_rt = [
            r.elapsed_seconds / base[r.signal_id].elapsed_seconds
            for r in mine
        ]
        rel_cost = [
            max(r.cost, COST_FLOOR) / max(base[r.signal_id].cost, COST_FLOOR)
            for r in mine
        ]
        coverings = [r.covering for r in mine if r.covering is not None]
        rands = [r.rand for r in mine if r.rand is not None]
        rows.append(
            {
                "algorithm": name,
                "rel_runtime": float(np.mean(rel_rt)),
                "rel_cost": float(np.mean(rel_cost)),
                "covering": float(np.mean(coverings)) if coverings else None,
                "rand_index": float(np.mean(rands)) if rands else None,
            }
        )
    return rows


def deficit_rows(
    reports: list[EvalReport], algorithms: list[str]
) -> list[tuple[float, float, str, str]]:
    """CDF rows (deficit, fraction, algorithm, metric) for plotting."""
    rows = []
    for name in algorithms:
        mine = [r for r in reports if r.algorithm == name]
        for metric, pick in (
            ("covering", lambda r: r.covering),
            ("rand_index", lambda r: r.rand),
        ):
            scores = [pick(r) for r in mine if pick(r) is not None]
            for deficit, fraction in deficit_cdf(scores):
                rows.append((deficit, fraction, name, metric))
    return rows


def write_reports_csv(path, reports: list[EvalReport]) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "signal_id", "n", "d", "k", "change_points",
             "cost", "covering", "rand_index", "elapsed_seconds"]
        )
        for r in reports:
            writer.writerow(
                [
                    r.algorithm,
                    r.signal_id,
                    r.n,
                    r.d,
                    r.k,
                    ";".join(str(b) for b in r.change_points),
                    repr(float(r.cost)),
                    "" if r.covering is None else repr(float(r.covering)),
                    "" if r.rand is None else repr(float(r.rand)),
                    repr(float(r.elapsed_seconds)),
                ]
            )


def write_summary_csv(path, rows: list[dict]) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "rel_runtime", "rel_cost", "covering", "rand_index"]
        )
        for row in rows:
            writer.writerow(
                [
                    row["algorithm"],
                    f"{row['rel_runtime']:.3f}",
                    f"{row['rel_cost']:.3f}",
                    "" if row["covering"] is None else f"{row['covering']:.3f}",
                    "" if row["rand_index"] is None
                    else f"{row['rand_index']:.3f}",
                ]
            )


def write_deficit_csv(path, rows) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["deficit", "fraction", "algorithm", "metric"])
        for deficit, fraction, name, metric in rows:
            writer.writerow([repr(deficit), repr(fraction), name, metric])
