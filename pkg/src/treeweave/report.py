"""Summary statistics and trace file formats.

Trace CSV columns: ``run,round,phase,population,lambda2,swaps,disconnected``
with lambda2 written to 9 significant digits and ``disconnected`` as 0/1.
The JSON summary is ``{config, pooled, per_run}``.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .churn import RoundTrace
from .errors import DomainError

CSV_HEADER = ("run", "round", "phase", "population", "lambda2", "swaps", "disconnected")


@dataclass(frozen=True)
class SummaryStats:
    min: float
    max: float
    mean: float
    stddev: float  # sample standard deviation; 0 for a single value


@dataclass(frozen=True)
class BatchSummary:
    pooled: SummaryStats
    per_run: dict[int, SummaryStats]


def describe(values: Sequence[float]) -> SummaryStats:
    values = list(values)
    if not values:
        raise DomainError("cannot summarise an empty series")
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    lo, hi = min(values), max(values)
    # fmean can land one ulp outside [lo, hi] on constant series
    mean = min(max(statistics.fmean(values), lo), hi)
    return SummaryStats(lo, hi, mean, sd)


def summarize(traces: Iterable[RoundTrace]) -> BatchSummary:
    traces = list(traces)
    if not traces:
        raise DomainError("no traces to summarise")
    by_run: dict[int, list[float]] = {}
    for t in traces:
        by_run.setdefault(t.run, []).append(t.lambda2)
    return BatchSummary(
        pooled=describe([t.lambda2 for t in traces]),
        per_run={run: describe(vals) for run, vals in sorted(by_run.items())},
    )


def traces_to_csv(traces: Iterable[RoundTrace]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t in traces:
        writer.writerow(
            (t.run, t.round, t.phase, t.population, f"{t.lambda2:.9g}", t.swaps, int(t.disconnected))
        )
    return buf.getvalue()


def traces_from_csv(text: str) -> list[RoundTrace]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise DomainError(f"unexpected trace header {reader.fieldnames}")
    return [
        RoundTrace(
            run=int(row["run"]),
            round=int(row["round"]),
            phase=row["phase"],
            population=int(row["population"]),
            lambda2=float(row["lambda2"]),
            swaps=int(row["swaps"]),
            disconnected=row["disconnected"] == "1",
        )
        for row in reader
    ]


def summary_to_json(summary: BatchSummary, config: dict) -> str:
    doc = {
        "config": config,
        "pooled": asdict(summary.pooled),
        "per_run": [{"run": run, **asdict(s)} for run, s in summary.per_run.items()],
    }
    return json.dumps(doc, indent=2) + "\n"


def write_gnuplot(traces: Iterable[RoundTrace], prefix: Path) -> list[Path]:
    """One ``<prefix>_run<k>.dat`` file per run with ``round lambda2`` rows."""
    by_run: dict[int, list[RoundTrace]] = {}
    for t in traces:
        by_run.setdefault(t.run, []).append(t)
    paths = []
    for run, rows in sorted(by_run.items()):
        path = prefix.with_name(f"{prefix.name}_run{run:03d}.dat")
        lines = ["# round lambda2\n"] + [f"{t.round} {t.lambda2:.9g}\n" for t in rows]
        path.write_text("".join(lines))
        paths.append(path)
    return paths
