"""Scoring predicted changepoints against ground truth or event lists.

The headline metric is delta: the absolute day distance from a predicted
changepoint to the closest listed event. Run sets summarize into a
success-rate curve (fraction of runs with delta <= n, for every integer
threshold n normalized by the interval length) with a trapezoidal AUC,
plus mean delta and its standard error across runs.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import CandidateGrid


class EvalError(ValueError):
    """Invalid evaluation input."""


@dataclass(frozen=True)
class EventList:
    """Dated reference events inside an evaluation interval."""

    events: tuple[tuple[dt.date, str], ...]
    interval: tuple[dt.date, dt.date]

    def __post_init__(self):
        if not self.events:
            raise EvalError("event list is empty")
        dates = [d for d, _ in self.events]
        if sorted(dates) != list(dates):
            raise EvalError("events must be sorted by date")
        lo, hi = self.interval
        for d in dates:
            if not lo <= d <= hi:
                raise EvalError(f"event {d} outside interval {lo}..{hi}")

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(d for d, _ in self.events)


@dataclass(frozen=True)
class SuccessCurve:
    """Success rate at every integer day threshold 0..interval_days.

    ``thresholds`` hold the normalized values n / interval_days; ``auc``
    is the trapezoidal integral of the rate over the normalized axis.
    """

    thresholds: np.ndarray
    rates: np.ndarray
    auc: float
    interval_days: int


@dataclass(frozen=True)
class RunRecord:
    """One (dataset, seed) prediction and its delta."""

    dataset: str
    seed: int
    predicted: dt.date
    delta: int


@dataclass(frozen=True)
class EvalReport:
    """Aggregate over runs: mean/SE of delta plus the success curve."""

    per_run: tuple[RunRecord, ...]
    mean_delta: float
    se_delta: float
    curve: SuccessCurve
    one_run: bool

    @property
    def auc(self) -> float:
        return self.curve.auc


@dataclass(frozen=True)
class RandomBaseline:
    """Metrics of the every-possible-date baseline, averaged uniformly."""

    mean_delta: float
    curve: SuccessCurve
    deltas: tuple[int, ...]


def delta_days(predicted: dt.date, events: EventList) -> int:
    """Day distance from the prediction to the closest event."""
    return min(abs((predicted - d).days) for d in events.dates)


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(((y[1:] + y[:-1]) * 0.5 * np.diff(x)).sum())


def success_curve_from_deltas(
    deltas: Sequence[int], interval_days: int
) -> SuccessCurve:
    """Success-rate curve of a delta sample at thresholds n = 0..interval_days."""
    if interval_days < 1:
        raise EvalError(f"interval_days must be >= 1, got {interval_days}")
    if not len(deltas):
        raise EvalError("no runs supplied")
    d = np.asarray(deltas)
    n = np.arange(interval_days + 1)
    rates = (d[None, :] <= n[:, None]).mean(axis=1)
    thresholds = n / interval_days
    return SuccessCurve(
        thresholds=thresholds,
        rates=rates,
        auc=_trapezoid(rates, thresholds),
        interval_days=interval_days,
    )


def success_curve(
    runs: Sequence[tuple[dt.date, EventList]], interval_days: int
) -> SuccessCurve:
    """Curve and AUC for a set of (prediction, events) runs."""
    return success_curve_from_deltas(
        [delta_days(p, ev) for p, ev in runs], interval_days
    )


def random_baseline(
    grid: CandidateGrid, events: EventList, interval_days: int | None = None
) -> RandomBaseline:
    """Evaluate every candidate date as the prediction and average.

    ``interval_days`` defaults to the candidate span in days (inclusive).
    """
    deltas = tuple(delta_days(c, events) for c in grid.candidates)
    if interval_days is None:
        interval_days = (grid.candidates[-1] - grid.candidates[0]).days + 1
    return RandomBaseline(
        mean_delta=sum(deltas) / len(deltas),
        curve=success_curve_from_deltas(deltas, interval_days),
        deltas=deltas,
    )


def aggregate(records: Sequence[RunRecord], interval_days: int) -> EvalReport:
    """Combine per-run deltas into mean, standard error, and curve.

    The standard error is the ddof=1 sample deviation over sqrt(runs); a
    single run reports SE 0 with ``one_run`` set.
    """
    if not records:
        raise EvalError("no run records to aggregate")
    deltas = np.array([r.delta for r in records], dtype=float)
    n = len(deltas)
    se = float(np.std(deltas, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return EvalReport(
        per_run=tuple(records),
        mean_delta=float(deltas.mean()),
        se_delta=se,
        curve=success_curve_from_deltas([r.delta for r in records], interval_days),
        one_run=(n == 1),
    )


def load_events(
    path: str | os.PathLike, interval: tuple[dt.date, dt.date]
) -> EventList:
    """Read a CSV event file with header ``date,label``."""
    rows: list[tuple[dt.date, str]] = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "date" not in reader.fieldnames:
            raise EvalError(f"{path}: expected CSV header 'date,label'")
        for row in reader:
            rows.append((dt.date.fromisoformat(row["date"]), row.get("label") or ""))
    rows.sort(key=lambda r: r[0])
    return EventList(events=tuple(rows), interval=interval)


def write_events(events: EventList, path: str | os.PathLike) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "label"])
        for date, label in events.events:
            writer.writerow([date.isoformat(), label])


def report_to_json(report: EvalReport, extra: dict | None = None) -> str:
    """Deterministic JSON rendering of a report (no timestamps)."""
    payload = {
        "mean_delta": report.mean_delta,
        "se_delta": report.se_delta,
        "auc": report.auc,
        "one_run": report.one_run,
        "interval_days": report.curve.interval_days,
        "success_curve": [
            [float(t), float(r)]
            for t, r in zip(report.curve.thresholds, report.curve.rates)
        ],
        "per_run": [
            {
                "dataset": r.dataset,
                "seed": r.seed,
                "predicted": r.predicted.isoformat(),
                "delta": r.delta,
            }
            for r in report.per_run
        ],
    }
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2, sort_keys=True)


def write_report_csv(report: EvalReport, path: str | os.PathLike) -> None:
    """Per-run table with a trailing summary row."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "seed", "predicted", "delta"])
        for r in report.per_run:
            writer.writerow([r.dataset, r.seed, r.predicted.isoformat(), r.delta])
        writer.writerow(
            ["mean", "", "", repr(report.mean_delta)]
        )
        writer.writerow(["se", "", "", repr(report.se_delta)])
        writer.writerow(["auc", "", "", repr(report.auc)])
