"""Work-fingerprint inference from subtask portfolios, timelines and trend forecasts."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .bounds import BoundSet
from .errors import DimensionMismatch, InsufficientData
from .fingerprint import (
    DEFAULT_CONFIG,
    DEFAULT_DIM,
    MAX_LEVEL,
    Fingerprint,
    GPlusConfig,
    gplus,
    merge,
    satisfied_mask,
)
from .ingest import ControlMode, Dataset, SubtaskRecord

DAYS_PER_MONTH = 30.4375


@dataclass(frozen=True)
class PortfolioEvaluation:
    work_fingerprint: Fingerprint
    gplus_score: float
    contributing: tuple[str, ...]
    as_of: dt.date | None
    mode: ControlMode | None


@dataclass(frozen=True)
class TimelinePoint:
    date: dt.date
    gplus_score: float
    performable_task_count: int


@dataclass(frozen=True)
class TrendForecast:
    slope: float
    intercept: float
    current_score: float
    saturation_target: float
    months_to_saturation: float | None


@dataclass(frozen=True)
class PerformableTask:
    task_id: Hashable
    text: str | None = None
    occupation: str | None = None


@dataclass(frozen=True)
class PerformableTasks:
    count: int
    tasks: tuple[PerformableTask, ...]


def select_records(records: Sequence[SubtaskRecord], mode: ControlMode | None = None,
                   as_of: dt.date | None = None) -> list[SubtaskRecord]:
    """Succeeded records matching ``mode`` (any mode if None) dated on or before ``as_of``."""
    return [
        r for r in records
        if r.succeeded
        and (mode is None or r.control_mode is mode)
        and (as_of is None or r.first_success_date <= as_of)
    ]


def evaluate_portfolio(
    records: Sequence[SubtaskRecord],
    mode: ControlMode | None = None,
    as_of: dt.date | None = None,
    config: GPlusConfig = DEFAULT_CONFIG,
    *,
    dim: int | None = None,
) -> PortfolioEvaluation:
    """Merge the fingerprints of every selected record into a work fingerprint.

    ``dim`` fixes the dimension of the all-zeros result when ``records`` is
    empty; otherwise it is taken from the records.
    """
    if records:
        d = records[0].fingerprint.dim
        for r in records:
            if r.fingerprint.dim != d:
                raise DimensionMismatch(
                    f"record {r.subtask_id} has dimension {r.fingerprint.dim}, expected {d}")
        if dim is not None and dim != d:
            raise DimensionMismatch(f"records have dimension {d}, expected {dim}")
        dim = d
    elif dim is None:
        dim = DEFAULT_DIM

    chosen = select_records(records, mode, as_of)
    if chosen:
        work = merge([r.fingerprint for r in chosen])
    else:
        work = Fingerprint.zeros(dim)
    return PortfolioEvaluation(
        work_fingerprint=work,
        gplus_score=gplus(work, config),
        contributing=tuple(r.subtask_id for r in chosen),
        as_of=as_of,
        mode=mode,
    )


class _TaskMatrix:
    """Task bounds stacked into one array for vectorized dominance checks."""

    def __init__(self, task_bounds: BoundSet | Mapping[Hashable, Fingerprint]):
        bounds = task_bounds.bounds if isinstance(task_bounds, BoundSet) else task_bounds
        self.keys = sorted(bounds)
        if self.keys:
            self.matrix = np.stack([bounds[k].levels for k in self.keys])
        else:
            self.matrix = np.zeros((0, 0))

    def performable(self, work_fp: Fingerprint, config: GPlusConfig) -> np.ndarray:
        if not self.keys:
            return np.zeros(0, dtype=bool)
        if self.matrix.shape[1] != work_fp.dim:
            raise DimensionMismatch(
                f"task bounds have dimension {self.matrix.shape[1]}, work fingerprint {work_fp.dim}")
        return satisfied_mask(work_fp.levels, self.matrix, config).all(axis=1)


def count_performable(
    work_fp: Fingerprint,
    task_bounds: BoundSet | Mapping[Hashable, Fingerprint],
    config: GPlusConfig = DEFAULT_CONFIG,
    dataset: Dataset | None = None,
) -> PerformableTasks:
    """Tasks whose bound fingerprint the work fingerprint dominates, sorted by task id.

    Pass ``dataset`` to attach task text and occupation titles.
    """
    tm = _TaskMatrix(task_bounds)
    hits = [tm.keys[i] for i in np.flatnonzero(tm.performable(work_fp, config))]
    items = []
    for task_id in hits:
        if dataset is not None and task_id in dataset.tasks:
            task = dataset.tasks[task_id]
            items.append(PerformableTask(task_id, task.text,
                                         dataset.occupations[task.occupation_code].title))
        else:
            items.append(PerformableTask(task_id))
    return PerformableTasks(count=len(items), tasks=tuple(items))


def build_timeline(
    records: Sequence[SubtaskRecord],
    mode: ControlMode | None,
    task_bounds: BoundSet | Mapping[Hashable, Fingerprint] | None,
    config: GPlusConfig = DEFAULT_CONFIG,
) -> list[TimelinePoint]:
    """Cumulative g+ and performable-task count at each distinct success date."""
    chosen = sorted(select_records(records, mode),
                    key=lambda r: (r.first_success_date, r.subtask_id))
    if not chosen:
        return []
    dim = chosen[0].fingerprint.dim
    for r in chosen:
        if r.fingerprint.dim != dim:
            raise DimensionMismatch(
                f"record {r.subtask_id} has dimension {r.fingerprint.dim}, expected {dim}")
    tm = _TaskMatrix(task_bounds if task_bounds is not None else {})

    points = []
    running = np.zeros(dim)
    i = 0
    while i < len(chosen):
        date = chosen[i].first_success_date
        while i < len(chosen) and chosen[i].first_success_date == date:
            np.maximum(running, chosen[i].fingerprint.levels, out=running)
            i += 1
        work = Fingerprint._trusted(running.copy())
        points.append(TimelinePoint(
            date=date,
            gplus_score=gplus(work, config),
            performable_task_count=int(tm.performable(work, config).sum()),
        ))
    return points


def saturation_target(dim: int = DEFAULT_DIM, config: GPlusConfig = DEFAULT_CONFIG) -> float:
    """g+ of the all-sevens fingerprint."""
    return gplus(Fingerprint.full(MAX_LEVEL, dim), config)


def months_between(start: dt.date, end: dt.date) -> float:
    return (end - start).days / DAYS_PER_MONTH


def fit_line(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Ordinary least-squares slope and intercept of y against x."""
    n = len(x)
    x_mean = math.fsum(x) / n
    y_mean = math.fsum(y) / n
    sxx = math.fsum((xi - x_mean) ** 2 for xi in x)
    if sxx == 0:
        raise InsufficientData("a trend fit needs at least two distinct x values")
    sxy = math.fsum((xi - x_mean) * (yi - y_mean) for xi, yi in zip(x, y))
    slope = sxy / sxx
    return slope, y_mean - slope * x_mean


def forecast(timeline: Sequence[TimelinePoint], target: float) -> TrendForecast:
    """Least-squares line of g+ against months since the first point, extrapolated to ``target``."""
    if len({p.date for p in timeline}) < 2:
        raise InsufficientData("a trend fit needs points on at least two distinct dates")
    pts = sorted(timeline, key=lambda p: p.date)
    x = [months_between(pts[0].date, p.date) for p in pts]
    y = [p.gplus_score for p in pts]
    slope, intercept = fit_line(x, y)
    current = y[-1]
    remaining = (target - current) / slope if slope > 0 else None
    return TrendForecast(
        slope=slope,
        intercept=intercept,
        current_score=current,
        saturation_target=target,
        months_to_saturation=remaining,
    )
