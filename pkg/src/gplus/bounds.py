"""Upper-bound fingerprints for detailed work activities and tasks, plus distribution stats.

O*NET publishes fingerprints only for occupations.  A detailed work activity
cannot require more of any primitive than any occupation that performs it, so
its bound is the componentwise min over those occupations.  A task bound is the
componentwise min over the bounds of its detailed work activities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Hashable, Mapping

import numpy as np

from .errors import EmptyInput
from .fingerprint import DEFAULT_CONFIG, Fingerprint, GPlusConfig, gplus
from .ingest import Dataset


class BoundKind(enum.Enum):
    DWA = "dwa"
    TASK = "task"


@dataclass(frozen=True)
class BoundSet:
    kind: BoundKind
    bounds: Mapping[Hashable, Fingerprint]
    excluded: tuple

    __hash__ = None

    def __len__(self) -> int:
        return len(self.bounds)


def _min_of(fps: list[Fingerprint]) -> Fingerprint:
    return Fingerprint._trusted(np.min(np.stack([fp.levels for fp in fps]), axis=0))


def derive_dwa_bounds(dataset: Dataset) -> BoundSet:
    occ = dataset.occupations
    bounds = {}
    excluded = []
    for label in dataset.detailed_activities():
        socs = dataset.dwa_to_occupations.get(label, ())
        if not socs:
            excluded.append(label)
            continue
        bounds[label] = _min_of([occ[s].fingerprint for s in socs])
    return BoundSet(BoundKind.DWA, MappingProxyType(bounds), tuple(excluded))


def derive_task_bounds(dataset: Dataset, dwa_bounds: BoundSet) -> BoundSet:
    bounds = {}
    excluded = []
    for task_id, labels in dataset.task_to_dwa.items():
        parents = [dwa_bounds.bounds[lb] for lb in labels if lb in dwa_bounds.bounds]
        if not parents:
            excluded.append(task_id)
            continue
        bounds[task_id] = _min_of(parents)
    return BoundSet(BoundKind.TASK, MappingProxyType(bounds), tuple(excluded))


@dataclass(frozen=True)
class DistributionStats:
    mean: float
    std: float
    min_key: Hashable
    min_score: float
    max_key: Hashable
    max_score: float
    count: int


def stats(fps: Mapping[Hashable, Fingerprint], config: GPlusConfig = DEFAULT_CONFIG) -> DistributionStats:
    """Population mean/std of g+ over a keyed collection; extremes tie-break on the smaller key."""
    if not fps:
        raise EmptyInput("stats needs at least one fingerprint")
    keys = sorted(fps)
    scores = [gplus(fps[k], config) for k in keys]
    n = len(scores)
    mean = math.fsum(scores) / n
    std = math.sqrt(math.fsum((s - mean) ** 2 for s in scores) / n)
    lo = min(range(n), key=lambda i: (scores[i], i))
    hi = max(range(n), key=lambda i: (scores[i], -i))
    # fsum mean can land an ulp outside [min, max] for constant inputs
    mean = min(max(mean, scores[lo]), scores[hi])
    return DistributionStats(
        mean=mean, std=std,
        min_key=keys[lo], min_score=scores[lo],
        max_key=keys[hi], max_score=scores[hi],
        count=n,
    )
