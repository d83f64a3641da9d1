"""Fingerprint algebra: componentwise max merge, dominance checks, and the g+ score.

A fingerprint is a fixed-length vector of levels in ``[0, 7]``.  Subtask
fingerprints hold minimum requirements; work fingerprints hold demonstrated
capability.  Both live in the same space so they can be compared directly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInput

MIN_LEVEL = 0.0
MAX_LEVEL = 7.0
DEFAULT_DIM = 120
REFERENCE_NORM_CONSTANT = 267.3


class Fingerprint:
    """Immutable vector of primitive levels."""

    __slots__ = ("_levels",)

    def __init__(self, levels: Iterable[float]):
        arr = np.array(list(levels) if not isinstance(levels, np.ndarray) else levels,
                       dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("fingerprint levels must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("fingerprint levels must be finite")
        if arr.min() < MIN_LEVEL or arr.max() > MAX_LEVEL:
            bad = int(np.flatnonzero((arr < MIN_LEVEL) | (arr > MAX_LEVEL))[0])
            raise ValueError(f"level {arr[bad]!r} at index {bad} is outside [0, 7]")
        arr.flags.writeable = False
        self._levels = arr

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> Fingerprint:
        # skips validation; caller guarantees a fresh in-range float64 vector
        fp = cls.__new__(cls)
        arr.flags.writeable = False
        fp._levels = arr
        return fp

    @classmethod
    def zeros(cls, dim: int = DEFAULT_DIM) -> Fingerprint:
        return cls._trusted(np.zeros(dim))

    @classmethod
    def full(cls, level: float = MAX_LEVEL, dim: int = DEFAULT_DIM) -> Fingerprint:
        return cls(np.full(dim, float(level)))

    @property
    def levels(self) -> np.ndarray:
        return self._levels

    @property
    def dim(self) -> int:
        return self._levels.size

    def total(self) -> float:
        return math.fsum(self._levels)

    def tolist(self) -> list[float]:
        return self._levels.tolist()

    def __len__(self) -> int:
        return self._levels.size

    def __getitem__(self, index: int) -> float:
        return float(self._levels[index])

    def __iter__(self) -> Iterator[float]:
        return iter(self._levels.tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return np.array_equal(self._levels, other._levels)

    def __hash__(self) -> int:
        return hash(self._levels.tobytes())

    def __repr__(self) -> str:
        nonzero = int(np.count_nonzero(self._levels))
        return f"Fingerprint(dim={self.dim}, total={self.total():.4g}, nonzero={nonzero})"


class NormMode(enum.Enum):
    PINNED = "pinned"
    DERIVED_FROM_OCCUPATIONS = "derived"


class Comparison(enum.Enum):
    MEETS_MINIMUM = "meets"
    STRICTLY_GREATER = "strict"


@dataclass(frozen=True)
class GPlusConfig:
    """Settings that govern every score and comparison.

    ``norm_constant`` is the occupation-mean level sum that maps to g+ 100.
    Under ``NormMode.DERIVED_FROM_OCCUPATIONS`` it is recomputed from the
    loaded occupations by :meth:`resolved`.
    """

    norm_constant: float = REFERENCE_NORM_CONSTANT
    norm_mode: NormMode = NormMode.PINNED
    comparison: Comparison = Comparison.MEETS_MINIMUM
    epsilon: float = 1e-9

    def __post_init__(self):
        if not (self.norm_constant > 0 and math.isfinite(self.norm_constant)):
            raise ValueError(f"norm_constant must be positive, got {self.norm_constant!r}")
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon!r}")

    def resolved(self, occupation_fps: Sequence[Fingerprint]) -> GPlusConfig:
        if self.norm_mode is NormMode.PINNED:
            return self
        return replace(self, norm_constant=derive_norm_constant(occupation_fps))

    def echo(self) -> dict:
        return {
            "norm_constant": self.norm_constant,
            "norm_mode": self.norm_mode.value,
            "comparison": self.comparison.value,
            "epsilon": self.epsilon,
        }


DEFAULT_CONFIG = GPlusConfig()


class Deficit(NamedTuple):
    index: int
    required: float
    available: float
    deficit: float


@dataclass(frozen=True)
class ShortfallReport:
    performable: bool
    deficits: tuple[Deficit, ...]


def _check_dims(fps: Sequence[Fingerprint]) -> int:
    dim = fps[0].dim
    for fp in fps[1:]:
        if fp.dim != dim:
            raise DimensionMismatch(f"fingerprint dimensions differ: {dim} vs {fp.dim}")
    return dim


def merge(fps: Sequence[Fingerprint]) -> Fingerprint:
    """Componentwise maximum over a non-empty collection of fingerprints."""
    fps = list(fps)
    if not fps:
        raise EmptyInput("merge needs at least one fingerprint")
    _check_dims(fps)
    return Fingerprint._trusted(np.max(np.stack([fp.levels for fp in fps]), axis=0))


def componentwise_min(fps: Sequence[Fingerprint]) -> Fingerprint:
    fps = list(fps)
    if not fps:
        raise EmptyInput("componentwise_min needs at least one fingerprint")
    _check_dims(fps)
    return Fingerprint._trusted(np.min(np.stack([fp.levels for fp in fps]), axis=0))


def gplus(fp: Fingerprint, config: GPlusConfig = DEFAULT_CONFIG) -> float:
    """Sum of levels scaled so that a level sum of ``norm_constant`` scores 100."""
    return fp.total() * 100.0 / config.norm_constant


def derive_norm_constant(occupation_fps: Sequence[Fingerprint]) -> float:
    sums = [fp.total() for fp in occupation_fps]
    if not sums:
        raise EmptyInput("cannot derive a normalization constant from no occupations")
    return math.fsum(sums) / len(sums)


def satisfied_mask(work: np.ndarray, required: np.ndarray, config: GPlusConfig) -> np.ndarray:
    """Boolean array: which requirement levels the work levels satisfy.

    Broadcasts, so ``required`` may be a stack of fingerprints.
    """
    if config.comparison is Comparison.MEETS_MINIMUM:
        return required <= work + config.epsilon
    # a zero requirement is no requirement, even in strict mode
    return (required == 0.0) | (work - required > config.epsilon)


def performable(work_fp: Fingerprint, subtask_fp: Fingerprint,
                config: GPlusConfig = DEFAULT_CONFIG) -> ShortfallReport:
    _check_dims([work_fp, subtask_fp])
    ok = satisfied_mask(work_fp.levels, subtask_fp.levels, config)
    deficits = tuple(
        Deficit(int(i), float(subtask_fp.levels[i]), float(work_fp.levels[i]),
                float(subtask_fp.levels[i] - work_fp.levels[i]))
        for i in np.flatnonzero(~ok)
    )
    return ShortfallReport(performable=not deficits, deficits=deficits)


def display_round(value: float) -> str:
    """One-decimal display string, rounding halves away from zero (314.25 -> 314.3)."""
    return str(Decimal(repr(float(value))).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))
