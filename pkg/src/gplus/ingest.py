"""Load O*NET-style tab-separated files and subtask ledgers into an immutable Dataset.

Every file is UTF-8, tab-separated, with a header row naming its columns.
Extra columns are ignored; missing required columns are a ParseError.
"""

from __future__ import annotations

import datetime as dt
import enum
import logging
import math
import os
import re
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    BadDate,
    DimensionError,
    IntegrityError,
    MalformedLabel,
    ParseError,
    PrimitiveCountWarning,
    UnknownKey,
)
from .fingerprint import MAX_LEVEL, MIN_LEVEL, Fingerprint
from .labels import ContentModelLabel, LabelLevel, parse_content_model_label

log = logging.getLogger(__name__)

DEFAULT_KIND_COUNTS = {"Skill": 33, "Ability": 52, "Knowledge": 35}

_SOC_RE = re.compile(r"\d{2}-\d{4}\.\d{2}")


class PrimitiveKind(enum.Enum):
    SKILL = "Skill"
    ABILITY = "Ability"
    KNOWLEDGE = "Knowledge"

    @property
    def order(self) -> int:
        return _KIND_ORDER[self]


_KIND_ORDER = {PrimitiveKind.SKILL: 0, PrimitiveKind.ABILITY: 1, PrimitiveKind.KNOWLEDGE: 2}


class TaskCategory(enum.Enum):
    CORE = "Core"
    SUPPLEMENTAL = "Supplemental"


class ControlMode(enum.Enum):
    ANALOGOUS_TELEOP = "AnalogousTeleop"
    AUTONOMOUS = "Autonomous"

    @classmethod
    def parse(cls, text: str) -> ControlMode:
        key = text.strip().lower().replace("_", "").replace("-", "").replace(" ", "")
        try:
            return _MODE_ALIASES[key]
        except KeyError:
            raise ValueError(f"unknown control mode {text!r}") from None

    @property
    def short(self) -> str:
        return "teleop" if self is ControlMode.ANALOGOUS_TELEOP else "autonomous"


_MODE_ALIASES = {
    "analogousteleop": ControlMode.ANALOGOUS_TELEOP,
    "analogousteleoperation": ControlMode.ANALOGOUS_TELEOP,
    "teleop": ControlMode.ANALOGOUS_TELEOP,
    "autonomous": ControlMode.AUTONOMOUS,
}


@dataclass(frozen=True)
class WorkPrimitive:
    element_id: str
    kind: PrimitiveKind
    name: str
    index: int


@dataclass(frozen=True)
class Occupation:
    soc_code: str
    title: str
    fingerprint: Fingerprint
    task_ids: tuple[int, ...]


@dataclass(frozen=True)
class TaskStatement:
    task_id: int
    text: str
    occupation_code: str
    importance: float
    category: TaskCategory
    dwa_labels: tuple[ContentModelLabel, ...]


@dataclass(frozen=True)
class WorkActivity:
    label: ContentModelLabel
    title: str
    level: LabelLevel
    parent_label: ContentModelLabel | None


@dataclass(frozen=True)
class SubtaskRecord:
    subtask_id: str
    description: str
    fingerprint: Fingerprint
    type_tag: str
    first_success_date: dt.date
    control_mode: ControlMode
    succeeded: bool


@dataclass(frozen=True)
class Dataset:
    primitives: tuple[WorkPrimitive, ...]
    occupations: Mapping[str, Occupation]
    tasks: Mapping[int, TaskStatement]
    activities: Mapping[str, WorkActivity]
    task_to_dwa: Mapping[int, tuple[str, ...]]
    dwa_to_occupations: Mapping[str, tuple[str, ...]]
    primitive_index: Mapping[str, int] = field(compare=False, repr=False)

    __hash__ = None  # mapping fields are unhashable

    @property
    def dim(self) -> int:
        return len(self.primitives)

    def counts(self) -> dict[str, int]:
        return {
            "primitives": len(self.primitives),
            "occupations": len(self.occupations),
            "tasks": len(self.tasks),
            "activities": len(self.activities),
            "task_dwa_links": sum(len(v) for v in self.task_to_dwa.values()),
        }

    def kind_counts(self) -> dict[str, int]:
        out = {k.value: 0 for k in PrimitiveKind}
        for p in self.primitives:
            out[p.kind.value] += 1
        return out

    def activity_counts(self) -> dict[str, int]:
        by_level: dict[LabelLevel, int] = defaultdict(int)
        for act in self.activities.values():
            by_level[act.level] += 1
        return {level.display: by_level[level] for level in sorted(by_level)}

    def detailed_activities(self) -> list[str]:
        return sorted(k for k, a in self.activities.items() if a.level is LabelLevel.DETAILED)

    def kind_ordinal(self, index: int) -> tuple[PrimitiveKind, int]:
        """Kind and 1-based position within that kind, e.g. (ABILITY, 39)."""
        prim = self.primitives[index]
        first = next(p.index for p in self.primitives if p.kind is prim.kind)
        return prim.kind, index - first + 1

    def describe_primitive(self, index: int) -> str:
        kind, ordinal = self.kind_ordinal(index)
        return f"{kind.value} {ordinal} ({self.primitives[index].name})"

    def occupation_by_title(self, title: str) -> Occupation:
        wanted = title.casefold()
        hits = [o for o in self.occupations.values() if o.title.casefold() == wanted]
        if len(hits) != 1:
            raise UnknownKey(f"{len(hits)} occupations titled {title!r}")
        return hits[0]

    def occupation_fingerprints(self) -> dict[str, Fingerprint]:
        return {soc: occ.fingerprint for soc, occ in self.occupations.items()}


# --- in-memory assembly -------------------------------------------------------


def build_dataset(
    primitives: Sequence[tuple[str, str, str]],
    occupations: Sequence[tuple[str, str]],
    ratings: Iterable[tuple[str, str, float]],
    tasks: Sequence[tuple[int, str, float, str, str]],
    task_dwa: Iterable[tuple[int, str]],
    activities: Sequence[tuple[str, str]],
) -> Dataset:
    """Validate and cross-link already-parsed rows.

    Row tuples follow the column order of the corresponding TSV files.
    Raises IntegrityError or DimensionError; row-level syntax is the
    reader's job.
    """
    prims = _build_primitives(primitives)
    prim_index = {p.element_id: p.index for p in prims}
    dim = len(prims)

    titles: dict[str, str] = {}
    for soc, title in occupations:
        if soc in titles:
            raise IntegrityError(f"duplicate occupation soc_code {soc}")
        titles[soc] = title

    levels = {soc: np.full(dim, np.nan) for soc in titles}
    for soc, element_id, level in ratings:
        if soc not in levels:
            raise IntegrityError(f"rating references unknown soc_code {soc}")
        if element_id not in prim_index:
            raise IntegrityError(f"rating for {soc} references unknown element_id {element_id}")
        i = prim_index[element_id]
        if not math.isnan(levels[soc][i]):
            raise IntegrityError(f"duplicate rating for {soc} / {element_id}")
        levels[soc][i] = level
    for soc, arr in levels.items():
        missing = np.flatnonzero(np.isnan(arr))
        if missing.size:
            ids = ", ".join(prims[i].element_id for i in missing[:5])
            more = f" (+{missing.size - 5} more)" if missing.size > 5 else ""
            raise DimensionError(f"occupation {soc} has no level for {ids}{more}")

    acts = _build_activities(activities)

    task_rows: dict[int, tuple[str, float, TaskCategory, str]] = {}
    for task_id, soc, importance, category, text in tasks:
        if task_id in task_rows:
            raise IntegrityError(f"duplicate task_id {task_id}")
        if soc not in titles:
            raise IntegrityError(f"task {task_id} references unknown soc_code {soc}")
        task_rows[task_id] = (soc, importance, TaskCategory(category), text)

    links: dict[int, list[str]] = defaultdict(list)
    for task_id, label in task_dwa:
        if task_id not in task_rows:
            raise IntegrityError(f"task_dwa references unknown task_id {task_id}")
        if label not in acts:
            raise IntegrityError(f"task_dwa references unknown activity {label}")
        if acts[label].level is not LabelLevel.DETAILED:
            raise IntegrityError(f"task_dwa label {label} is not a detailed work activity")
        if label in links[task_id]:
            raise IntegrityError(f"duplicate task_dwa link {task_id} -> {label}")
        links[task_id].append(label)

    task_map: dict[int, TaskStatement] = {}
    by_soc: dict[str, list[int]] = defaultdict(list)
    dwa_occ: dict[str, set[str]] = defaultdict(set)
    for task_id in sorted(task_rows):
        soc, importance, category, text = task_rows[task_id]
        labels = tuple(sorted(links.get(task_id, ())))
        task_map[task_id] = TaskStatement(
            task_id=task_id,
            text=text,
            occupation_code=soc,
            importance=importance,
            category=category,
            dwa_labels=tuple(acts[lb].label for lb in labels),
        )
        by_soc[soc].append(task_id)
        for lb in labels:
            dwa_occ[lb].add(soc)

    occ_map = {
        soc: Occupation(
            soc_code=soc,
            title=titles[soc],
            fingerprint=Fingerprint(levels[soc]),
            task_ids=tuple(by_soc.get(soc, ())),
        )
        for soc in sorted(titles)
    }

    return Dataset(
        primitives=tuple(prims),
        occupations=MappingProxyType(occ_map),
        tasks=MappingProxyType(task_map),
        activities=MappingProxyType(dict(sorted(acts.items()))),
        task_to_dwa=MappingProxyType(
            {t: tuple(lb.raw for lb in task_map[t].dwa_labels) for t in task_map}
        ),
        dwa_to_occupations=MappingProxyType(
            {lb: tuple(sorted(socs)) for lb, socs in sorted(dwa_occ.items())}
        ),
        primitive_index=MappingProxyType(prim_index),
    )


def _build_primitives(rows: Sequence[tuple[str, str, str]]) -> list[WorkPrimitive]:
    seen: set[str] = set()
    staged = []
    for pos, (element_id, kind, name) in enumerate(rows):
        if element_id in seen:
            raise IntegrityError(f"duplicate primitive element_id {element_id}")
        seen.add(element_id)
        staged.append((PrimitiveKind(kind).order, pos, element_id, PrimitiveKind(kind), name))
    if not staged:
        raise DimensionError("no work primitives defined")
    staged.sort()
    prims = [WorkPrimitive(eid, kind, name, i) for i, (_, _, eid, kind, name) in enumerate(staged)]

    counts = {k: 0 for k in DEFAULT_KIND_COUNTS}
    for p in prims:
        counts[p.kind.value] += 1
    if counts != DEFAULT_KIND_COUNTS:
        warnings.warn(
            f"primitive counts {counts} differ from the O*NET default {DEFAULT_KIND_COUNTS}",
            PrimitiveCountWarning,
            stacklevel=3,
        )
    return prims


def _build_activities(rows: Sequence[tuple[str, str]]) -> dict[str, WorkActivity]:
    parsed: dict[str, tuple[ContentModelLabel, str]] = {}
    for raw, title in rows:
        if raw in parsed:
            raise IntegrityError(f"duplicate activity label {raw}")
        label = parse_content_model_label(raw)
        if label.path[0] != "4" or label.level is LabelLevel.PRIMITIVE_LEAF:
            raise IntegrityError(f"activity label {raw} is not in the work-activity domain")
        parsed[raw] = (label, title)

    acts = {}
    for raw, (label, title) in parsed.items():
        parent = label.parent
        if parent is not None and parent.raw not in parsed:
            if label.level > LabelLevel.MAJOR_DIVISION:
                raise IntegrityError(f"activity {raw} has no parent {parent.raw} in the hierarchy")
            parent = None
        acts[raw] = WorkActivity(label=label, title=title, level=label.level, parent_label=parent)
    return acts


# --- file readers -------------------------------------------------------------

DATA_FILES = {
    "primitives": ("primitives.tsv", ("element_id", "kind", "name")),
    "occupations": ("occupations.tsv", ("soc_code", "title")),
    "ratings": ("ratings.tsv", ("soc_code", "element_id", "level")),
    "tasks": ("tasks.tsv", ("task_id", "soc_code", "importance", "category", "text")),
    "task_dwa": ("task_dwa.tsv", ("task_id", "dwa_label")),
    "activities": ("activities.tsv", ("label", "title")),
}
LEDGER_COLUMNS = (
    "subtask_id", "description", "type_tag", "first_success_date",
    "control_mode", "succeeded", "fingerprint",
)


def read_tsv(path: str | os.PathLike, required: Sequence[str]) -> Iterator[tuple[int, dict[str, str]]]:
    """Yield ``(line_number, row)`` for each data row of a headed TSV file."""
    path = os.fspath(path)
    with open(path, encoding="utf-8", newline="") as fh:
        header_line = fh.readline()
        if not header_line:
            raise ParseError("missing header row", path, 1)
        header = header_line.rstrip("\r\n").split("\t")
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"header lacks required column(s) {', '.join(missing)}", path, 1)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != len(header):
                raise ParseError(
                    f"expected {len(header)} fields, found {len(fields)}", path, lineno)
            yield lineno, dict(zip(header, fields))


def _field(row: dict[str, str], name: str, path: str, lineno: int) -> str:
    value = row[name].strip()
    if not value:
        raise ParseError(f"empty {name}", path, lineno)
    return value


def _parse_level(text: str, path: str, lineno: int) -> float:
    try:
        level = float(text)
    except ValueError:
        raise ParseError(f"level {text!r} is not a number", path, lineno) from None
    if not (MIN_LEVEL <= level <= MAX_LEVEL):
        raise ParseError(f"level {text} outside [0, 7]", path, lineno)
    return level


def _parse_soc(text: str, path: str, lineno: int) -> str:
    if not _SOC_RE.fullmatch(text):
        raise ParseError(f"soc_code {text!r} is not of the form NN-NNNN.NN", path, lineno)
    return text


def _parse_task_id(text: str, path: str, lineno: int) -> int:
    if not text.isdigit() or int(text) <= 0:
        raise ParseError(f"task_id {text!r} is not a positive integer", path, lineno)
    return int(text)


def _parse_label(text: str, path: str, lineno: int) -> str:
    try:
        return parse_content_model_label(text).raw
    except MalformedLabel as exc:
        raise ParseError(str(exc), path, lineno) from None


def _read_primitives(path):
    rows = []
    for lineno, row in read_tsv(path, DATA_FILES["primitives"][1]):
        element_id = _parse_label(_field(row, "element_id", path, lineno), path, lineno)
        kind = _field(row, "kind", path, lineno).capitalize()
        if kind not in DEFAULT_KIND_COUNTS:
            raise ParseError(f"kind {row['kind']!r} is not Skill, Ability or Knowledge", path, lineno)
        rows.append((element_id, kind, _field(row, "name", path, lineno)))
    return rows


def _read_occupations(path):
    return [
        (_parse_soc(_field(row, "soc_code", path, n), path, n), _field(row, "title", path, n))
        for n, row in read_tsv(path, DATA_FILES["occupations"][1])
    ]


def _read_ratings(path):
    return [
        (
            _parse_soc(_field(row, "soc_code", path, n), path, n),
            _field(row, "element_id", path, n),
            _parse_level(_field(row, "level", path, n), path, n),
        )
        for n, row in read_tsv(path, DATA_FILES["ratings"][1])
    ]


def _read_tasks(path):
    rows = []
    for n, row in read_tsv(path, DATA_FILES["tasks"][1]):
        task_id = _parse_task_id(_field(row, "task_id", path, n), path, n)
        soc = _parse_soc(_field(row, "soc_code", path, n), path, n)
        text = _field(row, "importance", path, n)
        try:
            importance = float(text)
        except ValueError:
            raise ParseError(f"importance {text!r} is not a number", path, n) from None
        if not (0.0 <= importance <= 100.0):
            raise ParseError(f"importance {text} outside [0, 100]", path, n)
        category = _field(row, "category", path, n).capitalize()
        if category not in ("Core", "Supplemental"):
            raise ParseError(f"category {row['category']!r} is not Core or Supplemental", path, n)
        rows.append((task_id, soc, importance, category, _field(row, "text", path, n)))
    return rows


def _read_task_dwa(path):
    return [
        (
            _parse_task_id(_field(row, "task_id", path, n), path, n),
            _parse_label(_field(row, "dwa_label", path, n), path, n),
        )
        for n, row in read_tsv(path, DATA_FILES["task_dwa"][1])
    ]


def _read_activities(path):
    return [
        (_parse_label(_field(row, "label", path, n), path, n), _field(row, "title", path, n))
        for n, row in read_tsv(path, DATA_FILES["activities"][1])
    ]


def data_paths(directory: str | os.PathLike) -> dict[str, str]:
    """Standard file names inside a data directory, keyed by entity kind."""
    return {kind: os.path.join(os.fspath(directory), name) for kind, (name, _) in DATA_FILES.items()}


def load_dataset(paths: Mapping[str, str | os.PathLike] | str | os.PathLike) -> Dataset:
    """Load a Dataset from a data directory or an explicit ``{kind: path}`` mapping."""
    if not isinstance(paths, Mapping):
        paths = data_paths(paths)
    missing = [k for k in DATA_FILES if k not in paths]
    if missing:
        raise ParseError(f"no path given for {', '.join(missing)}")
    p = {k: os.fspath(v) for k, v in paths.items()}
    dataset = build_dataset(
        primitives=_read_primitives(p["primitives"]),
        occupations=_read_occupations(p["occupations"]),
        ratings=_read_ratings(p["ratings"]),
        tasks=_read_tasks(p["tasks"]),
        task_dwa=_read_task_dwa(p["task_dwa"]),
        activities=_read_activities(p["activities"]),
    )
    log.info("loaded dataset: %s", dataset.counts())
    return dataset


# --- subtask ledger -------------------------------------------------------------

_TRUE = {"true", "yes", "y", "1"}
_FALSE = {"false", "no", "n", "0"}


def parse_packed_fingerprint(text: str, dataset: Dataset) -> Fingerprint:
    """Decode a ledger fingerprint field.

    Either sparse ``element_id=level`` pairs separated by semicolons (unlisted
    dimensions are 0) or a dense semicolon-separated list of exactly D levels.
    """
    text = text.strip()
    levels = np.zeros(dataset.dim)
    if not text:
        return Fingerprint(levels)
    parts = [s.strip() for s in text.split(";") if s.strip()]
    if all("=" not in s for s in parts):
        if len(parts) != dataset.dim:
            raise DimensionError(f"dense fingerprint has {len(parts)} levels, expected {dataset.dim}")
        for i, s in enumerate(parts):
            levels[i] = _level_or_value_error(s)
        return Fingerprint(levels)
    seen = set()
    for s in parts:
        element_id, sep, value = s.partition("=")
        element_id = element_id.strip()
        if not sep:
            raise ValueError(f"fingerprint entry {s!r} is not element_id=level")
        if element_id not in dataset.primitive_index:
            raise DimensionError(f"fingerprint names unknown dimension {element_id}")
        if element_id in seen:
            raise ValueError(f"fingerprint lists {element_id} twice")
        seen.add(element_id)
        levels[dataset.primitive_index[element_id]] = _level_or_value_error(value)
    return Fingerprint(levels)


def _level_or_value_error(text: str) -> float:
    level = float(text)
    if not (MIN_LEVEL <= level <= MAX_LEVEL):
        raise ValueError(f"level {text} outside [0, 7]")
    return level


def load_subtask_ledger(path: str | os.PathLike, dataset: Dataset) -> list[SubtaskRecord]:
    """Read a subtask ledger; records come back sorted by (date, subtask_id)."""
    path = os.fspath(path)
    records = []
    seen: set[tuple[str, ControlMode]] = set()
    for n, row in read_tsv(path, LEDGER_COLUMNS):
        subtask_id = _field(row, "subtask_id", path, n)
        date_text = _field(row, "first_success_date", path, n)
        try:
            date = dt.date.fromisoformat(date_text)
        except ValueError:
            raise BadDate(f"first_success_date {date_text!r} is not an ISO-8601 date", path, n) from None
        try:
            mode = ControlMode.parse(_field(row, "control_mode", path, n))
        except ValueError as exc:
            raise ParseError(str(exc), path, n) from None
        flag = _field(row, "succeeded", path, n).lower()
        if flag not in _TRUE | _FALSE:
            raise ParseError(f"succeeded {row['succeeded']!r} is not a boolean", path, n)
        try:
            fp = parse_packed_fingerprint(row["fingerprint"], dataset)
        except DimensionError as exc:
            raise DimensionError(f"{path}:{n}: {exc}") from None
        except ValueError as exc:
            raise ParseError(str(exc), path, n) from None
        if (subtask_id, mode) in seen:
            raise IntegrityError(f"{path}:{n}: duplicate record for {subtask_id} / {mode.value}")
        seen.add((subtask_id, mode))
        records.append(SubtaskRecord(
            subtask_id=subtask_id,
            description=row["description"].strip(),
            fingerprint=fp,
            type_tag=_field(row, "type_tag", path, n),
            first_success_date=date,
            control_mode=mode,
            succeeded=flag in _TRUE,
        ))
    records.sort(key=lambda r: (r.first_success_date, r.subtask_id, r.control_mode.value))
    return records
