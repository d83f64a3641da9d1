"""Parser for O*NET content-model labels such as ``4.A.1.a.1.I14.D02``.

The dotted grammar alternates segment shapes::

    domain . Letter . number . letter . number [ . I## [ . D## ] ]

The level of a label is fixed by how far along that grammar it reaches.
Labels outside the work-activity domain (``4``) with four or more segments
name worker attributes (skills, abilities, knowledge) and are classified as
primitive leaves; intermediate and detailed suffixes exist only under the
work-activity domain.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import MalformedLabel

WORK_ACTIVITY_DOMAIN = "4"

_SEGMENT_PATTERNS = (
    ("domain digit", re.compile(r"[1-9]")),
    ("upper-case letter", re.compile(r"[A-Z]")),
    ("number", re.compile(r"[1-9][0-9]*")),
    ("lower-case letter", re.compile(r"[a-z]")),
    ("number", re.compile(r"[1-9][0-9]*")),
)
_INTERMEDIATE = re.compile(r"I[0-9]{2}")
_DETAILED = re.compile(r"D[0-9]{2}")


class LabelLevel(enum.IntEnum):
    """Hierarchy levels, ordered from most general to most specific."""

    TOP_LEVEL = 0
    MAJOR_DIVISION = 1
    MID_DIVISION = 2
    GENERAL_ACTIVITY = 3
    INTERMEDIATE = 4
    DETAILED = 5
    PRIMITIVE_LEAF = 6

    @property
    def display(self) -> str:
        return "".join(part.capitalize() for part in self.name.split("_"))


_LEVEL_BY_BASE_LENGTH = {
    2: LabelLevel.TOP_LEVEL,
    3: LabelLevel.MAJOR_DIVISION,
    4: LabelLevel.MID_DIVISION,
    5: LabelLevel.GENERAL_ACTIVITY,
}


@dataclass(frozen=True, order=True)
class ContentModelLabel:
    raw: str
    path: tuple[str, ...]
    level: LabelLevel

    def __str__(self) -> str:
        return self.raw

    def serialize(self) -> str:
        return ".".join(self.path)

    @property
    def parent(self) -> ContentModelLabel | None:
        """The label one step up the hierarchy, or None at the top."""
        if len(self.path) <= 2:
            return None
        return parse_content_model_label(".".join(self.path[:-1]))


def parse_content_model_label(raw: str) -> ContentModelLabel:
    if not isinstance(raw, str) or not raw:
        raise MalformedLabel("label must be a non-empty string")
    if not raw.isascii():
        raise MalformedLabel(f"label {raw!r} contains non-ASCII characters")
    segments = raw.split(".")
    if any(seg == "" for seg in segments):
        raise MalformedLabel(f"label {raw!r} has an empty segment")
    if len(segments) < 2:
        raise MalformedLabel(f"label {raw!r} needs at least a domain and a letter segment")

    base_len = 0
    for seg, (what, pattern) in zip(segments, _SEGMENT_PATTERNS):
        if not pattern.fullmatch(seg):
            if _INTERMEDIATE.fullmatch(seg) or _DETAILED.fullmatch(seg):
                break
            raise MalformedLabel(
                f"label {raw!r}: segment {base_len + 1} ({seg!r}) should be a {what}"
            )
        base_len += 1

    rest = segments[base_len:]
    if base_len < 2:
        raise MalformedLabel(f"label {raw!r} is too short")
    if rest:
        if base_len != 5:
            raise MalformedLabel(
                f"label {raw!r}: I/D segments may only follow a five-segment general activity"
            )
        if segments[0] != WORK_ACTIVITY_DOMAIN:
            raise MalformedLabel(
                f"label {raw!r}: I/D segments only exist in the work-activity domain"
            )
        if not _INTERMEDIATE.fullmatch(rest[0]):
            raise MalformedLabel(
                f"label {raw!r}: expected an I-prefixed two-digit segment, got {rest[0]!r}"
            )
        if len(rest) == 2 and not _DETAILED.fullmatch(rest[1]):
            raise MalformedLabel(
                f"label {raw!r}: expected a D-prefixed two-digit segment, got {rest[1]!r}"
            )
        if len(rest) > 2:
            raise MalformedLabel(f"label {raw!r} has trailing segments after the D segment")
        level = LabelLevel.INTERMEDIATE if len(rest) == 1 else LabelLevel.DETAILED
    elif segments[0] != WORK_ACTIVITY_DOMAIN and base_len >= 4:
        level = LabelLevel.PRIMITIVE_LEAF
    else:
        level = _LEVEL_BY_BASE_LENGTH[base_len]

    return ContentModelLabel(raw=raw, path=tuple(segments), level=level)
