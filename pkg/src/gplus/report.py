"""Serialization of analysis results into JSON or CSV report bundles.

Float fields are emitted as ``{"value": <unrounded>, "display": "<1 decimal>"}``
in JSON and as a value column plus a ``<name>_display`` column in CSV.
Integers (counts, ids, indices) are exact and emitted as-is.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from dataclasses import dataclass
from typing import Any, Sequence

from .bounds import DistributionStats
from .fingerprint import Fingerprint, ShortfallReport, display_round
from .ingest import Dataset
from .portfolio import PerformableTasks, PortfolioEvaluation, TimelinePoint, TrendForecast


def num(value: float | None) -> dict | None:
    if value is None:
        return None
    return {"value": float(value), "display": display_round(value)}


@dataclass(frozen=True)
class ReportBundle:
    report: str
    format: str
    payload: dict
    config_echo: dict
    generated_at: str | None = None
    table: tuple[Sequence[str], Sequence[Sequence[Any]]] | None = None

    def render(self) -> str:
        if self.format == "csv":
            return self._render_csv()
        doc = {
            "report": self.report,
            "generated_at": self.generated_at,
            "config": self.config_echo,
            "payload": self.payload,
        }
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def _render_csv(self) -> str:
        if self.table is None:
            raise ValueError(f"report {self.report!r} has no tabular form; use JSON")
        buf = io.StringIO()
        buf.write(f"# report={self.report}\n")
        if self.generated_at is not None:
            buf.write(f"# generated_at={self.generated_at}\n")
        for key, value in self.config_echo.items():
            buf.write(f"# {key}={value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        columns, rows = self.table
        writer.writerow(columns)
        writer.writerows(rows)
        return buf.getvalue()


def now_stamp() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def fingerprint_payload(fp: Fingerprint, dataset: Dataset) -> list[dict]:
    return [
        {
            "index": p.index,
            "element_id": p.element_id,
            "kind": p.kind.value,
            "name": p.name,
            "level": num(fp[p.index]),
        }
        for p in dataset.primitives
    ]


def shortfall_payload(report: ShortfallReport, dataset: Dataset) -> dict:
    deficits = []
    for d in report.deficits:
        kind, ordinal = dataset.kind_ordinal(d.index)
        deficits.append({
            "index": d.index,
            "element_id": dataset.primitives[d.index].element_id,
            "kind": kind.value,
            "kind_ordinal": ordinal,
            "name": dataset.primitives[d.index].name,
            "required": num(d.required),
            "available": num(d.available),
            "deficit": num(d.deficit),
        })
    return {"performable": report.performable, "deficits": deficits}


def evaluation_payload(ev: PortfolioEvaluation, dataset: Dataset) -> dict:
    return {
        "mode": ev.mode.value if ev.mode else None,
        "as_of": ev.as_of.isoformat() if ev.as_of else None,
        "gplus": num(ev.gplus_score),
        "contributing": list(ev.contributing),
        "contributing_count": len(ev.contributing),
        "work_fingerprint": fingerprint_payload(ev.work_fingerprint, dataset),
    }


def performable_payload(result: PerformableTasks) -> dict:
    return {
        "count": result.count,
        "tasks": [
            {"task_id": t.task_id, "text": t.text, "occupation": t.occupation}
            for t in result.tasks
        ],
    }


def stats_payload(s: DistributionStats) -> dict:
    return {
        "count": s.count,
        "mean": num(s.mean),
        "std": num(s.std),
        "min": {"key": s.min_key, "gplus": num(s.min_score)},
        "max": {"key": s.max_key, "gplus": num(s.max_score)},
    }


def timeline_payload(points: Sequence[TimelinePoint]) -> list[dict]:
    return [
        {
            "date": p.date.isoformat(),
            "gplus": num(p.gplus_score),
            "performable_task_count": p.performable_task_count,
        }
        for p in points
    ]


def forecast_payload(f: TrendForecast) -> dict:
    return {
        "slope_per_month": num(f.slope),
        "intercept": num(f.intercept),
        "current_score": num(f.current_score),
        "saturation_target": num(f.saturation_target),
        "months_to_saturation": num(f.months_to_saturation),
    }
