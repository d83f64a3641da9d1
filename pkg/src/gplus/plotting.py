"""SVG rendering of g+ timelines.

Each series is tagged with an SVG group id (``gplus-<name>`` for scores,
``tasks-<name>`` for performable-task counts) so the emitted file can be
inspected programmatically.
"""

from __future__ import annotations

import os
from typing import Mapping, Sequence

import matplotlib
from matplotlib import dates as mdates
from matplotlib.figure import Figure

from .errors import EmptyInput
from .portfolio import TimelinePoint

SERIES_COLORS = {"teleop": "tab:blue", "autonomous": "c"}
TASK_COLOR = "saddlebrown"

_RC = {
    "svg.hashsalt": "gplus-timeline",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
}


def emit_timeline_plot(
    timeline: Sequence[TimelinePoint] | Mapping[str, Sequence[TimelinePoint]],
    out: str | os.PathLike,
    title: str = "Historical g+",
) -> None:
    """Write date vs g+ (left axis) and performable-task counts (right axis) as SVG."""
    series = dict(timeline) if isinstance(timeline, Mapping) else {"teleop": list(timeline)}
    series = {name: list(pts) for name, pts in series.items() if pts}
    if not series:
        raise EmptyInput("no timeline points to plot")

    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(7.0, 4.0))
        ax = fig.add_subplot()
        counts_ax = ax.twinx()
        counts_ax.spines["top"].set_visible(False)
        for name, pts in sorted(series.items()):
            dates = [p.date for p in pts]
            color = SERIES_COLORS.get(name)
            (line,) = ax.plot(dates, [p.gplus_score for p in pts], marker="o", markersize=3,
                              linewidth=1.2, color=color, label=f"g+ ({name})")
            line.set_gid(f"gplus-{name}")
            (tline,) = counts_ax.plot(dates, [p.performable_task_count for p in pts],
                                      marker="s", markersize=2.5, linestyle=":", linewidth=0.8,
                                      color=TASK_COLOR, label=f"performable tasks ({name})")
            tline.set_gid(f"tasks-{name}")

        ax.set_ylabel("g+")
        ax.set_ylim(bottom=0)
        counts_ax.set_ylabel("performable O*NET tasks", color=TASK_COLOR)
        counts_ax.set_ylim(bottom=0)
        counts_ax.yaxis.get_major_locator().set_params(integer=True)
        locator = mdates.AutoDateLocator()
        ax.xaxis.set_major_locator(locator)
        ax.xaxis.set_major_formatter(mdates.ConciseDateFormatter(locator))
        ax.set_title(title)
        handles = ax.get_legend_handles_labels()
        thandles = counts_ax.get_legend_handles_labels()
        ax.legend(handles[0] + thandles[0], handles[1] + thandles[1],
                  loc="upper left", fontsize=7, frameon=False)
        fig.tight_layout()
        fig.savefig(os.fspath(out), format="svg", metadata={"Date": None, "Creator": "gplus"})
