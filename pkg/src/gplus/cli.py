"""Command-line front end.

Exit codes: 0 success, 1 data or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import logging
import os
import sys
import warnings
from dataclasses import replace
from typing import Sequence

from . import __version__
from .bounds import BoundSet, derive_dwa_bounds, derive_task_bounds, stats
from .errors import GPlusError, UnknownKey
from .fingerprint import (
    Comparison,
    Fingerprint,
    GPlusConfig,
    NormMode,
    gplus,
    merge,
    performable,
)
from .ingest import ControlMode, Dataset, load_dataset, load_subtask_ledger
from .plotting import emit_timeline_plot
from .portfolio import (
    build_timeline,
    count_performable,
    evaluate_portfolio,
    forecast,
    saturation_target,
    select_records,
)
from .report import (
    ReportBundle,
    evaluation_payload,
    fingerprint_payload,
    forecast_payload,
    now_stamp,
    num,
    performable_payload,
    shortfall_payload,
    stats_payload,
    timeline_payload,
)

log = logging.getLogger("gplus")

DATA_ENV = "GPLUS_DATA_DIR"
TABULAR = {"bounds", "stats", "timeline"}


class UsageError(Exception):
    pass


# --- configuration ---------------------------------------------------------------


def read_config_file(path: str) -> GPlusConfig:
    """Parse ``key=value`` lines mirroring GPlusConfig fields; ``#`` starts a comment."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            try:
                if key == "norm_constant":
                    values[key] = float(value)
                elif key == "epsilon":
                    values[key] = float(value)
                elif key == "norm_mode":
                    values[key] = _norm_mode(value)
                elif key == "comparison":
                    values[key] = Comparison(_comparison_alias(value))
                else:
                    raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    return GPlusConfig(**values)


def _norm_mode(text: str) -> NormMode:
    key = text.strip().lower()
    if key in ("pinned", "derived"):
        return NormMode(key)
    if key == "derivedfromoccupations":
        return NormMode.DERIVED_FROM_OCCUPATIONS
    raise ValueError(f"unknown norm_mode {text!r}")


def _comparison_alias(text: str) -> str:
    key = text.strip().lower()
    return {"meetsminimum": "meets", "strictlygreater": "strict"}.get(key, key)


def build_config(args: argparse.Namespace) -> GPlusConfig:
    config = read_config_file(args.config) if args.config else GPlusConfig()
    if args.norm:
        if args.norm == "derived":
            config = replace(config, norm_mode=NormMode.DERIVED_FROM_OCCUPATIONS)
        else:
            config = replace(config, norm_mode=NormMode.PINNED, norm_constant=args.norm_value)
    if args.comparison:
        config = replace(config, comparison=Comparison(args.comparison))
    return config


def _norm_arg(text: str) -> str:
    if text == "derived" or text.startswith("pinned:"):
        return text
    raise argparse.ArgumentTypeError("expected pinned:<value> or derived")


def _date_arg(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO-8601 date: {text!r}") from None


# --- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", metavar="DIR", help=f"data directory (default ${DATA_ENV})")
    common.add_argument("--ledger", metavar="FILE", help="subtask ledger TSV")
    common.add_argument("--config", metavar="FILE", help="key=value GPlusConfig file")
    common.add_argument("--mode", choices=["teleop", "autonomous"], help="control-mode filter")
    common.add_argument("--as-of", type=_date_arg, metavar="DATE", help="ignore successes after DATE")
    common.add_argument("--norm", type=_norm_arg, metavar="pinned:<value>|derived")
    common.add_argument("--comparison", choices=["meets", "strict"])
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit generated_at")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gplus", description="Work fingerprints and g+ scores.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    add("validate", "load and cross-check the data files, report entity counts")

    for name, text in (("fingerprint", "print a fingerprint"), ("gplus", "print a g+ score")):
        p = add(name, text)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--occupation", metavar="SOC")
        g.add_argument("--task", type=int, metavar="ID")
        g.add_argument("--dwa", metavar="LABEL")

    add("evaluate", "infer a work fingerprint from the ledger (componentwise max over successes)")

    p = add("performable", "which tasks a work fingerprint can perform, or its shortfall against one occupation")
    p.add_argument("--occupation", action="append", metavar="SOC",
                   help="use an occupation as a succeeded subtask (repeatable; merged)")
    p.add_argument("--against", metavar="SOC", help="report the shortfall against this occupation")

    for name, text, kinds, default in (
        ("bounds", "derived upper-bound fingerprints", ["dwa", "task"], "dwa"),
        ("stats", "g+ distribution statistics", ["occupations", "dwa", "task", "ledger"], "occupations"),
    ):
        p = add(name, text)
        p.add_argument("--kind", choices=kinds, default=default)
    sub.choices["bounds"].add_argument("--with-levels", action="store_true",
                                       help="include each bound's levels (JSON only)")

    p = add("timeline", "cumulative g+ and performable-task count per success date")
    p.add_argument("--plot", metavar="SVG", help="also render the timeline figure here")

    p = add("forecast", "least-squares g+ trend and months to saturation")
    p.add_argument("--target", type=float, help="saturation target (default: g+ of all sevens)")

    add("plot", "render the timeline figure (SVG written to --out)")
    return parser


# --- command helpers --------------------------------------------------------------------


class Context:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        data = args.data or os.environ.get(DATA_ENV)
        if not data:
            raise UsageError(f"--data is required (or set {DATA_ENV})")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            self.dataset: Dataset = load_dataset(data)
        self.warnings = sorted({str(w.message) for w in caught})
        for message in self.warnings:
            log.info("warning: %s", message)
        self.config = build_config(args).resolved(
            list(self.dataset.occupation_fingerprints().values()))
        self._dwa: BoundSet | None = None
        self._task: BoundSet | None = None

    @property
    def mode(self) -> ControlMode | None:
        return ControlMode.parse(self.args.mode) if self.args.mode else None

    def ledger(self):
        if not self.args.ledger:
            raise UsageError(f"{self.args.command} needs --ledger")
        return load_subtask_ledger(self.args.ledger, self.dataset)

    def dwa_bounds(self) -> BoundSet:
        if self._dwa is None:
            self._dwa = derive_dwa_bounds(self.dataset)
        return self._dwa

    def task_bounds(self) -> BoundSet:
        if self._task is None:
            self._task = derive_task_bounds(self.dataset, self.dwa_bounds())
        return self._task

    def occupation(self, soc: str):
        try:
            return self.dataset.occupations[soc]
        except KeyError:
            raise UnknownKey(f"unknown occupation {soc}") from None

    def evaluation(self):
        return evaluate_portfolio(self.ledger(), self.mode, self.args.as_of, self.config,
                                  dim=self.dataset.dim)

    def bundle(self, payload: dict, table=None) -> ReportBundle:
        return ReportBundle(
            report=self.args.command,
            format=self.args.format,
            payload=payload,
            config_echo=self.config.echo(),
            generated_at=None if self.args.no_timestamp else now_stamp(),
            table=table,
        )

    def modes(self) -> list[ControlMode]:
        return [self.mode] if self.mode else list(ControlMode)


def _select_fingerprint(ctx: Context) -> tuple[dict, Fingerprint]:
    a = ctx.args
    if a.occupation:
        occ = ctx.occupation(a.occupation)
        return {"source": "occupation", "key": occ.soc_code, "title": occ.title}, occ.fingerprint
    if a.task is not None:
        if a.task not in ctx.dataset.tasks:
            raise UnknownKey(f"unknown task {a.task}")
        bounds = ctx.task_bounds().bounds
        if a.task not in bounds:
            raise UnknownKey(f"task {a.task} has no detailed work activities, so no bound")
        return ({"source": "task_bound", "key": a.task, "title": ctx.dataset.tasks[a.task].text},
                bounds[a.task])
    if a.dwa:
        if a.dwa not in ctx.dataset.activities:
            raise UnknownKey(f"unknown activity {a.dwa}")
        bounds = ctx.dwa_bounds().bounds
        if a.dwa not in bounds:
            raise UnknownKey(f"activity {a.dwa} has no contributing occupations, so no bound")
        return ({"source": "dwa_bound", "key": a.dwa, "title": ctx.dataset.activities[a.dwa].title},
                bounds[a.dwa])
    if a.ledger:
        ev = ctx.evaluation()
        return ({"source": "ledger", "key": ev.mode.value if ev.mode else None,
                 "title": "work fingerprint"}, ev.work_fingerprint)
    raise UsageError(f"{a.command} needs one of --occupation, --task, --dwa or --ledger")


def cmd_validate(ctx: Context) -> ReportBundle:
    ds = ctx.dataset
    payload = {
        "counts": ds.counts(),
        "primitive_kinds": ds.kind_counts(),
        "activity_levels": ds.activity_counts(),
        "dimension": ds.dim,
        "norm_constant": num(ctx.config.norm_constant),
        "warnings": ctx.warnings,
    }
    if ctx.args.ledger:
        records = ctx.ledger()
        payload["ledger"] = {
            "records": len(records),
            "succeeded": sum(r.succeeded for r in records),
            "by_mode": {m.value: sum(r.control_mode is m for r in records) for m in ControlMode},
        }
    return ctx.bundle(payload)


def cmd_fingerprint(ctx: Context) -> ReportBundle:
    source, fp = _select_fingerprint(ctx)
    return ctx.bundle({**source, "gplus": num(gplus(fp, ctx.config)),
                       "levels": fingerprint_payload(fp, ctx.dataset)})


def cmd_gplus(ctx: Context) -> ReportBundle:
    source, fp = _select_fingerprint(ctx)
    return ctx.bundle({**source, "gplus": num(gplus(fp, ctx.config)), "level_sum": num(fp.total())})


def cmd_evaluate(ctx: Context) -> ReportBundle:
    return ctx.bundle(evaluation_payload(ctx.evaluation(), ctx.dataset))


def cmd_performable(ctx: Context) -> ReportBundle:
    a = ctx.args
    if a.occupation:
        occs = [ctx.occupation(s) for s in a.occupation]
        work = merge([o.fingerprint for o in occs])
        source = {"source": "occupations", "occupations": [o.soc_code for o in occs]}
    elif a.ledger:
        ev = ctx.evaluation()
        work = ev.work_fingerprint
        source = {"source": "ledger", "mode": ev.mode.value if ev.mode else None}
    else:
        raise UsageError("performable needs --ledger or --occupation")
    payload = {**source, "gplus": num(gplus(work, ctx.config))}
    if a.against:
        target = ctx.occupation(a.against)
        payload["against"] = {"soc_code": target.soc_code, "title": target.title,
                              "gplus": num(gplus(target.fingerprint, ctx.config))}
        payload["shortfall"] = shortfall_payload(
            performable(work, target.fingerprint, ctx.config), ctx.dataset)
    else:
        payload.update(performable_payload(
            count_performable(work, ctx.task_bounds(), ctx.config, ctx.dataset)))
    return ctx.bundle(payload)


def cmd_bounds(ctx: Context) -> ReportBundle:
    ds = ctx.dataset
    if ctx.args.kind == "dwa":
        bset = ctx.dwa_bounds()
        titles = {k: a.title for k, a in ds.activities.items()}
    else:
        bset = ctx.task_bounds()
        titles = {k: t.text for k, t in ds.tasks.items()}
    entries = []
    rows = []
    for key in sorted(bset.bounds):
        score = gplus(bset.bounds[key], ctx.config)
        entry = {"key": key, "title": titles[key], "gplus": num(score)}
        if ctx.args.with_levels:
            entry["levels"] = [num(v) for v in bset.bounds[key]]
        entries.append(entry)
        rows.append([key, titles[key], repr(score), num(score)["display"], "false"])
    for key in bset.excluded:
        rows.append([key, titles[key], "", "", "true"])
    payload = {"kind": bset.kind.value, "count": len(entries), "bounds": entries,
               "excluded": list(bset.excluded)}
    return ctx.bundle(payload, (["key", "title", "gplus", "gplus_display", "excluded"], rows))


def cmd_stats(ctx: Context) -> ReportBundle:
    kind = ctx.args.kind
    if kind == "occupations":
        fps = ctx.dataset.occupation_fingerprints()
    elif kind == "dwa":
        fps = dict(ctx.dwa_bounds().bounds)
    elif kind == "task":
        fps = dict(ctx.task_bounds().bounds)
    else:
        from .portfolio import select_records
        fps = {f"{r.subtask_id}/{r.control_mode.value}": r.fingerprint
               for r in select_records(ctx.ledger(), ctx.mode, ctx.args.as_of)}
    s = stats(fps, ctx.config)
    payload = {"kind": kind, **stats_payload(s)}
    columns = ["kind", "count", "mean", "mean_display", "std", "std_display",
               "min_key", "min_gplus", "min_gplus_display", "max_key", "max_gplus", "max_gplus_display"]
    row = [kind, s.count, repr(s.mean), num(s.mean)["display"], repr(s.std), num(s.std)["display"],
           s.min_key, repr(s.min_score), num(s.min_score)["display"],
           s.max_key, repr(s.max_score), num(s.max_score)["display"]]
    return ctx.bundle(payload, (columns, [row]))


def _timelines(ctx: Context) -> dict[str, list]:
    records = ctx.ledger()
    bounds = ctx.task_bounds()
    return {m.short: build_timeline(records, m, bounds, ctx.config) for m in ctx.modes()}


def cmd_timeline(ctx: Context) -> ReportBundle:
    series = _timelines(ctx)
    if ctx.args.plot:
        emit_timeline_plot(series, ctx.args.plot)
    rows = [
        [mode, p.date.isoformat(), repr(p.gplus_score), num(p.gplus_score)["display"],
         p.performable_task_count]
        for mode, pts in series.items() for p in pts
    ]
    payload = {"series": {mode: timeline_payload(pts) for mode, pts in series.items()}}
    return ctx.bundle(payload, (["mode", "date", "gplus", "gplus_display", "performable_task_count"], rows))


def cmd_forecast(ctx: Context) -> ReportBundle:
    mode = ctx.mode or ControlMode.ANALOGOUS_TELEOP
    points = build_timeline(ctx.ledger(), mode, None, ctx.config)
    target = ctx.args.target
    if target is None:
        target = saturation_target(ctx.dataset.dim, ctx.config)
    return ctx.bundle({"mode": mode.value, "points": len(points),
                       **forecast_payload(forecast(points, target))})


def cmd_plot(ctx: Context) -> ReportBundle:
    if not ctx.args.out:
        raise UsageError("plot needs --out PATH for the SVG file")
    series = _timelines(ctx)
    emit_timeline_plot(series, ctx.args.out)
    return ctx.bundle({"figure": ctx.args.out,
                       "series": {m: len(pts) for m, pts in series.items()}})


COMMANDS = {
    "validate": cmd_validate,
    "fingerprint": cmd_fingerprint,
    "gplus": cmd_gplus,
    "evaluate": cmd_evaluate,
    "performable": cmd_performable,
    "bounds": cmd_bounds,
    "stats": cmd_stats,
    "timeline": cmd_timeline,
    "forecast": cmd_forecast,
    "plot": cmd_plot,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.norm and args.norm.startswith("pinned:"):
        try:
            args.norm_value = float(args.norm.split(":", 1)[1])
        except ValueError:
            parser.print_usage(sys.stderr)
            print(f"gplus: error: --norm: bad value {args.norm!r}", file=sys.stderr)
            return 2
    if args.format == "csv" and args.command not in TABULAR:
        print(f"gplus: error: --format csv is only offered for {', '.join(sorted(TABULAR))}",
              file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        ctx = Context(args)
        bundle = COMMANDS[args.command](ctx)
        text = bundle.render()
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"gplus: error: {exc}", file=sys.stderr)
        return 2
    except (GPlusError, OSError, ValueError) as exc:
        print(f"gplus: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if args.out and args.command != "plot":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
