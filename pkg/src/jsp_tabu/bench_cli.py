"""Multi-seed benchmark harness: ``jsp-tabu run | compare | oracle``.

Run ``i`` of a batch uses seed ``base + i``.  CSV output is byte-identical for
identical flags when ``--timing off`` (time-to-best then prints ``NA``) and
the stop is iteration/target based.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import platform
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .instance_io import (
    Instance,
    InstanceFormatError,
    KnownBounds,
    benchmark_names,
    bundled_bounds,
    load_benchmark,
    load_instance,
)
from .neighborhood import NeighborhoodKind
from .oracle import TooLarge, brute_force_optimum
from .schedule import evaluate, gantt_export
from .tabu_search import SearchConfig, SearchInvariantError, run, warm_up

log = logging.getLogger("jsp_tabu")

CSV_HEADER = ["instance", "neighborhood", "seed", "best", "time_to_best_s", "iterations", "re_percent"]

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class MissingBound(KeyError):
    pass


class InputError(Exception):
    """Bad user input (reported with exit code 2)."""


@dataclass(frozen=True)
class RunRecord:
    instance: str
    neighborhood: str
    seed: int
    best: int
    time_to_best: float | None  # None when timing is disabled
    iterations: int
    re_percent: float | None  # None when no lower bound is known

    def csv_row(self) -> list[str]:
        return [
            self.instance,
            self.neighborhood,
            str(self.seed),
            str(self.best),
            "NA" if self.time_to_best is None else f"{self.time_to_best:.3f}",
            str(self.iterations),
            "NA" if self.re_percent is None else f"{self.re_percent:.4f}",
        ]


def relative_error(best: int, lb: int) -> float:
    return 100.0 * (best - lb) / lb


def compute_mre(records: Sequence[RunRecord], bounds: KnownBounds, mode: str = "best") -> float:
    """Mean over instances of the relative error to the lower bound.

    ``mode="best"`` uses each instance's best run (b-MRE), ``"mean"`` the mean
    of its runs (av-MRE).
    """
    if not records:
        raise ValueError("compute_mre needs at least one record")
    if mode not in ("best", "mean"):
        raise ValueError(f"mode must be 'best' or 'mean', not {mode!r}")
    per_inst: dict[str, list[int]] = {}
    for r in records:
        per_inst.setdefault(r.instance, []).append(r.best)
    values = []
    for name, bests in per_inst.items():
        lb = bounds.lb(name)
        if lb is None:
            raise MissingBound(name)
        if mode == "best":
            values.append(relative_error(min(bests), lb))
        else:
            values.append(statistics.fmean(relative_error(b, lb) for b in bests))
    return statistics.fmean(values)


@dataclass(frozen=True)
class Summary:
    instance: str
    neighborhood: str
    lb: int | None
    best: int
    m_av: float
    t_av: float | None
    b_re: float | None
    av_re: float | None


def summarize(records: Sequence[RunRecord], bounds: KnownBounds) -> Summary:
    r0 = records[0]
    bests = [r.best for r in records]
    times = [r.time_to_best for r in records]
    lb = bounds.lb(r0.instance)
    return Summary(
        r0.instance,
        r0.neighborhood,
        lb,
        min(bests),
        statistics.fmean(bests),
        None if any(t is None for t in times) else statistics.fmean(times),
        None if lb is None else relative_error(min(bests), lb),
        None if lb is None else statistics.fmean(relative_error(b, lb) for b in bests),
    )


def records_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _fmt(x, spec=".2f") -> str:
    return "NA" if x is None else format(x, spec)


def summary_markdown(rows: Sequence[Summary]) -> str:
    out = ["| Instance | N | LB | Best | M_av | T_av (s) | b-RE | av-RE |", "|---|---|---|---|---|---|---|---|"]
    for s in rows:
        out.append(
            f"| {s.instance} | {s.neighborhood} | {_fmt(s.lb, 'd')} | {s.best} | {s.m_av:.1f} | "
            f"{_fmt(s.t_av)} | {_fmt(s.b_re)} | {_fmt(s.av_re)} |"
        )
    return "\n".join(out) + "\n"


def group_markdown(groups: dict[str, dict[str, list[RunRecord]]], bounds: KnownBounds) -> str:
    """One row per group, one b-MRE / av-MRE / T_av triple per neighbourhood."""
    kinds = sorted({k for g in groups.values() for k in g})
    head = "| Group | " + " | ".join(f"{k} b-MRE | {k} av-MRE | {k} T_av" for k in kinds) + " |"
    out = [head, "|---|" + "---|" * (3 * len(kinds))]
    for gname, by_kind in groups.items():
        cells = []
        for k in kinds:
            recs = by_kind.get(k, [])
            if not recs:
                cells += ["NA"] * 3
                continue
            try:
                b = f"{compute_mre(recs, bounds, 'best'):.2f}"
                a = f"{compute_mre(recs, bounds, 'mean'):.2f}"
            except MissingBound:
                b = a = "NA"
            times = [r.time_to_best for r in recs]
            t = "NA" if any(x is None for x in times) else f"{statistics.fmean(times):.2f}"
            cells += [b, a, t]
        out.append(f"| {gname} | " + " | ".join(cells) + " |")
    return "\n".join(out) + "\n"


def host_note() -> str:
    return f"host: {platform.machine()} {platform.processor() or 'cpu'}, Python {platform.python_version()}"


# --------------------------------------------------------------------------- runs


def resolve_instance(ref: str, fmt: str = "auto") -> Instance:
    """``ref`` is a file path or the name of a bundled benchmark."""
    path = Path(ref)
    try:
        if path.is_file():
            return load_instance(path, fmt)
        if ref.lower() in benchmark_names():
            return load_benchmark(ref)
    except (InstanceFormatError, OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{ref}: {exc}") from exc
    raise InputError(f"{ref}: no such file or bundled benchmark")


def _one_run(job) -> RunRecord:
    inst, kind, seed, cfg_kw, target, lb, timing = job
    stats = run(inst, SearchConfig(neighborhood=kind, seed=seed, target=target, **cfg_kw))
    return RunRecord(
        inst.name,
        kind.name.lower(),
        seed,
        stats.best_makespan,
        stats.time_to_best if timing else None,
        stats.iterations,
        None if lb is None else relative_error(stats.best_makespan, lb),
    )


def _init_worker() -> None:
    warm_up()


def execute(jobs: list, n_workers: int) -> list[RunRecord]:
    """Run jobs, results in submission order."""
    if n_workers <= 1:
        warm_up()
        return [_one_run(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers, initializer=_init_worker) as pool:
        return list(pool.map(_one_run, jobs))


def _config_kw(args) -> dict:
    kw = dict(improve_iter=args.improve_iter, time_limit=args.time_limit)
    if args.max_iters is not None:
        kw["max_iters"] = args.max_iters
    if args.children_cap is not None:
        kw["children_cap"] = args.children_cap
    return kw


def _bounds(args) -> KnownBounds:
    if args.bounds is None:
        return bundled_bounds()
    try:
        return KnownBounds.load(args.bounds)
    except (OSError, ValueError) as exc:
        raise InputError(f"{args.bounds}: {exc}") from exc


def _target(inst: Instance, bounds: KnownBounds, override: int | None) -> tuple[int | None, int | None]:
    lb = bounds.lb(inst.name)
    return (override if override is not None else lb), lb


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_run(args) -> int:
    inst = resolve_instance(args.instance, args.format)
    kind = NeighborhoodKind.parse(args.neighborhood)
    bounds = _bounds(args)
    target, lb = _target(inst, bounds, args.target)
    kw = _config_kw(args)
    timing = args.timing == "wall"
    jobs = [(inst, kind, args.seed + i, kw, target, lb, timing) for i in range(args.runs)]
    records = execute(jobs, args.jobs)
    summary = summarize(records, bounds)
    if args.emit == "csv":
        _write(records_csv(records), args.out)
    else:
        _write(summary_markdown([summary]) + "\n" + host_note() + "\n", args.out)
    log.info(
        "%s %s: Best %d  M_av %.1f  T_av %s  b-RE %s  av-RE %s",
        inst.name, summary.neighborhood, summary.best, summary.m_av, _fmt(summary.t_av),
        _fmt(summary.b_re), _fmt(summary.av_re),
    )
    if args.gantt:
        best_seed = min(records, key=lambda r: (r.best, r.seed)).seed
        stats = run(inst, SearchConfig(neighborhood=kind, seed=best_seed, target=target, **kw))
        Path(args.gantt).write_text(gantt_export(inst, stats.best_solution, evaluate(inst, stats.best_solution)))
    return EXIT_OK


def read_instance_list(path: str) -> list[tuple[str, str]]:
    """Lines ``ref [group]``; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    items = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) > 2:
            raise InputError(f"{path}: expected 'instance [group]', got {line!r}")
        items.append((parts[0], parts[1] if len(parts) == 2 else "all"))
    if not items:
        raise InputError(f"{path}: no instances listed")
    return items


def cmd_compare(args) -> int:
    items = read_instance_list(args.instances) if args.instances else [(r, "all") for r in args.instance]
    if not items:
        raise InputError("compare needs --instances FILE or at least one --instance")
    kinds = [NeighborhoodKind.parse(k) for k in args.neighborhoods.split(",")]
    bounds = _bounds(args)
    kw = _config_kw(args)
    timing = args.timing == "wall"
    jobs, labels = [], []
    for ref, group in items:
        inst = resolve_instance(ref, args.format)
        target, lb = _target(inst, bounds, None)
        for kind in kinds:
            for i in range(args.runs):
                jobs.append((inst, kind, args.seed + i, kw, target, lb, timing))
                labels.append(group)
    records = execute(jobs, args.jobs)
    if args.records:
        Path(args.records).write_text(records_csv(records))

    per_row: dict[tuple[str, str], list[RunRecord]] = {}
    groups: dict[str, dict[str, list[RunRecord]]] = {}
    for rec, group in zip(records, labels):
        per_row.setdefault((rec.instance, rec.neighborhood), []).append(rec)
        groups.setdefault(group, {}).setdefault(rec.neighborhood, []).append(rec)
    summaries = [summarize(recs, bounds) for recs in per_row.values()]
    if args.emit == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "neighborhood", "lb", "best", "m_av", "t_av_s", "b_re", "av_re"])
        for s in summaries:
            w.writerow([s.instance, s.neighborhood, _fmt(s.lb, "d"), s.best, f"{s.m_av:.2f}",
                        _fmt(s.t_av, ".3f"), _fmt(s.b_re, ".4f"), _fmt(s.av_re, ".4f")])
        _write(buf.getvalue(), args.out)
    else:
        text = summary_markdown(summaries) + "\n" + group_markdown(groups, bounds) + "\n" + host_note() + "\n"
        _write(text, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = resolve_instance(args.instance, args.format)
    try:
        res = brute_force_optimum(inst, limit=args.limit)
    except TooLarge as exc:
        raise InputError(str(exc)) from exc
    print(f"{inst.name}: optimum {res.makespan} ({res.explored} improving complete schedules)")
    if args.gantt:
        Path(args.gantt).write_text(gantt_export(inst, res.solution, evaluate(inst, res.solution)))
    return EXIT_OK


# --------------------------------------------------------------------------- argparse


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _pos_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _pos_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["auto", "orlib", "taillard"], default="auto",
                   help="instance file format (auto: ta* files are Taillard, others OR-Library)")
    p.add_argument("--runs", type=_pos_int, default=10, help="independent runs per instance")
    p.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed+i")
    p.add_argument("--max-iters", type=_nonneg_int, default=None, help="iteration budget per run")
    p.add_argument("--time-limit", type=_pos_float, default=None, help="seconds per run")
    p.add_argument("--improve-iter", type=_pos_int, default=200,
                   help="non-improving iterations before a random restart move")
    p.add_argument("--children-cap", type=_pos_int, default=None,
                   help="evaluate a random subset of at most this many moves")
    p.add_argument("--bounds", default=None, help="bounds file 'name LB [UB]' (default: bundled)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--emit", choices=["csv", "md"], default="csv")
    p.add_argument("--jobs", type=_pos_int, default=1, help="parallel worker processes")
    p.add_argument("--timing", choices=["wall", "off"], default="wall",
                   help="'off' writes NA for time-to-best so reports are reproducible")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jsp-tabu", description="Tabu search for job-shop scheduling")
    parser.add_argument("-v", "--verbose", action="store_true", help="log summaries to stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="multi-seed runs on one instance", parents=[common])
    p.add_argument("--instance", required=True, help="instance file or bundled name (ft10, la01, ...)")
    p.add_argument("--neighborhood", choices=["n5", "n6", "n7", "n8"], default="n8")
    p.add_argument("--target", type=int, default=None, help="stop at this makespan (default: LB)")
    p.add_argument("--gantt", default=None, help="write the best schedule as Gantt CSV")
    _search_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare neighbourhoods over a list of instances", parents=[common])
    p.add_argument("--instances", default=None, help="file with lines 'instance [group]'")
    p.add_argument("--instance", action="append", default=[], help="instance (repeatable)")
    p.add_argument("--neighborhoods", default="n5,n6,n7,n8", help="comma-separated kinds")
    p.add_argument("--records", default=None, help="also write per-run records CSV here")
    _search_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance by enumeration", parents=[common])
    p.add_argument("--instance", required=True)
    p.add_argument("--format", choices=["auto", "orlib", "taillard"], default="auto")
    p.add_argument("--limit", type=_pos_int, default=12, help="maximum number of operations")
    p.add_argument("--gantt", default=None, help="write the optimal schedule as Gantt CSV")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (InputError, MissingBound) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SearchInvariantError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
