"""Command-line entry point: ingest -> store -> query -> export -> simulate.

Data output goes to stdout as JSON lines (or aligned tables with --table);
diagnostics go to stderr.  Exit codes: 0 ok, 2 usage, 3 data error,
4 store error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import __version__
from .decompose import decompose, decompose_vertices
from .errors import DataError, EmptyWalk, StoreError
from .export import export_graph_script
from .ingest import FORMAT_CSV, FORMAT_JSONL, parse_path, sessionize
from .model import ComponentKind
from .queries import (
    MODE_ALL,
    MODE_CYCLES,
    PathQuery,
    cluster_by_components,
    find_drives_through_path,
    find_paths_between,
    find_repeated_cycles,
    jaccard_distance,
)
from .store import load_or_empty
from .synth import (
    convergence_csv,
    convergence_report,
    generate_fsa,
    iter_walks,
    walks_to_events,
)

STORE_ENV = "WALKCOMP_STORE"


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False))


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _table(rows: list[dict]) -> None:
    if not rows:
        return
    headers = list(rows[0])
    widths = {h: max(len(h), *(len(str(r[h])) for r in rows)) for h in headers}
    print("  ".join(h.ljust(widths[h]) for h in headers))
    for row in rows:
        print("  ".join(str(row[h]).ljust(widths[h]) for h in headers))


def _store_dir(args) -> str:
    store = args.store or os.environ.get(STORE_ENV)
    if not store:
        print(f"usage error: --store is required (or set {STORE_ENV})",
              file=sys.stderr)
        raise SystemExit(2)
    return store


def _split_states(text: str) -> list[str]:
    states = [s for s in (part.strip() for part in text.split(",")) if s]
    if not states:
        raise EmptyWalk("no states given")
    return states


def _segment_text(occ, comp) -> str:
    if comp.kind is ComponentKind.CYCLE:
        rotation = ",".join(comp.rotation_from(occ.entry_vertex))
        return f"cycle({rotation})×{occ.repeat_count}@{occ.entry_vertex}"
    return f"path({','.join(comp.vertices)})"


# -- subcommand handlers -----------------------------------------------------

def _cmd_ingest(args) -> int:
    store_dir = _store_dir(args)
    store = load_or_empty(store_dir)
    events = []
    rejects = []
    for name in args.files:
        report = parse_path(name, args.format)
        events.extend(report.events)
        rejects.extend({"file": name, "line": r.line_no, "reason": r.reason}
                       for r in report.rejects)
    walks = sessionize(events, collapse_repeats=args.collapse_repeats)
    new = reused = sequences = 0
    for walk in walks:
        report = store.insert(
            decompose(walk),
            vehicle_id=walk.vehicle_id,
            drive_start=walk.timestamps[0] if walk.timestamps else None,
            drive_end=walk.timestamps[-1] if walk.timestamps else None,
        )
        new += report.new_components
        reused += report.reused_components
        sequences += report.sequence_added
    store.persist(store_dir)
    for reject in rejects:
        _emit({"reject": reject})
    _emit({
        "files": len(args.files),
        "events": len(events),
        "rejected_lines": len(rejects),
        "walks": len(walks),
        "sequences_added": sequences,
        "new_components": new,
        "reused_components": reused,
        "store": store_dir,
    })
    return 0


def _cmd_stats(args) -> int:
    stats = load_or_empty(_store_dir(args)).statistics()
    record = dataclasses.asdict(stats)
    if args.table:
        _table([{"statistic": k, "value": v} for k, v in record.items()])
    else:
        _emit(record)
    return 0


def _cmd_query_path(args) -> int:
    store = load_or_empty(_store_dir(args))
    query = PathQuery(tuple(_split_states(args.states)),
                      within_component=args.within_component)
    result = find_drives_through_path(store, query)
    if result.unknown_states:
        _warn(f"states not in store: {','.join(result.unknown_states)}")
    rows = [{"drive_id": m.drive_id, "components": list(m.component_ids)}
            for m in result.matches]
    if args.table:
        _table([{"drive_id": r["drive_id"],
                 "components": ",".join(r["components"])} for r in rows])
    else:
        for row in rows:
            _emit(row)
    return 0


def _cmd_query_between(args) -> int:
    store = load_or_empty(_store_dir(args))
    result = find_paths_between(store, args.from_state, args.to_state,
                                order_aware=not args.unordered)
    if result.unknown_states:
        _warn(f"states not in store: {','.join(result.unknown_states)}")
    rows = [{"component_id": cid, "kind": "path"} for cid in result.path_ids]
    rows += [{"component_id": cid, "kind": "cycle"} for cid in result.cycle_ids]
    if args.table:
        _table(rows)
    else:
        for row in rows:
            _emit(row)
    return 0


def _cmd_query_cycles(args) -> int:
    store = load_or_empty(_store_dir(args))
    reports = find_repeated_cycles(
        store, min_avg_visits=args.min_avg_visits,
        min_drives=args.min_drives, limit=args.limit,
    )
    rows = [dataclasses.asdict(r) for r in reports]
    if args.table:
        _table(rows)
    else:
        for row in rows:
            _emit(row)
    return 0


def _cmd_cluster(args) -> int:
    store = load_or_empty(_store_dir(args))
    mode = MODE_CYCLES if args.mode == "cycles" else MODE_ALL
    if args.jaccard:
        a, b = args.jaccard
        _emit({"drive_a": a, "drive_b": b, "mode": mode,
               "distance": jaccard_distance(store, a, b, mode)})
        return 0
    result = cluster_by_components(store, mode)
    rows = [{"size": len(c.drive_ids), "drives": list(c.drive_ids),
             "components": sorted(c.component_ids)} for c in result.clusters]
    if args.table:
        _table([{"size": r["size"], "drives": ",".join(r["drives"])}
                for r in rows])
        print(f"unclustered: {len(result.unclustered)}")
    else:
        for row in rows:
            _emit(row)
        _emit({"unclustered": list(result.unclustered)})
    return 0


def _cmd_export(args) -> int:
    store = load_or_empty(_store_dir(args))
    script = export_graph_script(store, args.variant)
    Path(args.out).write_text(script, encoding="utf-8")
    _emit({"out": args.out, "statements": script.count("\n")})
    return 0


def _cmd_simulate(args) -> int:
    fsa = generate_fsa(args.states, args.edges, args.seed)
    walks = iter_walks(
        fsa, args.walks, reuse_skew=args.skew, seed=args.seed,
        mean_length=args.mean_length, max_length=args.max_length,
    )
    n_events = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for event in walks_to_events(walks):
            out.write(json.dumps({
                "vehicle_id": event.vehicle_id,
                "session_id": event.session_id,
                "app_id": event.app_id,
                "state_id": event.state_id,
                "timestamp": event.timestamp.isoformat().replace("+00:00", "Z"),
            }, separators=(",", ":"), ensure_ascii=False))
            out.write("\n")
            n_events += 1
    _emit({"walks": args.walks, "events": n_events, "out": args.out})
    return 0


def _cmd_convergence(args) -> int:
    fsa = generate_fsa(args.states, args.edges, args.seed)
    walks = iter_walks(fsa, args.walks, reuse_skew=args.skew, seed=args.seed,
                       mean_length=args.mean_length, max_length=args.max_length)
    checkpoints = None
    if args.checkpoints:
        checkpoints = [int(c) for c in args.checkpoints.split(",") if c.strip()]
    points = convergence_report(walks, checkpoints)
    Path(args.out).write_text(convergence_csv(points), encoding="utf-8")
    final = points[-1] if points else None
    _emit({
        "out": args.out,
        "rows": len(points),
        "final": dataclasses.asdict(final) if final else None,
    })
    return 0


def _cmd_decompose(args) -> int:
    d = decompose_vertices(_split_states(args.walk), drive_id="cli")
    if args.json:
        for occ in d.occurrences:
            comp = d.components[occ.component_id]
            _emit({
                "pos": occ.position,
                "kind": comp.kind.value,
                "vertices": list(comp.rotation_from(occ.entry_vertex)),
                "entry": occ.entry_vertex,
                "repeat": occ.repeat_count,
                "component_id": occ.component_id,
            })
    else:
        print("; ".join(
            _segment_text(occ, d.components[occ.component_id])
            for occ in d.occurrences
        ))
    return 0


# -- parser ------------------------------------------------------------------

def _add_store_arg(parser) -> None:
    parser.add_argument("--store", help=f"store directory (default ${STORE_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walkcomp",
        description="Decompose clickstream walks into cycles and simple paths, "
                    "store them deduplicated, and query behavior on the result.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse logs, sessionize, decompose, insert")
    p.add_argument("files", nargs="+")
    p.add_argument("--format", choices=(FORMAT_JSONL, FORMAT_CSV),
                   default=FORMAT_JSONL)
    p.add_argument("--collapse-repeats", action="store_true",
                   help="drop consecutive duplicate states")
    _add_store_arg(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("stats", help="store statistics incl. compression ratio")
    p.add_argument("--table", action="store_true")
    _add_store_arg(p)
    p.set_defaults(func=_cmd_stats)

    q = sub.add_parser("query", help="behavioral queries").add_subparsers(
        dest="query_command", required=True)

    p = q.add_parser("path", help="drives that traversed an exact state run")
    p.add_argument("--states", required=True, help="comma-separated state ids")
    p.add_argument("--within-component", action="store_true",
                   help="only match inside single stored components")
    p.add_argument("--table", action="store_true")
    _add_store_arg(p)
    p.set_defaults(func=_cmd_query_path)

    p = q.add_parser("between", help="components connecting two states")
    p.add_argument("--from", dest="from_state", required=True)
    p.add_argument("--to", dest="to_state", required=True)
    p.add_argument("--unordered", action="store_true",
                   help="ignore traversal order of the two states")
    p.add_argument("--table", action="store_true")
    _add_store_arg(p)
    p.set_defaults(func=_cmd_query_between)

    p = q.add_parser("cycles", help="cycles drives are stuck in")
    p.add_argument("--min-drives", type=int, default=10)
    p.add_argument("--min-avg-visits", type=float, default=1.0)
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--table", action="store_true")
    _add_store_arg(p)
    p.set_defaults(func=_cmd_query_cycles)

    p = sub.add_parser("cluster", help="group drives by identical component sets")
    p.add_argument("--mode", choices=("all", "cycles"), default="all")
    p.add_argument("--jaccard", nargs=2, metavar=("DRIVE_A", "DRIVE_B"),
                   help="print the Jaccard distance of two drives instead")
    p.add_argument("--table", action="store_true")
    _add_store_arg(p)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("export", help="graph-database creation script")
    p.add_argument("--variant", type=int, choices=(2, 3), required=True)
    p.add_argument("--out", required=True)
    _add_store_arg(p)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("simulate", help="generate a synthetic walk workload")
    p.add_argument("--states", type=int, default=30)
    p.add_argument("--edges", type=int, default=90)
    p.add_argument("--walks", type=int, default=1000)
    p.add_argument("--skew", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mean-length", type=int, default=50)
    p.add_argument("--max-length", type=int, default=500)
    p.add_argument("--out", required=True, help="JSONL event file to write")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("convergence",
                       help="distinct-component growth experiment (CSV)")
    p.add_argument("--states", type=int, default=30)
    p.add_argument("--edges", type=int, default=90)
    p.add_argument("--walks", type=int, default=10000)
    p.add_argument("--skew", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mean-length", type=int, default=50)
    p.add_argument("--max-length", type=int, default=500)
    p.add_argument("--checkpoints", help="comma-separated walk counts")
    p.add_argument("--out", required=True, help="CSV file to write")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("decompose", help="one-shot decomposition (debug aid)")
    p.add_argument("--walk", required=True, help="comma-separated state ids")
    p.add_argument("--json", action="store_true", help="JSONL instead of text")
    p.set_defaults(func=_cmd_decompose)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except StoreError as exc:
        print(f"store error: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
