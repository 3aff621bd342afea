"""The ``depkit`` command line: normalize, extract, analyze, simulate, learn.

Exit codes: 0 on success, 1 on domain errors (unverifiable items, corpus
mismatches, unknown names, ...), 2 on usage errors.  Diagnostics go to
stderr; data goes to files or stdout.  Identical inputs and flags produce
byte-identical outputs regardless of ``--jobs``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gen as gen_mod
from .corpus import parse_corpus, render_corpus
from .errors import DepkitError
from .extract import (
    compare_methods,
    event_lines,
    extract_corpus,
    read_edges_jsonl,
    write_edges_jsonl,
)
from .graph import (
    Granularity,
    build_graph,
    build_graph_from_edges,
    cumulative_csv,
    kind_table,
    stats,
    stats_json,
    to_dot,
)
from .learn import evaluate_chrono, export_problems
from .normalize import normalize_corpus
from .rebuild import ChangeKind, ChangeSet, execute, plan, speedup_report


def _load_graph(args, granularity: Granularity):
    edges = read_edges_jsonl(args.deps, method=args.method)
    if args.corpus is not None:
        corpus = parse_corpus(args.corpus)
        return build_graph(corpus, edges, granularity)
    if granularity is Granularity.FILE:
        raise DepkitError("file granularity needs --corpus (edge records carry no file map)")
    return build_graph_from_edges(edges)


def _cmd_normalize(args) -> int:
    corpus = parse_corpus(args.in_dir)
    normalized, reports = normalize_corpus(corpus)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rel, text in render_corpus(normalized).items():
        path = out_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    report = {rel: rep.as_dict() for rel, rep in sorted(reports.items())}
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return 0


def _cmd_extract(args) -> int:
    corpus = parse_corpus(args.dir)
    result = extract_corpus(
        corpus, mode=args.mode, jobs=args.jobs, seed_from_trace=not args.no_seed
    )
    write_edges_jsonl(args.output, result)
    if args.events:
        if result.trace_edges is None:
            raise DepkitError("--events requires --mode trace or both")
        lines = event_lines(corpus, result.trace_edges)
        Path(args.events).write_text(
            "".join(line + "\n" for line in lines), encoding="utf-8"
        )
    if args.compare:
        if result.trace_edges is None or result.minimization is None:
            raise DepkitError("--compare requires --mode both")
        report = compare_methods(corpus, result.trace_edges, result.minimization)
        Path(args.compare).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def _cmd_stats(args) -> int:
    granularity = Granularity(args.granularity)
    g = _load_graph(args, granularity)
    s = stats(g)
    if args.json == "-":
        sys.stdout.write(stats_json(s))
    elif args.json:
        Path(args.json).write_text(stats_json(s), encoding="utf-8")
        sys.stdout.write(s.table() + "\n")
    else:
        sys.stdout.write(stats_json(s))
        sys.stdout.write(s.table() + "\n")
    if args.kinds:
        sys.stdout.write(json.dumps(kind_table(g), indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_export(args) -> int:
    g = _load_graph(args, Granularity(args.granularity))
    Path(args.dot).write_text(to_dot(g), encoding="utf-8")
    return 0


def _cmd_cumulative(args) -> int:
    g = _load_graph(args, Granularity(args.granularity))
    Path(args.csv).write_text(cumulative_csv(g), encoding="utf-8")
    return 0


def _parse_changes(specs: list[str]) -> ChangeSet:
    changes = []
    for spec in specs:
        name, _, suffix = spec.partition(":")
        if suffix not in ("", "body", "stmt"):
            raise DepkitError(f"change must be NAME[:body|:stmt], got {spec!r}")
        kind = ChangeKind.BODY_ONLY if suffix == "body" else ChangeKind.STATEMENT_OR_TYPE
        changes.append((name, kind))
    return ChangeSet(changes=tuple(changes))


def _cmd_simulate(args) -> int:
    corpus = parse_corpus(args.dir)
    edges = read_edges_jsonl(args.deps, method=args.method)
    g = build_graph(corpus, edges, Granularity.ITEM)
    changes = _parse_changes(args.change)
    rebuild_plan = plan(
        g, changes, granularity=Granularity(args.granularity), honor_opacity=args.opacity
    )
    report = execute(rebuild_plan, corpus, reminimize=args.reminimize)
    out = {
        "changed": list(rebuild_plan.changed),
        "granularity": rebuild_plan.granularity.value,
        "to_recheck": list(rebuild_plan.to_recheck),
        "skipped_opaque": sorted(rebuild_plan.skipped_opaque),
        "cost": rebuild_plan.cost,
        "execution": report.as_dict(),
    }
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_speedup(args) -> int:
    corpus = parse_corpus(args.dir)
    edges = read_edges_jsonl(args.deps, method=args.method)
    g = build_graph(corpus, edges, Granularity.ITEM)
    report = speedup_report(g, samples=args.samples, rng_seed=args.seed, jobs=args.jobs)
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_learn_eval(args) -> int:
    corpus = parse_corpus(args.dir)
    edges = read_edges_jsonl(args.deps, method=args.method)
    ks = [int(part) for part in args.k.split(",") if part]
    result = evaluate_chrono(
        corpus,
        edges,
        ks,
        alpha=args.alpha,
        weight=args.weight,
        explicit_only=args.explicit_only,
        baseline_seed=args.seed,
    )
    result["recall_at_k"] = {str(k): v for k, v in result["recall_at_k"].items()}
    if "baseline_recall_at_k" in result:
        result["baseline_recall_at_k"] = {
            str(k): v for k, v in result["baseline_recall_at_k"].items()
        }
    sys.stdout.write(json.dumps(result, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_learn_export(args) -> int:
    corpus = parse_corpus(args.dir)
    edges = read_edges_jsonl(args.deps, method=args.method)
    export_problems(
        corpus,
        edges,
        args.k,
        args.output,
        alpha=args.alpha,
        weight=args.weight,
        explicit_only=args.explicit_only,
    )
    return 0


def _cmd_gen(args) -> int:
    files = gen_mod.generate_corpus(
        items=args.items, seed=args.seed, family=args.family, per_file=args.per_file
    )
    gen_mod.write_corpus(files, args.output)
    return 0


def _add_method(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--method",
        choices=("any", "trace", "min"),
        default="any",
        help="which extraction method's edges to read (default: merged)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depkit",
        description="dependency extraction and analysis for micro-article corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="rewrite sources into normal form")
    p.add_argument("in_dir")
    p.add_argument("out_dir")
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("extract", help="extract per-item dependencies")
    p.add_argument("dir")
    p.add_argument("-o", "--output", required=True, help="edge records (JSON lines)")
    p.add_argument("--mode", choices=("trace", "minimize", "both"), default="both")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--events", help="also write the per-item progress message stream")
    p.add_argument("--compare", help="also write the trace/minimize comparison report")
    p.add_argument(
        "--no-seed",
        action="store_true",
        help="do not seed minimization from the trace in --mode both",
    )
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("stats", help="dependency graph statistics")
    p.add_argument("deps")
    p.add_argument("--granularity", choices=("item", "file"), default="item")
    p.add_argument("--corpus", help="corpus directory (node kinds, files, isolated items)")
    p.add_argument("--json", help="write JSON to this path ('-' for stdout)")
    p.add_argument("--kinds", action="store_true", help="also print per-kind edge counts")
    _add_method(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("export", help="write the graph in DOT format")
    p.add_argument("deps")
    p.add_argument("--dot", required=True)
    p.add_argument("--granularity", choices=("item", "file"), default="item")
    p.add_argument("--corpus")
    _add_method(p)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("cumulative", help="cumulative reverse-dependency distribution")
    p.add_argument("deps")
    p.add_argument("--csv", required=True)
    p.add_argument("--granularity", choices=("item", "file"), default="item")
    p.add_argument("--corpus")
    _add_method(p)
    p.set_defaults(func=_cmd_cumulative)

    p = sub.add_parser("simulate", help="plan and run re-verification after edits")
    p.add_argument("dir")
    p.add_argument("--deps", required=True)
    p.add_argument(
        "--change",
        action="append",
        required=True,
        metavar="NAME[:body|:stmt]",
        help="edited item (repeatable); default flavor is stmt",
    )
    p.add_argument("--granularity", choices=("item", "file"), default="item")
    p.add_argument("--opacity", action="store_true", help="honor opacity pruning")
    p.add_argument("--reminimize", action="store_true")
    _add_method(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("speedup", help="item-based vs file-based recheck cost")
    p.add_argument("dir")
    p.add_argument("--deps", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1)
    _add_method(p)
    p.set_defaults(func=_cmd_speedup)

    p = sub.add_parser("learn", help="premise relevance learning")
    learn_sub = p.add_subparsers(dest="learn_command", required=True)

    q = learn_sub.add_parser("eval", help="chronological recall evaluation")
    q.add_argument("dir")
    q.add_argument("--deps", required=True)
    q.add_argument("--k", default="1,10,50", help="comma-separated cutoffs")
    q.add_argument("--seed", type=int, default=42, help="random baseline seed")
    q.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="accepted for symmetry; training is sequential by contract, so "
        "output never depends on it",
    )
    q.add_argument("--alpha", type=float, default=1.0)
    q.add_argument("--weight", type=float, default=1.0)
    q.add_argument("--explicit-only", action="store_true")
    _add_method(q)
    q.set_defaults(func=_cmd_learn_eval)

    q = learn_sub.add_parser("export", help="write pruned problem files")
    q.add_argument("dir")
    q.add_argument("--deps", required=True)
    q.add_argument("--k", type=int, default=10)
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--alpha", type=float, default=1.0)
    q.add_argument("--weight", type=float, default=1.0)
    q.add_argument("--explicit-only", action="store_true")
    _add_method(q)
    q.set_defaults(func=_cmd_learn_export)

    p = sub.add_parser("gen", help="generate a synthetic corpus")
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--family", choices=gen_mod.FAMILIES, default="mixed")
    p.add_argument("--per-file", type=int, default=10)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DepkitError, OSError) as err:
        print(f"depkit: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
