"""Per-item dependency extraction by tracing and by environment minimization.

Two routes produce dependencies for every item of a normalized corpus:

* trace capture: re-check each item under the environment of everything
  declared before it and record every resolution the checker performs;
* minimization: trim that candidate environment down to a 1-minimal
  sublist that still verifies, kind by kind, using chunked removal against
  the checker oracle.

Because the checker is monotone, a removal that verifies stays valid for
the rest of the search, so each granularity level needs a single sweep and
one final single-removal pass guarantees 1-minimality.  Chunks are tried
from the back of each list first, which resolves ties (several sufficient
hints, say) in favor of the earliest candidate in corpus order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import (
    Corpus,
    DepEdge,
    Environment,
    Item,
    ItemKind,
    Opacity,
    Visibility,
)
from .errors import CorpusMismatchError, NotVerifiableError

# Kinds are trimmed in this fixed order.
KIND_MINIMIZATION_ORDER = (
    ItemKind.THEOREM,
    ItemKind.DEFINITION,
    ItemKind.RESERVATION,
    ItemKind.NOTATION,
    ItemKind.HINT,
)


@dataclass(frozen=True, slots=True)
class Microarticle:
    """One item plus the environment of everything declared before it."""

    item: Item
    candidate_env: Environment


@dataclass(frozen=True, slots=True)
class MinimizationResult:
    item_name: str
    minimal_env: Environment
    oracle_calls: int
    removed: dict[ItemKind, int]


def decompose(corpus: Corpus) -> list[Microarticle]:
    """One microarticle per item, in corpus order."""
    return [
        Microarticle(item=item, candidate_env=corpus.candidate_environment(idx))
        for idx, item in enumerate(corpus.items)
    ]


def _shrink_list(candidates: Sequence[str], still_ok) -> list[str]:
    """Greedy monotone reduction of one kind's candidate list.

    Tries removing chunks of half the list, then quarters, and so on down
    to pairs, scanning chunks back to front, then finishes with one
    single-removal pass.  ``still_ok`` is called with the trial list and
    must be monotone in the set of surviving candidates.
    """
    keep = list(candidates)
    size = (len(keep) + 1) // 2
    while size >= 2:
        start = ((len(keep) - 1) // size) * size if keep else -1
        while start >= 0:
            trial = keep[:start] + keep[start + size:]
            if still_ok(trial):
                keep = trial
            start -= size
        size = (size + 1) // 2 if size > 2 else 1
    i = len(keep) - 1
    while i >= 0:
        trial = keep[:i] + keep[i + 1:]
        if still_ok(trial):
            keep = trial
        i -= 1
    return keep


def minimize_env(
    corpus: Corpus,
    micro: Microarticle,
    seed_targets: Iterable[str] | None = None,
) -> MinimizationResult:
    """Smallest sublist of the candidate environment that still verifies.

    The result is 1-minimal: removing any single element breaks
    verification.  ``seed_targets`` (typically the targets of a previously
    captured trace) short-circuits the search: if the environment
    restricted to the seed verifies, minimization proceeds inside it only.
    ``oracle_calls`` counts the verification attempts made during the
    search itself (the upfront validation of the full environment is not a
    search step).
    """
    item = micro.item
    env = micro.candidate_env
    if not corpus.accepts(item, env):
        outcome = corpus.check_item(item, env)
        raise NotVerifiableError(item.name, outcome.reason.value if outcome.reason else "rejected")

    calls = 0

    def oracle(trial_env: Environment) -> bool:
        nonlocal calls
        calls += 1
        return corpus.accepts(item, trial_env)

    if seed_targets is not None:
        restricted = env.restrict(frozenset(seed_targets))
        if restricted != env and oracle(restricted):
            env = restricted

    current = env
    for kind in KIND_MINIMIZATION_ORDER:
        names = current.names(kind)
        if not names:
            continue

        def still_ok(trial: list[str], kind=kind) -> bool:
            return oracle(current.replace_kind(kind, trial))

        kept = _shrink_list(names, still_ok)
        current = current.replace_kind(kind, kept)

    removed = {
        kind: len(micro.candidate_env.names(kind)) - len(current.names(kind))
        for kind in ItemKind
    }
    return MinimizationResult(
        item_name=item.name, minimal_env=current, oracle_calls=calls, removed=removed
    )


def trace_extract(corpus: Corpus) -> list[DepEdge]:
    """Concatenated traces of every item under its candidate environment."""
    edges: list[DepEdge] = []
    for micro in decompose(corpus):
        outcome = corpus.check_item(micro.item, micro.candidate_env, trace_requested=True)
        if not outcome.accepted:
            raise NotVerifiableError(
                micro.item.name, outcome.reason.value if outcome.reason else "rejected"
            )
        edges.extend(outcome.trace)
    return edges


def event_lines(corpus: Corpus, trace_edges: Sequence[DepEdge]) -> list[str]:
    """One progress message per item, in corpus order."""
    by_src: dict[str, list[str]] = {item.name: [] for item in corpus.items}
    for edge in trace_edges:
        by_src[edge.src].append(edge.dst)
    lines = []
    for item in corpus.items:
        targets = by_src[item.name]
        lines.append(f"dependencies: {' '.join(targets)}" if targets else "dependencies: (empty list)")
    return lines


def edges_from_minimization(corpus: Corpus, results: Sequence[MinimizationResult]) -> list[DepEdge]:
    """One edge per surviving environment entry, ordered by corpus position."""
    edges: list[DepEdge] = []
    for result in results:
        item = corpus.item(result.item_name)
        literal = item.literal_names()
        targets = sorted(result.minimal_env.all_names(), key=corpus.index_of)
        for target in targets:
            edges.append(
                DepEdge(
                    src=item.name,
                    dst=target,
                    visibility=Visibility.EXPLICIT if target in literal else Visibility.IMPLICIT,
                    opacity=corpus.item(target).opacity,
                )
            )
    return edges


@dataclass(frozen=True, slots=True)
class ExtractionResult:
    trace_edges: tuple[DepEdge, ...] | None
    minimization: tuple[MinimizationResult, ...] | None
    min_edges: tuple[DepEdge, ...] | None


def extract_corpus(
    corpus: Corpus,
    mode: str = "both",
    jobs: int = 1,
    seed_from_trace: bool = True,
) -> ExtractionResult:
    """Run trace and/or minimization extraction over a whole corpus.

    Minimization of distinct microarticles is independent, so with
    ``jobs > 1`` a thread pool processes them concurrently; results are
    reassembled in corpus order, so output does not depend on ``jobs``.
    """
    if mode not in ("trace", "minimize", "both"):
        raise ValueError(f"unknown extraction mode: {mode!r}")
    trace_edges = trace_extract(corpus) if mode in ("trace", "both") else None

    minimization = None
    min_edges = None
    if mode in ("minimize", "both"):
        seeds: dict[str, list[str]] | None = None
        if seed_from_trace and trace_edges is not None:
            seeds = {}
            for edge in trace_edges:
                seeds.setdefault(edge.src, []).append(edge.dst)

        micros = decompose(corpus)

        def work(micro: Microarticle) -> MinimizationResult:
            seed = seeds.get(micro.item.name, []) if seeds is not None else None
            return minimize_env(corpus, micro, seed_targets=seed)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                minimization = tuple(pool.map(work, micros))
        else:
            minimization = tuple(map(work, micros))
        min_edges = tuple(edges_from_minimization(corpus, minimization))

    return ExtractionResult(
        trace_edges=tuple(trace_edges) if trace_edges is not None else None,
        minimization=minimization,
        min_edges=min_edges,
    )


def compare_methods(
    corpus: Corpus,
    trace_edges: Sequence[DepEdge],
    minimization: Sequence[MinimizationResult],
) -> dict:
    """Per-item set differences between traced and minimized dependencies."""
    min_names = {result.item_name for result in minimization}
    corpus_names = {item.name for item in corpus.items}
    if min_names != corpus_names:
        raise CorpusMismatchError(
            "minimization results do not cover the corpus "
            f"(missing {sorted(corpus_names - min_names)[:3]}, "
            f"extra {sorted(min_names - corpus_names)[:3]})"
        )
    stray = {edge.src for edge in trace_edges} - corpus_names
    if stray:
        raise CorpusMismatchError(f"trace edges reference unknown items: {sorted(stray)[:3]}")

    traced: dict[str, set[str]] = {name: set() for name in corpus_names}
    for edge in trace_edges:
        traced[edge.src].add(edge.dst)
    minimal: dict[str, set[str]] = {
        result.item_name: set(result.minimal_env.all_names()) for result in minimization
    }

    per_item = {}
    for item in corpus.items:
        t, m = traced[item.name], minimal[item.name]
        per_item[item.name] = {
            "trace_only": sorted(t - m, key=corpus.index_of),
            "min_only": sorted(m - t, key=corpus.index_of),
            "common": sorted(t & m, key=corpus.index_of),
        }
    totals = {
        key: sum(len(entry[key]) for entry in per_item.values())
        for key in ("trace_only", "min_only", "common")
    }
    return {"per_item": per_item, "totals": totals}


# JSON-lines edge records -----------------------------------------------------


def edge_record(edge: DepEdge, method: str) -> str:
    return json.dumps(
        {
            "from": edge.src,
            "to": edge.dst,
            "vis": edge.visibility.value,
            "opacity": edge.opacity.value,
            "method": method,
        },
        separators=(",", ":"),
    )


def write_edges_jsonl(path: str | Path, result: ExtractionResult) -> None:
    lines = []
    if result.trace_edges is not None:
        lines.extend(edge_record(edge, "trace") for edge in result.trace_edges)
    if result.min_edges is not None:
        lines.extend(edge_record(edge, "min") for edge in result.min_edges)
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_edges_jsonl(path: str | Path, method: str = "any") -> list[DepEdge]:
    """Load edges back, optionally filtered by extraction method.

    With ``method="any"`` records from both methods are merged and
    duplicate (from, to) pairs collapse to one edge; explicit visibility
    wins over implicit.
    """
    if method not in ("any", "trace", "min"):
        raise ValueError(f"unknown method filter: {method!r}")
    merged: dict[tuple[str, str], DepEdge] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if method != "any" and rec["method"] != method:
            continue
        edge = DepEdge(
            src=rec["from"],
            dst=rec["to"],
            visibility=Visibility(rec["vis"]),
            opacity=Opacity(rec["opacity"]),
        )
        prev = merged.get(edge.pair())
        if prev is None:
            merged[edge.pair()] = edge
        elif prev.visibility is Visibility.IMPLICIT and edge.visibility is Visibility.EXPLICIT:
            merged[edge.pair()] = edge
    return list(merged.values())
