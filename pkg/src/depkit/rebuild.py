"""Incremental re-verification planning and simulation.

A plan lists everything that must be re-checked after a set of edits:
the changed items plus all transitive reverse dependents, or, at file
granularity, every item of every file that transitively depends on a
changed file (the blunt strategy fine-grained dependencies are meant to
beat).  A body-only edit to an opaque item is invisible to consumers, so
with opacity honored its dependents are skipped and reported instead of
re-checked.  Plans include the changed items themselves; the ARL statistic
of ``graph.stats`` does not count the changed item, so exhaustive-mode
means differ from it by exactly one.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from .corpus import Corpus, Opacity
from .errors import UnknownItemError
from .extract import decompose, minimize_env
from .graph import DepGraph, Granularity


class ChangeKind(str, Enum):
    BODY_ONLY = "body"
    STATEMENT_OR_TYPE = "stmt"


@dataclass(frozen=True, slots=True)
class ChangeSet:
    """Names of edited items with the flavor of each edit."""

    changes: tuple[tuple[str, ChangeKind], ...]

    def __post_init__(self):
        if not self.changes:
            raise ValueError("a change set must name at least one item")

    @classmethod
    def single(cls, name: str, kind: ChangeKind = ChangeKind.STATEMENT_OR_TYPE) -> "ChangeSet":
        return cls(changes=((name, kind),))


@dataclass(frozen=True, slots=True)
class RebuildPlan:
    to_recheck: tuple[str, ...]
    skipped_opaque: frozenset[str]
    granularity: Granularity
    cost: int
    changed: tuple[str, ...]


def _propagates(g: DepGraph, name: str, kind: ChangeKind, honor_opacity: bool) -> bool:
    if not honor_opacity or kind is ChangeKind.STATEMENT_OR_TYPE:
        return True
    return g.opacities.get(name) is not Opacity.OPAQUE


def plan(
    g: DepGraph,
    changes: ChangeSet,
    granularity: Granularity = Granularity.ITEM,
    honor_opacity: bool = False,
) -> RebuildPlan:
    """Topologically ordered re-check list for one set of edits."""
    if g.granularity is not Granularity.ITEM:
        raise ValueError("plan requires the item-granularity graph")
    granularity = Granularity(granularity)
    for name, _ in changes.changes:
        if name not in g:
            raise UnknownItemError(name)

    rev = g.reverse_reach()
    full_bits = 0
    pruned_bits = 0
    changed_bits = 0
    for name, kind in changes.changes:
        i = g.index_of(name)
        changed_bits |= 1 << i
        full_bits |= rev[i]
        if _propagates(g, name, kind, honor_opacity):
            pruned_bits |= rev[i]

    if granularity is Granularity.ITEM:
        recheck_bits = changed_bits | pruned_bits
        skipped_bits = (changed_bits | full_bits) & ~recheck_bits
        to_recheck = _names(g, recheck_bits)
        skipped = frozenset(_names(g, skipped_bits))
    else:
        file_rev = _file_reverse_closure(g)
        affected: set[str] = set()
        affected_full: set[str] = set()
        for name, kind in changes.changes:
            f = g.files[name]
            affected.add(f)
            affected_full.add(f)
            affected_full.update(file_rev[f])
            if _propagates(g, name, kind, honor_opacity):
                affected.update(file_rev[f])
        to_recheck = tuple(n for n in g.nodes if g.files[n] in affected)
        skipped = frozenset(
            n for n in g.nodes if g.files[n] in affected_full and g.files[n] not in affected
        )

    return RebuildPlan(
        to_recheck=to_recheck,
        skipped_opaque=skipped,
        granularity=granularity,
        cost=len(to_recheck),
        changed=tuple(name for name, _ in changes.changes),
    )


def _names(g: DepGraph, bits: int) -> tuple[str, ...]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(g.nodes[i] for i in sorted(out))


def _file_reverse_closure(g: DepGraph) -> dict[str, set[str]]:
    """Per file, the files that transitively depend on it (file-graph closure)."""
    file_order = list(dict.fromkeys(g.files[n] for n in g.nodes))
    fwd: dict[str, set[str]] = {f: set() for f in file_order}
    for edge in g.edges:
        sf, df = g.files[edge.src], g.files[edge.dst]
        if sf != df:
            fwd[sf].add(df)
    # Files are ordered like the corpus, so edges point at earlier files.
    reach: dict[str, set[str]] = {}
    for f in file_order:
        bits: set[str] = set()
        for dep in fwd[f]:
            bits.add(dep)
            bits.update(reach[dep])
        reach[f] = bits
    rev: dict[str, set[str]] = {f: set() for f in file_order}
    for f, deps in reach.items():
        for dep in deps:
            rev[dep].add(f)
    return rev


@dataclass(frozen=True, slots=True)
class ExecutionReport:
    passed: tuple[str, ...]
    failed: tuple[tuple[str, str], ...]
    missing: tuple[str, ...]
    verified_count: int

    def as_dict(self) -> dict:
        return {
            "passed": list(self.passed),
            "failed": [list(pair) for pair in self.failed],
            "missing": list(self.missing),
            "verified_count": self.verified_count,
        }


def execute(plan_: RebuildPlan, corpus: Corpus, reminimize: bool = False) -> ExecutionReport:
    """Re-check every planned item against the current corpus.

    Items are checked under their stored (full preceding) environments; with
    ``reminimize`` each environment is first trimmed again.  Failures are
    reported with reason codes, items no longer present are listed as
    missing; neither is an exception.
    """
    passed: list[str] = []
    failed: list[tuple[str, str]] = []
    missing: list[str] = []
    micros = {m.item.name: m for m in decompose(corpus)}
    for name in plan_.to_recheck:
        micro = micros.get(name)
        if micro is None:
            missing.append(name)
            continue
        env = micro.candidate_env
        if reminimize and corpus.accepts(micro.item, env):
            env = minimize_env(corpus, micro).minimal_env
        outcome = corpus.check_item(micro.item, env)
        if outcome.accepted:
            passed.append(name)
        else:
            reason = outcome.reason.value if outcome.reason else "rejected"
            failed.append((name, reason))
    return ExecutionReport(
        passed=tuple(passed),
        failed=tuple(failed),
        missing=tuple(missing),
        verified_count=len(passed) + len(failed),
    )


def speedup_report(g: DepGraph, samples: int, rng_seed: int = 42, jobs: int = 1) -> dict:
    """Plan costs for random single-item edits at both granularities.

    Draws ``samples`` items uniformly (with replacement, seeded); when
    ``samples`` equals the node count every node is used exactly once
    instead (exhaustive mode).  All edits are statement-level, the
    worst case for invalidation.  Plans are read-only over the graph, so
    ``jobs`` may fan them out across threads; results are reassembled in
    draw order and never depend on it.
    """
    if not g.nodes:
        raise ValueError("speedup_report needs a nonempty graph")
    if samples <= 0:
        raise ValueError("samples must be positive")
    if samples == len(g.nodes):
        picks = list(g.nodes)
    else:
        rng = random.Random(rng_seed)
        picks = [g.nodes[rng.randrange(len(g.nodes))] for _ in range(samples)]

    def costs_for(name: str) -> tuple[int, int]:
        change = ChangeSet.single(name)
        return (
            plan(g, change, Granularity.ITEM).cost,
            plan(g, change, Granularity.FILE).cost,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(costs_for, picks))
    else:
        pairs = [costs_for(name) for name in picks]
    item_costs = [item for item, _ in pairs]
    file_costs = [file for _, file in pairs]

    def _median(xs: list[int]) -> float:
        ordered = sorted(xs)
        mid = len(ordered) // 2
        if len(ordered) % 2:
            return float(ordered[mid])
        return (ordered[mid - 1] + ordered[mid]) / 2

    item_total, file_total = sum(item_costs), sum(file_costs)
    item_mean = item_total / len(picks)
    file_mean = file_total / len(picks)
    return {
        "samples": len(picks),
        "exhaustive": samples == len(g.nodes),
        "seed": rng_seed,
        "item_mean": item_mean,
        "file_mean": file_mean,
        "ratio": file_mean / item_mean if item_mean else 0.0,
        "item_median": _median(item_costs),
        "file_median": _median(file_costs),
        "item_total": item_total,
        "file_total": file_total,
    }
