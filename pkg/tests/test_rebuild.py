"""Re-verification planning, opacity pruning, execution, and speedup measurement."""

from __future__ import annotations

from fractions import Fraction

import pytest

from depkit.corpus import Corpus, Opacity, parse_source
from depkit.errors import UnknownItemError
from depkit.extract import trace_extract
from depkit.gen import generate_corpus
from depkit.graph import Granularity, build_graph, stats
from depkit.normalize import normalize_corpus
from depkit.rebuild import (
    ChangeKind,
    ChangeSet,
    execute,
    plan,
    speedup_report,
)

from _oracles import reachable_pairs_bruteforce
from conftest import corpus_from


def _generated(items: int, seed: int, family: str = "mixed", per_file: int = 10):
    files = generate_corpus(items=items, seed=seed, family=family, per_file=per_file)
    raw = Corpus([it for rel, text in files.items() for it in parse_source(text, rel)])
    corpus, _ = normalize_corpus(raw)
    return corpus, build_graph(corpus, trace_extract(corpus))


# plan ------------------------------------------------------------------------


def test_plan_leaf_item_costs_one(opaque_chain_corpus):
    g = build_graph(opaque_chain_corpus, trace_extract(opaque_chain_corpus))
    p = plan(g, ChangeSet.single("c"))
    assert p.to_recheck == ("c",)
    assert p.cost == 1
    assert p.skipped_opaque == frozenset()


def test_plan_chain_statement_change_rechecks_all(opaque_chain_corpus):
    g = build_graph(opaque_chain_corpus, trace_extract(opaque_chain_corpus))
    p = plan(g, ChangeSet.single("a", ChangeKind.STATEMENT_OR_TYPE), honor_opacity=True)
    assert p.to_recheck == ("a", "b", "c")


def test_plan_opaque_body_change_prunes_dependents(opaque_chain_corpus):
    corpus = opaque_chain_corpus
    assert corpus.item("a").opacity is Opacity.OPAQUE
    g = build_graph(corpus, trace_extract(corpus))
    p = plan(g, ChangeSet.single("a", ChangeKind.BODY_ONLY), honor_opacity=True)
    assert p.to_recheck == ("a",)
    assert p.skipped_opaque == frozenset({"b", "c"})
    # without the opacity flag the same change invalidates everything
    blunt = plan(g, ChangeSet.single("a", ChangeKind.BODY_ONLY), honor_opacity=False)
    assert blunt.to_recheck == ("a", "b", "c")


def test_plan_transparent_body_change_propagates():
    corpus = corpus_from(
        "def base := lit;\nthm dep : uses base by base;\n"
    )
    g = build_graph(corpus, trace_extract(corpus))
    p = plan(g, ChangeSet.single("base", ChangeKind.BODY_ONLY), honor_opacity=True)
    assert p.to_recheck == ("base", "dep")


def test_plan_file_granularity_rechecks_whole_files(tmp_path):
    (tmp_path / "one.art").write_text("def a := lit;\ndef unrelated := lit;\n")
    (tmp_path / "two.art").write_text("thm b : uses a by a;\n")
    from depkit.corpus import parse_corpus

    corpus = parse_corpus(tmp_path)
    g = build_graph(corpus, trace_extract(corpus))
    p = plan(g, ChangeSet.single("a"), granularity=Granularity.FILE)
    assert p.to_recheck == ("a", "unrelated", "b")
    assert p.cost == 3


def test_plan_requires_known_items(opaque_chain_corpus):
    g = build_graph(opaque_chain_corpus, trace_extract(opaque_chain_corpus))
    with pytest.raises(UnknownItemError):
        plan(g, ChangeSet.single("ghost"))


def test_plan_is_topologically_ordered_and_contains_changed():
    corpus, g = _generated(items=40, seed=17)
    order = {name: i for i, name in enumerate(g.nodes)}
    for name in list(g.nodes)[::5]:
        p = plan(g, ChangeSet.single(name))
        indices = [order[n] for n in p.to_recheck]
        assert indices == sorted(indices)
        assert name in p.to_recheck


def test_item_plans_contained_in_file_plans_1000_changes():
    import random

    rng = random.Random(99)
    corpora = [_generated(items=60, seed=s, per_file=10) for s in (31, 32, 33)]
    for _ in range(1000):
        corpus, g = corpora[rng.randrange(len(corpora))]
        name = g.nodes[rng.randrange(len(g.nodes))]
        kind = rng.choice([ChangeKind.BODY_ONLY, ChangeKind.STATEMENT_OR_TYPE])
        opacity = rng.random() < 0.5
        item_plan = plan(g, ChangeSet.single(name, kind), Granularity.ITEM, opacity)
        file_plan = plan(g, ChangeSet.single(name, kind), Granularity.FILE, opacity)
        assert set(item_plan.to_recheck) <= set(file_plan.to_recheck)


def test_opacity_pruning_never_skips_transparent_reverse_paths():
    for seed in (41, 42, 43):
        corpus, g = _generated(items=45, seed=seed)
        transparent_pairs = reachable_pairs_bruteforce(
            g.nodes,
            [e.pair() for e in g.edges if e.opacity is Opacity.TRANSPARENT],
        )
        for name in g.nodes:
            p = plan(g, ChangeSet.single(name, ChangeKind.BODY_ONLY), honor_opacity=True)
            for skipped in p.skipped_opaque:
                assert (skipped, name) not in transparent_pairs, (name, skipped)


# execute ---------------------------------------------------------------------


def test_execute_noop_change_all_pass(five_file_corpus):
    corpus, _ = normalize_corpus(five_file_corpus)
    g = build_graph(corpus, trace_extract(corpus))
    p = plan(g, ChangeSet.single("plus"))
    report = execute(p, corpus)
    assert report.failed == ()
    assert set(report.passed) == set(p.to_recheck)
    assert report.verified_count == p.cost


def test_execute_after_deleting_needed_definition(five_file_corpus):
    corpus, _ = normalize_corpus(five_file_corpus)
    g = build_graph(corpus, trace_extract(corpus))
    p = plan(g, ChangeSet.single("plus"))
    edited = Corpus([it for it in corpus.items if it.name != "plus"])
    report = execute(p, edited)
    assert report.missing == ("plus",)
    failures = dict(report.failed)
    assert failures["plus_zero"] == "UnresolvedSymbol"
    assert "plus_comm" in failures


def test_execute_body_edit_of_transparent_def_rechecks_and_passes():
    corpus = corpus_from(
        "def helper := lit;\ndef base := lit;\nthm dep : uses base by base;\n"
    )
    g = build_graph(corpus, trace_extract(corpus))
    p = plan(g, ChangeSet.single("base", ChangeKind.BODY_ONLY), honor_opacity=True)
    assert p.to_recheck == ("base", "dep")
    edited = corpus_from(
        "def helper := lit;\ndef base := helper;\nthm dep : uses base by base;\n"
    )
    report = execute(p, edited)
    assert report.failed == ()
    assert set(report.passed) == {"base", "dep"}
    # an edit that breaks the body surfaces as a coded failure instead
    broken = corpus_from(
        "def helper := lit;\ndef base := missing;\nthm dep : uses base by base;\n"
    )
    report = execute(p, broken)
    assert dict(report.failed)["base"] == "UnresolvedSymbol"
    assert "dep" in report.passed


def test_execute_with_reminimize(five_file_corpus):
    corpus, _ = normalize_corpus(five_file_corpus)
    g = build_graph(corpus, trace_extract(corpus))
    p = plan(g, ChangeSet.single("nat"))
    assert execute(p, corpus, reminimize=True).failed == ()


# speedup_report --------------------------------------------------------------


def test_speedup_edgeless_one_item_per_file_ratio_is_one():
    corpus = corpus_from("def a := lit;", "a.art")
    items = list(corpus.items)
    for extra in ("b", "c"):
        items += parse_source(f"def {extra} := lit;", f"{extra}.art")
    corpus = Corpus(items)
    g = build_graph(corpus, [])
    report = speedup_report(g, samples=3)  # exhaustive: samples == items
    assert report["exhaustive"]
    assert report["item_mean"] == report["file_mean"] == 1.0
    assert report["ratio"] == 1.0


def test_speedup_matches_brute_force_recount_seed_42():
    corpus, g = _generated(items=100, seed=42, per_file=10)
    samples = 60
    report = speedup_report(g, samples=samples, rng_seed=42)

    import random

    rng = random.Random(42)
    picks = [g.nodes[rng.randrange(len(g.nodes))] for _ in range(samples)]
    item_pairs = reachable_pairs_bruteforce(g.nodes, [e.pair() for e in g.edges])
    files_of = {it.name: it.source_file for it in corpus.items}
    file_edges = {
        (files_of[s], files_of[d]) for s, d in (e.pair() for e in g.edges)
        if files_of[s] != files_of[d]
    }
    file_nodes = list(dict.fromkeys(files_of[n] for n in g.nodes))
    file_pairs = reachable_pairs_bruteforce(file_nodes, file_edges)
    item_total = 0
    file_total = 0
    for name in picks:
        item_total += 1 + sum(1 for (a, b) in item_pairs if b == name)
        affected = {files_of[name]} | {a for (a, b) in file_pairs if b == files_of[name]}
        file_total += sum(1 for n in g.nodes if files_of[n] in affected)
    assert report["item_total"] == item_total
    assert report["file_total"] == file_total
    assert report["ratio"] == pytest.approx((file_total / samples) / (item_total / samples))


def test_speedup_exhaustive_mean_equals_arl_plus_one():
    corpus, g = _generated(items=80, seed=7, per_file=8)
    report = speedup_report(g, samples=len(g.nodes))
    assert report["exhaustive"]
    s = stats(g)
    lhs = Fraction(report["item_total"], report["samples"]) - 1
    rhs = Fraction(s.tdeps, s.items)
    assert lhs == rhs
    assert report["item_mean"] - 1 == pytest.approx(s.arl)


def test_speedup_reproducible_for_same_seed():
    _, g = _generated(items=50, seed=3)
    assert speedup_report(g, 20, rng_seed=5) == speedup_report(g, 20, rng_seed=5)
    assert speedup_report(g, 20, rng_seed=5) != speedup_report(g, 20, rng_seed=6)
