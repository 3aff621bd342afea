"""Graph construction, closure, statistics, and exports."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from depkit.corpus import Corpus, DepEdge, Opacity, Visibility, parse_source
from depkit.errors import CycleDetectedError, UnknownItemError
from depkit.extract import extract_corpus, trace_extract
from depkit.gen import generate_corpus
from depkit.graph import (
    Granularity,
    GraphStats,
    build_graph,
    build_graph_from_edges,
    cumulative_csv,
    kind_table,
    load_set,
    reverse_cumulative,
    stats,
    to_dot,
    transitive_closure,
)
from depkit.normalize import normalize_corpus

from _oracles import reachable_pairs_bruteforce
from conftest import corpus_from


def _chain3() -> tuple[Corpus, list[DepEdge]]:
    corpus = corpus_from("def a := lit;\nthm b : uses a by a;\nthm c : uses b by b;\n")
    return corpus, trace_extract(corpus)


def _edge(src, dst, vis=Visibility.EXPLICIT, opa=Opacity.TRANSPARENT) -> DepEdge:
    return DepEdge(src, dst, vis, opa)


# build_graph -----------------------------------------------------------------


def test_single_file_chain_projects_to_one_file_node():
    corpus, edges = _chain3()
    g = build_graph(corpus, edges, Granularity.FILE)
    assert g.nodes == ("inline.art",)
    assert g.edges == ()


def test_two_file_projection(tmp_path):
    (tmp_path / "file1.art").write_text("def a := lit;\n")
    (tmp_path / "file2.art").write_text("thm b : uses a by a;\n")
    from depkit.corpus import parse_corpus

    corpus = parse_corpus(tmp_path)
    g = build_graph(corpus, trace_extract(corpus), Granularity.FILE)
    assert [(e.src, e.dst) for e in g.edges] == [("file2.art", "file1.art")]


def test_five_file_fixture_file_edges_match_hand_count(five_file_corpus):
    normalized, _ = normalize_corpus(five_file_corpus)
    g = build_graph(normalized, trace_extract(normalized), Granularity.FILE)
    assert {(e.src, e.dst) for e in g.edges} == {
        ("b.art", "a.art"),
        ("c.art", "a.art"),
        ("c.art", "b.art"),
        ("d.art", "c.art"),
        ("e.art", "d.art"),
    }


def test_unknown_item_rejected(redundant_hint_corpus):
    with pytest.raises(UnknownItemError):
        build_graph(redundant_hint_corpus, [_edge("t", "nowhere")])


def test_forward_edge_rejected(redundant_hint_corpus):
    with pytest.raises(CycleDetectedError):
        build_graph(redundant_hint_corpus, [_edge("f", "t")])


def test_build_graph_from_edges_topologically_sorts():
    g = build_graph_from_edges([_edge("c", "b"), _edge("b", "a")])
    assert g.nodes == ("a", "b", "c")
    with pytest.raises(CycleDetectedError):
        build_graph_from_edges([_edge("a", "b"), _edge("b", "a")])


# transitive_closure ----------------------------------------------------------


def test_closure_of_chain_matches_brute_force():
    corpus, edges = _chain3()
    g = build_graph(corpus, edges)
    closed = transitive_closure(g)
    assert {(e.src, e.dst) for e in closed.edges} == {("b", "a"), ("c", "b"), ("c", "a")}
    oracle = reachable_pairs_bruteforce(g.nodes, [e.pair() for e in g.edges])
    assert {(e.src, e.dst) for e in closed.edges} == oracle


def test_closure_identity_on_edgeless_graph(redundant_hint_corpus):
    g = build_graph(redundant_hint_corpus, [])
    assert transitive_closure(g).edges == ()


def test_closure_idempotent():
    corpus, edges = _chain3()
    closed = transitive_closure(build_graph(corpus, edges))
    again = transitive_closure(closed)
    assert again.edges == closed.edges


def test_closure_matches_brute_force_on_generated_corpora():
    for seed in (2, 6):
        files = generate_corpus(items=26, seed=seed, family="mixed")
        raw = Corpus([it for rel, text in files.items() for it in parse_source(text, rel)])
        corpus, _ = normalize_corpus(raw)
        g = build_graph(corpus, trace_extract(corpus))
        closed = {(e.src, e.dst) for e in transitive_closure(g).edges}
        assert closed == reachable_pairs_bruteforce(g.nodes, [e.pair() for e in g.edges])


def test_closure_only_edge_attributes_follow_witnessing_paths():
    corpus = corpus_from(
        "def a := lit;\n"
        "def b : a := lit;\n"
        "thm c : uses b by b;\n"   # c -> b (opaque target? b transparent)
    )
    # b -> a transparent, c -> b transparent: closure edge c -> a transparent
    g = build_graph(corpus, trace_extract(corpus))
    closed = {(e.src, e.dst): e for e in transitive_closure(g).edges}
    assert closed[("c", "a")].opacity is Opacity.TRANSPARENT
    # with an opaque middle item every path to the root is blocked
    corpus2 = corpus_from(
        "def a := lit;\n"
        "def opaque b : a := lit;\n"
        "thm c : uses b by b;\n"
    )
    g2 = build_graph(corpus2, trace_extract(corpus2))
    closed2 = {(e.src, e.dst): e for e in transitive_closure(g2).edges}
    assert closed2[("c", "b")].opacity is Opacity.OPAQUE
    assert closed2[("c", "a")].opacity is Opacity.OPAQUE


# stats -----------------------------------------------------------------------


def test_stats_chain_of_three():
    corpus, edges = _chain3()
    s = stats(build_graph(corpus, edges))
    assert (s.items, s.deps, s.tdeps) == (3, 2, 3)
    assert s.p == 100.0
    assert s.arl == 1.0
    assert s.mrl == 1.0


def test_stats_from_published_pairs():
    corn_item = GraphStats.from_counts(items=9462, tdeps=3_614_445)
    assert abs(corn_item.p - 8.0) <= 0.1
    assert abs(corn_item.arl - 382.0) <= 0.5
    corn_file = GraphStats.from_counts(items=9462, tdeps=24_385_358)
    assert abs(corn_file.p - 54.5) <= 0.1
    assert abs(corn_file.arl - 2577.2) <= 0.5


def test_stats_streaming_equals_materialized_closure():
    for seed in (1, 4):
        files = generate_corpus(items=24, seed=seed, family="mixed")
        raw = Corpus([it for rel, text in files.items() for it in parse_source(text, rel)])
        corpus, _ = normalize_corpus(raw)
        g = build_graph(corpus, trace_extract(corpus))
        s = stats(g)
        closed = transitive_closure(g)
        assert s.tdeps == len(closed.edges)
        recomputed = GraphStats.from_counts(
            items=len(g.nodes),
            tdeps=len(closed.edges),
            deps=len(g.edges),
            reverse_counts=g.reverse_counts(),
        )
        assert recomputed == s


@given(st.integers(min_value=2, max_value=400), st.integers(min_value=0))
def test_stats_formulas(items, tdeps):
    tdeps = tdeps % (items * (items - 1) // 2 + 1)
    s = GraphStats.from_counts(items=items, tdeps=tdeps)
    assert s.p == pytest.approx(100.0 * tdeps / (items * (items - 1) / 2))
    assert s.arl == pytest.approx(tdeps / items)


def test_kind_table_single_dependency():
    corpus = corpus_from("def d := lit;\nthm t : uses d by d;\n")
    table = kind_table(build_graph(corpus, trace_extract(corpus)))
    assert table["theorem"]["from"] == 1
    assert table["definition"]["to"] == 1


def test_kind_table_hints_differ_between_methods(redundant_hint_corpus):
    result = extract_corpus(redundant_hint_corpus, mode="both")
    trace_table = kind_table(build_graph(redundant_hint_corpus, result.trace_edges))
    min_table = kind_table(build_graph(redundant_hint_corpus, result.min_edges))
    assert trace_table["hint"]["to"] == 2
    assert min_table["hint"]["to"] == 1


def test_kind_table_from_counts_partition_deps(five_file_corpus):
    normalized, _ = normalize_corpus(five_file_corpus)
    g = build_graph(normalized, trace_extract(normalized))
    table = kind_table(g)
    assert sum(row["from"] for row in table.values()) == len(g.edges)
    assert sum(row["to"] for row in table.values()) == len(g.edges)


def test_closure_counts_dfs_fallback_matches_bitsets():
    for seed in (3, 9):
        files = generate_corpus(items=40, seed=seed, family="mixed")
        raw = Corpus([it for rel, text in files.items() for it in parse_source(text, rel)])
        corpus, _ = normalize_corpus(raw)
        g = build_graph(corpus, trace_extract(corpus))
        assert g.closure_counts("bitset") == g.closure_counts("dfs")
        assert g.closure_counts("auto") == g.closure_counts("bitset")
    with pytest.raises(ValueError):
        g.closure_counts("quantum")


# reverse_cumulative ----------------------------------------------------------


def test_reverse_cumulative_chain():
    corpus, edges = _chain3()
    assert reverse_cumulative(build_graph(corpus, edges)) == [(0, 1), (1, 2), (2, 3)]


def test_reverse_cumulative_edgeless(redundant_hint_corpus):
    g = build_graph(redundant_hint_corpus, [])
    assert reverse_cumulative(g) == [(0, 5)]


def test_reverse_cumulative_is_monotone(five_file_corpus):
    normalized, _ = normalize_corpus(five_file_corpus)
    g = build_graph(normalized, trace_extract(normalized))
    counts = [count for _, count in reverse_cumulative(g)]
    assert counts == sorted(counts)
    assert counts[-1] == len(g.nodes)


# load_set --------------------------------------------------------------------


def test_load_set_isolated_item():
    corpus = corpus_from("def a := lit;")
    g = build_graph(corpus, [])
    assert load_set(g, "a") == ["a"]


def test_load_set_chain():
    corpus, edges = _chain3()
    g = build_graph(corpus, edges)
    assert load_set(g, "c") == ["a", "b", "c"]


def test_load_set_subset_of_prefix(five_file_corpus):
    normalized, _ = normalize_corpus(five_file_corpus)
    g = build_graph(normalized, trace_extract(normalized))
    order = {name: i for i, name in enumerate(g.nodes)}
    for name in g.nodes:
        loaded = load_set(g, name)
        assert loaded[-1] == name
        indices = [order[n] for n in loaded]
        assert indices == sorted(indices)
        assert all(i <= order[name] for i in indices)
    with pytest.raises(UnknownItemError):
        load_set(g, "ghost")


def test_projection_monotonicity(five_file_corpus):
    """Counted in items, file-based invalidation covers item-based."""
    normalized, _ = normalize_corpus(five_file_corpus)
    edges = trace_extract(normalized)
    item_g = build_graph(normalized, edges, Granularity.ITEM)
    file_g = build_graph(normalized, edges, Granularity.FILE)
    item_counts = dict(zip(item_g.nodes, item_g.reverse_counts()))
    files_of = {it.name: it.source_file for it in normalized.items}
    file_sizes: dict[str, int] = {}
    for f in files_of.values():
        file_sizes[f] = file_sizes.get(f, 0) + 1
    file_rev = dict(zip(file_g.nodes, file_g.reverse_reach()))
    for name, count in item_counts.items():
        home = files_of[name]
        bits = file_rev[home]
        affected = {home}
        while bits:
            low = bits & -bits
            affected.add(file_g.nodes[low.bit_length() - 1])
            bits ^= low
        items_invalidated = sum(file_sizes[f] for f in affected) - 1  # not x itself
        assert items_invalidated >= count


# exports ---------------------------------------------------------------------


def test_dot_and_csv_exports_are_deterministic(redundant_hint_corpus):
    result = extract_corpus(redundant_hint_corpus, mode="trace")
    g1 = build_graph(redundant_hint_corpus, result.trace_edges)
    g2 = build_graph(redundant_hint_corpus, list(result.trace_edges))
    assert to_dot(g1) == to_dot(g2)
    assert cumulative_csv(g1) == cumulative_csv(g2)
    assert to_dot(g1).startswith("digraph deps {")
    assert cumulative_csv(g1).splitlines()[0] == "threshold,item_count"
