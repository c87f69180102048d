"""Value graph, Hopcroft-Karp, covering extension and the edge filter."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynalldiff.errors import UncoveredVariable, UnknownEdge
from dynalldiff.matching import (
    Matching,
    OpCounters,
    add_edges,
    build_value_graph,
    compute_maximum_matching,
    graph_checksum,
    matching_covering_x,
    remove_edges,
    remove_edges_from_g,
)
from dynalldiff.oracle import edges_in_some_max_matching, max_matching_bruteforce

A, B, C, D, E = 0, 1, 2, 3, 4

TRIPLE = [(0, {A, B}), (1, {A, B}), (2, {A, B, C})]


def random_graph(rng, p_max=7, d_max=7, edge_cap=24):
    p = rng.randint(1, p_max)
    d = rng.randint(1, d_max)
    domains = []
    for _ in range(p):
        size = rng.randint(1, d)
        domains.append(set(rng.sample(range(d), size)))
    while sum(len(dom) for dom in domains) > edge_cap:
        victim = rng.randrange(p)
        if len(domains[victim]) > 1:
            domains[victim].discard(rng.choice(sorted(domains[victim])))
    return [(i, dom) for i, dom in enumerate(domains)]


def test_build_triple_shape():
    graph = build_value_graph(TRIPLE)
    assert len(graph.var_vertices) == 3
    assert len(graph.val_vertices) == 3
    assert graph.m == 7


def test_build_empty():
    graph = build_value_graph([])
    assert graph.var_vertices == [] and graph.val_vertices == [] and graph.m == 0


def test_build_singleton():
    graph = build_value_graph([(0, {A})])
    assert (len(graph.var_vertices), len(graph.val_vertices), graph.m) == (1, 1, 1)


def test_maximum_matching_triple_covers():
    graph = build_value_graph(TRIPLE)
    matching = compute_maximum_matching(graph)
    assert matching.size == 3
    assert matching.covers([0, 1, 2])


def test_maximum_matching_shared_single_value():
    graph = build_value_graph([(0, {A}), (1, {A})])
    assert compute_maximum_matching(graph).size == 1


def test_maximum_matching_vs_oracle_200_random():
    rng = random.Random(42)
    for _ in range(200):
        entries = random_graph(rng)
        graph = build_value_graph(entries)
        size = compute_maximum_matching(graph).size
        assert size == max_matching_bruteforce(graph.edges())


def test_matching_validity_invariant():
    rng = random.Random(11)
    for _ in range(100):
        graph = build_value_graph(random_graph(rng))
        matching = compute_maximum_matching(graph)
        for var, val in matching.pair_of_var.items():
            assert matching.pair_of_val[val] == var
            assert graph.has_edge(var, val)


def test_no_augmenting_path_certificate():
    # maximality: alternating BFS from any unmatched variable finds no free value
    rng = random.Random(13)
    for _ in range(60):
        graph = build_value_graph(random_graph(rng))
        matching = compute_maximum_matching(graph)
        for start in graph.var_vertices:
            if start in matching.pair_of_var:
                continue
            seen_vars = {start}
            frontier = [start]
            while frontier:
                nxt = []
                for var in frontier:
                    for val in graph.adj_var[var]:
                        owner = matching.pair_of_val.get(val)
                        assert owner is not None, "augmenting path exists"
                        if owner not in seen_vars:
                            seen_vars.add(owner)
                            nxt.append(owner)
                frontier = nxt


def test_covering_already_covered_returns_equal():
    graph = build_value_graph(TRIPLE)
    matching = compute_maximum_matching(graph)
    extended = matching_covering_x(graph, matching)
    assert extended.pair_of_var == matching.pair_of_var


def test_covering_late_adoption_extension():
    graph = build_value_graph(TRIPLE)
    matching = compute_maximum_matching(graph)
    remove_edges_from_g(graph, matching)
    add_edges(graph, [(3, C), (3, D), (4, D), (4, E)])
    extended = matching_covering_x(graph, matching)
    assert extended is not None
    assert extended.size == 5
    # previously covered variables stay covered
    for var in (0, 1, 2):
        assert var in extended.pair_of_var
    # oracle agreement on the extended graph
    assert extended.size == max_matching_bruteforce(graph.edges())


def test_covering_pigeonhole_returns_none():
    graph = build_value_graph([(0, {A}), (1, {A})])
    matching = Matching()
    matching.match(0, A)
    assert matching_covering_x(graph, matching) is None


def test_covering_extension_size_matches_scratch():
    rng = random.Random(17)
    for _ in range(100):
        entries = random_graph(rng)
        graph = build_value_graph(entries)
        # cover a random prefix first, then extend to everything
        prefix = rng.randint(0, len(entries))
        partial = build_value_graph(entries[:prefix])
        matching = compute_maximum_matching(partial)
        if matching.size < prefix:
            continue
        extended = matching_covering_x(graph, matching)
        scratch = compute_maximum_matching(graph)
        if extended is None:
            assert scratch.size < len(entries)
        else:
            assert extended.size == len(entries) == scratch.size


def test_filter_triple_removes_two_edges():
    graph = build_value_graph(TRIPLE)
    matching = compute_maximum_matching(graph)
    removed = remove_edges_from_g(graph, matching)
    assert sorted(removed) == [(2, A), (2, B)]
    assert sorted(graph.adj_var[2]) == [C]


def test_filter_symmetric_square_removes_nothing():
    graph = build_value_graph([(0, {A, B}), (1, {A, B})])
    matching = compute_maximum_matching(graph)
    assert remove_edges_from_g(graph, matching) == []


def test_filter_500_random_vs_oracle():
    rng = random.Random(23)
    done = 0
    while done < 500:
        entries = random_graph(rng, p_max=6, d_max=6)
        graph = build_value_graph(entries)
        matching = compute_maximum_matching(graph)
        if matching.size < len(entries):
            continue  # only covered graphs are in the filter's contract
        done += 1
        expected_kept = edges_in_some_max_matching(graph.edges())
        removed = remove_edges_from_g(graph, matching)
        assert set(graph.edges()) == expected_kept
        assert not set(removed) & expected_kept
        # matched edges are never removed
        assert all(
            matching.pair_of_var.get(var) != val for var, val in removed
        )


def test_filter_uncovered_precondition():
    graph = build_value_graph([(0, {A}), (1, {A})])
    matching = Matching()
    matching.match(0, A)
    with pytest.raises(UncoveredVariable):
        remove_edges_from_g(graph, matching)


def test_add_edges_late_adoption():
    graph = build_value_graph(TRIPLE)
    matching = compute_maximum_matching(graph)
    remove_edges_from_g(graph, matching)
    added = add_edges(graph, [(3, C), (3, D), (4, D), (4, E)])
    assert added == 4
    assert len(graph.var_vertices) == 5
    assert len(graph.val_vertices) == 5


def test_add_edges_duplicate_ignored():
    graph = build_value_graph([(0, {A})])
    assert add_edges(graph, [(0, A)]) == 0
    assert graph.m == 1


def test_add_edges_to_empty():
    graph = build_value_graph([])
    add_edges(graph, [(0, A)])
    assert (len(graph.var_vertices), len(graph.val_vertices), graph.m) == (1, 1, 1)


def test_remove_edges_unmatched_keeps_matching():
    graph = build_value_graph([(0, {A, B}), (1, {B})])
    matching = compute_maximum_matching(graph)
    before = dict(matching.pair_of_var)
    assert remove_edges(graph, matching, [(0, B)]) is False
    assert matching.pair_of_var == before


def test_remove_edges_matched_uncovers():
    graph = build_value_graph([(0, {A, B}), (1, {B})])
    matching = compute_maximum_matching(graph)
    matched_val = matching.pair_of_var[0]
    assert remove_edges(graph, matching, [(0, matched_val)]) is True
    assert 0 not in matching.pair_of_var


def test_remove_edges_mixed_count():
    graph = build_value_graph([(0, {A, B, C}), (1, {B})])
    matching = compute_maximum_matching(graph)
    size_before = matching.size
    doomed = [(0, val) for val in (A, B, C) if graph.has_edge(0, val)]
    matched = matching.pair_of_var[0]
    assert matched in {val for _, val in doomed}
    assert remove_edges(graph, matching, doomed) is True
    assert matching.size == size_before - 1


def test_remove_edges_unknown_edge():
    graph = build_value_graph([(0, {A})])
    with pytest.raises(UnknownEdge):
        remove_edges(graph, Matching(), [(0, B)])


def test_checksum_order_independent():
    g1 = build_value_graph([(0, {A, B}), (1, {B, C})])
    g2 = build_value_graph([(1, {C, B}), (0, {B, A})])
    m = Matching()
    assert graph_checksum(g1, m) == graph_checksum(g2, m)


def test_checksum_sensitive_to_edges_and_matching():
    g1 = build_value_graph([(0, {A, B})])
    g2 = build_value_graph([(0, {A, B})])
    m1, m2 = Matching(), Matching()
    assert graph_checksum(g1, m1) == graph_checksum(g2, m2)
    g2.remove_edge(0, B)
    assert graph_checksum(g1, m1) != graph_checksum(g2, m2)
    m2.match(0, A)
    g2.add_edge(0, B)
    assert graph_checksum(g1, m1) != graph_checksum(g2, m2)


@settings(max_examples=120, deadline=None, derandomize=True)
@given(
    st.lists(
        st.sets(st.integers(min_value=0, max_value=5), min_size=1, max_size=6),
        min_size=1,
        max_size=6,
    )
)
def test_property_matching_size_equals_oracle(domains):
    entries = [(i, dom) for i, dom in enumerate(domains)]
    if sum(len(dom) for dom in domains) > 24:
        return
    graph = build_value_graph(entries)
    assert compute_maximum_matching(graph).size == max_matching_bruteforce(
        graph.edges()
    )


@settings(max_examples=120, deadline=None, derandomize=True)
@given(
    st.lists(
        st.sets(st.integers(min_value=0, max_value=5), min_size=1, max_size=6),
        min_size=1,
        max_size=5,
    )
)
def test_property_filter_keeps_exactly_matchable_edges(domains):
    entries = [(i, dom) for i, dom in enumerate(domains)]
    if sum(len(dom) for dom in domains) > 24:
        return
    graph = build_value_graph(entries)
    matching = compute_maximum_matching(graph)
    if matching.size < len(entries):
        return
    expected = edges_in_some_max_matching(graph.edges())
    remove_edges_from_g(graph, matching)
    assert set(graph.edges()) == expected


def test_counters_accumulate():
    counters = OpCounters()
    graph = build_value_graph(TRIPLE)
    matching = compute_maximum_matching(graph, counters)
    assert counters.augment_visits > 0
    remove_edges_from_g(graph, matching, counters)
    assert counters.filter_visits > 0
