"""Value graphs, maximum matchings and the not-in-any-matching edge filter.

The graph is bipartite: variable vertices on one side, value vertices on the
other, with an edge (x, a) whenever value a is in x's domain at the time of
the last synchronisation.  Vertices are never deleted by edge removal; a
value vertex whose degree drops to zero simply stays inert, which keeps
indices stable for trail deltas.

Orientation convention, fixed project wide: matched edges point value to
variable, unmatched edges point variable to value.
"""

from __future__ import annotations

import hashlib
from collections import deque
from typing import Iterable, Optional

from .errors import UncoveredVariable, UnknownEdge

_INF = -1


class OpCounters:
    """Monotone work counters shared by the store and the graph algorithms."""

    def __init__(self):
        self.augment_visits = 0
        self.filter_visits = 0
        self.trailed_cells = 0

    def snapshot(self) -> tuple[int, int, int]:
        return (self.augment_visits, self.filter_visits, self.trailed_cells)


class ValueGraph:
    """Bipartite variable/value graph with both adjacency directions."""

    def __init__(self):
        self.adj_var: dict[int, set[int]] = {}
        self.adj_val: dict[int, set[int]] = {}
        self.edge_count = 0

    @property
    def var_vertices(self) -> list[int]:
        return list(self.adj_var)

    @property
    def val_vertices(self) -> list[int]:
        return list(self.adj_val)

    @property
    def m(self) -> int:
        return self.edge_count

    def has_var(self, var: int) -> bool:
        return var in self.adj_var

    def add_var_vertex(self, var: int) -> bool:
        if var in self.adj_var:
            return False
        self.adj_var[var] = set()
        return True

    def add_val_vertex(self, val: int) -> bool:
        if val in self.adj_val:
            return False
        self.adj_val[val] = set()
        return True

    def has_edge(self, var: int, val: int) -> bool:
        return var in self.adj_var and val in self.adj_var[var]

    def add_edge(self, var: int, val: int) -> bool:
        """Insert (var, val), creating endpoints as needed; False on duplicate."""
        self.add_var_vertex(var)
        self.add_val_vertex(val)
        if val in self.adj_var[var]:
            return False
        self.adj_var[var].add(val)
        self.adj_val[val].add(var)
        self.edge_count += 1
        return True

    def remove_edge(self, var: int, val: int) -> None:
        self.adj_var[var].discard(val)
        self.adj_val[val].discard(var)
        self.edge_count -= 1

    def pop_var_vertex(self, var: int) -> None:
        """Remove a variable vertex; its edges must already be gone."""
        assert not self.adj_var[var]
        del self.adj_var[var]

    def pop_val_vertex(self, val: int) -> None:
        assert not self.adj_val[val]
        del self.adj_val[val]

    def edges(self) -> list[tuple[int, int]]:
        return [
            (var, val) for var, vals in self.adj_var.items() for val in sorted(vals)
        ]


class Matching:
    """Mutually inverse variable->value and value->variable pairings."""

    def __init__(self):
        self.pair_of_var: dict[int, int] = {}
        self.pair_of_val: dict[int, int] = {}

    @property
    def size(self) -> int:
        return len(self.pair_of_var)

    def copy(self) -> "Matching":
        twin = Matching()
        twin.pair_of_var = dict(self.pair_of_var)
        twin.pair_of_val = dict(self.pair_of_val)
        return twin

    def match(self, var: int, val: int) -> None:
        self.pair_of_var[var] = val
        self.pair_of_val[val] = var

    def unmatch(self, var: int, val: int) -> None:
        del self.pair_of_var[var]
        del self.pair_of_val[val]

    def covers(self, variables: Iterable[int]) -> bool:
        return all(var in self.pair_of_var for var in variables)


def build_value_graph(
    variable_domains: Iterable[tuple[int, Iterable[int]]]
) -> ValueGraph:
    """One variable vertex per entry, value vertices in first-seen order."""
    graph = ValueGraph()
    for var, domain in variable_domains:
        graph.add_var_vertex(var)
        for val in sorted(domain):
            graph.add_edge(var, val)
    return graph


def _augment_phase(
    graph: ValueGraph,
    matching: Matching,
    sources: list[int],
    counters: Optional[OpCounters],
) -> int:
    """One Hopcroft-Karp phase: layered BFS from sources, then shortest DFS.

    Returns the number of augmenting paths applied.  Sources must be
    currently unmatched variable vertices.
    """
    dist = {var: _INF for var in graph.adj_var}
    queue: deque[int] = deque()
    for var in sources:
        dist[var] = 0
        queue.append(var)
    shortest = _INF
    while queue:
        var = queue.popleft()
        if counters is not None:
            counters.augment_visits += 1
        if shortest != _INF and dist[var] >= shortest:
            continue
        for val in sorted(graph.adj_var[var]):
            owner = matching.pair_of_val.get(val)
            if owner is None:
                if shortest == _INF:
                    shortest = dist[var] + 1
            elif dist[owner] == _INF:
                dist[owner] = dist[var] + 1
                queue.append(owner)
    if shortest == _INF:
        return 0

    def dfs(var: int) -> bool:
        if counters is not None:
            counters.augment_visits += 1
        for val in sorted(graph.adj_var[var]):
            owner = matching.pair_of_val.get(val)
            if owner is None:
                if dist[var] + 1 == shortest:
                    matching.match(var, val)
                    return True
            elif dist[owner] == dist[var] + 1:
                if dfs(owner):
                    matching.match(var, val)
                    return True
        dist[var] = _INF
        return False

    applied = 0
    for var in sources:
        if var not in matching.pair_of_var and dist[var] == 0:
            if dfs(var):
                applied += 1
    return applied


def compute_maximum_matching(
    graph: ValueGraph, counters: Optional[OpCounters] = None
) -> Matching:
    """Hopcroft-Karp maximum matching; deterministic via sorted adjacency."""
    matching = Matching()
    while True:
        free = [v for v in graph.adj_var if v not in matching.pair_of_var]
        if not free or _augment_phase(graph, matching, free, counters) == 0:
            return matching


def matching_covering_x(
    graph: ValueGraph, matching: Matching, counters: Optional[OpCounters] = None
) -> Optional[Matching]:
    """Extend `matching` to cover every variable vertex, or return None.

    Augments from the currently uncovered variables only; covered variables
    may be rerouted but stay covered.  The input matching is not mutated.
    """
    work = matching.copy()
    while True:
        uncovered = [v for v in graph.adj_var if v not in work.pair_of_var]
        if not uncovered:
            return work
        if _augment_phase(graph, work, uncovered, counters) == 0:
            return None


def remove_edges_from_g(
    graph: ValueGraph,
    matching: Matching,
    counters: Optional[OpCounters] = None,
) -> list[tuple[int, int]]:
    """Delete and return every edge that is in no matching covering X.

    Kept edges are the matched ones, those on an alternating cycle (same
    strongly connected component of the oriented graph) and those on an even
    alternating path from a free value vertex.  Runs in O(m + p + d).
    """
    for var in graph.adj_var:
        if var not in matching.pair_of_var:
            raise UncoveredVariable(f"variable {var} is not covered")

    # Tarjan SCC over the oriented graph; vertices are ('x', var) / ('v', val).
    index: dict[tuple[str, int], int] = {}
    low: dict[tuple[str, int], int] = {}
    on_stack: set[tuple[str, int]] = set()
    stack: list[tuple[str, int]] = []
    component: dict[tuple[str, int], int] = {}
    next_index = 0
    next_component = 0

    def successors(node: tuple[str, int]) -> list[tuple[str, int]]:
        side, vertex = node
        if side == "x":
            matched = matching.pair_of_var[vertex]
            return [("v", val) for val in sorted(graph.adj_var[vertex]) if val != matched]
        owner = matching.pair_of_val.get(vertex)
        return [("x", owner)] if owner is not None else []

    all_nodes = [("x", var) for var in graph.adj_var] + [
        ("v", val) for val in graph.adj_val
    ]
    for root in all_nodes:
        if root in index:
            continue
        # iterative Tarjan: (node, iterator over successors)
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = next_index
        next_index += 1
        stack.append(root)
        on_stack.add(root)
        if counters is not None:
            counters.filter_visits += 1
        while work:
            node, succ_iter = work[-1]
            advanced = False
            for nxt in succ_iter:
                if nxt not in index:
                    index[nxt] = low[nxt] = next_index
                    next_index += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    if counters is not None:
                        counters.filter_visits += 1
                    work.append((nxt, iter(successors(nxt))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component[member] = next_component
                    if member == node:
                        break
                next_component += 1

    # Even alternating paths from free value vertices: walk the transposed
    # orientation (unmatched val->var, matched var->val) with a BFS.
    reached_vals = {val for val in graph.adj_val if val not in matching.pair_of_val}
    seen_vars: set[int] = set()
    queue: deque[int] = deque(sorted(reached_vals))
    while queue:
        val = queue.popleft()
        if counters is not None:
            counters.filter_visits += 1
        for var in sorted(graph.adj_val[val]):
            if var in seen_vars or matching.pair_of_var[var] == val:
                continue
            seen_vars.add(var)
            if counters is not None:
                counters.filter_visits += 1
            matched_val = matching.pair_of_var[var]
            if matched_val not in reached_vals:
                reached_vals.add(matched_val)
                queue.append(matched_val)

    removed: list[tuple[int, int]] = []
    for var in graph.adj_var:
        matched = matching.pair_of_var[var]
        for val in sorted(graph.adj_var[var]):
            if val == matched:
                continue
            if component[("x", var)] == component[("v", val)]:
                continue
            if val in reached_vals:
                continue
            removed.append((var, val))
    for var, val in removed:
        graph.remove_edge(var, val)
    return removed


def add_edges(graph: ValueGraph, new_edges: Iterable[tuple[int, int]]) -> int:
    """Insert edges (duplicates ignored); returns how many were new."""
    added = 0
    for var, val in new_edges:
        if graph.add_edge(var, val):
            added += 1
    return added


def remove_edges(
    graph: ValueGraph, matching: Matching, doomed: Iterable[tuple[int, int]]
) -> bool:
    """Delete edges from the graph and matching; True iff a matched edge fell."""
    damaged = False
    for var, val in doomed:
        if not graph.has_edge(var, val):
            raise UnknownEdge(f"edge ({var}, {val}) not in graph")
        if matching.pair_of_var.get(var) == val:
            matching.unmatch(var, val)
            damaged = True
        graph.remove_edge(var, val)
    return damaged


def graph_checksum(graph: ValueGraph, matching: Matching) -> str:
    """Order-independent digest of vertex sets, edge set and matching pairs."""
    state = (
        tuple(sorted(graph.adj_var)),
        tuple(sorted(graph.adj_val)),
        tuple(sorted((v, a) for v, vals in graph.adj_var.items() for a in vals)),
        tuple(sorted(matching.pair_of_var.items())),
    )
    return hashlib.sha256(repr(state).encode()).hexdigest()
