"""Dynamic alldifferent propagator over a value graph with a kept matching.

Initialisation builds the value graph, computes a maximum matching and fails
when it leaves a variable uncovered; otherwise edges in no covering matching
are deleted and pushed back to the store as value removals.  Deletion events
remove edges, repair the matching only when a matched edge was lost, and
re-filter whenever the graph changed.  New variables are adopted by adding
their edges (touching only the new variables), extending the matching from
the uncovered variables, and re-filtering; every adoption is captured in a
record whose inverse restores the exact pre-adoption state.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .errors import DomainWipeout, DuplicateVariable, NonLifoRetract
from .matching import (
    Matching,
    ValueGraph,
    build_value_graph,
    compute_maximum_matching,
    graph_checksum,
    matching_covering_x,
    remove_edges,
    remove_edges_from_g,
)


class AdoptionRecord:
    """Reversible log of one add_variables call (LIFO retraction unit)."""

    __slots__ = (
        "added_vars",
        "added_val_vertices",
        "added_edges",
        "matching_delta",
        "filtered_edges",
        "pre_digest",
        "retracted",
    )

    def __init__(self, pre_digest: str):
        self.added_vars: list[int] = []
        self.added_val_vertices: list[int] = []
        self.added_edges: list[tuple[int, int]] = []
        self.matching_delta: list[tuple[int, Optional[int], Optional[int]]] = []
        self.filtered_edges: list[tuple[int, int]] = []
        self.pre_digest = pre_digest
        self.retracted = False

    @property
    def k(self) -> int:
        return len(self.added_vars)

    @property
    def cells(self) -> int:
        return (
            2
            + len(self.added_vars)
            + len(self.added_val_vertices)
            + 2 * len(self.added_edges)
            + 3 * len(self.matching_delta)
            + 2 * len(self.filtered_edges)
        )


def _matching_delta(old: Matching, new: Matching):
    delta = []
    for var in old.pair_of_var.keys() | new.pair_of_var.keys():
        before = old.pair_of_var.get(var)
        after = new.pair_of_var.get(var)
        if before != after:
            delta.append((var, before, after))
    delta.sort()
    return delta


def _apply_matching_values(matching: Matching, assignments) -> None:
    """Set pair(var) = val (or unmatch when val is None) for each entry."""
    for var, val in assignments:
        current = matching.pair_of_var.pop(var, None)
        if current is not None and matching.pair_of_val.get(current) == var:
            del matching.pair_of_val[current]
    for var, val in assignments:
        if val is not None:
            matching.match(var, val)


class _EdgesRemovedFrame:
    kind = "graph-delta"

    def __init__(self, propagator, entries):
        # entries: (var, val, was_matched), in removal order
        self.propagator = propagator
        self.entries = entries
        self.cells = 2 * len(entries)

    def undo(self, store):
        prop = self.propagator
        for var, val, was_matched in reversed(self.entries):
            prop.graph.add_edge(var, val)
            if was_matched:
                prop.matching.match(var, val)


class _MatchingReplacedFrame:
    kind = "matching-delta"

    def __init__(self, propagator, delta):
        self.propagator = propagator
        self.delta = delta
        self.cells = 3 * len(delta)

    def undo(self, store):
        _apply_matching_values(
            self.propagator.matching, [(var, old) for var, old, _ in self.delta]
        )


class _AdoptionFrame:
    kind = "graph-delta"

    def __init__(self, propagator, record: AdoptionRecord):
        self.propagator = propagator
        self.record = record
        self.cells = record.cells

    def undo(self, store):
        # a manual retract_last may have run already; the undo is idempotent
        self.propagator._undo_adoption(self.record)


class AllDifferent:
    """Propagator requiring pairwise distinct values; store protocol + dynamics."""

    def __init__(self, variables: Iterable[int]):
        self.variables = list(variables)
        if not self.variables:
            raise ValueError("alldifferent needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise DuplicateVariable("repeated variable in alldifferent")
        self.graph = ValueGraph()
        self.matching = Matching()
        self.var_order: list[int] = []
        self.records: list[AdoptionRecord] = []
        self.handle_id: Optional[int] = None

    # -- store protocol ----------------------------------------------------

    def init(self, store, handle) -> bool:
        """Build the value graph, match, fail on uncovered variables, filter."""
        self.handle_id = handle.id
        graph = build_value_graph((v, store.domains[v]) for v in self.variables)
        matching = compute_maximum_matching(graph, store.counters)
        if matching.size < len(self.variables):
            return False
        self.graph = graph
        self.matching = matching
        self.var_order = list(self.variables)
        removed = remove_edges_from_g(graph, matching, store.counters)
        for var, val in removed:
            store.remove_value(var, val, cause=self.handle_id)
        return True

    def on_values_removed(self, store, var: int, values: list[int]) -> bool:
        """Deletion propagation: values were just removed from var's domain.

        Edges already absent from the graph (filtered earlier by this very
        propagator) are skipped; they carry no new information.
        """
        doomed = [(var, v) for v in sorted(values) if self.graph.has_edge(var, v)]
        if not doomed:
            return True
        entries = [
            (v, a, self.matching.pair_of_var.get(v) == a) for v, a in doomed
        ]
        damaged = remove_edges(self.graph, self.matching, doomed)
        store.trail_push(_EdgesRemovedFrame(self, entries))
        if damaged:
            extended = matching_covering_x(self.graph, self.matching, store.counters)
            if extended is None:
                return False
            delta = _matching_delta(self.matching, extended)
            if delta:
                store.trail_push(_MatchingReplacedFrame(self, delta))
                self.matching = extended
        filtered = remove_edges_from_g(self.graph, self.matching, store.counters)
        if filtered:
            store.trail_push(
                _EdgesRemovedFrame(self, [(v, a, False) for v, a in filtered])
            )
            for v, a in filtered:
                try:
                    store.remove_value(v, a, cause=self.handle_id)
                except DomainWipeout:
                    # our graph was ahead of a still-queued deletion from a
                    # sibling constraint; the branch is genuinely inconsistent
                    return False
        return True

    # -- dynamic extension ---------------------------------------------------

    def add_variables(self, store, new_vars: Iterable[int]):
        """Adopt new variables; returns (consistent, record).

        On success the matching covers the extended set and the re-filter's
        deletions are pushed to the store.  On failure the store branch is
        marked failed and the record holds the graph additions only.
        """
        batch = list(new_vars)
        seen = set(self.graph.adj_var)
        for var in batch:
            store._check_var(var)
            if var in seen:
                raise DuplicateVariable(f"variable {var} already adopted")
            seen.add(var)
        record = AdoptionRecord(graph_checksum(self.graph, self.matching))
        for var in batch:
            self.graph.add_var_vertex(var)
            record.added_vars.append(var)
            store.watch_variable(self.handle_id, var)
            for val in sorted(store.domains[var]):
                if self.graph.add_val_vertex(val):
                    record.added_val_vertices.append(val)
                self.graph.add_edge(var, val)
                record.added_edges.append((var, val))
        self.var_order.extend(batch)
        self.records.append(record)
        extended = matching_covering_x(self.graph, self.matching, store.counters)
        if extended is None:
            store.trail_push(_AdoptionFrame(self, record))
            store._fail()
            return False, record
        record.matching_delta = _matching_delta(self.matching, extended)
        self.matching = extended
        record.filtered_edges = remove_edges_from_g(
            self.graph, self.matching, store.counters
        )
        store.trail_push(_AdoptionFrame(self, record))
        for var, val in record.filtered_edges:
            try:
                store.remove_value(var, val, cause=self.handle_id)
            except DomainWipeout:
                return False, record
        return True, record

    def retract_last(self, record: AdoptionRecord) -> None:
        """Undo the newest adoption; graph checksum returns to pre_digest."""
        if not self.records or self.records[-1] is not record or record.retracted:
            raise NonLifoRetract("record is not the newest unretracted adoption")
        self._undo_adoption(record)

    def _undo_adoption(self, record: AdoptionRecord) -> None:
        if record.retracted:
            return
        assert self.records and self.records[-1] is record
        for var, val in record.filtered_edges:
            self.graph.add_edge(var, val)
        _apply_matching_values(
            self.matching, [(var, old) for var, old, _ in record.matching_delta]
        )
        for var, val in reversed(record.added_edges):
            self.graph.remove_edge(var, val)
        for val in reversed(record.added_val_vertices):
            self.graph.pop_val_vertex(val)
        for var in reversed(record.added_vars):
            self.graph.pop_var_vertex(var)
        del self.var_order[len(self.var_order) - len(record.added_vars) :]
        self.records.pop()
        record.retracted = True

    # -- freezing and inspection ----------------------------------------------

    def snapshot(self):
        """Deep copy of every internal structure plus its cell count."""
        snap = (
            {v: set(s) for v, s in self.graph.adj_var.items()},
            {a: set(s) for a, s in self.graph.adj_val.items()},
            self.graph.edge_count,
            dict(self.matching.pair_of_var),
            dict(self.matching.pair_of_val),
            list(self.var_order),
            list(self.records),
            [r.retracted for r in self.records],
        )
        p = len(snap[0])
        d = len(snap[1])
        cells = 2 * self.graph.edge_count + p + d + 2 * self.matching.size + p
        return snap, cells

    def restore(self, snap) -> None:
        adj_var, adj_val, edge_count, pvar, pval, order, records, flags = snap
        graph = ValueGraph()
        graph.adj_var = {v: set(s) for v, s in adj_var.items()}
        graph.adj_val = {a: set(s) for a, s in adj_val.items()}
        graph.edge_count = edge_count
        self.graph = graph
        matching = Matching()
        matching.pair_of_var = dict(pvar)
        matching.pair_of_val = dict(pval)
        self.matching = matching
        self.var_order = list(order)
        self.records = list(records)
        for record, flag in zip(self.records, flags):
            record.retracted = flag

    def state_digest(self) -> str:
        return graph_checksum(self.graph, self.matching) + f":{tuple(self.var_order)}"
