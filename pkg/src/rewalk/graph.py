"""Undirected graph storage and the overlay ledger that rewrites it virtually.

The base :class:`Graph` is immutable after construction and shared by every
component.  An :class:`OverlayLedger` records edge removals, additions and the
decisions behind them; resolving a neighborhood through a ledger yields the
overlay graph without ever copying the base topology.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import InvalidPair, NodeNotFound

EdgeKey = tuple[int, int]

# Decision outcomes stored in the ledger cache.
REMOVABLE = "removable"
NOT_REMOVABLE = "not-removable"
REPLACED = "replaced"


def edge_key(u: int, v: int) -> EdgeKey:
    """Canonical unordered edge id: smaller endpoint first."""
    if u == v:
        raise InvalidPair(f"self-pair ({u}, {v})")
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable undirected graph over dense node ids ``0..n-1``.

    Adjacency lists are sorted tuples, so iteration is deterministic under a
    fixed seed; membership checks use per-node frozensets.  Construction
    validates symmetry, absence of self-loops and id density.
    """

    __slots__ = ("_neighbors", "_sets", "_num_edges", "original_ids")

    def __init__(
        self,
        adjacency: Mapping[int, Iterable[int]],
        original_ids: tuple[str, ...] | None = None,
    ):
        n = len(adjacency)
        if set(adjacency.keys()) != set(range(n)):
            raise ValueError("node ids must be the dense range 0..n-1")
        neighbors = []
        for u in range(n):
            row = tuple(sorted(set(adjacency[u])))
            for v in row:
                if v == u:
                    raise ValueError(f"self-loop at node {u}")
                if not 0 <= v < n:
                    raise ValueError(f"neighbor {v} of {u} out of range")
            neighbors.append(row)
        self._neighbors: tuple[tuple[int, ...], ...] = tuple(neighbors)
        self._sets = tuple(frozenset(row) for row in neighbors)
        for u in range(n):
            for v in self._neighbors[u]:
                if u not in self._sets[v]:
                    raise ValueError(f"asymmetric adjacency: {u}->{v}")
        self._num_edges = sum(len(row) for row in neighbors) // 2
        self.original_ids = original_ids

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], num_nodes: int | None = None,
                   original_ids: tuple[str, ...] | None = None) -> "Graph":
        """Build a graph from an edge iterable; isolated trailing ids need ``num_nodes``."""
        adj: dict[int, set[int]] = {}
        max_id = -1
        for u, v in edges:
            if u == v:
                continue
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
            max_id = max(max_id, u, v)
        n = max(max_id + 1, num_nodes or 0)
        return cls({u: adj.get(u, set()) for u in range(n)}, original_ids=original_ids)

    @property
    def num_nodes(self) -> int:
        return len(self._neighbors)

    @property
    def num_edges(self) -> int:
        return self._num_edges

    def __contains__(self, u: int) -> bool:
        return isinstance(u, int) and 0 <= u < len(self._neighbors)

    def node_ids(self) -> range:
        return range(len(self._neighbors))

    def neighbors(self, u: int) -> tuple[int, ...]:
        self._check(u)
        return self._neighbors[u]

    def neighbor_set(self, u: int) -> frozenset[int]:
        self._check(u)
        return self._sets[u]

    def degree(self, u: int) -> int:
        self._check(u)
        return len(self._neighbors[u])

    def min_degree(self) -> int:
        return min(len(row) for row in self._neighbors)

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        return v in self._sets[u]

    def edges(self) -> Iterator[EdgeKey]:
        """Canonical edges in ascending order."""
        for u in self.node_ids():
            for v in self._neighbors[u]:
                if u < v:
                    yield (u, v)

    def _check(self, u: int) -> None:
        if u not in self:
            raise NodeNotFound(f"node {u} not in graph")


@dataclass(frozen=True)
class Decision:
    """Cached outcome of a rewiring evaluation for one edge."""

    outcome: str  # REMOVABLE | NOT_REMOVABLE | REPLACED
    rule: str
    lhs: float
    rhs: float


_EMPTY: frozenset[int] = frozenset()


class OverlayLedger:
    """Mutable record of the overlay graph sitting on top of a base graph.

    Invariants maintained by the mutators in :mod:`rewalk.rewiring`:

    * ``removed`` holds only base edges, ``added`` only non-base edges,
      and the two sets are disjoint;
    * the decision cache is append-only within a sampling session.

    Mutation is restricted to a single walk session (exclusive writer);
    readers may share a ledger freely once the session is done.
    """

    __slots__ = ("base", "removed", "added", "decisions", "_removed_at", "_added_at")

    def __init__(self, base: Graph):
        self.base = base
        self.removed: set[EdgeKey] = set()
        self.added: set[EdgeKey] = set()
        self.decisions: dict[EdgeKey, Decision] = {}
        self._removed_at: dict[int, set[int]] = {}
        self._added_at: dict[int, set[int]] = {}

    # -- resolution ------------------------------------------------------

    def in_overlay(self, e: EdgeKey) -> bool:
        if e in self.added:
            return True
        if e in self.removed:
            return False
        return self.base.has_edge(*e)

    def removed_at(self, u: int) -> frozenset[int] | set[int]:
        return self._removed_at.get(u, _EMPTY)

    def added_at(self, u: int) -> frozenset[int] | set[int]:
        return self._added_at.get(u, _EMPTY)

    def decision_for(self, e: EdgeKey) -> Decision | None:
        return self.decisions.get(e)

    # -- low-level mutation (called by rewiring.apply_*) -----------------

    def _mark_removed(self, e: EdgeKey) -> None:
        u, v = e
        self.removed.add(e)
        self._removed_at.setdefault(u, set()).add(v)
        self._removed_at.setdefault(v, set()).add(u)

    def _mark_added(self, e: EdgeKey) -> None:
        u, v = e
        self.added.add(e)
        self._added_at.setdefault(u, set()).add(v)
        self._added_at.setdefault(v, set()).add(u)

    def _unmark_added(self, e: EdgeKey) -> None:
        u, v = e
        self.added.discard(e)
        self._added_at.get(u, set()).discard(v)
        self._added_at.get(v, set()).discard(u)


def effective_neighbors(graph: Graph, ledger: OverlayLedger | None, u: int) -> set[int]:
    """Overlay-resolved neighbor set of ``u``; its size is the overlay degree."""
    base = set(graph.neighbor_set(u))
    if ledger is None:
        return base
    base -= ledger.removed_at(u)
    base |= ledger.added_at(u)
    return base


def effective_degree(graph: Graph, ledger: OverlayLedger | None, u: int) -> int:
    return len(effective_neighbors(graph, ledger, u))


def common_neighbors(graph: Graph, ledger: OverlayLedger | None, u: int, v: int) -> set[int]:
    """Nodes adjacent to both ``u`` and ``v`` in the overlay."""
    if u == v:
        raise InvalidPair(f"common_neighbors({u}, {u})")
    return effective_neighbors(graph, ledger, u) & effective_neighbors(graph, ledger, v)


def overlay_edges(graph: Graph, ledger: OverlayLedger | None) -> list[EdgeKey]:
    """All overlay edges in ascending canonical order."""
    if ledger is None:
        return list(graph.edges())
    kept = [e for e in graph.edges() if e not in ledger.removed]
    kept.extend(ledger.added)
    return sorted(kept)


def overlay_graph(graph: Graph, ledger: OverlayLedger | None) -> Graph:
    """Materialize the overlay as a standalone :class:`Graph` (explicit export only)."""
    return Graph.from_edges(overlay_edges(graph, ledger), num_nodes=graph.num_nodes)


def export_overlay_text(graph: Graph, ledger: OverlayLedger | None) -> str:
    """Edge-list text of the overlay, one ``u v`` pair per line, ascending order."""
    lines = [f"{u} {v}" for u, v in overlay_edges(graph, ledger)]
    return "\n".join(lines) + ("\n" if lines else "")


def edgelist_text(graph: Graph) -> str:
    lines = [f"{u} {v}" for u, v in graph.edges()]
    return "\n".join(lines) + ("\n" if lines else "")


def is_connected(graph: Graph) -> bool:
    """Breadth-first connectivity over the base adjacency."""
    n = graph.num_nodes
    if n == 0:
        return False
    seen = bytearray(n)
    seen[0] = 1
    frontier = [0]
    count = 1
    while frontier:
        nxt = []
        for u in frontier:
            for v in graph.neighbors(u):
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    nxt.append(v)
        frontier = nxt
    return count == n


def connected_components(graph: Graph) -> list[list[int]]:
    """Connected components as sorted node lists, largest first (ties: smallest id)."""
    n = graph.num_nodes
    seen = bytearray(n)
    comps: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = 1
        comp = [start]
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for v in graph.neighbors(u):
                    if not seen[v]:
                        seen[v] = 1
                        comp.append(v)
                        nxt.append(v)
            frontier = nxt
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def giant_component(graph: Graph) -> tuple[Graph, list[int]]:
    """Largest connected component relabeled to dense ids.

    Returns the sub-graph and the list mapping new ids to original ids.
    """
    comp = connected_components(graph)[0]
    index = {old: new for new, old in enumerate(comp)}
    edges = [(index[u], index[v]) for u, v in graph.edges() if u in index and v in index]
    return Graph.from_edges(edges, num_nodes=len(comp)), comp
