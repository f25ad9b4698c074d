"""Restricted per-node query interface with unique-query accounting.

Samplers never touch the :class:`~rewalk.graph.Graph` directly: every read
goes through :meth:`AccessSession.query`, which returns one node's neighbor
list plus its attributes and bills the query ledger.  Repeated queries are
answered from cache and cost nothing, mirroring how a crawler would memoize
web responses.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .errors import (
    BudgetExhausted,
    CapabilityUnavailable,
    EmptyGraph,
    NodeNotFound,
    ParseError,
)
from .graph import Graph, OverlayLedger

DEGREE_ATTRIBUTE = "degree"


@dataclass(frozen=True)
class NeighborhoodView:
    """Response to a single node query: the node, its neighbors, its attributes."""

    node: int
    neighbors: tuple[int, ...]
    attributes: Mapping[str, float]


class QueryLedger:
    """Unique-query counter with a response cache.

    ``unique_count`` equals the number of distinct nodes ever queried and
    never decreases; duplicate queries are free.  A query is billed at most
    once forever, across walk restarts within one experiment.  Cache
    insertion is a single dict write, so readers may share a ledger while
    one writer inserts.
    """

    __slots__ = ("cache",)

    def __init__(self) -> None:
        self.cache: dict[int, NeighborhoodView] = {}

    @property
    def unique_count(self) -> int:
        return len(self.cache)

    def export_state(self) -> str:
        return f"unique_queries={self.unique_count}\n"


class AccessSession:
    """The individual-node query interface over one backing graph.

    Parameters
    ----------
    graph:
        Backing topology; treated as the remote system's private state.
    attributes:
        Optional per-node attribute mapping (sidecar channel).  ``degree``
        is always present in query responses.
    expose_ids:
        Whether the interface reveals the node-id space.  Uniform node
        draws (random jumps) require this capability.
    budget:
        Optional hard cap on unique queries; exceeding it raises
        :class:`BudgetExhausted` before the query is answered.
    """

    def __init__(
        self,
        graph: Graph,
        attributes: Mapping[int, Mapping[str, float]] | None = None,
        expose_ids: bool = True,
        budget: int | None = None,
    ):
        self._graph = graph
        self._attributes = attributes or {}
        self._expose_ids = expose_ids
        self._budget = budget
        self.ledger = QueryLedger()

    # -- the restricted interface ----------------------------------------

    def query(self, v: int) -> NeighborhoodView:
        """Neighborhood of ``v``; bills one unique query on first contact."""
        cached = self.ledger.cache.get(v)
        if cached is not None:
            return cached
        if v not in self._graph:
            raise NodeNotFound(f"node {v} not in graph")
        if self._budget is not None and self.ledger.unique_count >= self._budget:
            raise BudgetExhausted(f"query budget of {self._budget} reached")
        attrs = {DEGREE_ATTRIBUTE: float(self._graph.degree(v))}
        attrs.update(self._attributes.get(v, {}))
        view = NeighborhoodView(
            node=v,
            neighbors=self._graph.neighbors(v),
            attributes=MappingProxyType(attrs),
        )
        self.ledger.cache[v] = view
        return view

    def is_cached(self, v: int) -> bool:
        return v in self.ledger.cache

    def random_node(self, rng: random.Random) -> int:
        """Uniform node draw; needs the id-space capability."""
        if not self._expose_ids:
            raise CapabilityUnavailable("interface does not expose the node id space")
        n = self._graph.num_nodes
        if n == 0:
            raise EmptyGraph("backing graph has no nodes")
        return rng.randrange(n)

    # -- plumbing ----------------------------------------------------------

    @property
    def unique_queries(self) -> int:
        return self.ledger.unique_count

    @property
    def num_nodes(self) -> int:
        # Published by real networks for advertising purposes; not a query.
        return self._graph.num_nodes

    def default_start(self) -> int:
        if self._graph.num_nodes == 0:
            raise EmptyGraph("backing graph has no nodes")
        return 0

    def new_overlay_ledger(self) -> OverlayLedger:
        """Fresh overlay ledger bound to the backing graph."""
        return OverlayLedger(self._graph)


def overlay_view(session: AccessSession, ledger: OverlayLedger | None, u: int) -> NeighborhoodView:
    """Query ``u`` and resolve its neighborhood through the overlay ledger."""
    view = session.query(u)
    if ledger is None:
        return view
    removed = ledger.removed_at(u)
    added = ledger.added_at(u)
    if not removed and not added:
        return view
    nbrs = (set(view.neighbors) - removed) | added
    return NeighborhoodView(node=u, neighbors=tuple(sorted(nbrs)), attributes=view.attributes)


def cached_overlay_degrees(
    session: AccessSession, ledger: OverlayLedger | None, nodes
) -> dict[int, int]:
    """Overlay degrees for the already-queried nodes among ``nodes``.

    Historical knowledge only: nodes outside the query cache are skipped, so
    building this map never issues a request.
    """
    out: dict[int, int] = {}
    for w in nodes:
        if session.is_cached(w):
            out[w] = len(overlay_view(session, ledger, w).neighbors)
    return out


# -- ingestion -------------------------------------------------------------


def _read_pairs(path: str) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    with fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected 'src dst', got {line!r}", line_no)
            pairs.append((parts[0], parts[1]))
    return pairs


def _dense_ids(tokens: set[str]) -> dict[str, int]:
    # Sort numerically when every id parses as an integer, else lexically,
    # so the mapping is independent of input line order.
    try:
        ordered = sorted(tokens, key=lambda t: int(t))
    except ValueError:
        ordered = sorted(tokens)
    return {tok: i for i, tok in enumerate(ordered)}


def load_edgelist(path: str, mode: str = "undirected") -> Graph:
    """Load a whitespace-separated edge list ('#' lines are comments).

    ``undirected`` treats each pair as an undirected edge.
    ``reciprocal-directed`` keeps an undirected edge only when both
    directions appear in the input.  Self-loops are dropped, duplicates
    collapsed, and nodes without a surviving edge are not retained.
    Original string ids map onto dense integers via a stored dictionary.
    """
    if mode not in ("undirected", "reciprocal-directed"):
        raise ValueError(f"unknown mode {mode!r}")
    pairs = _read_pairs(path)
    if mode == "undirected":
        kept = {(a, b) for a, b in pairs if a != b}
        kept = {tuple(sorted(p)) for p in kept}
    else:
        directed = {(a, b) for a, b in pairs if a != b}
        kept = {tuple(sorted((a, b))) for a, b in directed if (b, a) in directed}
    tokens = {t for pair in kept for t in pair}
    if not tokens:
        raise EmptyGraph(f"no usable edges in {path}")
    index = _dense_ids(tokens)
    edges = [(index[a], index[b]) for a, b in kept]
    originals = tuple(tok for tok, _ in sorted(index.items(), key=lambda kv: kv[1]))
    return Graph.from_edges(edges, num_nodes=len(index), original_ids=originals)


def load_attributes(path: str, graph: Graph) -> dict[int, dict[str, float]]:
    """Sidecar attribute file: ``node_id name value`` per line.

    Node ids are in the original (pre-mapping) id space when the graph was
    loaded from a file, else the dense integer space.
    """
    index: dict[str, int] | None = None
    if graph.original_ids is not None:
        index = {tok: i for i, tok in enumerate(graph.original_ids)}
    out: dict[int, dict[str, float]] = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    with fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(f"expected 'node_id name value', got {line!r}", line_no)
            tok, name, value = parts
            if index is not None:
                if tok not in index:
                    continue  # attribute for a node that did not survive conversion
                node = index[tok]
            else:
                try:
                    node = int(tok)
                except ValueError as exc:
                    raise ParseError(f"non-integer node id {tok!r}", line_no) from exc
                if node not in graph:
                    continue
            try:
                out.setdefault(node, {})[name] = float(value)
            except ValueError as exc:
                raise ParseError(f"non-numeric value {value!r}", line_no) from exc
    return out
