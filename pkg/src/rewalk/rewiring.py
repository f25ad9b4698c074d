"""Edge removal and replacement criteria evaluated on overlay neighborhoods.

An edge whose endpoints share enough common neighbors relative to their
degrees provably cannot sit on a conductance-minimizing cut, so dropping it
from the overlay cannot hurt mixing.  When a degree-3 node is met, one of its
edges may instead be re-aimed at another of its neighbors, which never lowers
conductance and may raise it.  All verdicts and applied changes persist in
the :class:`~rewalk.graph.OverlayLedger`; decisions never flip within a
session, so both walk endpoints always see the same overlay.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Container, Iterable, Mapping

from .access import NeighborhoodView
from .errors import DecisionConflict, EdgeAbsent, ProvenanceViolation
from .graph import (
    NOT_REMOVABLE,
    REMOVABLE,
    REPLACED,
    Decision,
    EdgeKey,
    OverlayLedger,
    edge_key,
)

# Verdict rules, named for what they test.
RULE_COMMON_NEIGHBORS = "common-neighbors"
RULE_DEGREE_AUGMENTED = "degree-augmented"
RULE_GUARDED = "guarded"


@dataclass(frozen=True)
class RemovalVerdict:
    """Outcome of one removal evaluation, with the inequality operands kept
    for audit.  ``removable`` is true only when ``lhs > rhs`` strictly under
    the recorded rule; the guard rule always reports not removable."""

    removable: bool
    rule: str
    lhs: float
    rhs: float


@dataclass(frozen=True)
class AuditEvent:
    """One line of the rewiring audit log."""

    edge: EdgeKey
    rule: str
    lhs: float
    rhs: float
    action: str  # evaluate | remove | replace | add
    other: EdgeKey | None = None  # the new edge of a replacement


def _verdict_from_decision(d: Decision) -> RemovalVerdict:
    return RemovalVerdict(removable=d.outcome == REMOVABLE, rule=d.rule, lhs=d.lhs, rhs=d.rhs)


def _check_overlay_edge(u_view: NeighborhoodView, v_view: NeighborhoodView) -> None:
    u, v = u_view.node, v_view.node
    if v not in u_view.neighbors or u not in v_view.neighbors:
        raise EdgeAbsent(f"({u}, {v}) is not an overlay edge")


def is_removable(
    u_view: NeighborhoodView,
    v_view: NeighborhoodView,
    ledger: OverlayLedger,
) -> RemovalVerdict:
    """Common-neighbor removal test on overlay-resolved views.

    The edge is safe to drop when ``ceil(n/2) + 1 > max(k_u, k_v)/2`` with
    ``n`` the number of shared overlay neighbors.  A previously cached
    decision for the edge is returned unchanged regardless of later overlay
    drift.  Pure: the ledger is only read.
    """
    return is_removable_with_degrees(u_view, v_view, {}, ledger)


def is_removable_with_degrees(
    u_view: NeighborhoodView,
    v_view: NeighborhoodView,
    known_degrees: Mapping[int, int],
    ledger: OverlayLedger,
    cache_witness: Container[int] | None = None,
) -> RemovalVerdict:
    """Removal test upgraded with degrees already held for common neighbors.

    Shared neighbors of known degree 2 or 3 strengthen the bound: with
    ``N* = {w in common : degree known, 2 <= k_w <= 3}`` the edge is safe when

        ceil((n - |N*|)/2) + 1 + (1/2) * sum_{w in N*} (4 - k_w)
            > max(k_u, k_v) / 2.

    ``known_degrees`` must come from the query cache (historical knowledge
    only); when ``cache_witness`` is supplied, any key outside it raises
    :class:`ProvenanceViolation`.  With no usable entries the verdict equals
    :func:`is_removable`.
    """
    _check_overlay_edge(u_view, v_view)
    if cache_witness is not None:
        for w in known_degrees:
            if w not in cache_witness:
                raise ProvenanceViolation(f"degree for {w} was never queried")
    e = edge_key(u_view.node, v_view.node)
    cached = ledger.decision_for(e)
    if cached is not None:
        return _verdict_from_decision(cached)

    common = set(u_view.neighbors) & set(v_view.neighbors)
    n = len(common)
    k_u = len(u_view.neighbors)
    k_v = len(v_view.neighbors)
    if k_u == 1 and k_v == 1:
        # Removing the lone edge of a 2-node component would strand the walk.
        return RemovalVerdict(False, RULE_GUARDED, 0.0, 0.0)

    starred = {w: known_degrees[w] for w in common if w in known_degrees and 2 <= known_degrees[w] <= 3}
    if starred:
        lhs = math.ceil((n - len(starred)) / 2) + 1 + 0.5 * sum(4 - k for k in starred.values())
        rule = RULE_DEGREE_AUGMENTED
    else:
        lhs = math.ceil(n / 2) + 1
        rule = RULE_COMMON_NEIGHBORS
    rhs = max(k_u, k_v) / 2
    return RemovalVerdict(lhs > rhs, rule, float(lhs), float(rhs))


def record_verdict(edge: EdgeKey, verdict: RemovalVerdict, ledger: OverlayLedger) -> None:
    """Persist an evaluation outcome; append-only, conflicting outcomes raise."""
    outcome = REMOVABLE if verdict.removable else NOT_REMOVABLE
    existing = ledger.decisions.get(edge)
    if existing is not None:
        if existing.outcome == outcome:
            return
        raise DecisionConflict(f"edge {edge} already decided {existing.outcome}")
    ledger.decisions[edge] = Decision(outcome, verdict.rule, verdict.lhs, verdict.rhs)


def replacement_candidate(
    v_view: NeighborhoodView,
    u: int,
    ledger: OverlayLedger,
    rng: random.Random,
    exclude: Container[int] = (),
) -> int | None:
    """Pick the new endpoint ``w`` for re-aiming edge (u, v) around ``v``.

    Only a degree-3 node ``v`` qualifies; ``w`` is drawn uniformly from v's
    other two overlay neighbors.  Candidates that would duplicate a current
    overlay edge of ``u`` (pass them via ``exclude``), resurrect a removed
    base edge, or touch an already-decided edge are skipped, since the
    ledger cannot represent those additions.  Returns ``None`` when no safe
    candidate exists or the degree condition fails.
    """
    if u not in v_view.neighbors:
        raise EdgeAbsent(f"({u}, {v_view.node}) is not an overlay edge")
    if len(v_view.neighbors) != 3:
        return None
    candidates = []
    for w in v_view.neighbors:
        if w == u or w in exclude:
            continue
        e = edge_key(u, w)
        if e in ledger.added or e in ledger.removed or e in ledger.decisions:
            continue
        if ledger.base.has_edge(u, w):
            continue  # still a live base edge: already in the overlay
        candidates.append(w)
    if not candidates:
        return None
    return rng.choice(candidates)


def apply_removal(edge: EdgeKey, ledger: OverlayLedger, verdict: RemovalVerdict | None = None) -> None:
    """Drop an overlay edge after a removable verdict; idempotent.

    The verdict may be passed explicitly or be already recorded in the
    decision cache.  Removing an edge decided not-removable or replaced
    raises :class:`DecisionConflict`.
    """
    if verdict is not None:
        record_verdict(edge, verdict, ledger)
    decision = ledger.decision_for(edge)
    if decision is None:
        raise DecisionConflict(f"no verdict recorded for {edge}")
    if decision.outcome != REMOVABLE:
        raise DecisionConflict(f"edge {edge} decided {decision.outcome}, cannot remove")
    if not ledger.in_overlay(edge):
        return  # already removed: keep the unique decision
    if edge in ledger.added:
        ledger._unmark_added(edge)
    else:
        ledger._mark_removed(edge)


def apply_replacement(old: EdgeKey, new: EdgeKey, ledger: OverlayLedger) -> None:
    """Replace overlay edge ``old`` with ``new``; both must share an endpoint.

    The old edge leaves the overlay (decision: replaced) and the new one is
    added.  Re-applying the identical replacement is a no-op; any other
    prior decision on either edge raises :class:`DecisionConflict`.
    """
    shared = set(old) & set(new)
    if len(shared) != 1:
        raise EdgeAbsent(f"replacement {old} -> {new} must pivot on one shared endpoint")
    existing = ledger.decision_for(old)
    if existing is not None and existing.outcome == REPLACED:
        if new in ledger.added:
            return  # identical replacement already applied
        raise DecisionConflict(f"edge {old} already replaced by a different edge")
    if existing is not None and existing.outcome == REMOVABLE:
        raise DecisionConflict(f"edge {old} decided removable, cannot replace")
    if not ledger.in_overlay(old):
        raise EdgeAbsent(f"{old} is not an overlay edge")
    _require_addable(new, ledger)

    if old in ledger.added:
        ledger._unmark_added(old)
    else:
        ledger._mark_removed(old)
    ledger._mark_added(new)
    prior = ledger.decisions.get(old)
    ledger.decisions[old] = Decision(
        REPLACED,
        prior.rule if prior is not None else RULE_COMMON_NEIGHBORS,
        prior.lhs if prior is not None else 0.0,
        prior.rhs if prior is not None else 0.0,
    )


def apply_addition(edge: EdgeKey, ledger: OverlayLedger) -> None:
    """Insert a brand-new overlay edge (the keep-both branch of the walk loop)."""
    u, v = edge
    if u not in ledger.base or v not in ledger.base:
        raise EdgeAbsent(f"endpoints of {edge} not in graph")
    if ledger.in_overlay(edge):
        return
    _require_addable(edge, ledger)
    ledger._mark_added(edge)


def _require_addable(edge: EdgeKey, ledger: OverlayLedger) -> None:
    u, v = edge
    if u not in ledger.base or v not in ledger.base:
        raise EdgeAbsent(f"endpoints of {edge} not in graph")
    if edge in ledger.added:
        raise DecisionConflict(f"edge {edge} already in the overlay")
    if ledger.base.has_edge(u, v):
        if edge in ledger.removed:
            # Resurrecting a removed base edge would flip its decision.
            raise DecisionConflict(f"edge {edge} was removed earlier; cannot re-add")
        raise DecisionConflict(f"edge {edge} already in the overlay")
    if edge in ledger.decisions:
        raise DecisionConflict(f"edge {edge} already carries a decision")


def audit_csv(events: Iterable[AuditEvent]) -> str:
    """CSV audit log: ``edge,rule,lhs,rhs,action`` per event."""
    lines = ["edge,rule,lhs,rhs,action"]
    for ev in events:
        u, v = ev.edge
        lines.append(f"{u}-{v},{ev.rule},{ev.lhs:g},{ev.rhs:g},{ev.action}")
    return "\n".join(lines) + "\n"
