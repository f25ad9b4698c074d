"""Walk schemes over the restricted query interface.

Four families:

* ``srw``   - uniform-neighbor walk; stationary mass proportional to degree.
* ``mhrw``  - Metropolis-Hastings corrected walk targeting the uniform law.
* ``rj``    - mhrw with uniform random jumps (needs the id-space capability).
* ``mto*``  - the rewiring walk: candidates are screened by the removal
  criterion, degree-3 neighbors may trigger an edge replacement or addition,
  and every topology change is persisted to the overlay ledger.  Variants
  ``mto_rm`` / ``mto_rp`` / ``mto_off`` enable removal only, replacement
  only, or neither.

A walk converges when the Geweke monitor on its diagnostic attribute falls
below the configured threshold; samples are recorded only after that, so
overlay churn during burn-in does not bias them.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .access import AccessSession, cached_overlay_degrees, overlay_view
from .errors import (
    AttributeMissing,
    CapabilityUnavailable,
    ConvergenceTimeout,
    CoverageTimeout,
    DegenerateSequence,
    DomainError,
    IsolatedNode,
)
from .estimation import GewekeResult, SampleEntry, SampleSet, geweke_z, overlay_degree_estimate
from .graph import OverlayLedger, edge_key
from .rewiring import (
    AuditEvent,
    apply_addition,
    apply_removal,
    apply_replacement,
    is_removable_with_degrees,
    record_verdict,
    replacement_candidate,
)

SCHEME_SRW = "srw"
SCHEME_MHRW = "mhrw"
SCHEME_RJ = "rj"
SCHEME_MTO = "mto"
SCHEME_MTO_RM = "mto_rm"
SCHEME_MTO_RP = "mto_rp"
SCHEME_MTO_OFF = "mto_off"

# scheme -> (removals enabled, replacements enabled)
MTO_VARIANTS = {
    SCHEME_MTO: (True, True),
    SCHEME_MTO_RM: (True, False),
    SCHEME_MTO_RP: (False, True),
    SCHEME_MTO_OFF: (False, False),
}
ALL_SCHEMES = (SCHEME_SRW, SCHEME_MHRW, SCHEME_RJ, *MTO_VARIANTS)

RULE_DEGREE_THREE = "degree-three"

_INNER_CAP = 1_000_000


@dataclass
class SamplerConfig:
    scheme: str = SCHEME_SRW
    jump_prob: float = 0.5
    replace_prob: float = 0.5
    geweke_threshold: float = 0.1
    sample_size: int = 1
    start_node: int | None = None
    step_cap: int = 1_000_000
    geweke_cadence: int = 100
    attribute: str = "degree"
    degree_probe: int = 5

    def __post_init__(self) -> None:
        if self.scheme not in ALL_SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}; expected one of {ALL_SCHEMES}")
        if not 0.0 <= self.jump_prob <= 1.0:
            raise DomainError("jump_prob must lie in [0, 1]")
        if not 0.0 <= self.replace_prob <= 1.0:
            raise DomainError("replace_prob must lie in [0, 1]")
        if self.sample_size < 0:
            raise DomainError("sample_size must be non-negative")
        if self.geweke_threshold <= 0.0:
            raise DomainError("geweke_threshold must be positive")


@dataclass
class WalkState:
    current: int
    steps: int
    trace: list[tuple[int, Mapping[str, float]]]
    rng_seed: int


def mh_acceptance(k_from: int, k_to: int) -> float:
    """Acceptance probability for a uniform-target degree correction."""
    return min(1.0, k_from / k_to)


class GewekeMonitor:
    """Incremental convergence monitor over a scalar diagnostic series.

    The statistic is recomputed every ``cadence`` observations on the series
    with a 10% burn-in; between recomputations the last outcome holds.
    Sequences too short or too flat to diagnose count as not converged.
    """

    def __init__(self, threshold: float, cadence: int = 100):
        self.threshold = threshold
        self.cadence = max(1, cadence)
        self.series: list[float] = []
        self.last: GewekeResult | None = None
        self.converged = False

    def observe(self, value: float) -> None:
        self.series.append(value)
        if len(self.series) % self.cadence == 0:
            self._recompute()

    def _recompute(self) -> None:
        burn_in = len(self.series) // 10
        if len(self.series) - burn_in < 20:
            return
        try:
            self.last = geweke_z(self.series, burn_in, self.threshold)
        except DegenerateSequence:
            self.converged = False
            return
        self.converged = self.last.converged


class Walker:
    """One walk session: a scheme, a query session, a seed and (for the
    rewiring family) an overlay ledger it mutates exclusively."""

    def __init__(
        self,
        session: AccessSession,
        config: SamplerConfig,
        seed: int = 0,
        ledger: OverlayLedger | None = None,
    ):
        self.session = session
        self.config = config
        self.rng = random.Random(seed)
        self._is_mto = config.scheme in MTO_VARIANTS
        if self._is_mto and ledger is None:
            ledger = session.new_overlay_ledger()
        self.ledger = ledger
        self._removals, self._replacements = MTO_VARIANTS.get(config.scheme, (False, False))
        self.events: list[AuditEvent] = []

        start = config.start_node
        if start is None:
            try:
                start = session.random_node(self.rng)
            except CapabilityUnavailable:
                start = session.default_start()
        view = session.query(start)
        self.state = WalkState(current=start, steps=0, trace=[(start, view.attributes)], rng_seed=seed)
        self.actions: list[str] = ["start"]
        self.query_counts: list[int] = [session.unique_queries]
        self.last_geweke: GewekeResult | None = None

    # -- single steps ------------------------------------------------------

    def step(self) -> int:
        scheme = self.config.scheme
        if scheme == SCHEME_SRW:
            return self.srw_step()
        if scheme == SCHEME_MHRW:
            return self.mhrw_step()
        if scheme == SCHEME_RJ:
            return self.rj_step()
        return self.mto_step()

    def srw_step(self) -> int:
        """Move to a uniformly random neighbor (overlay-resolved if a ledger is set)."""
        u = self.state.current
        nbrs = self._resolved_neighbors(u)
        if not nbrs:
            raise IsolatedNode(f"node {u} has no neighbors")
        v = self.rng.choice(nbrs)
        self._move(v, "move")
        return v

    def mhrw_step(self) -> int:
        """Propose a uniform neighbor, accept with min(1, k_u / k_w), else stay."""
        u = self.state.current
        view = self.session.query(u)
        if not view.neighbors:
            raise IsolatedNode(f"node {u} has no neighbors")
        w = self.rng.choice(view.neighbors)
        w_view = self.session.query(w)
        accept = mh_acceptance(len(view.neighbors), len(w_view.neighbors))
        if accept >= 1.0 or self.rng.random() < accept:
            self._move(w, "move")
            return w
        self._stay()
        return u

    def rj_step(self) -> int:
        """With probability ``jump_prob`` teleport to a uniform node, else mhrw."""
        p = self.config.jump_prob
        if p >= 1.0 or (p > 0.0 and self.rng.random() < p):
            v = self.session.random_node(self.rng)
            self._move(v, "jump")
            return v
        return self.mhrw_step()

    def mto_step(self) -> int:
        """One rewiring-walk move.

        Repeats: pick an overlay neighbor v (one query), drop the edge and
        re-pick if the removal criterion fires, otherwise possibly re-aim or
        duplicate the edge around a degree-3 v, then move with probability
        1/2 or re-pick.  All topology changes hit the ledger before any move.
        """
        ledger = self.ledger
        assert ledger is not None
        for _ in range(_INNER_CAP):
            u = self.state.current
            u_ov = overlay_view(self.session, ledger, u)
            if not u_ov.neighbors:
                raise IsolatedNode(f"node {u} has no overlay neighbors")
            v = self.rng.choice(u_ov.neighbors)
            v_ov = overlay_view(self.session, ledger, v)
            e = edge_key(u, v)

            if self._removals:
                known = cached_overlay_degrees(
                    self.session, ledger, set(u_ov.neighbors) & set(v_ov.neighbors)
                )
                verdict = is_removable_with_degrees(u_ov, v_ov, known, ledger)
                if ledger.decision_for(e) is None:
                    record_verdict(e, verdict, ledger)
                    self.events.append(AuditEvent(e, verdict.rule, verdict.lhs, verdict.rhs, "evaluate"))
                if verdict.removable:
                    apply_removal(e, ledger)
                    self.events.append(AuditEvent(e, verdict.rule, verdict.lhs, verdict.rhs, "remove"))
                    continue

            if self._replacements and len(v_ov.neighbors) == 3:
                w = replacement_candidate(v_ov, u, ledger, self.rng, exclude=set(u_ov.neighbors))
                if w is not None:
                    new = edge_key(u, w)
                    if self.rng.random() < self.config.replace_prob:
                        apply_replacement(e, new, ledger)
                        self.events.append(AuditEvent(e, RULE_DEGREE_THREE, 3.0, 3.0, "replace", other=new))
                        v = w
                    else:
                        apply_addition(new, ledger)
                        self.events.append(AuditEvent(new, RULE_DEGREE_THREE, 3.0, 3.0, "add"))
                        target = v if self.rng.random() < 0.5 else w
                        self._move(target, "move")
                        return target

            if self.rng.random() < 0.5:
                self._move(v, "move")
                return v
        raise ConvergenceTimeout("inner walk loop failed to move")

    # -- full runs ---------------------------------------------------------

    def run_walk(self, sample_size: int | None = None) -> SampleSet:
        """Walk until the convergence monitor fires, then record samples.

        Returns once ``sample_size`` samples are collected; raises
        :class:`ConvergenceTimeout` if the step cap is hit first.
        """
        cfg = self.config
        target = cfg.sample_size if sample_size is None else sample_size
        samples = SampleSet(scheme=cfg.scheme)
        monitor = GewekeMonitor(cfg.geweke_threshold, cfg.geweke_cadence)
        monitor.observe(self._diagnostic(self.state.trace[-1]))
        while len(samples.entries) < target:
            if self.state.steps >= cfg.step_cap:
                raise ConvergenceTimeout(
                    f"monitor did not allow {target} samples within {cfg.step_cap} steps"
                )
            self.step()
            monitor.observe(self._diagnostic(self.state.trace[-1]))
            if monitor.converged:
                self._record_sample(samples)
        self.last_geweke = monitor.last
        return samples

    def run_until_converged(self) -> int:
        """Steps taken until the monitor first fires (no sample recorded)."""
        cfg = self.config
        monitor = GewekeMonitor(cfg.geweke_threshold, cfg.geweke_cadence)
        monitor.observe(self._diagnostic(self.state.trace[-1]))
        while not monitor.converged:
            if self.state.steps >= cfg.step_cap:
                raise ConvergenceTimeout(f"no convergence within {cfg.step_cap} steps")
            self.step()
            monitor.observe(self._diagnostic(self.state.trace[-1]))
        self.last_geweke = monitor.last
        return self.state.steps

    def run_until_coverage(self, node_count: int | None = None) -> int:
        """Walk until every node has been visited at least once."""
        needed = node_count if node_count is not None else self.session.num_nodes
        visited = {self.state.current}
        while len(visited) < needed:
            if self.state.steps >= self.config.step_cap:
                raise CoverageTimeout(
                    f"visited {len(visited)}/{needed} nodes within {self.config.step_cap} steps"
                )
            visited.add(self.step())
        return self.state.steps

    # -- internals ---------------------------------------------------------

    def _resolved_neighbors(self, u: int) -> tuple[int, ...]:
        if self.ledger is not None:
            return overlay_view(self.session, self.ledger, u).neighbors
        return self.session.query(u).neighbors

    def _move(self, v: int, action: str) -> None:
        view = self.session.query(v)
        self.state.current = v
        self.state.steps += 1
        self.state.trace.append((v, view.attributes))
        self.actions.append(action)
        self.query_counts.append(self.session.unique_queries)

    def _stay(self) -> None:
        u = self.state.current
        view = self.session.query(u)
        self.state.steps += 1
        self.state.trace.append((u, view.attributes))
        self.actions.append("stay")
        self.query_counts.append(self.session.unique_queries)

    def _diagnostic(self, entry: tuple[int, Mapping[str, float]]) -> float:
        attrs = entry[1]
        name = self.config.attribute
        if name not in attrs:
            raise AttributeMissing(f"node {entry[0]} lacks diagnostic attribute {name!r}")
        return attrs[name]

    def _record_sample(self, samples: SampleSet) -> None:
        node = self.state.current
        view = self.session.query(node)
        scheme = self.config.scheme
        if scheme == SCHEME_SRW:
            weight = 1.0 / view.attributes["degree"]
        elif scheme in (SCHEME_MHRW, SCHEME_RJ):
            weight = 1.0  # already targeting the uniform law
        else:
            assert self.ledger is not None
            m = min(len(view.neighbors), self.config.degree_probe)
            est = overlay_degree_estimate(self.session, self.ledger, node, m=m, rng=self.rng)
            if est <= 0.0:
                # The probe can miss every survivor; a full audit is exact.
                est = overlay_degree_estimate(
                    self.session, self.ledger, node, m=len(view.neighbors), rng=self.rng
                )
            weight = 1.0 / est
        samples.entries.append(SampleEntry(node=node, weight=weight, attributes=view.attributes))


def trace_csv(walker: Walker) -> str:
    """Per-step trace: ``step,node,action,unique_queries``."""
    lines = ["step,node,action,unique_queries"]
    for i, (node, _) in enumerate(walker.state.trace):
        lines.append(f"{i},{node},{walker.actions[i]},{walker.query_counts[i]}")
    return "\n".join(lines) + "\n"


def samples_csv(samples: SampleSet) -> str:
    """Sample export: ``sample_idx,node,weight,attr...`` columns."""
    attr_names: list[str] = []
    if samples.entries:
        attr_names = sorted(samples.entries[0].attributes)
    lines = ["sample_idx,node,weight" + "".join(f",{a}" for a in attr_names)]
    for i, entry in enumerate(samples.entries):
        attrs = "".join(f",{entry.attributes.get(a, float('nan'))!r}" for a in attr_names)
        lines.append(f"{i},{entry.node},{entry.weight!r}{attrs}")
    return "\n".join(lines) + "\n"
