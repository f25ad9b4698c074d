"""Convergence diagnostics, importance-sampling estimation and bias measures."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from statistics import fmean, variance
from typing import Mapping, Sequence

from .access import AccessSession, cached_overlay_degrees, overlay_view
from .errors import (
    AttributeMissing,
    DegenerateSequence,
    DomainError,
    EmptySample,
    SampleTooLarge,
)
from .graph import REMOVABLE, OverlayLedger, edge_key
from .rewiring import apply_removal, is_removable_with_degrees, record_verdict


@dataclass(frozen=True)
class GewekeResult:
    """Z statistic comparing an early window against a late window.

    Z = |mean_A - mean_B| / sqrt(S_A + S_B) with window A the first 10% of
    the post-burn-in trace, window B the last 50%, and S the window sample
    variances.  Z tends to 0 as the chain converges; ``converged`` is
    Z <= threshold.
    """

    z: float
    window_a_mean: float
    window_b_mean: float
    window_a_var: float
    window_b_var: float
    converged: bool


@dataclass(frozen=True)
class SampleEntry:
    node: int
    weight: float
    attributes: Mapping[str, float]


@dataclass
class SampleSet:
    """Walk output: sampled nodes with importance weights and attributes."""

    scheme: str
    entries: list[SampleEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


def geweke_z(trace_attr: Sequence[float], burn_in: int, threshold: float) -> GewekeResult:
    """Geweke diagnostic on the post-burn-in attribute series.

    Needs at least 20 post-burn-in points so both windows are non-empty and
    the window variances are defined.  A zero combined variance (constant
    chain) cannot be diagnosed and raises :class:`DegenerateSequence`.
    """
    if burn_in < 0:
        raise DomainError("burn_in must be non-negative")
    seq = list(trace_attr[burn_in:])
    if len(seq) < 20:
        raise DegenerateSequence(f"need >= 20 post-burn-in points, got {len(seq)}")
    n_a = len(seq) // 10
    n_b = len(seq) // 2
    window_a = seq[:n_a]
    window_b = seq[-n_b:]
    mean_a = fmean(window_a)
    mean_b = fmean(window_b)
    var_a = variance(window_a)
    var_b = variance(window_b)
    spread = var_a + var_b
    if spread <= 0.0:
        raise DegenerateSequence("zero combined window variance")
    z = abs(mean_a - mean_b) / math.sqrt(spread)
    return GewekeResult(
        z=z,
        window_a_mean=mean_a,
        window_b_mean=mean_b,
        window_a_var=var_a,
        window_b_var=var_b,
        converged=z <= threshold,
    )


def overlay_degree_estimate(
    session: AccessSession,
    ledger: OverlayLedger,
    u: int,
    m: int | None = None,
    rng: random.Random | None = None,
) -> float:
    """Estimate the overlay degree of ``u`` from a random audit of its edges.

    Draws ``m`` base-graph neighbors without replacement and checks whether
    each incident edge survives in the overlay.  Cached decisions are free;
    undecided edges are evaluated (one query per uncached neighbor) and, when
    the verdict says removable, applied, so repeated estimates stay
    consistent with the exported overlay.  The estimate is the base degree
    scaled by the surviving fraction, plus any overlay-added edges at ``u``:
    unbiased for the overlay degree in expectation over the draw at a fixed
    ledger.  ``m`` defaults to min(base degree, 5).
    """
    rng = rng if rng is not None else random.Random(0)
    base_view = session.query(u)
    k_base = len(base_view.neighbors)
    if m is None:
        m = min(k_base, 5)
    if m > k_base:
        raise SampleTooLarge(f"m={m} exceeds base degree {k_base} of node {u}")
    if m < 1:
        raise DomainError("m must be positive")
    picked = rng.sample(base_view.neighbors, m)
    alive = 0
    for w in picked:
        e = edge_key(u, w)
        if not ledger.in_overlay(e):
            continue
        decision = ledger.decision_for(e)
        if decision is not None:
            if decision.outcome == REMOVABLE:
                apply_removal(e, ledger)  # sync a verdict issued elsewhere
            else:
                alive += 1
            continue
        u_ov = overlay_view(session, ledger, u)
        w_ov = overlay_view(session, ledger, w)
        known = cached_overlay_degrees(session, ledger, set(u_ov.neighbors) & set(w_ov.neighbors))
        verdict = is_removable_with_degrees(u_ov, w_ov, known, ledger)
        record_verdict(e, verdict, ledger)
        if verdict.removable:
            apply_removal(e, ledger)
        else:
            alive += 1
    added = len(ledger.added_at(u))
    return k_base * (alive / m) + added


def importance_estimate(samples: SampleSet, attribute: str) -> float:
    """Self-normalized ratio estimator of the population mean of an attribute.

    Weights are stationary-to-uniform ratios up to a constant (1/degree for
    degree-proportional walks); the normalizing constants cancel in the
    ratio, so uniform weight rescaling leaves the estimate unchanged.
    """
    if len(samples) == 0:
        raise EmptySample("no samples to estimate from")
    num = 0.0
    den = 0.0
    for entry in samples.entries:
        if attribute not in entry.attributes:
            raise AttributeMissing(f"sample at node {entry.node} lacks attribute {attribute!r}")
        num += entry.attributes[attribute] * entry.weight
        den += entry.weight
    return num / den


def kl_bias(ideal: Mapping[int, float], empirical: Mapping[int, float]) -> float:
    """Symmetrized Kullback-Leibler divergence between two node distributions.

    Computed as sum (p - q) ln(p / q) over the union support.  When either
    distribution puts zero mass where the other does not, both are smoothed
    with a 1/(10 K) pseudo-count (K the union support size) so reports never
    contain infinities; strictly positive inputs are compared exactly.
    """
    for name, dist in (("ideal", ideal), ("empirical", empirical)):
        total = math.fsum(dist.values())
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"{name} distribution sums to {total}, not 1")
    support = sorted(set(ideal) | set(empirical))
    k = len(support)
    if k == 0:
        raise DomainError("empty distributions")
    p = [ideal.get(v, 0.0) for v in support]
    q = [empirical.get(v, 0.0) for v in support]
    if min(p) <= 0.0 or min(q) <= 0.0:
        eps = 1.0 / (10.0 * k)
        p = [(x + eps) / (1.0 + k * eps) for x in p]
        q = [(x + eps) / (1.0 + k * eps) for x in q]
    return math.fsum((pi - qi) * math.log(pi / qi) for pi, qi in zip(p, q))


def visit_distribution(nodes: Sequence[int]) -> dict[int, float]:
    """Empirical distribution of a node sequence."""
    if not nodes:
        raise EmptySample("empty node sequence")
    counts: dict[int, int] = {}
    for v in nodes:
        counts[v] = counts.get(v, 0) + 1
    total = float(len(nodes))
    return {v: c / total for v, c in counts.items()}


ESTIMATE_CSV_HEADER = "scheme,attribute,N,estimate,relative_error,unique_queries,geweke_z"


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def estimate_report_csv(rows: Sequence[Mapping[str, object]]) -> str:
    """Estimation report CSV with the fixed column layout."""
    lines = [ESTIMATE_CSV_HEADER]
    keys = ESTIMATE_CSV_HEADER.split(",")
    for row in rows:
        lines.append(",".join(_csv_cell(row[k]) for k in keys))
    return "\n".join(lines) + "\n"
