"""Ground-truth spectral machinery: exact conductance, cut oracle, mixing.

Everything here needs the full topology and therefore lives outside the
restricted query interface; it exists to verify what the samplers do.

Conductance follows the cut formulation

    phi(S) = |cut(S, ~S)| / min(|edges touching S|, |edges touching ~S|)

with each touching edge counted once, which is the reading under which the
two-clique-plus-bridge family gives phi = 1/(C(m,2)+1).  Enumeration is
exhaustive over all 2^(n-1)-1 cuts (one designated node pinned inside S to
absorb complementation symmetry) and runs in exact integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ComputeBudget, Disconnected, DomainError, EdgeAbsent, TooLarge
from .graph import EdgeKey, Graph, edge_key, is_connected

MAX_EXACT_NODES = 24
MAX_DENSE_NODES = 2000
POWER_BUDGET = 10_000
_RENORM_EVERY = 32


@dataclass(frozen=True)
class CutResult:
    """A minimizing cut: the S side, its cut-edge count and conductance."""

    s_side: frozenset[int]
    cut_edges: int
    phi: float
    phi_exact: Fraction


@dataclass(frozen=True)
class SpectralReport:
    slem: float
    mixing_time_estimate: float  # math.inf for periodic chains
    delta_series: tuple[tuple[int, float], ...] = ()


class MixingBound(NamedTuple):
    coefficient_per_log10: float
    t_bound: float
    c: float


def _require_exactable(graph: Graph) -> None:
    if graph.num_nodes > MAX_EXACT_NODES:
        raise TooLarge(f"{graph.num_nodes} nodes exceeds the {MAX_EXACT_NODES}-node enumeration bound")
    if not is_connected(graph):
        raise Disconnected("conductance is defined for connected graphs only")


def _scan_cuts(graph: Graph) -> tuple[int, int, list[int]]:
    """Exhaustive minimum-conductance scan.

    Returns ``(best_cut, best_den, masks)`` where ``masks`` are the bitmask
    S-sides (node 0 always in S) of every minimizing cut.  Iterates subsets
    in Gray-code order so each step updates the cut size in O(1) popcounts.
    """
    n = graph.num_nodes
    m = graph.num_edges
    adj_mask = [0] * n
    deg = [0] * n
    for u in range(n):
        row = 0
        for v in graph.neighbors(u):
            row |= 1 << v
        adj_mask[u] = row
        deg[u] = graph.degree(u)

    full = (1 << n) - 1
    s_mask = 1  # {0}
    cut = deg[0]
    m_s = 0  # edges inside S
    best_cut, best_den = cut, min(m_s, m - m_s - cut) + cut
    masks = [s_mask]

    for i in range(1, 1 << (n - 1)):
        node = (i & -i).bit_length()  # 1 + trailing zeros: free nodes are 1..n-1
        bit = 1 << node
        if s_mask & bit:
            inside = (adj_mask[node] & (s_mask & ~bit)).bit_count()
            s_mask ^= bit
            cut += 2 * inside - deg[node]
            m_s -= inside
        else:
            inside = (adj_mask[node] & s_mask).bit_count()
            s_mask ^= bit
            cut += deg[node] - 2 * inside
            m_s += inside
        if s_mask == full:
            continue  # S = V is not a cut
        den = min(m_s, m - m_s - cut) + cut
        # compare cut/den against best_cut/best_den exactly
        lhs = cut * best_den
        rhs = best_cut * den
        if lhs < rhs:
            best_cut, best_den = cut, den
            masks = [s_mask]
        elif lhs == rhs:
            masks.append(s_mask)
    return best_cut, best_den, masks


def conductance_exact(graph: Graph) -> CutResult:
    """Exact conductance by exhaustive cut enumeration (|V| <= 24, connected)."""
    _require_exactable(graph)
    best_cut, best_den, masks = _scan_cuts(graph)
    mask = min(masks)
    side = frozenset(u for u in range(graph.num_nodes) if (mask >> u) & 1)
    frac = Fraction(best_cut, best_den)
    return CutResult(s_side=side, cut_edges=best_cut, phi=float(frac), phi_exact=frac)


def minimizing_cuts(graph: Graph) -> list[frozenset[int]]:
    """All conductance-minimizing S sides (node 0 pinned in S), ties included."""
    _require_exactable(graph)
    _, _, masks = _scan_cuts(graph)
    return [frozenset(u for u in range(graph.num_nodes) if (mask >> u) & 1) for mask in sorted(masks)]


def cross_cutting_oracle(graph: Graph, edge: EdgeKey) -> bool:
    """True iff some minimizing cut separates the edge's endpoints."""
    u, v = edge_key(*edge)
    if u not in graph or v not in graph or not graph.has_edge(u, v):
        raise EdgeAbsent(f"edge {edge} not in graph")
    _require_exactable(graph)
    _, _, masks = _scan_cuts(graph)
    for mask in masks:
        if ((mask >> u) ^ (mask >> v)) & 1:
            return True
    return False


# -- transition-matrix quantities -------------------------------------------


def transition_matrix(graph: Graph) -> np.ndarray:
    """Row-stochastic uniform-neighbor transition matrix P."""
    n = graph.num_nodes
    if n > MAX_DENSE_NODES:
        raise TooLarge(f"{n} nodes exceeds the {MAX_DENSE_NODES}-node dense bound")
    if any(graph.degree(u) == 0 for u in range(n)):
        raise Disconnected("isolated node: transition matrix undefined")
    P = np.zeros((n, n), dtype=np.float64)
    for u in range(n):
        k = graph.degree(u)
        for v in graph.neighbors(u):
            P[u, v] = 1.0 / k
    return P


def stationary_distribution(graph: Graph) -> np.ndarray:
    """pi(v) = k_v / (2|E|)."""
    deg = np.array([graph.degree(u) for u in range(graph.num_nodes)], dtype=np.float64)
    return deg / (2.0 * graph.num_edges)


def rpd_delta_series(graph: Graph, t_max: int) -> list[float]:
    """Worst-case relative deviation of t-step transitions, t = 0..t_max.

    Delta(t) = max over ordered pairs (u, v) with v adjacent to u of
    |P^t[u,v] - pi(v)| / pi(v).  The power is accumulated by repeated
    multiplication with an explicit row renormalization every 32 products to
    keep long horizons stochastic.
    """
    if t_max < 0:
        raise DomainError("t must be non-negative")
    if t_max > POWER_BUDGET:
        raise ComputeBudget(f"t={t_max} exceeds the power budget of {POWER_BUDGET}")
    if not is_connected(graph):
        raise Disconnected("relative point-wise distance needs a connected graph")
    P = transition_matrix(graph)
    pi = stationary_distribution(graph)
    n = graph.num_nodes
    mask = P > 0  # v in N(u)
    out = []
    Pt = np.eye(n, dtype=np.float64)
    for t in range(t_max + 1):
        rel = np.abs(Pt - pi[None, :]) / pi[None, :]
        out.append(float(rel[mask].max()))
        if t == t_max:
            break
        Pt = Pt @ P
        if (t + 1) % _RENORM_EVERY == 0:
            Pt /= Pt.sum(axis=1, keepdims=True)
    return out


def rpd_delta(graph: Graph, t: int) -> float:
    """Delta(t) for a single horizon; see :func:`rpd_delta_series`."""
    return rpd_delta_series(graph, t)[t]


def slem_mixing_time(graph: Graph, delta_ts: Sequence[int] = ()) -> SpectralReport:
    """Second-largest eigenvalue modulus of P and the 1/ln(1/mu) time scale.

    Eigenvalues are taken from the symmetrized similar matrix
    D^(1/2) P D^(-1/2), which is real for these reversible chains.  A SLEM of
    1 (periodic chain) reports an infinite mixing time.
    """
    n = graph.num_nodes
    if n > MAX_DENSE_NODES:
        raise TooLarge(f"{n} nodes exceeds the {MAX_DENSE_NODES}-node dense bound")
    if not is_connected(graph):
        raise Disconnected("SLEM of a disconnected graph is degenerate")
    deg = np.array([graph.degree(u) for u in range(n)], dtype=np.float64)
    sym = np.zeros((n, n), dtype=np.float64)
    for u in range(n):
        for v in graph.neighbors(u):
            sym[u, v] = 1.0 / math.sqrt(deg[u] * deg[v])
    vals = np.linalg.eigvalsh(sym)  # ascending; top one is the Perron value 1
    if n == 1:
        slem = 0.0
    else:
        slem = float(max(abs(vals[0]), abs(vals[-2])))
    slem = min(slem, 1.0)
    if slem >= 1.0 - 1e-10:
        mixing: float = math.inf
        slem = 1.0
    elif slem <= 0.0:
        mixing = 0.0
    else:
        mixing = 1.0 / math.log(1.0 / slem)
    series = ()
    if delta_ts:
        t_max = max(delta_ts)
        full = rpd_delta_series(graph, t_max)
        series = tuple((t, full[t]) for t in delta_ts)
    return SpectralReport(slem=slem, mixing_time_estimate=mixing, delta_series=series)


def mixing_bound(phi: float, num_edges: int, min_degree: int, epsilon: float) -> MixingBound:
    """Upper-bound scale for the mixing time implied by conductance ``phi``.

    With c = 2|E| / min-degree, the deviation bound c (1 - phi^2/2)^t <= eps
    yields t >= ln(c/eps) / (-ln(1 - phi^2/2)); the per-log10 coefficient
    ln(10) / (-ln(1 - phi^2/2)) is how such bounds are usually quoted.
    """
    if not 0.0 < phi < 1.0:
        raise DomainError(f"phi must lie in (0, 1), got {phi}")
    if epsilon <= 0.0:
        raise DomainError("epsilon must be positive")
    if num_edges < 1 or min_degree < 1:
        raise DomainError("need at least one edge and positive minimum degree")
    c = 2.0 * num_edges / min_degree
    rate = -math.log1p(-phi * phi / 2.0)
    return MixingBound(
        coefficient_per_log10=math.log(10.0) / rate,
        t_bound=math.log(c / epsilon) / rate,
        c=c,
    )


def delta_envelope(phi: float, num_edges: int, min_degree: int, t: int) -> tuple[float, float]:
    """Sandwich bounds for Delta(t) given the conductance.

    Lower bound (1 - 2 phi)^t is meaningful only for phi <= 1/2; beyond
    that its sign alternates and the bound is vacuous, so it is clamped to
    zero.  Upper bound is c (1 - phi^2/2)^t with c = 2|E| / min-degree.
    """
    if not 0.0 < phi <= 1.0:
        raise DomainError(f"phi must lie in (0, 1], got {phi}")
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0:
        lower = 1.0
    elif phi <= 0.5:
        lower = (1.0 - 2.0 * phi) ** t
    else:
        lower = 0.0
    c = 2.0 * num_edges / min_degree
    upper = c * (1.0 - phi * phi / 2.0) ** t
    return lower, upper


def spectral_report_json_dict(
    graph: Graph,
    delta_ts: Sequence[int] = (),
    want_conductance: bool | None = None,
) -> dict:
    """JSON-ready report {phi, cut, slem, mixing_time, delta_series}."""
    report = slem_mixing_time(graph, delta_ts=delta_ts)
    if want_conductance is None:
        want_conductance = graph.num_nodes <= MAX_EXACT_NODES
    phi = None
    cut = None
    if want_conductance:
        result = conductance_exact(graph)
        phi = result.phi
        cut = {"s_side": sorted(result.s_side), "cut_edges": result.cut_edges}
    return {
        "phi": phi,
        "cut": cut,
        "slem": report.slem,
        "mixing_time": None if math.isinf(report.mixing_time_estimate) else report.mixing_time_estimate,
        "mixing_time_infinite": math.isinf(report.mixing_time_estimate),
        "delta_series": [[t, d] for t, d in report.delta_series],
    }
