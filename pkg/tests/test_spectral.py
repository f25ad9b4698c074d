import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from rewalk.errors import ComputeBudget, Disconnected, DomainError, EdgeAbsent, TooLarge
from rewalk.generators import barbell, barbell_bridge
from rewalk.graph import Graph
from rewalk.spectral import (
    conductance_exact,
    cross_cutting_oracle,
    delta_envelope,
    minimizing_cuts,
    mixing_bound,
    rpd_delta,
    rpd_delta_series,
    slem_mixing_time,
    spectral_report_json_dict,
    stationary_distribution,
    transition_matrix,
)

from conftest import cycle_graph, random_connected_graph


# -- independent oracle: direct subset enumeration with set arithmetic -------


def naive_conductance(g: Graph) -> tuple[Fraction, list[frozenset]]:
    nodes = list(g.node_ids())
    edges = list(g.edges())
    best: Fraction | None = None
    argmin: list[frozenset] = []
    for r in range(1, len(nodes)):
        for side in itertools.combinations(nodes, r):
            s = frozenset(side)
            cut = sum(1 for u, v in edges if (u in s) != (v in s))
            touch_s = sum(1 for u, v in edges if u in s or v in s)
            touch_t = sum(1 for u, v in edges if u not in s or v not in s)
            phi = Fraction(cut, min(touch_s, touch_t))
            if best is None or phi < best:
                best, argmin = phi, [s]
            elif phi == best:
                argmin.append(s)
    assert best is not None
    return best, argmin


def test_conductance_k2():
    g = Graph.from_edges([(0, 1)])
    res = conductance_exact(g)
    assert res.phi_exact == Fraction(1, 1)
    assert res.cut_edges == 1


def test_conductance_k4(k4):
    res = conductance_exact(k4)
    assert res.phi_exact == Fraction(4, 5)
    assert len(res.s_side) in (1, 2, 3)
    naive, _ = naive_conductance(k4)
    assert res.phi_exact == naive


def test_conductance_barbell_family():
    for m in (4, 5, 6):
        g = barbell(m)
        expected = Fraction(1, m * (m - 1) // 2 + 1)
        assert conductance_exact(g).phi_exact == expected


def test_conductance_matches_naive_oracle():
    for seed in (11, 12, 13, 14, 15):
        g = random_connected_graph(8, seed)
        fast = conductance_exact(g).phi_exact
        naive, argmin = naive_conductance(g)
        assert fast == naive
        # complementation symmetry: the oracle saw both sides of each cut
        sides = {frozenset(g.node_ids()) - s for s in argmin}
        assert sides <= set(argmin) | sides


def test_conductance_bounds_and_errors():
    with pytest.raises(Disconnected):
        conductance_exact(Graph.from_edges([(0, 1), (2, 3)]))
    path25 = Graph.from_edges([(i, i + 1) for i in range(24)])
    with pytest.raises(TooLarge):
        conductance_exact(path25)
    for seed in (3, 4):
        g = random_connected_graph(7, seed)
        phi = conductance_exact(g).phi
        assert 0.0 < phi <= 1.0


def test_cross_cutting_oracle_barbell():
    for m in (4, 5):
        g = barbell(m)
        assert cross_cutting_oracle(g, barbell_bridge(m)) is True
        assert cross_cutting_oracle(g, (0, 1)) is False


def test_cross_cutting_oracle_k2_and_errors(k4):
    g = Graph.from_edges([(0, 1)])
    assert cross_cutting_oracle(g, (0, 1)) is True
    with pytest.raises(EdgeAbsent):
        cross_cutting_oracle(k4, (0, 9))


def test_cross_cutting_oracle_matches_naive():
    for seed in (21, 22, 23):
        g = random_connected_graph(7, seed)
        _, argmin = naive_conductance(g)
        for e in g.edges():
            expected = any((e[0] in s) != (e[1] in s) for s in argmin)
            assert cross_cutting_oracle(g, e) == expected


def test_minimizing_cuts_collects_ties(k4):
    cuts = minimizing_cuts(k4)
    # all three balanced splits containing node 0
    assert sorted(sorted(c) for c in cuts) == [[0, 1], [0, 2], [0, 3]]


def test_transition_matrix_stochastic():
    for seed in (31, 32):
        g = random_connected_graph(9, seed)
        P = transition_matrix(g)
        assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
        pi = stationary_distribution(g)
        assert np.allclose(pi @ P, pi, atol=1e-10)
        assert abs(pi.sum() - 1.0) < 1e-12


def test_rpd_identity_at_zero(k4, barbell4):
    for g in (k4, barbell4):
        assert rpd_delta(g, 0) == pytest.approx(1.0, abs=1e-12)


def test_rpd_k4_one_step(k4):
    # off-diagonal entries are 1/3 against a uniform stationary 1/4
    assert rpd_delta(k4, 1) == pytest.approx(1 / 3, abs=1e-12)


def test_rpd_matches_matrix_power_oracle():
    g = random_connected_graph(8, 41)
    P = transition_matrix(g)
    pi = stationary_distribution(g)
    mask = P > 0
    series = rpd_delta_series(g, 40)
    for t in (0, 1, 2, 5, 17, 40):
        Pt = np.linalg.matrix_power(P, t)
        expected = np.abs(Pt - pi[None, :]) / pi[None, :]
        assert series[t] == pytest.approx(float(expected[mask].max()), rel=1e-10, abs=1e-12)


def test_rpd_errors(k4):
    with pytest.raises(ComputeBudget):
        rpd_delta(k4, 10_001)
    with pytest.raises(DomainError):
        rpd_delta(k4, -1)
    with pytest.raises(Disconnected):
        rpd_delta(Graph.from_edges([(0, 1), (2, 3)]), 3)


def test_slem_k4(k4):
    report = slem_mixing_time(k4)
    assert report.slem == pytest.approx(1 / 3, abs=1e-10)
    assert report.mixing_time_estimate == pytest.approx(1 / math.log(3), abs=1e-9)


def test_slem_even_cycle_is_periodic():
    report = slem_mixing_time(cycle_graph(4))
    assert report.slem == 1.0
    assert math.isinf(report.mixing_time_estimate)


def test_slem_barbell_is_subunit(barbell4):
    report = slem_mixing_time(barbell4)
    assert 0.5 < report.slem < 1.0
    assert math.isfinite(report.mixing_time_estimate)


def test_mixing_bound_reference_values():
    # coefficient per log10 at the conductance levels worked in the text
    cases = {
        0.010: 46050.5,
        0.012: 31979.1,
        0.018: 14212.3,
        0.053: 1638.3,
        0.105: 416.6,
    }
    for phi, expected in cases.items():
        got = mixing_bound(phi, 111, 10, 0.01).coefficient_per_log10
        assert abs(got - expected) / expected < 1e-3
    assert mixing_bound(0.018, 111, 10, 0.01).c == pytest.approx(22.2, abs=1e-12)


def test_mixing_bound_t_scales_with_epsilon():
    b1 = mixing_bound(0.05, 100, 2, 0.1)
    b2 = mixing_bound(0.05, 100, 2, 0.01)
    assert b2.t_bound > b1.t_bound
    assert b2.t_bound - b1.t_bound == pytest.approx(b1.coefficient_per_log10, rel=1e-9)


def test_mixing_bound_domain():
    for phi in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(DomainError):
            mixing_bound(phi, 10, 1, 0.1)
    with pytest.raises(DomainError):
        mixing_bound(0.5, 10, 1, 0.0)


def test_delta_envelope_shapes():
    lo, hi = delta_envelope(0.1, 50, 2, 0)
    assert lo == 1.0 and hi == 50.0
    lo, hi = delta_envelope(0.8, 6, 3, 4)  # beyond 1/2 the lower bound is vacuous
    assert lo == 0.0
    assert hi == pytest.approx(4 * (1 - 0.32) ** 4)


def test_delta_sandwich_small_barbell(barbell4):
    phi = conductance_exact(barbell4).phi
    series = rpd_delta_series(barbell4, 120)
    for t, d in enumerate(series):
        lo, hi = delta_envelope(phi, barbell4.num_edges, barbell4.min_degree(), t)
        assert lo - 1e-9 <= d <= hi + 1e-9


def bridge_with_commons(m: int, n: int) -> tuple[Graph, tuple[int, int]]:
    """Two m-cliques joined at (m-1, m), plus n nodes adjacent to both ends."""
    edges = []
    for base in (0, m):
        for i in range(m):
            for j in range(i + 1, m):
                edges.append((base + i, base + j))
    edges.append((m - 1, m))
    nxt = 2 * m
    for _ in range(n):
        edges += [(m - 1, nxt), (m, nxt)]
        nxt += 1
    return Graph.from_edges(edges), (m - 1, m)


def test_removal_criterion_is_tight():
    # whenever ceil(n/2)+1 <= max(k)/2 there is a graph whose edge with that
    # profile sits on the minimizing cut, so the strict inequality cannot be
    # weakened
    for n, k in [(0, 4), (2, 6), (3, 7), (4, 8)]:
        g, bridge = bridge_with_commons(k - n, n)
        assert g.degree(bridge[0]) == k
        assert math.ceil(n / 2) + 1 <= k / 2, "tuple must violate the removal test"
        assert cross_cutting_oracle(g, bridge) is True


def test_spectral_report_dict(k4):
    report = spectral_report_json_dict(k4, delta_ts=(0, 1))
    assert report["phi"] == pytest.approx(0.8)
    assert report["slem"] == pytest.approx(1 / 3, abs=1e-10)
    assert report["mixing_time_infinite"] is False
    assert report["delta_series"][0] == [0, pytest.approx(1.0)]
    assert report["cut"]["cut_edges"] == 4
