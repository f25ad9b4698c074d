import random

import pytest

from rewalk.access import AccessSession, load_edgelist, overlay_view
from rewalk.errors import InvalidPair, NodeNotFound
from rewalk.generators import barbell
from rewalk.graph import (
    Graph,
    OverlayLedger,
    common_neighbors,
    connected_components,
    edge_key,
    effective_degree,
    effective_neighbors,
    export_overlay_text,
    giant_component,
    is_connected,
    overlay_graph,
)
from rewalk.rewiring import apply_addition, apply_removal, apply_replacement, is_removable

from conftest import random_connected_graph


def test_edge_key_canonical():
    assert edge_key(3, 1) == (1, 3)
    assert edge_key(1, 3) == (1, 3)
    with pytest.raises(InvalidPair):
        edge_key(2, 2)


def test_graph_invariants(barbell11):
    g = barbell11
    assert g.num_nodes == 22
    assert g.num_edges == 111
    # symmetry and handshake identity
    for u in g.node_ids():
        for v in g.neighbors(u):
            assert u in g.neighbor_set(v)
            assert v != u
    assert sum(g.degree(u) for u in g.node_ids()) == 2 * g.num_edges


def test_graph_rejects_bad_input():
    with pytest.raises(ValueError):
        Graph({0: [0]})  # self-loop
    with pytest.raises(ValueError):
        Graph({0: [1], 2: []})  # non-dense ids
    with pytest.raises(ValueError):
        Graph({0: [1], 1: []})  # asymmetric


def test_unknown_node_errors(barbell11):
    ledger = OverlayLedger(barbell11)
    with pytest.raises(NodeNotFound):
        effective_neighbors(barbell11, ledger, 99)
    with pytest.raises(NodeNotFound):
        barbell11.degree(-1)


def test_effective_neighbors_identity_on_empty_ledger(barbell11):
    ledger = OverlayLedger(barbell11)
    for u in barbell11.node_ids():
        assert effective_neighbors(barbell11, ledger, u) == set(barbell11.neighbors(u))


def test_effective_neighbors_after_removal(barbell11):
    session = AccessSession(barbell11)
    ledger = OverlayLedger(barbell11)
    # intra-clique edge of an 11-clique satisfies the removal criterion
    verdict = is_removable(overlay_view(session, ledger, 0), overlay_view(session, ledger, 1), ledger)
    assert verdict.removable
    apply_removal((0, 1), ledger, verdict)
    assert 1 not in effective_neighbors(barbell11, ledger, 0)
    assert 0 not in effective_neighbors(barbell11, ledger, 1)
    assert effective_degree(barbell11, ledger, 0) == barbell11.degree(0) - 1


def test_effective_neighbors_after_replacement():
    # star with a degree-3 hub: re-aim one spoke around the hub
    g = Graph.from_edges([(0, 1), (0, 2), (0, 3)])
    ledger = OverlayLedger(g)
    apply_replacement(edge_key(0, 1), edge_key(1, 2), ledger)
    assert effective_neighbors(g, ledger, 1) == {2}
    assert effective_neighbors(g, ledger, 2) == {0, 1}
    assert effective_neighbors(g, ledger, 0) == {2, 3}


def test_common_neighbors_barbell(barbell11):
    ledger = OverlayLedger(barbell11)
    # two clique-mates inside one 11-clique share the other 9 members
    assert len(common_neighbors(barbell11, ledger, 0, 1)) == 9
    # bridge endpoints live in disjoint cliques
    assert common_neighbors(barbell11, ledger, 10, 11) == set()
    with pytest.raises(InvalidPair):
        common_neighbors(barbell11, ledger, 5, 5)


def five_common_neighbors_graph() -> Graph:
    # u=0 and v=1 adjacent, sharing exactly 5 neighbors, one extra leaf each
    edges = [(0, 1), (0, 7), (1, 8)]
    for c in range(2, 7):
        edges += [(0, c), (1, c)]
    return Graph.from_edges(edges)


def test_common_neighbors_five_shared():
    g = five_common_neighbors_graph()
    ledger = OverlayLedger(g)
    assert common_neighbors(g, ledger, 0, 1) == {2, 3, 4, 5, 6}
    assert g.degree(0) == 7 and g.degree(1) == 7


def test_overlay_symmetry_under_random_rewiring():
    # removals applied anywhere must stay symmetric and never enlarge a
    # neighborhood unless an addition touched it
    for seed in range(5):
        g = random_connected_graph(9, seed)
        session = AccessSession(g)
        ledger = OverlayLedger(g)
        rng = random.Random(seed)
        edges = list(g.edges())
        rng.shuffle(edges)
        for e in edges[:6]:
            u, v = e
            if not ledger.in_overlay(e):
                continue
            verdict = is_removable(
                overlay_view(session, ledger, u), overlay_view(session, ledger, v), ledger
            )
            if verdict.removable:
                apply_removal(e, ledger, verdict)
        for u in g.node_ids():
            eff = effective_neighbors(g, ledger, u)
            for v in eff:
                assert u in effective_neighbors(g, ledger, v)
            assert eff <= set(g.neighbors(u))  # no additions were made


def test_common_neighbors_symmetric(barbell4):
    ledger = OverlayLedger(barbell4)
    for u in barbell4.node_ids():
        for v in barbell4.node_ids():
            if u < v:
                assert common_neighbors(barbell4, ledger, u, v) == common_neighbors(
                    barbell4, ledger, v, u
                )


def test_overlay_export_round_trip(tmp_path, barbell4):
    session = AccessSession(barbell4)
    ledger = OverlayLedger(barbell4)
    verdict = is_removable(overlay_view(session, ledger, 0), overlay_view(session, ledger, 1), ledger)
    assert verdict.removable
    apply_removal((0, 1), ledger, verdict)
    apply_addition(edge_key(0, 5), ledger)

    text = export_overlay_text(barbell4, ledger)
    lines = text.strip().splitlines()
    pairs = [tuple(map(int, ln.split())) for ln in lines]
    assert pairs == sorted(pairs), "export must be in ascending canonical order"
    assert (0, 1) not in pairs and (0, 5) in pairs

    path = tmp_path / "overlay.edgelist"
    path.write_text(text)
    loaded = load_edgelist(str(path), mode="undirected")
    materialized = overlay_graph(barbell4, ledger)
    assert loaded.num_edges == materialized.num_edges
    # same topology after the numeric relabeling (ids were already dense ints)
    assert sorted(loaded.edges()) == sorted(materialized.edges())


def test_components_and_giant():
    g = Graph.from_edges([(0, 1), (1, 2), (3, 4)], num_nodes=6)
    comps = connected_components(g)
    assert comps[0] == [0, 1, 2]
    assert [len(c) for c in comps] == [3, 2, 1]
    sub, mapping = giant_component(g)
    assert sub.num_nodes == 3 and sub.num_edges == 2
    assert mapping == [0, 1, 2]
    assert not is_connected(g)
    assert is_connected(sub)
