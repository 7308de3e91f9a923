import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_paths
from smallworld.geometry import NodeSet, generate_nodes
from smallworld.metrics import characteristic_metrics, clustering_coefficient, shortest_paths_from
from smallworld.shortcut import ShortcutParams, build_compound
from smallworld.topology import CompoundTopology, Edge


def graph(n, edges, k_split=None):
    """Topology over arbitrary weighted edges; positions are irrelevant here."""
    nodes = NodeSet(np.zeros((n, 2)), 1.0, "random", 0)
    es = tuple(Edge(a, b, w, w) for a, b, w in edges)
    channels = (es,) if k_split is None else (es[:k_split], es[k_split:])
    return CompoundTopology(nodes, 1.0, 1.0, channels)


def path3():
    return graph(3, [(0, 1, 40.0), (1, 2, 40.0)])


@pytest.mark.parametrize("order", ["length", "hop"])
def test_path_graph_paths(order):
    assert shortest_paths_from(path3(), 0, order) == {1: (1, 40.0), 2: (2, 80.0)}


def test_isolated_source_has_no_targets():
    t = graph(3, [(1, 2, 5.0)])
    assert shortest_paths_from(t, 0) == {}


def test_orders_disagree_where_expected():
    # direct 0-3 edge costs 100; three cheap hops cost 30
    t = graph(4, [(0, 3, 100.0), (0, 1, 10.0), (1, 2, 10.0), (2, 3, 10.0)])
    assert shortest_paths_from(t, 0, "hop")[3] == (1, 100.0)
    assert shortest_paths_from(t, 0, "length")[3] == (3, 30.0)


def test_equal_length_ties_prefer_fewer_hops():
    t = graph(4, [(0, 3, 30.0), (0, 1, 10.0), (1, 2, 10.0), (2, 3, 10.0)])
    assert shortest_paths_from(t, 0, "length")[3] == (1, 30.0)


def test_equal_hop_ties_prefer_less_weight():
    t = graph(4, [(0, 1, 5.0), (1, 3, 5.0), (0, 2, 1.0), (2, 3, 1.0)])
    assert shortest_paths_from(t, 0, "hop")[3] == (2, 2.0)


def test_unknown_order_rejected():
    with pytest.raises(ValueError):
        characteristic_metrics(path3(), order="fastest")


weights = st.sampled_from([1.0, 2.0, 3.0, 0.5, 1.5, 4.0, 2.5, 40.0])


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 9))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 2 * n))) if pairs else []
    return n, [(a, b, draw(weights)) for a, b in chosen]


@settings(max_examples=150, deadline=None)
@given(small_graphs(), st.sampled_from(["length", "hop"]))
def test_paths_match_brute_force(g, order):
    n, edges = g
    t = graph(n, edges)
    want = brute_paths(n, edges, order)
    got = {(s, v): hv for s in range(n) for v, hv in shortest_paths_from(t, s, order).items()}
    assert got == want


def test_path_graph_report():
    rep = characteristic_metrics(path3())
    assert rep.char_hop == pytest.approx(4 / 3)
    assert rep.max_hop == 2
    assert rep.char_length == pytest.approx(160 / 3)
    assert rep.max_length == 80
    assert rep.connected_pairs == 3


def test_disjoint_components_only_count_connected_pairs():
    rep = characteristic_metrics(graph(4, [(0, 1, 40.0), (2, 3, 40.0)]))
    assert (rep.char_hop, rep.max_hop, rep.char_length, rep.max_length) == (1, 1, 40, 40)
    assert rep.connected_pairs == 2


def test_no_connected_pairs_gives_undefined_path_metrics():
    rep = characteristic_metrics(graph(3, []))
    assert rep.char_hop is None and rep.max_length is None
    assert rep.connected_pairs == 0 and rep.clustering == 0


def test_clustering_examples():
    assert clustering_coefficient(graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])) == 1.0
    assert clustering_coefficient(graph(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])) == 0.0


def test_clustering_counts_edges_across_channels():
    # triangle whose third side lives on a short-cut channel
    t = graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], k_split=2)
    assert t.k == 1
    assert clustering_coefficient(t) == 1.0


@pytest.mark.parametrize("seed", range(3))
def test_clustering_matches_networkx(seed):
    nodes = generate_nodes("random", 400, 1000, seed)
    t = build_compound(nodes, 70, 1, ShortcutParams(5, 3, seed))
    g = nx.Graph()
    g.add_nodes_from(range(400))
    g.add_edges_from(e.pair for e in t.edges())
    assert clustering_coefficient(t) == pytest.approx(nx.average_clustering(g), abs=1e-12)


def test_clustering_invariant_under_relabelling():
    nodes = generate_nodes("random", 300, 1000, 8)
    perm = np.random.default_rng(0).permutation(300)
    shuffled = NodeSet(nodes.xy[perm], 1000.0, "random", 8)
    a = clustering_coefficient(build_compound(nodes, 80, 1, ShortcutParams(5, 0, 0)))
    b = clustering_coefficient(build_compound(shuffled, 80, 1, ShortcutParams(5, 0, 0)))
    assert a == pytest.approx(b, abs=1e-12)
    assert 0 <= a <= 1


@pytest.mark.parametrize("r0, C, H, M, L, m", [
    (35, 0.000, 21.121, 62, 739.222, 2170),
    (60, 0.451, 14.783, 31, 886.986, 1860),
])
def test_grid_baselines_reproduce_reference_values(r0, C, H, M, L, m):
    t = build_compound(generate_nodes("grid", 1000, 1000), r0, 1, ShortcutParams(5, 0, 0))
    rep = characteristic_metrics(t)
    assert round(rep.clustering, 3) == C
    assert round(rep.char_hop, 3) == H
    assert rep.max_hop == M
    assert round(rep.char_length, 3) == L
    assert rep.max_length == m


@pytest.mark.parametrize("alpha", [1.0, 1.7, 2.0, 3.3, 4.0])
@pytest.mark.parametrize("order", ["length", "hop"])
def test_k0_length_is_hop_times_weight(alpha, order):
    t = build_compound(generate_nodes("random", 500, 1000, 2), 70, alpha, ShortcutParams(5, 0, 2))
    rep = characteristic_metrics(t, order)
    w = 70.0**alpha
    assert rep.char_length == pytest.approx(rep.char_hop * w, rel=1e-12)
    assert rep.max_length == pytest.approx(rep.max_hop * w, rel=1e-12)


def test_report_bookkeeping():
    nodes = generate_nodes("random", 500, 1000, 1)
    t = build_compound(nodes, 60, 1, ShortcutParams(5, 3, 1))
    rep = characteristic_metrics(t)
    assert rep.per_channel_edges == tuple(t.edge_counts())
    assert rep.cumulative_sc_ratio == sum(t.edge_counts()[1:]) / t.edge_counts()[0]
    assert rep.char_hop <= rep.max_hop and rep.char_length <= rep.max_length
    assert rep.connected_pairs <= 500 * 499 // 2


def test_metrics_are_reproducible():
    nodes = generate_nodes("random", 600, 1000, 6)
    a = characteristic_metrics(build_compound(nodes, 50, 1, ShortcutParams(5, 4, 6)))
    b = characteristic_metrics(build_compound(nodes, 50, 1, ShortcutParams(5, 4, 6)))
    assert a == b


@pytest.mark.parametrize("seed", range(3))
def test_pairwise_monotonicity_on_fixed_pairs(seed):
    """Per connected pair: length never grows under the length order and
    hops never grow under the hop order as channels are added."""
    nodes = generate_nodes("random", 300, 1000, seed)
    t = build_compound(nodes, 90, 1, ShortcutParams(5, 4, seed))
    sources = range(0, 300, 15)
    for order, slot in (("length", 1), ("hop", 0)):
        prev = None
        for k in range(t.k + 1):
            cur = {(s, v): hv[slot] for s in sources for v, hv in shortest_paths_from(t.prefix(k), s, order).items()}
            if prev is not None:
                assert set(prev) <= set(cur)
                assert all(cur[p] <= prev[p] for p in prev)
            prev = cur
