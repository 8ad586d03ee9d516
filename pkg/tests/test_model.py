import numpy as np
import pytest

from hmrnet import (
    NetworkBuilder,
    NodeRef,
    Partition,
    aggregate,
    composite_modularity,
    counterparts,
)

from helpers import path_network, random_hetero_network, random_partition


def test_builder_totals():
    b = NetworkBuilder()
    u = b.add_node_type("user")
    p = b.add_node_type("photo")
    b.add_node(u, "u1")
    b.add_node(u, "u2")
    b.add_node(p, "p1")
    f = b.add_edge_type("friend", (u,))
    up = b.add_edge_type("uploads", (u, p))
    b.add_edge(f, (0, 1), 2.0)
    b.add_edge(up, (0, 0))
    b.add_edge(up, (1, 0), 0.5)
    net = b.build()
    assert net.r == 2 and net.s == 2
    assert net.n == 3
    assert net.m == pytest.approx(3.5)
    assert net.subnetworks[0].total_weight == pytest.approx(2.0)
    assert net.node_ref("user", "u2") == NodeRef(0, 1)


def test_builder_rejects_bad_input():
    b = NetworkBuilder()
    t = b.add_node_type("t")
    with pytest.raises(ValueError, match="duplicate node type"):
        b.add_node_type("t")
    b.add_node(t, "a")
    with pytest.raises(ValueError, match="duplicate node"):
        b.add_node(t, "a")
    with pytest.raises(ValueError, match="invalid node name"):
        b.add_node(t, "has space")
    u = b.add_node_type("u")
    with pytest.raises(ValueError, match="pairwise-distinct"):
        b.add_edge_type("bad", (t, t))
    y = b.add_edge_type("e", (t,))
    with pytest.raises(ValueError, match="positive"):
        b.add_edge(y, (0, 0), 0.0)
    with pytest.raises(ValueError, match="expects 2 endpoints"):
        b.add_edge(y, (0,))


def test_parallel_edges_accumulate():
    b = NetworkBuilder()
    t = b.add_node_type("t")
    b.add_node(t, "a")
    b.add_node(t, "b")
    y = b.add_edge_type("e", (t,))
    b.add_edge(y, (0, 1))
    b.add_edge(y, (1, 0))  # same unordered pair
    net = b.build()
    assert len(net.subnetworks[0].edges) == 1
    assert net.subnetworks[0].edges[0][1] == pytest.approx(2.0)
    assert net.subnetworks[0].total_weight == pytest.approx(2.0)


def test_counterparts_two_hop_bipartite():
    # user1 - photo - user2
    b = NetworkBuilder()
    u = b.add_node_type("user")
    p = b.add_node_type("photo")
    b.add_node(u, "u1")
    b.add_node(u, "u2")
    b.add_node(p, "p1")
    y = b.add_edge_type("up", (u, p))
    b.add_edge(y, (0, 0))
    b.add_edge(y, (1, 0))
    net = b.build()
    assert counterparts(net, NodeRef(0, 0)) == {NodeRef(0, 1)}
    assert counterparts(net, NodeRef(1, 0)) == set()  # only photo, no same-type peer


def test_counterparts_one_hop_triangle():
    b = NetworkBuilder()
    t = b.add_node_type("t")
    for name in "abc":
        b.add_node(t, name)
    y = b.add_edge_type("e", (t,))
    for i, j in [(0, 1), (1, 2), (0, 2)]:
        b.add_edge(y, (i, j))
    net = b.build()
    assert counterparts(net, NodeRef(0, 0)) == {NodeRef(0, 1), NodeRef(0, 2)}


def test_counterparts_hyperedge_pairwise():
    # (x1,y1,z1) and (x2,y1,z2): x1 reaches x2 through y1
    b = NetworkBuilder()
    x = b.add_node_type("x")
    yt = b.add_node_type("y")
    z = b.add_node_type("z")
    for i in range(2):
        b.add_node(x, f"x{i}")
        b.add_node(yt, f"y{i}")
        b.add_node(z, f"z{i}")
    e = b.add_edge_type("xyz", (x, yt, z))
    b.add_edge(e, (0, 0, 0))
    b.add_edge(e, (1, 0, 1))
    net = b.build()
    assert counterparts(net, NodeRef(0, 0)) == {NodeRef(0, 1)}


def test_counterparts_symmetry_random():
    for seed in range(5):
        net = random_hetero_network(seed)
        refs = [
            NodeRef(t.type_id, i)
            for t in net.node_tables
            for i in range(t.node_count)
        ]
        cp = {v: counterparts(net, v) for v in refs}
        for v in refs:
            for u in cp[v]:
                assert v in cp[u]


def test_aggregate_path_example():
    net = path_network()
    part = Partition([[0, 0, 1, 1]])
    agg, mapping = aggregate(net, part)
    assert agg.n == 2
    assert agg.subnetworks[0].total_weight == pytest.approx(3.0)
    edges = dict(agg.subnetworks[0].edges)
    s0, s1 = mapping[0].index, mapping[1].index
    assert edges[(s0, s0)] == pytest.approx(1.0)
    assert edges[(s1, s1)] == pytest.approx(1.0)
    assert edges[(min(s0, s1), max(s0, s1))] == pytest.approx(1.0)


def test_aggregate_singletons_identity():
    net = random_hetero_network(3)
    agg, _ = aggregate(net, Partition.singletons(net))
    assert agg.n == net.n
    assert agg.r == net.r and agg.s == net.s
    for sub, asub in zip(net.subnetworks, agg.subnetworks):
        assert asub.total_weight == pytest.approx(sub.total_weight)
        assert len(asub.edges) == len(sub.edges)


def test_aggregate_preserves_composite_q():
    for seed in range(8):
        net = random_hetero_network(seed, weighted=seed % 2 == 0, self_loops=True)
        part = random_partition(net, seed + 100)
        before = composite_modularity(net, part).score
        agg, mapping = aggregate(net, part)
        after = composite_modularity(agg, Partition.singletons(agg)).score
        assert after == pytest.approx(before, abs=1e-10)


def test_partition_validation():
    net = path_network()
    with pytest.raises(ValueError, match="label arrays"):
        Partition([[0, 0], [1, 1]]).validate_for(net)
    with pytest.raises(ValueError, match="shape"):
        Partition([[0, 0, 1]]).validate_for(net)
    with pytest.raises(ValueError, match="nonnegative"):
        Partition([[0, 0, -1, 1]]).validate_for(net)
    net2 = random_hetero_network(0)
    bad = Partition([np.zeros(t.node_count, dtype=np.int64) for t in net2.node_tables])
    with pytest.raises(ValueError, match="shared across node types"):
        bad.validate_for(net2)


def test_partition_equivalence():
    p1 = Partition([[0, 0, 1, 1]])
    p2 = Partition([[7, 7, 3, 3]])
    p3 = Partition([[0, 1, 1, 1]])
    assert p1.equivalent_to(p2)
    assert not p1.equivalent_to(p3)
