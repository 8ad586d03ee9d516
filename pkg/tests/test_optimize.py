import numpy as np
import pytest

from hmrnet import (
    ConstraintGroups,
    NetworkBuilder,
    NodeRef,
    OptimizerConfig,
    Partition,
    aggregate,
    composite_modularity,
    detect_subnetwork_communities,
    find_constraints,
    format_timings,
    louvain,
    louvain_c,
)

from helpers import random_hetero_network, two_triangles


def test_louvain_two_triangles():
    res = louvain(two_triangles(), OptimizerConfig(rng_seed=3))
    assert res.partition.community_counts() == (2,)
    assert res.report.score == pytest.approx(0.5)


def test_louvain_single_isolated_node():
    b = NetworkBuilder()
    t = b.add_node_type("t")
    b.add_node(t, "solo")
    b.add_edge_type("e", (t,))
    net = b.build()
    res = louvain(net)
    assert res.partition.community_counts() == (1,)
    assert res.report.score == pytest.approx(0.0)


def test_louvain_empty_network_rejected():
    b = NetworkBuilder()
    b.add_node_type("t")
    with pytest.raises(ValueError, match="empty"):
        louvain(b.build())


def test_louvain_deterministic():
    net = random_hetero_network(11, sizes=(10, 9, 8), edges_per_sub=20)
    a = louvain(net, OptimizerConfig(rng_seed=42))
    b = louvain(net, OptimizerConfig(rng_seed=42))
    assert a.partition == b.partition
    assert a.report == b.report
    assert a.q_trace == b.q_trace
    c = louvain(net, OptimizerConfig(rng_seed=43))
    assert c.report.score == pytest.approx(a.report.score, abs=0.5)  # may differ


def test_louvain_trace_monotone_and_consistent():
    for seed in range(4):
        net = random_hetero_network(seed, sizes=(12, 10, 8), edges_per_sub=25)
        res = louvain(net, OptimizerConfig(rng_seed=seed))
        for earlier, later in zip(res.q_trace, res.q_trace[1:]):
            assert later >= earlier - 1e-10
        # incremental bookkeeping agrees with a from-scratch rescore
        assert res.q_trace[-1] == pytest.approx(res.report.score, abs=1e-10)
        singleton_q = composite_modularity(net, Partition.singletons(net)).score
        assert res.report.score >= singleton_q - 1e-10


def test_louvain_idempotent_at_convergence():
    net = random_hetero_network(5, sizes=(10, 8, 6), edges_per_sub=18)
    res = louvain(net, OptimizerConfig(rng_seed=1))
    contracted, _ = aggregate(net, res.partition)
    res2 = louvain(contracted, OptimizerConfig(rng_seed=1))
    assert res2.moves == 0
    assert res2.report.score == pytest.approx(res.report.score, abs=1e-10)


def test_louvain_outer_cap_warns():
    net = random_hetero_network(2, sizes=(14, 12, 10), edges_per_sub=30)
    with pytest.warns(RuntimeWarning, match="outer-iteration cap"):
        louvain(net, OptimizerConfig(rng_seed=0, max_outer_iterations=1))


def test_config_validation():
    with pytest.raises(ValueError, match="gain_epsilon"):
        OptimizerConfig(gain_epsilon=0.0)
    with pytest.raises(ValueError, match="max_outer_iterations"):
        OptimizerConfig(max_outer_iterations=0)


def test_detect_subnetworks_single_reduces_to_louvain():
    net = two_triangles()
    parts = detect_subnetwork_communities(net, OptimizerConfig(rng_seed=9))
    assert len(parts) == 1
    res = louvain(net, OptimizerConfig(rng_seed=9))
    grouped = {}
    for ref, cid in parts[0].items():
        grouped.setdefault(cid, set()).add(ref.index)
    expected = {}
    for i, c in enumerate(res.partition.labels[0]):
        expected.setdefault(int(c), set()).add(i)
    assert sorted(map(sorted, grouped.values())) == sorted(map(sorted, expected.values()))


def test_detect_subnetworks_coverage_flickr_shape():
    # users: friendship (uni), uploads (bi, user-photo), tags (tri, user-photo-tag)
    b = NetworkBuilder()
    u = b.add_node_type("user")
    p = b.add_node_type("photo")
    t = b.add_node_type("tag")
    for i in range(4):
        b.add_node(u, f"u{i}")
        b.add_node(p, f"p{i}")
        b.add_node(t, f"t{i}")
    fr = b.add_edge_type("friend", (u,))
    up = b.add_edge_type("upload", (u, p))
    tag = b.add_edge_type("tagging", (u, p, t))
    b.add_edge(fr, (0, 1))
    b.add_edge(fr, (2, 3))
    for i in range(4):
        b.add_edge(up, (i, i))
        b.add_edge(tag, (i, i, i))
    net = b.build()
    parts = detect_subnetwork_communities(net)
    assert len(parts) == 3
    user_coverage = [sorted(r.index for r in part if r.type_id == 0) for part in parts]
    assert user_coverage == [[0, 1, 2, 3]] * 3
    assert all(r.type_id != 2 for r in parts[0])  # tags not in friendship
    assert all(r.type_id != 2 for r in parts[1])
    assert sorted(r.index for r in parts[2] if r.type_id == 2) == [0, 1, 2, 3]
    # community ids unique across the returned partitions
    all_ids = [set(part.values()) for part in parts]
    assert not (all_ids[0] & all_ids[1])
    assert not (all_ids[1] & all_ids[2])


def test_detect_subnetworks_skips_nonincident_nodes():
    b = NetworkBuilder()
    t = b.add_node_type("t")
    for i in range(3):
        b.add_node(t, f"n{i}")
    y = b.add_edge_type("e", (t,))
    b.add_edge(y, (0, 1))
    net = b.build()
    parts = detect_subnetwork_communities(net)
    assert NodeRef(0, 2) not in parts[0]
    assert NodeRef(0, 0) in parts[0]


def test_find_constraints_definition():
    net = random_hetero_network(0, sizes=(3, 2, 2), edges_per_sub=4)
    # hand-built traces: a and b share, c differs (type 0 nodes)
    parts = [
        {NodeRef(0, 0): 10, NodeRef(0, 1): 10, NodeRef(0, 2): 11},
        {NodeRef(0, 0): 55, NodeRef(0, 1): 55, NodeRef(0, 2): 55},
    ]
    groups = find_constraints(parts, net)
    as_sets = sorted(
        sorted((r.type_id, r.index) for r in g) for g in groups.groups
    )
    assert [(0, 0), (0, 1)] in as_sets
    assert [(0, 2)] in as_sets
    # nodes of other types are isolated -> singleton groups
    flat = [r for g in groups.groups for r in g]
    assert len(flat) == net.n
    assert len(set(flat)) == net.n


def test_find_constraints_single_subnetwork_gives_communities():
    net = two_triangles()
    parts = detect_subnetwork_communities(net, OptimizerConfig(rng_seed=4))
    groups = find_constraints(parts, net)
    sizes = sorted(len(g) for g in groups.groups)
    assert sizes == [3, 3]


def _pairwise_trace_oracle(parts, net):
    """O(n^2) grouping by pairwise trace comparison."""
    refs = [
        NodeRef(t.type_id, i) for t in net.node_tables for i in range(t.node_count)
    ]

    def trace(ref):
        return tuple(
            (y, part[ref]) for y, part in enumerate(parts) if ref in part
        )

    groups = []
    for ref in refs:
        tr = trace(ref)
        placed = False
        if tr:
            for g in groups:
                if trace(g[0]) == tr:
                    g.append(ref)
                    placed = True
                    break
        if not placed:
            groups.append([ref])
    return sorted(sorted(g) for g in groups)


def test_find_constraints_matches_pairwise_oracle():
    for seed in range(5):
        net = random_hetero_network(seed, sizes=(9, 8, 7), edges_per_sub=15)
        parts = detect_subnetwork_communities(net, OptimizerConfig(rng_seed=seed))
        got = sorted(sorted(g) for g in find_constraints(parts, net).groups)
        assert got == _pairwise_trace_oracle(parts, net)


def test_find_constraints_rejects_unknown_nodes():
    net = two_triangles()
    with pytest.raises(ValueError, match="out of range"):
        find_constraints([{NodeRef(0, 99): 1}], net)


def test_louvain_c_communities_are_unions_of_groups():
    for seed in range(4):
        net = random_hetero_network(seed, sizes=(10, 9, 8), edges_per_sub=20)
        config = OptimizerConfig(rng_seed=seed)
        parts = detect_subnetwork_communities(net, config)
        groups = find_constraints(parts, net)
        res = louvain_c(net, config)
        for group in groups.groups:
            labels = {
                int(res.partition.labels[r.type_id][r.index]) for r in group
            }
            assert len(labels) == 1


def test_louvain_c_deterministic_and_consistent():
    net = random_hetero_network(8, sizes=(12, 10, 8), edges_per_sub=24)
    a = louvain_c(net, OptimizerConfig(rng_seed=5))
    b = louvain_c(net, OptimizerConfig(rng_seed=5))
    assert a.partition == b.partition
    assert a.report == b.report
    fresh = composite_modularity(net, a.partition).score
    assert a.report.score == pytest.approx(fresh, abs=1e-12)
    assert set(a.timings) >= {
        "detect_subnetworks_s",
        "find_constraints_s",
        "constrained_optimize_s",
        "moves",
        "outer_iterations",
    }
    text = format_timings(a.timings)
    assert "find_constraints_s=" in text


def test_louvain_c_agreeing_partitions_contract_cleanly():
    # two disjoint triangles in one subnetwork: groups == triangles
    net = two_triangles()
    res = louvain_c(net, OptimizerConfig(rng_seed=2))
    assert res.groups == 2
    assert res.report.score == pytest.approx(0.5)
    assert res.partition.community_counts() == (2,)
