"""Shared test fixtures: random network generators and independent oracles."""
from __future__ import annotations

import random

import numpy as np

from hmrnet import HeteroNetwork, NetworkBuilder, Partition


def path_network():
    """Unipartite path a-b-c-d, unit weights."""
    b = NetworkBuilder()
    t = b.add_node_type("t")
    for name in "abcd":
        b.add_node(t, name)
    y = b.add_edge_type("e", (t,))
    for i, j in [(0, 1), (1, 2), (2, 3)]:
        b.add_edge(y, (i, j))
    return b.build()


def two_triangles():
    b = NetworkBuilder()
    t = b.add_node_type("t")
    for i in range(6):
        b.add_node(t, f"n{i}")
    y = b.add_edge_type("e", (t,))
    for i, j in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]:
        b.add_edge(y, (i, j))
    return b.build()


def random_hetero_network(
    seed: int,
    sizes: tuple[int, int, int] = (8, 7, 6),
    edges_per_sub: int = 12,
    weighted: bool = False,
    self_loops: bool = False,
) -> HeteroNetwork:
    """Random network with one unipartite, one bipartite, one tripartite subnetwork."""
    rng = random.Random(seed)
    b = NetworkBuilder()
    ta = b.add_node_type("a")
    tb = b.add_node_type("b")
    tc = b.add_node_type("c")
    for t, size in ((ta, sizes[0]), (tb, sizes[1]), (tc, sizes[2])):
        for i in range(size):
            b.add_node(t, f"n{i}")
    uni = b.add_edge_type("uni", (ta,))
    bi = b.add_edge_type("bi", (ta, tb))
    tri = b.add_edge_type("tri", (ta, tb, tc))

    def w():
        return rng.uniform(0.5, 2.0) if weighted else 1.0

    for _ in range(edges_per_sub):
        i = rng.randrange(sizes[0])
        if self_loops and rng.random() < 0.15:
            j = i
        else:
            j = rng.randrange(sizes[0] - 1)
            if j >= i:
                j += 1
        b.add_edge(uni, (i, j), w())
    for _ in range(edges_per_sub):
        b.add_edge(bi, (rng.randrange(sizes[0]), rng.randrange(sizes[1])), w())
    for _ in range(edges_per_sub):
        b.add_edge(
            tri,
            (rng.randrange(sizes[0]), rng.randrange(sizes[1]), rng.randrange(sizes[2])),
            w(),
        )
    return b.build()


def random_unipartite_network(seed: int, n: int, n_edges: int, weighted=False):
    rng = random.Random(seed)
    b = NetworkBuilder()
    t = b.add_node_type("t")
    for i in range(n):
        b.add_node(t, f"n{i}")
    y = b.add_edge_type("e", (t,))
    for _ in range(n_edges):
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        b.add_edge(y, (i, j), rng.uniform(0.5, 2.0) if weighted else 1.0)
    return b.build()


def random_partition(network: HeteroNetwork, seed: int, max_communities: int = 4):
    rng = random.Random(seed)
    labels = []
    base = 0
    for table in network.node_tables:
        k = rng.randint(1, max_communities)
        labels.append([base + rng.randrange(k) for _ in range(table.node_count)])
        base += max_communities
    return Partition(labels)


def eq2_unipartite_oracle(subnetwork, labels) -> float:
    """Direct dense-matrix evaluation of the e - a^2 community sum."""
    labels = np.asarray(labels)
    n = labels.size
    A = np.zeros((n, n))
    for (i, j), w in subnetwork.edges:
        if i == j:
            A[i, i] += 2.0 * w
        else:
            A[i, j] += w
            A[j, i] += w
    m = subnetwork.total_weight
    if m <= 0:
        return 0.0
    q = 0.0
    for c in np.unique(labels):
        mask = labels == c
        e = A[np.ix_(mask, mask)].sum() / (2.0 * m)
        a = A[mask, :].sum() / (2.0 * m)
        q += e - a * a
    return float(q)
