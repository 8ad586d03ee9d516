"""Composite-modularity optimizers.

``louvain`` adapts the two-phase Louvain heuristic to heterogeneous
multi-relational networks: nodes start as singletons and greedily move to the
counterpart community with the largest positive composite gain; converged
communities are contracted and the process repeats.  ``louvain_c`` is the
divide-and-rule variant: detect communities per subnetwork, derive
must-be-assigned-together constraint groups from identical community traces,
contract the groups, and optimize the composite score on the much smaller
contracted network.
"""
from __future__ import annotations

import random
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .model import HeteroNetwork, NetworkBuilder, NodeRef, Partition, aggregate
from .modularity import (
    EvaluationState,
    ModularityReport,
    WeightingScheme,
    composite_modularity,
)


@dataclass(frozen=True)
class OptimizerConfig:
    rng_seed: int = 0
    gain_epsilon: float = 1e-10
    max_outer_iterations: int = 100
    scheme: WeightingScheme = field(default_factory=WeightingScheme.edge_fraction)

    def __post_init__(self):
        if self.gain_epsilon <= 0:
            raise ValueError("gain_epsilon must be positive")
        if self.max_outer_iterations <= 0:
            raise ValueError("max_outer_iterations must be positive")


@dataclass
class LouvainResult:
    partition: Partition
    report: ModularityReport
    q_trace: list[float]
    moves: int
    outer_iterations: int


@dataclass
class LouvainCResult:
    partition: Partition
    report: ModularityReport
    timings: dict[str, float | int]
    q_trace: list[float]
    groups: int


@dataclass(frozen=True)
class ConstraintGroups:
    """Must-be-assigned-together node groups; a partition of all nodes."""

    groups: tuple[tuple[NodeRef, ...], ...]


def _flat_layout(network: HeteroNetwork):
    offsets: list[int] = []
    type_of: list[int] = []
    total = 0
    for table in network.node_tables:
        offsets.append(total)
        total += table.node_count
        type_of.extend([table.type_id] * table.node_count)
    return offsets, type_of


def _counterpart_lists(network: HeteroNetwork) -> list[list[int]]:
    """Per flattened node, the type-local indices of its counterparts.

    Counterparts are same-type nodes at one or two co-incidence hops, hops
    taken across all subnetworks; hyperedge endpoints count as pairwise
    adjacent.  The result depends only on the network, so one table serves
    every sweep of a phase.
    """
    offsets, type_of = _flat_layout(network)
    n = network.n
    adj: list[set[int]] = [set() for _ in range(n)]
    for sub in network.subnetworks:
        if sub.is_unipartite:
            base = offsets[sub.signature[0]]
            for (i, j), _ in sub.edges:
                if i != j:
                    adj[base + i].add(base + j)
                    adj[base + j].add(base + i)
        else:
            bases = [offsets[t] for t in sub.signature]
            k = sub.k
            for endpoints, _ in sub.edges:
                gids = [bases[p] + endpoints[p] for p in range(k)]
                for ga in gids:
                    adj[ga].update(gids)
    for g in range(n):
        adj[g].discard(g)
    adj_by_type: list[dict[int, list[int]]] = []
    for g in range(n):
        split: dict[int, list[int]] = {}
        for u in sorted(adj[g]):
            split.setdefault(type_of[u], []).append(u)
        adj_by_type.append(split)
    out: list[list[int]] = []
    for g in range(n):
        tv = type_of[g]
        acc: set[int] = set(adj_by_type[g].get(tv, ()))
        for u in adj[g]:
            same = adj_by_type[u].get(tv)
            if same:
                acc.update(same)
        acc.discard(g)
        base = offsets[tv]
        out.append(sorted(u - base for u in acc))
    return out


def _phase_one(
    network: HeteroNetwork,
    state: EvaluationState,
    rng: random.Random,
    gain_epsilon: float,
) -> int:
    """Sweep nodes in shuffled order until a full sweep makes no move."""
    offsets, type_of = _flat_layout(network)
    cp = _counterpart_lists(network)
    order = list(range(network.n))
    labels = state.labels
    total_moves = 0
    while True:
        rng.shuffle(order)
        sweep_moves = 0
        for g in order:
            clist = cp[g]
            if not clist:
                continue
            x = type_of[g]
            i = g - offsets[x]
            lab = labels[x]
            current = lab[i]
            targets = {lab[j] for j in clist}
            targets.discard(current)
            if not targets:
                continue
            gains = state.gains(NodeRef(x, i), targets)
            best_c = None
            best_g = gain_epsilon
            for c, gv in gains.items():
                if gv > best_g or (gv == best_g and best_c is not None and c < best_c):
                    best_c = c
                    best_g = gv
            if best_c is not None:
                state.apply(NodeRef(x, i), best_c)
                sweep_moves += 1
        total_moves += sweep_moves
        if sweep_moves == 0:
            return total_moves


def louvain(network: HeteroNetwork, config: OptimizerConfig | None = None) -> LouvainResult:
    """Optimize the composite score by adapted two-phase Louvain.

    Deterministic given (network, config); the returned partition labels the
    original nodes and the report re-scores it from scratch.
    """
    config = config or OptimizerConfig()
    if network.n == 0:
        raise ValueError("cannot optimize an empty network")
    rng = random.Random(config.rng_seed)
    current = network
    orig_to_cur = [
        np.arange(t.node_count, dtype=np.int64) for t in network.node_tables
    ]
    assignment = Partition.singletons(network)
    q_trace: list[float] = []
    total_moves = 0
    outer = 0
    converged = False
    while outer < config.max_outer_iterations:
        outer += 1
        state = EvaluationState(current, Partition.singletons(current), config.scheme)
        moves = _phase_one(current, state, rng, config.gain_epsilon)
        total_moves += moves
        q_trace.append(state.composite())
        labels_cur = [np.asarray(l, dtype=np.int64) for l in state.labels]
        assignment = Partition(
            labels_cur[x][orig_to_cur[x]] for x in range(network.r)
        )
        if moves == 0:
            converged = True
            break
        new_net, cmap = aggregate(current, Partition(labels_cur))
        orig_to_cur = [
            np.fromiter(
                (cmap[int(c)].index for c in assignment.labels[x]),
                dtype=np.int64,
                count=assignment.labels[x].size,
            )
            for x in range(network.r)
        ]
        current = new_net
    if not converged:
        warnings.warn(
            f"louvain stopped at the outer-iteration cap "
            f"({config.max_outer_iterations}) without converging",
            RuntimeWarning,
        )
    report = composite_modularity(network, assignment, config.scheme)
    return LouvainResult(assignment, report, q_trace, total_moves, outer)


def _derived_seed(seed: int, salt: int) -> int:
    return (seed * 1_000_003 + 0x9E3779B9 * (salt + 1)) % (1 << 63)


def _single_subnetwork_network(network: HeteroNetwork, y: int):
    """Reduce to subnetwork ``y`` and its incident nodes, keeping all types."""
    sub = network.subnetworks[y]
    builder = NetworkBuilder()
    for table in network.node_tables:
        builder.add_node_type(table.name)
    index_map: dict[tuple[int, int], int] = {}
    to_orig: dict[tuple[int, int], NodeRef] = {}
    for pos in range(len(sub.signature)):
        t = sub.signature[pos]
        table = network.node_tables[t]
        for old_i in sorted(sub.incidence[pos].keys()):
            if (t, old_i) not in index_map:
                new_i = builder.add_node(t, table.node_names[old_i])
                index_map[(t, old_i)] = new_i
                to_orig[(t, new_i)] = NodeRef(t, old_i)
    ey = builder.add_edge_type(sub.name, sub.signature)
    if sub.is_unipartite:
        x = sub.signature[0]
        for (i, j), w in sub.edges:
            builder.add_edge(ey, (index_map[(x, i)], index_map[(x, j)]), w)
    else:
        for endpoints, w in sub.edges:
            builder.add_edge(
                ey,
                tuple(
                    index_map[(sub.signature[p], endpoints[p])]
                    for p in range(sub.k)
                ),
                w,
            )
    return builder.build(), to_orig


def detect_subnetwork_communities(
    network: HeteroNetwork, config: OptimizerConfig | None = None
) -> list[dict[NodeRef, int]]:
    """Run Louvain on each subnetwork in isolation.

    Each returned mapping covers exactly the nodes incident to its
    subnetwork; community ids are globally unique across all the returned
    partitions.  The objective in each run is the subnetwork's own score
    (edge-fraction weighting of a single subnetwork).
    """
    config = config or OptimizerConfig()
    results: list[dict[NodeRef, int]] = []
    next_id = 0
    for y in range(network.s):
        reduced, to_orig = _single_subnetwork_network(network, y)
        if reduced.n == 0:
            results.append({})
            continue
        sub_config = replace(
            config,
            rng_seed=_derived_seed(config.rng_seed, y),
            scheme=WeightingScheme.edge_fraction(),
        )
        res = louvain(reduced, sub_config)
        remap: dict[int, int] = {}
        mapping: dict[NodeRef, int] = {}
        for x in range(reduced.r):
            arr = res.partition.labels[x]
            for new_i in range(arr.size):
                c = int(arr[new_i])
                if c not in remap:
                    remap[c] = next_id
                    next_id += 1
                mapping[to_orig[(x, new_i)]] = remap[c]
        results.append(mapping)
    return results


def find_constraints(
    per_subnetwork_partitions: Sequence[Mapping[NodeRef, int]],
    network: HeteroNetwork,
) -> ConstraintGroups:
    """Group nodes by identical community traces.

    A node's trace is the ordered list of (subnetwork id, community id) pairs
    over the subnetworks containing it.  Nodes with an empty trace each form
    their own singleton group.  Runs in near-linear time via hashing.
    """
    for part in per_subnetwork_partitions:
        for ref in part:
            network.validate_ref(ref)
    by_trace: dict[tuple[tuple[int, int], ...], list[NodeRef]] = {}
    singletons: list[tuple[NodeRef, ...]] = []
    for table in network.node_tables:
        x = table.type_id
        for i in range(table.node_count):
            ref = NodeRef(x, i)
            trace = tuple(
                (y, part[ref])
                for y, part in enumerate(per_subnetwork_partitions)
                if ref in part
            )
            if not trace:
                singletons.append((ref,))
            else:
                bucket = by_trace.setdefault(trace, [])
                if bucket and bucket[0].type_id != x:
                    raise ValueError(
                        "community ids are shared across node types; traces "
                        "must come from type-disjoint partitions"
                    )
                bucket.append(ref)
    groups = tuple(tuple(g) for g in by_trace.values()) + tuple(singletons)
    return ConstraintGroups(groups=groups)


def louvain_c(
    network: HeteroNetwork, config: OptimizerConfig | None = None
) -> LouvainCResult:
    """Constrained composite optimization (divide and rule).

    Detect communities per subnetwork, derive must-be-assigned-together
    groups, contract each group to a supernode, optimize the composite score
    on the contracted network, and map the result back to the original nodes.
    Every output community is a union of constraint groups.
    """
    config = config or OptimizerConfig()
    if network.n == 0:
        raise ValueError("cannot optimize an empty network")
    t0 = time.perf_counter()
    per_sub = detect_subnetwork_communities(network, config)
    t1 = time.perf_counter()
    constraints = find_constraints(per_sub, network)
    t2 = time.perf_counter()
    group_labels = [
        np.full(t.node_count, -1, dtype=np.int64) for t in network.node_tables
    ]
    for gidx, group in enumerate(constraints.groups):
        for ref in group:
            group_labels[ref.type_id][ref.index] = gidx
    group_partition = Partition(group_labels)
    contracted, cmap = aggregate(network, group_partition)
    res = louvain(contracted, config)
    final = []
    for x in range(network.r):
        contracted_labels = res.partition.labels
        final.append(
            np.fromiter(
                (
                    int(contracted_labels[cmap[int(g)].type_id][cmap[int(g)].index])
                    for g in group_labels[x]
                ),
                dtype=np.int64,
                count=group_labels[x].size,
            )
        )
    t3 = time.perf_counter()
    partition = Partition(final)
    report = composite_modularity(network, partition, config.scheme)
    timings: dict[str, float | int] = {
        "detect_subnetworks_s": t1 - t0,
        "find_constraints_s": t2 - t1,
        "constrained_optimize_s": t3 - t2,
        "moves": res.moves,
        "outer_iterations": res.outer_iterations,
        "groups": len(constraints.groups),
    }
    return LouvainCResult(partition, report, timings, res.q_trace, len(constraints.groups))


def format_timings(timings: Mapping[str, float | int]) -> str:
    """Key-value text rendering of a timing breakdown."""
    lines = []
    for key, value in timings.items():
        if isinstance(value, float):
            lines.append(f"{key}={value:.6f}")
        else:
            lines.append(f"{key}={value}")
    return "\n".join(lines)
