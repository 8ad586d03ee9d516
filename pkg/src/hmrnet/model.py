"""Typed heterogeneous multigraph model.

A network holds r node types and s edge types.  Each edge type induces a
subnetwork: either unipartite (weighted edges inside one node type, self-loops
allowed) or k-partite (weighted k-way hyperedges across k pairwise-distinct
node types).  Parallel edges accumulate into a single weighted entry, so the
adjacency value between two endpoints is the sum of the weights of all edges
joining them.

Self-loop convention: a unipartite edge (i, i) with weight w contributes 2*w
to the adjacency diagonal.  This keeps the total adjacency mass of every
subnetwork at exactly twice its edge weight and makes modularity invariant
under community contraction (see :func:`aggregate`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np


class NodeRef(NamedTuple):
    """A node addressed as (node type id, index within that type)."""

    type_id: int
    index: int


@dataclass(frozen=True)
class NodeTypeTable:
    type_id: int
    name: str
    node_names: tuple[str, ...]
    name_index: Mapping[str, int] = field(repr=False)

    @property
    def node_count(self) -> int:
        return len(self.node_names)

    def index_of(self, node_name: str) -> int:
        try:
            return self.name_index[node_name]
        except KeyError:
            raise KeyError(
                f"unknown node {node_name!r} in node type {self.name!r}"
            ) from None


@dataclass(frozen=True)
class Subnetwork:
    """One edge type's weighted (hyper)edge set with incidence indices.

    ``signature`` lists the node type ids of the edge positions: length 1 for
    a unipartite edge type (edges are index pairs ``(i, j)`` with ``i <= j``),
    length k >= 2 with pairwise-distinct entries for a k-partite edge type
    (edges are positional k-tuples).  ``incidence`` has one mapping per
    signature position; for unipartite subnetworks the single mapping covers
    both endpoints.
    """

    edge_type_id: int
    name: str
    signature: tuple[int, ...]
    edges: tuple[tuple[tuple[int, ...], float], ...]
    total_weight: float
    incidence: tuple[Mapping[int, tuple[int, ...]], ...] = field(repr=False)

    @property
    def is_unipartite(self) -> bool:
        return len(self.signature) == 1

    @property
    def arity(self) -> int:
        return 2 if self.is_unipartite else len(self.signature)

    @property
    def k(self) -> int:
        return len(self.signature)

    def incident_nodes(self) -> tuple[frozenset[int], ...]:
        """Per signature position, the set of node indices touching an edge."""
        return tuple(frozenset(inc.keys()) for inc in self.incidence)


@dataclass(frozen=True)
class HeteroNetwork:
    node_tables: tuple[NodeTypeTable, ...]
    subnetworks: tuple[Subnetwork, ...]

    @property
    def r(self) -> int:
        return len(self.node_tables)

    @property
    def s(self) -> int:
        return len(self.subnetworks)

    @property
    def n(self) -> int:
        return sum(t.node_count for t in self.node_tables)

    @property
    def m(self) -> float:
        return sum(sub.total_weight for sub in self.subnetworks)

    def node_type_id(self, type_name: str) -> int:
        for table in self.node_tables:
            if table.name == type_name:
                return table.type_id
        raise KeyError(f"unknown node type {type_name!r}")

    def node_ref(self, type_name: str, node_name: str) -> NodeRef:
        table = self.node_tables[self.node_type_id(type_name)]
        return NodeRef(table.type_id, table.index_of(node_name))

    def node_name(self, ref: NodeRef) -> str:
        return self.node_tables[ref.type_id].node_names[ref.index]

    def validate_ref(self, ref: NodeRef) -> None:
        if not 0 <= ref.type_id < self.r:
            raise ValueError(f"node type id {ref.type_id} out of range")
        if not 0 <= ref.index < self.node_tables[ref.type_id].node_count:
            raise ValueError(
                f"node index {ref.index} out of range for type "
                f"{self.node_tables[ref.type_id].name!r}"
            )


class NetworkBuilder:
    """Incrementally assembles a validated :class:`HeteroNetwork`.

    Parallel edges (identical endpoint tuples) accumulate weight.  Node names
    must be unique and whitespace-free within their type so that the network
    survives a round trip through the HMRN text format.
    """

    def __init__(self) -> None:
        self._type_names: list[str] = []
        self._node_names: list[list[str]] = []
        self._node_index: list[dict[str, int]] = []
        self._edge_type_names: list[str] = []
        self._signatures: list[tuple[int, ...]] = []
        self._edge_weights: list[dict[tuple[int, ...], float]] = []

    def add_node_type(self, name: str) -> int:
        if name in self._type_names:
            raise ValueError(f"duplicate node type declaration {name!r}")
        self._check_name(name, "node type")
        self._type_names.append(name)
        self._node_names.append([])
        self._node_index.append({})
        return len(self._type_names) - 1

    def add_node(self, type_id: int, name: str) -> int:
        index = self._node_index[type_id]
        if name in index:
            raise ValueError(
                f"duplicate node {name!r} in node type {self._type_names[type_id]!r}"
            )
        self._check_name(name, "node")
        index[name] = len(self._node_names[type_id])
        self._node_names[type_id].append(name)
        return index[name]

    def node_id(self, type_id: int, name: str) -> int:
        """Index of the named node, creating it on first use."""
        existing = self._node_index[type_id].get(name)
        if existing is not None:
            return existing
        return self.add_node(type_id, name)

    def add_edge_type(self, name: str, signature: Sequence[int]) -> int:
        if name in self._edge_type_names:
            raise ValueError(f"duplicate edge type declaration {name!r}")
        self._check_name(name, "edge type")
        sig = tuple(signature)
        if not sig:
            raise ValueError("edge type signature must name at least one node type")
        for type_id in sig:
            if not 0 <= type_id < len(self._type_names):
                raise ValueError(f"edge type {name!r} references unknown node type")
        if len(sig) >= 2 and len(set(sig)) != len(sig):
            raise ValueError(
                f"k-partite edge type {name!r} must span pairwise-distinct node types"
            )
        self._edge_type_names.append(name)
        self._signatures.append(sig)
        self._edge_weights.append({})
        return len(self._edge_type_names) - 1

    def add_edge(
        self, edge_type_id: int, endpoints: Sequence[int], weight: float = 1.0
    ) -> None:
        if not 0 <= edge_type_id < len(self._edge_type_names):
            raise ValueError(f"unknown edge type id {edge_type_id}")
        if weight <= 0:
            raise ValueError(f"edge weight must be positive, got {weight}")
        sig = self._signatures[edge_type_id]
        arity = 2 if len(sig) == 1 else len(sig)
        if len(endpoints) != arity:
            raise ValueError(
                f"edge type {self._edge_type_names[edge_type_id]!r} expects "
                f"{arity} endpoints, got {len(endpoints)}"
            )
        if len(sig) == 1:
            x = sig[0]
            i, j = endpoints
            self._check_node(x, i)
            self._check_node(x, j)
            key = (i, j) if i <= j else (j, i)
        else:
            for pos, type_id in enumerate(sig):
                self._check_node(type_id, endpoints[pos])
            key = tuple(endpoints)
        weights = self._edge_weights[edge_type_id]
        weights[key] = weights.get(key, 0.0) + float(weight)

    def build(self) -> HeteroNetwork:
        tables = tuple(
            NodeTypeTable(
                type_id=x,
                name=self._type_names[x],
                node_names=tuple(self._node_names[x]),
                name_index=dict(self._node_index[x]),
            )
            for x in range(len(self._type_names))
        )
        subnetworks = []
        for y, sig in enumerate(self._signatures):
            edges = tuple(self._edge_weights[y].items())
            incidence: list[dict[int, list[int]]] = [
                {} for _ in range(len(sig))
            ]
            for eid, (endpoints, _) in enumerate(edges):
                if len(sig) == 1:
                    i, j = endpoints
                    incidence[0].setdefault(i, []).append(eid)
                    if j != i:
                        incidence[0].setdefault(j, []).append(eid)
                else:
                    for pos in range(len(sig)):
                        incidence[pos].setdefault(endpoints[pos], []).append(eid)
            subnetworks.append(
                Subnetwork(
                    edge_type_id=y,
                    name=self._edge_type_names[y],
                    signature=sig,
                    edges=edges,
                    total_weight=float(sum(w for _, w in edges)),
                    incidence=tuple(
                        {i: tuple(eids) for i, eids in inc.items()}
                        for inc in incidence
                    ),
                )
            )
        return HeteroNetwork(node_tables=tables, subnetworks=tuple(subnetworks))

    def _check_node(self, type_id: int, index: int) -> None:
        if not 0 <= index < len(self._node_names[type_id]):
            raise ValueError(
                f"node index {index} out of range for type {self._type_names[type_id]!r}"
            )

    @staticmethod
    def _check_name(name: str, what: str) -> None:
        if not name or any(c.isspace() for c in name) or name.startswith("#"):
            raise ValueError(f"invalid {what} name {name!r}")


class Partition:
    """Disjoint community labels, one int array per node type.

    Community ids are nonnegative and never shared across node types, so a
    label identifies both a community and the type it lives in.
    """

    __slots__ = ("labels",)

    def __init__(self, labels: Iterable[np.ndarray | Sequence[int]]):
        self.labels: tuple[np.ndarray, ...] = tuple(
            np.asarray(a, dtype=np.int64) for a in labels
        )

    @classmethod
    def singletons(cls, network: HeteroNetwork) -> "Partition":
        """Every node in its own community; ids are global node offsets."""
        out = []
        offset = 0
        for table in network.node_tables:
            out.append(np.arange(offset, offset + table.node_count, dtype=np.int64))
            offset += table.node_count
        return cls(out)

    def label_of(self, ref: NodeRef) -> int:
        return int(self.labels[ref.type_id][ref.index])

    def community_count(self, type_id: int) -> int:
        if self.labels[type_id].size == 0:
            return 0
        return int(np.unique(self.labels[type_id]).size)

    def community_counts(self) -> tuple[int, ...]:
        return tuple(self.community_count(x) for x in range(len(self.labels)))

    def validate_for(self, network: HeteroNetwork) -> None:
        if len(self.labels) != network.r:
            raise ValueError(
                f"partition has {len(self.labels)} label arrays, network has "
                f"{network.r} node types"
            )
        seen: set[int] = set()
        for x, table in enumerate(network.node_tables):
            arr = self.labels[x]
            if arr.shape != (table.node_count,):
                raise ValueError(
                    f"label array for type {table.name!r} has shape {arr.shape}, "
                    f"expected ({table.node_count},)"
                )
            if arr.size == 0:
                continue
            if int(arr.min()) < 0:
                raise ValueError("community ids must be nonnegative")
            ids = set(int(v) for v in np.unique(arr))
            if ids & seen:
                raise ValueError(
                    f"community ids {sorted(ids & seen)} are shared across node types"
                )
            seen |= ids

    def equivalent_to(self, other: "Partition") -> bool:
        """True when both partitions induce the same blocks (up to relabeling)."""
        if len(self.labels) != len(other.labels):
            return False
        forward: dict[int, int] = {}
        backward: dict[int, int] = {}
        for a, b in zip(self.labels, other.labels):
            if a.shape != b.shape:
                return False
            for la, lb in zip(a.tolist(), b.tolist()):
                if forward.setdefault(la, lb) != lb:
                    return False
                if backward.setdefault(lb, la) != la:
                    return False
        return True

    def copy(self) -> "Partition":
        return Partition(a.copy() for a in self.labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return len(self.labels) == len(other.labels) and all(
            np.array_equal(a, b) for a, b in zip(self.labels, other.labels)
        )

    def __repr__(self) -> str:
        sizes = ", ".join(str(a.size) for a in self.labels)
        return f"Partition(<{sizes} nodes>)"


def co_incidence_sets(network: HeteroNetwork) -> list[set[NodeRef]]:
    """Per node (flattened type-major order), the set of co-incident nodes.

    Two nodes are co-incident when some edge of any subnetwork contains both;
    hyperedge endpoints are pairwise adjacent.  Self-loops do not make a node
    its own neighbor.
    """
    offsets = _type_offsets(network)
    adj: list[set[NodeRef]] = [set() for _ in range(network.n)]
    for sub in network.subnetworks:
        if sub.is_unipartite:
            x = sub.signature[0]
            base = offsets[x]
            for (i, j), _ in sub.edges:
                if i != j:
                    adj[base + i].add(NodeRef(x, j))
                    adj[base + j].add(NodeRef(x, i))
        else:
            for endpoints, _ in sub.edges:
                refs = [
                    NodeRef(sub.signature[pos], endpoints[pos])
                    for pos in range(sub.k)
                ]
                for a in refs:
                    ga = offsets[a.type_id] + a.index
                    for b in refs:
                        if a != b:
                            adj[ga].add(b)
    return adj


def counterparts(network: HeteroNetwork, v: NodeRef) -> set[NodeRef]:
    """Same-type nodes reachable from ``v`` in one or two co-incidence hops.

    Hops may chain across different subnetworks.  Isolated nodes have no
    counterparts.
    """
    network.validate_ref(v)
    offsets = _type_offsets(network)
    adj = co_incidence_sets(network)
    out: set[NodeRef] = set()
    for u in adj[offsets[v.type_id] + v.index]:
        if u.type_id == v.type_id:
            out.add(u)
        for w in adj[offsets[u.type_id] + u.index]:
            if w.type_id == v.type_id:
                out.add(w)
    out.discard(v)
    return out


def aggregate(
    network: HeteroNetwork, partition: Partition
) -> tuple[HeteroNetwork, dict[int, NodeRef]]:
    """Contract every community to a single node.

    Returns the contracted network and a map from community id to the new
    node.  Node and edge type structure is preserved; each original edge
    becomes an edge among the communities of its endpoints with accumulated
    weight, intra-community unipartite edges becoming self-loops.  Total
    weight per subnetwork is preserved exactly, and every modularity value is
    invariant: evaluating the contracted network under its singleton
    partition reproduces the original scores.
    """
    partition.validate_for(network)
    builder = NetworkBuilder()
    mapping: dict[int, NodeRef] = {}
    for table in network.node_tables:
        x = builder.add_node_type(table.name)
        arr = partition.labels[table.type_id]
        for cid in sorted(int(c) for c in np.unique(arr)) if arr.size else []:
            index = builder.add_node(x, f"c{cid}")
            mapping[cid] = NodeRef(x, index)
    for sub in network.subnetworks:
        y = builder.add_edge_type(sub.name, sub.signature)
        if sub.is_unipartite:
            labels = partition.labels[sub.signature[0]]
            for (i, j), w in sub.edges:
                builder.add_edge(
                    y,
                    (mapping[int(labels[i])].index, mapping[int(labels[j])].index),
                    w,
                )
        else:
            label_arrays = [partition.labels[t] for t in sub.signature]
            for endpoints, w in sub.edges:
                builder.add_edge(
                    y,
                    tuple(
                        mapping[int(label_arrays[pos][endpoints[pos]])].index
                        for pos in range(sub.k)
                    ),
                    w,
                )
    return builder.build(), mapping


def _type_offsets(network: HeteroNetwork) -> list[int]:
    offsets = []
    total = 0
    for table in network.node_tables:
        offsets.append(total)
        total += table.node_count
    return offsets
