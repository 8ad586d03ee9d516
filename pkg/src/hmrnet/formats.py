"""HMRN text format and partition TSV input/output.

HMRN is a line-oriented UTF-8 format; ``#`` starts a comment line and fields
are separated by tabs or spaces:

    nodetype <name>
    node <nodetype> <name>
    edgetype <name> unipartite <nodetype>
    edgetype <name> kpartite <nodetype_1> ... <nodetype_k>
    edge <edgetype> <node_1> ... <node_k> [weight]

Node type ids follow declaration order.  Node names are created on first use
within the type dictated by the edge signature position; the explicit ``node``
directive exists so that isolated nodes and node order survive serialization
(files without it parse fine, a name may not be declared after it was already
created by an edge line).  The optional weight defaults to 1.0; repeating an
edge line accumulates weight.

Partition files are TSV with one line per node:

    <nodetype>\t<node_name>\t<community_id>
"""
from __future__ import annotations

from typing import IO, Iterable

import numpy as np

from .model import HeteroNetwork, NetworkBuilder, Partition


class HMRNFormatError(ValueError):
    """Malformed input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _lines(source: str | IO[str]) -> Iterable[tuple[int, list[str]]]:
    text = source if isinstance(source, str) else source.read()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped.split()


def parse_hmrn(source: str | IO[str]) -> HeteroNetwork:
    """Parse HMRN text (a string or a text stream) into a network."""
    builder = NetworkBuilder()
    type_ids: dict[str, int] = {}
    edge_ids: dict[str, int] = {}
    signatures: dict[int, tuple[int, ...]] = {}
    for lineno, tokens in _lines(source):
        directive = tokens[0]
        try:
            if directive == "nodetype":
                if len(tokens) != 2:
                    raise ValueError("expected: nodetype <name>")
                type_ids[tokens[1]] = builder.add_node_type(tokens[1])
            elif directive == "node":
                if len(tokens) != 3:
                    raise ValueError("expected: node <nodetype> <name>")
                if tokens[1] not in type_ids:
                    raise ValueError(f"unknown node type {tokens[1]!r}")
                builder.add_node(type_ids[tokens[1]], tokens[2])
            elif directive == "edgetype":
                _parse_edgetype(tokens, builder, type_ids, edge_ids, signatures)
            elif directive == "edge":
                _parse_edge(tokens, builder, edge_ids, signatures)
            else:
                raise ValueError(f"unknown directive {directive!r}")
        except HMRNFormatError:
            raise
        except ValueError as exc:
            raise HMRNFormatError(str(exc), lineno) from None
    return builder.build()


def _parse_edgetype(tokens, builder, type_ids, edge_ids, signatures) -> None:
    if len(tokens) < 4:
        raise ValueError(
            "expected: edgetype <name> unipartite <nodetype> | "
            "edgetype <name> kpartite <nodetype>..."
        )
    name, kind = tokens[1], tokens[2]
    member_names = tokens[3:]
    for type_name in member_names:
        if type_name not in type_ids:
            raise ValueError(f"unknown node type {type_name!r}")
    if kind == "unipartite":
        if len(member_names) != 1:
            raise ValueError("unipartite edge type takes exactly one node type")
        signature = (type_ids[member_names[0]],)
    elif kind == "kpartite":
        if len(member_names) < 2:
            raise ValueError("kpartite edge type takes at least two node types")
        signature = tuple(type_ids[t] for t in member_names)
    else:
        raise ValueError(f"unknown edge type kind {kind!r}")
    edge_ids[name] = builder.add_edge_type(name, signature)
    signatures[edge_ids[name]] = signature


def _parse_edge(tokens, builder, edge_ids, signatures) -> None:
    if len(tokens) < 2:
        raise ValueError("expected: edge <edgetype> <node>... [weight]")
    edge_name = tokens[1]
    if edge_name not in edge_ids:
        raise ValueError(f"unknown edge type {edge_name!r}")
    edge_type_id = edge_ids[edge_name]
    signature = signatures[edge_type_id]
    arity = 2 if len(signature) == 1 else len(signature)
    rest = tokens[2:]
    if len(rest) == arity:
        node_names, weight = rest, 1.0
    elif len(rest) == arity + 1:
        node_names = rest[:-1]
        try:
            weight = float(rest[-1])
        except ValueError:
            raise ValueError(
                f"edge type {edge_name!r} expects {arity} endpoints plus an "
                f"optional numeric weight; trailing field {rest[-1]!r} is not "
                "a number"
            ) from None
    else:
        raise ValueError(
            f"edge type {edge_name!r} expects {arity} endpoints, got {len(rest)}"
        )
    if weight <= 0 or not np.isfinite(weight):
        raise ValueError(f"edge weight must be positive, got {weight}")
    if len(signature) == 1:
        endpoint_types = (signature[0], signature[0])
    else:
        endpoint_types = signature
    endpoints = [
        builder.node_id(endpoint_types[pos], node_names[pos])
        for pos in range(arity)
    ]
    builder.add_edge(edge_type_id, endpoints, weight)


def serialize_hmrn(network: HeteroNetwork) -> str:
    """Render a network as HMRN text; ``parse_hmrn`` restores it exactly."""
    out: list[str] = []
    for table in network.node_tables:
        out.append(f"nodetype {table.name}")
    for table in network.node_tables:
        for name in table.node_names:
            out.append(f"node {table.name} {name}")
    for sub in network.subnetworks:
        type_names = " ".join(
            network.node_tables[t].name for t in sub.signature
        )
        kind = "unipartite" if sub.is_unipartite else "kpartite"
        out.append(f"edgetype {sub.name} {kind} {type_names}")
    for sub in network.subnetworks:
        if sub.is_unipartite:
            tables = (network.node_tables[sub.signature[0]],) * 2
        else:
            tables = tuple(network.node_tables[t] for t in sub.signature)
        for endpoints, weight in sub.edges:
            names = "\t".join(
                tables[pos].node_names[endpoints[pos]]
                for pos in range(len(endpoints))
            )
            out.append(f"edge\t{sub.name}\t{names}\t{weight!r}")
    return "\n".join(out) + "\n"


def write_partition(
    partition: Partition, network: HeteroNetwork, sink: IO[str]
) -> None:
    """Write one TSV line per node: node type, node name, community id."""
    partition.validate_for(network)
    for table in network.node_tables:
        labels = partition.labels[table.type_id]
        for index, node_name in enumerate(table.node_names):
            sink.write(f"{table.name}\t{node_name}\t{int(labels[index])}\n")


def parse_partition(source: str | IO[str], network: HeteroNetwork) -> Partition:
    """Parse a partition TSV against ``network``.

    Every node must be assigned exactly once.  Community ids are re-issued so
    that ids never repeat across node types; the result equals the written
    partition up to relabeling.
    """
    assigned: list[np.ndarray] = [
        np.full(table.node_count, -1, dtype=np.int64)
        for table in network.node_tables
    ]
    fresh: dict[tuple[int, int], int] = {}
    for lineno, tokens in _lines(source):
        if len(tokens) != 3:
            raise HMRNFormatError(
                "expected: <nodetype> <node_name> <community_id>", lineno
            )
        type_name, node_name, community = tokens
        try:
            x = network.node_type_id(type_name)
        except KeyError:
            raise HMRNFormatError(f"unknown node type {type_name!r}", lineno) from None
        try:
            index = network.node_tables[x].index_of(node_name)
        except KeyError:
            raise HMRNFormatError(
                f"unknown node {node_name!r} in type {type_name!r}", lineno
            ) from None
        try:
            file_cid = int(community)
        except ValueError:
            raise HMRNFormatError(
                f"invalid community id {community!r}", lineno
            ) from None
        if assigned[x][index] != -1:
            raise HMRNFormatError(
                f"node {node_name!r} of type {type_name!r} assigned twice", lineno
            )
        key = (x, file_cid)
        if key not in fresh:
            fresh[key] = len(fresh)
        assigned[x][index] = fresh[key]
    missing = [
        f"{table.name}/{table.node_names[i]}"
        for table in network.node_tables
        for i in np.flatnonzero(assigned[table.type_id] == -1)
    ]
    if missing:
        raise HMRNFormatError(
            "partition is missing nodes: " + ", ".join(missing)
        )
    partition = Partition(assigned)
    partition.validate_for(network)
    return partition
