"""Planted-partition benchmark: generator, NMI metric, sweep harnesses.

The generator plants link-pattern communities: per-type node groups plus a
list of blocks, each block sampling an exact number of distinct edges
uniformly inside one (edge type, community tuple) cell.  Noise edges are then
added on top: their edge type is drawn in proportion to the planted per-type
totals, endpoints uniform over the full node sets, duplicates accumulating
weight.  Both choices are assumptions recorded in the default spec header.
"""
from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import IO, Iterable, Sequence

import numpy as np

from .baselines import (
    baseline_detect,
    extend_with_singletons,
    naive_simp,
    project_common_neighbors,
    project_jaccard,
)
from .formats import HMRNFormatError, _lines
from .model import HeteroNetwork, NetworkBuilder, Partition
from .optimize import OptimizerConfig, louvain, louvain_c

SWEEP_METHODS = ("louvain", "louvain-c", "naive-simp", "trans-cn", "trans-jd")

NOISE_CSV_HEADER = "method,noise,seed,node_type,nmi,q,wall_ms"
SCALING_CSV_HEADER = "method,edges,noise,seed,node_type,nmi,q,wall_ms"

# Default planted-pattern spec.  The three counts stated for the reference
# pattern (gg G1 G1 = 50, gg G1 G2 = 50, rg R1 G1 = 80) are kept verbatim;
# the remaining 570 edges fill out the qualitative structure so that every
# community has a distinctive link pattern: each red community is internally
# dense, G1 and G2 are entangled inside the green unipartite subnetwork and
# share the red partner R1, and only the hyperedge blocks tell G1 from G2
# (via distinct red and blue partners).
DEFAULT_SPEC_TEXT = """\
# Planted link-pattern spec (750 edges total).
#
# Generator assumptions:
#   * planted edges: sampled uniformly without replacement inside each block
#   * noise edges: floor(noise * total planted) extra edges; the edge type of
#     each noise edge is drawn in proportion to planted per-type totals;
#     endpoints uniform over the type's full node sets; duplicates accumulate
#     weight
nodetype red
nodetype green
nodetype blue
group red R1 15
group red R2 15
group red R3 15
group red R4 15
group green G1 20
group green G2 20
group green G3 20
group blue B1 25
group blue B2 25
edgetype rr unipartite red
edgetype gg unipartite green
edgetype rg kpartite red green
edgetype rgb kpartite red green blue
block rr R1 R1 28
block rr R2 R2 28
block rr R3 R3 27
block rr R4 R4 27
block gg G1 G1 50
block gg G1 G2 50
block gg G2 G2 30
block gg G3 G3 30
block rg R1 G1 80
block rg R1 G2 60
block rg R2 G3 60
block rgb R4 G1 B1 90
block rgb R4 G3 B1 70
block rgb R3 G2 B2 120
noise 0.0
seed 0
"""


@dataclass(frozen=True)
class PatternSpec:
    """Planted link-pattern description driving the synthetic generator."""

    node_types: tuple[tuple[str, tuple[tuple[str, int], ...]], ...]
    edge_types: tuple[tuple[str, tuple[str, ...]], ...]
    blocks: tuple[tuple[str, tuple[str, ...], int], ...]
    noise_rate: float = 0.0
    rng_seed: int = 0

    def total_planted(self) -> int:
        return sum(count for _, _, count in self.blocks)

    def validate(self) -> None:
        if self.noise_rate < 0:
            raise ValueError("noise rate must be nonnegative")
        type_names = [name for name, _ in self.node_types]
        if len(set(type_names)) != len(type_names):
            raise ValueError("duplicate node type in spec")
        groups: dict[str, dict[str, int]] = {}
        for type_name, group_list in self.node_types:
            seen: dict[str, int] = {}
            for community, size in group_list:
                if community in seen:
                    raise ValueError(f"duplicate community {community!r}")
                if size <= 0:
                    raise ValueError(f"community {community!r} has size {size}")
                seen[community] = size
            groups[type_name] = seen
        edge_sigs: dict[str, tuple[str, ...]] = {}
        for edge_name, signature in self.edge_types:
            if edge_name in edge_sigs:
                raise ValueError(f"duplicate edge type {edge_name!r}")
            for t in signature:
                if t not in groups:
                    raise ValueError(
                        f"edge type {edge_name!r} references unknown node type {t!r}"
                    )
            if len(signature) >= 2 and len(set(signature)) != len(signature):
                raise ValueError(
                    f"k-partite edge type {edge_name!r} repeats a node type"
                )
            edge_sigs[edge_name] = signature
        for edge_name, communities, count in self.blocks:
            if edge_name not in edge_sigs:
                raise ValueError(f"block references unknown edge type {edge_name!r}")
            signature = edge_sigs[edge_name]
            arity = 2 if len(signature) == 1 else len(signature)
            if len(communities) != arity:
                raise ValueError(
                    f"block on {edge_name!r} names {len(communities)} communities, "
                    f"expected {arity}"
                )
            position_types = (
                (signature[0], signature[0]) if len(signature) == 1 else signature
            )
            sizes = []
            for community, t in zip(communities, position_types):
                if community not in groups[t]:
                    raise ValueError(
                        f"block on {edge_name!r} references unknown community "
                        f"{community!r} of type {t!r}"
                    )
                sizes.append(groups[t][community])
            if count <= 0:
                raise ValueError("block count must be positive")
            possible = _block_capacity(len(signature) == 1, communities, sizes)
            if count > possible:
                raise ValueError(
                    f"block on {edge_name!r} wants {count} edges but only "
                    f"{possible} distinct edges exist"
                )


def _block_capacity(
    unipartite: bool, communities: Sequence[str], sizes: Sequence[int]
) -> int:
    if unipartite and communities[0] == communities[1]:
        return sizes[0] * (sizes[0] - 1) // 2
    capacity = 1
    for s in sizes:
        capacity *= s
    return capacity


def parse_pattern_spec(source: str | IO[str]) -> PatternSpec:
    """Parse the plain-text block-list spec format."""
    node_types: list[tuple[str, list[tuple[str, int]]]] = []
    type_index: dict[str, int] = {}
    edge_types: list[tuple[str, tuple[str, ...]]] = []
    blocks: list[tuple[str, tuple[str, ...], int]] = []
    noise_rate = 0.0
    rng_seed = 0
    for lineno, tokens in _lines(source):
        directive = tokens[0]
        try:
            if directive == "nodetype":
                if len(tokens) != 2:
                    raise ValueError("expected: nodetype <name>")
                if tokens[1] in type_index:
                    raise ValueError(f"duplicate node type {tokens[1]!r}")
                type_index[tokens[1]] = len(node_types)
                node_types.append((tokens[1], []))
            elif directive == "group":
                if len(tokens) != 4:
                    raise ValueError("expected: group <nodetype> <community> <size>")
                if tokens[1] not in type_index:
                    raise ValueError(f"unknown node type {tokens[1]!r}")
                node_types[type_index[tokens[1]]][1].append(
                    (tokens[2], int(tokens[3]))
                )
            elif directive == "edgetype":
                if len(tokens) < 4:
                    raise ValueError("expected: edgetype <name> <kind> <nodetype>...")
                kind = tokens[2]
                members = tuple(tokens[3:])
                if kind == "unipartite" and len(members) == 1:
                    pass
                elif kind == "kpartite" and len(members) >= 2:
                    pass
                else:
                    raise ValueError(f"bad edge type declaration {tokens[1]!r}")
                edge_types.append((tokens[1], members))
            elif directive == "block":
                if len(tokens) < 4:
                    raise ValueError(
                        "expected: block <edgetype> <community>... <count>"
                    )
                blocks.append((tokens[1], tuple(tokens[2:-1]), int(tokens[-1])))
            elif directive == "noise":
                noise_rate = float(tokens[1])
            elif directive == "seed":
                rng_seed = int(tokens[1])
            else:
                raise ValueError(f"unknown directive {directive!r}")
        except (ValueError, IndexError) as exc:
            if isinstance(exc, HMRNFormatError):
                raise
            raise HMRNFormatError(str(exc), lineno) from None
    spec = PatternSpec(
        node_types=tuple((name, tuple(gs)) for name, gs in node_types),
        edge_types=tuple(edge_types),
        blocks=tuple(blocks),
        noise_rate=noise_rate,
        rng_seed=rng_seed,
    )
    spec.validate()
    return spec


def default_pattern_spec() -> PatternSpec:
    return parse_pattern_spec(DEFAULT_SPEC_TEXT)


def _unrank_pair(t: int, n: int) -> tuple[int, int]:
    """The t-th pair (i < j) of range(n) in lexicographic order."""
    i = (2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * t)) // 2
    i = max(0, min(i, n - 2))
    while i + 1 < n - 1 and (i + 1) * (2 * n - i - 2) // 2 <= t:
        i += 1
    while i > 0 and i * (2 * n - i - 1) // 2 > t:
        i -= 1
    j = t - i * (2 * n - i - 1) // 2 + i + 1
    return i, j


def generate_planted(spec: PatternSpec) -> tuple[HeteroNetwork, Partition]:
    """Build a synthetic network and its planted partition from a spec."""
    spec.validate()
    rng = random.Random(spec.rng_seed)
    builder = NetworkBuilder()
    group_range: dict[tuple[str, str], tuple[int, int]] = {}
    type_ids: dict[str, int] = {}
    community_id = 0
    planted: list[list[int]] = []
    for type_name, group_list in spec.node_types:
        x = builder.add_node_type(type_name)
        type_ids[type_name] = x
        labels: list[int] = []
        start = 0
        for community, size in group_list:
            group_range[(type_name, community)] = (start, size)
            for i in range(size):
                builder.add_node(x, f"{community}_{i}")
            labels.extend([community_id] * size)
            start += size
            community_id += 1
        planted.append(labels)
    edge_ids: dict[str, int] = {}
    signatures: dict[str, tuple[str, ...]] = {}
    for edge_name, signature in spec.edge_types:
        edge_ids[edge_name] = builder.add_edge_type(
            edge_name, tuple(type_ids[t] for t in signature)
        )
        signatures[edge_name] = signature
    per_type_planted = [0] * len(spec.edge_types)
    edge_order = [name for name, _ in spec.edge_types]
    for edge_name, communities, count in spec.blocks:
        signature = signatures[edge_name]
        unipartite = len(signature) == 1
        position_types = (
            (signature[0], signature[0]) if unipartite else signature
        )
        ranges = [
            group_range[(t, c)] for c, t in zip(communities, position_types)
        ]
        if unipartite and communities[0] == communities[1]:
            start, size = ranges[0]
            capacity = size * (size - 1) // 2
            for t in rng.sample(range(capacity), count):
                i, j = _unrank_pair(t, size)
                builder.add_edge(edge_ids[edge_name], (start + i, start + j))
        else:
            sizes = [size for _, size in ranges]
            capacity = 1
            for s in sizes:
                capacity *= s
            for t in rng.sample(range(capacity), count):
                endpoints = []
                rest = t
                for start, size in reversed(ranges):
                    rest, local = divmod(rest, size)
                    endpoints.append(start + local)
                builder.add_edge(edge_ids[edge_name], tuple(reversed(endpoints)))
        per_type_planted[edge_order.index(edge_name)] += count
    total_planted = spec.total_planted()
    n_noise = int(spec.noise_rate * total_planted)
    if n_noise > 0:
        type_sizes = {
            name: sum(size for _, size in groups)
            for name, groups in spec.node_types
        }
        choices = rng.choices(
            range(len(spec.edge_types)), weights=per_type_planted, k=n_noise
        )
        for y in choices:
            edge_name, signature = spec.edge_types[y]
            if len(signature) == 1:
                n_x = type_sizes[signature[0]]
                if n_x < 2:
                    raise ValueError(
                        f"cannot draw a noise pair inside node type {signature[0]!r}"
                    )
                i = rng.randrange(n_x)
                j = rng.randrange(n_x - 1)
                if j >= i:
                    j += 1
                builder.add_edge(edge_ids[edge_name], (i, j))
            else:
                builder.add_edge(
                    edge_ids[edge_name],
                    tuple(rng.randrange(type_sizes[t]) for t in signature),
                )
    return builder.build(), Partition(planted)


def scale_spec(spec: PatternSpec, planted_target: int) -> PatternSpec:
    """Grow a spec towards a planted-edge target, preserving block densities.

    Group sizes scale with sqrt(f) and block counts with f (f the edge-count
    ratio), which keeps every block's edge density roughly constant.
    """
    if planted_target <= 0:
        raise ValueError("planted_target must be positive")
    f = planted_target / spec.total_planted()
    root = math.sqrt(f)
    node_types = tuple(
        (
            name,
            tuple(
                (community, max(2, round(size * root)))
                for community, size in groups
            ),
        )
        for name, groups in spec.node_types
    )
    sizes = {
        (type_name, community): size
        for type_name, groups in node_types
        for community, size in groups
    }
    signatures = {name: sig for name, sig in spec.edge_types}
    blocks = []
    for edge_name, communities, count in spec.blocks:
        signature = signatures[edge_name]
        unipartite = len(signature) == 1
        position_types = (
            (signature[0], signature[0]) if unipartite else signature
        )
        block_sizes = [
            sizes[(t, c)] for c, t in zip(communities, position_types)
        ]
        capacity = _block_capacity(unipartite, communities, block_sizes)
        blocks.append(
            (edge_name, communities, min(capacity, max(1, round(count * f))))
        )
    return replace(spec, node_types=node_types, blocks=tuple(blocks))


def _blocks_equal(a: np.ndarray, b: np.ndarray) -> bool:
    forward: dict[int, int] = {}
    backward: dict[int, int] = {}
    for la, lb in zip(a.tolist(), b.tolist()):
        if forward.setdefault(la, lb) != lb:
            return False
        if backward.setdefault(lb, la) != la:
            return False
    return True


def nmi(labels_a, labels_b) -> float:
    """Normalized mutual information between two labelings of one node set.

    1 for identical partitions (up to relabeling); 0 when the normalizing
    entropy term degenerates (for example a single community against anything
    different).  Natural logarithms; the base cancels.
    """
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.shape != b.shape:
        raise ValueError(
            f"partitions cover different node sets ({a.size} vs {b.size} nodes)"
        )
    n = a.size
    if n == 0 or _blocks_equal(a, b):
        return 1.0
    joint: dict[tuple[int, int], int] = {}
    rows: dict[int, int] = {}
    cols: dict[int, int] = {}
    for la, lb in zip(a.tolist(), b.tolist()):
        joint[(la, lb)] = joint.get((la, lb), 0) + 1
        rows[la] = rows.get(la, 0) + 1
        cols[lb] = cols.get(lb, 0) + 1
    numerator = sum(
        nij * math.log(nij * n / (rows[la] * cols[lb]))
        for (la, lb), nij in joint.items()
    )
    denominator = sum(c * math.log(c / n) for c in rows.values()) + sum(
        c * math.log(c / n) for c in cols.values()
    )
    if denominator == 0.0:
        return 0.0
    return min(1.0, max(0.0, -2.0 * numerator / denominator))


def nmi_per_type(
    partition: Partition, reference: Partition, network: HeteroNetwork
) -> dict[str, float]:
    return {
        table.name: nmi(
            partition.labels[table.type_id], reference.labels[table.type_id]
        )
        for table in network.node_tables
    }


@dataclass
class BenchmarkRow:
    method: str
    noise: float
    seed: int
    node_type: str
    nmi: float
    q: float | None
    wall_ms: float
    edges: float | None = None

    def sort_key(self):
        return (
            self.method,
            -1.0 if self.edges is None else self.edges,
            self.noise,
            self.seed,
            self.node_type,
        )


def write_rows_csv(rows: Sequence[BenchmarkRow], sink: IO[str], scaling: bool = False) -> None:
    sink.write((SCALING_CSV_HEADER if scaling else NOISE_CSV_HEADER) + "\n")
    for row in rows:
        q = "" if row.q is None else f"{row.q:.6f}"
        fields = [
            row.method,
            f"{row.noise:g}",
            str(row.seed),
            row.node_type,
            f"{row.nmi:.6f}",
            q,
            f"{row.wall_ms:.3f}",
        ]
        if scaling:
            fields.insert(1, f"{0 if row.edges is None else row.edges:g}")
        sink.write(",".join(fields) + "\n")


def _detect_rows(
    network: HeteroNetwork,
    planted: Partition,
    method: str,
    seed: int,
    noise: float,
    edges: float | None = None,
) -> list[BenchmarkRow]:
    config = OptimizerConfig(rng_seed=seed)
    t0 = time.perf_counter()
    q: float | None = None
    if method == "louvain":
        res = louvain(network, config)
        scores = nmi_per_type(res.partition, planted, network)
        q = res.report.score
    elif method == "louvain-c":
        resc = louvain_c(network, config)
        scores = nmi_per_type(resc.partition, planted, network)
        q = resc.report.score
    elif method == "naive-simp":
        per_sub = naive_simp(network, config)
        scores = {}
        for table in network.node_tables:
            x = table.type_id
            candidates = [
                y
                for y, sub in enumerate(network.subnetworks)
                if x in sub.signature and sub.total_weight > 0
            ]
            best = 0.0
            for y in candidates:
                labels = extend_with_singletons(per_sub[y], network, x)
                best = max(best, nmi(labels, planted.labels[x]))
            scores[table.name] = best
    elif method in ("trans-cn", "trans-jd"):
        project = project_common_neighbors if method == "trans-cn" else project_jaccard
        scores = {}
        for table in network.node_tables:
            projection = project(network, table.type_id)
            part = baseline_detect(projection, config)
            scores[table.name] = nmi(part.labels[0], planted.labels[table.type_id])
    else:
        raise ValueError(f"unknown method {method!r}")
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return [
        BenchmarkRow(
            method=method,
            noise=noise,
            seed=seed,
            node_type=name,
            nmi=value,
            q=q,
            wall_ms=wall_ms,
            edges=edges,
        )
        for name, value in scores.items()
    ]


def _noise_cell(args) -> list[BenchmarkRow]:
    base_spec, noise, seed, methods = args
    spec = replace(base_spec, noise_rate=noise, rng_seed=seed)
    network, planted = generate_planted(spec)
    rows: list[BenchmarkRow] = []
    for method in methods:
        rows.extend(_detect_rows(network, planted, method, seed, noise))
    return rows


def run_noise_sweep(
    methods: Sequence[str],
    noise_grid: Sequence[float],
    seeds: Sequence[int],
    base_spec: PatternSpec | None = None,
    jobs: int = 1,
) -> list[BenchmarkRow]:
    """Detect and score every (method, noise, seed) cell; rows sorted."""
    for method in methods:
        if method not in SWEEP_METHODS:
            raise ValueError(f"unknown method {method!r}")
    base_spec = base_spec or default_pattern_spec()
    cells = [
        (base_spec, noise, seed, tuple(methods))
        for noise in noise_grid
        for seed in seeds
    ]
    rows = _run_cells(_noise_cell, cells, jobs)
    rows.sort(key=BenchmarkRow.sort_key)
    return rows


def _scaling_cell(args) -> list[BenchmarkRow]:
    base_spec, target_edges, noise, seed = args
    planted_target = max(1, round(target_edges / (1.0 + noise)))
    spec = replace(
        scale_spec(base_spec, planted_target), noise_rate=noise, rng_seed=seed
    )
    network, planted = generate_planted(spec)
    rows: list[BenchmarkRow] = []
    for method in ("louvain", "louvain-c"):
        rows.extend(
            _detect_rows(network, planted, method, seed, noise, edges=network.m)
        )
    return rows


def run_scaling_sweep(
    sizes: Sequence[int],
    seeds: Sequence[int],
    noise: float = 0.5,
    base_spec: PatternSpec | None = None,
    jobs: int = 1,
) -> list[BenchmarkRow]:
    """Louvain vs Louvain-C wall time and score across network sizes.

    ``sizes`` are target total edge counts (planted plus noise).
    """
    base_spec = base_spec or default_pattern_spec()
    cells = [(base_spec, size, noise, seed) for size in sizes for seed in seeds]
    rows = _run_cells(_scaling_cell, cells, jobs)
    rows.sort(key=BenchmarkRow.sort_key)
    return rows


def _run_cells(worker, cells, jobs: int) -> list[BenchmarkRow]:
    rows: list[BenchmarkRow] = []
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for cell_rows in pool.map(worker, cells):
                rows.extend(cell_rows)
    else:
        for cell in cells:
            rows.extend(worker(cell))
    return rows
