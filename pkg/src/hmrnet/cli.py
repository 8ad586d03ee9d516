"""Command-line front end.

Subcommands: generate, detect, eval, bench, project.  Reports to stdout are
machine-parseable key=value lines; files carry the authoritative data.  Exit
codes: 0 success, 1 I/O failure, 2 malformed input, 3 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .baselines import naive_simp_combined, project_common_neighbors, project_jaccard
from .benchmark import (
    SWEEP_METHODS,
    default_pattern_spec,
    generate_planted,
    nmi_per_type,
    parse_pattern_spec,
    run_noise_sweep,
    run_scaling_sweep,
    write_rows_csv,
)
from .estimators import CompositeLouvain, ConstrainedCompositeLouvain, ProjectionLouvain
from .formats import HMRNFormatError, parse_hmrn, parse_partition, serialize_hmrn, write_partition
from .modularity import composite_modularity
from .optimize import format_timings

DETECT_METHODS = ("louvain", "louvain-c", "naive-simp", "trans-cn", "trans-jd")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hmrnet",
        description="Community detection in heterogeneous multi-relational networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic planted-partition network")
    p.add_argument("--spec", help="pattern spec file (defaults to the built-in spec)")
    p.add_argument("--noise", type=float, default=0.0, help="noise rate (>= 0)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--network", required=True, help="output HMRN path")
    p.add_argument("--planted", help="also write the planted partition TSV here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", help="detect communities in an HMRN network")
    p.add_argument("-i", "--network", required=True, help="input HMRN path")
    p.add_argument("--method", choices=DETECT_METHODS, default="louvain-c")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--weights",
        help="comma-separated positive weights, one per edge type (1/w weighting)",
    )
    p.add_argument("-o", "--partition", required=True, help="output partition TSV")
    p.add_argument("--report", help="modularity report path (default: <partition>.report.json)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="score a partition against a reference")
    p.add_argument("--network", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--reference", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a benchmark sweep, write CSV")
    p.add_argument("--mode", choices=("noise", "scaling"), required=True)
    p.add_argument("--seeds", type=int, default=10, help="number of seeds (0..n-1)")
    p.add_argument(
        "--methods",
        default="louvain-c,trans-cn,trans-jd,naive-simp",
        help="comma-separated methods (noise mode)",
    )
    p.add_argument(
        "--noise-grid",
        default="0,0.5,1,1.5,2",
        help="comma-separated noise rates (noise mode)",
    )
    p.add_argument(
        "--sizes",
        default="750,3000,12000",
        help="comma-separated target edge counts (scaling mode)",
    )
    p.add_argument("--noise", type=float, default=0.5, help="noise rate (scaling mode)")
    p.add_argument("--spec", help="pattern spec file (defaults to the built-in spec)")
    p.add_argument("--jobs", type=int, default=0, help="worker processes (0 = all cores)")
    p.add_argument("-o", "--output", required=True, help="output CSV path")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("project", help="write a similarity projection as HMRN")
    p.add_argument("-i", "--network", required=True)
    p.add_argument("--node-type", required=True, help="node type name to project")
    p.add_argument("--metric", choices=("cn", "jd"), default="cn")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_project)
    return parser


def _load_network(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_hmrn(fh)


def _load_spec(path: str | None):
    if path is None:
        return default_pattern_spec()
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pattern_spec(fh)


def cmd_generate(args) -> int:
    if args.noise < 0:
        raise ValueError(f"noise rate must be nonnegative, got {args.noise}")
    spec = _load_spec(args.spec)
    spec = replace(spec, noise_rate=args.noise, rng_seed=args.seed)
    network, planted = generate_planted(spec)
    with open(args.network, "w", encoding="utf-8") as fh:
        fh.write(serialize_hmrn(network))
    if args.planted:
        with open(args.planted, "w", encoding="utf-8") as fh:
            write_partition(planted, network, fh)
    print(f"nodes={network.n}")
    print(f"edges={network.m:g}")
    return 0


def cmd_detect(args) -> int:
    network = _load_network(args.network)
    weights = None
    if args.weights:
        try:
            weights = [float(w) for w in args.weights.split(",")]
        except ValueError:
            raise _UsageError(f"invalid --weights {args.weights!r}") from None
        if len(weights) != network.s or any(w <= 0 for w in weights):
            raise _UsageError(
                f"--weights needs {network.s} positive values (one per edge type), "
                f"got {args.weights!r}"
            )
    method = args.method
    timings = None
    if method == "louvain":
        est = CompositeLouvain(seed=args.seed, weights=weights).fit(network)
        partition, report = est.partition_, est.report_
    elif method == "louvain-c":
        est = ConstrainedCompositeLouvain(seed=args.seed, weights=weights).fit(network)
        partition, report = est.partition_, est.report_
        timings = est.timings_
    elif method in ("trans-cn", "trans-jd"):
        metric = "common-neighbors" if method == "trans-cn" else "jaccard"
        est = ProjectionLouvain(metric=metric, seed=args.seed).fit(network)
        partition, report = est.partition_, est.report_
    else:  # naive-simp
        from .optimize import OptimizerConfig

        partition = naive_simp_combined(network, OptimizerConfig(rng_seed=args.seed))
        report = composite_modularity(network, partition)
    with open(args.partition, "w", encoding="utf-8") as fh:
        write_partition(partition, network, fh)
    report_path = args.report or args.partition + ".report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    print(f"method={method}")
    print(f"q={report.score:.6f}")
    for table in network.node_tables:
        print(f"communities[{table.name}]={partition.community_count(table.type_id)}")
    if timings is not None:
        print(format_timings(timings))
    return 0


def cmd_eval(args) -> int:
    network = _load_network(args.network)
    with open(args.partition, "r", encoding="utf-8") as fh:
        partition = parse_partition(fh, network)
    with open(args.reference, "r", encoding="utf-8") as fh:
        reference = parse_partition(fh, network)
    scores = nmi_per_type(partition, reference, network)
    report = composite_modularity(network, partition)
    for name, value in scores.items():
        print(f"nmi[{name}]={value:.6f}")
    print(f"q={report.score:.6f}")
    return 0


def cmd_bench(args) -> int:
    jobs = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)
    seeds = range(args.seeds)
    base_spec = _load_spec(args.spec)
    if args.mode == "noise":
        methods = [m for m in args.methods.split(",") if m]
        for m in methods:
            if m not in SWEEP_METHODS:
                raise _UsageError(f"unknown method {m!r}")
        grid = [float(v) for v in args.noise_grid.split(",")]
        rows = run_noise_sweep(methods, grid, seeds, base_spec=base_spec, jobs=jobs)
        scaling = False
    else:
        sizes = [int(v) for v in args.sizes.split(",")]
        rows = run_scaling_sweep(
            sizes, seeds, noise=args.noise, base_spec=base_spec, jobs=jobs
        )
        scaling = True
    with open(args.output, "w", encoding="utf-8") as fh:
        write_rows_csv(rows, fh, scaling=scaling)
    print(f"rows={len(rows)}")
    return 0


def cmd_project(args) -> int:
    network = _load_network(args.network)
    try:
        type_id = network.node_type_id(args.node_type)
    except KeyError:
        raise ValueError(f"unknown node type {args.node_type!r}") from None
    project = project_common_neighbors if args.metric == "cn" else project_jaccard
    projection = project(network, type_id)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(serialize_hmrn(projection.network))
    print(f"pairs={len(projection.network.subnetworks[0].edges)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"hmrnet: error: {exc}", file=sys.stderr)
        return 3
    except HMRNFormatError as exc:
        print(f"hmrnet: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"hmrnet: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hmrnet: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
