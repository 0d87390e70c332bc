"""``crossmap`` command line: gen, map, bench."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .exceptions import (
    GraphFormatError,
    GraphValidationError,
    InfeasibleError,
    InstanceTooLargeError,
)
from .graph import TopologySpec, generate_feedforward, load_graph, save_graph
from .harness import ALGORITHMS, bench_suite, run_algorithm, write_summary
from .hill_climb import ClimbTrace
from .partition import HardwareConfig, save_mapping, write_cost_csv
from .pso import PsoConfig

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_TOO_LARGE = 4

logger = logging.getLogger("crossmap")


def _layers(text: str):
    try:
        sizes = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crossmap", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a fully connected feedforward workload")
    gen.add_argument("--layers", type=_layers, required=True, help="e.g. 400,400,100")
    gen.add_argument("--spikes-lo", type=int, default=1)
    gen.add_argument("--spikes-hi", type=int, default=50)
    gen.add_argument("--total-spikes", type=int, default=None,
                     help="scatter exactly this many spikes over the synapses")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", required=True)

    mp = sub.add_parser("map", help="partition a workload onto crossbars")
    mp.add_argument("--graph", required=True)
    mp.add_argument("--k", type=int, default=256, help="crossbar size")
    mp.add_argument("--s", type=int, default=None, help="crossbar count (default: ceil(n/k)+2)")
    mp.add_argument("--algo", choices=ALGORITHMS, default="hco")
    mp.add_argument("--max-iters", type=int, default=None, help="hill-climb move cap")
    mp.add_argument("--swarm", type=int, default=50)
    mp.add_argument("--iters", type=int, default=2000)
    mp.add_argument("--penalty", type=float, default=None)
    mp.add_argument("--seed", type=int, default=0)
    mp.add_argument("-o", "--output", required=True, help="mapping file (snnmap v1)")
    mp.add_argument("--metrics", default=None, help="cost report CSV")
    mp.add_argument("--trace", default=None, help="hill-climb or PSO trace CSV")

    bench = sub.add_parser("bench", help="run a benchmark suite")
    bench.add_argument("--suite", required=True, help="TOML suite description")
    bench.add_argument("-o", "--output", required=True, help="experiment CSV")
    bench.add_argument("--summary", default=None, help="per-workload summary CSV")
    return parser


def _write_trace(trace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if isinstance(trace, ClimbTrace):
            w.writerow(("iter", "max_load", "inter_cluster_spikes"))
            w.writerow((0, *trace.initial))
            for i, (m, t) in enumerate(trace.cost_sequence, 1):
                w.writerow((i, m, t))
        elif isinstance(trace, np.ndarray):
            w.writerow(("iter", "best_fitness"))
            for i, f in enumerate(trace.tolist(), 1):
                w.writerow((i, format(f, ".10g")))


def _cmd_gen(args) -> int:
    spec = TopologySpec(
        args.layers,
        spikes_lo=args.spikes_lo,
        spikes_hi=args.spikes_hi,
        seed=args.seed,
        total_spikes=args.total_spikes,
    )
    graph = generate_feedforward(spec)
    save_graph(graph, args.output)
    logger.info("wrote %r to %s", graph, args.output)
    return EXIT_OK


def _cmd_map(args) -> int:
    graph = load_graph(args.graph)
    if args.s is None:
        hw = HardwareConfig.with_headroom(graph.n_neurons, args.k)
    else:
        hw = HardwareConfig(args.k, args.s)
    pso = PsoConfig(swarm_size=args.swarm, iterations=args.iters, capacity_penalty=args.penalty)
    result = run_algorithm(graph, hw, args.algo, seed=args.seed, max_iters=args.max_iters, pso=pso)
    save_mapping(result.partition, args.output)
    if args.metrics:
        write_cost_csv(result.report, args.metrics)
    if args.trace and result.trace is not None:
        _write_trace(result.trace, args.trace)
    r = result.report
    print(
        f"{args.algo}: k={hw.crossbar_size} s={hw.crossbar_count} max_load={r.max_load} "
        f"inter_cluster_spikes={r.inter_cluster_spikes} "
        f"normalized={float(r.normalized_inter_cluster):.4f} wall_ms={result.wall_ms:.2f}"
    )
    return EXIT_OK


def _cmd_bench(args) -> int:
    records, summary = bench_suite(args.suite, args.output)
    if args.summary:
        write_summary(summary, args.summary)
    for row in summary:
        parts = [f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()]
        print(" ".join(parts))
    failed = [r for r in records if r.error]
    for r in failed:
        print(f"FAILED {r.workload}/{r.algo} seed={r.seed}: {r.error}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = {"gen": _cmd_gen, "map": _cmd_map, "bench": _cmd_bench}[args.command]
    try:
        return handler(args)
    except (GraphFormatError, GraphValidationError) as exc:
        print(f"crossmap: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasibleError as exc:
        print(f"crossmap: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InstanceTooLargeError as exc:
        print(f"crossmap: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (ValueError, OSError) as exc:
        print(f"crossmap: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
