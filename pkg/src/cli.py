"""
Command-line front end.

    detect   run community detection, write assignment / trace, print summary
    compare  pair-counting agreement of two assignment files
    stats    degree statistics of a graph

stdout carries only the CSV result line; diagnostics go through loguru.

Exit codes: 0 ok, 2 I/O failure, 3 parse, usage or configuration error,
4 edgeless graph, 5 assignments over different vertex sets.
"""
import argparse
import contextlib
import sys

from loguru import logger

from src.config import load_run_config, settings
from src.evaluation import align_assignments, compare_partitions
from src.exceptions import ConfigError, EmptyGraphError, GraphFormatError, PartitionMismatchError
from src.graph.csr import degree_stats
from src.graph.loaders import GraphFormat, load_graph
from src.logging_config import configure_logging
from src.orchestrator import run
from src.reporting import (
    TraceWriter,
    color_histogram_path,
    read_assignment_map,
    write_assignment,
    write_color_histogram,
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_EMPTY = 4
EXIT_MISMATCH = 5

COLOR_POLICIES = {"multi": "multi_phase", "first": "first_phase"}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_PARSE; 2 is EXIT_IO."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="louvain", description="Parallel Louvain community detection")
    parser.add_argument("--log-level", default=None, help="Override GRAPH_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="Detect communities")
    detect.add_argument("--input", required=True, help="Graph file")
    detect.add_argument("--format", choices=[f.value for f in GraphFormat], default=GraphFormat.EDGE_LIST.value)
    detect.add_argument("--output", help="Write the final assignment here")
    detect.add_argument("--trace", help="Write the per-iteration trace CSV here (color histogram goes to <stem>_colors.csv)")
    detect.add_argument("--config", help="RunConfig YAML (default: GRAPH_RUN_CONFIG_FILE)")
    detect.add_argument("--threads", type=int, help="Worker count (falls back to GRAPH_THREADS)")
    detect.add_argument("--no-vf", dest="use_vf", action="store_false", default=None,
                        help="Skip vertex-following preprocessing")
    detect.add_argument("--no-coloring", dest="use_coloring", action="store_false", default=None,
                        help="Never run phases colored")
    detect.add_argument("--theta", type=float, help="Net gain threshold for uncolored phases")
    detect.add_argument("--theta-color", type=float, help="Net gain threshold for colored phases")
    detect.add_argument("--color-cutoff", type=int, help="Stop coloring below this many vertices")
    detect.add_argument("--color-policy", choices=sorted(COLOR_POLICIES), help="Color every eligible phase or only the first")
    detect.add_argument("--max-iters", type=int, help="Iteration cap per phase")
    detect.add_argument("--serial", action="store_true", help="Sequential reference sweep")

    compare = sub.add_parser("compare", help="Compare two assignment files")
    compare.add_argument("--reference", required=True, help="Benchmark assignment (e.g. a --serial run)")
    compare.add_argument("--candidate", required=True, help="Assignment to score against the reference")

    stats = sub.add_parser("stats", help="Print n,M,max_degree,avg_degree,rsd")
    stats.add_argument("--input", required=True, help="Graph file")
    stats.add_argument("--format", choices=[f.value for f in GraphFormat], default=GraphFormat.EDGE_LIST.value)
    return parser


def _detect(args: argparse.Namespace) -> int:
    cfg = load_run_config(
        args.config,
        theta_final=args.theta,
        theta_color=args.theta_color,
        color_cutoff=args.color_cutoff,
        use_vf=args.use_vf,
        use_coloring=args.use_coloring,
        color_policy=COLOR_POLICIES.get(args.color_policy),
        sweep="serial" if args.serial else None,
        max_iterations_per_phase=args.max_iters,
        worker_count=args.threads,
    )
    logger.info(f"Run config: {cfg.model_dump()}")
    g = load_graph(args.input, args.format)

    with TraceWriter(args.trace) if args.trace else contextlib.nullcontext() as trace:
        result = run(g, cfg, trace)
    if args.trace and result.color_histograms:
        write_color_histogram(result.color_histograms, color_histogram_path(args.trace))

    if args.output:
        write_assignment(result.assignment, args.output)
    print(result.summary_line())
    return EXIT_OK


def _compare(args: argparse.Namespace) -> int:
    reference, candidate = align_assignments(read_assignment_map(args.reference),
                                             read_assignment_map(args.candidate))
    print(compare_partitions(reference, candidate).as_csv())
    return EXIT_OK


def _stats(args: argparse.Namespace) -> int:
    g = load_graph(args.input, args.format)
    st = degree_stats(g)
    print(f"{g.num_vertices},{g.num_edges},{st.max_degree},{st.avg_degree:.3f},{st.rsd:.3f}")
    return EXIT_OK


COMMANDS = {"detect": _detect, "compare": _compare, "stats": _stats}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    if args.log_level:
        configure_logging(level=args.log_level, log_dir=settings.log_dir)

    try:
        return COMMANDS[args.command](args)
    except (GraphFormatError, ConfigError) as e:
        logger.error(str(e))
        return EXIT_PARSE
    except EmptyGraphError as e:
        logger.error(str(e))
        return EXIT_EMPTY
    except PartitionMismatchError as e:
        logger.error(str(e))
        return EXIT_MISMATCH
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
