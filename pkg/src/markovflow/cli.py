"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 input parse/validation, 3 computation cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .benchmark import DETECTORS, format_sweep_csv, run_benchmark_sweep
from .entropy import compression_gap, exact_entropy_rate, format_gap_csv, sampled_entropy_rate
from .estimators import flow_model_for
from .flow import DENSE_NODE_CAP, DenseCapError, dense_continuous
from .io import FORMATS, ParseError, format_edge_list, load_network, sniff_format
from .network import NetworkError, project_bipartite_full, transition_view
from .projection import FastProjectionParams, fast_projection
from .search import SearchConfig, optimize
from .tree import format_tree, read_tree, tree_nmi

EXIT_USAGE, EXIT_INPUT, EXIT_CAP = 1, 2, 3
DEFAULT_SEED = 123


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    return vals


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load(args):
    fmt = args.format if args.format != "auto" else sniff_format(args.input)
    return load_network(args.input, fmt, directed=getattr(args, "directed", False))


def _emit(text: str, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _manifest(args, output, inputs):
    if output in (None, "-"):
        return
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    stamp = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    manifest = {
        "subcommand": args.command,
        "inputs": [str(p) for p in inputs],
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "timestamp": stamp.isoformat(),
        "version": __version__,
    }
    Path(str(output) + ".manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def cmd_partition(args) -> int:
    net = _load(args)
    if args.bipartite and not net.is_bipartite:
        raise NetworkError("--bipartite needs bipartite input (a '*Bipartite' edge list)")
    fm = flow_model_for(net, args.markov_time, args.bipartite, args.teleport)
    cfg = SearchConfig(trials=args.trials, seed=args.seed,
                       mode="multilevel" if args.multilevel else "two-level")
    res = optimize(fm, cfg)
    structure = res.hierarchy if res.hierarchy is not None else res.partition
    summary = {
        "codelength": f"{res.codelength:.10f}",
        "modules": res.module_count,
        "levels": res.levels,
        "markov-time": f"{args.markov_time:g}",
        "seed": args.seed,
    }
    _emit(format_tree(net, structure, fm.visit_rate, summary), args.output)
    _manifest(args, args.output, [args.input])
    print(f"codelength {res.codelength:.6f} bits, {res.module_count} modules, "
          f"{res.levels} levels (seed {args.seed})", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    if not args.t_grid:
        raise UsageError("--t-grid must list at least one Markov time")
    net = _load(args)
    tv = transition_view(net)
    if args.entropy == "exact" and net.node_count > args.dense_cap:
        raise DenseCapError(f"exact entropy needs a dense matrix; {net.node_count} nodes exceed "
                            f"the cap of {args.dense_cap}. Use --entropy sampled")
    rows = []
    for i, t in enumerate(args.t_grid):
        fm = flow_model_for(net, t, teleport=args.teleport)
        res = optimize(fm, SearchConfig(trials=args.trials, seed=args.seed))
        h = gap = None
        extra = ()
        if args.entropy == "exact":
            h = exact_entropy_rate(dense_continuous(tv, t, cap=args.dense_cap), fm.visit_rate)
        elif args.entropy == "sampled":
            smp = sampled_entropy_rate(tv, fm.visit_rate, t, args.starts, args.walks,
                                       rng=args.seed + i, teleport=args.teleport or 0.0)
            h = smp.estimate
            extra = (smp.standard_error,)
        if h is not None:
            gap = compression_gap(res.codelength, h)
        rows.append((t, res.codelength, h, gap, res.module_count) + extra)
    _emit(format_gap_csv(rows), args.output)
    _manifest(args, args.output, [args.input])
    print(f"swept {len(rows)} Markov times (seed {args.seed})", file=sys.stderr)
    return 0


def cmd_project(args) -> int:
    net = _load(args)
    if not net.is_bipartite:
        raise NetworkError("projection needs bipartite input (a '*Bipartite' edge list)")
    if args.full:
        n_p = int(net.primaries().size)
        if n_p > args.dense_cap:
            raise DenseCapError(f"full projection limited to {args.dense_cap} primary nodes, "
                                f"input has {n_p}")
        proj = project_bipartite_full(net)
    else:
        proj = fast_projection(net, FastProjectionParams(args.x, args.y, args.seed))
    _emit(format_edge_list(proj), args.output)
    _manifest(args, args.output, [args.input])
    print(f"projected {proj.node_count} primaries, {proj.link_count} links (seed {args.seed})",
          file=sys.stderr)
    return 0


def cmd_benchmark(args) -> int:
    bad = [d for d in args.detectors if d not in DETECTORS]
    if bad:
        raise UsageError(f"unknown detectors {bad}; choose from {', '.join(DETECTORS)}")
    if not args.k_in or not args.features:
        raise UsageError("--k-in and --features must be nonempty")
    rows = run_benchmark_sweep(args.k_in, args.features, args.detectors, args.trials,
                               args.seed, args.communities, args.primaries, args.k,
                               args.search_trials,
                               FastProjectionParams(args.x, args.y, args.seed),
                               timing=args.timing)
    _emit(format_sweep_csv(rows), args.output)
    _manifest(args, args.output, [])
    print(f"benchmark: {len(rows)} rows (seed {args.seed})", file=sys.stderr)
    return 0


def cmd_nmi(args) -> int:
    a, b = read_tree(args.tree_a), read_tree(args.tree_b)
    try:
        value = tree_nmi(a, b, leaf=args.leaf)
    except ValueError as exc:
        raise NetworkError(str(exc)) from exc
    print(f"{value:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="markovflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_input(sp_):
        sp_.add_argument("input")
        sp_.add_argument("--format", choices=("auto",) + FORMATS, default="auto")
        sp_.add_argument("--directed", action="store_true",
                         help="read a plain edge list as directed")
        sp_.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    sp_ = sub.add_parser("partition", help="find modules at a Markov time")
    add_input(sp_)
    sp_.add_argument("--markov-time", type=float, default=1.0)
    sp_.add_argument("--bipartite", action="store_true")
    lvl = sp_.add_mutually_exclusive_group()
    lvl.add_argument("--two-level", dest="multilevel", action="store_false")
    lvl.add_argument("--multilevel", dest="multilevel", action="store_true")
    sp_.add_argument("--trials", type=int, default=10)
    sp_.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp_.add_argument("--teleport", type=float, default=None)
    sp_.set_defaults(func=cmd_partition, multilevel=False)

    sp_ = sub.add_parser("sweep", help="code length and entropy rate over Markov times")
    add_input(sp_)
    sp_.add_argument("--t-grid", type=_floats, required=True)
    sp_.add_argument("--entropy", choices=("exact", "sampled", "none"), default="none")
    sp_.add_argument("--trials", type=int, default=10)
    sp_.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp_.add_argument("--teleport", type=float, default=None)
    sp_.add_argument("--starts", type=int, default=200)
    sp_.add_argument("--walks", type=int, default=5000)
    sp_.add_argument("--dense-cap", type=int, default=DENSE_NODE_CAP)
    sp_.set_defaults(func=cmd_sweep)

    sp_ = sub.add_parser("project", help="project a bipartite network onto primaries")
    add_input(sp_)
    sp_.add_argument("--x", type=int, default=1000, help="primaries kept per feature")
    sp_.add_argument("--y", type=int, default=10, help="links kept per primary")
    sp_.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp_.add_argument("--full", action="store_true", help="exact projection")
    sp_.add_argument("--dense-cap", type=int, default=DENSE_NODE_CAP)
    sp_.set_defaults(func=cmd_project)

    sp_ = sub.add_parser("benchmark", help="NMI sweep on the bipartite benchmark")
    sp_.add_argument("--k-in", type=_ints, default=[15])
    sp_.add_argument("--features", type=_ints, default=[1024])
    sp_.add_argument("--detectors", type=lambda s: [x for x in s.split(",") if x],
                     default=list(DETECTORS))
    sp_.add_argument("--trials", type=int, default=10)
    sp_.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp_.add_argument("--communities", type=int, default=32)
    sp_.add_argument("--primaries", type=int, default=32, help="primaries per community")
    sp_.add_argument("--k", type=int, default=16)
    sp_.add_argument("--search-trials", type=int, default=1)
    sp_.add_argument("--x", type=int, default=1000)
    sp_.add_argument("--y", type=int, default=10)
    sp_.add_argument("--timing", action="store_true", help="fill the seconds column")
    sp_.add_argument("-o", "--output", default=None)
    sp_.set_defaults(func=cmd_benchmark)

    sp_ = sub.add_parser("nmi", help="compare two tree files")
    sp_.add_argument("tree_a")
    sp_.add_argument("tree_b")
    sp_.add_argument("--leaf", action="store_true", help="compare leaf modules")
    sp_.set_defaults(func=cmd_nmi)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"markovflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, NetworkError, FileNotFoundError) as exc:
        print(f"markovflow: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DenseCapError as exc:
        print(f"markovflow: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"markovflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
