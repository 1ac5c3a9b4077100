"""``utilgraph`` command line.

Exit codes: 0 success, 2 usage error, 3 malformed input file, 4 rejected or
infeasible request, 5 size cap exceeded, 6 file could not be read or written.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

from utilgraph import bench
from utilgraph.errors import CapExceeded, FormatError, RejectedInput
from utilgraph.hypergraph import format_bits, load_uhg, write_uhg
from utilgraph.optimizer import BRUTE_FORCE_CAP, CUT_CAP, FREE_CAP, SearchReport, brute_force, decomposed_search
from utilgraph.separator import DEFAULT_EPSILON, load_decomposition, partition_balanced, validate, write_decomposition
from utilgraph.topology import KINDS, TopologySpec, agent_pair, generate, parse_config

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_REJECTED = 4
EXIT_CAP = 5
EXIT_IO = 6


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [t.replace("-", "_") for t in text.replace(",", " ").split()]


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _add_topology(p: argparse.ArgumentParser, kind_default: str | None = None) -> None:
    g = p.add_argument_group("topology")
    g.add_argument("--topology", dest="kind", default=kind_default, help=f"one of {', '.join(KINDS)}")
    g.add_argument("--n", type=int, help="number of issues")
    g.add_argument("--m", type=int, default=0, help="edge count (random topology)")
    g.add_argument("--ring-degree", type=int, default=2)
    g.add_argument("--rewire-prob", type=float, default=0.1)
    g.add_argument("--attach-count", type=int, default=1)
    g.add_argument("--edge-prob", type=float, default=0.0)
    g.add_argument("--weight-max", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)


def _spec(args: argparse.Namespace) -> TopologySpec:
    if args.kind is None or args.n is None:
        raise UsageError("--topology and --n are required (on the command line or in --config)")
    return TopologySpec(
        kind=args.kind,
        n=args.n,
        m=args.m,
        ring_degree=args.ring_degree,
        rewire_prob=args.rewire_prob,
        attach_count=args.attach_count,
        edge_prob=args.edge_prob,
        weight_max=args.weight_max,
        seed=args.seed,
    )


def _add_caps(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cut-cap", type=int, default=CUT_CAP, help="largest cut set searched exhaustively")
    p.add_argument("--free-cap", type=int, default=FREE_CAP, help="largest partition searched exhaustively")


# --------------------------------------------------------------------------
# commands


def cmd_gen(args: argparse.Namespace) -> int:
    spec = _spec(args)
    if args.agents == 2:
        first, second = agent_pair(spec)
        if args.out in (None, "-"):
            raise UsageError("--agents 2 needs --out PREFIX (writes PREFIX.a.uhg and PREFIX.b.uhg)")
        Path(f"{args.out}.a.uhg").write_text(write_uhg(first))
        Path(f"{args.out}.b.uhg").write_text(write_uhg(second))
    else:
        _emit(write_uhg(generate(spec)), args.out)
    return EXIT_OK


def _structure(paths: list[str]):
    graphs = [load_uhg(p) for p in paths]
    skel = graphs[0].skeleton()
    for g in graphs[1:]:
        skel = skel.union(g.skeleton())
    return skel


def cmd_partition(args: argparse.Namespace) -> int:
    structure = _structure(args.graph)
    d = partition_balanced(structure, args.k, args.epsilon, args.seed, args.restarts)
    report = validate(structure, d)
    if not report.ok:
        raise RejectedInput(f"partitioner produced an invalid decomposition: {report.message}")
    _emit(write_decomposition(d), args.out)
    return EXIT_OK


def _search_csv(report: SearchReport, verbose: bool) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["n", "optimum", "optimum_value", "eval_calls", "eq3_cost", "log2_speedup"]
    row = [
        report.n,
        format_bits(report.optimum),
        report.optimum_value,
        format(math.log2(report.eval_calls), ".10g"),
        format(math.log2(report.eq3_cost), ".10g"),
        format(report.log2_speedup, ".10g"),
    ]
    if verbose:
        header += ["eval_calls_exact", "eq3_cost_exact"]
        row += [report.eval_calls, report.eq3_cost]
    w.writerow(header)
    w.writerow(row)
    return buf.getvalue()


def cmd_solve(args: argparse.Namespace) -> int:
    g = load_uhg(args.graph)
    if args.mode == "brute":
        report = brute_force(g, args.brute_cap)
    else:
        if args.decomposition is None:
            raise UsageError("--mode decomposed needs --decomposition FILE")
        d = load_decomposition(args.decomposition)
        report = decomposed_search(g, d, args.cut_cap, args.free_cap)
    sys.stdout.write(report.summary())
    if args.csv:
        _emit(_search_csv(report, args.verbose), args.csv)
    return EXIT_OK


def cmd_negotiate(args: argparse.Namespace) -> int:
    if args.agent_a or args.agent_b:
        if not (args.agent_a and args.agent_b):
            raise UsageError("give both --agent-a and --agent-b, or neither")
        graphs = (load_uhg(args.agent_a), load_uhg(args.agent_b))
        topology, seed = "file", args.seed
    else:
        spec = _spec(args)
        graphs = agent_pair(spec)
        topology, seed = spec.kind, spec.seed
    d = load_decomposition(args.decomposition) if args.decomposition else None
    transcript: list[str] | None = [] if args.transcript else None
    row = bench.negotiate_instance(
        topology,
        graphs,
        args.k,
        args.epsilon,
        seed,
        value=args.protocol in ("value", "both"),
        comparison=args.protocol in ("comparison", "both"),
        timing=args.timing,
        decomposition=d,
        transcript=transcript,
        cut_cap=args.cut_cap,
        free_cap=args.free_cap,
    )
    _emit(bench.to_csv([row]), args.out)
    if transcript is not None:
        Path(args.transcript).write_text("".join(line + "\n" for line in transcript))
    return EXIT_OK


def cmd_table1(args: argparse.Namespace) -> int:
    template = TopologySpec(
        "random",
        args.n,
        ring_degree=args.ring_degree,
        rewire_prob=args.rewire_prob,
        attach_count=args.attach_count,
        weight_max=args.weight_max,
    )
    rows, summary = bench.table1(
        args.topologies,
        args.n,
        args.m,
        args.repetitions,
        args.seed,
        args.k,
        args.epsilon,
        comparison=args.comparison,
        timing=args.timing,
        template=template,
    )
    _emit(bench.to_csv(summary), args.out)
    if args.rows:
        Path(args.rows).write_text(bench.to_csv(rows))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = _spec(args)
    rows = bench.sweep(spec, args.k_values, args.seeds, args.epsilon)
    _emit(bench.sweep_csv(rows, args.verbose), args.out)
    return EXIT_OK


def cmd_scale_study(args: argparse.Namespace) -> int:
    template = TopologySpec(
        args.kind or "scale_free",
        2,
        ring_degree=args.ring_degree,
        rewire_prob=args.rewire_prob,
        attach_count=args.attach_count,
        weight_max=args.weight_max,
    )
    rows = bench.scale_study(
        args.n_values,
        args.seeds,
        args.seed,
        args.target,
        args.solve_budget,
        args.restarts,
        args.timing,
        template,
    )
    _emit(bench.to_csv(rows), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="utilgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="key=value file supplying defaults for this command's flags")
        p.set_defaults(func=func)
        subs[name] = p
        return p

    p = add("gen", cmd_gen, "Generate a random utility graph (.uhg).")
    _add_topology(p)
    p.add_argument("--agents", type=int, choices=(1, 2), default=1, help="2 writes a same-structure agent pair")
    p.add_argument("--out", help="output path (default stdout)")

    p = add("partition", cmd_partition, "Partition the shared structure of one or more graphs.")
    p.add_argument("--graph", nargs="+", required=True, help=".uhg file(s); their structures are merged")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int)
    p.add_argument("--out", help="output path (default stdout)")

    p = add("solve", cmd_solve, "Find the maximum-utility contract of one graph.")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=("brute", "decomposed"), default="brute")
    p.add_argument("--decomposition", help="decomposition file (required for --mode decomposed)")
    p.add_argument("--brute-cap", type=int, default=BRUTE_FORCE_CAP)
    _add_caps(p)
    p.add_argument("--csv", help="also write the result as a CSV row to this path ('-' for stdout)")
    p.add_argument("--verbose", action="store_true", help="add exact (non-log2) counts to the CSV")

    p = add("negotiate", cmd_negotiate, "Run a mediated negotiation between two agents.")
    _add_topology(p)
    p.add_argument("--agent-a", help=".uhg file of agent A (instead of generating)")
    p.add_argument("--agent-b", help=".uhg file of agent B")
    p.add_argument("--decomposition", help="use this decomposition instead of partitioning")
    p.add_argument("--protocol", choices=("value", "comparison", "both"), default="value")
    p.add_argument("--k", type=int, default=bench.TABLE1_K)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    _add_caps(p)
    p.add_argument("--transcript", help="write the query log to this path")
    p.add_argument("--timing", action="store_true", help="fill wall_ms (output is then not reproducible)")
    p.add_argument("--out", help="CSV output path (default stdout)")

    p = add("table1", cmd_table1, "Value-protocol cost by topology over repeated seeds.")
    p.add_argument("--topologies", type=_str_list, default=list(bench.TABLE1_TOPOLOGIES))
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--k", type=int, default=bench.TABLE1_K)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--repetitions", type=int, default=bench.TABLE1_REPETITIONS)
    p.add_argument("--seed", type=int, default=0, help="seed of the first repetition")
    p.add_argument("--ring-degree", type=int, default=2)
    p.add_argument("--rewire-prob", type=float, default=0.1)
    p.add_argument("--attach-count", type=int, default=1)
    p.add_argument("--weight-max", type=int, default=10)
    p.add_argument("--comparison", action="store_true", help="also run the comparison protocol")
    p.add_argument("--timing", action="store_true")
    p.add_argument("--rows", help="write per-instance rows to this CSV path")
    p.add_argument("--out", help="summary CSV path (default stdout)")

    p = add("sweep", cmd_sweep, "Mean search cost as a function of the partition count.")
    _add_topology(p, kind_default="scale_free")
    p.set_defaults(n=200)
    p.add_argument("--k-values", type=_int_list, default=[2, 5, 10, 20, 40, 80])
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--epsilon", type=float, default=bench.SWEEP_EPSILON)
    p.add_argument("--verbose", action="store_true", help="add the exact mean cost column")
    p.add_argument("--out", help="CSV output path (default stdout)")

    p = add("scale-study", cmd_scale_study, "Cut-set fraction and speed-up as the graph grows.")
    p.add_argument("--topology", dest="kind", default="scale_free")
    p.add_argument("--n-values", type=_int_list, default=[20, 50, 75, 100, 200])
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=int, default=bench.SCALE_TARGET_SIZE, help="target partition size")
    p.add_argument("--solve-budget", type=int, default=bench.SCALE_SOLVE_BUDGET,
                   help="largest search cost actually run; larger rows are estimated")
    p.add_argument("--restarts", type=int)
    p.add_argument("--ring-degree", type=int, default=2)
    p.add_argument("--rewire-prob", type=float, default=0.1)
    p.add_argument("--attach-count", type=int, default=1)
    p.add_argument("--weight-max", type=int, default=10)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--out", help="CSV output path (default stdout)")
    return parser, subs


def _apply_config(sub: argparse.ArgumentParser, path: str) -> None:
    """Install ``key=value`` pairs from ``path`` as defaults of ``sub``."""
    try:
        values = parse_config(Path(path).read_text())
    except OSError as exc:
        raise FileNotFoundError(f"cannot read config {path}: {exc.strerror}") from None
    actions = {a.dest: a for a in sub._actions}
    aliases = {"topology": "kind"}
    defaults = {}
    for key, raw in values.items():
        dest = aliases.get(key, key)
        action = actions.get(dest)
        if action is None or dest in ("help", "config", "func"):
            raise FormatError(f"config {path}: unknown key {key!r}")
        if action.nargs == 0:
            defaults[dest] = raw.lower() in ("1", "true", "yes", "on")
            continue
        convert = action.type or str
        try:
            value = [convert(t) for t in raw.split()] if action.nargs == "+" else convert(raw)
        except (ValueError, argparse.ArgumentTypeError):
            raise FormatError(f"config {path}: bad value for {key}: {raw!r}") from None
        if action.choices is not None and value not in action.choices:
            raise FormatError(f"config {path}: {key} must be one of {list(action.choices)}")
        defaults[dest] = value
    sub.set_defaults(**defaults)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            _apply_config(subs[args.command], args.config)
            args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"utilgraph: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"utilgraph: malformed input: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except CapExceeded as exc:
        print(f"utilgraph: refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except RejectedInput as exc:
        print(f"utilgraph: rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except OSError as exc:
        print(f"utilgraph: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
