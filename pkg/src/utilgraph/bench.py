"""Experiment harness: per-instance negotiation rows, topology comparison,
partition-count sweep and scale study.

Every number comes from the public operations of the other modules; this
layer only loops over seeds and aggregates.  Large counts are reported in
log2.  ``wall_ms`` is written as 0 unless timing is requested, so CSV output
is byte-identical across reruns with the same configuration.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from collections.abc import Iterable, Sequence
from dataclasses import astuple, dataclass, fields, replace
from fractions import Fraction

from utilgraph.errors import RejectedInput
from utilgraph.hypergraph import UtilityHypergraph
from utilgraph.mediator import Agent, negotiate_comparison, negotiate_value, shared_structure
from utilgraph.optimizer import CUT_CAP, FREE_CAP, decomposed_search, log2_speedup
from utilgraph.separator import DEFAULT_EPSILON, Decomposition, cost_estimate, partition_balanced, sweep_partitions
from utilgraph.topology import TopologySpec, agent_pair, generate

TABLE1_TOPOLOGIES = ("scale_free", "small_world", "random")
TABLE1_K = 10
TABLE1_REPETITIONS = 30
SWEEP_EPSILON = 0.02
SCALE_TARGET_SIZE = 20
# search cost above which the scale study estimates instead of searching
SCALE_SOLVE_BUDGET = 1 << 24


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def to_csv(rows: Sequence, header: Sequence[str] | None = None) -> str:
    """CSV text for a list of flat dataclass rows (``\\n`` line endings)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header is None:
        if not rows:
            return ""
        header = [f.name for f in fields(rows[0])]
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in astuple(row)])
    return buf.getvalue()


@dataclass(frozen=True)
class ExperimentRow:
    """One negotiation instance.

    ``eq3_cost`` and ``eval_calls`` are log2 values; ``value_queries`` and
    ``comparison_queries`` total both agents (0 when that protocol was not run).
    """

    topology: str
    n: int
    m: int
    seed: int
    k_parts: int
    epsilon: float
    cutset_size: int
    max_free: int
    eq3_cost: float
    eval_calls: float
    value_queries: int
    comparison_queries: int
    log2_speedup: float
    wall_ms: int


EXPERIMENT_FIELDS = tuple(f.name for f in fields(ExperimentRow))


def negotiate_instance(
    topology: str,
    graphs: tuple[UtilityHypergraph, UtilityHypergraph],
    k: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    value: bool = True,
    comparison: bool = False,
    timing: bool = False,
    decomposition: Decomposition | None = None,
    transcript: list[str] | None = None,
    cut_cap: int = CUT_CAP,
    free_cap: int = FREE_CAP,
) -> ExperimentRow:
    """Partition the agents' shared structure and run the requested protocols."""
    start = time.perf_counter()
    a = Agent("A", graphs[0], transcript)
    b = Agent("B", graphs[1], transcript)
    structure = shared_structure(a, b)
    d = decomposition or partition_balanced(structure, k, epsilon, seed)
    eq3 = cost_estimate(d).exact
    value_queries = comparison_queries = 0
    if value:
        value_queries = negotiate_value(
            a, b, structure, d.k, epsilon, seed, cut_cap, free_cap, decomposition=d
        ).total_queries
    if comparison:
        comparison_queries = negotiate_comparison(
            a, b, structure, d.k, epsilon, seed, cut_cap=cut_cap, free_cap=free_cap, decomposition=d
        ).total_queries
    wall = round((time.perf_counter() - start) * 1000) if timing else 0
    n = structure.issue_count
    return ExperimentRow(
        topology=topology,
        n=n,
        m=len(structure.vertex_sets),
        seed=seed,
        k_parts=d.k,
        epsilon=epsilon,
        cutset_size=len(d.cut_set),
        max_free=d.max_free,
        eq3_cost=math.log2(eq3),
        eval_calls=math.log2(eq3),
        value_queries=value_queries,
        comparison_queries=comparison_queries,
        log2_speedup=log2_speedup(eq3, n),
        wall_ms=wall,
    )


def run_spec(spec: TopologySpec, k: int, epsilon: float = DEFAULT_EPSILON, **kwargs) -> ExperimentRow:
    """:func:`negotiate_instance` on the agent pair generated from ``spec``."""
    return negotiate_instance(spec.kind, agent_pair(spec), k, epsilon, spec.seed, **kwargs)


# --------------------------------------------------------------------------
# topology comparison


@dataclass(frozen=True)
class TopologySummary:
    topology: str
    repetitions: int
    mean_value_queries: float
    stderr_value_queries: float
    mean_cutset: float
    min_cutset: int
    max_cutset: int
    mean_comparison_queries: float


def _stderr(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return statistics.stdev(values) / math.sqrt(len(values))


def summarize_table1(rows: Iterable[ExperimentRow]) -> list[TopologySummary]:
    by_topology: dict[str, list[ExperimentRow]] = {}
    for r in rows:
        by_topology.setdefault(r.topology, []).append(r)
    out = []
    for topology, group in by_topology.items():
        queries = [r.value_queries for r in group]
        cuts = [r.cutset_size for r in group]
        out.append(
            TopologySummary(
                topology=topology,
                repetitions=len(group),
                mean_value_queries=statistics.fmean(queries),
                stderr_value_queries=_stderr(queries),
                mean_cutset=statistics.fmean(cuts),
                min_cutset=min(cuts),
                max_cutset=max(cuts),
                mean_comparison_queries=statistics.fmean(r.comparison_queries for r in group),
            )
        )
    return out


def table1(
    topologies: Sequence[str] = TABLE1_TOPOLOGIES,
    n: int = 50,
    m: int = 50,
    repetitions: int = TABLE1_REPETITIONS,
    seed_base: int = 0,
    k: int = TABLE1_K,
    epsilon: float = DEFAULT_EPSILON,
    comparison: bool = False,
    timing: bool = False,
    template: TopologySpec | None = None,
) -> tuple[list[ExperimentRow], list[TopologySummary]]:
    """Value-protocol cost per topology over ``repetitions`` seeds.

    ``template`` supplies the remaining generator parameters (ring degree,
    rewiring probability, weights); ``kind``, ``n``, ``m`` and ``seed`` are
    set per instance.
    """
    if repetitions < 1:
        raise RejectedInput("repetitions must be positive")
    base = template or TopologySpec("random", n)
    rows = []
    for topology in topologies:
        for rep in range(repetitions):
            spec = replace(base, kind=topology, n=n, m=m, seed=seed_base + rep)
            rows.append(run_spec(spec, k, epsilon, comparison=comparison, timing=timing))
    return rows, summarize_table1(rows)


# --------------------------------------------------------------------------
# partition-count sweep


@dataclass(frozen=True)
class SweepSummary:
    k: int
    seeds: int
    mean_cost_log2: float
    mean_cutset: float
    mean_max_free: float
    argmin: bool
    mean_cost_exact: Fraction


SWEEP_FIELDS = ("k", "seeds", "mean_cost_log2", "mean_cutset", "mean_max_free", "argmin")


def sweep(
    spec: TopologySpec,
    k_values: Sequence[int],
    seeds: int = 20,
    epsilon: float = SWEEP_EPSILON,
) -> list[SweepSummary]:
    """Mean search cost and cut size per ``k`` over graphs seeded ``spec.seed + i``."""
    if not k_values:
        raise RejectedInput("need at least one k")
    if seeds < 1:
        raise RejectedInput("seeds must be positive")
    costs = {k: 0 for k in k_values}
    cuts = {k: 0 for k in k_values}
    frees = {k: 0 for k in k_values}
    for i in range(seeds):
        s = spec.seed + i
        g = generate(replace(spec, seed=s))
        for row in sweep_partitions(g, k_values, epsilon, s):
            costs[row.k] += row.cost.exact
            cuts[row.k] += row.cut_size
            frees[row.k] += row.max_free
    best = min(k_values, key=lambda k: (costs[k], k))
    return [
        SweepSummary(
            k=k,
            seeds=seeds,
            mean_cost_log2=math.log2(costs[k]) - math.log2(seeds),
            mean_cutset=cuts[k] / seeds,
            mean_max_free=frees[k] / seeds,
            argmin=k == best,
            mean_cost_exact=Fraction(costs[k], seeds),
        )
        for k in k_values
    ]


def sweep_csv(rows: Sequence[SweepSummary], verbose: bool = False) -> str:
    header = list(SWEEP_FIELDS) + (["mean_cost_exact"] if verbose else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        vals = [r.k, r.seeds, r.mean_cost_log2, r.mean_cutset, r.mean_max_free, r.argmin]
        if verbose:
            vals.append(str(r.mean_cost_exact))
        w.writerow([_fmt(v) for v in vals])
    return buf.getvalue()


# --------------------------------------------------------------------------
# scale study


@dataclass(frozen=True)
class ScaleRow:
    """Partition quality and speed-up for one graph.

    ``estimated`` is 1 when the search was not run and ``eval_calls`` is the
    modelled count of the decomposition; otherwise it is the measured count.
    """

    n: int
    seed: int
    k_parts: int
    epsilon: float
    cutset_size: int
    cutset_fraction: float
    max_free: int
    eq3_cost: float
    eval_calls: float
    log2_speedup: float
    estimated: bool
    wall_ms: int


def scale_parameters(n: int, target: int = SCALE_TARGET_SIZE) -> tuple[int, float]:
    """``(k, epsilon)`` aiming at parts of ``target`` vertices, sizes within +-target/4."""
    k = max(1, n // target)
    # tolerance ceil(epsilon * n) == target // 2 (10 for the default target)
    epsilon = (target / 2 - 0.5) / n
    return k, epsilon


def scale_study(
    ns: Sequence[int],
    seeds: int = 1,
    seed_base: int = 0,
    target: int = SCALE_TARGET_SIZE,
    solve_budget: int = SCALE_SOLVE_BUDGET,
    restarts: int | None = None,
    timing: bool = False,
    template: TopologySpec | None = None,
) -> list[ScaleRow]:
    base = template or TopologySpec("scale_free", 2)
    rows = []
    for n in ns:
        k, epsilon = scale_parameters(n, target)
        for i in range(seeds):
            start = time.perf_counter()
            s = seed_base + i
            g = generate(replace(base, n=n, m=n, seed=s))
            d = partition_balanced(g, k, epsilon, s, restarts)
            eq3 = cost_estimate(d).exact
            estimated = eq3 > solve_budget or len(d.cut_set) > CUT_CAP or d.max_free > FREE_CAP
            calls = eq3 if estimated else decomposed_search(g, d).eval_calls
            wall = round((time.perf_counter() - start) * 1000) if timing else 0
            rows.append(
                ScaleRow(
                    n=n,
                    seed=s,
                    k_parts=d.k,
                    epsilon=epsilon,
                    cutset_size=len(d.cut_set),
                    cutset_fraction=len(d.cut_set) / n,
                    max_free=d.max_free,
                    eq3_cost=math.log2(eq3),
                    eval_calls=math.log2(calls),
                    log2_speedup=log2_speedup(calls, n),
                    estimated=estimated,
                    wall_ms=wall,
                )
            )
    return rows


def mean_by_n(rows: Iterable[ScaleRow], attr: str) -> dict[int, float]:
    acc: dict[int, list[float]] = {}
    for r in rows:
        acc.setdefault(r.n, []).append(getattr(r, attr))
    return {n: statistics.fmean(v) for n, v in acc.items()}
