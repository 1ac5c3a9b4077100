"""Mediated two-agent negotiation driven by elicitation queries.

The mediator sees the union of both agents' edge structures but none of their
weights.  It partitions that structure and then learns what it needs through
two kinds of counted queries:

* value queries ("what is your utility for this contract?"), used to find a
  welfare-maximising contract with the decomposed search, and
* comparison queries ("do you prefer this contract to that one?"), used to
  recover the whole Pareto frontier from ordinal answers only.

Partition-local contracts are completed canonically: the free vertices of the
other partitions are set to 0, the cut set to the current assignment.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from utilgraph.errors import CapExceeded, RejectedInput
from utilgraph.hypergraph import (
    Instantiation,
    Skeleton,
    UtilityHypergraph,
    evaluate,
    evaluate_many,
    format_bits,
)
from utilgraph.optimizer import CUT_CAP, FREE_CAP, bit_matrix, check_caps, search_blocks
from utilgraph.separator import (
    DEFAULT_EPSILON,
    Decomposition,
    HasStructure,
    cost_estimate,
    partition_balanced,
    validate,
)

CANDIDATE_BUDGET = 10**6


class Comparison(enum.Enum):
    GREATER = "greater"
    EQUAL = "equal"
    LESS = "less"


class Agent:
    """A negotiating party that only reveals its utility through queries.

    Counters record every answered query.  If ``transcript`` is a list, one
    line per query is appended to it::

        V <agent> <contract> <utility>
        C <agent> <contract> <contract> <greater|equal|less>
    """

    def __init__(self, label: str, graph: UtilityHypergraph, transcript: list[str] | None = None) -> None:
        self.label = label
        self._graph = graph
        self.transcript = transcript
        self.value_queries_answered = 0
        self.comparison_queries_answered = 0

    def __repr__(self) -> str:
        return (
            f"Agent({self.label!r}, value_queries={self.value_queries_answered},"
            f" comparison_queries={self.comparison_queries_answered})"
        )

    @property
    def issue_count(self) -> int:
        return self._graph.issue_count

    def structure(self) -> Skeleton:
        """The declared dependency structure (edge vertex sets, no weights)."""
        return self._graph.skeleton()

    def answer_value_query(self, x: Sequence[int]) -> int:
        u = evaluate(self._graph, x)
        self.value_queries_answered += 1
        if self.transcript is not None:
            self.transcript.append(f"V {self.label} {format_bits(x)} {u}")
        return u

    def answer_value_queries(self, X: np.ndarray) -> np.ndarray:
        """A batch of value queries, one per row of ``X``."""
        u = evaluate_many(self._graph, X)
        self.value_queries_answered += len(u)
        if self.transcript is not None:
            for row, val in zip(X, u):
                self.transcript.append(f"V {self.label} {format_bits(row)} {int(val)}")
        return u

    def answer_comparison_query(self, x: Sequence[int], y: Sequence[int]) -> Comparison:
        ux, uy = evaluate(self._graph, x), evaluate(self._graph, y)
        self.comparison_queries_answered += 1
        ans = Comparison.GREATER if ux > uy else Comparison.LESS if ux < uy else Comparison.EQUAL
        if self.transcript is not None:
            self.transcript.append(f"C {self.label} {format_bits(x)} {format_bits(y)} {ans.value}")
        return ans


def shared_structure(a: Agent, b: Agent) -> Skeleton:
    return a.structure().union(b.structure())


def _check_session(a: Agent, b: Agent, structure: HasStructure) -> None:
    n = structure.issue_count
    if a.issue_count != n or b.issue_count != n:
        raise RejectedInput(
            f"agents declare {a.issue_count} and {b.issue_count} issues; the structure has {n}"
        )
    declared = set(shared_structure(a, b).vertex_sets)
    if declared != set(structure.vertex_sets):
        raise RejectedInput("shared structure differs from the union of the agents' declared structures")


def _session_decomposition(
    structure: HasStructure, k: int, epsilon: float, seed: int, given: Decomposition | None
) -> Decomposition:
    if given is None:
        return partition_balanced(structure, k, epsilon, seed)
    report = validate(structure, given, check_balance=False)
    if not report.ok:
        raise RejectedInput(f"invalid decomposition: {report.message}")
    return given


# --------------------------------------------------------------------------
# value protocol


@dataclass(frozen=True)
class ValueReport:
    outcome: Instantiation
    welfare: int
    decomposition: Decomposition
    value_queries: dict[str, int]
    eq3_cost: int

    @property
    def total_queries(self) -> int:
        return sum(self.value_queries.values())


def _completion_oracle(a: Agent, b: Agent, d: Decomposition, part: int):
    n = d.issue_count
    cut_cols = np.asarray(d.cut_set, dtype=np.intp) - 1
    free_cols = np.asarray(d.parts[part - 1], dtype=np.intp) - 1
    # The f=0 row of a partition p >= 2 activates none of p's owned edges, so
    # it measures the cut-only (residual) utility, which every partition's
    # queries include.  Partition 1 owns it; the others subtract it.
    baseline: dict[int, np.ndarray] = {}

    def table(_part: int, cut_bits: np.ndarray, free_bits: np.ndarray, cut_start: int, free_start: int) -> np.ndarray:
        rows_c, rows_f = cut_bits.shape[0], free_bits.shape[0]
        X = np.zeros((rows_c * rows_f, n), dtype=np.uint8)
        if len(cut_cols):
            X[:, cut_cols] = np.repeat(cut_bits, rows_f, axis=0)
        if len(free_cols):
            X[:, free_cols] = np.tile(free_bits, (rows_c, 1))
        joint = (a.answer_value_queries(X) + b.answer_value_queries(X)).reshape(rows_c, rows_f)
        if part == 1:
            return joint
        if free_start == 0:
            baseline[cut_start] = joint[:, 0].copy()
        return joint - baseline[cut_start][:, None]

    return table


def negotiate_value(
    a: Agent,
    b: Agent,
    structure: HasStructure,
    k: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    cut_cap: int = CUT_CAP,
    free_cap: int = FREE_CAP,
    decomposition: Decomposition | None = None,
) -> ValueReport:
    """Find a contract maximising ``U_A + U_B`` using value queries only."""
    _check_session(a, b, structure)
    d = _session_decomposition(structure, k, epsilon, seed, decomposition)
    check_caps(d, cut_cap, free_cap)
    before = {a.label: a.value_queries_answered, b.label: b.value_queries_answered}
    oracles = [_completion_oracle(a, b, d, p) for p in range(1, d.k + 1)]
    outcome, welfare, _ = search_blocks(d, oracles)
    counts = {
        a.label: a.value_queries_answered - before[a.label],
        b.label: b.value_queries_answered - before[b.label],
    }
    return ValueReport(outcome, welfare, d, counts, cost_estimate(d).exact)


# --------------------------------------------------------------------------
# comparison protocol


@dataclass(frozen=True)
class FrontierPoint:
    contract: Instantiation
    u_a: int | None = None
    u_b: int | None = None


@dataclass(frozen=True)
class ParetoFrontier:
    """Nondominated contracts.

    Comparison runs leave ``u_a``/``u_b`` empty and keep the query transcript
    (when one was recorded) as the ordinal certificate.
    """

    points: tuple[FrontierPoint, ...]
    transcript: tuple[str, ...] = ()

    @property
    def contracts(self) -> list[Instantiation]:
        return [p.contract for p in self.points]

    @classmethod
    def from_utilities(cls, items: Sequence[tuple[Instantiation, int, int]]) -> ParetoFrontier:
        """Nondominated subset of explicit ``(contract, u_a, u_b)`` triples, ``u_a`` descending."""
        best: dict[tuple[int, int], Instantiation] = {}
        for x, ua, ub in items:
            if (ua, ub) not in best or x < best[(ua, ub)]:
                best[(ua, ub)] = x
        pts = []
        top_b = None
        for (ua, ub) in sorted(best, key=lambda t: (-t[0], -t[1])):
            if top_b is None or ub > top_b:
                pts.append(FrontierPoint(best[(ua, ub)], ua, ub))
                top_b = ub
        return cls(tuple(pts))


def _merge_runs(runs: list[list[Instantiation]], agent: Agent) -> list[Instantiation]:
    """Merge runs already ordered best-first for ``agent`` into one such list.

    Adjacent runs are merged pairwise, level by level (bottom-up merge sort
    when every run is a single contract).  Stable: on ties the earlier run wins.
    """
    runs = [r for r in runs if r]
    if not runs:
        return []
    while len(runs) > 1:
        merged = []
        for i in range(0, len(runs) - 1, 2):
            left, right = runs[i], runs[i + 1]
            out = []
            li = ri = 0
            while li < len(left) and ri < len(right):
                if agent.answer_comparison_query(right[ri], left[li]) is Comparison.GREATER:
                    out.append(right[ri])
                    ri += 1
                else:
                    out.append(left[li])
                    li += 1
            out.extend(left[li:])
            out.extend(right[ri:])
            merged.append(out)
        if len(runs) % 2:
            merged.append(runs[-1])
        runs = merged
    return runs[0]


def _ranks(runs: list[list[Instantiation]], agent: Agent) -> dict[Instantiation, int]:
    """Dense preference rank per contract (0 = least preferred)."""
    order = _merge_runs(runs, agent)
    rank = [0] * len(order)
    for i in range(len(order) - 2, -1, -1):
        tie = agent.answer_comparison_query(order[i], order[i + 1]) is Comparison.EQUAL
        rank[i] = rank[i + 1] if tie else rank[i + 1] + 1
    return dict(zip(order, rank))


def _sweep(items: list[Instantiation], rank_a: dict, rank_b: dict) -> list[Instantiation]:
    groups: dict[int, list[Instantiation]] = {}
    for x in items:
        groups.setdefault(rank_a[x], []).append(x)
    kept = []
    best_b = -1
    for ra in sorted(groups, reverse=True):
        group = groups[ra]
        top = max(rank_b[x] for x in group)
        if top > best_b:
            kept.append(min(x for x in group if rank_b[x] == top))
            best_b = top
    return kept


def local_pareto_sweep(contracts: Sequence[Instantiation], a: Agent, b: Agent) -> list[Instantiation]:
    """Nondominated contracts, found with comparison queries only.

    Sorts once by each agent's preference (merge sort), recovers tie groups
    from adjacent comparisons, then sweeps in ``a``-descending order keeping a
    contract only when ``b`` ranks it above everything kept so far.  Contracts
    tied for both agents collapse to the lexicographically smallest one.
    The result is ordered best-first for ``a`` and worst-first for ``b``.
    """
    items = sorted(set(map(tuple, contracts)))
    if len(items) <= 1:
        return items
    singletons = [[x] for x in items]
    return _sweep(items, _ranks(singletons, a), _ranks(singletons, b))


def frontier_merge(frontiers: list[list[Instantiation]], a: Agent, b: Agent) -> list[Instantiation]:
    """Sweep the union of frontiers returned by :func:`local_pareto_sweep`.

    Each input is already best-first for ``a`` and worst-first for ``b``, so
    only the merges between inputs cost queries.
    """
    frontiers = [f for f in frontiers if f]
    items = sorted(x for f in frontiers for x in f)
    if len(items) <= 1:
        return items
    rank_a = _ranks([list(f) for f in frontiers], a)
    rank_b = _ranks([list(reversed(f)) for f in frontiers], b)
    return _sweep(items, rank_a, rank_b)


def sweep_query_bound(count: int) -> float:
    """Comparison budget of one sweep: two sorts, tie recovery, one traversal."""
    if count <= 1:
        return 0.0
    return count * (1 + 2 * math.log2(count)) + count


@dataclass(frozen=True)
class ComparisonReport:
    frontier: ParetoFrontier
    decomposition: Decomposition
    comparison_queries: dict[str, int]
    candidates_examined: int
    cut_assignments: int = 0
    local_frontier_sizes: list[int] = field(default_factory=list)

    @property
    def total_queries(self) -> int:
        return sum(self.comparison_queries.values())


def _combine(x: Instantiation, y: Instantiation) -> Instantiation:
    return tuple(p | q for p, q in zip(x, y))


def negotiate_comparison(
    a: Agent,
    b: Agent,
    structure: HasStructure,
    k: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    budget: int = CANDIDATE_BUDGET,
    cut_cap: int = CUT_CAP,
    free_cap: int = FREE_CAP,
    decomposition: Decomposition | None = None,
) -> ComparisonReport:
    """Recover the full Pareto frontier of ``(U_A, U_B)`` from comparison queries.

    For each cut assignment, every partition's completions are swept down to a
    local frontier.  Local frontiers are then combined one partition at a time
    (cross product, then sweep) and the per-assignment results are pooled and
    swept once more.  A nondominated contract is nondominated inside every
    partition block for its cut assignment, so nothing on the frontier is lost
    by pruning blocks first.
    """
    _check_session(a, b, structure)
    d = _session_decomposition(structure, k, epsilon, seed, decomposition)
    check_caps(d, cut_cap, free_cap)
    n, c = d.issue_count, len(d.cut_set)
    before = {a.label: a.comparison_queries_answered, b.label: b.comparison_queries_answered}
    transcript_start = len(a.transcript) if a.transcript is not None else 0
    examined = 0
    local_sizes = []
    pooled: list[list[Instantiation]] = []
    free_tables = [bit_matrix(1 << len(p), len(p)) for p in d.parts]
    for ci in range(1 << c):
        base = [0] * n
        for i, bit in enumerate(bit_matrix(1, c, ci)[0] if c else ()):
            base[d.cut_set[i] - 1] = int(bit)
        acc: list[Instantiation] | None = None
        for free, table in zip(d.parts, free_tables):
            block = []
            for row in table:
                x = list(base)
                for v, bit in zip(free, row):
                    x[v - 1] = int(bit)
                block.append(tuple(x))
            examined += len(block)
            local = local_pareto_sweep(block, a, b)
            local_sizes.append(len(local))
            if acc is None:
                acc = local
                continue
            size = len(acc) * len(local)
            if size > budget:
                raise CapExceeded(
                    f"merging {len(acc)} x {len(local)} = {size} candidates exceeds the budget of {budget}"
                )
            examined += size
            # a fixed block shifts every utility equally, so each row of the
            # product keeps the order of the local frontier
            acc = frontier_merge([[_combine(x, y) for y in local] for x in acc], a, b)
        pooled.append(acc)
    pooled_size = sum(len(f) for f in pooled)
    if pooled_size > budget:
        raise CapExceeded(f"{pooled_size} pooled candidates exceed the budget of {budget}")
    examined += pooled_size
    final = frontier_merge(pooled, a, b)
    counts = {
        a.label: a.comparison_queries_answered - before[a.label],
        b.label: b.comparison_queries_answered - before[b.label],
    }
    transcript: tuple[str, ...] = ()
    if a.transcript is not None:
        transcript = tuple(a.transcript[transcript_start:])
    frontier = ParetoFrontier(tuple(FrontierPoint(x) for x in final), transcript)
    return ComparisonReport(frontier, d, counts, examined, 1 << c, local_sizes)
