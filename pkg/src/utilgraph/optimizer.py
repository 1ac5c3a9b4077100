"""Exact welfare maximisation: exhaustive search and decomposed search.

Both searches report the lexicographically smallest optimal contract and the
exact number of utility evaluations they performed.  The decomposed search
fixes the cut set, maximises each partition independently over its free
vertices, and keeps the cut assignment with the best sum; its evaluation count
is ``2^|cut| * sum_i 2^|free_i|`` by construction.

Enumeration is vectorised: each partition's owned utility is tabulated over
(cut assignment x free assignment) blocks with numpy, and every table cell is
one counted evaluation.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from utilgraph.errors import CapExceeded, RejectedInput
from utilgraph.hypergraph import Instantiation, UtilityHypergraph, format_bits
from utilgraph.separator import Decomposition, cost_estimate, validate

BRUTE_FORCE_CAP = 26
CUT_CAP = 30
FREE_CAP = 26
# rows per numpy block; bounds peak memory at a few tens of MB
CHUNK_ROWS = 1 << 20


@dataclass(frozen=True)
class SearchReport:
    n: int
    optimum: Instantiation
    optimum_value: int
    eval_calls: int
    eq3_cost: int

    @property
    def log2_speedup(self) -> float:
        return log2_speedup(self.eval_calls, self.n)

    def summary(self) -> str:
        return (
            f"value {self.optimum_value}\n"
            f"outcome {format_bits(self.optimum)}\n"
            f"eval_calls {self.eval_calls}\n"
            f"eq3_cost {self.eq3_cost}\n"
            f"log2_speedup {self.log2_speedup:.10g}\n"
        )


def bit_matrix(count: int, width: int, start: int = 0) -> np.ndarray:
    """Rows ``start..start+count-1`` written as ``width``-bit big-endian 0/1 vectors.

    Row order is lexicographic order on the resulting bit tuples.
    """
    idx = np.arange(start, start + count, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def brute_force(g: UtilityHypergraph, cap: int = BRUTE_FORCE_CAP) -> SearchReport:
    """Evaluate all ``2^n`` contracts and return the best (lexicographically first on ties)."""
    n = g.issue_count
    if n > cap:
        raise CapExceeded(
            f"brute force over {n} issues needs 2^{n} evaluations; the cap is {cap} issues"
        )
    from utilgraph.hypergraph import evaluate_many

    total = 1 << n
    best_val, best_idx = None, 0
    for start in range(0, total, CHUNK_ROWS):
        count = min(CHUNK_ROWS, total - start)
        vals = evaluate_many(g, bit_matrix(count, n, start))
        i = int(np.argmax(vals))
        if best_val is None or vals[i] > best_val:
            best_val, best_idx = int(vals[i]), start + i
    optimum = tuple(int(b) for b in bit_matrix(1, n, best_idx)[0])
    return SearchReport(n, optimum, best_val, total, total)


def _owned_edges(g: UtilityHypergraph, d: Decomposition, part: int) -> list:
    return [e for e in g.edges if d.owner_of(e.vertices) == part]


# A block oracle maps (part, cut bit rows, free bit rows, cut offset, free
# offset) -> utility table of shape (len(cut rows), len(free rows)).  For a
# given cut block, free blocks arrive in ascending order starting at offset 0.
# The plain search evaluates owned edges directly; the mediator substitutes
# agent queries.
BlockOracle = Callable[[int, np.ndarray, np.ndarray, int, int], np.ndarray]


def owned_table(g: UtilityHypergraph, d: Decomposition, part: int) -> BlockOracle:
    cut_pos = {v: i for i, v in enumerate(d.cut_set)}
    free_pos = {v: i for i, v in enumerate(d.parts[part - 1])}
    edges = _owned_edges(g, d, part)

    def table(_part: int, cut_bits: np.ndarray, free_bits: np.ndarray, *_offsets: int) -> np.ndarray:
        out = np.zeros((cut_bits.shape[0], free_bits.shape[0]), dtype=np.int64)
        for e in edges:
            col = np.ones((cut_bits.shape[0], 1), dtype=bool)
            row = np.ones((1, free_bits.shape[0]), dtype=bool)
            for v in e.vertices:
                if v in cut_pos:
                    col = col & cut_bits[:, cut_pos[v]].astype(bool)[:, None]
                else:
                    row = row & free_bits[:, free_pos[v]].astype(bool)[None, :]
            out += e.weight * (col & row)
        return out

    return table


def check_caps(d: Decomposition, cut_cap: int = CUT_CAP, free_cap: int = FREE_CAP) -> None:
    if len(d.cut_set) > cut_cap:
        raise CapExceeded(f"cut set has {len(d.cut_set)} vertices; the cap is {cut_cap}")
    if d.max_free > free_cap:
        raise CapExceeded(f"largest partition has {d.max_free} free vertices; the cap is {free_cap}")


def search_blocks(
    d: Decomposition, oracles: Sequence[BlockOracle]
) -> tuple[Instantiation, int, int]:
    """Shared driver for the decomposed search.

    For every cut assignment and every partition, tabulate the partition's
    objective over all its free assignments, take the maximum, and sum the
    maxima across partitions.  Returns ``(optimum, value, evaluations)``; ties
    go to the lexicographically smallest full contract.
    """
    n, c = d.issue_count, len(d.cut_set)
    n_cut = 1 << c
    sums = np.zeros(n_cut, dtype=np.int64)
    # per partition: index of the first maximising free assignment for each cut row
    choice = [np.zeros(n_cut, dtype=np.int64) for _ in d.parts]
    evals = 0
    for p, (free, oracle) in enumerate(zip(d.parts, oracles), start=1):
        n_free = 1 << len(free)
        free_step = min(n_free, CHUNK_ROWS)
        step = max(1, CHUNK_ROWS // free_step)
        for start in range(0, n_cut, step):
            count = min(step, n_cut - start)
            cut_bits = bit_matrix(count, c, start)
            best_val = np.full(count, np.iinfo(np.int64).min, dtype=np.int64)
            best_arg = np.zeros(count, dtype=np.int64)
            for fstart in range(0, n_free, free_step):
                free_bits = bit_matrix(free_step, len(free), fstart)
                table = oracle(p, cut_bits, free_bits, start, fstart)
                evals += table.size
                arg = np.argmax(table, axis=1)
                val = table[np.arange(count), arg]
                better = val > best_val
                best_val[better] = val[better]
                best_arg[better] = arg[better] + fstart
            sums[start : start + count] += best_val
            choice[p - 1][start : start + count] = best_arg
    best = int(sums.max())
    winners = np.flatnonzero(sums == best)

    def assemble(ci: int) -> Instantiation:
        x = [0] * n
        for i, bit in enumerate(bit_matrix(1, c, ci)[0] if c else ()):
            x[d.cut_set[i] - 1] = int(bit)
        for p, free in enumerate(d.parts):
            fi = int(choice[p][ci])
            for i, v in enumerate(free):
                x[v - 1] = (fi >> (len(free) - 1 - i)) & 1
        return tuple(x)

    optimum = min(assemble(int(ci)) for ci in winners)
    return optimum, best, evals


def decomposed_search(
    g: UtilityHypergraph,
    d: Decomposition,
    cut_cap: int = CUT_CAP,
    free_cap: int = FREE_CAP,
) -> SearchReport:
    """Optimal contract via the cut-set decomposition ``d``."""
    report = validate(g, d, check_balance=False)
    if not report.ok:
        raise RejectedInput(f"invalid decomposition: {report.message}")
    check_caps(d, cut_cap, free_cap)
    oracles = [owned_table(g, d, p) for p in range(1, d.k + 1)]
    optimum, value, evals = search_blocks(d, oracles)
    return SearchReport(g.issue_count, optimum, value, evals, cost_estimate(d).exact)


def speedup(eval_calls: int, n: int) -> Fraction:
    """Exhaustive-over-decomposed evaluation ratio ``2^n / eval_calls``."""
    if eval_calls < 1:
        raise RejectedInput("eval_calls must be positive")
    return Fraction(1 << n, eval_calls)


def log2_speedup(eval_calls: int, n: int) -> float:
    if eval_calls < 1:
        raise RejectedInput("eval_calls must be positive")
    return n - math.log2(eval_calls)
