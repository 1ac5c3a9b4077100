"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest

from utilgraph.hypergraph import Hyperedge, UtilityHypergraph, load_uhg
from utilgraph.separator import Decomposition

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def buyer() -> UtilityHypergraph:
    return load_uhg(FIXTURES / "buyer.uhg")


@pytest.fixture
def seller() -> UtilityHypergraph:
    return load_uhg(FIXTURES / "seller.uhg")


@pytest.fixture
def merged_example() -> UtilityHypergraph:
    return load_uhg(FIXTURES / "buyer_seller.uhg")


def chain(n: int, weight: int = 1) -> UtilityHypergraph:
    return UtilityHypergraph(n, tuple(Hyperedge((i, i + 1), weight) for i in range(1, n)))


def all_contracts(n: int):
    return itertools.product((0, 1), repeat=n)


def naive_value(g: UtilityHypergraph, x) -> int:
    """Polynomial evaluation written independently of the library."""
    total = 0
    for e in g.edges:
        term = e.weight
        for v in e.vertices:
            term *= x[v - 1]
        total += term
    return total


def oracle_optimum(g: UtilityHypergraph) -> tuple[tuple[int, ...], int]:
    """Exhaustive optimum, lexicographically smallest on ties."""
    best_x, best = None, None
    for x in all_contracts(g.issue_count):
        u = naive_value(g, x)
        if best is None or u > best:
            best_x, best = x, u
    return best_x, best


def nondominated(points) -> set[tuple[int, int]]:
    """Quadratic dominance filter over utility pairs."""
    pts = set(points)
    return {
        p
        for p in pts
        if not any(q[0] >= p[0] and q[1] >= p[1] and q != p for q in pts)
    }


def random_graph(rng: random.Random, n: int, m: int, max_arity: int = 2, w: int = 10) -> UtilityHypergraph:
    terms = []
    for _ in range(m):
        arity = rng.randint(1, min(max_arity, n))
        vs = rng.sample(range(1, n + 1), arity)
        weight = rng.choice([i for i in range(-w, w + 1) if i])
        terms.append((weight, vs))
    return UtilityHypergraph.from_terms(n, terms)


def random_decomposition(rng: random.Random, g: UtilityHypergraph, k: int) -> Decomposition:
    """A valid (not necessarily balanced) decomposition built by assigning
    vertices to random parts and moving edge-conflicting vertices to the cut."""
    n = g.issue_count
    part = {v: rng.randint(1, k) for v in range(1, n + 1)}
    cut: set[int] = set()
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            free = [v for v in e.vertices if v not in cut]
            if len({part[v] for v in free}) > 1:
                cut.add(rng.choice(free))
                changed = True
    parts = [[v for v in range(1, n + 1) if v not in cut and part[v] == i] for i in range(1, k + 1)]
    return Decomposition(n, tuple(sorted(cut)), tuple(tuple(p) for p in parts), 0.99)


def graph_from_table(n: int, table: dict[tuple[int, ...], int]) -> UtilityHypergraph:
    """Hypergraph whose utility equals ``table`` (Moebius inversion); table[0..0] must be 0."""
    assert table.get((0,) * n, 0) == 0
    terms = []
    for x in all_contracts(n):
        s = [i for i, b in enumerate(x) if b]
        if not s:
            continue
        coef = 0
        for r in range(len(s) + 1):
            for sub in itertools.combinations(s, r):
                y = tuple(1 if i in sub else 0 for i in range(n))
                coef += (-1) ** (len(s) - r) * table.get(y, 0)
        if coef:
            terms.append((coef, [i + 1 for i in s]))
    return UtilityHypergraph.from_terms(n, terms)


# --------------------------------------------------------------------------
# acceptance reporting: one line per criterion in the terminal summary

ACCEPTANCE_RESULTS: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[number])
