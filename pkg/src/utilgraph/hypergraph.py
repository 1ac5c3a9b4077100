"""Weighted utility hypergraphs over binary issues.

A k-additive utility function over issues ``x_1..x_n`` is a polynomial whose
monomials are products of distinct issues.  Each nonzero coefficient becomes a
hyperedge over the issues of its monomial; unary coefficients are 1-vertex
edges.  There is no constant term, so the all-zeros contract is worth 0.

Vertices are 1-indexed throughout, matching the ``.uhg`` file format.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from utilgraph.errors import FormatError, RejectedInput

if TYPE_CHECKING:
    from utilgraph.separator import Decomposition

Instantiation = tuple[int, ...]

UHG_MAGIC = "UHG 1"


def as_instantiation(bits: str | Iterable[int]) -> Instantiation:
    """Coerce ``"0111"`` or an iterable of 0/1 values into a tuple of ints."""
    if isinstance(bits, str):
        bits = bits.strip()
        if any(c not in "01" for c in bits):
            raise RejectedInput(f"not a bit string: {bits!r}")
        return tuple(int(c) for c in bits)
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise RejectedInput("instantiation values must be 0 or 1")
    return out


def format_bits(x: Sequence[int]) -> str:
    return "".join("1" if b else "0" for b in x)


@dataclass(frozen=True, order=True)
class Hyperedge:
    vertices: tuple[int, ...]
    weight: int

    def __post_init__(self) -> None:
        if not self.vertices:
            raise RejectedInput("hyperedge needs at least one vertex")
        if list(self.vertices) != sorted(set(self.vertices)):
            raise RejectedInput(f"hyperedge vertices must be sorted and distinct: {self.vertices}")
        if self.weight == 0:
            raise RejectedInput(f"zero-weight hyperedge {self.vertices}")

    @property
    def arity(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Skeleton:
    """Edge structure without weights: what a mediator is allowed to see."""

    issue_count: int
    vertex_sets: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        _check_vertex_sets(self.issue_count, self.vertex_sets)

    def union(self, other: Skeleton) -> Skeleton:
        if other.issue_count != self.issue_count:
            raise RejectedInput(
                f"issue count mismatch: {self.issue_count} vs {other.issue_count}"
            )
        return Skeleton(self.issue_count, tuple(sorted(set(self.vertex_sets) | set(other.vertex_sets))))


def _check_vertex_sets(n: int, vertex_sets: Iterable[tuple[int, ...]]) -> None:
    if n < 1:
        raise RejectedInput(f"issue count must be positive, got {n}")
    seen = set()
    for vs in vertex_sets:
        if not vs or list(vs) != sorted(set(vs)):
            raise RejectedInput(f"bad vertex set {vs}")
        if vs[0] < 1 or vs[-1] > n:
            raise RejectedInput(f"vertex set {vs} out of range 1..{n}")
        if vs in seen:
            raise RejectedInput(f"duplicate vertex set {vs}")
        seen.add(vs)


@dataclass(frozen=True)
class UtilityHypergraph:
    issue_count: int
    edges: tuple[Hyperedge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        _check_vertex_sets(self.issue_count, (e.vertices for e in self.edges))

    @classmethod
    def from_terms(cls, issue_count: int, terms: Iterable[tuple[int, Iterable[int]]]) -> UtilityHypergraph:
        """Build from ``(weight, vertices)`` pairs, summing repeated vertex sets.

        Vertex order inside a term does not matter; terms that cancel to zero
        are dropped.
        """
        acc: dict[tuple[int, ...], int] = {}
        for weight, vertices in terms:
            vs = tuple(sorted(vertices))
            if len(set(vs)) != len(vs):
                raise RejectedInput(f"repeated vertex in term {vs}")
            acc[vs] = acc.get(vs, 0) + int(weight)
        return cls(issue_count, tuple(Hyperedge(vs, w) for vs, w in acc.items() if w != 0))

    @classmethod
    def empty(cls, issue_count: int) -> UtilityHypergraph:
        return cls(issue_count, ())

    @property
    def max_arity(self) -> int:
        return max((e.arity for e in self.edges), default=0)

    def skeleton(self) -> Skeleton:
        return Skeleton(self.issue_count, tuple(e.vertices for e in self.edges))

    @property
    def vertex_sets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(e.vertices for e in self.edges)

    def negated(self) -> UtilityHypergraph:
        return UtilityHypergraph(self.issue_count, tuple(Hyperedge(e.vertices, -e.weight) for e in self.edges))

    def degrees(self) -> list[int]:
        """Vertex degree counting only edges of arity >= 2 (index 0 unused)."""
        deg = [0] * (self.issue_count + 1)
        for e in self.edges:
            if e.arity > 1:
                for v in e.vertices:
                    deg[v] += 1
        return deg

    @cached_property
    def _columns(self) -> list[tuple[np.ndarray, int]]:
        return [(np.asarray(e.vertices, dtype=np.intp) - 1, e.weight) for e in self.edges]


def _check_length(g: UtilityHypergraph, length: int) -> None:
    if length != g.issue_count:
        raise RejectedInput(f"instantiation has {length} bits, graph has {g.issue_count} issues")


def evaluate(g: UtilityHypergraph, x: Sequence[int]) -> int:
    """Utility of contract ``x``: the weight sum of edges whose issues are all 1."""
    _check_length(g, len(x))
    total = 0
    for e in g.edges:
        if all(x[v - 1] for v in e.vertices):
            total += e.weight
    return total


def evaluate_many(g: UtilityHypergraph, X: np.ndarray) -> np.ndarray:
    """Vectorised :func:`evaluate` over the rows of a 0/1 matrix."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise RejectedInput("expected a 2-d array of instantiations")
    _check_length(g, X.shape[1])
    X = X.astype(bool, copy=False)
    out = np.zeros(X.shape[0], dtype=np.int64)
    for cols, weight in g._columns:
        if len(cols) == 1:
            active = X[:, cols[0]]
        elif len(cols) == 2:
            active = X[:, cols[0]] & X[:, cols[1]]
        else:
            active = X[:, cols].all(axis=1)
        out += weight * active
    return out


def merge(a: UtilityHypergraph, b: UtilityHypergraph) -> UtilityHypergraph:
    """Sum of two utility functions over the same issues."""
    if a.issue_count != b.issue_count:
        raise RejectedInput(f"issue count mismatch: {a.issue_count} vs {b.issue_count}")
    return UtilityHypergraph.from_terms(
        a.issue_count, [(e.weight, e.vertices) for e in (*a.edges, *b.edges)]
    )


def owned_evaluate(
    g: UtilityHypergraph,
    d: Decomposition,
    part: int,
    x_free: Mapping[int, int],
    x_cut: Mapping[int, int],
) -> int:
    """Weight of the edges owned by ``part`` that are active under the assignment.

    ``x_free`` must assign exactly the free vertices of ``part`` and ``x_cut``
    exactly the cut set.  Summing over all parts reproduces :func:`evaluate`.
    """
    from utilgraph.separator import validate

    report = validate(g, d, check_balance=False)
    if not report.ok:
        raise RejectedInput(f"invalid decomposition: {report.message}")
    if not 1 <= part <= d.k:
        raise RejectedInput(f"partition index {part} outside 1..{d.k}")
    if set(x_free) != set(d.parts[part - 1]):
        raise RejectedInput(f"x_free must cover exactly the free vertices of partition {part}")
    if set(x_cut) != set(d.cut_set):
        raise RejectedInput("x_cut must cover exactly the cut set")
    values = {**x_cut, **x_free}
    total = 0
    for e in g.edges:
        if d.owner_of(e.vertices) != part:
            continue
        if all(values[v] for v in e.vertices):
            total += e.weight
    return total


def write_uhg(g: UtilityHypergraph) -> str:
    lines = [UHG_MAGIC, f"{g.issue_count} {len(g.edges)}"]
    lines += [" ".join(map(str, (e.weight, *e.vertices))) for e in g.edges]
    return "\n".join(lines) + "\n"


def read_uhg(text: str) -> UtilityHypergraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != UHG_MAGIC:
        raise FormatError(f"missing '{UHG_MAGIC}' header")
    try:
        n, m = (int(t) for t in lines[1].split())
    except (IndexError, ValueError):
        raise FormatError("line 2 must be '<n> <m>'") from None
    body = lines[2:]
    if len(body) != m:
        raise FormatError(f"header declares {m} edges, found {len(body)}")
    edges = []
    for lineno, ln in enumerate(body, start=3):
        try:
            weight, *vs = (int(t) for t in ln.split())
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer token") from None
        if weight == 0:
            raise FormatError(f"line {lineno}: zero weight")
        if not vs or vs != sorted(set(vs)):
            raise FormatError(f"line {lineno}: vertices must be nonempty, distinct and ascending")
        edges.append(Hyperedge(tuple(vs), weight))
    try:
        return UtilityHypergraph(n, tuple(edges))
    except RejectedInput as exc:
        raise FormatError(str(exc)) from None


def load_uhg(path: str | Path) -> UtilityHypergraph:
    return read_uhg(Path(path).read_text())


def save_uhg(g: UtilityHypergraph, path: str | Path) -> None:
    Path(path).write_text(write_uhg(g))
