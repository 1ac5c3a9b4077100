"""Balanced vertex-separator decompositions of utility hypergraphs.

A decomposition splits the issues into a cut set plus ``k`` partitions of
*free* vertices such that, once the cut set is removed, no hyperedge touches
two partitions.  Search cost is exponential in the cut-set size and in the
largest partition, so the partitioner tries to keep the cut small while the
free partitions stay within ``ceil(epsilon * n)`` of each other.

The partitioner is multilevel recursive bisection: heavy-edge coarsening,
greedy graph growing, Fiduccia-Mattheyses refinement on the way back up, and a
greedy vertex cover that turns the cut edges of each bisection into separator
vertices.  A final pass releases redundant separator vertices and repairs
balance.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Protocol

from utilgraph.errors import FormatError, RejectedInput
from utilgraph.rng import SplitMix64, derive_seed

DEFAULT_EPSILON = 0.05
COARSEST_SIZE = 40


class HasStructure(Protocol):
    issue_count: int

    @property
    def vertex_sets(self) -> tuple[tuple[int, ...], ...]: ...


def balance_tolerance(epsilon: float, n: int) -> int:
    """``ceil(epsilon * n)``, computed on the decimal value of ``epsilon``."""
    return math.ceil(Fraction(str(epsilon)) * n)


@dataclass(frozen=True)
class Decomposition:
    issue_count: int
    cut_set: tuple[int, ...]
    parts: tuple[tuple[int, ...], ...]
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        object.__setattr__(self, "cut_set", tuple(sorted(self.cut_set)))
        object.__setattr__(self, "parts", tuple(tuple(sorted(p)) for p in self.parts))
        if not self.parts:
            raise RejectedInput("a decomposition needs at least one partition")
        if not 0 < self.epsilon < 1:
            raise RejectedInput(f"epsilon must lie in (0, 1), got {self.epsilon}")
        seen: list[int] = list(self.cut_set)
        for p in self.parts:
            seen.extend(p)
        if sorted(seen) != list(range(1, self.issue_count + 1)):
            raise RejectedInput(
                "every vertex 1..n must appear exactly once, in the cut set or in one partition"
            )

    @property
    def k(self) -> int:
        return len(self.parts)

    @cached_property
    def partition_of(self) -> dict[int, int]:
        return {v: i for i, p in enumerate(self.parts, start=1) for v in p}

    @property
    def free_sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    @property
    def max_free(self) -> int:
        return max(self.free_sizes)

    @property
    def tolerance(self) -> int:
        return balance_tolerance(self.epsilon, self.issue_count)

    def owner_of(self, vertices: Sequence[int]) -> int:
        """Partition owning an edge: the one holding its free vertices, else 1.

        Edges made only of cut vertices are constant inside every partition
        search and are charged to partition 1.  Assumes the decomposition is
        valid for the edge.
        """
        where = self.partition_of
        for v in vertices:
            if v in where:
                return where[v]
        return 1

    def ownership(self, g: HasStructure) -> dict[tuple[int, ...], int]:
        return {vs: self.owner_of(vs) for vs in g.vertex_sets}


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    kind: str | None = None
    message: str = "ok"
    edge: tuple[int, ...] | None = None
    parts: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate(g: HasStructure, d: Decomposition, check_balance: bool = True) -> ValidationReport:
    """Check separation (no edge spans two partitions) and free-size balance."""
    if g.issue_count != d.issue_count:
        return ValidationReport(
            False, "validity", f"graph has {g.issue_count} issues, decomposition {d.issue_count}"
        )
    where = d.partition_of
    for vs in g.vertex_sets:
        owners = sorted({where[v] for v in vs if v in where})
        if len(owners) > 1:
            return ValidationReport(
                False,
                "validity",
                f"edge {vs} spans partitions {owners[0]} and {owners[1]} outside the cut set",
                edge=vs,
                parts=(owners[0], owners[1]),
            )
    if check_balance:
        sizes = d.free_sizes
        hi = max(range(d.k), key=lambda i: (sizes[i], -i))
        lo = min(range(d.k), key=lambda i: (sizes[i], i))
        if sizes[hi] - sizes[lo] > d.tolerance:
            return ValidationReport(
                False,
                "balance",
                f"partitions {hi + 1} and {lo + 1} hold {sizes[hi]} and {sizes[lo]} free vertices;"
                f" tolerance is {d.tolerance}",
                parts=(hi + 1, lo + 1),
            )
    return ValidationReport(True)


@dataclass(frozen=True)
class CostEstimate:
    exact: int
    upper_bound: int

    @property
    def log2_exact(self) -> float:
        return math.log2(self.exact)

    @property
    def log2_upper_bound(self) -> float:
        return math.log2(self.upper_bound)


def cost_estimate(d: Decomposition) -> CostEstimate:
    """Evaluation count of the decomposed search, and its balanced upper bound.

    ``exact = 2^|cut| * sum_i 2^|free_i|`` and
    ``upper_bound = 2^|cut| * k * 2^max_i |free_i|``, as exact integers.
    """
    return cost_from_sizes(len(d.cut_set), d.free_sizes)


def cost_from_sizes(cut_size: int, free_sizes: Sequence[int]) -> CostEstimate:
    exact = sum(1 << s for s in free_sizes) << cut_size
    upper = (len(free_sizes) << max(free_sizes)) << cut_size
    return CostEstimate(exact, upper)


# --------------------------------------------------------------------------
# partitioner


class _Structure:
    """Incidence lists for the arity >= 2 edges of a hypergraph."""

    def __init__(self, g: HasStructure) -> None:
        self.n = g.issue_count
        self.edges = [vs for vs in g.vertex_sets if len(vs) > 1]
        self.incident: list[list[int]] = [[] for _ in range(self.n + 1)]
        for eid, vs in enumerate(self.edges):
            for v in vs:
                self.incident[v].append(eid)

    def projected(self, members: set[int]) -> list[tuple[int, ...]]:
        """Edges restricted to ``members``, keeping those with >= 2 vertices left."""
        eids = sorted({e for v in members for e in self.incident[v]})
        out = []
        for e in eids:
            vs = tuple(u for u in self.edges[e] if u in members)
            if len(vs) > 1:
                out.append(vs)
        return out


def _components(vertices: Sequence[int], edges: list[tuple[int, ...]]) -> list[list[int]]:
    parent = {v: v for v in vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for vs in edges:
        r0 = find(vs[0])
        for u in vs[1:]:
            r = find(u)
            if r != r0:
                parent[r] = r0
    groups: dict[int, list[int]] = {}
    for v in vertices:
        groups.setdefault(find(v), []).append(v)
    comps = [sorted(c) for c in groups.values()]
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


@dataclass
class _Level:
    vw: list[int]
    adj: list[dict[int, int]]
    # fine vertex -> coarse vertex of the next level
    cmap: list[int] = field(default_factory=list)


def _clique_graph(n: int, edges: list[tuple[int, ...]]) -> _Level:
    adj: list[dict[int, int]] = [dict() for _ in range(n)]
    for vs in edges:
        for i, a in enumerate(vs):
            for b in vs[i + 1 :]:
                adj[a][b] = adj[a].get(b, 0) + 1
                adj[b][a] = adj[b].get(a, 0) + 1
    return _Level([1] * n, adj)


def _coarsen(level: _Level, rng: SplitMix64, cap: int) -> _Level:
    n = len(level.vw)
    vw, adj = level.vw, level.adj
    match = [-1] * n
    order = list(range(n))
    rng.shuffle(order)
    for v in order:
        if match[v] >= 0:
            continue
        best, best_key = -1, None
        for u, w in adj[v].items():
            if match[u] >= 0 or vw[u] + vw[v] > cap:
                continue
            key = (-w, vw[u], u)
            if best_key is None or key < best_key:
                best, best_key = u, key
        if best >= 0:
            match[v], match[best] = best, v
    # pair up unmatched leaves hanging off the same hub (stars never shrink otherwise)
    by_hub: dict[int, int] = {}
    for v in order:
        if match[v] >= 0 or len(adj[v]) != 1:
            continue
        (hub,) = adj[v]
        other = by_hub.pop(hub, -1)
        if other >= 0 and vw[other] + vw[v] <= cap:
            match[v], match[other] = other, v
        else:
            by_hub[hub] = v
    cmap = [-1] * n
    nc = 0
    for v in range(n):
        if cmap[v] >= 0:
            continue
        cmap[v] = nc
        if match[v] >= 0:
            cmap[match[v]] = nc
        nc += 1
    cvw = [0] * nc
    cadj: list[dict[int, int]] = [dict() for _ in range(nc)]
    for v in range(n):
        c = cmap[v]
        cvw[c] += vw[v]
        row = cadj[c]
        for u, w in adj[v].items():
            cu = cmap[u]
            if cu != c:
                row[cu] = row.get(cu, 0) + w
    level.cmap = cmap
    return _Level(cvw, cadj)


def _cut_weight(level: _Level, side: list[int]) -> int:
    return sum(w for v, row in enumerate(level.adj) for u, w in row.items() if side[u] != side[v]) // 2


def _grow(level: _Level, start: int, target: int, rng: SplitMix64) -> list[int]:
    """Greedy graph growing: side 0 absorbs the best-gain frontier vertex until ``target``."""
    n = len(level.vw)
    side = [1] * n
    gain = [0] * n
    heap: list[tuple[int, int, int]] = []
    weight = 0
    unvisited = list(range(n))
    rng.shuffle(unvisited)
    nxt = start
    while weight < target:
        if nxt < 0:
            while heap and side[heap[0][2]] == 0:
                heapq.heappop(heap)
            if heap:
                _, _, nxt = heapq.heappop(heap)
            else:
                while unvisited and side[unvisited[-1]] == 0:
                    unvisited.pop()
                if not unvisited:
                    break
                nxt = unvisited.pop()
        v, nxt = nxt, -1
        if side[v] == 0:
            continue
        if weight + level.vw[v] > target and weight > 0 and weight + level.vw[v] - target > target - weight:
            continue
        side[v] = 0
        weight += level.vw[v]
        for u, w in level.adj[v].items():
            if side[u] == 1:
                gain[u] += w
                heapq.heappush(heap, (-gain[u], u, u))
    return side


def _fm(level: _Level, side: list[int], lo: int, hi: int, passes: int = 8) -> list[int]:
    """Fiduccia-Mattheyses refinement keeping ``lo <= weight(side 0) <= hi``."""
    n = len(level.vw)
    vw, adj = level.vw, level.adj
    side = list(side)
    w0 = sum(vw[v] for v in range(n) if side[v] == 0)
    mid = (lo + hi) / 2
    for _ in range(passes):
        gain = [0] * n
        for v in range(n):
            s = side[v]
            gain[v] = sum(w if side[u] != s else -w for u, w in adj[v].items())
        heaps: list[list[tuple[int, int]]] = [[], []]
        for v in range(n):
            heaps[side[v]].append((-gain[v], v))
        heapq.heapify(heaps[0])
        heapq.heapify(heaps[1])
        locked = [False] * n
        moves: list[int] = []
        cut = 0
        feasible = lo <= w0 <= hi
        best = (0 if feasible else 1, 0, abs(w0 - mid))
        best_len = 0
        stall = 0
        limit = 25 + n // 10
        while stall < limit:
            cands = []
            for s in (0, 1):
                h = heaps[s]
                while h and (locked[h[0][1]] or -h[0][0] != gain[h[0][1]] or side[h[0][1]] != s):
                    heapq.heappop(h)
                if h:
                    v = h[0][1]
                    nw0 = w0 - vw[v] if s == 0 else w0 + vw[v]
                    ok = lo <= nw0 <= hi or abs(nw0 - mid) < abs(w0 - mid)
                    if ok:
                        cands.append((-gain[v], abs(nw0 - mid), v))
            if not cands:
                break
            _, _, v = min(cands)
            s = side[v]
            heapq.heappop(heaps[s])
            locked[v] = True
            cut -= gain[v]
            w0 += vw[v] if s == 1 else -vw[v]
            side[v] = 1 - s
            moves.append(v)
            for u, w in adj[v].items():
                if locked[u]:
                    continue
                gain[u] += 2 * w if side[u] == s else -2 * w
                heapq.heappush(heaps[side[u]], (-gain[u], u))
            state = (0 if lo <= w0 <= hi else 1, cut, abs(w0 - mid))
            if state < best:
                best, best_len, stall = state, len(moves), 0
            else:
                stall += 1
        for v in reversed(moves[best_len:]):
            w0 += vw[v] if side[v] == 1 else -vw[v]
            side[v] = 1 - side[v]
        if best_len == 0:
            break
    return side


def _bisect_graph(level0: _Level, target: int, tol: int, rng: SplitMix64) -> list[int]:
    """Multilevel bisection; returns side (0/1) per vertex, side 0 weighing ~``target``."""
    total = sum(level0.vw)
    cap = max(2, total // 20)
    levels = [level0]
    while len(levels[-1].vw) > COARSEST_SIZE:
        coarse = _coarsen(levels[-1], rng, cap)
        if len(coarse.vw) > 0.95 * len(levels[-1].vw):
            levels[-1].cmap = []
            break
        levels.append(coarse)
    top = levels[-1]
    nt = len(top.vw)
    slack = max(tol, max(top.vw))
    lo, hi = target - slack, target + slack
    trials = 8 if nt <= 200 else 4
    best_side, best_key = None, None
    for _ in range(trials):
        side = _grow(top, rng.below(nt), target, rng)
        side = _fm(top, side, lo, hi)
        w0 = sum(top.vw[v] for v in range(nt) if side[v] == 0)
        key = (_cut_weight(top, side), abs(w0 - target))
        if best_key is None or key < best_key:
            best_side, best_key = side, key
    side = best_side
    lo, hi = target - tol, target + tol
    for fine in reversed(levels[:-1]):
        side = [side[c] for c in fine.cmap]
        side = _fm(fine, side, lo, hi)
    return side


def _cover(edges: list[tuple[int, ...]], side: dict[int, int]) -> set[int]:
    """Greedy vertex cover turning an edge cut into a vertex separator.

    Repeatedly takes the vertex lying on the most still-crossing edges (lowest
    index on ties), then drops separator vertices that turn out redundant.
    """
    sep: set[int] = set()

    def crossing(vs: tuple[int, ...]) -> bool:
        sides = {side[u] for u in vs if u not in sep}
        return len(sides) > 1

    live = [vs for vs in edges if crossing(vs)]
    by_vertex: dict[int, list[int]] = {}
    for i, vs in enumerate(live):
        for u in vs:
            by_vertex.setdefault(u, []).append(i)
    alive = [True] * len(live)
    count = {u: len(ids) for u, ids in by_vertex.items()}
    while True:
        best = None
        for u, c in count.items():
            if c > 0 and (best is None or c > count[best] or (c == count[best] and u < best)):
                best = u
        if best is None:
            break
        sep.add(best)
        count[best] = 0
        for i in by_vertex[best]:
            if alive[i] and not crossing(live[i]):
                alive[i] = False
                for u in live[i]:
                    if u not in sep:
                        count[u] -= 1
    for v in sorted(sep):
        sep.discard(v)
        if any(crossing(live[i]) for i in by_vertex[v]):
            sep.add(v)
    return sep


class _Partitioner:
    def __init__(self, g: HasStructure, k: int, epsilon: float, seed: int) -> None:
        self.s = _Structure(g)
        self.n = g.issue_count
        self.k = k
        self.epsilon = epsilon
        self.tol = balance_tolerance(epsilon, self.n)
        self.levels = max(1, math.ceil(math.log2(k)))
        self.rng = SplitMix64(seed)
        self.cut: set[int] = set()

    def run(self) -> Decomposition:
        parts = self._split(list(range(1, self.n + 1)), self.k)
        parts = self._polish(parts)
        parts.sort(key=lambda p: (not p, min(p) if p else 0))
        return Decomposition(self.n, tuple(self.cut), tuple(tuple(p) for p in parts), self.epsilon)

    def _split(self, vertices: list[int], k: int) -> list[list[int]]:
        if k == 1:
            return [vertices]
        if not vertices:
            return [[] for _ in range(k)]
        k1 = k // 2
        a, b = self._bisect(vertices, k1 / k, min(k1, k - k1))
        return self._split(a, k1) + self._split(b, k - k1)

    def _bisect(self, vertices: list[int], frac: float, kmin: int) -> tuple[list[int], list[int]]:
        members = set(vertices)
        edges = self.s.projected(members)
        total = len(vertices)
        target = round(total * frac)
        tol = max(1, (kmin * self.tol) // (2 * self.levels))
        comps = _components(vertices, edges)
        side_a: list[int] = []
        pending: list[list[int]] = []
        for comp in comps:
            if len(side_a) + len(comp) <= target + tol:
                side_a.extend(comp)
            else:
                pending.append(comp)
        if len(side_a) >= target - tol or not pending:
            rest = [v for c in pending for v in c]
            return sorted(side_a), sorted(rest)
        # split the largest leftover component to make up the difference
        big, others = pending[0], pending[1:]
        need = target - len(side_a)
        local = {v: i for i, v in enumerate(big)}
        big_set = set(big)
        big_edges = [vs for vs in edges if vs[0] in big_set]
        level = _clique_graph(len(big), [tuple(local[u] for u in vs) for vs in big_edges])
        side_local = _bisect_graph(level, need, tol, self.rng)
        side = {v: side_local[local[v]] for v in big}
        sep = _cover(big_edges, side)
        self.cut |= sep
        side_a.extend(v for v in big if side[v] == 0 and v not in sep)
        rest = [v for v in big if side[v] == 1 and v not in sep]
        rest.extend(v for c in others for v in c)
        return sorted(side_a), sorted(rest)

    # ---- post-processing on the final k-way assignment

    def _neighbor_parts(self, v: int, where: dict[int, int]) -> set[int]:
        out = set()
        for e in self.s.incident[v]:
            for u in self.s.edges[e]:
                if u != v and u in where:
                    out.add(where[u])
        return out

    def _refine(self, where: dict[int, int], sizes: list[int], passes: int = 10) -> None:
        """Vertex-separator FM over the k-way assignment.

        A move pulls a cut vertex into a partition and pushes its free
        neighbours from other partitions into the cut.  Each pass applies the
        best available move repeatedly (uphill moves allowed), then rolls back
        to the smallest cut seen.  Balance is kept within tolerance throughout.
        """
        tol, k = self.tol, self.k
        incident, edges = self.s.incident, self.s.edges

        def neighbours(v: int) -> set[int]:
            return {u for e in incident[v] for u in edges[e] if u != v and u in where}

        for _ in range(passes):
            locked: set[int] = set()
            log: list[tuple[int, int, list[tuple[int, int]]]] = []
            cut_size = start = len(self.cut)
            best, best_len = start, 0
            stall = 0
            limit = 20 + len(self.cut)
            while stall < limit:
                best_move = None
                lo_part = min(range(k), key=lambda i: (sizes[i], i))
                for v in sorted(self.cut):
                    if v in locked:
                        continue
                    nb = neighbours(v)
                    targets = {where[u] for u in nb} or {lo_part}
                    for p in sorted(targets):
                        pushed = [u for u in nb if where[u] != p]
                        if any(u in locked for u in pushed):
                            continue
                        delta = len(pushed) - 1
                        change = {p: 1}
                        for u in pushed:
                            change[where[u]] = change.get(where[u], 0) - 1
                        new = [sizes[i] + change.get(i, 0) for i in range(k)]
                        spread = max(new) - min(new)
                        if spread > tol:
                            continue
                        key = (delta, spread, v, p)
                        if best_move is None or key < best_move[0]:
                            best_move = (key, v, p, pushed)
                if best_move is None:
                    break
                _, v, p, pushed = best_move
                undo = []
                for u in sorted(pushed):
                    undo.append((u, where[u]))
                    sizes[where[u]] -= 1
                    del where[u]
                    self.cut.add(u)
                self.cut.discard(v)
                where[v] = p
                sizes[p] += 1
                locked.add(v)
                log.append((v, p, undo))
                cut_size = len(self.cut)
                if cut_size < best:
                    best, best_len, stall = cut_size, len(log), 0
                else:
                    stall += 1
            for v, p, undo in reversed(log[best_len:]):
                del where[v]
                sizes[p] -= 1
                self.cut.add(v)
                for u, q in undo:
                    self.cut.discard(u)
                    where[u] = q
                    sizes[q] += 1
            if best >= start:
                break

    def _polish(self, parts: list[list[int]]) -> list[list[int]]:
        where = {v: i for i, p in enumerate(parts) for v in p}
        sizes = [len(p) for p in parts]
        k, tol = self.k, self.tol

        def spread_after(changes: dict[int, int]) -> int:
            new = [sizes[i] + changes.get(i, 0) for i in range(k)]
            return max(new) - min(new)

        def smallest() -> int:
            return min(range(k), key=lambda i: (sizes[i], i))

        def largest() -> int:
            return max(range(k), key=lambda i: (sizes[i], -i))

        def release_pass() -> None:
            changed = True
            while changed:
                changed = False
                for v in sorted(self.cut):
                    nb = self._neighbor_parts(v, where)
                    if len(nb) > 1:
                        continue
                    p = next(iter(nb)) if nb else smallest()
                    spread = max(sizes) - min(sizes)
                    after = spread_after({p: 1})
                    if after <= tol or after <= spread:
                        self.cut.discard(v)
                        where[v] = p
                        sizes[p] += 1
                        changed = True

        release_pass()
        guard = 4 * self.n + 10
        while max(sizes) - min(sizes) > tol and guard > 0:
            guard -= 1
            big, small = largest(), smallest()
            # cheapest first: a cut vertex that can join the small part
            moved = False
            for v in sorted(self.cut):
                if self._neighbor_parts(v, where) <= {small}:
                    self.cut.discard(v)
                    where[v] = small
                    sizes[small] += 1
                    moved = True
                    break
            if moved:
                continue
            members = sorted(v for v, p in where.items() if p == big)
            # a big-part vertex whose neighbours are all cut can change parts for free
            free_move = next((v for v in members if not self._neighbor_parts(v, where)), None)
            if free_move is not None:
                where[free_move] = small
                sizes[big] -= 1
                sizes[small] += 1
                continue
            # otherwise push the big-part vertex with the fewest free neighbours into the cut
            def free_nbrs(v: int) -> int:
                return sum(1 for e in self.s.incident[v] for u in self.s.edges[e] if u != v and u in where)

            v = min(members, key=lambda u: (free_nbrs(u), u))
            del where[v]
            self.cut.add(v)
            sizes[big] -= 1
        release_pass()
        if max(sizes) - min(sizes) <= tol:
            self._refine(where, sizes)
            release_pass()
        out: list[list[int]] = [[] for _ in range(k)]
        for v, p in where.items():
            out[p].append(v)
        return [sorted(p) for p in out]


def default_restarts(n: int) -> int:
    if n <= 1000:
        return 8
    return 2 if n <= 5000 else 1


def partition_balanced(
    g: HasStructure,
    k: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    restarts: int | None = None,
) -> Decomposition:
    """Split ``g`` into a cut set and ``k`` balanced partitions of free vertices.

    Runs ``restarts`` independent multilevel attempts (streams derived from
    ``seed``, ``k`` and the attempt number) and keeps the smallest cut set,
    breaking ties on the search cost.
    """
    n = g.issue_count
    if not 1 <= k <= n:
        raise RejectedInput(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0 < epsilon < 1:
        raise RejectedInput(f"epsilon must lie in (0, 1), got {epsilon}")
    if k == 1:
        return Decomposition(n, (), (tuple(range(1, n + 1)),), epsilon)
    if restarts is None:
        restarts = default_restarts(n)
    best, best_key = None, None
    for attempt in range(max(1, restarts)):
        d = _Partitioner(g, k, epsilon, derive_seed(seed, k, attempt)).run()
        key = (len(d.cut_set), cost_estimate(d).exact)
        if best_key is None or key < best_key:
            best, best_key = d, key
    return best


@dataclass(frozen=True)
class SweepRow:
    k: int
    cut_size: int
    max_free: int
    cost: CostEstimate


def sweep_partitions(
    g: HasStructure, k_values: Sequence[int], epsilon: float = DEFAULT_EPSILON, seed: int = 0
) -> list[SweepRow]:
    rows = []
    for k in k_values:
        d = partition_balanced(g, k, epsilon, seed)
        rows.append(SweepRow(k, len(d.cut_set), d.max_free, cost_estimate(d)))
    return rows


def merge_partitions(g: HasStructure, d: Decomposition, i: int, j: int) -> Decomposition:
    """Fold partition ``j`` into ``i`` and pull in cut vertices that no longer separate anything."""
    if i == j or not (1 <= i <= d.k and 1 <= j <= d.k):
        raise RejectedInput(f"cannot merge partitions {i} and {j} of {d.k}")
    parts = [list(p) for p in d.parts]
    parts[i - 1].extend(parts[j - 1])
    del parts[j - 1]
    target = i - 1 if i < j else i - 2
    cut = set(d.cut_set)
    s = _Structure(g)
    where = {v: idx for idx, p in enumerate(parts) for v in p}
    for v in sorted(d.cut_set):
        nb = {where[u] for e in s.incident[v] for u in s.edges[e] if u != v and u in where}
        if nb == {target}:
            cut.discard(v)
            where[v] = target
            parts[target].append(v)
    return Decomposition(d.issue_count, tuple(cut), tuple(tuple(p) for p in parts), d.epsilon)


def write_decomposition(d: Decomposition) -> str:
    lines = [f"# n={d.issue_count} k={d.k} epsilon={d.epsilon}", "CUT " + " ".join(map(str, d.cut_set))]
    for i, p in enumerate(d.parts, start=1):
        lines.append(f"PART {i}: " + " ".join(map(str, p)))
    return "\n".join(ln.rstrip() for ln in lines) + "\n"


def read_decomposition(text: str, epsilon: float | None = None) -> Decomposition:
    cut: list[int] | None = None
    parts: dict[int, list[int]] = {}
    eps = DEFAULT_EPSILON
    try:
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("epsilon="):
                        eps = float(tok.split("=", 1)[1])
                continue
            if line == "CUT" or line.startswith("CUT "):
                if cut is not None:
                    raise FormatError("more than one CUT line")
                cut = [int(t) for t in line[3:].split()]
            elif line.startswith("PART "):
                head, _, body = line[5:].partition(":")
                idx = int(head)
                if idx in parts:
                    raise FormatError(f"partition {idx} listed twice")
                parts[idx] = [int(t) for t in body.split()]
            else:
                raise FormatError(f"unrecognised line: {line!r}")
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"non-integer token: {exc}") from None
    if cut is None:
        raise FormatError("missing CUT line")
    if sorted(parts) != list(range(1, len(parts) + 1)) or not parts:
        raise FormatError("partitions must be numbered 1..k")
    n = len(cut) + sum(len(p) for p in parts.values())
    try:
        return Decomposition(
            n, tuple(cut), tuple(tuple(parts[i]) for i in sorted(parts)), eps if epsilon is None else epsilon
        )
    except RejectedInput as exc:
        raise FormatError(str(exc)) from None


def load_decomposition(path: str | Path) -> Decomposition:
    return read_decomposition(Path(path).read_text())


def save_decomposition(d: Decomposition, path: str | Path) -> None:
    Path(path).write_text(write_decomposition(d))
