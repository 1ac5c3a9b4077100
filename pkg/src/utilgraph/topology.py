"""Seeded generators for random, small-world and scale-free utility graphs.

All generators emit arity-2 edges with uniform signed integer weights drawn
from ``{-W..-1, 1..W}``.  Edge structure and weights come from a single
:class:`~utilgraph.rng.SplitMix64` stream seeded by ``spec.seed``, so a spec
always reproduces the same graph.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from utilgraph.errors import FormatError, RejectedInput
from utilgraph.hypergraph import Hyperedge, Skeleton, UtilityHypergraph
from utilgraph.rng import SplitMix64, derive_seed

KINDS = ("random", "small_world", "scale_free", "gnp")


@dataclass(frozen=True)
class TopologySpec:
    kind: str
    n: int
    m: int = 0
    ring_degree: int = 2
    rewire_prob: float = 0.1
    attach_count: int = 1
    edge_prob: float = 0.0
    weight_max: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        kind = self.kind.replace("-", "_")
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise RejectedInput(f"unknown topology {self.kind!r}; expected one of {KINDS}")
        if self.n < 1:
            raise RejectedInput("n must be positive")
        if self.weight_max < 1:
            raise RejectedInput("weight_max must be >= 1")
        if not 0 <= self.seed < 1 << 64:
            raise RejectedInput("seed must be a 64-bit unsigned integer")


def sample_weight(rng: SplitMix64, weight_max: int) -> int:
    """Uniform draw from ``{-W..-1, 1..W}``."""
    if weight_max < 1:
        raise RejectedInput("weight_max must be >= 1")
    r = rng.below(2 * weight_max)
    return r - weight_max if r < weight_max else r - weight_max + 1


def _weighted(n: int, pairs: list[tuple[int, int]], rng: SplitMix64, weight_max: int) -> UtilityHypergraph:
    edges = []
    for u, v in pairs:
        edges.append(Hyperedge((min(u, v), max(u, v)), sample_weight(rng, weight_max)))
    return UtilityHypergraph(n, tuple(edges))


def gen_random(spec: TopologySpec) -> UtilityHypergraph:
    """Fixed-size random graph: ``m`` distinct uniformly drawn vertex pairs."""
    if spec.kind != "random":
        raise RejectedInput(f"gen_random needs kind 'random', got {spec.kind!r}")
    n, m = spec.n, spec.m
    if m < 0 or m > n * (n - 1) // 2:
        raise RejectedInput(f"cannot place {m} distinct edges on {n} vertices")
    rng = SplitMix64(spec.seed)
    seen: set[tuple[int, int]] = set()
    pairs = []
    while len(pairs) < m:
        u = rng.below(n) + 1
        v = rng.below(n) + 1
        key = (min(u, v), max(u, v))
        if u == v or key in seen:
            continue
        seen.add(key)
        pairs.append(key)
    return _weighted(n, pairs, rng, spec.weight_max)


def gen_gnp(spec: TopologySpec) -> UtilityHypergraph:
    """Erdos-Renyi G(n, p): every pair independently with probability ``edge_prob``."""
    if spec.kind != "gnp":
        raise RejectedInput(f"gen_gnp needs kind 'gnp', got {spec.kind!r}")
    if not 0.0 <= spec.edge_prob <= 1.0:
        raise RejectedInput("edge_prob must lie in [0, 1]")
    rng = SplitMix64(spec.seed)
    pairs = [
        (u, v)
        for u in range(1, spec.n + 1)
        for v in range(u + 1, spec.n + 1)
        if rng.random() < spec.edge_prob
    ]
    return _weighted(spec.n, pairs, rng, spec.weight_max)


def gen_small_world(spec: TopologySpec) -> UtilityHypergraph:
    """Watts-Strogatz: ring lattice, then each edge rewired with ``rewire_prob``.

    Rewiring keeps the lower-ring endpoint and redraws the other uniformly,
    avoiding self-loops and duplicates, so the edge count is preserved.
    """
    if spec.kind != "small_world":
        raise RejectedInput(f"gen_small_world needs kind 'small_world', got {spec.kind!r}")
    n, kd, p = spec.n, spec.ring_degree, spec.rewire_prob
    if kd % 2 or not 2 <= kd < n:
        raise RejectedInput(f"ring_degree must be even with 2 <= ring_degree < n, got {kd}")
    if not 0.0 <= p <= 1.0:
        raise RejectedInput("rewire_prob must lie in [0, 1]")
    rng = SplitMix64(spec.seed)
    lattice = [(u, (u - 1 + j) % n + 1) for j in range(1, kd // 2 + 1) for u in range(1, n + 1)]
    adj: dict[int, set[int]] = {v: set() for v in range(1, n + 1)}
    for u, v in lattice:
        adj[u].add(v)
        adj[v].add(u)
    pairs = []
    for u, v in lattice:
        if rng.random() < p and len(adj[u]) < n - 1:
            while True:
                w = rng.below(n) + 1
                if w != u and w not in adj[u]:
                    break
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
            v = w
        pairs.append((u, v))
    return _weighted(n, pairs, rng, spec.weight_max)


def gen_scale_free(spec: TopologySpec) -> UtilityHypergraph:
    """Barabasi-Albert preferential attachment.

    Vertices ``1..attach_count+1`` form a seed clique; each later vertex adds
    ``attach_count`` edges to distinct earlier vertices chosen with probability
    proportional to their current degree (a repeated draw is redrawn).
    """
    if spec.kind != "scale_free":
        raise RejectedInput(f"gen_scale_free needs kind 'scale_free', got {spec.kind!r}")
    n, a = spec.n, spec.attach_count
    if not 1 <= a < n:
        raise RejectedInput(f"attach_count must satisfy 1 <= attach_count < n, got {a}")
    rng = SplitMix64(spec.seed)
    pairs = [(u, v) for u in range(1, a + 2) for v in range(u + 1, a + 2)]
    # one entry per edge endpoint: uniform picks are degree-proportional
    endpoints = [x for e in pairs for x in e]
    for t in range(a + 2, n + 1):
        chosen: list[int] = []
        while len(chosen) < a:
            target = endpoints[rng.below(len(endpoints))]
            if target not in chosen:
                chosen.append(target)
        for target in chosen:
            pairs.append((target, t))
            endpoints += (target, t)
    return _weighted(n, pairs, rng, spec.weight_max)


GENERATORS = {
    "random": gen_random,
    "small_world": gen_small_world,
    "scale_free": gen_scale_free,
    "gnp": gen_gnp,
}


def generate(spec: TopologySpec) -> UtilityHypergraph:
    return GENERATORS[spec.kind](spec)


def reweight(structure: Skeleton | UtilityHypergraph, seed: int, weight_max: int = 10) -> UtilityHypergraph:
    """Fresh uniform weights on an existing edge structure."""
    rng = SplitMix64(seed)
    return UtilityHypergraph(
        structure.issue_count,
        tuple(Hyperedge(vs, sample_weight(rng, weight_max)) for vs in structure.vertex_sets),
    )


def agent_pair(spec: TopologySpec) -> tuple[UtilityHypergraph, UtilityHypergraph]:
    """Two private utility graphs sharing one generated structure.

    The first agent keeps the generator's weights; the second gets an
    independent draw on the same edges.
    """
    first = generate(spec)
    second = reweight(first, derive_seed(spec.seed, 0xB), spec.weight_max)
    return first, second


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def spec_from_mapping(values: dict[str, str]) -> TopologySpec:
    types = {f.name: f.type for f in fields(TopologySpec)}
    kwargs = {}
    for key, raw in values.items():
        if key not in types:
            raise FormatError(f"unknown topology key {key!r}")
        conv = {"int": int, "float": float, "str": str}[str(types[key])]
        try:
            kwargs[key] = conv(raw)
        except ValueError:
            raise FormatError(f"bad value for {key}: {raw!r}") from None
    if "kind" not in kwargs or "n" not in kwargs:
        raise FormatError("topology config needs at least 'kind' and 'n'")
    return TopologySpec(**kwargs)


def load_spec(path: str | Path, **overrides) -> TopologySpec:
    spec = spec_from_mapping(parse_config(Path(path).read_text()))
    return replace(spec, **overrides) if overrides else spec
