import math
import random
from fractions import Fraction

import pytest

from conftest import chain, oracle_optimum, random_decomposition, random_graph
from utilgraph.errors import CapExceeded, RejectedInput
from utilgraph.hypergraph import Hyperedge, UtilityHypergraph
from utilgraph.optimizer import bit_matrix, brute_force, decomposed_search, log2_speedup, speedup
from utilgraph.separator import Decomposition, cost_estimate, cost_from_sizes, merge_partitions, partition_balanced


def test_example_brute_force(merged_example):
    r = brute_force(merged_example)
    assert r.optimum == (0, 1, 1, 1) and r.optimum_value == 7
    assert r.eval_calls == 16


def test_example_decomposed(merged_example):
    d = Decomposition(4, (2,), ((1,), (3, 4)), 0.25)
    r = decomposed_search(merged_example, d)
    assert r.optimum == (0, 1, 1, 1) and r.optimum_value == 7
    assert r.eval_calls == r.eq3_cost == 2 * (2 + 4)


def test_empty_graph_ties_to_all_zero():
    r = brute_force(UtilityHypergraph.empty(3))
    assert (r.optimum, r.optimum_value, r.eval_calls) == ((0, 0, 0), 0, 8)


def test_negative_edge_never_taken():
    r = brute_force(UtilityHypergraph(2, (Hyperedge((1, 2), -5),)))
    assert r.optimum == (0, 0) and r.optimum_value == 0


def test_brute_force_cap():
    with pytest.raises(CapExceeded):
        brute_force(UtilityHypergraph.empty(27))
    assert brute_force(UtilityHypergraph.empty(5), cap=5).eval_calls == 32


def test_chain_eval_count():
    g = chain(8)
    d = Decomposition(8, (4,), ((1, 2, 3), (5, 6, 7, 8)), 0.25)
    r = decomposed_search(g, d)
    assert r.eval_calls == 48
    assert r.optimum_value == 7


def test_bit_matrix_is_lexicographic():
    rows = [tuple(r) for r in bit_matrix(8, 3)]
    assert rows == sorted(rows) and rows[5] == (1, 0, 1)
    assert [tuple(r) for r in bit_matrix(2, 3, 6)] == [(1, 1, 0), (1, 1, 1)]


def test_brute_force_matches_independent_oracle():
    rng = random.Random(7)
    for _ in range(40):
        g = random_graph(rng, rng.randint(1, 10), rng.randint(0, 15), 3)
        x, u = oracle_optimum(g)
        r = brute_force(g)
        assert (r.optimum, r.optimum_value) == (x, u)


def test_decomposed_matches_brute_force_on_random_decompositions():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randint(1, 16)
        g = random_graph(rng, n, rng.randint(0, 2 * n), 3)
        d = random_decomposition(rng, g, rng.randint(1, 5))
        r = decomposed_search(g, d)
        b = brute_force(g)
        assert r.optimum_value == b.optimum_value
        assert r.optimum == b.optimum
        assert r.eval_calls == cost_estimate(d).exact


def test_ties_resolve_identically():
    g = UtilityHypergraph(6, (Hyperedge((1, 2), 1), Hyperedge((4, 5), 1), Hyperedge((3,), -1)))
    d = Decomposition(6, (3,), ((1, 2), (4, 5, 6)), 0.5)
    first = decomposed_search(g, d)
    assert first == decomposed_search(g, d)
    assert first.optimum == brute_force(g).optimum == (1, 1, 0, 1, 1, 0)


def test_merging_partitions_keeps_optimum():
    rng = random.Random(5)
    for _ in range(25):
        g = random_graph(rng, 14, 18, 2)
        d = partition_balanced(g, 4, 0.3, rng.randint(0, 50))
        merged = merge_partitions(g, d, 2, 3)
        assert decomposed_search(g, merged).optimum_value == decomposed_search(g, d).optimum_value


def test_invalid_decomposition_rejected():
    g = UtilityHypergraph(2, (Hyperedge((1, 2), 1),))
    with pytest.raises(RejectedInput):
        decomposed_search(g, Decomposition(2, (), ((1,), (2,)), 0.5))


def test_caps_refuse():
    g = UtilityHypergraph.empty(12)
    d = Decomposition(12, (1, 2, 3, 4), (tuple(range(5, 13)),), 0.5)
    with pytest.raises(CapExceeded):
        decomposed_search(g, d, cut_cap=3)
    with pytest.raises(CapExceeded):
        decomposed_search(g, d, free_cap=7)


def test_large_free_partitions_are_chunked():
    # a 22-vertex partition needs several numpy blocks per cut row
    g = UtilityHypergraph(23, tuple(Hyperedge((i, i + 1), (-1) ** i * 3) for i in range(1, 23)))
    d = Decomposition(23, (23,), (tuple(range(1, 23)),), 0.5)
    r = decomposed_search(g, d)
    assert r.eval_calls == 2 * (1 << 22)
    assert r.optimum_value == brute_force(g).optimum_value


def test_speedup_anchors():
    n100 = cost_from_sizes(6, (20,) * 5).exact
    s = speedup(n100, 100)
    assert float(s) == pytest.approx(3.79e21, rel=0.005)
    assert log2_speedup(n100, 100) == pytest.approx(71.68, abs=0.01)
    assert speedup(1 << 10, 10) == 1
    assert speedup(48, 8) == Fraction(256, 48)
    assert float(speedup(48, 8)) == pytest.approx(5.333, abs=1e-3)


def test_speedup_needs_positive_count():
    with pytest.raises(RejectedInput):
        speedup(0, 3)


def test_report_summary_lists_fields(merged_example):
    text = brute_force(merged_example).summary()
    assert "value 7" in text and "outcome 0111" in text
    assert math.isclose(float(text.split("log2_speedup ")[1]), 0.0)
