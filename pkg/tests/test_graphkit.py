from __future__ import annotations

import numpy as np
import pytest

from metzsign.errors import CycleError, ShapeError
from metzsign.graphkit import (
    Digraph,
    bipartite_cycle_free,
    bipartite_digraph,
    bipartite_labels,
    digraph_of,
    find_cycle,
    reachability,
    topo_permutation,
    validate_cycle,
)
from metzsign.qualcore import MixedMatrix, QualMatrix, Sign, unit_sign


def test_digraph_orientation():
    assert digraph_of(QualMatrix.parse("- + ; 0 -")).edges == {(1, 0)}
    assert digraph_of(QualMatrix.parse("- + ; + -")).edges == {(1, 0), (0, 1)}
    assert digraph_of(QualMatrix.parse("- 0 0 ; 0 - 0 ; 0 0 -")).edges == frozenset()


def test_digraph_of_real_mixed_and_indef():
    assert digraph_of(np.array([[-1.0, 0.0], [3.0, -2.0]])).edges == {(0, 1)}
    X = MixedMatrix.of([[Sign.NEG, 2.0], [Sign.ZERO, -1.0]])
    assert digraph_of(X).edges == {(1, 0)}
    assert digraph_of(QualMatrix.parse("- ? ; 0 -")).edges == {(1, 0)}
    with pytest.raises(ShapeError):
        digraph_of(QualMatrix.parse("- +"))


def test_digraph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Digraph.from_edges(2, [(0, 0)])
    with pytest.raises(ValueError):
        Digraph.from_edges(2, [(0, 2)])


def test_find_cycle_examples():
    assert find_cycle(Digraph.from_edges(4, [])) is None
    assert find_cycle(Digraph.from_edges(2, [(0, 1), (1, 0)])) == [0, 1, 0]
    # Sign pattern whose graph contains a cycle through all three nodes.
    A = QualMatrix.parse("- + + ; - - - ; 0 + -")
    G = digraph_of(A)
    assert {(0, 1), (1, 2), (2, 0)} <= G.edges
    assert validate_cycle(G, [0, 1, 2, 0])
    cycle = find_cycle(G)
    assert cycle is not None and validate_cycle(G, cycle)


def test_topo_permutation_examples():
    lower = QualMatrix.parse("- 0 0 ; + - 0 ; + + -")
    perm = topo_permutation(digraph_of(lower))
    assert perm.tolist() == [2, 1, 0]
    T = unit_sign(lower)[np.ix_(perm, perm)]
    assert np.array_equal(T, np.triu(T))
    upper = QualMatrix.parse("- + + ; 0 - + ; 0 0 -")
    assert topo_permutation(digraph_of(upper)).tolist() == [0, 1, 2]
    with pytest.raises(CycleError) as exc:
        topo_permutation(Digraph.from_edges(3, [(0, 1), (1, 2), (2, 0)]))
    assert exc.value.cycle == [0, 1, 2, 0]


def test_reachability_examples():
    R = reachability(Digraph.from_edges(3, [(2, 1), (1, 0)]))
    assert R[2, 0] and R[2, 1] and R[1, 0] and not R[0, 2]
    assert not reachability(Digraph.from_edges(3, [])).any()


def _closure(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    A = adj.astype(np.int64)
    acc = np.zeros_like(A)
    P = A.copy()
    for _ in range(n):
        acc |= P > 0
        P = np.minimum(P @ A, 1)
    return acc.astype(bool)


def _random_graph(rng, n, density):
    adj = rng.random((n, n)) < density
    np.fill_diagonal(adj, False)
    return Digraph.from_adjacency(adj)


def test_three_acyclicity_routes_agree():
    rng = np.random.default_rng(2024)
    for _ in range(1500):
        n = int(rng.integers(1, 13))
        G = _random_graph(rng, n, rng.uniform(0.0, 0.3))
        cycle = find_cycle(G)
        try:
            perm = topo_permutation(G)
            topo_ok = True
        except CycleError:
            topo_ok = False
        R = reachability(G)
        assert (cycle is None) == topo_ok == (not R.diagonal().any())
        if cycle is not None:
            assert validate_cycle(G, cycle)
        else:
            pos = np.empty(n, dtype=int)
            pos[perm] = np.arange(n)
            assert all(pos[a] > pos[b] for a, b in G.edges)


def test_reachability_matches_closure():
    rng = np.random.default_rng(7)
    for _ in range(300):
        n = int(rng.integers(1, 10))
        G = _random_graph(rng, n, rng.uniform(0.05, 0.4))
        assert np.array_equal(reachability(G), _closure(G.adjacency()))


def test_bipartite_examples():
    M = QualMatrix.parse("0 + ; 0 0")
    assert bipartite_cycle_free(M, M)[0]
    Q = QualMatrix.parse("0 + ; + 0")
    ok, cycle = bipartite_cycle_free(Q, Q)
    assert not ok and validate_cycle(bipartite_digraph(Q, Q), cycle)
    assert bipartite_cycle_free(Q, QualMatrix.zeros(2, 2))[0]
    with pytest.raises(ShapeError):
        bipartite_cycle_free(Q, QualMatrix.zeros(3, 3))


def test_bipartite_matches_nilpotency():
    rng = np.random.default_rng(99)
    for _ in range(400):
        n = int(rng.integers(1, 7))
        M1 = QualMatrix((rng.random((n, n)) < 0.3).astype(np.int8))
        M2 = QualMatrix((rng.random((n, n)) < 0.3).astype(np.int8))
        P = unit_sign(M1) @ unit_sign(M2)
        nilpotent = not np.linalg.matrix_power(P, n).any()
        assert bipartite_cycle_free(M1, M2)[0] == nilpotent


def test_dot_output_is_sorted_and_stable():
    G = Digraph.from_edges(3, [(2, 0), (0, 1), (1, 0)])
    text = G.to_dot()
    assert text == "digraph D {\n  0;\n  1;\n  2;\n  0 -> 1;\n  1 -> 0;\n  2 -> 0;\n}\n"
    assert Digraph.from_edges(3, [(1, 0), (2, 0), (0, 1)]).to_dot() == text
    B = bipartite_digraph(QualMatrix.parse("+"), QualMatrix.parse("+"))
    assert B.to_dot("B", bipartite_labels(1)) == "digraph B {\n  s0;\n  p0;\n  p0 -> s0;\n  s0 -> p0;\n}\n"
