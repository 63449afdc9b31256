"""Directed graphs of square matrices: cycles, topological order, reachability.

Orientation convention: an entry ``a[i, j] != 0`` with ``i != j`` gives the
edge ``j -> i``. All routines visit nodes in ascending index order so that
witnesses are deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .errors import CycleError, ShapeError
from .qualcore import MixedMatrix, QualMatrix


@dataclass(frozen=True)
class Digraph:
    node_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        for a, b in self.edges:
            if not (0 <= a < self.node_count and 0 <= b < self.node_count):
                raise ValueError(f"edge {(a, b)} out of range")
            if a == b:
                raise ValueError(f"self-loop at {a}")

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Digraph":
        return cls(node_count, frozenset((int(a), int(b)) for a, b in edges))

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> "Digraph":
        """Graph with edge ``a -> b`` wherever ``adj[a, b]`` is true (diagonal ignored)."""
        adj = np.asarray(adj, dtype=bool).copy()
        np.fill_diagonal(adj, False)
        return cls(adj.shape[0], frozenset((int(a), int(b)) for a, b in zip(*np.nonzero(adj))))

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.node_count, self.node_count), dtype=bool)
        for a, b in self.edges:
            adj[a, b] = True
        return adj

    def successors(self) -> list[list[int]]:
        succ: list[list[int]] = [[] for _ in range(self.node_count)]
        for a, b in sorted(self.edges):
            succ[a].append(b)
        return succ

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.edges

    def to_dot(self, name: str = "D", labels: Optional[list[str]] = None) -> str:
        labels = labels or [str(i) for i in range(self.node_count)]
        lines = [f"digraph {name} {{"]
        lines += [f"  {labels[i]};" for i in range(self.node_count)]
        lines += sorted(f"  {labels[a]} -> {labels[b]};" for a, b in self.edges)
        lines.append("}")
        return "\n".join(lines) + "\n"


def digraph_of(A: Union[QualMatrix, MixedMatrix, np.ndarray]) -> Digraph:
    """D_A: edge ``(j, i)`` for every nonzero off-diagonal entry ``a[i, j]``.

    Indefinite sign entries count as nonzero.
    """
    if isinstance(A, QualMatrix):
        mask = A.nonzero_mask()
    elif isinstance(A, MixedMatrix):
        mask = A.nonzero_mask()
    else:
        mask = np.asarray(A) != 0
    if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {mask.shape}")
    return Digraph.from_adjacency(mask.T)


def validate_cycle(G: Digraph, cycle: list[int]) -> bool:
    if len(cycle) < 3 or cycle[0] != cycle[-1] or len(set(cycle[:-1])) != len(cycle) - 1:
        return False
    return all(G.has_edge(a, b) for a, b in zip(cycle, cycle[1:]))


def find_cycle(G: Digraph) -> Optional[list[int]]:
    """Iterative DFS; returns ``[v0, ..., vk, v0]`` for the first back edge found, else None."""
    succ = G.successors()
    WHITE, GREY, BLACK = 0, 1, 2
    color = [WHITE] * G.node_count
    for root in range(G.node_count):
        if color[root] != WHITE:
            continue
        path = [root]
        cursor = [0]
        color[root] = GREY
        while path:
            u = path[-1]
            if cursor[-1] < len(succ[u]):
                w = succ[u][cursor[-1]]
                cursor[-1] += 1
                if color[w] == GREY:
                    return path[path.index(w):] + [w]
                if color[w] == WHITE:
                    color[w] = GREY
                    path.append(w)
                    cursor.append(0)
            else:
                color[u] = BLACK
                path.pop()
                cursor.pop()
    return None


def topo_permutation(G: Digraph) -> np.ndarray:
    """Order nodes so that every edge goes from a higher to a lower position.

    ``perm[k]`` is the original index placed at position ``k``; with the
    convention of :func:`digraph_of`, ``A[np.ix_(perm, perm)]`` is upper
    triangular. Positions are filled from the front by repeatedly taking the
    smallest-index node with no remaining outgoing edges.
    """
    n = G.node_count
    outdeg = [0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    for a, b in G.edges:
        outdeg[a] += 1
        preds[b].append(a)
    ready = [v for v in range(n) if outdeg[v] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for a in preds[v]:
            outdeg[a] -= 1
            if outdeg[a] == 0:
                heapq.heappush(ready, a)
    if len(order) != n:
        cycle = find_cycle(G)
        raise CycleError(cycle or [])
    return np.array(order, dtype=np.int64)


def reachability(G: Digraph) -> np.ndarray:
    """``R[j, i]`` true iff a path of length >= 1 leads from ``j`` to ``i``."""
    n = G.node_count
    succ = G.successors()
    R = np.zeros((n, n), dtype=bool)
    for s in range(n):
        stack = list(succ[s])
        seen = R[s]
        while stack:
            u = stack.pop()
            if seen[u]:
                continue
            seen[u] = True
            stack.extend(w for w in succ[u] if not seen[w])
    return R


def is_strongly_connected(G: Digraph) -> bool:
    if G.node_count <= 1:
        return True
    R = reachability(G)
    off = ~np.eye(G.node_count, dtype=bool)
    return bool(R[off].all())


def bipartite_digraph(M1: QualMatrix, M2: QualMatrix) -> Digraph:
    """Graph of the block pattern ``[[0, M1], [M2, 0]]``.

    Nodes ``0..n-1`` form the first part (labelled ``s``), nodes ``n..2n-1``
    the second (labelled ``p``).
    """
    if not (M1.is_square() and M2.is_square() and M1.shape == M2.shape):
        raise ShapeError(f"expected two square patterns of equal size, got {M1.shape} and {M2.shape}")
    n = M1.rows
    S = np.zeros((2 * n, 2 * n), dtype=bool)
    S[:n, n:] = M1.nonzero_mask()
    S[n:, :n] = M2.nonzero_mask()
    return digraph_of(S)


def bipartite_labels(n: int) -> list[str]:
    return [f"s{i}" for i in range(n)] + [f"p{i}" for i in range(n)]


def bipartite_cycle_free(M1: QualMatrix, M2: QualMatrix) -> tuple[bool, Optional[list[int]]]:
    cycle = find_cycle(bipartite_digraph(M1, M2))
    return cycle is None, cycle
