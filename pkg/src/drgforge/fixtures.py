"""Small named graphs used as controls."""

from __future__ import annotations

import itertools

from .graph import Graph


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def grid_graph(n: int, m: int) -> Graph:
    """``K_n x K_m``; vertex ``i*m + j`` sits in row ``i`` and column ``j``."""
    edges = []
    for u, v in itertools.combinations(range(n * m), 2):
        if (u // m == v // m) != (u % m == v % m):
            edges.append((u, v))
    return Graph.from_edges(n * m, edges)


def shrikhande_graph() -> Graph:
    """Cayley graph of Z_4 x Z_4 with connection set +-(1,0), +-(0,1), +-(1,1)."""
    conn = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    edges = []
    for u, v in itertools.combinations(range(16), 2):
        diff = ((u // 4 - v // 4) % 4, (u % 4 - v % 4) % 4)
        if diff in conn:
            edges.append((u, v))
    return Graph.from_edges(16, edges)


def petersen_graph() -> Graph:
    """Kneser graph K(5,2)."""
    pairs = list(itertools.combinations(range(5), 2))
    edges = [(i, j) for i, j in itertools.combinations(range(10), 2) if not set(pairs[i]) & set(pairs[j])]
    return Graph.from_edges(10, edges)


def complement(g: Graph) -> Graph:
    edges = [(u, v) for u, v in itertools.combinations(range(g.n), 2) if not g.has_edge(u, v)]
    return Graph.from_edges(g.n, edges)
