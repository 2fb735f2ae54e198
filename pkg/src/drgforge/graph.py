"""Immutable simple graphs and distance machinery.

Adjacency is stored in CSR form (sorted neighbour arrays).  Python-int bitset
rows are derived lazily for the small graphs that clique routines work on;
storing bitsets for 2^16 vertices would cost gigabytes.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    Disconnected,
    GraphFormatError,
    NotAtDistanceTwo,
    SizeCapExceeded,
    VertexOutOfRange,
)

MAX_VERTICES = 2**20
DENSE_CAP = 4096


def worker_count() -> int:
    """Parallelism bound from ``DRGFORGE_THREADS`` (default: 1)."""
    try:
        return max(1, int(os.environ.get("DRGFORGE_THREADS", "1")))
    except ValueError:
        return 1


class Graph:
    """Finite simple undirected graph on vertices ``0..n-1``.

    ``labels`` optionally carries an external id per vertex (an FqMatrix
    index, or a parent-graph vertex for induced subgraphs).
    """

    __slots__ = ("n", "indptr", "indices", "labels", "__dict__")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, labels: Sequence[int] | None = None):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        if labels is not None:
            labels = tuple(int(v) for v in labels)
            if len(labels) != self.n:
                raise ValueError("one label per vertex required")
        self.labels = labels

    # construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "Graph":
        e = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise VertexOutOfRange("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise GraphFormatError("loops are not allowed")
        u = np.concatenate([e[:, 0], e[:, 1]])
        v = np.concatenate([e[:, 1], e[:, 0]])
        key = np.unique(u * n + v)
        if key.size != u.size:
            raise GraphFormatError("duplicate edges")
        return cls._from_sorted_keys(n, key, labels)

    @classmethod
    def from_neighbor_array(cls, nbrs: np.ndarray, labels=None) -> "Graph":
        """Regular graph from an ``n x k`` array of neighbour ids (any order)."""
        nbrs = np.sort(np.asarray(nbrs, dtype=np.int64), axis=1)
        n, k = nbrs.shape
        indptr = np.arange(n + 1, dtype=np.int64) * k
        g = cls(n, indptr, nbrs.ravel(), labels)
        g._validate()
        return g

    @classmethod
    def from_adjacency(cls, adj: np.ndarray, labels=None) -> "Graph":
        a = np.asarray(adj, dtype=bool)
        u, v = np.nonzero(np.triu(a, 1))
        if not np.array_equal(a, a.T) or a.diagonal().any():
            raise GraphFormatError("adjacency matrix must be symmetric with zero diagonal")
        return cls.from_edges(a.shape[0], zip(u.tolist(), v.tolist()), labels)

    @classmethod
    def _from_sorted_keys(cls, n: int, key: np.ndarray, labels=None) -> "Graph":
        u = key // n if n else key
        v = key % n if n else key
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, u + 1, 1)
        return cls(n, np.cumsum(indptr), v, labels)

    def _validate(self) -> None:
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        if np.any(rows == self.indices):
            raise GraphFormatError("loops are not allowed")
        seg = self.indices
        if seg.size > 1:
            same_row = rows[1:] == rows[:-1]
            if np.any(same_row & (seg[1:] == seg[:-1])):
                raise GraphFormatError("duplicate edges")
        fwd = rows * self.n + self.indices
        bwd = np.sort(self.indices * self.n + rows)
        if not np.array_equal(fwd, bwd):
            raise GraphFormatError("adjacency is not symmetric")

    # basic queries --------------------------------------------------------

    def _check(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise VertexOutOfRange(f"vertex {v} not in 0..{self.n - 1}")
        return int(v)

    def neighbors(self, v: int) -> np.ndarray:
        v = self._check(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        v = self._check(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def edges(self) -> np.ndarray:
        """``m x 2`` array of edges ``(u, v)`` with ``u < v``."""
        rows = np.repeat(np.arange(self.n), self.degrees)
        mask = rows < self.indices
        return np.stack([rows[mask], self.indices[mask]], axis=1)

    @cached_property
    def edge_rows(self) -> np.ndarray:
        """Source vertex of every directed CSR entry."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)

    @cached_property
    def sparse(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def dense(self) -> np.ndarray:
        if self.n > DENSE_CAP:
            raise SizeCapExceeded(f"dense adjacency limited to {DENSE_CAP} vertices")
        a = np.zeros((self.n, self.n), dtype=bool)
        a[self.edge_rows, self.indices] = True
        return a

    @cached_property
    def bitsets(self) -> list[int]:
        """Neighbourhood of each vertex as a Python int bitmask."""
        if self.n > DENSE_CAP:
            raise SizeCapExceeded(f"bitset rows limited to {DENSE_CAP} vertices")
        out = []
        for v in range(self.n):
            m = 0
            for w in self.indices[self.indptr[v]:self.indptr[v + 1]].tolist():
                m |= 1 << w
            out.append(m)
        return out

    def induced_subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph; vertex ``i`` of the result is labelled with its parent id."""
        verts = np.array(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        if verts.size and (verts[0] < 0 or verts[-1] >= self.n):
            raise VertexOutOfRange("subgraph vertex out of range")
        sub = self.sparse[verts][:, verts].tocsr()
        sub.sort_indices()
        return Graph(len(verts), sub.indptr, sub.indices, verts.tolist())

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph in which old vertex ``v`` becomes ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        e = self.edges()
        return Graph.from_edges(self.n, zip(perm[e[:, 0]].tolist(), perm[e[:, 1]].tolist()))

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return bool(np.all(distances_from(self, [0])[0] >= 0))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"


# I/O ----------------------------------------------------------------------

def write_edge_list(g: Graph, path: str | Path) -> None:
    e = g.edges()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n} {len(e)}\n")
        for u, v in e.tolist():
            fh.write(f"{u} {v}\n")


def read_edge_list(path: str | Path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise GraphFormatError("first line must be 'n m'")
    try:
        n, m = int(lines[0][0]), int(lines[0][1])
        edges = [(int(a), int(b)) for a, b in lines[1:]]
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc
    if len(edges) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


# distances ------------------------------------------------------------------

def distances_from(g: Graph, sources: Sequence[int]) -> np.ndarray:
    """``len(sources) x n`` matrix of BFS distances (``-1`` = unreachable)."""
    sources = [g._check(s) for s in sources]
    if g.n == 0:
        return np.zeros((len(sources), 0), dtype=np.int16)
    out = np.empty((len(sources), g.n), dtype=np.int16)
    # scipy hands back float64, so keep each batch around 64 MB
    step = max(1, 2**23 // g.n)
    for lo in range(0, len(sources), step):
        d = csgraph.shortest_path(g.sparse, method="D", unweighted=True, directed=False,
                                  indices=sources[lo:lo + step])
        d = np.atleast_2d(d)
        out[lo:lo + step] = np.where(np.isinf(d), -1, d)
    return out


def distance_matrix(g: Graph) -> np.ndarray:
    if g.n > 2**13:
        raise SizeCapExceeded("all-pairs distance matrix limited to 2^13 vertices")
    return distances_from(g, range(g.n))


@dataclass(frozen=True)
class DistancePartition:
    base: int
    levels: tuple[frozenset[int], ...]

    @property
    def eccentricity(self) -> int:
        return len(self.levels) - 1

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(lv) for lv in self.levels)


def distance_partition(g: Graph, x: int) -> DistancePartition:
    dist = distances_from(g, [x])[0]
    ecc = int(dist.max())
    levels = tuple(frozenset(np.flatnonzero(dist == i).tolist()) for i in range(ecc + 1))
    return DistancePartition(int(x), levels)


def local_intersection_numbers(g: Graph, x: int, y: int) -> tuple[int, int, int]:
    """``(c_i, a_i, b_i)`` for the pair at distance ``i = d(x, y)``."""
    dist = distances_from(g, [x])[0]
    y = g._check(y)
    i = int(dist[y])
    if i < 0:
        raise Disconnected(f"{x} and {y} lie in different components")
    dn = dist[g.neighbors(y)]
    return int(np.sum(dn == i - 1)), int(np.sum(dn == i)), int(np.sum(dn == i + 1))


def triple_intersection(g: Graph, x: int, y: int, z: int, l: int, m: int, n: int) -> int:
    d = distances_from(g, [x, y, z])
    return int(np.sum((d[0] == l) & (d[1] == m) & (d[2] == n)))


def common_neighbors(g: Graph, y: int, z: int) -> np.ndarray:
    return np.intersect1d(g.neighbors(y), g.neighbors(z), assume_unique=True)


def mu_graph(g: Graph, y: int, z: int) -> Graph:
    y, z = g._check(y), g._check(z)
    common = common_neighbors(g, y, z)
    if y == z or g.has_edge(y, z) or common.size == 0:
        raise NotAtDistanceTwo(f"d({y}, {z}) != 2")
    return g.induced_subgraph(common.tolist())


def local_graph(g: Graph, x: int) -> Graph:
    return g.induced_subgraph(g.neighbors(x).tolist())


# distance-regularity ----------------------------------------------------------

@dataclass(frozen=True)
class FailureWitness:
    """Two vertex pairs at the same distance with different counts."""

    kind: str  # "c", "a" or "b"
    distance: int
    pair1: tuple[int, int]
    value1: int
    pair2: tuple[int, int]
    value2: int

    def describe(self) -> str:
        return (f"{self.kind}_{self.distance} not well-defined: {self.pair1} gives {self.value1}, "
                f"{self.pair2} gives {self.value2}")


@dataclass(frozen=True)
class PartialIntersectionNumbers:
    """Intersection numbers verified well-defined up to a given distance."""

    depth: int
    b: tuple[int, ...]  # b_0..b_depth
    c: tuple[int, ...]  # c_1..c_depth
    a: tuple[int, ...]  # a_1..a_depth


def verify_automorphism(g: Graph, perm: np.ndarray) -> bool:
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (g.n,) or not np.array_equal(np.sort(perm), np.arange(g.n)):
        return False
    if not np.array_equal(g.degrees[perm], g.degrees):
        return False
    if g.n and np.all(g.degrees == g.degrees[0]):
        k = int(g.degrees[0])
        img = np.sort(perm[g.indices].reshape(g.n, k), axis=1)
        return bool(np.array_equal(img, g.indices.reshape(g.n, k)[perm]))
    key = np.sort(perm[g.edge_rows] * g.n + perm[g.indices])
    return bool(np.array_equal(key, g.edge_rows * g.n + g.indices))


def automorphism_orbit_representatives(g: Graph, generators: Sequence[np.ndarray]) -> list[int]:
    """Least vertex of each orbit of the group generated by ``generators``."""
    rows = [np.arange(g.n)] * len(generators)
    cols = [np.asarray(p, dtype=np.int64) for p in generators]
    if not generators:
        return list(range(g.n))
    m = sp.csr_matrix((np.ones(g.n * len(generators)), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(g.n, g.n))
    _, comp = csgraph.connected_components(m, directed=True, connection="weak")
    _, first = np.unique(comp, return_index=True)
    return sorted(first.tolist())


def _pair_counts(g: Graph, dist: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-vertex counts of neighbours one level closer / same / farther."""
    rows, cols = g.edge_rows, g.indices
    diff = dist[cols] - dist[rows]
    c = np.bincount(rows[diff == -1], minlength=g.n)
    a = np.bincount(rows[diff == 0], minlength=g.n)
    b = np.bincount(rows[diff == 1], minlength=g.n)
    return c, a, b


def check_distance_regular(
    g: Graph,
    depth: int | None = None,
    automorphisms: Sequence[np.ndarray] | None = None,
    chunk: int = 64,
):
    """Intersection array of ``g`` or a :class:`FailureWitness`.

    Every ordered pair ``(x, y)`` is examined.  When ``automorphisms`` is
    given, each permutation is first verified to be an automorphism and only
    one base vertex per orbit is scanned; this is exact since intersection
    numbers are invariant under automorphisms.  With ``depth = r`` only
    ``b_0..b_r`` and ``c_1..c_r`` (and ``a_1..a_r``) must be well-defined and
    a :class:`PartialIntersectionNumbers` is returned.
    """
    if g.n == 0:
        raise Disconnected("empty graph")
    if automorphisms:
        for perm in automorphisms:
            if not verify_automorphism(g, perm):
                raise ValueError("supplied permutation is not an automorphism")
        bases = automorphism_orbit_representatives(g, automorphisms)
    else:
        bases = list(range(g.n))

    seen: dict[tuple[str, int], tuple[int, tuple[int, int]]] = {}
    diameter = 0

    def scan(batch: list[int]):
        d = distances_from(g, batch)
        return batch, d, [_pair_counts(g, row) for row in d]

    batches = [bases[i:i + chunk] for i in range(0, len(bases), chunk)]
    workers = worker_count()
    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(scan, batches))
    else:
        results = map(scan, batches)

    for batch, d, counts in results:
        if np.any(d < 0):
            raise Disconnected("graph is not connected")
        for x, dist, (c, a, b) in zip(batch, d, counts):
            ecc = int(dist.max())
            diameter = max(diameter, ecc)
            limit = ecc if depth is None else min(ecc, depth)
            for i in range(0, limit + 1):
                ys = np.flatnonzero(dist == i)
                checks = [("b", b)]
                if i >= 1:
                    checks = [("c", c), ("a", a), ("b", b)]
                for kind, arr in checks:
                    vals = arr[ys]
                    lo, hi = int(vals.min()), int(vals.max())
                    key = (kind, i)
                    if lo != hi:
                        y1 = int(ys[np.argmin(vals)])
                        y2 = int(ys[np.argmax(vals)])
                        return FailureWitness(kind, i, (x, y1), lo, (x, y2), hi)
                    if key in seen and seen[key][0] != lo:
                        v0, pair0 = seen[key]
                        return FailureWitness(kind, i, pair0, v0, (x, int(ys[0])), lo)
                    seen.setdefault(key, (lo, (x, int(ys[0]))))

    if depth is not None:
        r = min(depth, diameter)
        return PartialIntersectionNumbers(
            r,
            tuple(seen[("b", i)][0] for i in range(r + 1) if ("b", i) in seen),
            tuple(seen[("c", i)][0] for i in range(1, r + 1)),
            tuple(seen[("a", i)][0] for i in range(1, r + 1)),
        )
    from .params import IntersectionArray  # local import avoids a cycle

    return IntersectionArray(
        tuple(seen[("b", i)][0] for i in range(diameter)),
        tuple(seen[("c", i)][0] for i in range(1, diameter + 1)),
    )


# spectra ------------------------------------------------------------------------

SPECTRUM_CAP = 4096
SNAP_TOL = 1e-6


@dataclass(frozen=True)
class GraphSpectrum:
    """Eigenvalues with multiplicities, descending.

    Integral eigenvalues are plain ints; the rest are ``(lo, hi)`` float
    intervals.  ``certified`` is true when all eigenvalues are integers and the
    exact trace moments ``l = 0..4`` agree.
    """

    pairs: tuple[tuple[object, int], ...]
    certified: bool
    moments: tuple[int, ...] = field(default=())

    def multiplicity(self, theta) -> int:
        return dict(self.pairs).get(theta, 0)

    def as_dict(self) -> dict:
        return {"pairs": [[t if isinstance(t, int) else list(t), m] for t, m in self.pairs],
                "certified": self.certified}


def trace_moments(g: Graph, top: int = 4) -> tuple[int, ...]:
    """Exact ``tr(A^l)`` for ``l = 0..top`` (``top <= 4``)."""
    a = g.sparse
    out = [g.n, 0, int(g.indices.size)]
    if top >= 3:
        a2 = (a @ a).tocsr()
        out.append(int(a2.multiply(a).sum()))
        if top >= 4:
            out.append(int(a2.multiply(a2).sum()))
    return tuple(out[: top + 1])


def spectrum_small(g: Graph) -> GraphSpectrum:
    from .errors import CertificationFailed

    if g.n > SPECTRUM_CAP:
        raise SizeCapExceeded(f"spectrum_small limited to {SPECTRUM_CAP} vertices")
    vals = np.linalg.eigvalsh(g.dense().astype(float))[::-1]
    groups: list[list[float]] = []
    for v in vals:
        if groups and abs(groups[-1][-1] - v) < 1e-6:
            groups[-1].append(v)
        else:
            groups.append([v])
    pairs = []
    all_int = True
    for grp in groups:
        mean = float(np.mean(grp))
        r = round(mean)
        if abs(mean - r) < SNAP_TOL:
            pairs.append((int(r), len(grp)))
        else:
            all_int = False
            pairs.append(((min(grp) - 1e-9, max(grp) + 1e-9), len(grp)))
    if not all_int:
        return GraphSpectrum(tuple(pairs), False)
    moments = trace_moments(g, 4)
    for ell in range(5):
        if sum(m * t**ell for t, m in pairs) != moments[ell]:
            raise CertificationFailed(f"snapped spectrum disagrees with tr(A^{ell})")
    return GraphSpectrum(tuple(pairs), True, moments)


def bfs_order(g: Graph, x: int) -> list[int]:
    """Plain BFS order; used by small-graph helpers."""
    seen = {x}
    order = [x]
    dq = deque([x])
    while dq:
        u = dq.popleft()
        for w in g.neighbors(u).tolist():
            if w not in seen:
                seen.add(w)
                order.append(w)
                dq.append(w)
    return order


def maximal_cliques(g: Graph) -> list[tuple[int, ...]]:
    """All maximal cliques (Bron-Kerbosch with pivoting on bitsets), each sorted,
    listed in lexicographic order."""
    nb = g.bitsets
    out: list[tuple[int, ...]] = []

    def bits(s: int):
        while s:
            low = s & -s
            yield low.bit_length() - 1
            s ^= low

    def expand(r: list[int], p: int, x: int) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(bits(p | x), key=lambda u: (p & nb[u]).bit_count())
        for v in list(bits(p & ~nb[pivot])):
            expand(r + [v], p & nb[v], x & nb[v])
            p &= ~(1 << v)
            x |= 1 << v

    expand([], (1 << g.n) - 1, 0)
    return sorted(out)
