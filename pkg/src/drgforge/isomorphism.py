"""Graph isomorphism by colour refinement with individualization and backtracking.

Colours are refined on both graphs in lockstep with a shared naming, so any
isomorphism maps a vertex to a vertex of the same colour.  Neighbour-colour
multisets are compressed to two 64-bit hash sums; a collision can only make
refinement coarser, and every returned mapping is verified edge by edge.
"""

from __future__ import annotations

import numpy as np

from .errors import SizeCapExceeded
from .graph import Graph

ISO_CAP = 2**16
_SEED = 0x5EED


def _hash_sums(g: Graph, vals: np.ndarray) -> np.ndarray:
    if g.indices.size == 0:
        return np.zeros(g.n, dtype=np.uint64)
    contrib = vals[g.indices]
    starts = g.indptr[:-1]
    deg = np.diff(g.indptr)
    out = np.zeros(g.n, dtype=np.uint64)
    nz = deg > 0
    out[nz] = np.add.reduceat(contrib, starts[nz])
    return out


def _refine(g: Graph, h: Graph, cg: np.ndarray, ch: np.ndarray, rng_vals) -> tuple[np.ndarray, np.ndarray]:
    """Refine until stable; colour ids are shared between the two graphs."""
    n = g.n
    while True:
        ncol = int(max(cg.max(initial=-1), ch.max(initial=-1))) + 1
        r1, r2 = rng_vals(ncol)
        kg = np.stack([cg.astype(np.uint64), _hash_sums(g, r1[cg]), _hash_sums(g, r2[cg])], axis=1)
        kh = np.stack([ch.astype(np.uint64), _hash_sums(h, r1[ch]), _hash_sums(h, r2[ch])], axis=1)
        keys = np.concatenate([kg, kh])
        _, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.ravel()
        new_g, new_h = inv[:n], inv[n:]
        before = len(np.unique(np.concatenate([cg, ch])))
        after = len(np.unique(inv))
        cg, ch = new_g, new_h
        if after == before:
            return cg, ch


class _Hasher:
    def __init__(self):
        self.rng = np.random.default_rng(_SEED)
        self.a = np.empty(0, dtype=np.uint64)
        self.b = np.empty(0, dtype=np.uint64)

    def __call__(self, ncol: int):
        if ncol > len(self.a):
            extra = ncol - len(self.a) + 64
            self.a = np.concatenate([self.a, self.rng.integers(0, 2**63, extra, dtype=np.uint64) * 2 + 1])
            self.b = np.concatenate([self.b, self.rng.integers(0, 2**63, extra, dtype=np.uint64) * 2 + 1])
        return self.a, self.b


def _histogram_equal(cg: np.ndarray, ch: np.ndarray) -> bool:
    return np.array_equal(np.sort(cg), np.sort(ch))


def _is_mapping(g: Graph, h: Graph, phi: np.ndarray) -> bool:
    key = np.sort(phi[g.edge_rows] * h.n + phi[g.indices])
    return bool(np.array_equal(key, h.edge_rows * h.n + h.indices))


def is_isomorphic(g: Graph, h: Graph) -> dict[int, int] | None:
    """An isomorphism ``g -> h`` as a vertex map, or ``None``."""
    if max(g.n, h.n) > ISO_CAP:
        raise SizeCapExceeded(f"isomorphism testing is capped at {ISO_CAP} vertices")
    if g.n != h.n or g.num_edges != h.num_edges:
        return None
    if not np.array_equal(np.sort(g.degrees), np.sort(h.degrees)):
        return None
    if g.n == 0:
        return {}
    hasher = _Hasher()
    cg, ch = _refine(g, h, g.degrees.astype(np.int64), h.degrees.astype(np.int64), hasher)
    phi = _search(g, h, cg, ch, hasher)
    if phi is None:
        return None
    return {i: int(phi[i]) for i in range(g.n)}


def _search(g, h, cg, ch, hasher):
    if not _histogram_equal(cg, ch):
        return None
    counts = np.bincount(cg)
    if counts.max() == 1:
        phi = np.empty(g.n, dtype=np.int64)
        order_h = np.argsort(ch)
        phi[np.argsort(cg)] = order_h
        return phi if _is_mapping(g, h, phi) else None
    # smallest non-singleton class, lowest colour id on ties
    sizes = np.where(counts > 1, counts, np.iinfo(np.int64).max)
    target = int(np.argmin(sizes))
    v = int(np.flatnonzero(cg == target)[0])
    fresh = int(max(cg.max(), ch.max())) + 1
    for w in np.flatnonzero(ch == target):
        cg2, ch2 = cg.copy(), ch.copy()
        cg2[v] = fresh
        ch2[int(w)] = fresh
        cg2, ch2 = _refine(g, h, cg2, ch2, hasher)
        res = _search(g, h, cg2, ch2, hasher)
        if res is not None:
            return res
    return None


def automorphism_check(g: Graph, phi: dict[int, int], h: Graph | None = None) -> bool:
    h = g if h is None else h
    arr = np.array([phi[i] for i in range(g.n)], dtype=np.int64)
    return _is_mapping(g, h, arr)
