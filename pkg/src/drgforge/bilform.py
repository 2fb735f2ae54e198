"""The bilinear forms graph ``Bil_q(e x d)``.

Vertex ``i`` is the ``i``-th matrix of :func:`field.enumerate_matrices`.  Since
matrix addition is digit-wise addition mod ``p`` of the base-``p`` expansion of
the vertex index, neighbours are generated as ``v + R`` for the fixed set ``R``
of rank-one matrices, and translations are automorphisms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import field as ff
from .errors import BadParameters, EnumerationCapExceeded
from .graph import Graph, check_distance_regular, distance_partition, verify_automorphism
from .params import (
    ClassicalParameters,
    IntersectionArray,
    bilinear_forms_array,
    detect_classical_parameters,
)

PAIRWISE_ORACLE_CAP = 2**12


def expected_intersection_array(q: int, e: int, d: int) -> IntersectionArray:
    return bilinear_forms_array(q, e, d)


def _digit_add(ctx: ff.FieldContext, a: np.ndarray, b: np.ndarray, ndigits: int) -> np.ndarray:
    """Index of ``M_a + M_b`` (broadcasting)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if ctx.p == 2:
        return a ^ b
    p = ctx.p
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    w = 1
    for _ in range(ndigits):
        out += ((a // w % p + b // w % p) % p) * w
        w *= p
    return out


def _digit_neg(ctx: ff.FieldContext, a: np.ndarray, ndigits: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if ctx.p == 2:
        return a.copy()
    p = ctx.p
    out = np.zeros_like(a)
    w = 1
    for _ in range(ndigits):
        out += ((-(a // w % p)) % p) * w
        w *= p
    return out


def _matrix_indices(ctx: ff.FieldContext, mats: np.ndarray) -> np.ndarray:
    """Row-major base-q index for a stack of matrices of shape ``(..., e, d)``."""
    flat = mats.reshape(mats.shape[:-2] + (-1,)).astype(np.int64)
    weights = ctx.q ** np.arange(flat.shape[-1] - 1, -1, -1, dtype=np.int64)
    return flat @ weights


def _vectors(q: int, n: int) -> np.ndarray:
    return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)


def _normalized(q: int, n: int) -> np.ndarray:
    """Nonzero vectors whose first nonzero entry is 1."""
    vs = _vectors(q, n)[1:]
    lead = vs[np.arange(len(vs)), np.argmax(vs != 0, axis=1)]
    return vs[lead == 1]


def rank_one_indices(ctx: ff.FieldContext, e: int, d: int) -> np.ndarray:
    """Indices of all rank-one ``e x d`` matrices ``x y^T`` (``y`` normalized), sorted."""
    xs = _vectors(ctx.q, e)[1:]
    ys = _normalized(ctx.q, d)
    mats = ctx.mul_table[xs[:, None, :, None], ys[None, :, None, :]]
    return np.sort(_matrix_indices(ctx, mats).ravel())


@dataclass(frozen=True)
class BilinearFormsGraph:
    q: int
    e: int
    d: int
    graph: Graph = field(repr=False)
    expected_array: IntersectionArray
    ctx: ff.FieldContext = field(repr=False)

    @property
    def ndigits(self) -> int:
        return self.e * self.d * self.ctx.f

    def translation(self, t: int) -> np.ndarray:
        """Vertex permutation ``M -> M + M_t``."""
        return _digit_add(self.ctx, np.arange(self.graph.n), t, self.ndigits)

    def translation_generators(self) -> list[np.ndarray]:
        """Translations by the base-``p`` unit digits; they generate all translations."""
        return [self.translation(self.ctx.p**i) for i in range(self.ndigits)]

    def matrix(self, v: int) -> ff.FqMatrix:
        return ff.index_to_matrix(self.ctx, v, self.e, self.d)


def _check_params(q: int, e: int, d: int, cap: int) -> ff.FieldContext:
    if e < d or d < 2:
        raise BadParameters(f"need e >= d >= 2, got e={e}, d={d}")
    ctx = ff.make_field(q)
    if q ** (e * d) > cap:
        raise EnumerationCapExceeded(f"q^(de) = {q ** (e * d)} exceeds the enumeration cap {cap}")
    return ctx


def construct(q: int, e: int, d: int, cap: int = ff.ENUMERATION_CAP) -> BilinearFormsGraph:
    ctx = _check_params(q, e, d, cap)
    n = q ** (e * d)
    R = rank_one_indices(ctx, e, d)
    ndig = e * d * ctx.f
    nbrs = np.empty((n, len(R)), dtype=np.int64)
    step = max(1, 2**22 // len(R))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        nbrs[lo:hi] = _digit_add(ctx, np.arange(lo, hi)[:, None], R[None, :], ndig)
    g = Graph.from_neighbor_array(nbrs)
    return BilinearFormsGraph(q, e, d, g, expected_intersection_array(q, e, d), ctx)


def rank_oracle_edges(q: int, e: int, d: int, cap: int = PAIRWISE_ORACLE_CAP) -> np.ndarray:
    """Edges ``u < v`` with ``rank(M_u - M_v) == 1``, by Gaussian elimination.

    Each pair's difference is formed explicitly; the rank of each of the
    ``q^(de)`` possible differences is computed once by elimination.
    """
    ctx = _check_params(q, e, d, cap)
    n = q ** (e * d)
    ndig = e * d * ctx.f
    ranks = np.array([ff.rank(ctx, m) for m in ff.enumerate_matrices(ctx, e, d)], dtype=np.int64)
    idx = np.arange(n)
    out = []
    for u in range(n):
        diff = _digit_add(ctx, idx[u + 1:], _digit_neg(ctx, np.int64(u), ndig), ndig)
        vs = idx[u + 1:][ranks[diff] == 1]
        out.extend((u, int(v)) for v in vs)
    return np.array(out, dtype=np.int64).reshape(-1, 2)


# Grand cliques ------------------------------------------------------------------------

@dataclass(frozen=True)
class GrandCliqueFamilies:
    family_R: np.ndarray      # (count, q^e) vertex ids, rows sorted
    family_C: np.ndarray      # (count, q^d)

    def sizes(self) -> tuple[int, int]:
        return self.family_R.shape[1], self.family_C.shape[1]


def _cosets(B: BilinearFormsGraph, sub: np.ndarray) -> np.ndarray:
    """All cosets ``M + S`` of an additive subgroup ``S``, one row each, sorted."""
    n = B.graph.n
    cos = _digit_add(B.ctx, np.arange(n)[:, None], sub[None, :], B.ndigits)
    reps = cos.min(axis=1)
    keep = reps == np.arange(n)
    return np.sort(cos[keep], axis=1)


def grand_cliques(B: BilinearFormsGraph) -> GrandCliqueFamilies:
    """``family_R``: cosets of ``{x r^T : x in F_q^e}`` per normalized row ``r``;
    ``family_C``: cosets of ``{c y^T : y in F_q^d}`` per normalized column ``c``."""
    ctx, e, d = B.ctx, B.e, B.d
    xs, ys = _vectors(ctx.q, e), _vectors(ctx.q, d)
    fam_r, fam_c = [], []
    for r in _normalized(ctx.q, d):
        sub = _matrix_indices(ctx, ctx.mul_table[xs[:, :, None], r[None, None, :]])
        fam_r.append(_cosets(B, sub))
    for c in _normalized(ctx.q, e):
        sub = _matrix_indices(ctx, ctx.mul_table[c[None, :, None], ys[:, None, :]])
        fam_c.append(_cosets(B, sub))
    R = np.concatenate(fam_r)
    C = np.concatenate(fam_c)
    return GrandCliqueFamilies(R[np.lexsort(R.T[::-1])], C[np.lexsort(C.T[::-1])])


def is_clique(g: Graph, members) -> bool:
    members = [int(v) for v in members]
    return all(g.has_edge(u, v) for i, u in enumerate(members) for v in members[i + 1:])


def is_maximal_clique(g: Graph, members) -> bool:
    members = np.asarray(members)
    if not is_clique(g, members):
        return False
    if len(members) < 2:
        return g.degree(int(members[0])) == 0
    common = np.intersect1d(g.neighbors(int(members[0])), g.neighbors(int(members[1])))
    for v in members[2:]:
        common = np.intersect1d(common, g.neighbors(int(v)))
    return common.size == 0


def edge_cover_counts(g: Graph, cliques: np.ndarray) -> np.ndarray:
    """How many cliques of the family contain each edge (in ``g.edges()`` order)."""
    n = g.n
    e = g.edges()
    keys = e[:, 0] * n + e[:, 1]
    iu, ju = np.triu_indices(cliques.shape[1], 1)
    a = cliques[:, iu].ravel()
    b = cliques[:, ju].ravel()
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    pos = np.searchsorted(keys, lo * n + hi)
    if np.any(pos >= len(keys)) or np.any(keys[np.minimum(pos, len(keys) - 1)] != lo * n + hi):
        return np.full(len(keys), -1)
    return np.bincount(pos, minlength=len(keys))


# Verification ----------------------------------------------------------------------

@dataclass
class CheckResult:
    id: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"id": self.id, "status": "pass" if self.passed else "fail", "details": self.detail}


def verify_construction(B: BilinearFormsGraph) -> list[CheckResult]:
    g = B.graph
    out = [CheckResult("vertex_count", g.n == B.q ** (B.e * B.d), f"{g.n} vertices")]
    gens = B.translation_generators()
    ok_auto = all(verify_automorphism(g, p) for p in gens)
    out.append(CheckResult("translations_are_automorphisms", ok_auto, f"{len(gens)} generators"))
    arr = check_distance_regular(g, automorphisms=gens if ok_auto else None)
    is_arr = isinstance(arr, IntersectionArray)
    out.append(CheckResult("distance_regular", is_arr, str(arr) if is_arr else arr.describe()))
    out.append(CheckResult("array_matches_closed_form", is_arr and arr == B.expected_array,
                           f"computed {arr if is_arr else '-'}, expected {B.expected_array}"))
    out.append(CheckResult("diameter", is_arr and arr.D == B.d, f"D = {arr.D if is_arr else '-'}"))
    sizes = distance_partition(g, 0).sizes
    out.append(CheckResult("level_sizes", is_arr and sizes == B.expected_array.sizes, str(sizes)))
    cp = detect_classical_parameters(B.expected_array)
    want = ClassicalParameters(B.d, B.q, B.q - 1, B.q**B.e - 1)
    out.append(CheckResult("classical_parameters", cp is not None and cp.as_tuple() == want.as_tuple(),
                           f"detected {cp}, expected {want}"))
    return out
