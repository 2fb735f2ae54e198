"""Local grid frames, Sigma-subgraphs, blocks and mu-maps, ball-2 isomorphisms,
semi-partial geometry extraction and the triangulability conditions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    AxiomViolation,
    DistinctMuGraphsViolated,
    MuGraphNotHexagon,
    NotLocallyGrid,
    SizeCapExceeded,
)
from .graph import (
    Graph,
    automorphism_orbit_representatives,
    distances_from,
    local_graph,
    maximal_cliques,
    verify_automorphism,
)
from .local import grid_structure

TRIANGULABILITY_CAP = 2**13


# Grid frame ---------------------------------------------------------------------

@dataclass(frozen=True)
class GridFrame:
    """``w[i, j]`` is the neighbour of ``x`` in row clique ``i`` and column clique ``j``.

    Rows are the ``n`` cliques of size ``m``, columns the ``m`` cliques of
    size ``n`` (``n >= m``).
    """

    x: int
    w: np.ndarray

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def m(self) -> int:
        return self.w.shape[1]

    @property
    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in r) for r in self.w]

    @property
    def cols(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in c) for c in self.w.T]

    def coord(self) -> dict[int, tuple[int, int]]:
        return {int(self.w[i, j]): (i, j) for i in range(self.n) for j in range(self.m)}

    def transposed(self) -> "GridFrame":
        return GridFrame(self.x, self.w.T.copy())


def grid_frame(g: Graph, x: int) -> GridFrame:
    """Canonical coordinates on the local graph of ``x``.

    Rows and columns are each ordered by least vertex.  When ``n == m`` the
    family through the least neighbour ``w0`` whose clique at ``w0`` has the
    smaller second member becomes the rows.
    """
    loc = local_graph(g, x)
    st = grid_structure(loc) if loc.n >= 4 else None
    if st is None:
        raise NotLocallyGrid(f"local graph of {x} is not a grid")
    lab = np.asarray(loc.labels, dtype=np.int64)
    rows = [tuple(sorted(lab[list(c)].tolist())) for c in st.rows]
    cols = [tuple(sorted(lab[list(c)].tolist())) for c in st.cols]
    if st.n == st.m:
        w0 = min(lab.tolist())
        r0 = next(r for r in rows if w0 in r)
        c0 = next(c for c in cols if w0 in c)
        if c0[1] < r0[1]:
            rows, cols = cols, rows
    rows.sort()
    cols.sort()
    colset = [set(c) for c in cols]
    w = np.empty((len(rows), len(cols)), dtype=np.int64)
    for i, r in enumerate(rows):
        for j, cs in enumerate(colset):
            (w[i, j],) = cs.intersection(r)
    return GridFrame(int(x), w)


# Mu-images and blocks -------------------------------------------------------------

def _mu_images(g: Graph, x: int, frame: GridFrame) -> tuple[np.ndarray, dict[int, frozenset]]:
    """``Gamma_2(x)`` and ``mu_x(y)`` as sets of coordinates."""
    coord = frame.coord()
    dist = distances_from(g, [x])[0]
    acc: dict[int, set] = {}
    for wv, ij in coord.items():
        for y in g.neighbors(wv).tolist():
            if dist[y] == 2:
                acc.setdefault(y, set()).add(ij)
    gamma2 = np.flatnonzero(dist == 2)
    return gamma2, {int(y): frozenset(acc.get(int(y), ())) for y in gamma2}


def is_hexagon_image(mu: frozenset) -> bool:
    """Six cells of a 3x3 subgrid forming the complement of a transversal."""
    if len(mu) != 6:
        return False
    rows = {i for i, _ in mu}
    cols = {j for _, j in mu}
    if len(rows) != 3 or len(cols) != 3:
        return False
    missing = {(i, j) for i in rows for j in cols} - set(mu)
    return len({i for i, _ in missing}) == 3 and len({j for _, j in missing}) == 3


def _is_hexagon_graph(g: Graph, verts: Sequence[int]) -> bool:
    sub = g.induced_subgraph(verts)
    return sub.n == 6 and bool(np.all(sub.degrees == 2)) and sub.is_connected()


@dataclass
class BlockSystem:
    frame: GridFrame
    gamma2: np.ndarray
    mu: dict[int, frozenset]
    blocks: list[tuple[int, int, int]]
    top_blocks: list[tuple[int, int, int]]
    cells: dict[tuple, list[int]]              # (block, top_block) -> vertices of Gamma_2
    checks: dict[str, bool] = field(default_factory=dict)
    counts: dict[str, list[int]] = field(default_factory=dict)

    def block_of(self, y: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        mu = self.mu[y]
        return tuple(sorted({i for i, _ in mu})), tuple(sorted({j for _, j in mu}))

    def inverse(self) -> dict[frozenset, int]:
        return {v: k for k, v in self.mu.items()}


def _mu_adjacency_rule(mu_list: list[frozenset], m: int) -> np.ndarray:
    """Predicted adjacency in Gamma_2: ``mu(y) & mu(z)`` induces K2 or 2K2."""
    def cell(c):
        return c[0] * m + c[1]

    edge_keys: dict[tuple, int] = {}
    path_keys: dict[tuple, int] = {}
    e_rows, e_cols, p_rows, p_cols = [], [], [], []
    for r, mu in enumerate(mu_list):
        for a, b in itertools.combinations(sorted(mu), 2):
            if (a[0] == b[0]) != (a[1] == b[1]):
                e_rows.append(r)
                e_cols.append(edge_keys.setdefault((cell(a), cell(b)), len(edge_keys)))
        for c in mu:
            rn = [o for o in mu if o != c and o[0] == c[0]]
            cn = [o for o in mu if o != c and o[1] == c[1]]
            for a in rn:
                for b in cn:
                    p_rows.append(r)
                    p_cols.append(path_keys.setdefault((cell(a), cell(c), cell(b)), len(path_keys)))
    N = len(mu_list)
    cells = sorted({cell(c) for mu in mu_list for c in mu})
    cidx = {c: i for i, c in enumerate(cells)}
    Mc = np.zeros((N, len(cells)), dtype=np.float32)
    for r, mu in enumerate(mu_list):
        for c in mu:
            Mc[r, cidx[cell(c)]] = 1
    Me = np.zeros((N, max(1, len(edge_keys))), dtype=np.float32)
    Me[e_rows, e_cols] = 1
    Mp = np.zeros((N, max(1, len(path_keys))), dtype=np.float32)
    Mp[p_rows, p_cols] = 1
    S = np.rint(Mc @ Mc.T).astype(np.int64)
    E = np.rint(Me @ Me.T).astype(np.int64)
    W = np.rint(Mp @ Mp.T).astype(np.int64)
    pred = (E >= 1) & (E <= 2) & (W == 0) & (S == 2 * E)
    np.fill_diagonal(pred, False)
    return pred


def check_mu_hexagons(g: Graph, x: int) -> int:
    """Raise :class:`MuGraphNotHexagon` unless every ``y`` at distance 2 from
    ``x`` has a 6-cycle as common neighbourhood; returns the number checked."""
    dist = distances_from(g, [x])[0]
    nx = g.neighbors(x)
    ys = np.flatnonzero(dist == 2)
    for y in ys.tolist():
        common = np.intersect1d(nx, g.neighbors(y))
        if not _is_hexagon_graph(g, common):
            raise MuGraphNotHexagon(x, y, f"{len(common)} common neighbours")
    return len(ys)


def block_system(g: Graph, x: int, frame: GridFrame | None = None, verify: bool = True) -> BlockSystem:
    if frame is None:
        check_mu_hexagons(g, x)
        frame = grid_frame(g, x)
    gamma2, mu = _mu_images(g, x, frame)
    for y in gamma2.tolist():
        verts = [int(frame.w[i, j]) for i, j in sorted(mu[y])]
        if not is_hexagon_image(mu[y]) or not _is_hexagon_graph(g, verts):
            raise MuGraphNotHexagon(x, y, f"{len(verts)} common neighbours")
    cells: dict[tuple, list[int]] = {}
    for y in gamma2.tolist():
        rows = tuple(sorted({i for i, _ in mu[y]}))
        cols = tuple(sorted({j for _, j in mu[y]}))
        cells.setdefault((rows, cols), []).append(y)
    blocks = sorted({k[0] for k in cells})
    top = sorted({k[1] for k in cells})
    bs = BlockSystem(frame, gamma2, mu, blocks, top, cells)
    if verify:
        _verify_blocks(g, x, bs)
    return bs


def _verify_blocks(g: Graph, x: int, bs: BlockSystem) -> None:
    n, m = bs.frame.n, bs.frame.m
    bs.checks["mu_hexagons"] = True
    bs.checks["distinct_mu"] = len(set(bs.mu.values())) == len(bs.mu)
    bs.checks["six_per_subgrid"] = all(
        len(ys) == 6 and len({bs.mu[y] for y in ys}) == 6 for ys in bs.cells.values())
    bs.checks["subgrids_complete"] = len(bs.cells) == len(bs.blocks) * len(bs.top_blocks)
    ys = bs.gamma2.tolist()
    pred = _mu_adjacency_rule([bs.mu[y] for y in ys], m)
    sub = g.sparse[ys][:, ys].toarray().astype(bool)
    bs.checks["adjacency_rule"] = bool(np.array_equal(pred, sub))
    # neighbourhood split of Gamma(x) seen from each z in Gamma_2(x)
    w = bs.frame.w.ravel()
    d = distances_from(g, w)[:, ys].T
    c1 = (d == 1).sum(axis=1)
    c2 = (d == 2).sum(axis=1)
    c3 = (d == 3).sum(axis=1)
    bs.counts = {"gamma1": sorted(set(c1.tolist())), "gamma2": sorted(set(c2.tolist())),
                 "gamma3": sorted(set(c3.tolist()))}
    bs.checks["gamma2_count"] = bs.counts["gamma2"] == [3 * n + 3 * m - 15]
    bs.checks["gamma3_count"] = bs.counts["gamma3"] == [(n - 3) * (m - 3)]


# Sigma subgraphs --------------------------------------------------------------------

@dataclass(frozen=True)
class Sigma:
    graph: Graph
    triple: tuple[int, int, int]
    top: bool
    sigma2: tuple[int, ...]

    @property
    def is_block(self) -> bool:
        return len(self.sigma2) > 0


def sigma_subgraph(g: Graph, x: int, triple: Sequence[int], top: bool = False,
                   frame: GridFrame | None = None, bs: BlockSystem | None = None) -> Sigma:
    """``{x}`` plus three row cliques plus the ``y`` in ``Gamma_2(x)`` whose
    common neighbours with ``x`` lie inside them; columns when ``top``."""
    if bs is None:
        frame = grid_frame(g, x) if frame is None else frame
        gamma2, mu = _mu_images(g, x, frame)
    else:
        frame, gamma2, mu = bs.frame, bs.gamma2, bs.mu
    t = tuple(sorted(int(i) for i in triple))
    if len(set(t)) != 3:
        raise ValueError("need three distinct indices")
    axis = 1 if top else 0
    lines = frame.w.T if top else frame.w
    first = [int(v) for i in t for v in lines[i]]
    s2 = tuple(int(y) for y in gamma2.tolist() if mu[int(y)] and all(c[axis] in t for c in mu[int(y)]))
    return Sigma(g.induced_subgraph([x, *first, *s2]), t, top, s2)


# Ball of radius two ---------------------------------------------------------------

def _triple_system_isos(src: list[tuple], dst: list[tuple], npts: int):
    """Point permutations mapping the triple system ``src`` onto ``dst``."""
    if len(src) != len(dst):
        return
    dset = set(dst)
    deg_s = [sum(p in t for t in src) for p in range(npts)]
    deg_d = [sum(p in t for t in dst) for p in range(npts)]
    if sorted(deg_s) != sorted(deg_d):
        return
    order = sorted(range(npts), key=lambda p: -deg_s[p])
    img = [-1] * npts
    used = [False] * npts

    def consistent(p: int) -> bool:
        for t in src:
            if p in t and all(img[u] >= 0 for u in t):
                if tuple(sorted(img[u] for u in t)) not in dset:
                    return False
        return True

    def rec(k: int):
        if k == npts:
            yield list(img)
            return
        p = order[k]
        for q in range(npts):
            if not used[q] and deg_d[q] == deg_s[p]:
                img[p] = q
                used[q] = True
                if consistent(p):
                    yield from rec(k + 1)
                used[q] = False
                img[p] = -1

    yield from rec(0)


@dataclass
class Ball2Result:
    mapping: dict[int, int] | None
    certificate: dict
    row_perm: list[int] | None = None
    col_perm: list[int] | None = None
    transposed: bool = False

    @property
    def ok(self) -> bool:
        return self.mapping is not None


def ball(g: Graph, x: int, radius: int = 2) -> list[int]:
    d = distances_from(g, [x])[0]
    return np.flatnonzero((d >= 0) & (d <= radius)).tolist()


def verify_ball_map(g: Graph, x: int, h: Graph, xt: int, phi: dict[int, int]) -> bool:
    """``phi`` is a bijection between the radius-2 balls that preserves
    adjacency and non-adjacency in both directions."""
    bg, bh = ball(g, x), ball(h, xt)
    if len(bg) != len(bh) or sorted(phi) != bg or sorted(phi.values()) != bh:
        return False
    img = [phi[v] for v in bg]
    A = g.sparse[bg][:, bg].toarray()
    B = h.sparse[img][:, img].toarray()
    inv = {v: k for k, v in phi.items()}
    return bool(np.array_equal(A, B)) and all(inv[phi[v]] == v for v in bg)


def ball2_isomorphism(g: Graph, x: int, h: Graph, xt: int, max_tries: int = 64) -> Ball2Result:
    """Isomorphism of the radius-2 balls around ``x`` and ``xt``.

    Row and column permutations aligning the block systems are searched for;
    the map on ``Gamma(x)`` follows the grid coordinates and ``y`` in
    ``Gamma_2(x)`` goes to the vertex with the image hexagon as its mu-graph.
    Every candidate is verified edge by edge.
    """
    fg, fh = grid_frame(g, x), grid_frame(h, xt)
    if (fg.n, fg.m) != (fh.n, fh.m):
        return Ball2Result(None, {"reason": "frame_dimensions", "left": [fg.n, fg.m], "right": [fh.n, fh.m]})
    bg = block_system(g, x, fg, verify=False)
    for frame_h, transposed in ([(fh, False), (fh.transposed(), True)] if fg.n == fg.m else [(fh, False)]):
        bh = block_system(h, xt, frame_h, verify=False)
        for b in (bg, bh):
            if len(set(b.mu.values())) != len(b.mu):
                seen: dict = {}
                for y, mu in b.mu.items():
                    if mu in seen:
                        raise DistinctMuGraphsViolated(seen[mu], y)
                    seen[mu] = y
        inv_h = bh.inverse()
        tries = 0
        for pr in _triple_system_isos(bg.blocks, bh.blocks, fg.n):
            for pc in _triple_system_isos(bg.top_blocks, bh.top_blocks, fg.m):
                tries += 1
                phi = {x: xt}
                for i in range(fg.n):
                    for j in range(fg.m):
                        phi[int(fg.w[i, j])] = int(frame_h.w[pr[i], pc[j]])
                ok = True
                for y, mu in bg.mu.items():
                    tgt = frozenset((pr[i], pc[j]) for i, j in mu)
                    if tgt not in inv_h:
                        ok = False
                        break
                    phi[y] = inv_h[tgt]
                if ok and verify_ball_map(g, x, h, xt, phi):
                    return Ball2Result(phi, {"verified": True, "tries": tries}, pr, pc, transposed)
                if tries >= max_tries:
                    break
            if tries >= max_tries:
                break
    return Ball2Result(None, {"reason": "no_block_alignment"})


# Semi-partial geometries ---------------------------------------------------------------

@dataclass(frozen=True)
class SemiPartialGeometry:
    points: int
    lines: tuple[tuple[int, ...], ...]
    s: int
    t: int
    alpha: int
    mu: int
    diagonal_axiom: bool

    @property
    def parameters(self) -> tuple[int, int, int, int]:
        return (self.s, self.t, self.alpha, self.mu)

    @property
    def partial(self) -> bool:
        return self.mu == (self.t + 1) * self.alpha


def extract_spg(sigma: Graph, line_size: int, lines: Sequence[Sequence[int]] | None = None) -> SemiPartialGeometry:
    """Points are the vertices, lines the maximal cliques of ``line_size``
    (or the given ``lines``, which must all have that size).

    Raises :class:`AxiomViolation` naming the first failing axiom.
    """
    n = sigma.n
    if lines is None:
        lines = [c for c in maximal_cliques(sigma) if len(c) == line_size]
    else:
        lines = sorted(tuple(sorted(int(v) for v in c)) for c in lines)
        if any(len(c) != line_size for c in lines):
            raise AxiomViolation("SPG2", (line_size,))
    if not lines:
        raise AxiomViolation("SPG2", (line_size,))
    inc = np.zeros((n, len(lines)), dtype=np.int64)
    for li, c in enumerate(lines):
        inc[list(c), li] = 1
    share = inc @ inc.T
    np.fill_diagonal(share, 0)
    bad = np.argwhere(share > 1)
    if bad.size:
        raise AxiomViolation("SPG1", tuple(int(v) for v in bad[0]))
    s = line_size - 1
    if s < 1:
        raise AxiomViolation("SPG2", (line_size,))
    per_point = inc.sum(axis=1)
    if len(set(per_point.tolist())) != 1 or per_point[0] < 2:
        p = int(np.argmin(per_point))
        raise AxiomViolation("SPG3", (p, int(per_point[p])))
    t = int(per_point[0]) - 1
    col = share > 0
    # SPG4: point p off line L -> points of L collinear with p, lines through p meeting L
    pts_on = col.astype(np.int64) @ inc                       # n x L
    lines_meeting = inc.T @ inc                                # L x L shared points
    np.fill_diagonal(lines_meeting, 0)
    through = (inc @ (lines_meeting > 0).astype(np.int64))     # n x L: lines through p meeting L
    off = inc == 0
    alpha = None
    for p, li in zip(*np.nonzero(off)):
        a, b = int(pts_on[p, li]), int(through[p, li])
        if a == 0 and b == 0:
            continue
        if a != b or a < 1 or (alpha is not None and a != alpha):
            raise AxiomViolation("SPG4", (int(p), lines[li], a, b))
        alpha = a
    if alpha is None:
        raise AxiomViolation("SPG4", ("no point meets a line",))
    # SPG5
    colI = col.astype(np.int64)
    common = colI @ colI
    noncol = ~col
    np.fill_diagonal(noncol, False)
    vals = set(common[noncol].tolist())
    if not vals:
        raise AxiomViolation("SPG5", ("every pair collinear",))
    if len(vals) != 1 or 0 in vals:
        p, q = next((int(a), int(b)) for a, b in np.argwhere(noncol) if common[a, b] == min(vals))
        raise AxiomViolation("SPG5", (p, q, int(common[p, q])))
    mu = vals.pop()
    diag = _diagonal_axiom(col, inc, lines)
    return SemiPartialGeometry(n, tuple(lines), s, t, alpha, mu, diag is None)


def _diagonal_axiom(col: np.ndarray, inc: np.ndarray, lines) -> tuple | None:
    """First witness ``(x, y, z, u)`` breaking the diagonal axiom, or ``None``."""
    for li, L in enumerate(lines):
        on = inc[:, li].astype(bool)
        for a, b in itertools.combinations(L, 2):
            zs = np.flatnonzero(col[a] & col[b] & ~on)
            if zs.size < 2:
                continue
            blk = col[np.ix_(zs, zs)]
            np.fill_diagonal(blk, True)
            if not blk.all():
                i, j = np.argwhere(~blk)[0]
                return (a, b, int(zs[i]), int(zs[j]))
    return None


# Triangulability ---------------------------------------------------------------------

@dataclass
class TriangulabilityReport:
    condition_i: bool = True
    condition_ii: bool = True
    witnesses: list[dict] = field(default_factory=list)
    lambda_counts: dict[int, list[int]] = field(default_factory=dict)
    bases: int = 0

    @property
    def passed(self) -> bool:
        return self.condition_i and self.condition_ii

    def as_dict(self) -> dict:
        return {"condition_i": self.condition_i, "condition_ii": self.condition_ii,
                "witnesses": self.witnesses[:10], "lambda_counts": {str(k): v for k, v in self.lambda_counts.items()},
                "bases_checked": self.bases}


def triangulability_conditions(g: Graph, automorphisms: Sequence[np.ndarray] | None = None,
                               max_witnesses: int = 10) -> TriangulabilityReport:
    """Check both sufficient conditions for triangulability at every base vertex
    (one per automorphism orbit when verified generators are supplied).

    ``lambda_counts[j]`` collects ``|Gamma_{j-1}(y) & Gamma(x)|`` over all
    ``y`` at distance ``j`` from ``x``.
    """
    if g.n > TRIANGULABILITY_CAP:
        raise SizeCapExceeded(f"triangulability scan is capped at {TRIANGULABILITY_CAP} vertices")
    rep = TriangulabilityReport()
    if automorphisms and all(verify_automorphism(g, p) for p in automorphisms):
        bases = automorphism_orbit_representatives(g, automorphisms)
    else:
        bases = list(range(g.n))
    D = distances_from(g, list(range(g.n)))
    edges = g.edges()
    counts: dict[int, set] = {}
    for x in bases:
        rep.bases += 1
        N = g.neighbors(x)
        if N.size == 0:
            continue
        dx = D[x]
        S = (D[N] == dx[None, :] - 1) & (dx[None, :] >= 2)    # |N| x n
        far = np.flatnonzero(dx >= 2)
        sizes = S[:, far].sum(axis=0)
        for j in np.unique(dx[far]).tolist():
            counts.setdefault(j, set()).update(sizes[dx[far] == j].tolist())
        # condition (i): connectivity inside the local graph, batched over y
        A = g.sparse[N][:, N].toarray().astype(np.float32)
        Sf = S[:, far]
        reach = np.zeros_like(Sf)
        first = np.argmax(Sf, axis=0)
        reach[first, np.arange(len(far))] = Sf[first, np.arange(len(far))]
        while True:
            nxt = reach | ((A @ reach.astype(np.float32)) > 0) & Sf
            if np.array_equal(nxt, reach):
                break
            reach = nxt
        bad = np.flatnonzero((reach != Sf).any(axis=0) | (Sf.sum(axis=0) == 0))
        if bad.size:
            rep.condition_i = False
            for b in bad[:max_witnesses - len(rep.witnesses)]:
                y = int(far[b])
                rep.witnesses.append({"condition": "i", "x": int(x), "y": int(y), "j": int(dx[y]),
                                      "set": N[Sf[:, b]].tolist()})
        # condition (ii)
        u, v = edges[:, 0], edges[:, 1]
        sel = (dx[u] == dx[v]) & (dx[u] >= 2)
        u, v = u[sel], v[sel]
        ok = (S[:, u] & S[:, v]).any(axis=0)
        if not ok.all():
            rep.condition_ii = False
            for k in np.flatnonzero(~ok)[:max(0, max_witnesses - len(rep.witnesses))]:
                rep.witnesses.append({"condition": "ii", "x": int(x), "y1": int(u[k]), "y2": int(v[k]),
                                      "j": int(dx[u[k]])})
    rep.lambda_counts = {j: sorted(s) for j, s in sorted(counts.items())}
    return rep


# Mu-graph census ------------------------------------------------------------------

@dataclass
class MuCensus:
    pairs: int = 0
    violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def mu_hexagon_census(g: Graph, bases: Sequence[int] | None = None, max_violations: int = 20) -> MuCensus:
    """For every base ``x`` and every ``y`` at distance 2, test that the common
    neighbourhood induces a 6-cycle (six vertices, 2-regular, triangle-free)."""
    bases = range(g.n) if bases is None else bases
    out = MuCensus()
    for x in bases:
        x = int(x)
        nx = g.neighbors(x)
        dist = distances_from(g, [x])[0]
        ys = np.flatnonzero(dist == 2)
        if ys.size == 0:
            continue
        A = g.sparse[nx][:, nx].toarray()
        M = g.sparse[nx][:, ys].toarray().astype(bool)          # |N| x |ys|
        size_ok = M.sum(axis=0) == 6
        deg = (A @ M.astype(np.int64))
        deg_ok = ((deg == 2) | ~M).all(axis=0)
        # triangles of the local graph
        iu, ju = np.nonzero(np.triu(A, 1))
        tri = []
        for i, j in zip(iu.tolist(), ju.tolist()):
            for k in np.flatnonzero(A[i] & A[j]).tolist():
                if k > j:
                    tri.append((i, j, k))
        if tri:
            T = np.array(tri)
            has_tri = (M[T[:, 0]] & M[T[:, 1]] & M[T[:, 2]]).any(axis=0)
        else:
            has_tri = np.zeros(len(ys), dtype=bool)
        good = size_ok & deg_ok & ~has_tri
        out.pairs += len(ys)
        for y in ys[~good][:max(0, max_violations - len(out.violations))].tolist():
            out.violations.append((x, int(y)))
    return out
