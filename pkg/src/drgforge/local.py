"""Local-graph spectra: candidate eigenvalues, multiplicities from trace moments,
walk-count integrality, grid recognition and the feasibility pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from scipy.sparse import csgraph

from .errors import (
    BadParameters,
    DegenerateSmallestEigenvalue,
    EnumerationCapExceeded,
    SignNotConstant,
    SizeCapExceeded,
    TooManyEigenvalues,
    UnboundedRegion,
)
from .graph import Graph
from .params import (
    IntersectionArray,
    TerwilligerConstraint,
    bilinear_forms_array,
    clique_bound,
    detect_classical_parameters,
    format_interval,
    intersect_upper,
    terwilliger_constraint,
)

GRID_CAP = 2**16
WALK_L_MAX = 12
SOLVER_NODE_CAP = 200_000


# Candidates ----------------------------------------------------------------------

def _region_of(constraint) -> tuple:
    if isinstance(constraint, TerwilligerConstraint):
        return constraint.admissible
    return tuple((None if lo is None else Fraction(lo), None if hi is None else Fraction(hi)) for lo, hi in constraint)


def capped_region(constraint, extra_upper=None) -> tuple:
    region = _region_of(constraint)
    if extra_upper is not None:
        region = intersect_upper(region, Fraction(extra_upper))
    if any(lo is None or hi is None for lo, hi in region):
        raise UnboundedRegion(f"admissible region {[format_interval(i) for i in region]} is unbounded")
    return region


def integer_candidates(constraint, extra_upper=None) -> list[int]:
    """Integers in the admissible region (optionally capped above), descending.

    ``constraint`` is a :class:`TerwilligerConstraint` or a sequence of closed
    intervals ``(lo, hi)``.
    """
    region = capped_region(constraint, extra_upper)
    out = set()
    for lo, hi in region:
        out.update(range(math.ceil(lo), math.floor(hi) + 1))
    return sorted(out, reverse=True)


def irrational_windows(constraint, extra_upper=None) -> list[tuple[Fraction, Fraction]]:
    """Open intervals of the region that may still hold irrational eigenvalues.

    Local eigenvalues are algebraic integers, and an irrational one has all its
    conjugates among the local eigenvalues too, so all lie in the region.  If
    the non-degenerate part of the region is a single interval inside
    ``[c-1, c+1]`` for an integer ``c``, the product of ``(eta - c)``
    over a conjugate class is a nonzero integer of absolute value below 1,
    which is impossible; in that case nothing is returned.  Otherwise every
    non-degenerate interval is flagged.
    """
    region = capped_region(constraint, extra_upper)
    wide = [(lo, hi) for lo, hi in region if hi > lo]
    if not wide:
        return []
    if len(wide) == 1:
        lo, hi = wide[0]
        c = math.floor(lo) + 1
        if lo >= c - 1 and hi <= c + 1:
            return []
    return wide


# Multiplicities ------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateSpectrum:
    """Principal eigenvalue ``k_loc`` (multiplicity 1) followed by the
    candidates in the order they were given."""

    pairs: tuple[tuple[Fraction, int], ...]
    v: int
    k_loc: int

    @property
    def multiplicities(self) -> tuple[int, ...]:
        """Non-principal multiplicities, in candidate order."""
        return tuple(f for _, f in self.pairs[1:])

    @property
    def support(self) -> tuple[tuple[Fraction, int], ...]:
        return tuple((eta, f) for eta, f in self.pairs if f > 0)

    def moment(self, l: int) -> Fraction:
        return sum((Fraction(f) * Fraction(eta) ** l for eta, f in self.pairs), Fraction(0))

    def satisfies_moments(self) -> bool:
        return (self.moment(0) == self.v and self.moment(1) == 0
                and self.moment(2) == self.v * self.k_loc)

    def __str__(self):
        return ", ".join(f"[{eta}]^{f}" for eta, f in self.support)

    def as_list(self) -> list:
        return [[str(eta), f] for eta, f in self.support]


def _solve(v: int, k: int, cands: Sequence[Fraction], node_cap: int):
    """Non-negative integer solutions of the three moment equations."""
    R = (Fraction(v - 1), Fraction(-k), Fraction(v * k - k * k))
    sols: list[tuple[int, ...]] = []
    nodes = 0

    def tail(rest: Sequence[Fraction], r0, r1, r2) -> list[tuple[int, ...]] | None:
        # exact solve for <= 3 unknowns
        m = len(rest)
        if m == 0:
            return [()] if r0 == r1 == r2 == 0 else []
        rows = [[eta**p for eta in rest] for p in range(3)]
        rhs = [r0, r1, r2]
        # square part from the first m equations (Vandermonde, distinct nodes)
        A = [row[:] for row in rows[:m]]
        b = rhs[:m]
        for col in range(m):
            piv = next(i for i in range(col, m) if A[i][col] != 0)
            A[col], A[piv] = A[piv], A[col]
            b[col], b[piv] = b[piv], b[col]
            for i in range(m):
                if i != col and A[i][col] != 0:
                    f = A[i][col] / A[col][col]
                    A[i] = [a - f * c for a, c in zip(A[i], A[col])]
                    b[i] -= f * b[col]
        xs = [b[i] / A[i][i] for i in range(m)]
        if any(x.denominator != 1 or x < 0 for x in xs):
            return []
        for p in range(m, 3):
            if sum(x * rows[p][j] for j, x in enumerate(xs)) != rhs[p]:
                return []
        return [tuple(int(x) for x in xs)]

    def feasible(rest, r0, r1, r2) -> bool:
        if r0 < 0:
            return False
        if not rest:
            return r0 == r1 == r2 == 0
        lo, hi = min(rest), max(rest)
        if r1 < lo * r0 or r1 > hi * r0:
            return False
        if r0 > 0 and r2 * r0 < r1 * r1:
            return False
        if r0 == 0:
            return r1 == 0 and r2 == 0
        return (lo + hi) * r1 - r2 - lo * hi * r0 >= 0

    def rec(i: int, prefix: list[int], r0, r1, r2) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            return False
        rest = cands[i:]
        if not feasible(rest, r0, r1, r2):
            return True
        if len(rest) <= 3:
            for t in tail(rest, r0, r1, r2):
                sols.append(tuple(prefix) + t)
            return True
        eta = cands[i]
        hi_f = int(r0)
        if eta != 0:
            hi_f = min(hi_f, int(r2 / (eta * eta)))
        for f in range(hi_f + 1):
            if not rec(i + 1, prefix + [f], r0 - f, r1 - f * eta, r2 - f * eta * eta):
                return False
        return True

    complete = rec(0, [], *R)
    return sols, not complete


def solve_local_multiplicities(v: int, k_loc: int, candidates, node_cap: int = SOLVER_NODE_CAP) -> list[CandidateSpectrum]:
    """All spectra ``[k_loc]^1`` plus non-negative integer multiplicities on the
    candidates satisfying the trace moments for walks of length 0, 1, 2.

    A candidate equal to ``k_loc`` is ignored (the principal eigenvalue is
    simple).  Raises :class:`EnumerationCapExceeded` if the search is cut off.
    """
    if v < 2:
        raise BadParameters("local graph needs at least 2 vertices")
    cands = [Fraction(c) for c in candidates if Fraction(c) != k_loc]
    if len(set(cands)) != len(cands):
        raise BadParameters("candidates must be distinct")
    sols, capped = _solve(v, k_loc, cands, node_cap)
    if capped:
        raise EnumerationCapExceeded(f"multiplicity search exceeded {node_cap} nodes")
    out = []
    for fs in sorted(sols):
        pairs = ((Fraction(k_loc), 1),) + tuple(zip(cands, fs))
        out.append(CandidateSpectrum(pairs, v, k_loc))
    return out


# Walk counts ------------------------------------------------------------------------

def walk_moment(S: CandidateSpectrum, l: int) -> Fraction:
    """``sum f_i eta_i^l``: closed walks of length ``l`` summed over all vertices."""
    return S.moment(l)


def walks_per_vertex(S: CandidateSpectrum, l: int) -> Fraction:
    """``(1/(2v)) sum f_i eta_i^l``.

    For ``l = 3`` this is the number of triangles through each vertex, valid
    because a connected regular graph with at most four distinct eigenvalues
    is walk-regular.
    """
    if len(S.support) > 4:
        raise TooManyEigenvalues(f"{len(S.support)} distinct eigenvalues; walk-regularity not implied")
    return walk_moment(S, l) / (2 * S.v)


def walk_count_is_integral(S: CandidateSpectrum, l: int) -> bool:
    """Integrality test for closed walks of length ``l`` through one vertex.

    Odd closed walks are never their own reversal, so they pair up and
    ``sum/(2v)`` must be integral; for even ``l`` only ``sum/v`` must be.
    """
    total = walk_moment(S, l)
    denom = 2 * S.v if l % 2 else S.v
    return (total / denom).denominator == 1


def walk_period_certificate(S: CandidateSpectrum, start: int = 3, max_steps: int = 100_000) -> dict:
    """Decide integrality for all ``l >= start`` by scanning residues mod ``2v``
    until the state ``(l mod 2, eta_i^l mod 2v)`` repeats."""
    if any(Fraction(eta).denominator != 1 for eta, _ in S.support):
        return {"certified": False, "reason": "non-integer eigenvalue"}
    mod = 2 * S.v
    etas = [int(eta) % mod for eta, _ in S.support]
    fs = [f for _, f in S.support]
    powers = [pow(e, start, mod) for e in etas]
    seen = {}
    l = start
    first_failure = None
    while l < start + max_steps:
        state = (l % 2, tuple(powers))
        if state in seen:
            return {"certified": first_failure is None, "period_start": seen[state],
                    "period": l - seen[state], "first_failure": first_failure}
        seen[state] = l
        total = sum(f * p for f, p in zip(fs, powers)) % mod
        ok = total % (mod if l % 2 else S.v) == 0
        if not ok and first_failure is None:
            first_failure = l
        powers = [p * e % mod for p, e in zip(powers, etas)]
        l += 1
    return {"certified": False, "reason": "no repeat within step limit", "first_failure": first_failure}


@dataclass
class WalkReport:
    spectrum: CandidateSpectrum
    applicable: bool
    checks: list[dict] = field(default_factory=list)
    certificate: dict | None = None
    local_triangles_total: Fraction | None = None

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return True
        ok = all(c["integral"] for c in self.checks)
        if self.certificate is not None and self.certificate.get("first_failure") is not None:
            ok = False
        return ok

    def first_failure(self) -> dict | None:
        return next((c for c in self.checks if not c["integral"]), None)

    def as_dict(self) -> dict:
        return {
            "spectrum": self.spectrum.as_list(),
            "walk_regular": self.applicable,
            "checks": [{**c, "value": str(c["value"])} for c in self.checks],
            "all_l_certificate": self.certificate,
            "local_triangles_total": None if self.local_triangles_total is None else str(self.local_triangles_total),
            "passed": self.passed,
        }


def walk_checks(S: CandidateSpectrum, l_max: int = WALK_L_MAX) -> WalkReport:
    if len(S.support) > 4:
        return WalkReport(S, False)
    rep = WalkReport(S, True)
    for l in range(3, l_max + 1):
        total = walk_moment(S, l)
        rep.checks.append({
            "l": l,
            "numerator": int(total),
            "denominator": 2 * S.v,
            "value": walks_per_vertex(S, l),
            "integral": walk_count_is_integral(S, l),
        })
    rep.certificate = walk_period_certificate(S)
    rep.local_triangles_total = walk_moment(S, 3) / 6
    return rep


# Grid recognition -------------------------------------------------------------------

@dataclass(frozen=True)
class GridStructure:
    n: int
    m: int
    rows: tuple[tuple[int, ...], ...]      # n cliques of size m
    cols: tuple[tuple[int, ...], ...]      # m cliques of size n


def _grid_structure(g: Graph) -> GridStructure | None:
    """Rigorous recognition of ``K_n x K_m`` with ``n >= m >= 2``.

    Each neighbourhood must split into exactly two cliques with no edges
    between them.  The resulting cliques must fall into two families such that
    each vertex lies in one clique of each family and cliques of different
    families meet in exactly one vertex.
    """
    if g.n > GRID_CAP:
        raise SizeCapExceeded(f"grid recognition is capped at {GRID_CAP} vertices")
    if g.n < 4 or not g.is_connected():
        return None
    cliques: dict[tuple[int, ...], int] = {}
    member: list[list[int]] = [[] for _ in range(g.n)]
    for v in range(g.n):
        nb = g.neighbors(v)
        sub = g.induced_subgraph(nb)
        ncomp, lab = csgraph.connected_components(sub.sparse, directed=False)
        if ncomp != 2:
            return None
        for c in range(2):
            part = nb[lab == c]
            if sub.degrees[lab == c].min() != len(part) - 1:
                return None
            key = tuple(sorted([v, *part.tolist()]))
            cid = cliques.setdefault(key, len(cliques))
            member[v].append(cid)
    keys = list(cliques)
    if any(len(set(m)) != 2 for m in member):
        return None
    # two-colour the clique-intersection graph
    colour = [-1] * len(keys)
    colour[0] = 0
    stack = [0]
    adj: list[set[int]] = [set() for _ in keys]
    for a, b in member:
        adj[a].add(b)
        adj[b].add(a)
    while stack:
        c = stack.pop()
        for o in adj[c]:
            if colour[o] == -1:
                colour[o] = 1 - colour[c]
                stack.append(o)
            elif colour[o] == colour[c]:
                return None
    if -1 in colour:
        return None
    fam = [sorted(keys[i] for i in range(len(keys)) if colour[i] == t) for t in (0, 1)]
    sizes = [{len(c) for c in f} for f in fam]
    if any(len(s) != 1 for s in sizes):
        return None
    s0, s1 = sizes[0].pop(), sizes[1].pop()
    # family 0 has len(fam[0]) cliques of size s0 and these partition the vertices
    if len(fam[0]) * s0 != g.n or len(fam[1]) * s1 != g.n or len(fam[0]) != s1 or len(fam[1]) != s0:
        return None
    for r in fam[0]:
        rs = set(r)
        if any(len(rs.intersection(c)) != 1 for c in fam[1]):
            return None
    # rows: the family of m-cliques (m = smaller side)
    if s0 <= s1:
        rows, cols = fam[0], fam[1]
    else:
        rows, cols = fam[1], fam[0]
    n, m = len(rows), len(cols)
    return GridStructure(n, m, tuple(rows), tuple(cols))


def grid_structure(g: Graph) -> GridStructure | None:
    st = _grid_structure(g)
    if st is not None and st.n == st.m == 4:
        from .fixtures import grid_graph
        from .isomorphism import is_isomorphic
        if is_isomorphic(g, grid_graph(4, 4)) is None:
            return None
    return st


def grid_recognize(g: Graph) -> tuple[int, int] | None:
    """``(n, m)`` with ``n >= m`` if ``g`` is the ``(n x m)``-grid, else ``None``."""
    st = grid_structure(g)
    return None if st is None else (st.n, st.m)


# Feasibility ---------------------------------------------------------------------------

@dataclass
class Verdict:
    array: IntersectionArray
    status: str = "undecided"
    reasons: list[dict] = field(default_factory=list)
    classical_params: object = None
    roots: tuple | None = None
    leading_sign: int | None = None
    clique_bound: Fraction | None = None
    region: tuple | None = None
    candidates: list[int] | None = None
    irrational_windows: list | None = None
    spectra: list[CandidateSpectrum] = field(default_factory=list)
    walk_reports: list[WalkReport] = field(default_factory=list)
    surviving: list[CandidateSpectrum] = field(default_factory=list)
    witness: dict | None = None

    def as_dict(self) -> dict:
        cp = self.classical_params
        return {
            "array": str(self.array),
            "classical_params": None if cp is None else [cp.D, cp.b, str(cp.alpha), str(cp.beta)],
            "roots": None if self.roots is None else [str(r) for r in self.roots],
            "leading_sign": self.leading_sign,
            "clique_bound": None if self.clique_bound is None else str(self.clique_bound),
            "region": None if self.region is None else [format_interval(i) for i in self.region],
            "candidates": self.candidates,
            "irrational_windows": None if self.irrational_windows is None
            else [[str(lo), str(hi)] for lo, hi in self.irrational_windows],
            "spectra": [s.as_list() for s in self.spectra],
            "walk_checks": [w.as_dict() for w in self.walk_reports],
            "surviving_spectra": [s.as_list() for s in self.surviving],
            "witness": self.witness,
            "status": self.status,
            "reasons": self.reasons,
        }


def _prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = next(d for d in range(2, n + 1) if n % d == 0)
    while n % p == 0:
        n //= p
    return n == 1


def bilinear_witness(A: IntersectionArray) -> dict | None:
    """``(q, e, d)`` if ``A`` is the array of a bilinear forms graph."""
    cp = detect_classical_parameters(A)
    if cp is None or A.D < 2 or not _prime_power(cp.b):
        return None
    q = cp.b
    e = round(math.log(cp.beta + 1, q)) if cp.beta > 0 else 0
    for ee in (e - 1, e, e + 1):
        if ee >= A.D and bilinear_forms_array(q, ee, A.D) == A:
            return {"construction": "bilinear_forms", "q": q, "e": ee, "d": A.D}
    return None


def feasibility_verdict(A: IntersectionArray, l_max: int = WALK_L_MAX, node_cap: int = SOLVER_NODE_CAP) -> Verdict:
    V = Verdict(A)
    V.witness = bilinear_witness(A)
    if V.witness is not None:
        V.reasons.append({"rule": "witness_construction", **V.witness})
    _pipeline(V, A, l_max, node_cap)
    if V.witness is not None:
        V.status = "feasible-witnessed"
    return V


def _pipeline(V: Verdict, A: IntersectionArray, l_max: int, node_cap: int) -> None:
    cp = detect_classical_parameters(A)
    V.classical_params = cp
    if cp is None:
        V.reasons.append({"rule": "no_classical_parameters"})
        return
    if A.D < 3:
        V.reasons.append({"rule": "diameter_below_3", "D": A.D})
        return
    try:
        tc = terwilliger_constraint(cp)
    except SignNotConstant as exc:
        V.reasons.append({"rule": "leading_sign_not_constant", "signs": exc.signs})
        return
    V.roots, V.leading_sign = tc.roots, tc.leading_sign
    try:
        V.clique_bound = clique_bound(A)
    except DegenerateSmallestEigenvalue as exc:
        V.reasons.append({"rule": "clique_bound_unavailable", "detail": str(exc)})
    try:
        V.region = capped_region(tc, V.clique_bound)
    except UnboundedRegion:
        V.reasons.append({"rule": "unbounded_region"})
        return
    V.candidates = integer_candidates(tc, V.clique_bound)
    V.irrational_windows = irrational_windows(tc, V.clique_bound)
    if V.irrational_windows:
        V.reasons.append({"rule": "irrational_eigenvalues_not_excluded",
                          "windows": [[str(lo), str(hi)] for lo, hi in V.irrational_windows]})
    k_loc = A.a[1]
    v_loc = A.k
    try:
        V.spectra = solve_local_multiplicities(v_loc, k_loc, V.candidates, node_cap=node_cap)
    except EnumerationCapExceeded:
        V.reasons.append({"rule": "candidate_enumeration_capped", "node_cap": node_cap})
        return
    if not V.spectra:
        V.reasons.append({"rule": "no_nonnegative_integer_multiplicities",
                          "v": v_loc, "k_loc": k_loc, "candidates": V.candidates})
    for S in V.spectra:
        rep = walk_checks(S, l_max)
        V.walk_reports.append(rep)
        if rep.passed:
            V.surviving.append(S)
            continue
        bad = rep.first_failure()
        if bad is None:
            bad = {"l": rep.certificate["first_failure"]}
            V.reasons.append({"rule": "walk_non_integrality", "spectrum": S.as_list(), "l": bad["l"]})
        else:
            V.reasons.append({"rule": "walk_non_integrality", "spectrum": S.as_list(), "l": bad["l"],
                              "value": f"{bad['numerator']}/{bad['denominator']}"})
    unchecked = sum(1 for w in V.walk_reports if not w.applicable)
    if unchecked:
        V.reasons.append({"rule": "walk_regularity_not_implied", "count": unchecked})
    if not V.surviving and not V.irrational_windows:
        V.status = "infeasible"
    elif V.surviving:
        V.reasons.append({"rule": "spectra_survive", "count": len(V.surviving)})
