from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drgforge import fixtures as fx
from drgforge.bilform import construct
from drgforge.errors import BadParameters, EnumerationCapExceeded, TooManyEigenvalues, UnboundedRegion
from drgforge.graph import Graph, local_graph, spectrum_small
from drgforge.local import (
    CandidateSpectrum,
    feasibility_verdict,
    grid_recognize,
    grid_structure,
    integer_candidates,
    irrational_windows,
    solve_local_multiplicities,
    walk_checks,
    walk_count_is_integral,
    walk_period_certificate,
    walks_per_vertex,
)
from drgforge.params import (
    ClassicalParameters,
    IntersectionArray,
    bilinear_forms_array,
    family_array,
    terwilliger_constraint,
)

F = Fraction


def _spectrum(v, k, pairs):
    return CandidateSpectrum(((F(k), 1),) + tuple((F(t), f) for t, f in pairs), v, k)


M6 = _spectrum(35, 10, [(3, 13), (-1, 7), (-2, 0), (-3, 14)])
M7 = _spectrum(42, 11, [(4, 12), (-1, 14), (-2, 0), (-3, 15)])


def test_integer_candidates_examples():
    assert integer_candidates([(-3, -1), (5, 5)]) == [5, -1, -2, -3]
    assert integer_candidates([(-3, -1), (3, 5)], 3) == [3, -1, -2, -3]
    assert integer_candidates([(-3, -1), (3, 5)], 4) == [4, 3, -1, -2, -3]


def test_integer_candidates_from_constraint():
    tc = terwilliger_constraint(ClassicalParameters(3, 2, F(1), F(7)))
    assert integer_candidates(tc) == [5, -1, -2, -3]


def test_unbounded_region():
    with pytest.raises(UnboundedRegion):
        integer_candidates([(None, -1), (3, 5)])


def test_irrational_window_exclusion():
    assert irrational_windows([(-3, -1), (5, 5)]) == []
    assert irrational_windows([(-3, -1), (3, 5)], 3) == []
    # two wide pieces cannot be handled by the single-window argument
    assert irrational_windows([(-3, -1), (3, 5)]) == [(-3, -1), (3, 5)]
    assert irrational_windows([(-5, -1)]) == [(-5, -1)]


def test_solver_examples():
    sols = solve_local_multiplicities(35, 10, [3, -1, -2, -3])
    assert [s.multiplicities for s in sols] == [(13, 7, 0, 14)]
    sols = solve_local_multiplicities(49, 12, [5, -1, -2, -3])
    assert [s.multiplicities for s in sols] == [(12, 0, 36, 0)]
    sols = solve_local_multiplicities(42, 11, [4, -1, -2, -3])
    assert [s.multiplicities for s in sols] == [(12, 14, 0, 15)]


def test_solver_ignores_principal_candidate_and_rejects_duplicates():
    a = solve_local_multiplicities(49, 12, [12, 5, -1, -2, -3])
    b = solve_local_multiplicities(49, 12, [5, -1, -2, -3])
    assert [s.pairs for s in a] == [s.pairs for s in b]
    with pytest.raises(BadParameters):
        solve_local_multiplicities(49, 12, [5, 5, -1])
    with pytest.raises(BadParameters):
        solve_local_multiplicities(1, 0, [0])


def test_solver_no_solution():
    assert solve_local_multiplicities(10, 3, [1]) == []


def test_solver_node_cap():
    with pytest.raises(EnumerationCapExceeded):
        solve_local_multiplicities(200, 20, list(range(-10, 11)), node_cap=50)


def test_walk_examples():
    assert walks_per_vertex(M6, 3) == F(966, 70)
    assert not walk_count_is_integral(M6, 3)
    assert walks_per_vertex(M7, 3) == F(1680, 84) == 20
    assert walks_per_vertex(M6, 0) == F(1, 2)


def test_walks_need_four_eigenvalues():
    S = _spectrum(10, 3, [(2, 1), (1, 2), (0, 3), (-1, 2), (-2, 1)])
    with pytest.raises(TooManyEigenvalues):
        walks_per_vertex(S, 3)
    assert not walk_checks(S).applicable


def test_walk_parity_rule_on_real_graph():
    # Petersen: 3-regular, 3 eigenvalues; closed walks per vertex are integers
    g = fx.petersen_graph()
    s = spectrum_small(g)
    S = CandidateSpectrum(tuple((F(t), m) for t, m in s.pairs), g.n, 3)
    a = g.dense().astype(np.int64)
    p = np.eye(g.n, dtype=np.int64)
    for l in range(1, 11):
        p = p @ a
        assert S.moment(l) == int(np.trace(p))
        assert int(p[0, 0]) * g.n == int(np.trace(p))
        if l >= 3:
            assert walk_count_is_integral(S, l)


def test_m7_walks_and_period():
    rep = walk_checks(M7, 12)
    assert rep.passed
    odd = {c["l"]: c["value"] for c in rep.checks if c["l"] % 2}
    assert odd[3] == 20
    assert all(v.denominator == 1 for v in odd.values())
    cert = walk_period_certificate(M7)
    assert cert["certified"] and cert["first_failure"] is None


def test_m6_period_reports_failure():
    cert = walk_period_certificate(M6)
    assert not cert["certified"] and cert["first_failure"] == 3


def test_grid_recognize_examples(bil233):
    assert grid_recognize(fx.grid_graph(7, 7)) == (7, 7)
    assert grid_recognize(fx.grid_graph(3, 5)) == (5, 3)
    assert grid_recognize(fx.grid_graph(4, 4)) == (4, 4)
    assert grid_recognize(fx.shrikhande_graph()) is None
    assert grid_recognize(fx.petersen_graph()) is None
    assert grid_recognize(fx.cycle_graph(4)) == (2, 2)
    B = construct(2, 4, 3)
    for x in (0, 1234, 4095):
        assert grid_recognize(local_graph(B.graph, x)) == (15, 7)


def test_grid_structure_rows_and_cols():
    st_ = grid_structure(fx.grid_graph(5, 3))
    assert (st_.n, st_.m) == (5, 3)
    assert len(st_.rows) == 5 and all(len(r) == 3 for r in st_.rows)
    assert len(st_.cols) == 3 and all(len(c) == 5 for c in st_.cols)


def test_grid_rejects_near_misses():
    g = fx.grid_graph(3, 3)
    e = [tuple(x) for x in g.edges().tolist()]
    assert grid_recognize(Graph.from_edges(9, e[1:])) is None
    assert grid_recognize(fx.complete_graph(5)) is None


def test_verdict_m6():
    V = feasibility_verdict(family_array(6))
    assert V.status == "infeasible"
    assert sorted(V.roots) == [-3, -1, 3, 5]
    assert V.leading_sign == -1
    assert V.clique_bound == 3
    assert V.candidates == [3, -1, -2, -3]
    assert [s.multiplicities for s in V.spectra] == [(13, 7, 0, 14)]
    walk = [r for r in V.reasons if r["rule"] == "walk_non_integrality"]
    assert walk == [{"rule": "walk_non_integrality", "spectrum": V.spectra[0].as_list(), "l": 3,
                     "value": "966/70"}]
    assert V.walk_reports[0].local_triangles_total == 161


def test_verdict_m7():
    V = feasibility_verdict(family_array(7))
    assert V.status == "undecided"
    assert [str(s) for s in V.surviving] == ["[11]^1, [4]^12, [-1]^14, [-3]^15"]
    rep = V.walk_reports[0]
    assert all(walk_count_is_integral(V.surviving[0], l) for l in range(3, 13))
    assert rep.passed
    assert V.witness is None


def test_verdict_bilinear_witnessed():
    V = feasibility_verdict(bilinear_forms_array(2, 3, 3))
    assert V.status == "feasible-witnessed"
    assert V.witness == {"construction": "bilinear_forms", "q": 2, "e": 3, "d": 3}
    assert [s.multiplicities for s in V.surviving] == [(12, 0, 36, 0)]


def test_verdict_reduced_rules():
    V = feasibility_verdict(IntersectionArray((9, 4), (1, 6)))
    assert V.status == "feasible-witnessed"
    V = feasibility_verdict(IntersectionArray((2, 1), (1, 1)))
    assert V.status == "undecided" and V.reasons[0]["rule"] == "no_classical_parameters"


def test_verdict_json_shape():
    d = feasibility_verdict(family_array(6)).as_dict()
    for key in ("array", "classical_params", "roots", "leading_sign", "clique_bound", "candidates",
                "spectra", "walk_checks", "status", "reasons"):
        assert key in d
    assert d["array"] == "{35,24,8;1,6,28}"


@pytest.mark.parametrize("e,d", [(3, 3), (4, 4)])
def test_solver_reproduces_actual_local_spectrum(e, d):
    arr = bilinear_forms_array(2, e, d)
    n = 2**d - 1
    from drgforge.fixtures import grid_graph
    actual = spectrum_small(grid_graph(n, n)) if d == 4 else spectrum_small(local_graph(construct(2, e, d).graph, 0))
    sols = solve_local_multiplicities(arr.k, arr.a[1], [2**d - 3, -1, -2, -3])
    assert len(sols) == 1
    assert {int(t): f for t, f in sols[0].support} == dict(actual.pairs)


@pytest.mark.parametrize("q,e,d", [(2, 2, 2), (2, 3, 2), (2, 3, 3), (3, 2, 2)])
def test_local_eigenvalues_in_closed_intervals(q, e, d):
    B = construct(q, e, d)
    ivs = [(-q - 1, -1), (q**d - q - 1, q**e - q - 1)]
    verts = range(B.graph.n) if B.graph.n <= 64 else range(0, B.graph.n, 37)
    for x in verts:
        s = spectrum_small(local_graph(B.graph, x))
        top = s.pairs[0][0]
        for t, _ in s.pairs[1:]:
            assert isinstance(t, int)
            assert any(lo <= t <= hi for lo, hi in ivs), (x, t)
        assert top == B.expected_array.a[1]


@pytest.mark.parametrize("e,d", [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3)])
def test_local_graph_is_grid(e, d):
    B = construct(2, e, d)
    for x in range(0, B.graph.n, max(1, B.graph.n // 40)):
        assert grid_recognize(local_graph(B.graph, x)) == (2**e - 1, 2**d - 1)


# properties ---------------------------------------------------------------------

@st.composite
def moment_problems(draw):
    v = draw(st.integers(4, 40))
    k = draw(st.integers(1, v - 1))
    cands = draw(st.lists(st.integers(-6, 8), min_size=1, max_size=4, unique=True))
    return v, k, cands


@settings(max_examples=150, deadline=None)
@given(moment_problems())
def test_solutions_satisfy_moments(prob):
    v, k, cands = prob
    for S in solve_local_multiplicities(v, k, cands):
        assert S.satisfies_moments()
        # re-check independently of the helper
        assert sum(f for _, f in S.pairs) == v
        assert sum(f * t for t, f in S.pairs) == 0
        assert sum(f * t * t for t, f in S.pairs) == v * k
        assert all(f >= 0 for _, f in S.pairs)


@settings(max_examples=100, deadline=None)
@given(moment_problems(), st.integers(1, 8))
def test_even_walk_moments_nonnegative(prob, j):
    v, k, cands = prob
    for S in solve_local_multiplicities(v, k, cands):
        if len(S.support) <= 4:
            assert walks_per_vertex(S, 2 * j) >= 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 9), st.integers(0, 6)), min_size=1, max_size=3))
def test_period_certificate_agrees_with_direct_scan(pairs):
    pairs = [(t, f) for t, f in dict(pairs).items()]
    v = 1 + sum(f for _, f in pairs)
    S = CandidateSpectrum(((F(11), 1),) + tuple((F(t), f) for t, f in pairs if t != 11), v, 11)
    if len(S.support) > 4:
        return
    cert = walk_period_certificate(S)
    direct = next((i for i in range(3, 400) if not walk_count_is_integral(S, i)), None)
    assert cert.get("first_failure") == direct
