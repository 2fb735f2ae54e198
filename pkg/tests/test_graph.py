import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drgforge import fixtures as fx
from drgforge.errors import (
    Disconnected,
    GraphFormatError,
    NotAtDistanceTwo,
    SizeCapExceeded,
    VertexOutOfRange,
)
from drgforge.graph import (
    FailureWitness,
    Graph,
    PartialIntersectionNumbers,
    automorphism_orbit_representatives,
    check_distance_regular,
    distance_matrix,
    distance_partition,
    distances_from,
    local_graph,
    local_intersection_numbers,
    maximal_cliques,
    mu_graph,
    read_edge_list,
    spectrum_small,
    trace_moments,
    triple_intersection,
    verify_automorphism,
    write_edge_list,
)
from drgforge.params import IntersectionArray


def test_single_vertex_partition():
    g = Graph.from_edges(1, [])
    p = distance_partition(g, 0)
    assert p.levels == (frozenset({0}),)
    assert p.eccentricity == 0


def test_hexagon_levels():
    g = fx.cycle_graph(6)
    for x in range(6):
        assert distance_partition(g, x).sizes == (1, 2, 2, 1)


def test_bil233_levels(bil233):
    assert distance_partition(bil233.graph, 0).sizes == (1, 49, 294, 168)
    assert distance_partition(bil233.graph, 311).sizes == (1, 49, 294, 168)


def test_partition_vertex_out_of_range():
    with pytest.raises(VertexOutOfRange):
        distance_partition(fx.cycle_graph(4), 4)


def test_local_intersection_numbers(bil233):
    g = bil233.graph
    assert local_intersection_numbers(g, 5, 5) == (0, 0, 49)
    d = distances_from(g, [0])[0]
    y2 = int(np.flatnonzero(d == 2)[0])
    y3 = int(np.flatnonzero(d == 3)[0])
    assert local_intersection_numbers(g, 0, y2)[0] == 6
    assert local_intersection_numbers(g, 0, y3)[0] == 28


def test_local_intersection_disconnected():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(Disconnected):
        local_intersection_numbers(g, 0, 2)


def test_check_drg_examples(bil222, bil233):
    assert check_distance_regular(bil233.graph) == IntersectionArray((49, 36, 16), (1, 6, 28))
    arr = check_distance_regular(bil222.graph)
    assert arr == IntersectionArray((9, 4), (1, 6))
    assert arr.srg_parameters() == (16, 9, 4, 6)


def test_check_drg_path_fails():
    w = check_distance_regular(fx.path_graph(3))
    assert isinstance(w, FailureWitness)
    assert w.value1 != w.value2
    assert "not well-defined" in w.describe()


def test_check_drg_disconnected():
    with pytest.raises(Disconnected):
        check_distance_regular(Graph.from_edges(4, [(0, 1), (2, 3)]))


def test_check_drg_partial_depth():
    # a 4x5 grid is regular, but lambda differs between row and column edges
    g = fx.grid_graph(4, 5)
    part = check_distance_regular(g, depth=0)
    assert isinstance(part, PartialIntersectionNumbers)
    assert part.b == (7,) and part.c == ()
    w = check_distance_regular(g, depth=1)
    assert isinstance(w, FailureWitness) and (w.kind, w.distance) == ("a", 1)
    assert {w.value1, w.value2} == {2, 3}


def test_partial_depth_accepts_what_full_rejects():
    # K_{1,3} plus a pendant path: b_0 is not even defined
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])
    assert isinstance(check_distance_regular(g, depth=0), FailureWitness)
    # the 6-cycle with a chord pair is regular but not distance-regular
    h = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)] + [(0, 3), (1, 4), (2, 5)])
    assert isinstance(check_distance_regular(h, depth=0), PartialIntersectionNumbers)
    assert isinstance(check_distance_regular(h), IntersectionArray)  # K_{3,3}


def test_check_drg_with_translations(bil233):
    gens = bil233.translation_generators()
    assert check_distance_regular(bil233.graph, automorphisms=gens) == bil233.expected_array
    assert automorphism_orbit_representatives(bil233.graph, gens) == [0]


def test_bad_automorphism_rejected():
    g = fx.path_graph(3)
    assert not verify_automorphism(g, np.array([1, 0, 2]))
    with pytest.raises(ValueError):
        check_distance_regular(g, automorphisms=[np.array([1, 0, 2])])


def test_triple_intersection_examples(bil222):
    g = fx.cycle_graph(6)
    assert triple_intersection(g, 0, 1, 0, 1, 1, 2) == 0
    assert triple_intersection(g, 0, 1, 5, 0, 1, 1) == 1
    b = bil222.graph
    x = 0
    tri = None
    for u, v in itertools.combinations(b.neighbors(x).tolist(), 2):
        if b.has_edge(u, v):
            tri = (u, v)
            break
    brute = 0
    d = distances_from(b, [x, *tri])
    for w in range(b.n):
        brute += d[0, w] == 1 and d[1, w] == 1 and d[2, w] == 1
    assert triple_intersection(b, x, *tri, 1, 1, 1) == brute
    # every triangle lies in a unique 4-clique
    assert brute == 1


def test_mu_graph_examples(bil222, bil233):
    g = bil233.graph
    d = distances_from(g, [0])[0]
    for y in np.flatnonzero(d == 2)[:20].tolist():
        mu = mu_graph(g, 0, y)
        assert mu.n == 6 and np.all(mu.degrees == 2) and mu.is_connected()
    d = distances_from(bil222.graph, [0])[0]
    mu = mu_graph(bil222.graph, 0, int(np.flatnonzero(d == 2)[0]))
    assert mu.n == 6 and np.all(mu.degrees == 2) and mu.is_connected()
    grid = fx.grid_graph(4, 4)
    mu = mu_graph(grid, 0, 5)
    assert mu.n == 2 and mu.num_edges == 0
    assert set(mu.labels) == {1, 4}


def test_mu_graph_rejects_non_distance_two():
    g = fx.cycle_graph(6)
    with pytest.raises(NotAtDistanceTwo):
        mu_graph(g, 0, 1)
    with pytest.raises(NotAtDistanceTwo):
        mu_graph(g, 0, 3)


def test_spectrum_examples(bil233):
    s = spectrum_small(fx.grid_graph(7, 7))
    assert s.certified and s.pairs == ((12, 1), (5, 12), (-2, 36))
    assert spectrum_small(fx.complete_graph(3)).pairs == ((2, 1), (-1, 2))
    s = spectrum_small(local_graph(bil233.graph, 0))
    assert s.pairs == ((12, 1), (5, 12), (-2, 36))


def test_spectrum_irrational_reported_as_interval():
    s = spectrum_small(fx.cycle_graph(5))
    assert not s.certified
    assert s.pairs[0] == (2, 1)
    lo, hi = s.pairs[1][0]
    assert lo < (np.sqrt(5) - 1) / 2 < hi


def test_spectrum_cap():
    big = Graph.from_edges(4097, [(i, i + 1) for i in range(4096)])
    with pytest.raises(SizeCapExceeded):
        spectrum_small(big)


def test_distance_matrix_cap():
    big = Graph.from_edges(2**13 + 1, [])
    with pytest.raises(SizeCapExceeded):
        distance_matrix(big)


def test_edge_list_round_trip(tmp_path):
    g = fx.petersen_graph()
    p = tmp_path / "p.txt"
    write_edge_list(g, p)
    h = read_edge_list(p)
    assert h.n == 10 and np.array_equal(h.edges(), g.edges())


@pytest.mark.parametrize("text", ["3 2\n0 0\n1 2\n", "3 2\n0 1\n1 0\n", "3 2\n0 1\n", "x\n", "3 1\n0 5\n"])
def test_edge_list_rejects(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises((GraphFormatError, VertexOutOfRange)):
        read_edge_list(p)


def test_maximal_cliques():
    g = fx.grid_graph(3, 4)
    cl = maximal_cliques(g)
    assert len(cl) == 7
    assert sorted(map(len, cl)) == [3] * 4 + [4] * 3
    assert maximal_cliques(fx.petersen_graph()) == sorted(tuple(e) for e in fx.petersen_graph().edges().tolist())


# property suites --------------------------------------------------------------

@st.composite
def random_graphs(draw, max_n=14):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


@settings(max_examples=80, deadline=None)
@given(random_graphs())
def test_intersection_numbers_sum_to_degree(g):
    d = distances_from(g, range(g.n))
    for x in range(g.n):
        for y in range(g.n):
            if d[x, y] >= 0:
                c, a, b = local_intersection_numbers(g, x, y)
                assert c + a + b == g.degree(y)


@settings(max_examples=80, deadline=None)
@given(random_graphs())
def test_levels_cover_component(g):
    d = distances_from(g, range(g.n))
    for x in range(g.n):
        p = distance_partition(g, x)
        assert sum(p.sizes) == int(np.sum(d[x] >= 0))
        for u, v in g.edges().tolist():
            if d[x, u] >= 0:
                assert abs(int(d[x, u]) - int(d[x, v])) <= 1


@settings(max_examples=60, deadline=None)
@given(random_graphs(12))
def test_spectrum_moment_identities(g):
    vals = np.linalg.eigvalsh(g.dense().astype(float))
    assert abs(vals.sum()) < 1e-8
    assert abs((vals**2).sum() - 2 * g.num_edges) < 1e-8
    s = spectrum_small(g)
    assert sum(m for _, m in s.pairs) == g.n
    if s.certified:
        assert sum(m * t for t, m in s.pairs) == 0
        assert sum(m * t * t for t, m in s.pairs) == 2 * g.num_edges
    assert trace_moments(g, 2) == (g.n, 0, 2 * g.num_edges)


@settings(max_examples=50, deadline=None)
@given(random_graphs(9), st.data())
def test_triple_intersections_sum_to_n(g, data):
    x, y, z = (data.draw(st.integers(0, g.n - 1)) for _ in range(3))
    d = distances_from(g, [x, y, z])
    vals = range(-1, g.n)
    total = sum(triple_intersection(g, x, y, z, l, m, n)
                for l in vals for m in vals for n in vals
                if {l, m, n} and (l in d[0]) and (m in d[1]) and (n in d[2]))
    assert total == g.n


@settings(max_examples=40, deadline=None)
@given(random_graphs(10))
def test_local_graph_has_parent_labels(g):
    for x in range(g.n):
        loc = local_graph(g, x)
        assert list(loc.labels) == g.neighbors(x).tolist()
        for u, v in loc.edges().tolist():
            assert g.has_edge(loc.labels[u], loc.labels[v])
