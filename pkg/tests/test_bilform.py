import numpy as np
import pytest

from drgforge import field as ff
from drgforge.bilform import (
    construct,
    edge_cover_counts,
    expected_intersection_array,
    grand_cliques,
    is_clique,
    is_maximal_clique,
    rank_oracle_edges,
    verify_construction,
)
from drgforge.errors import BadParameters, EnumerationCapExceeded
from drgforge.graph import check_distance_regular, distance_partition
from drgforge.params import IntersectionArray


def test_construct_222(bil222):
    g = bil222.graph
    assert g.n == 16
    assert check_distance_regular(g).srg_parameters() == (16, 9, 4, 6)


def test_construct_233(bil233):
    assert bil233.graph.n == 512
    assert bil233.expected_array == IntersectionArray((49, 36, 16), (1, 6, 28))


def test_construct_243():
    B = construct(2, 4, 3)
    assert B.graph.n == 4096
    assert check_distance_regular(B.graph, automorphisms=B.translation_generators()) == \
        IntersectionArray((105, 84, 48), (1, 6, 28))


def test_expected_array_322():
    assert expected_intersection_array(3, 2, 2) == IntersectionArray((32, 18), (1, 12))


@pytest.mark.parametrize("q,e,d", [(2, 1, 1), (2, 2, 3), (2, 3, 1)])
def test_bad_parameters(q, e, d):
    with pytest.raises(BadParameters):
        construct(q, e, d)


def test_enumeration_cap():
    with pytest.raises(EnumerationCapExceeded):
        construct(2, 5, 5)
    with pytest.raises(EnumerationCapExceeded):
        construct(2, 3, 3, cap=100)


@pytest.mark.parametrize("q,e,d", [(2, 2, 2), (3, 2, 2), (2, 3, 2), (4, 2, 2), (2, 3, 3), (3, 3, 2)])
def test_neighbour_generation_matches_pairwise_rank(q, e, d):
    B = construct(q, e, d)
    assert np.array_equal(rank_oracle_edges(q, e, d), B.graph.edges())


def test_adjacency_is_rank_one_difference(bil322):
    ctx = bil322.ctx
    rng = np.random.default_rng(3)
    for u, v in rng.integers(0, bil322.graph.n, size=(200, 2)).tolist():
        if u == v:
            continue
        diff = ff.mat_sub(ctx, bil322.matrix(u), bil322.matrix(v))
        assert bil322.graph.has_edge(u, v) == (ff.rank(ctx, diff) == 1)


def test_translations_are_automorphisms(bil322):
    from drgforge.graph import verify_automorphism
    for t in (1, 5, 80):
        assert verify_automorphism(bil322.graph, bil322.translation(t))


@pytest.mark.parametrize("q,e,d", [(2, 2, 2), (2, 3, 3), (3, 3, 2), (2, 3, 2), (4, 2, 2)])
def test_verify_construction_all_pass(q, e, d):
    checks = verify_construction(construct(q, e, d))
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_verify_construction_diameter_two(bil222):
    checks = {c.id: c for c in verify_construction(bil222)}
    assert checks["diameter"].passed and "D = 2" in checks["diameter"].detail


def test_grand_clique_sizes(bil233):
    assert grand_cliques(bil233).sizes() == (8, 8)
    assert grand_cliques(construct(2, 4, 3)).sizes() == (16, 8)


@pytest.mark.parametrize("q,e,d", [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 3, 3)])
def test_grand_cliques_cover_every_edge_once(q, e, d):
    B = construct(q, e, d)
    gc = grand_cliques(B)
    for fam in (gc.family_R, gc.family_C):
        assert np.all(edge_cover_counts(B.graph, fam) == 1)
        for cl in fam[:: max(1, len(fam) // 25)]:
            assert is_maximal_clique(B.graph, cl)


def test_222_edge_count(bil222):
    assert bil222.graph.num_edges == 72


def test_clique_helpers():
    from drgforge import fixtures as fx
    g = fx.grid_graph(3, 3)
    assert is_clique(g, [0, 1, 2])
    assert is_maximal_clique(g, [0, 1, 2])
    assert not is_maximal_clique(g, [0, 1])
    assert not is_clique(g, [0, 1, 4])


@pytest.mark.parametrize("x", [0, 100, 511])
def test_vertex_transitive_levels(bil233, x):
    assert distance_partition(bil233.graph, x).sizes == (1, 49, 294, 168)
