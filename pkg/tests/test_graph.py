import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import max_trifree_milp
from ucov.errors import DomainError, ResourceLimitError
from ucov.geometry import self_polar_count
from ucov.graph import (
    build_graph,
    graph_triangles,
    greedy_trifree,
    is_triangle_free,
    is_triangle_free_matrix,
    m_formula,
    read_dimacs,
    subset_from_json,
    subset_to_json,
    trifree_exact,
    trifree_search,
    verify_subset,
    write_dimacs,
    triangle_census,
    triangle_census_matrix,
)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_graph_structure(q):
    g = build_graph(q)
    pl = g.plane
    assert g.n == q**4 + q * q + 1
    assert int(g.loops.sum()) == q**3 + 1
    assert (g.adj == g.adj.T).all()
    # closed neighbourhood is the polar line
    assert (g.adj.sum(axis=1) == q * q + 1).all()
    degs = np.array([g.degree(v) for v in range(g.n)])
    assert (degs[g.loops] == q * q).all() and (degs[~g.loops] == q * q + 1).all()
    ab = pl.absolute_ids
    sub = g.adj[np.ix_(ab, ab)].copy()
    np.fill_diagonal(sub, False)
    assert not sub.any()


def test_vertex_examples():
    assert (build_graph(2).n, int(build_graph(2).loops.sum())) == (21, 9)
    assert (build_graph(3).n, int(build_graph(3).loops.sum())) == (91, 28)
    with pytest.raises(ResourceLimitError):
        build_graph(11)


def _brute_triangles(g):
    adj = g.adj.copy()
    np.fill_diagonal(adj, False)
    out = []
    for i, j, k in itertools.combinations(range(g.n), 3):
        if adj[i, j] and adj[i, k] and adj[j, k]:
            out.append((i, j, k))
    return out


@pytest.mark.parametrize("q", [2, 3])
def test_triangle_bijection_exhaustive(q):
    g = build_graph(q)
    brute = _brute_triangles(g)
    assert len(brute) == triangle_census(g) == triangle_census_matrix(g) == self_polar_count(q)
    assert sorted(map(tuple, np.sort(graph_triangles(g), axis=1).tolist())) == brute
    assert sorted(map(tuple, g.plane.self_polar_triangles.tolist())) == brute
    assert not g.loops[np.array(brute)].any()


@pytest.mark.parametrize("q,n", [(4, 416), (5, 1750)])
def test_triangle_census_larger(q, n):
    g = build_graph(q)
    assert triangle_census(g) == triangle_census_matrix(g) == n


def test_m_formula_values():
    assert [m_formula(q) for q in (7, 8, 9)] == [686, 2048, 872]
    assert m_formula(3) == 38 and m_formula(2) == 8
    assert m_formula(5) == 250 and m_formula(4) == 128


def test_trifree_exact_q2_matches_search_and_milp():
    g = build_graph(2)
    ex = trifree_exact(g)
    assert ex.optimum == 8 and ex.subset.verified
    assert len(trifree_search(g, seed=0, budget=20000).subset) == ex.optimum
    na = g.plane.nonabsolute_ids
    pos = {int(v): i for i, v in enumerate(na)}
    tris = [[pos[int(x)] for x in t] for t in graph_triangles(g)]
    assert max_trifree_milp(len(na), tris) == 8


def test_trifree_exact_q3():
    g = build_graph(3)
    ex = trifree_exact(g)
    assert ex.optimum == 41 >= m_formula(3)
    assert is_triangle_free_matrix(g, ex.subset.ids)
    na = g.plane.nonabsolute_ids
    pos = {int(v): i for i, v in enumerate(na)}
    tris = [[pos[int(x)] for x in t] for t in graph_triangles(g)]
    assert max_trifree_milp(len(na), tris) == 41
    # the hitting set meets every triangle
    hit = set(ex.hitting_set)
    assert all(hit & set(t.tolist()) for t in graph_triangles(g))


def test_trifree_exact_size_limit():
    with pytest.raises(ResourceLimitError):
        trifree_exact(build_graph(4))
    with pytest.raises(ResourceLimitError):
        trifree_exact(build_graph(3), node_limit=5)


@pytest.mark.parametrize("q,floor", [(2, 8), (3, 41), (4, 120), (5, 240)])
def test_trifree_search_quality(q, floor):
    g = build_graph(q)
    r = trifree_search(g, seed=0, budget=100000 if q < 5 else 200000)
    assert r.subset.verified and is_triangle_free_matrix(g, r.subset.ids)
    assert not g.loops[list(r.subset.ids)].any()
    assert len(r.subset) >= floor
    assert len(r.subset) >= len(greedy_trifree(g, 0))


def test_search_deterministic():
    g = build_graph(3)
    a = trifree_search(g, seed=7, budget=5000)
    b = trifree_search(g, seed=7, budget=5000)
    assert a.subset == b.subset and a.moves == b.moves


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.integers(0, 2**32 - 1), st.integers(0, 60))
def test_two_triangle_checks_agree(q, seed, size):
    g = build_graph(q)
    rng = np.random.default_rng(seed)
    na = g.plane.nonabsolute_ids
    ids = rng.choice(na, size=min(size, len(na)), replace=False)
    assert is_triangle_free(g, ids) == is_triangle_free_matrix(g, ids)
    # deleting vertices keeps a triangle-free set triangle-free
    if is_triangle_free(g, ids) and len(ids):
        assert is_triangle_free(g, ids[1:])


def test_empty_set_and_absolute_rejection():
    g = build_graph(3)
    assert verify_subset(g, []).verified
    with pytest.raises(DomainError):
        verify_subset(g, [int(g.plane.absolute_ids[0])])
    tri = graph_triangles(g)[0]
    assert not verify_subset(g, tri).verified


def test_io_roundtrip(tmp_path):
    g = build_graph(2)
    p = tmp_path / "g.dimacs"
    write_dimacs(g, p)
    n, edges = read_dimacs(p)
    adj = g.adj.copy()
    np.fill_diagonal(adj, False)
    assert n == 21 and len(edges) == int(adj.sum()) // 2
    assert "loops on 9" in p.read_text()
    s = greedy_trifree(g, 0)
    assert subset_from_json(subset_to_json(s, 2), g) == s
    with pytest.raises(DomainError):
        subset_from_json(subset_to_json(s, 3), g)
