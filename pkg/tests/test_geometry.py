import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import NaiveField, hermitian_counts
from ucov.errors import DomainError
from ucov.geometry import (
    Polarity,
    ProjLine,
    ProjPoint,
    Triangle,
    absolute_points,
    enumerate_self_polar_triangles,
    extend_to_orthonormal_basis,
    form_eval,
    incident,
    is_absolute,
    is_self_polar,
    line_absolute_count,
    perp,
    plane,
    self_polar_count,
)

QS = [2, 3, 4, 5]


@pytest.mark.parametrize("q", [2, 3])
def test_counts_against_naive_scan(q):
    F = plane(q).field
    n, a = hermitian_counts(NaiveField(F.p, F.k, F.modulus), q)
    assert (n, a) == (q**4 + q * q + 1, q**3 + 1)


@pytest.mark.parametrize("q", QS)
def test_point_censuses(q):
    pl = plane(q)
    assert pl.n_points == q**4 + q * q + 1
    assert len(absolute_points(q)) == q**3 + 1
    assert len(pl.nonabsolute_ids) == q * q * (q * q - q + 1)
    counts = pl.line_absolute_counts
    assert set(np.unique(counts).tolist()) == {1, q + 1}
    assert (counts == 1).sum() == q**3 + 1


def test_line_histogram_q3():
    counts = plane(3).line_absolute_counts
    assert ((counts == 1).sum(), (counts == 4).sum()) == (28, 63)


def test_absolute_point_examples():
    assert [len(absolute_points(q)) for q in (2, 3, 5)] == [9, 28, 126]


def test_line_count_examples():
    pl = plane(3)
    P = pl.point(int(pl.absolute_ids[0]))
    assert line_absolute_count(pl, perp(pl, P)) == 1
    Q = pl.point(int(pl.nonabsolute_ids[0]))
    assert line_absolute_count(pl, perp(pl, Q)) == 4


def test_form_examples():
    pl = plane(2)
    F = pl.field
    assert form_eval(F, (1, 0, 0), (1, 0, 0)) == 1
    w = F.gen
    assert F.mul(w, w) == F.add(w, 1)
    assert form_eval(F, (1, 1, 0), (1, w, 0)) == F.add(1, F.mul(w, w))


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(QS), st.lists(st.integers(0, 10**6), min_size=6, max_size=6))
def test_form_is_conjugate_symmetric(q, xs):
    F = plane(q).field
    x = [v % F.order for v in xs[:3]]
    y = [v % F.order for v in xs[3:]]
    assert form_eval(F, x, y) == F.conj(form_eval(F, y, x))


@pytest.mark.parametrize("q", QS)
def test_polarity_is_involution_and_absolute_iff_self_incident(q):
    pl = plane(q)
    pol = Polarity(pl)
    for i in range(pl.n_points):
        P = pl.point(i)
        L = pol(P)
        assert pol(L) == P
        assert incident(pl, P, L) == is_absolute(pl, P) == bool(pl.absolute[i])
    assert (pl.perp_ids[pl.perp_ids] == np.arange(pl.n_points)).all()


def test_perp_of_standard_point():
    pl = plane(3)
    assert perp(pl, ProjPoint((1, 0, 0))) == ProjLine((1, 0, 0))
    with pytest.raises(DomainError):
        perp(pl, (1, 0, 0))


def test_self_polar_examples():
    pl = plane(3)
    F = pl.field
    frame = Triangle.of(F, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert is_self_polar(pl, frame)
    A = pl.point(int(pl.absolute_ids[0]))
    others = [pl.point(int(i)) for i in pl.nonabsolute_ids[:8]]
    tri = next(Triangle.of(F, [A, b, c]) for b, c in itertools.combinations(others, 2) if _noncollinear(F, A, b, c))
    assert not is_self_polar(pl, tri)
    bent = Triangle.of(F, [(1, 0, 0), (0, 1, 0), (1, 1, 1)])
    assert not is_self_polar(pl, bent)


def _noncollinear(F, *ps):
    try:
        Triangle.of(F, ps)
    except DomainError:
        return False
    return True


def test_triangle_validation():
    F = plane(2).field
    with pytest.raises(DomainError):
        Triangle.of(F, [(1, 0, 0), (0, 1, 0), (1, 1, 0)])
    with pytest.raises(DomainError):
        Triangle.of(F, [(1, 0, 0), (1, 0, 0), (0, 0, 1)])


def _brute_self_polar(q):
    pl = plane(q)
    na = pl.nonabsolute_ids
    orth = pl.vform(pl.coords[na][:, None], pl.coords[na][None]) == 0
    n = 0
    for i in range(len(na)):
        nb = np.flatnonzero(orth[i, i + 1 :]) + i + 1
        for a, j in enumerate(nb):
            n += int(orth[j, nb[a + 1 :]].sum())
    return n


@pytest.mark.parametrize("q,expected", [(2, 4), (3, 63), (4, 416), (5, 1750)])
def test_self_polar_census(q, expected):
    tris = enumerate_self_polar_triangles(q)
    assert len(tris) == expected == self_polar_count(q)
    if q <= 3:
        assert _brute_self_polar(q) == expected
    pl = plane(q)
    assert all(is_self_polar(pl, t) for t in tris[:50])


def test_orthonormal_basis():
    pl = plane(3)
    F = pl.field
    assert extend_to_orthonormal_basis(pl, ProjPoint((1, 0, 0)))[0] == (1, 0, 0)
    rng = np.random.default_rng(0)
    for i in rng.choice(pl.nonabsolute_ids, size=20, replace=False):
        P = pl.point(int(i))
        basis = extend_to_orthonormal_basis(pl, P)
        gram = [[form_eval(F, a, b) for b in basis] for a in basis]
        assert gram == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        assert ProjPoint.of(F, basis[0]) == P
    e0 = extend_to_orthonormal_basis(pl, ProjPoint((1, 1, 0)))[0]
    assert ProjPoint.of(F, e0) == ProjPoint((1, 1, 0)) and form_eval(F, e0, e0) == 1
    with pytest.raises(DomainError):
        extend_to_orthonormal_basis(pl, pl.point(int(pl.absolute_ids[0])))
