import numpy as np
import pytest

from oracles import type2_violations, type3_violations
from ucov.errors import DomainError
from ucov.geometry import is_self_polar
from ucov.group import Type1, Type2, Type3, classify, imaginary_triangle


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_type2_fix_self_polar_triangles(q, tables):
    t = tables(q)
    ids = np.flatnonzero(t.etype == 2)
    assert type2_violations(t, ids) == 0


@pytest.mark.parametrize("q", [3, 4, 5])
def test_type3_invariants_exhaustive(q, tables):
    t = tables(q)
    ids = np.flatnonzero(t.etype == 3)
    v = type3_violations(t, ids)
    assert sum(v.values()) == 0, v


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_type1_fix_an_absolute_point(q, tables):
    t = tables(q)
    pl = t.plane
    ids = np.flatnonzero(t.etype == 1)
    im = t.point_images(ids, pl.absolute_ids)
    assert (im == pl.absolute_ids[None, :]).any(axis=1).all()
    rest = np.flatnonzero(t.etype != 1)
    im = t.point_images(rest, pl.absolute_ids)
    assert not (im == pl.absolute_ids[None, :]).any(axis=1).any()


def test_classify_examples(tables):
    t = tables(3)
    F = t.field
    assert isinstance(classify(t, t.identity), Type1)
    mu = next(x for x in range(1, F.order) if F.element_order(x) == 4)
    g = t.id_of(np.array([1, 0, 0, 0, mu, 0, 0, 0, F.inv(mu)], dtype=np.uint8))
    r = classify(t, g)
    assert isinstance(r, Type2)
    assert [v.coords for v in r.triangle.vertices] == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert is_self_polar(t.plane, r.triangle)
    sevens = np.flatnonzero(t.orders == 7)
    assert len(sevens) and (t.etype[sevens] == 3).all()
    d = classify(t, int(sevens[0]))
    assert isinstance(d, Type3)
    assert len(t.fixed_point_ids(int(sevens[0]))) == 0


def test_imaginary_triangle_data(tables):
    t = tables(3)
    g = int(np.flatnonzero(t.orders == 7)[0])
    d = imaginary_triangle(t, g)
    G = t.big
    assert len(set(d.vertices)) == 3
    assert G.pow(d.alpha, 7) == 1
    assert t.orders[d.sigma] == 7
    assert d.key == min(d.vertices)
    with pytest.raises(DomainError):
        imaginary_triangle(t, t.identity)


@pytest.mark.parametrize("q", [3, 4, 5])
def test_type3_orders_divide(q, tables):
    t = tables(q)
    s = (q * q - q + 1) // (3 if (q + 1) % 3 == 0 else 1)
    assert (s % t.orders[t.etype == 3] == 0).all()
