import numpy as np
import pytest

from oracles import imag_count, u3_order
from ucov.errors import DomainError
from ucov.geometry import ProjPoint
from ucov.group import (
    AbsPointStab,
    Explicit,
    ImagTriangleStab,
    NonAbsPointStab,
    TriangleStab,
    elation_census,
    enumerate_su3,
    generate,
    group_order,
    imag_triangle_count,
    imag_vertices_of,
    is_subgroup,
    is_unitary,
    normalizer,
    stabilizer_members,
    stabilizer_order,
    sylow_p_census,
    sylow_r_subgroup,
    imag_order_audit,
    type_census,
)

QS = [2, 3, 4, 5]
CENSUS = {
    2: (64, 8, 0),
    3: (3942, 378, 1728),
    4: (38208, 4992, 19200),
    5: (76000, 14000, 36000),
}


def test_order_formula():
    for q in (2, 3, 4, 5, 7, 8, 9, 11, 16, 32):
        assert group_order(q) == u3_order(q)
    assert (group_order(2), group_order(5), group_order(7)) == (72, 126000, 5663616)


@pytest.mark.parametrize("q", QS)
def test_table_size_and_closure(q, tables):
    t = tables(q)
    assert t.order == u3_order(q)
    rng = np.random.default_rng(q)
    a, b, c = (rng.integers(0, t.order, 500) for _ in range(3))
    assert (t.mul(t.mul(a, b), c) == t.mul(a, t.mul(b, c))).all()
    assert (t.mul(a, t.inverses[a]) == t.identity).all()
    assert (t.mul(a, t.identity) == a).all()


def test_is_unitary_examples(tables):
    t = tables(3)
    F = t.field
    assert is_unitary(F, [1, 0, 0, 0, 1, 0, 0, 0, 1])
    mus = [x for x in range(1, F.order) if F.pow(x, 4) == 1]
    lam, mu = mus[1], mus[2]
    assert is_unitary(F, [lam, 0, 0, 0, mu, 0, 0, 0, F.inv(F.mul(lam, mu))])
    assert not is_unitary(F, [F.gen, 0, 0, 0, 1, 0, 0, 0, 1])


@pytest.mark.parametrize("q,n", [(2, 216), (3, 6048)])
def test_su3_enumeration(q, n, tables):
    su = enumerate_su3(q)
    assert len(su) == n
    F = tables(q).field
    from ucov.group import det3

    for m in su[:: max(1, n // 300)]:
        assert is_unitary(F, m) and det3(F, m) == 1


@pytest.mark.parametrize("q", QS)
def test_type_census_frozen(q, tables):
    c = type_census(tables(q))
    assert (c["type1"], c["type2"], c["type3"]) == CENSUS[q]
    assert sum(CENSUS[q]) == u3_order(q)


@pytest.mark.parametrize("q", QS)
def test_stabilizer_orders(q, tables):
    t = tables(q)
    pl = t.plane
    A = pl.point(int(pl.absolute_ids[0]))
    N = pl.point(int(pl.nonabsolute_ids[-1]))
    tri = pl.triangle(pl.self_polar_triangles[0])
    sizes = {
        "abs": len(stabilizer_members(AbsPointStab(A), t)),
        "nonabs": len(stabilizer_members(NonAbsPointStab(N), t)),
        "triangle": len(stabilizer_members(TriangleStab(tri), t)),
    }
    t3 = np.flatnonzero(t.etype == 3)
    if t3.size:
        h = ImagTriangleStab(imag_vertices_of(t, int(t3[0])))
        sizes["imag"] = len(stabilizer_members(h, t))
    for kind, n in sizes.items():
        assert n == stabilizer_order(kind, q), kind
    for h in (AbsPointStab(A), NonAbsPointStab(N), TriangleStab(tri)):
        s = stabilizer_members(h, t)
        assert t.identity in s and is_subgroup(t, s)
    if q == 3:
        assert list(sizes.values()) == [216, 96, 96, 21]
    if q == 5:
        assert sizes["abs"] == 1000


def test_handle_errors(tables):
    t = tables(3)
    pl = t.plane
    with pytest.raises(DomainError):
        stabilizer_members(AbsPointStab(pl.point(int(pl.nonabsolute_ids[0]))), t)
    assert list(stabilizer_members(Explicit(frozenset({t.identity})), t)) == [t.identity]


@pytest.mark.parametrize("q", QS)
def test_sylow_census(q, tables):
    t = tables(q)
    r = sylow_p_census(t)
    assert r.count == q**3 + 1
    assert set(r.orders) == {q**3}
    assert r.all_closed and r.trivial_intersections
    assert r.union_size == q**6 - 1
    assert r.all_nonabelian
    if q == 4:
        assert set(r.exponents) == {4}
    # every nonidentity p-element is Type 1
    assert (t.etype[t.omega] == 1).all()


@pytest.mark.parametrize("q", [3, 4, 5])
def test_sylow_r_normalizer(q, tables):
    t = tables(q)
    r, R = sylow_r_subgroup(t)
    N = normalizer(R, t)
    assert len(N) == stabilizer_order("imag", q)
    assert np.array_equal(normalizer(N, t), N)
    # conjugacy class size = number of imaginary triangles
    assert t.order // len(N) == imag_triangle_count(q) == imag_count(q)
    if q == 3:
        assert (r, len(N), t.order // len(N)) == (7, 21, 288)


def test_normalizer_rejects_non_subgroup(tables):
    t = tables(3)
    with pytest.raises(DomainError):
        normalizer([t.identity, int(np.flatnonzero(t.orders == 7)[0])], t)


@pytest.mark.parametrize("q,n", [(2, 3), (4, 15), (5, 24)])
def test_elation_census(q, n, tables):
    t = tables(q)
    pl = t.plane
    for i in pl.nonabsolute_ids[:3]:
        assert elation_census(pl.point(int(i)), t) == n
    with pytest.raises(DomainError):
        elation_census(pl.point(int(pl.absolute_ids[0])), t)


@pytest.mark.parametrize("q", QS)
def test_generate_matches_stabilizer(q, tables):
    t = tables(q)
    pl = t.plane
    s = stabilizer_members(AbsPointStab(pl.point(int(pl.absolute_ids[0]))), t)
    rng = np.random.default_rng(0)
    gens = [int(x) for x in rng.choice(s, size=4, replace=False)]
    sub = generate(t, gens)
    assert set(sub.tolist()) <= set(s.tolist())


def test_imaginary_order_divides_no_other_maximal():
    from ucov.fields import prime_powers

    assert all(imag_order_audit(q)["ok"] for q in prime_powers(7, 97))
    # below 7 the exceptional orders 168 and 2520 absorb the order-7 elements
    assert "L3(2)" in imag_order_audit(3)["divides"]
    assert "A7" in imag_order_audit(5)["divides"]
