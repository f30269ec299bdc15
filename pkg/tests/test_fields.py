import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import NaiveField, canonical_modulus_naive, factor, prime_power
from ucov.errors import DomainError
from ucov.fields import (
    FieldElement,
    Poly,
    conjugate,
    embed,
    find_roots,
    gf_q2,
    gf_q6,
    is_prime_power,
    lemma7_check,
    make_field,
    monic_irreducibles,
    norm,
    poly_tilde,
    prime_powers,
)

SMALL = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (2, 4), (5, 2), (3, 4), (7, 2)]


@pytest.mark.parametrize("p,k", SMALL + [(2, 6), (3, 6), (5, 3)])
def test_canonical_modulus_matches_naive_scan(p, k):
    assert make_field(p, k).modulus == canonical_modulus_naive(p, k)


def test_modulus_examples():
    assert make_field(2, 2).modulus == (1, 1, 1)
    assert make_field(3, 2).modulus == (1, 0, 1)
    F = make_field(7, 1)
    assert F.mul(3, 5) == 1 and F.add(4, 5) == 2


@pytest.mark.parametrize("p,k", SMALL)
def test_arithmetic_agrees_with_polynomial_oracle(p, k):
    F = make_field(p, k)
    N = NaiveField(p, k, F.modulus)
    n = F.order
    rng = np.random.default_rng(p * 100 + k)
    pairs = rng.integers(0, n, size=(400, 2)) if n > 20 else [(a, b) for a in range(n) for b in range(n)]
    for a, b in pairs:
        a, b = int(a), int(b)
        assert F.add(a, b) == N.add(a, b)
        assert F.mul(a, b) == N.mul(a, b)


@pytest.mark.parametrize("p,k", [(2, 2), (3, 2), (2, 3), (5, 2), (3, 4)])
def test_field_axioms_exhaustive(p, k):
    F = make_field(p, k)
    n = F.order
    a = np.arange(n)
    A, B = np.meshgrid(a, a, indexing="ij")
    for c in range(n):
        assert (F.vmul(F.vmul(A, B), c) == F.vmul(A, F.vmul(B, c))).all()
        assert (F.vmul(F.vadd(A, B), c) == F.vadd(F.vmul(A, c), F.vmul(B, c))).all()
        assert (F.vadd(F.vadd(A, B), c) == F.vadd(A, F.vadd(B, c))).all()
    nz = a[1:]
    assert (F.vmul(nz, F.vinv(nz)) == 1).all()
    assert (F.vadd(a, F.vneg(a)) == 0).all()


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([(2, 6), (3, 6), (5, 6), (7, 6), (2, 8)]), st.integers(0, 10**9), st.integers(0, 10**9))
def test_frobenius_and_axioms_sampled(pk, x, y):
    F = make_field(*pk)
    a, b = x % F.order, y % F.order
    fr = F.frobenius
    assert fr(F.add(a, b)) == F.add(fr(a), fr(b))
    assert fr(F.mul(a, b)) == F.mul(fr(a), fr(b))
    if a:
        assert F.mul(a, F.inv(a)) == 1


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_conjugate_is_involution_fixing_subfield(q):
    F = gf_q2(q)
    xs = [FieldElement(F, i) for i in range(F.order)]
    fixed = 0
    for x in xs:
        c = conjugate(x, q)
        assert conjugate(c, q) == x
        fixed += c == x
    assert fixed == q
    rng = np.random.default_rng(q)
    for a, b in rng.integers(0, F.order, size=(200, 2)):
        x, y = xs[a], xs[b]
        assert conjugate(x * y) == conjugate(x) * conjugate(y)
        assert conjugate(x + y) == conjugate(x) + conjugate(y)


def test_conjugate_of_i_in_gf9():
    F = gf_q2(3)
    i = next(FieldElement(F, x) for x in range(9) if F.mul(x, x) == F.neg(1))
    assert conjugate(i, 3) == -i
    with pytest.raises(DomainError):
        conjugate(i, 9)


def test_norm_kernel_and_values():
    F = gf_q2(3)
    one, zero = FieldElement(F, 1), FieldElement(F, 0)
    assert norm(one) == one and norm(zero) == zero
    kern = [x for x in range(1, 9) if norm(FieldElement(F, x)).index == 1]
    assert len(kern) == 4
    sub = F.subfield_mask(1)
    for x in range(9):
        assert sub[norm(FieldElement(F, x)).index]


def test_embedding_examples():
    small, big = gf_q2(2), gf_q6(2)
    z, o = FieldElement(small, 0), FieldElement(small, 1)
    assert embed(z, small, big).index == 0 and embed(o, small, big).index == 1
    for a in range(4):
        for b in range(4):
            x, y = FieldElement(small, a), FieldElement(small, b)
            assert embed(x * y, small, big) == embed(x, small, big) * embed(y, small, big)
            assert embed(x + y, small, big) == embed(x, small, big) + embed(y, small, big)
    s9, b9 = gf_q2(3), gf_q6(3)
    img = sorted(int(v) for v in b9.embedding_from(s9)[1:])
    assert img == sorted(int(v) for v in b9.elements_of_order_dividing(8))


def test_find_roots_examples():
    F = gf_q2(3)
    roots = find_roots(Poly(F, [1, 0, 1]))
    assert len(roots) == 2 and all(m == 1 for m in roots.values())
    assert F.add(*roots) == 0
    assert find_roots(Poly(F, [F.neg(1), 1])) == {1: 1}
    assert find_roots(monic_irreducibles(F, 2)[0]) == {}
    assert find_roots(Poly.from_roots(F, [2, 2, 5])) == {2: 2, 5: 1}


def _random_monic(F, rng, deg):
    c = [int(x) for x in rng.integers(0, F.order, size=deg)]
    if c[0] == 0:
        c[0] = 1
    return Poly(F, c + [1])


def test_tilde_linear_example():
    F = gf_q2(5)
    for lam in range(1, F.order):
        g = Poly(F, [F.neg(lam), 1])
        assert poly_tilde(g) == Poly(F, [F.neg(F.inv(F.conj(lam))), 1])


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_tilde_involution_and_multiplicativity(q):
    F = gf_q2(q)
    rng = np.random.default_rng(q)
    bad = 0
    for _ in range(10**4):
        g = _random_monic(F, rng, int(rng.integers(1, 4)))
        h = _random_monic(F, rng, int(rng.integers(1, 4)))
        tg = poly_tilde(g)
        bad += poly_tilde(tg) != g
        bad += not (tg.is_monic() and tg.degree == g.degree and tg.coeffs[0] != 0)
        bad += poly_tilde(g * h) != tg * poly_tilde(h)
    assert bad == 0


def test_tilde_errors():
    F = gf_q2(3)
    with pytest.raises(DomainError):
        poly_tilde(Poly(F, [1, 2]))
    with pytest.raises(DomainError):
        poly_tilde(Poly(F, [0, 1]))


def test_tilde_fixes_unitary_minimal_char_poly(tables):
    t = tables(3)
    F = t.plane.field
    rng = np.random.default_rng(1)
    hits = 0
    for g in rng.choice(t.order, size=60, replace=False):
        m = t.mats[g]
        tr, s2 = (int(v[0]) for v in t.char_coeffs([g]))
        # det is 1 in SU; U3(3) = SU3(3) since gcd(3, 4) = 1
        cp = Poly(F, [F.neg(1), s2, F.neg(tr), 1])
        # minimal = characteristic iff I, M, M^2 are independent
        I = np.eye(3, dtype=np.int64)
        M = m.reshape(3, 3).astype(np.int64)
        if np.array_equal(M, I) or not _independent(F, I, M):
            continue
        hits += 1
        assert poly_tilde(cp) == cp
    assert hits > 30


def _independent(F, I, M):
    from ucov.group import _bmm

    M2 = _bmm(F, M[None], M[None])[0]
    rows = [I.ravel(), M.ravel(), M2.ravel()]
    # rank over F by Gaussian elimination
    R = [list(map(int, r)) for r in rows]
    rank, col = 0, 0
    while rank < 3 and col < 9:
        piv = next((i for i in range(rank, 3) if R[i][col]), None)
        if piv is not None:
            R[rank], R[piv] = R[piv], R[rank]
            inv = F.inv(R[rank][col])
            R[rank] = [F.mul(x, inv) for x in R[rank]]
            for i in range(3):
                if i != rank and R[i][col]:
                    c = R[i][col]
                    R[i] = [F.sub(x, F.mul(c, y)) for x, y in zip(R[i], R[rank])]
            rank += 1
        col += 1
    return rank == 3


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_irreducible_quadratics_are_never_self_tilde(q):
    F = gf_q2(q)
    quads = monic_irreducibles(F, 2)
    n = F.order
    assert len(quads) == (n * n - n) // 2
    assert sum(poly_tilde(g) == g for g in quads) == 0


@pytest.mark.parametrize("q", [2, 3, 4])
def test_self_tilde_cubic_roots_have_norm_one(q):
    F, G = gf_q2(q), gf_q6(q)
    emb = G.embedding_from(F)
    cubics = [g for g in monic_irreducibles(F, 3) if poly_tilde(g) == g]
    n = F.order
    assert len(monic_irreducibles(F, 3)) == (n**3 - n) // 3
    assert cubics
    bad = 0
    for g in cubics:
        lifted = Poly(G, [int(emb[c]) for c in g.coeffs])
        roots = lifted.roots()
        assert len(roots) == 3
        bad += sum(G.pow(r, q**3 + 1) != 1 for r in roots)
    assert bad == 0


def test_sylow_prime_examples():
    assert lemma7_check(3) == (7, True)
    assert lemma7_check(8) == (19, True)
    assert lemma7_check(4) == (13, True)
    with pytest.raises(DomainError):
        lemma7_check(2)


def test_sylow_prime_all_prime_powers_up_to_10000():
    qs = prime_powers(3, 10**4)
    assert len(qs) == sum(1 for n in range(3, 10**4 + 1) if prime_power(n))
    for q in qs:
        r, ok = lemma7_check(q)
        assert ok, q
        assert r == max(factor(q * q - q + 1))


def test_prime_power_checks():
    assert is_prime_power(49) and not is_prime_power(12)
    with pytest.raises(DomainError):
        make_field(4, 1)
