"""SU3(q) and U3(q) as explicit matrix tables, element types, and stabilizers.

Elements of U3(q) are stored as canonical SU3(q) representatives: among the
scalar multiples by cube roots of unity (present when 3 | q+1) the one whose
entries, read as a base-q^2 number, are least. Matrices are flattened row-major
into nine GF(q^2) indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, InvariantViolation, ResourceLimitError
from .fields import (
    FieldCtx,
    as_prime_power,
    gf_q2,
    gf_q6,
    is_prime_power,
    lemma7_check,
    prime_factors,
)
from .geometry import HermitianPlane, ProjPoint, Triangle, plane

MAX_TABLE_Q = 8
CHUNK = 1 << 17
_TRANSPOSE = [0, 3, 6, 1, 4, 7, 2, 5, 8]


def group_order(q) -> int:
    q = as_prime_power(q).q
    return q**3 * (q**3 + 1) * (q * q - 1) // math.gcd(3, q + 1)


def center_order(q) -> int:
    return math.gcd(3, as_prime_power(q).q + 1)


def stabilizer_order(kind: str, q) -> int:
    q = as_prime_power(q).q
    g = math.gcd(3, q + 1)
    return {
        "abs": q**3 * (q + 1) * (q - 1) // g,
        "nonabs": q * (q + 1) ** 2 * (q - 1) // g,
        "triangle": 6 * (q + 1) ** 2 // g,
        "imag": 3 * (q * q - q + 1) // g,
    }[kind]


def imag_triangle_count(q) -> int:
    q = as_prime_power(q).q
    return q**3 * (q + 1) ** 2 * (q - 1) // 3


# ---------------------------------------------------------------------------
# small matrix helpers over GF(q^2)


def _mat_tuple(m) -> tuple[int, ...]:
    return tuple(int(x) for x in np.asarray(m).reshape(9))


def is_unitary(F: FieldCtx, M: Sequence[int]) -> bool:
    """conj(M)^T M = I for the standard form."""
    M = [int(x) for x in np.asarray(M).reshape(9)]
    h = F.half_q
    for i in range(3):
        for j in range(3):
            acc = 0
            for k in range(3):
                acc = F.add(acc, F.mul(F.pow(M[3 * k + i], h), M[3 * k + j]))
            if acc != (1 if i == j else 0):
                return False
    return True


def det3(F: FieldCtx, M: Sequence[int]) -> int:
    a, b, c, d, e, f, g, h, i = (int(x) for x in np.asarray(M).reshape(9))
    m, sb, ad = F.mul, F.sub, F.add
    return ad(sb(m(a, sb(m(e, i), m(f, h))), m(b, sb(m(d, i), m(f, g)))), m(c, sb(m(d, h), m(e, g))))


def _vdet(F: FieldCtx, m: np.ndarray) -> np.ndarray:
    ad, mu, ng = F.add_table, F.mul_table, F.neg_table
    m = m.astype(np.int64)
    minor = lambda a, b, c, d: ad[mu[m[:, a], m[:, b]], ng[mu[m[:, c], m[:, d]]]]
    t1 = mu[m[:, 0], minor(4, 8, 5, 7)]
    t2 = mu[m[:, 1], minor(3, 8, 5, 6)]
    t3 = mu[m[:, 2], minor(3, 7, 4, 6)]
    return ad[ad[t1, ng[t2]], t3]


def _cubic_roots_table(F: FieldCtx) -> np.ndarray:
    """Distinct roots in GF(q^2) of x^3 - t x^2 + s x - 1, indexed t*Q + s; -1 pads."""
    Q = F.order
    ad, mu, ng = F.add_table, F.mul_table, F.neg_table
    t = np.repeat(np.arange(Q), Q)
    s = np.tile(np.arange(Q), Q)
    roots = np.full((Q * Q, 3), -1, dtype=np.int16)
    count = np.zeros(Q * Q, dtype=np.int64)
    for lam in range(Q):
        l2 = mu[lam, lam]
        l3 = mu[l2, lam]
        val = ad[ad[ad[l3, ng[mu[t, l2]]], mu[s, lam]], ng[1]]
        hit = np.flatnonzero(val == 0)
        roots[hit, count[hit]] = lam
        count[hit] += 1
    return roots


def enumerate_su3(q) -> np.ndarray:
    """Every element of SU3(q) as (N, 9) uint8, built from orthonormal frames."""
    pp = as_prime_power(q)
    if pp.q > MAX_TABLE_Q:
        raise ResourceLimitError(f"full tables stop at q={MAX_TABLE_Q}")
    F = gf_q2(pp.q)
    Q = F.order
    allv = np.stack(np.meshgrid(np.arange(Q), np.arange(Q), np.arange(Q), indexing="ij"), -1).reshape(-1, 3)
    nrm = F.vpow(np.arange(Q), pp.q + 1)
    ad = F.add_table
    s = ad[ad[nrm[allv[:, 0]], nrm[allv[:, 1]]], nrm[allv[:, 2]]]
    norm1 = allv[s == 1].astype(np.uint8)
    conj = F.vconj(np.arange(Q)).astype(np.uint8)
    return kernels.su3_frames(
        norm1, F.add_table.astype(np.uint8), F.mul_table.astype(np.uint8), conj, F.neg_table.astype(np.uint8)
    )


@dataclass(frozen=True)
class UElement:
    """A canonical SU3(q) representative of an element of U3(q)."""

    q: int
    entries: tuple[int, ...]

    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.uint8).reshape(3, 3)


class GroupTable:
    """All elements of U3(q), sorted by canonical key, with vectorised products."""

    def __init__(self, q, mats: np.ndarray, check: bool = True):
        pp = as_prime_power(q)
        self.q = pp.q
        self.p = pp.p
        self.plane: HermitianPlane = plane(pp.q)
        self.field = F = gf_q2(pp.q)
        self.Q = F.order
        self.add = F.add_table.astype(np.uint8)
        self.mult = F.mul_table.astype(np.uint8)
        self.neg = F.neg_table.astype(np.uint8)
        self.inv_t = F.inv_table.astype(np.uint8)
        self.conj = F.vconj(np.arange(self.Q)).astype(np.uint8)
        self.center = center_order(pp.q)
        self.scalars = [int(x) for x in F.elements_of_order_dividing(3)] if self.center == 3 else [1]
        self.mats = np.ascontiguousarray(mats, dtype=np.uint8)
        self.keys = kernels.encode_keys(self.mats, self.Q)
        if check:
            if (np.diff(self.keys) <= 0).any():
                raise InvariantViolation("table keys are not strictly increasing")
            if len(self.keys) != group_order(pp.q):
                raise InvariantViolation(f"table has {len(self.keys)} elements, expected {group_order(pp.q)}")
        self.order = len(self.keys)
        self.identity = int(self.index(np.array([[1, 0, 0, 0, 1, 0, 0, 0, 1]], dtype=np.uint8))[0])

    @classmethod
    def build(cls, q) -> "GroupTable":
        pp = as_prime_power(q)
        su = enumerate_su3(pp.q)
        F = gf_q2(pp.q)
        g = center_order(pp.q)
        scal = [int(x) for x in F.elements_of_order_dividing(3)] if g == 3 else [1]
        reps, keys = kernels.canon(su, scal, F.mul_table.astype(np.uint8), F.order)
        del su
        _, first = np.unique(keys, return_index=True)
        return cls(pp.q, reps[first])

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"GroupTable(U3({self.q}), order={self.order})"

    # -- lookup and products ------------------------------------------------
    def index(self, mats) -> np.ndarray:
        mats = np.ascontiguousarray(mats, dtype=np.uint8).reshape(-1, 9)
        _, k = kernels.canon(mats, self.scalars, self.mult, self.Q)
        pos = np.searchsorted(self.keys, k)
        pos = np.minimum(pos, self.order - 1)
        if (self.keys[pos] != k).any():
            raise InvariantViolation("matrix is not in U3(q) (not unitary of determinant 1?)")
        return pos

    def element(self, i: int) -> UElement:
        return UElement(self.q, _mat_tuple(self.mats[i]))

    def id_of(self, g) -> int:
        if isinstance(g, UElement):
            return int(self.index(np.array(g.entries))[0])
        if isinstance(g, (int, np.integer)):
            return int(g)
        return int(self.index(np.asarray(g).reshape(1, 9))[0])

    def matmul(self, a, b) -> np.ndarray:
        return kernels.mat_mul(a, b, self.add, self.mult)

    def mul(self, a, b) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=np.int64))
        b = np.atleast_1d(np.asarray(b, dtype=np.int64))
        out = np.empty(max(len(a), len(b)), dtype=np.int64)
        n = len(out)
        for s in range(0, n, CHUNK):
            aa = a if len(a) == 1 else a[s : s + CHUNK]
            bb = b if len(b) == 1 else b[s : s + CHUNK]
            out[s : s + CHUNK] = self.index(self.matmul(self.mats[aa], self.mats[bb]))
        return out

    def conj_transpose(self, mats) -> np.ndarray:
        return self.conj[np.asarray(mats)][:, _TRANSPOSE]

    def inverse(self, a) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=np.int64))
        out = np.empty(len(a), dtype=np.int64)
        for s in range(0, len(a), CHUNK):
            out[s : s + CHUNK] = self.index(self.conj_transpose(self.mats[a[s : s + CHUNK]]))
        return out

    @cached_property
    def inverses(self) -> np.ndarray:
        return self.inverse(np.arange(self.order))

    def conjugate_by(self, x, h) -> np.ndarray:
        """h x h^-1 for each x (h a single id)."""
        hi = int(self.inverses[h])
        return self.mul(self.mul(h, x), hi)

    def is_scalar(self, mats) -> np.ndarray:
        m = np.asarray(mats)
        off = (m[:, [1, 2, 3, 5, 6, 7]] == 0).all(axis=1)
        return off & (m[:, 0] == m[:, 4]) & (m[:, 4] == m[:, 8])

    def mat_power(self, mats, exps) -> np.ndarray:
        """Entrywise M_i ** e_i on GF(q^2) matrices (exps scalar or per row)."""
        mats = np.ascontiguousarray(mats, dtype=np.uint8)
        n = mats.shape[0]
        e = np.broadcast_to(np.asarray(exps, dtype=np.int64), (n,)).copy()
        result = np.tile(np.array([1, 0, 0, 0, 1, 0, 0, 0, 1], dtype=np.uint8), (n, 1))
        base = mats.copy()
        while (e > 0).any():
            odd = (e & 1) == 1
            if odd.any():
                result[odd] = self.matmul(result[odd], base[odd])
            e >>= 1
            live = e > 0
            if live.any():
                base[live] = self.matmul(base[live], base[live])
        return result

    def power(self, ids, exps) -> np.ndarray:
        ids = np.atleast_1d(np.asarray(ids, dtype=np.int64))
        return self.index(self.mat_power(self.mats[ids], exps))

    @cached_property
    def orders(self) -> np.ndarray:
        out = np.zeros(self.order, dtype=np.int32)
        for s in range(0, self.order, CHUNK):
            base = self.mats[s : s + CHUNK]
            cur = base.copy()
            o = np.zeros(len(base), dtype=np.int32)
            k = 1
            live = np.arange(len(base))
            while live.size:
                done = self.is_scalar(cur[live])
                o[live[done]] = k
                live = live[~done]
                if live.size:
                    cur[live] = self.matmul(cur[live], base[live])
                    k += 1
            out[s : s + CHUNK] = o
        return out

    # -- geometry actions --------------------------------------------------
    def point_images(self, ids, point_ids) -> np.ndarray:
        """Point ids of g(P), shape (len(ids), len(point_ids))."""
        pl = self.plane
        ids = np.atleast_1d(np.asarray(ids, dtype=np.int64))
        vecs = pl.coords[np.asarray(point_ids)].astype(np.uint8)
        out = np.empty((len(ids), len(vecs)), dtype=np.int64)
        step = max(1, CHUNK * 4 // max(1, len(vecs)))
        for s in range(0, len(ids), step):
            im = kernels.mat_apply(self.mats[ids[s : s + step]], vecs, self.add, self.mult)
            out[s : s + step] = pl.ids_of(im)
        return out

    def fixed_point_ids(self, g: int) -> np.ndarray:
        allp = np.arange(self.plane.n_points)
        return allp[self.point_images([g], allp)[0] == allp]

    # -- classification ----------------------------------------------------
    @cached_property
    def roots_table(self) -> np.ndarray:
        return _cubic_roots_table(self.field)

    def classify_ids(self, ids) -> tuple[np.ndarray, np.ndarray]:
        pl = self.plane
        ids = np.asarray(ids, dtype=np.int64)
        et = np.empty(len(ids), dtype=np.int8)
        fx = np.empty((len(ids), 3), dtype=np.int32)
        for s in range(0, len(ids), CHUNK):
            e, f = kernels.classify_batch(
                self.mats[ids[s : s + CHUNK]],
                self.add,
                self.mult,
                self.neg,
                self.inv_t,
                self.roots_table,
                pl.lookup,
                pl.line_first_absolute,
                pl.absolute.astype(np.uint8),
            )
            et[s : s + CHUNK] = e
            fx[s : s + CHUNK] = f
        if (et == 0).any():
            bad = int(ids[np.flatnonzero(et == 0)[0]])
            raise InvariantViolation(f"element {bad} fits none of the three types")
        return et, fx

    @cached_property
    def classification(self) -> tuple[np.ndarray, np.ndarray]:
        """(etype, fix) for every element; see kernels.classify_batch."""
        return self.classify_ids(np.arange(self.order))

    @property
    def etype(self) -> np.ndarray:
        return self.classification[0]

    def char_coeffs(self, ids) -> tuple[np.ndarray, np.ndarray]:
        m = self.mats[np.asarray(ids)].astype(np.int64)
        ad, mu, ng = self.add, self.mult, self.neg
        tr = ad[ad[m[:, 0], m[:, 4]], m[:, 8]]
        minor = lambda a, b, c, d: ad[mu[m[:, a], m[:, b]], ng[mu[m[:, c], m[:, d]]]]
        s2 = ad[ad[minor(0, 4, 1, 3), minor(0, 8, 2, 6)], minor(4, 8, 5, 7)]
        return tr.astype(np.int64), s2.astype(np.int64)

    # -- GF(q^6) data for Type 3 ---------------------------------------------
    @cached_property
    def big(self) -> FieldCtx:
        return gf_q6(self.q)

    @cached_property
    def emb(self) -> np.ndarray:
        return self.big.embedding_from(self.field)

    @cached_property
    def emb_inv(self) -> np.ndarray:
        out = np.full(self.big.order, -1, dtype=np.int64)
        out[self.emb] = np.arange(self.Q)
        return out

    def _alpha_for(self, tr: int, s2: int, _cache: dict = {}) -> int:
        key = (self.q, tr, s2)
        if key not in _cache:
            G = self.big
            e = self.emb
            x = np.arange(G.order, dtype=np.int64)
            x2 = G.vmul(x, x)
            val = G.vadd(G.vadd(G.vmul(x2, x), G.vmul(G.vneg(np.full_like(x, e[tr])), x2)), G.vmul(int(e[s2]), x))
            val = G.vsub(val, np.ones_like(x))
            roots = np.flatnonzero(val == 0)
            if len(roots) != 3:
                raise InvariantViolation(f"cubic ({tr},{s2}) has {len(roots)} roots in GF(q^6)")
            _cache[key] = int(roots[0])
        return _cache[key]

    def alphas(self, ids) -> np.ndarray:
        tr, s2 = self.char_coeffs(ids)
        code = tr * self.Q + s2
        out = np.empty(len(code), dtype=np.int64)
        for c in np.unique(code):
            out[code == c] = self._alpha_for(int(c // self.Q), int(c % self.Q))
        return out

    def imag_keys_for(self, ids) -> np.ndarray:
        """Sorted vertex encodings (n, 3) of the imaginary triangles of Type 3 ids."""
        G = self.big
        ids = np.asarray(ids, dtype=np.int64)
        out = np.empty((len(ids), 3), dtype=np.int64)
        q2 = self.Q
        for s in range(0, len(ids), CHUNK):
            chunk = ids[s : s + CHUNK]
            a = self.alphas(chunk)
            b = G.vpow(a, q2)
            c = G.vpow(b, q2)
            coef = np.stack([G.vmul(b, c), G.vneg(G.vadd(b, c)), np.ones_like(a)], axis=1)
            big_m = self.emb[self.mats[chunk]]
            out[s : s + CHUNK] = kernels.imag_vertices(big_m, coef, q2, G.exp, G.log, G.zech)
        return out

    @cached_property
    def imag_keys(self) -> np.ndarray:
        """Triangle key (least vertex encoding) per element; -1 unless Type 3."""
        keys = np.full(self.order, -1, dtype=np.int64)
        t3 = np.flatnonzero(self.etype == 3)
        if t3.size:
            keys[t3] = self.imag_keys_for(t3)[:, 0]
        return keys

    def big_apply(self, ids, vert_codes) -> np.ndarray:
        """Encoded images in PG(2, q^6) of encoded points, shape (len(ids), len(vert_codes))."""
        G = self.big
        N = G.order
        v = np.asarray(vert_codes, dtype=np.int64)
        vecs = np.stack([v // (N * N), (v // N) % N, v % N], axis=1)
        ids = np.atleast_1d(np.asarray(ids, dtype=np.int64))
        out = np.empty((len(ids), len(v)), dtype=np.int64)
        for s in range(0, len(ids), CHUNK):
            out[s : s + CHUNK] = kernels.apply_big(self.emb[self.mats[ids[s : s + CHUNK]]], vecs, G.exp, G.log, G.zech)
        return out

    # -- p-elements ----------------------------------------------------------
    @cached_property
    def omega(self) -> np.ndarray:
        """Ids of nonidentity elements of p-power order (the union of the Sylow p-subgroups)."""
        o = self.orders.astype(np.int64)
        m = o > 1
        x = o.copy()
        while True:
            div = m & (x % self.p == 0)
            if not div.any():
                break
            x[div] //= self.p
        return np.flatnonzero(m & (x == 1))

    def random_ids(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.integers(0, self.order, size=n)


# ---------------------------------------------------------------------------
# subgroups


def generate(t: GroupTable, gens: Iterable[int], limit: int | None = None) -> np.ndarray | None:
    """Subgroup generated by gens as sorted ids; None once it exceeds limit."""
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    gens = gens[gens != t.identity]
    elems = np.union1d([t.identity], gens)
    frontier = gens
    while frontier.size:
        prods = t.mul(np.repeat(frontier, len(gens)), np.tile(gens, len(frontier)))
        new = np.setdiff1d(prods, elems)
        elems = np.union1d(elems, new)
        if limit is not None and elems.size > limit:
            return None
        frontier = new
    return elems


def generators_of(t: GroupTable, s: np.ndarray) -> list[int] | None:
    """A small generating set for the sorted id set s, or None if s is not a subgroup."""
    s = np.asarray(s, dtype=np.int64)
    if t.identity not in set(s[: min(len(s), 1)].tolist()) and not np.isin(t.identity, s):
        return None
    gens: list[int] = []
    h = np.array([t.identity])
    while h.size < s.size:
        rest = np.setdiff1d(s, h)
        gens.append(int(rest[0]))
        h = generate(t, gens, limit=len(s))
        if h is None or not np.isin(h, s).all():
            return None
    return gens if h.size == s.size else None


def is_subgroup(t: GroupTable, s) -> bool:
    return generators_of(t, np.unique(np.asarray(s, dtype=np.int64))) is not None


@dataclass(frozen=True)
class AbsPointStab:
    point: ProjPoint


@dataclass(frozen=True)
class NonAbsPointStab:
    point: ProjPoint


@dataclass(frozen=True)
class TriangleStab:
    triangle: Triangle


@dataclass(frozen=True)
class ImagTriangleStab:
    """Keyed by the three encoded vertices in PG(2, q^6), sorted; key = least."""

    vertices: tuple[int, int, int]

    @property
    def key(self) -> int:
        return self.vertices[0]


@dataclass(frozen=True)
class Explicit:
    ids: frozenset


SubgroupHandle = AbsPointStab | NonAbsPointStab | TriangleStab | ImagTriangleStab | Explicit


def stabilizer_members(h, t: GroupTable) -> np.ndarray:
    """Sorted ids of the elements of t in the subgroup described by h."""
    pl = t.plane
    allg = np.arange(t.order)
    if isinstance(h, (AbsPointStab, NonAbsPointStab)):
        pid = pl.point_id(h.point)
        if pid < 0:
            raise DomainError("point does not belong to this plane")
        if bool(pl.absolute[pid]) != isinstance(h, AbsPointStab):
            raise DomainError("point type does not match the handle")
        return allg[t.point_images(allg, [pid])[:, 0] == pid]
    if isinstance(h, TriangleStab):
        vs = np.array(pl.triangle_ids(h.triangle))
        im = t.point_images(allg, vs)
        return allg[np.isin(im, vs).all(axis=1)]
    if isinstance(h, ImagTriangleStab):
        vs = np.array(h.vertices)
        im = t.big_apply(allg, vs)
        return allg[np.isin(im, vs).all(axis=1)]
    if isinstance(h, Explicit):
        return np.array(sorted(h.ids), dtype=np.int64)
    raise DomainError(f"unknown handle {h!r}")


def imag_vertices_of(t: GroupTable, g: int) -> tuple[int, int, int]:
    if t.etype[g] != 3:
        raise DomainError("element is not of type 3")
    return tuple(int(x) for x in t.imag_keys_for([g])[0])


# ---------------------------------------------------------------------------
# element types


@dataclass(frozen=True)
class ImaginaryTriangleData:
    alpha: int
    eigenvalues: tuple[int, int, int]
    eigenvectors: tuple[tuple[int, int, int], ...]
    D: int
    vertices: tuple[int, int, int]
    Z: tuple[int, ...]
    sigma: int
    zeta: int

    @property
    def key(self) -> int:
        return min(self.vertices)


@dataclass(frozen=True)
class Type1:
    absolute_fixed: tuple[ProjPoint, ...]


@dataclass(frozen=True)
class Type2:
    triangle: Triangle


@dataclass(frozen=True)
class Type3:
    data: ImaginaryTriangleData


ElementType = Type1 | Type2 | Type3


def classify(t: GroupTable, g) -> ElementType:
    gid = t.id_of(g)
    et, fx = t.classify_ids([gid])
    pl = t.plane
    fixed = t.fixed_point_ids(gid)
    if et[0] == 1:
        ab = fixed[pl.absolute[fixed]]
        if int(fx[0, 0]) not in set(ab.tolist()):
            raise InvariantViolation("Type 1 witness is not a fixed absolute point")
        return Type1(tuple(pl.point(int(i)) for i in ab))
    if et[0] == 2:
        if len(fixed) != 3 or sorted(fixed.tolist()) != sorted(fx[0].tolist()):
            raise InvariantViolation(f"Type 2 element fixes {len(fixed)} points, not a triangle")
        tri = pl.triangle(fixed)
        from .geometry import is_self_polar

        if not is_self_polar(pl, tri):
            raise InvariantViolation("fixed triangle is not self-polar")
        return Type2(tri)
    if len(fixed):
        raise InvariantViolation("Type 3 element fixes a point")
    return Type3(imaginary_triangle(t, gid))


# ---------------------------------------------------------------------------
# imaginary triangles (batch construction with invariant checks)


def _bmm(G: FieldCtx, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    out = np.zeros(X.shape[:-2] + (3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            acc = G.vmul(X[..., i, 0], Y[..., 0, j])
            for k in (1, 2):
                acc = G.vadd(acc, G.vmul(X[..., i, k], Y[..., k, j]))
            out[..., i, j] = acc
    return out


def _bmv(G: FieldCtx, X: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.zeros(v.shape, dtype=np.int64)
    for i in range(3):
        acc = G.vmul(X[..., i, 0], v[..., 0])
        for k in (1, 2):
            acc = G.vadd(acc, G.vmul(X[..., i, k], v[..., k]))
        out[..., i] = acc
    return out


def _binv3(G: FieldCtx, X: np.ndarray) -> np.ndarray:
    """Inverse via the adjugate."""
    m, ad, sb = G.vmul, G.vadd, G.vsub
    c = lambda i, j: X[..., i, j]
    cof = np.zeros_like(X)
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            minor = sb(m(c(r[0], s[0]), c(r[1], s[1])), m(c(r[0], s[1]), c(r[1], s[0])))
            cof[..., i, j] = minor if (i + j) % 2 == 0 else G.vneg(minor)
    det = ad(ad(m(c(0, 0), cof[..., 0, 0]), m(c(0, 1), cof[..., 0, 1])), m(c(0, 2), cof[..., 0, 2]))
    if (det == 0).any():
        raise InvariantViolation("singular matrix in the eigenbasis change")
    dinv = G.vinv(det)
    return G.vmul(np.swapaxes(cof, -1, -2), dinv[..., None, None])


def _bnormalize(G: FieldCtx, v: np.ndarray) -> np.ndarray:
    N = G.order
    lead = np.where(v[:, 0] != 0, v[:, 0], np.where(v[:, 1] != 0, v[:, 1], v[:, 2]))
    il = G.vinv(lead)
    w = G.vmul(v, il[:, None])
    return (w[:, 0] * N + w[:, 1]) * N + w[:, 2]


@dataclass
class ImagBatch:
    ids: np.ndarray
    alpha: np.ndarray
    lam: np.ndarray  # (n, 3) eigenvalues a, a^(q^2), a^(q^4)
    D: np.ndarray
    evecs: np.ndarray  # (n, 3, 3) standard coordinates, evecs[:, i] = e_i
    vertices: np.ndarray  # (n, 3) encodings of [e_0], [e_1], [e_2]
    Z: np.ndarray  # (n, 9) uint8, -1 rows never occur (entries checked)
    sigma: np.ndarray
    zeta: int
    violations: dict = field(default_factory=dict)


def imaginary_triangle_batch(t: GroupTable, ids) -> ImagBatch:
    """Explicit eigenvector construction for Type 3 elements with every invariant checked.

    Eigenvectors come from the closed forms in the cyclic basis
    b0 = (1, 0, 0), b1 = T b0, b2 = T b1; Z is built as A^-1 diag(zeta, zeta^(q^2),
    zeta^(q^4)) A in that basis and carried back to standard coordinates.
    Violations are counted per invariant rather than raised.
    """
    G = t.big
    q, Q = t.q, t.Q
    ids = np.asarray(ids, dtype=np.int64)
    n = len(ids)
    viol: dict[str, int] = {}

    def note(name, bad):
        c = int(np.count_nonzero(bad))
        viol[name] = viol.get(name, 0) + c

    if (t.etype[ids] != 3).any():
        raise DomainError("imaginary_triangle needs Type 3 elements")
    T = t.mats[ids].astype(np.int64).reshape(n, 3, 3)
    Tb = t.emb[T]
    a = t.alphas(ids)
    b = G.vpow(a, Q)
    c = G.vpow(b, Q)
    note("alpha_norm_q4q21", G.vpow(a, Q * Q + Q + 1) != 1)
    note("alpha_in_subfield", b == a)
    note("alpha_order_q2q1", G.vpow(a, q * q - q + 1) != 1)

    # cyclic basis over GF(q^2)
    ad, mu = t.add.astype(np.int64), t.mult.astype(np.int64)
    b1 = T[:, :, 0]
    b2 = np.stack([ad[ad[mu[T[:, i, 0], b1[:, 0]], mu[T[:, i, 1], b1[:, 1]]], mu[T[:, i, 2], b1[:, 2]]] for i in range(3)], 1)
    B = np.zeros((n, 3, 3), dtype=np.int64)
    B[:, 0, 0] = 1
    B[:, :, 1] = b1
    B[:, :, 2] = b2
    Bb = t.emb[B]

    m, sb = G.vmul, G.vsub
    D = m(m(sb(c, b), sb(c, a)), sb(b, a))
    if (D == 0).any():
        raise InvariantViolation("repeated eigenvalues for a Type 3 element")
    Di = G.vinv(D)
    sq = lambda x: m(x, x)
    coeffs = np.stack(
        [
            np.stack([sb(m(sq(c), b), m(c, sq(b))), sb(sq(b), sq(c)), sb(c, b)], -1),
            np.stack([sb(m(c, sq(a)), m(sq(c), a)), sb(sq(c), sq(a)), sb(a, c)], -1),
            np.stack([sb(m(sq(b), a), m(b, sq(a))), sb(sq(a), sq(b)), sb(b, a)], -1),
        ],
        axis=2,
    )  # coeffs[:, k, i] = coefficient of b_k in e_i
    E = m(coeffs, Di[:, None, None])
    lam = np.stack([a, b, c], axis=1)
    A = np.stack([np.ones_like(lam), lam, sq(lam)], axis=2)  # rows (1, l_i, l_i^2)
    ident = np.broadcast_to(np.eye(3, dtype=np.int64), (n, 3, 3))
    note("vandermonde_inverse", ~(_bmm(G, A, E) == ident).all(axis=(1, 2)))

    evecs = np.stack([_bmv(G, Bb, E[:, :, i]) for i in range(3)], axis=1)  # (n, 3 vectors, 3 coords)
    for i in range(3):
        lhs = _bmv(G, Tb, evecs[:, i])
        rhs = m(evecs[:, i], lam[:, i, None])
        note("eigen_equation", ~(lhs == rhs).all(axis=1))

    # extended form, conjugation x -> x^(q^3)
    h = q**3
    fh = lambda x, y: G.vadd(G.vadd(m(x[:, 0], G.vpow(y[:, 0], h)), m(x[:, 1], G.vpow(y[:, 1], h))), m(x[:, 2], G.vpow(y[:, 2], h)))
    for i in range(3):
        note("vertex_absolute", fh(evecs[:, i], evecs[:, i]) == 0)
        for j in range(i + 1, 3):
            note("vertices_not_orthogonal", fh(evecs[:, i], evecs[:, j]) != 0)
    vertices = np.stack([_bnormalize(G, evecs[:, i]) for i in range(3)], axis=1)

    mord = q * q - q + 1
    s = (G.order - 1) // mord
    zeta = int(G.exp[s])
    zd = np.array([zeta, G.pow(zeta, Q), G.pow(zeta, Q * Q)], dtype=np.int64)
    ZB = _bmm(G, m(E, zd[None, None, :]), A)
    Binv = t.emb[_vinv_small(t, B)]
    Zs = _bmm(G, _bmm(G, Bb, ZB), Binv)
    Zi = t.emb_inv[Zs].reshape(n, 9)
    bad_field = (Zi < 0).any(axis=1)
    note("Z_entries_outside_GFq2", bad_field)
    Zi = np.where(bad_field[:, None], np.array([1, 0, 0, 0, 1, 0, 0, 0, 1]), Zi).astype(np.uint8)
    for i in range(3):
        lhs = _bmv(G, t.emb[Zi.astype(np.int64).reshape(n, 3, 3)], evecs[:, i])
        note("Z_fixes_vertices", ~(lhs == m(evecs[:, i], zd[i])).all(axis=1))
    prod = t.matmul(t.conj_transpose(Zi), Zi)
    note("Z_not_unitary", ~(prod == np.array([1, 0, 0, 0, 1, 0, 0, 0, 1], dtype=np.uint8)).all(axis=1))
    note("Z_det", _vdet(t.field, Zi) != 1)
    eye = np.array([1, 0, 0, 0, 1, 0, 0, 0, 1], dtype=np.uint8)
    note("Z_order", ~(t.mat_power(Zi, mord) == eye).all(axis=1))
    for r in prime_factors(mord):
        note("Z_order", (t.mat_power(Zi, mord // r) == eye).all(axis=1))
    sord = mord // t.center
    note("sigma_order", ~t.is_scalar(t.mat_power(Zi, sord)))
    for r in prime_factors(sord):
        note("sigma_order", t.is_scalar(t.mat_power(Zi, sord // r)))
    la = G.log[a]
    note("alpha_not_in_zeta_group", la % s != 0)
    j = la // s
    note("tau_not_in_sigma", ~(t.mat_power(Zi, j) == t.mats[ids]).all(axis=1))
    sigma = t.index(Zi)
    return ImagBatch(ids, a, lam, D, evecs, vertices, Zi, sigma, zeta, viol)


def _vinv_small(t: GroupTable, B: np.ndarray) -> np.ndarray:
    F = t.field
    ad, mu, ng = t.add.astype(np.int64), t.mult.astype(np.int64), t.neg.astype(np.int64)
    cof = np.zeros_like(B)
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            minor = ad[mu[B[:, r[0], s[0]], B[:, r[1], s[1]]], ng[mu[B[:, r[0], s[1]], B[:, r[1], s[0]]]]]
            cof[:, i, j] = minor if (i + j) % 2 == 0 else ng[minor]
    det = ad[ad[mu[B[:, 0, 0], cof[:, 0, 0]], mu[B[:, 0, 1], cof[:, 0, 1]]], mu[B[:, 0, 2], cof[:, 0, 2]]]
    if (det == 0).any():
        raise InvariantViolation("cyclic basis is degenerate")
    dinv = F.inv_table[det]
    return mu[np.swapaxes(cof, 1, 2), dinv[:, None, None]]


def imaginary_triangle(t: GroupTable, g) -> ImaginaryTriangleData:
    gid = t.id_of(g)
    bt = imaginary_triangle_batch(t, [gid])
    bad = {k: v for k, v in bt.violations.items() if v}
    if bad:
        raise InvariantViolation(f"imaginary triangle invariants fail: {sorted(bad)}")
    return ImaginaryTriangleData(
        alpha=int(bt.alpha[0]),
        eigenvalues=tuple(int(x) for x in bt.lam[0]),
        eigenvectors=tuple(tuple(int(x) for x in bt.evecs[0, i]) for i in range(3)),
        D=int(bt.D[0]),
        vertices=tuple(sorted(int(x) for x in bt.vertices[0])),
        Z=_mat_tuple(bt.Z[0]),
        sigma=int(bt.sigma[0]),
        zeta=bt.zeta,
    )


# ---------------------------------------------------------------------------
# censuses


def type_census(t: GroupTable) -> dict[str, int]:
    et = t.etype
    return {"type1": int((et == 1).sum()), "type2": int((et == 2).sum()), "type3": int((et == 3).sum()), "order": t.order}


@dataclass
class SylowReport:
    q: int
    count: int
    orders: list[int]
    all_closed: bool
    all_nonabelian: bool
    exponents: list[int]
    trivial_intersections: bool
    union_size: int
    subgroups: dict = field(repr=False, default_factory=dict)


def sylow_p_census(t: GroupTable, check_closure: bool = True) -> SylowReport:
    pl = t.plane
    om = t.omega
    ab = pl.absolute_ids
    owner = np.full(len(om), -1, dtype=np.int64)
    nfix = np.zeros(len(om), dtype=np.int64)
    step = max(1, CHUNK // 4)
    for s in range(0, len(om), step):
        im = t.point_images(om[s : s + step], ab)
        fixed = im == ab[None, :]
        nfix[s : s + step] = fixed.sum(axis=1)
        owner[s : s + step] = np.argmax(fixed, axis=1)
    trivial = bool((nfix == 1).all())
    subs = {}
    for k, P in enumerate(ab):
        subs[int(P)] = np.union1d([t.identity], om[owner == k])
    orders = [len(v) for v in subs.values()]
    closed = all(is_subgroup(t, v) for v in subs.values()) if check_closure else True
    nonab = True
    exps = []
    o = t.orders
    for v in subs.values():
        exps.append(int(np.lcm.reduce(o[v].astype(np.int64))))
        x = v[1 : min(len(v), 12)]
        xy = t.mul(np.repeat(x, len(x)), np.tile(x, len(x)))
        yx = t.mul(np.tile(x, len(x)), np.repeat(x, len(x)))
        if (xy == yx).all():
            # fall back to a full check only when the cheap test is inconclusive
            xy = t.mul(np.repeat(v, len(v)), np.tile(v, len(v)))
            yx = t.mul(np.tile(v, len(v)), np.repeat(v, len(v)))
            if (xy == yx).all():
                nonab = False
    return SylowReport(t.q, len(subs), orders, closed, nonab, exps, trivial, int(len(om)), subs)


def normalizer(s, t: GroupTable, gens: list[int] | None = None) -> np.ndarray:
    s = np.unique(np.asarray(s, dtype=np.int64))
    if gens is None:
        gens = generators_of(t, s)
        if gens is None:
            raise DomainError("set is not closed under the group product")
    allg = np.arange(t.order)
    keep = np.ones(t.order, dtype=bool)
    inv = t.inverses
    for x in gens:
        c = t.mul(t.mul(allg, x), inv)
        keep &= np.isin(c, s)
    return allg[keep]


def sylow_r_subgroup(t: GroupTable) -> tuple[int, np.ndarray]:
    """(r, Sylow r-subgroup) for r the largest prime factor of q^2 - q + 1."""
    r, _ = lemma7_check(t.q)
    n = t.order
    rpart = 1
    while n % (rpart * r) == 0:
        rpart *= r
    g = int(np.flatnonzero(t.orders == rpart)[0])
    return r, generate(t, [g])


def elation_census(P: ProjPoint, t: GroupTable) -> int:
    pl = t.plane
    pid = pl.point_id(P)
    if pl.absolute[pid]:
        raise DomainError("elation census needs a nonabsolute point")
    stab = stabilizer_members(NonAbsPointStab(P), t)
    return int(np.isin(stab, t.omega).sum())


# ---------------------------------------------------------------------------
# the maximal-subgroup lists as data


def is_square_mod(x: int, q) -> bool:
    """Whether the integer x is a square in GF(q), q odd."""
    pp = as_prime_power(q)
    if pp.p == 2:
        return True
    x %= pp.p
    if x == 0 or pp.a % 2 == 0:
        return True
    return pow(x, (pp.p - 1) // 2, pp.p) == 1


def _subfield_roots(q) -> list[int]:
    """q0 with q = q0^k for odd k >= 3."""
    pp = as_prime_power(q)
    out = []
    for k in range(3, pp.a + 1, 2):
        if pp.a % k == 0:
            out.append(pp.p ** (pp.a // k))
    return out


@dataclass(frozen=True)
class ClassItem:
    label: str
    order: int
    present: bool
    geometric: bool


def maximal_class_items(q) -> list[ClassItem]:
    """The candidate classes of the Mitchell (q odd) or Hartley (q even) lists at q."""
    pp = as_prime_power(q)
    q = pp.q
    g = math.gcd(3, q + 1)
    items = [
        ClassItem("abs_point", stabilizer_order("abs", q), True, True),
        ClassItem("nonabs_point", stabilizer_order("nonabs", q), True, True),
        ClassItem("triangle", stabilizer_order("triangle", q), True, True),
        ClassItem("imag_triangle", stabilizer_order("imag", q), True, True),
    ]
    odd = pp.p != 2
    for q0 in _subfield_roots(q):
        k = round(math.log(q) / math.log(q0))
        u = q0**3 * (q0**3 + 1) * (q0 * q0 - 1)
        if odd:
            items.append(ClassItem(f"U3({q0})", u // math.gcd(3, q0 + 1), True, False))
            items.append(ClassItem(f"PGU3({q0})", u, k % 3 == 0 and (q0 + 1) % 3 == 0, False))
        else:
            prime_k = all(k % d for d in range(2, k))
            items.append(ClassItem(f"U3({q0})", u // math.gcd(3, q0 + 1), prime_k, False))
            items.append(ClassItem(f"PGU3({q0})", u, k == 3 and (pp.a // 3) % 2 == 1, False))
    if odd:
        five_odd = pp.p == 5 and pp.a % 2 == 1
        items += [
            ClassItem("conic", q * (q * q - 1), True, True),
            ClassItem("hessian216", 216, (q + 1) % 9 == 0, False),
            ClassItem("hessian72", 72, (q + 1) % 3 == 0, False),
            ClassItem("hessian36", 36, (q + 1) % 3 == 0, False),
            ClassItem("L3(2)", 168, not is_square_mod(-7, q), False),
            ClassItem("A6", 360, is_square_mod(5, q) and (q - 1) % 3 != 0, False),
            ClassItem("A6.2", 720, five_odd, False),
            ClassItem("A7", 2520, five_odd, False),
        ]
    elif q == 2:
        items.append(ClassItem("order36", 36, True, False))
    return items


def max_proper_order(q) -> int:
    return max(it.order for it in maximal_class_items(q) if it.present)


EXCEPTIONAL_ORDERS = (36, 72, 168, 216, 360, 720, 2520)


def imag_order_audit(q) -> dict:
    """Divisibility of (q^2-q+1)/gcd(3,q+1) into every listed maximal order but the imaginary one."""
    pp = as_prime_power(q)
    q = pp.q
    s = (q * q - q + 1) // math.gcd(3, q + 1)
    orders = {it.label: it.order for it in maximal_class_items(q) if it.present and it.label != "imag_triangle"}
    for o in EXCEPTIONAL_ORDERS:
        orders.setdefault(f"exceptional{o}", o)
    divides = sorted(k for k, o in orders.items() if o % s == 0)
    return {"q": q, "sigma_order": s, "checked": orders, "divides": divides, "ok": not divides}
