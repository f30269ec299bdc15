"""PG(2, q^2) with the standard Hermitian form and its unitary polarity.

Points and lines both carry normalized coordinate triples (first nonzero
entry equal to 1), so they share one id space: id ``i`` is the point with
coordinates ``plane.coords[i]`` and also the line with those coordinates.
A point x lies on a line l when x . l = 0 (plain dot product), and the polar
of the point x is the line with coordinates conj(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, ResourceLimitError
from .fields import FieldCtx, as_prime_power, gf_q2

EXHAUSTIVE_TRIANGLE_Q = 5


def _normalize(ctx: FieldCtx, coords: Sequence[int]) -> tuple[int, int, int]:
    c = [int(x) for x in coords]
    if len(c) != 3:
        raise DomainError("projective coordinates need three entries")
    lead = next((x for x in c if x), 0)
    if lead == 0:
        raise DomainError("the zero vector is not a projective point")
    s = ctx.inv(lead)
    return (ctx.mul(c[0], s), ctx.mul(c[1], s), ctx.mul(c[2], s))


@dataclass(frozen=True, order=True)
class ProjPoint:
    coords: tuple[int, int, int]

    @classmethod
    def of(cls, ctx: FieldCtx, coords: Sequence[int]) -> "ProjPoint":
        return cls(_normalize(ctx, coords))


@dataclass(frozen=True, order=True)
class ProjLine:
    coords: tuple[int, int, int]

    @classmethod
    def of(cls, ctx: FieldCtx, coords: Sequence[int]) -> "ProjLine":
        return cls(_normalize(ctx, coords))


@dataclass(frozen=True)
class Triangle:
    """Three non-collinear points in sorted order."""

    vertices: tuple[ProjPoint, ProjPoint, ProjPoint]

    @classmethod
    def of(cls, ctx: FieldCtx, pts: Sequence) -> "Triangle":
        ps = sorted(p if isinstance(p, ProjPoint) else ProjPoint.of(ctx, p) for p in pts)
        if len(set(ps)) != 3:
            raise DomainError("a triangle needs three distinct points")
        if _det3(ctx, [p.coords for p in ps]) == 0:
            raise DomainError("triangle vertices are collinear")
        return cls(tuple(ps))


def _det3(ctx: FieldCtx, rows) -> int:
    (a, b, c), (d, e, f), (g, h, i) = rows
    m, ad, sb = ctx.mul, ctx.add, ctx.sub
    t1 = m(a, sb(m(e, i), m(f, h)))
    t2 = m(b, sb(m(d, i), m(f, g)))
    t3 = m(c, sb(m(d, h), m(e, g)))
    return ad(sb(t1, t2), t3)


def form_eval(ctx: FieldCtx, x: Sequence[int], y: Sequence[int]) -> int:
    """Sum x_i * conj(y_i), with conj the involution x -> x^(sqrt |F|).

    Over GF(q^2) this is the standard Hermitian form; over GF(q^6) it is the
    extended form with conjugation x -> x^(q^3).
    """
    h = ctx.half_q
    acc = 0
    for a, b in zip(x, y):
        acc = ctx.add(acc, ctx.mul(int(a), ctx.pow(int(b), h)))
    return acc


def cross(ctx: FieldCtx, a: Sequence[int], b: Sequence[int]) -> tuple[int, int, int]:
    m, sb = ctx.mul, ctx.sub
    return (
        sb(m(a[1], b[2]), m(a[2], b[1])),
        sb(m(a[2], b[0]), m(a[0], b[2])),
        sb(m(a[0], b[1]), m(a[1], b[0])),
    )


class HermitianPlane:
    """All points of PG(2, q^2) with polarity data precomputed as arrays."""

    def __init__(self, q):
        pp = as_prime_power(q)
        self.q = pp.q
        self.p = pp.p
        self.field = F = gf_q2(pp.q)
        Q = self.Q = F.order
        self.add, self.mul = F.add_table, F.mul_table
        self.neg = F.neg_table
        self.inv = F.inv_table
        self.conj = F.vconj(np.arange(Q))
        self.norm = F.vpow(np.arange(Q), pp.q + 1)
        # normalized triples in increasing code order: (0,0,1), (0,1,*), (1,*,*)
        a = np.arange(Q, dtype=np.int64)
        blocks = [
            np.array([[0, 0, 1]], dtype=np.int64),
            np.stack([np.zeros(Q, np.int64), np.ones(Q, np.int64), a], axis=1),
            np.stack([np.ones(Q * Q, np.int64), np.repeat(a, Q), np.tile(a, Q)], axis=1),
        ]
        self.coords = np.concatenate(blocks)
        self.n_points = self.coords.shape[0]
        c = self.coords
        self.codes = (c[:, 0] * Q + c[:, 1]) * Q + c[:, 2]
        self.lookup = np.full(Q**3, -1, dtype=np.int32)
        self.lookup[self.codes] = np.arange(self.n_points, dtype=np.int32)
        self.self_form = self.vform(c, c)
        self.absolute = self.self_form == 0
        self.perp_ids = self.ids_of(self.conj[c])

    # -- vectorised helpers ---------------------------------------------
    def vdot(self, x, y):
        ad, m = self.add, self.mul
        return ad[ad[m[x[..., 0], y[..., 0]], m[x[..., 1], y[..., 1]]], m[x[..., 2], y[..., 2]]]

    def vform(self, x, y):
        return self.vdot(np.asarray(x), self.conj[np.asarray(y)])

    def ids_of(self, v) -> np.ndarray:
        """Point ids of the rows of v (..., 3); -1 for zero rows."""
        v = np.asarray(v, dtype=np.int64)
        v0, v1, v2 = v[..., 0], v[..., 1], v[..., 2]
        lead = np.where(v0 != 0, v0, np.where(v1 != 0, v1, v2))
        s = self.inv[np.where(lead == 0, 1, lead)]
        m = self.mul
        code = (m[v0, s].astype(np.int64) * self.Q + m[v1, s]) * self.Q + m[v2, s]
        return np.where(lead == 0, -1, self.lookup[code])

    def vcross(self, a, b):
        ad, m, ng = self.add, self.mul, self.neg
        return np.stack(
            [
                ad[m[a[..., 1], b[..., 2]], ng[m[a[..., 2], b[..., 1]]]],
                ad[m[a[..., 2], b[..., 0]], ng[m[a[..., 0], b[..., 2]]]],
                ad[m[a[..., 0], b[..., 1]], ng[m[a[..., 1], b[..., 0]]]],
            ],
            axis=-1,
        )

    # -- ids and objects ---------------------------------------------------
    def point_id(self, p) -> int:
        coords = p.coords if isinstance(p, (ProjPoint, ProjLine)) else _normalize(self.field, p)
        return int(self.lookup[(coords[0] * self.Q + coords[1]) * self.Q + coords[2]])

    def point(self, i: int) -> ProjPoint:
        return ProjPoint(tuple(int(x) for x in self.coords[i]))

    def line(self, i: int) -> ProjLine:
        return ProjLine(tuple(int(x) for x in self.coords[i]))

    def triangle(self, ids) -> Triangle:
        return Triangle(tuple(sorted(self.point(int(i)) for i in ids)))

    def triangle_ids(self, tri: Triangle) -> tuple[int, int, int]:
        return tuple(sorted(self.point_id(v) for v in tri.vertices))

    @cached_property
    def absolute_ids(self) -> np.ndarray:
        return np.flatnonzero(self.absolute)

    @cached_property
    def nonabsolute_ids(self) -> np.ndarray:
        return np.flatnonzero(~self.absolute)

    @cached_property
    def incidence_to_absolute(self) -> np.ndarray:
        """Boolean (lines, absolute points) incidence."""
        ab = self.coords[self.absolute_ids]
        return self.vdot(self.coords[:, None, :], ab[None, :, :]) == 0

    @cached_property
    def line_absolute_counts(self) -> np.ndarray:
        return self.incidence_to_absolute.sum(axis=1)

    @cached_property
    def line_first_absolute(self) -> np.ndarray:
        """For each line id, the least absolute point on it (every line has one)."""
        inc = self.incidence_to_absolute
        return self.absolute_ids[np.argmax(inc, axis=1)].astype(np.int32)

    def points_on_line(self, line_id: int) -> np.ndarray:
        return np.flatnonzero(self.vdot(self.coords, self.coords[line_id][None, :]) == 0)

    # -- self-polar triangles ---------------------------------------------
    @cached_property
    def self_polar_triangles(self) -> np.ndarray:
        """Sorted (T, 3) vertex ids of all self-polar triangles."""
        return np.concatenate(list(self._triangle_chunks()) or [np.empty((0, 3), np.int64)])

    def _triangle_chunks(self) -> Iterator[np.ndarray]:
        na = self.nonabsolute_ids
        cna = self.coords[na]
        for a in na:
            xa = self.coords[a]
            orth = self.vform(cna, xa[None, :]) == 0
            bs = na[orth & (na > a)]
            if bs.size == 0:
                continue
            xb = self.coords[bs]
            xc = self.vcross(self.conj[np.broadcast_to(xa, xb.shape)], self.conj[xb])
            cs = self.ids_of(xc)
            keep = cs > bs
            if keep.any():
                yield np.stack([np.full(keep.sum(), a), bs[keep], cs[keep]], axis=1)

    def iter_self_polar_triangles(self) -> Iterator[Triangle]:
        for chunk in self._triangle_chunks():
            for row in chunk:
                yield self.triangle(row)


@lru_cache(maxsize=None)
def plane(q) -> HermitianPlane:
    return HermitianPlane(as_prime_power(q).q)


class Polarity:
    """The unitary polarity of a plane; maps points to lines and back."""

    def __init__(self, pl: HermitianPlane):
        self.plane = pl

    def __call__(self, x):
        return perp(self.plane, x)


def perp(pl: HermitianPlane, x):
    F = pl.field
    if not isinstance(x, (ProjPoint, ProjLine)):
        raise DomainError("perp takes a ProjPoint or a ProjLine")
    c = tuple(F.conj(int(v)) for v in x.coords)
    if isinstance(x, ProjPoint):
        return ProjLine.of(F, c)
    return ProjPoint.of(F, c)


def incident(pl: HermitianPlane, P: ProjPoint, l: ProjLine) -> bool:
    F = pl.field
    return F.sum(F.mul(a, b) for a, b in zip(P.coords, l.coords)) == 0


def is_absolute(pl: HermitianPlane, P: ProjPoint) -> bool:
    return form_eval(pl.field, P.coords, P.coords) == 0


def absolute_points(q) -> list[ProjPoint]:
    pl = plane(q)
    return [pl.point(int(i)) for i in pl.absolute_ids]


def line_absolute_count(pl: HermitianPlane, l: ProjLine) -> int:
    return int(pl.line_absolute_counts[pl.point_id(l)])


def is_self_polar(pl: HermitianPlane, tri: Triangle) -> bool:
    F = pl.field
    vs = [v.coords for v in tri.vertices]
    if any(form_eval(F, v, v) == 0 for v in vs):
        return False
    return all(form_eval(F, vs[i], vs[j]) == 0 for i in range(3) for j in range(i + 1, 3))


def enumerate_self_polar_triangles(q) -> list[Triangle]:
    pp = as_prime_power(q)
    if pp.q > EXHAUSTIVE_TRIANGLE_Q:
        raise ResourceLimitError(
            f"exhaustive triangle lists stop at q={EXHAUSTIVE_TRIANGLE_Q}; "
            "use HermitianPlane.iter_self_polar_triangles"
        )
    pl = plane(pp.q)
    return [pl.triangle(row) for row in pl.self_polar_triangles]


def self_polar_count(q) -> int:
    q = as_prime_power(q).q
    return q * q * (q * q - q + 1) * (q * q - q) // 6


def _unit_scale(pl: HermitianPlane, v: Sequence[int]) -> tuple[int, int, int]:
    """v scaled by the least-index x with x^(q+1) = f(v, v)^-1."""
    F = pl.field
    n = form_eval(F, v, v)
    target = F.inv(n)
    x = int(np.flatnonzero(pl.norm == target)[0])
    return tuple(F.mul(x, int(c)) for c in v)


def extend_to_orthonormal_basis(pl: HermitianPlane, P: ProjPoint):
    """An orthonormal basis (e0, e1, e2) with [e0] = P."""
    F = pl.field
    if is_absolute(pl, P):
        raise DomainError("an absolute point has no unit vector")
    e0 = _unit_scale(pl, P.coords)
    on_polar = pl.points_on_line(int(pl.perp_ids[pl.point_id(P)]))
    b = next(int(i) for i in on_polar if not pl.absolute[i])
    e1 = _unit_scale(pl, pl.coords[b])
    e2 = _unit_scale(pl, cross(F, [F.conj(c) for c in e0], [F.conj(c) for c in e1]))
    return e0, e1, e2
