"""Explicit covers of U3(q) by stabilizers, the bound formulas, and the counting lower bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, InvariantViolation
from .fields import as_prime_power, prime_powers
from .geometry import ProjPoint
from .graph import VertexSubset, build_graph, is_triangle_free, m_formula
from .group import (
    AbsPointStab,
    GroupTable,
    ImagTriangleStab,
    NonAbsPointStab,
    TriangleStab,
    imag_triangle_count,
    imag_vertices_of,
    maximal_class_items,
    normalizer,
    stabilizer_members,
    sylow_r_subgroup,
)


def k_formula(q) -> int:
    pp = as_prime_power(q)
    return 1 if pp.p == 3 else 1 + pp.q**3


def t_formula(q) -> int:
    return imag_triangle_count(q)


@dataclass(frozen=True)
class BoundsReport:
    q: int
    k: int
    m: int
    T: int
    lower: int
    upper: int
    simple_lower: int
    simple_upper: int
    lower_ratio: float  # approximate, 64-bit float
    upper_ratio: float  # approximate, 64-bit float
    advisory: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def bounds(q) -> BoundsReport:
    q = as_prime_power(q).q
    k, m, T = k_formula(q), m_formula(q), t_formula(q)
    lower = k + T
    upper = q**4 + q * q + 1 - m + T
    slow = 1 + T
    sup = q**4 - q**3 - q * q + 2 * q + 2 + T
    base = Fraction(q**6, 3)
    rep = BoundsReport(
        q, k, m, T, lower, upper, slow, sup, float(lower / base), float(upper / base), advisory=q < 7
    )
    if q >= 7:
        if not (slow <= lower <= upper <= sup):
            raise InvariantViolation(f"bound envelope fails at q={q}")
    return rep


def ratio_deviation(q) -> tuple[Fraction, Fraction]:
    """Exact |lower/(q^6/3) - 1| and |upper/(q^6/3) - 1|."""
    r = bounds(q)
    base = Fraction(r.q**6, 3)
    return abs(r.lower / base - 1), abs(r.upper / base - 1)


def asymptotic_report(q_max: int, q_min: int = 7) -> list[dict]:
    rows = []
    for q in prime_powers(q_min, q_max):
        r = bounds(q)
        dl, du = ratio_deviation(q)
        rows.append(
            {
                "q": q,
                "lower_ratio": r.lower_ratio,
                "upper_ratio": r.upper_ratio,
                "within_8_over_q": bool(q < 7 or (dl <= Fraction(8, q) and du <= Fraction(8, q))),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# the explicit cover


@dataclass
class CoverSpec:
    q: int
    handles: list
    S: VertexSubset
    declared_size: int
    abs_ids: np.ndarray = field(repr=False)
    sprime_ids: np.ndarray = field(repr=False)
    imag_vertices: np.ndarray = field(repr=False)  # (k, 3) sorted encodings

    def __len__(self) -> int:
        return len(self.handles)


def imaginary_triangle_orbit(t: GroupTable) -> np.ndarray:
    """Vertex triples of the conjugates of the Sylow r-normalizer, via the orbit of its triangle."""
    _, R = sylow_r_subgroup(t)
    g = int(R[1])
    v = np.array(imag_vertices_of(t, g))
    im = np.sort(t.big_apply(np.arange(t.order), v), axis=1)
    return np.unique(im, axis=0)


def declared_cover_size(q, s_size: int) -> int:
    q = as_prime_power(q).q
    return q**4 + q * q + 1 - s_size + t_formula(q)


def build_cover(q, S: VertexSubset, t: GroupTable, check: bool = True) -> CoverSpec:
    q = as_prime_power(q).q
    if t.q != q:
        raise DomainError("table and cover disagree on q")
    pl = t.plane
    ids = np.array(S.ids, dtype=np.int64)
    if ids.size and pl.absolute[ids].any():
        raise DomainError("S must consist of nonabsolute points")
    if check and not (S.verified and is_triangle_free(build_graph(q), ids)):
        raise DomainError("S is not a verified triangle-free set")
    sprime = np.setdiff1d(pl.nonabsolute_ids, ids)
    tri = imaginary_triangle_orbit(t)
    handles: list = [AbsPointStab(pl.point(int(i))) for i in pl.absolute_ids]
    handles += [NonAbsPointStab(pl.point(int(i))) for i in sprime]
    handles += [ImagTriangleStab(tuple(int(x) for x in row)) for row in tri]
    declared = declared_cover_size(q, len(ids))
    return CoverSpec(q, handles, S, declared, pl.absolute_ids.copy(), sprime, tri)


@dataclass
class CoverCertificate:
    q: int
    n_subgroups: int
    declared_size: int
    size_matches: bool
    covered: int
    order: int
    tallies: dict
    witness: dict | None

    @property
    def ok(self) -> bool:
        return self.witness is None and self.covered == self.order and self.size_matches

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def verify_cover(c: CoverSpec, t: GroupTable) -> CoverCertificate:
    """Check each element against the subgroup its type says must contain it."""
    if c.q != t.q:
        raise DomainError("table and cover disagree on q")
    pl = t.plane
    et, fx = t.classification
    in_abs = np.zeros(pl.n_points, dtype=bool)
    in_abs[c.abs_ids] = True
    in_sp = np.zeros(pl.n_points, dtype=bool)
    in_sp[c.sprime_ids] = True
    keys = np.sort(c.imag_vertices[:, 0]) if len(c.imag_vertices) else np.empty(0, np.int64)
    ok = np.zeros(t.order, dtype=bool)
    t1, t2, t3 = et == 1, et == 2, et == 3
    ok[t1] = in_abs[fx[t1, 0]]
    f2 = fx[t2]
    ok[t2] = in_sp[f2[:, 0]] | in_sp[f2[:, 1]] | in_sp[f2[:, 2]]
    k3 = t.imag_keys[t3]
    pos = np.minimum(np.searchsorted(keys, k3), max(len(keys) - 1, 0))
    ok[t3] = (keys[pos] == k3) if len(keys) else False
    tallies = {}
    for name, m in (("type1", t1), ("type2", t2), ("type3", t3)):
        tallies[name] = {"total": int(m.sum()), "covered": int((ok & m).sum())}
    witness = None
    bad = np.flatnonzero(~ok)
    if bad.size:
        g = int(bad[0])
        w = {"element": g, "type": int(et[g]), "matrix": t.mats[g].tolist()}
        if et[g] == 2:
            w["fixed_triangle"] = [int(x) for x in fx[g]]
        elif et[g] == 1:
            w["absolute_point"] = int(fx[g, 0])
        else:
            w["imag_key"] = int(t.imag_keys[g])
        witness = w
    return CoverCertificate(
        c.q, len(c.handles), c.declared_size, len(c.handles) == c.declared_size, int(ok.sum()), t.order, tallies, witness
    )


def verify_cover_by_membership(c: CoverSpec, t: GroupTable) -> int:
    """Independent check: size of the union of all handle member sets (small q only)."""
    seen = np.zeros(t.order, dtype=bool)
    for h in c.handles:
        seen[stabilizer_members(h, t)] = True
    return int(seen.sum())


# ---------------------------------------------------------------------------
# the counting lower bound

# elements of p-power order in the exceptional groups, by p
_EXCEPTIONAL_P_ELEMENTS = {
    "hessian216": {},
    "hessian72": {},
    "hessian36": {},
    "L3(2)": {7: 48},
    "A6": {5: 144},
    "A6.2": {5: 144},
    "A7": {5: 504, 7: 720},
}


@dataclass
class LowerBoundCertificate:
    q: int
    omega_size: int
    a: dict  # "a1" .. "a7"
    sources: dict  # how each a_i was obtained
    audit: dict  # a_i < a_1 for i >= 2
    audit_passed: bool
    x_sum_min: int
    implied_bound: int
    chain_valid: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def lower_bound_certificate(q, t: GroupTable, reps: int = 3, seed: int = 0, maximals=None) -> LowerBoundCertificate:
    """a_i = max |H cap Omega| per class; X1-X4 by enumeration, X5-X7 by order arithmetic.

    ``maximals`` may carry harvested subgroups (label -> list of id arrays) whose
    measured counts are used for the exceptional classes when available.
    """
    pp = as_prime_power(q)
    q = pp.q
    if pp.p == 3:
        raise DomainError("the counting argument assumes p != 3")
    if t.q != q:
        raise DomainError("table and q disagree")
    om = t.omega
    if len(om) != q**6 - 1:
        raise InvariantViolation(f"|Omega| = {len(om)}, expected {q**6 - 1}")
    in_om = np.zeros(t.order, dtype=bool)
    in_om[om] = True
    pl = t.plane
    rng = np.random.default_rng(seed)

    def measure(handles):
        return max(int(in_om[stabilizer_members(h, t)].sum()) for h in handles)

    pick = lambda arr: rng.choice(arr, size=min(reps, len(arr)), replace=False)
    a, src = {}, {}
    a["a1"] = measure([AbsPointStab(pl.point(int(i))) for i in pick(pl.absolute_ids)])
    a["a2"] = measure([NonAbsPointStab(pl.point(int(i))) for i in pick(pl.nonabsolute_ids)])
    tris = pl.self_polar_triangles
    a["a3"] = measure([TriangleStab(pl.triangle(tris[int(i)])) for i in pick(np.arange(len(tris)))])
    t3 = np.flatnonzero(t.etype == 3)
    a["a4"] = measure([ImagTriangleStab(imag_vertices_of(t, int(g))) for g in pick(t3)]) if t3.size else 0
    for k in ("a1", "a2", "a3", "a4"):
        src[k] = "enumerated"
    items = {it.label: it for it in maximal_class_items(q) if it.present}
    sub = [lab for lab in items if lab.startswith("U3(") or lab.startswith("PGU3(")]
    a["a5"] = max((int(lab.split("(")[1].rstrip(")")) ** 6 - 1 for lab in sub), default=0)
    src["a5"] = "order arithmetic" if sub else "empty class"
    if pp.p == 2:
        a["a6"] = a["a7"] = 0
        src["a6"] = src["a7"] = "empty class"
    else:
        a["a6"] = (q - 1) * (q * q - 1)
        src["a6"] = "order arithmetic"
        best = 0
        for lab, counts in _EXCEPTIONAL_P_ELEMENTS.items():
            if lab in items:
                best = max(best, counts.get(pp.p, 0))
        src["a7"] = "order arithmetic"
        if maximals:
            for lab, groups in maximals.items():
                if lab in _EXCEPTIONAL_P_ELEMENTS:
                    for h in groups:
                        best = max(best, int(in_om[np.asarray(h)].sum()))
                    src["a7"] = "order arithmetic and enumeration"
        a["a7"] = best
    if a["a1"] != q**3 - 1 or a["a2"] != q * q - 1 or a["a4"] != 0:
        raise InvariantViolation(f"census identities fail at q={q}: {a}")
    audit = {k: a[k] < a["a1"] for k in ("a2", "a3", "a4", "a5", "a6", "a7")}
    passed = all(audit.values())
    x_min = -(-(q**6 - 1) // a["a1"])
    implied = x_min + t_formula(q)
    return LowerBoundCertificate(q, len(om), a, src, audit, passed, x_min, implied, passed)
