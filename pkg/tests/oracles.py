"""Independent reference implementations used to cross-check the package.

Nothing here imports the code under test except for plain data containers.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


# -- prime powers and number theory ----------------------------------------


def factor(n: int) -> dict[int, int]:
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int):
    f = factor(q)
    if len(f) != 1:
        return None
    (p, a), = f.items()
    return p, a


# -- naive polynomial fields -----------------------------------------------


def poly_mod(a, f, p):
    a = [c % p for c in a]
    while len(a) >= len(f):
        c = a[-1]
        if c:
            shift = len(a) - len(f)
            for i, fc in enumerate(f):
                a[shift + i] = (a[shift + i] - c * fc) % p
        a.pop()
    return a


def poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def is_irreducible_naive(f, p) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for cs in itertools.product(range(p), repeat=d):
            g = list(cs) + [1]
            if not any(poly_mod(list(f), g, p)):
                return False
    return True


def canonical_modulus_naive(p: int, k: int) -> tuple:
    for t in range(p**k):
        cs = [(t // p**i) % p for i in range(k)]
        f = cs + [1]
        if k == 1 or is_irreducible_naive(f, p):
            return tuple(f)
    raise AssertionError


class NaiveField:
    """GF(p^k) with elements as base-p little-endian indices; arithmetic by polynomials."""

    def __init__(self, p: int, k: int, modulus):
        self.p, self.k, self.f = p, k, list(modulus)
        self.order = p**k

    def digits(self, a):
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def index(self, ds):
        ds = list(ds) + [0] * (self.k - len(ds))
        return sum(int(d) * self.p**i for i, d in enumerate(ds[: self.k]))

    def add(self, a, b):
        return self.index([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def mul(self, a, b):
        return self.index(poly_mod(poly_mul(self.digits(a), self.digits(b), self.p), self.f, self.p))

    def pow(self, a, e):
        r = 1
        for _ in range(e):
            r = self.mul(r, a)
        return r


# -- geometry ---------------------------------------------------------------


def hermitian_counts(F: NaiveField, q: int):
    """(points, absolute points) of PG(2, q^2) by scanning normalized triples."""
    pts = []
    for c in itertools.product(range(F.order), repeat=3):
        nz = [x for x in c if x]
        if nz and nz[0] == 1:
            pts.append(c)
    absolute = 0
    for c in pts:
        s = 0
        for x in c:
            s = F.add(s, F.pow(x, q + 1))
        absolute += s == 0
    return len(pts), absolute


# -- group theoretic formulas ------------------------------------------------


def u3_order(q: int) -> int:
    return q**3 * (q**3 + 1) * (q * q - 1) // math.gcd(3, q + 1)


def imag_count(q: int) -> int:
    return q**3 * (q + 1) ** 2 * (q - 1) // 3


# -- bounds -----------------------------------------------------------------


def m_value(q: int) -> int:
    p, _ = prime_power(q)
    if p == 2:
        return q**4 // 2
    if p == 3:
        return q**3 + 2 * q * q - 2 * q - 1
    n = (p - 1) // 3 if (p - 1) % 3 == 0 else (p + 1) // 3
    return n * q**4 // p


def bound_pair(q: int) -> tuple[int, int]:
    p, _ = prime_power(q)
    T = imag_count(q)
    k = 1 if p == 3 else 1 + q**3
    return k + T, q**4 + q * q + 1 - m_value(q) + T


# -- tiny covers --------------------------------------------------------------


def sigma_by_combinations(n: int, identity: int, sets) -> int | float:
    """Least number of sets whose union is 0..n-1, by increasing-size search."""
    full = set(range(n))
    sets = [frozenset(int(x) for x in s) for s in sets]
    for k in range(1, len(sets) + 1):
        for combo in itertools.combinations(sets, k):
            if frozenset().union(*combo) >= full:
                return k
    return math.inf


def sigma_by_milp(n: int, sets) -> int:
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    A = np.zeros((n, len(sets)))
    for j, s in enumerate(sets):
        A[np.asarray(s), j] = 1
    res = milp(np.ones(len(sets)), constraints=LinearConstraint(A, lb=1), integrality=np.ones(len(sets)), bounds=Bounds(0, 1))
    assert res.status == 0
    return int(round(res.fun))


def lp_value_scipy(rows, n_cols) -> float:
    import numpy as np
    from scipy.optimize import linprog

    A = np.zeros((len(rows), n_cols))
    for i, r in enumerate(rows):
        A[i, list(r)] = 1
    res = linprog(np.ones(n_cols), A_ub=-A, b_ub=-np.ones(len(rows)), bounds=(0, None), method="highs")
    return float(res.fun)


def max_trifree_milp(n_vertices: int, triangles) -> int:
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    A = np.zeros((len(triangles), n_vertices))
    for i, t in enumerate(triangles):
        A[i, list(t)] = 1
    res = milp(-np.ones(n_vertices), constraints=LinearConstraint(A, ub=2), integrality=np.ones(n_vertices), bounds=Bounds(0, 1))
    assert res.status == 0
    return int(round(-res.fun))


def exact_fraction(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**6)


# -- classification audits -----------------------------------------------------


def type2_violations(t, ids, chunk: int = 4096) -> int:
    """Type2 elements whose fixed points, found by scanning every point, are not a self-polar triangle."""
    import numpy as np

    pl = t.plane
    allp = np.arange(pl.n_points)
    bad = 0
    for s in range(0, len(ids), chunk):
        part = ids[s : s + chunk]
        fixed = t.point_images(part, allp) == allp[None, :]
        cnt = fixed.sum(axis=1)
        bad += int((cnt != 3).sum())
        ok = np.flatnonzero(cnt == 3)
        if ok.size:
            pts = np.nonzero(fixed[ok])[1].reshape(-1, 3)
            c = pl.coords[pts]
            self_ = pl.vform(c, c)
            off = np.stack([pl.vform(c[:, i], c[:, j]) for i, j in ((0, 1), (0, 2), (1, 2))], axis=1)
            bad += int(((self_ == 0).any(axis=1) | (off != 0).any(axis=1)).sum())
    return bad


def type3_violations(t, ids, chunk: int = 4096) -> dict:
    """Invariant failures of the imaginary-triangle construction plus fixed points and element orders."""
    import numpy as np

    from ucov.group import imaginary_triangle_batch

    pl = t.plane
    allp = np.arange(pl.n_points)
    q = t.q
    s_ord = (q * q - q + 1) // math.gcd(3, q + 1)
    out: dict[str, int] = {"fixes_point": 0, "order": 0, "alpha_power": 0}
    G = t.big
    for s in range(0, len(ids), chunk):
        part = ids[s : s + chunk]
        out["fixes_point"] += int((t.point_images(part, allp) == allp[None, :]).any(axis=1).sum())
        out["order"] += int((s_ord % t.orders[part] != 0).sum())
        b = imaginary_triangle_batch(t, part)
        for k, v in b.violations.items():
            out[k] = out.get(k, 0) + int(v)
        out["alpha_power"] += int((G.vpow(b.alpha, q * q - q + 1) != 1).sum())
        # Z entries must lie in GF(q^2): Z is stored over GF(q^2) as uint8 indices below Q
        out["Z_range"] = out.get("Z_range", 0) + int((b.Z >= t.Q).any(axis=1).sum())
    return out
