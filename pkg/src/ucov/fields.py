"""Table-driven finite fields GF(p^k) and the polynomial helpers built on them.

Elements are dense integers: the coefficient sequence (c0, ..., c_{k-1}) of
the residue class modulo the field's modulus, read base p little-endian.
Index 0 is zero and index 1 is one in every context.

Fields up to ``TABLE_LIMIT`` elements get exp/log/Zech tables; larger ones
(up to ``MAX_ORDER``) fall back to plain polynomial arithmetic, scalar only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, ResourceLimitError

TABLE_LIMIT = 1 << 20
MAX_ORDER = 11**6
SMALL_TABLE_LIMIT = 4096


# ---------------------------------------------------------------------------
# integers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> dict[int, int]:
    """Trial-division factorisation of a positive integer."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def largest_prime_factor(n: int) -> int:
    return max(prime_factors(n))


@dataclass(frozen=True)
class PrimePower:
    p: int
    a: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")
        if self.a < 1:
            raise DomainError("exponent must be positive")

    @property
    def q(self) -> int:
        return self.p**self.a

    @classmethod
    def from_int(cls, q: int) -> "PrimePower":
        if q < 2:
            raise DomainError(f"{q} is not a prime power")
        fac = prime_factors(q)
        if len(fac) != 1:
            raise DomainError(f"{q} is not a prime power")
        ((p, a),) = fac.items()
        return cls(p, a)

    def __int__(self) -> int:
        return self.q


def as_prime_power(q) -> PrimePower:
    return q if isinstance(q, PrimePower) else PrimePower.from_int(int(q))


def is_prime_power(n: int) -> bool:
    return n >= 2 and len(prime_factors(n)) == 1


def prime_powers(lo: int, hi: int) -> list[int]:
    return [n for n in range(max(lo, 2), hi + 1) if is_prime_power(n)]


def lemma7_check(q) -> tuple[int, bool]:
    """Largest prime r dividing q^2-q+1 and whether r >= 5 and r is coprime to q^3(q-1)(q+1)^2."""
    q = as_prime_power(q).q
    if q <= 2:
        raise DomainError("needs q > 2")
    r = largest_prime_factor(q * q - q + 1)
    ok = r >= 5 and math.gcd(r, q**3 * (q - 1) * (q + 1) ** 2) == 1
    return r, ok


# ---------------------------------------------------------------------------
# GF(p)[x], coefficient lists constant-first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = list(a)
    df = len(f) - 1
    inv_lc = pow(f[-1], p - 2, p)
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i] * inv_lc % p
        if c:
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    return _trim(a[:df] if len(a) > df else a)


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _ppowmod(base: list[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def is_irreducible_gfp(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over GF(p)."""
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    pw = x
    powers = [x]
    for _ in range(k):
        pw = _ppowmod(pw, p, f, p)
        powers.append(pw)
    if _psub(powers[k], x, p):
        return False
    for r in prime_factors(k):
        g = _pgcd(list(f), _psub(powers[k // r], x, p), p)
        if len(g) > 1:
            return False
    return True


def canonical_modulus(p: int, k: int) -> tuple[int, ...]:
    """Least monic irreducible of degree k, ordering by sum c_i p^i over the lower coefficients."""
    for t in range(p**k):
        coeffs = [(t // p**i) % p for i in range(k)] + [1]
        if is_irreducible_gfp(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# field contexts


class FieldCtx:
    """Arithmetic context for GF(p^k).

    Scalar methods take and return Python ints; the ``v*`` methods work
    elementwise on integer numpy arrays (tabled contexts only).
    """

    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.order = p**k
        self.modulus = canonical_modulus(p, k)
        self._powers = [p**i for i in range(k)]
        self.tabled = self.order <= TABLE_LIMIT
        self.gen = self._find_generator()
        self._embeddings: dict[tuple[int, int], np.ndarray] = {}
        if self.tabled:
            self._build_tables()

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})"

    # -- coefficient-level helpers -------------------------------------
    def digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.k):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def from_digits(self, ds: Iterable[int]) -> int:
        return sum((d % self.p) * w for d, w in zip(ds, self._powers))

    def _poly_mul(self, a: int, b: int) -> int:
        prod = _pmul(_trim(self.digits(a)), _trim(self.digits(b)), self.p)
        return self.from_digits(_pmod(prod, self.modulus, self.p))

    def _poly_pow(self, a: int, e: int) -> int:
        return self.from_digits(_ppowmod(_trim(self.digits(a)), e, self.modulus, self.p))

    def _find_generator(self) -> int:
        n = self.order - 1
        if n == 1:
            return 1
        rs = list(prime_factors(n))
        for g in range(2, self.order):
            if all(self._poly_pow(g, n // r) != 1 for r in rs):
                return g
        raise AssertionError("no generator")  # pragma: no cover

    def _mult_matrix(self, c: int) -> np.ndarray:
        """Matrix over GF(p) of x -> c*x acting on digit vectors."""
        k = self.k
        m = np.zeros((k, k), dtype=np.int64)
        for i in range(k):
            m[:, i] = self.digits(self._poly_mul(c, self._powers[i]))
        return m

    def _build_tables(self) -> None:
        p, k, n = self.p, self.k, self.order
        powers = np.array(self._powers, dtype=np.int64)
        # exp table by repeated doubling; each block is the previous one times g^len
        block = np.array([self.digits(1)], dtype=np.int64)
        current_last = 1
        while block.shape[0] < n - 1:
            c = self._poly_mul(current_last, self.gen)  # g^len(block)
            m = self._mult_matrix(c)
            block = np.vstack([block, (block @ m.T) % p])
            current_last = int((block[-1] @ powers))
        exp = (block[: n - 1] @ powers).astype(np.int64)
        log = np.full(n, -1, dtype=np.int64)
        log[exp] = np.arange(n - 1, dtype=np.int64)
        if (log[1:] < 0).any():
            raise AssertionError("generator does not span the field")
        self.exp = np.concatenate([exp, exp])
        self.log = log
        idx = np.arange(n, dtype=np.int64)
        digs = (idx[:, None] // powers[None, :]) % p
        self.neg_table = (((p - digs) % p) @ powers).astype(np.int64)
        one_plus = exp - exp % p + (exp % p + 1) % p
        self.zech = log[one_plus]
        inv = np.zeros(n, dtype=np.int64)
        inv[1:] = self.exp[(n - 1 - log[1:]) % (n - 1)]
        self.inv_table = inv
        self._exp_l = self.exp.tolist()
        self._log_l = log.tolist()
        self._zech_l = self.zech.tolist()
        self._neg_l = self.neg_table.tolist()
        self._inv_l = inv.tolist()
        if n <= SMALL_TABLE_LIMIT:
            a = idx[:, None]
            b = idx[None, :]
            self.add_table = self._vadd_zech(np.broadcast_to(a, (n, n)), np.broadcast_to(b, (n, n)))
            self.mul_table = self._vmul_log(np.broadcast_to(a, (n, n)), np.broadcast_to(b, (n, n)))
        else:
            self.add_table = None
            self.mul_table = None

    # -- scalar arithmetic --------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if not self.tabled:
            return self.from_digits(x + y for x, y in zip(self.digits(a), self.digits(b)))
        if a == 0:
            return b
        if b == 0:
            return a
        la = self._log_l[a]
        d = self._log_l[b] - la
        if d < 0:
            d += self.order - 1
        z = self._zech_l[d]
        return 0 if z < 0 else self._exp_l[la + z]

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.tabled:
            return self._neg_l[a]
        return self.from_digits(-d for d in self.digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.tabled:
            return self._exp_l[self._log_l[a] + self._log_l[b]]
        return self._poly_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.tabled:
            return self._inv_l[a]
        return self._poly_pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 0
        if self.tabled:
            return self._exp_l[(self._log_l[a] * e) % (self.order - 1)]
        if e < 0:
            a, e = self.inv(a), -e
        return self._poly_pow(a, e)

    def element_order(self, a: int) -> int:
        if a == 0:
            raise DomainError("zero has no multiplicative order")
        n = self.order - 1
        if self.tabled:
            return n // math.gcd(n, self._log_l[a])
        m = n
        for r in prime_factors(n):
            while m % r == 0 and self._poly_pow(a, m // r) == 1:
                m //= r
        return m

    def frobenius(self, a: int, times: int = 1) -> int:
        """a -> a^(p^times)."""
        return self.pow(a, self.p**times)

    def in_subfield(self, a: int, d: int) -> bool:
        if self.k % d:
            raise DomainError(f"GF({self.p}^{d}) is not a subfield of {self}")
        return self.pow(a, self.p**d) == a

    def sum(self, xs: Iterable[int]) -> int:
        acc = 0
        for x in xs:
            acc = self.add(acc, x)
        return acc

    # half-degree conjugation, for contexts of even degree
    @property
    def half_q(self) -> int:
        if self.k % 2:
            raise DomainError(f"{self} has odd degree; no conjugation")
        return self.p ** (self.k // 2)

    def conj(self, a: int) -> int:
        return self.pow(a, self.half_q)

    # -- vectorised arithmetic -----------------------------------------
    def _require_tables(self):
        if not self.tabled:
            raise ResourceLimitError(f"{self} is too large for vectorised arithmetic")

    def _vadd_zech(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        n1 = self.order - 1
        la = self.log[a]
        d = (self.log[b] - la) % n1
        z = self.zech[d]
        s = self.exp[np.where(z < 0, 0, la + z)]
        s = np.where(z < 0, 0, s)
        s = np.where(a == 0, b, s)
        return np.where(b == 0, a, s)

    def _vmul_log(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vadd(self, a, b):
        self._require_tables()
        if self.add_table is not None:
            return self.add_table[a, b]
        return self._vadd_zech(a, b)

    def vmul(self, a, b):
        self._require_tables()
        if self.mul_table is not None:
            return self.mul_table[a, b]
        return self._vmul_log(a, b)

    def vneg(self, a):
        self._require_tables()
        return self.neg_table[a]

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vinv(self, a):
        self._require_tables()
        a = np.asarray(a, dtype=np.int64)
        if (a == 0).any():
            raise ZeroDivisionError("inverse of zero")
        return self.inv_table[a]

    def vpow(self, a, e: int):
        self._require_tables()
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        out = self.exp[(self.log[a] * e) % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def vconj(self, a):
        return self.vpow(a, self.half_q)

    def subfield_mask(self, d: int) -> np.ndarray:
        """Boolean mask over all elements marking GF(p^d)."""
        self._require_tables()
        allx = np.arange(self.order)
        return self.vpow(allx, self.p**d) == allx

    def elements_of_order_dividing(self, m: int) -> np.ndarray:
        self._require_tables()
        n1 = self.order - 1
        step = n1 // math.gcd(n1, m)
        return np.sort(self.exp[np.arange(0, n1, step)])

    # -- embeddings ------------------------------------------------------
    def embedding_from(self, small: "FieldCtx") -> np.ndarray:
        """Index map GF(p^j) -> this field sending the class of x to the least root of small's modulus."""
        if small.p != self.p or self.k % small.k:
            raise DomainError(f"{small} does not embed in {self}")
        key = (small.p, small.k)
        if key not in self._embeddings:
            self._embeddings[key] = self._compute_embedding(small)
        return self._embeddings[key]

    def _compute_embedding(self, small: "FieldCtx") -> np.ndarray:
        f = Poly(self, small.modulus)
        roots = f.roots()
        if not roots:
            raise AssertionError("modulus has no root in the extension")  # pragma: no cover
        r = min(roots)
        rpow = [self.pow(r, i) for i in range(small.k)]
        out = np.zeros(small.order, dtype=np.int64)
        for idx in range(small.order):
            acc = 0
            for d, w in zip(small.digits(idx), rpow):
                if d:
                    acc = self.add(acc, self.mul(d, w))
            out[idx] = acc
        return out


@lru_cache(maxsize=None)
def make_field(p: int, k: int) -> FieldCtx:
    """The canonical context for GF(p^k); cached so contexts compare by identity."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if not 1 <= k <= 12:
        raise DomainError(f"degree {k} outside 1..12")
    if p**k > MAX_ORDER:
        raise ResourceLimitError(f"GF({p}^{k}) exceeds the {MAX_ORDER}-element budget")
    return FieldCtx(p, k)


def gf_q2(q) -> FieldCtx:
    pp = as_prime_power(q)
    return make_field(pp.p, 2 * pp.a)


def gf_q6(q) -> FieldCtx:
    pp = as_prime_power(q)
    return make_field(pp.p, 6 * pp.a)


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldCtx
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.ctx.order:
            raise DomainError(f"index {self.index} out of range for {self.ctx}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx:
                raise DomainError("field context mismatch")
            return other.index
        if isinstance(other, int):
            # integers are read in the prime field
            return other % self.ctx.p
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add(self.index, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self.index, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self._coerce(other), self.index))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.index, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.div(self.index, self._coerce(other)))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.index))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow(self.index, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.index))

    def __bool__(self) -> bool:
        return self.index != 0

    def __repr__(self) -> str:
        return f"{self.ctx}[{self.index}]"


def conjugate(x: FieldElement, q=None) -> FieldElement:
    """x -> x^q in GF(q^2)."""
    ctx = x.ctx
    if q is None:
        qq = ctx.half_q
    else:
        pp = as_prime_power(q)
        if pp.p != ctx.p or ctx.k != 2 * pp.a:
            raise DomainError(f"{ctx} is not GF({pp.q}^2)")
        qq = pp.q
    return FieldElement(ctx, ctx.pow(x.index, qq))


def norm(x: FieldElement) -> FieldElement:
    """x -> x^(q+1), landing in the GF(q) subfield."""
    ctx = x.ctx
    return FieldElement(ctx, ctx.pow(x.index, ctx.half_q + 1))


def embed(x: FieldElement, from_ctx: FieldCtx, into: FieldCtx) -> FieldElement:
    if x.ctx is not from_ctx:
        raise DomainError("element does not live in the source context")
    return FieldElement(into, int(into.embedding_from(from_ctx)[x.index]))


# ---------------------------------------------------------------------------
# polynomials over a field context


class Poly:
    """Polynomial with coefficients in a FieldCtx, stored constant term first."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable[int]):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    @classmethod
    def from_roots(cls, ctx: FieldCtx, roots: Iterable[int]) -> "Poly":
        g = cls(ctx, [1])
        for r in roots:
            g = g * cls(ctx, [ctx.neg(r), 1])
        return g

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and other.ctx is self.ctx and other.coeffs == self.coeffs

    def __hash__(self) -> int:
        return hash((id(self.ctx), self.coeffs))

    def __repr__(self) -> str:
        return f"Poly({self.ctx}, {list(self.coeffs)})"

    def _check(self, other: "Poly") -> None:
        if other.ctx is not self.ctx:
            raise DomainError("polynomial context mismatch")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        f = self.ctx
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly(f, [f.add(x, y) for x, y in zip(a, b)])

    def __neg__(self) -> "Poly":
        return Poly(self.ctx, [self.ctx.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        f = self.ctx
        if self.is_zero() or other.is_zero():
            return Poly(f, [])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    if y:
                        out[i + j] = f.add(out[i + j], f.mul(x, y))
        return Poly(f, out)

    def divmod(self, d: "Poly") -> tuple["Poly", "Poly"]:
        self._check(d)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.ctx
        r = list(self.coeffs)
        dd = d.degree
        inv_lc = f.inv(d.coeffs[-1])
        qc = [0] * max(len(r) - dd, 0)
        for i in range(len(r) - 1, dd - 1, -1):
            c = f.mul(r[i], inv_lc)
            if c:
                qc[i - dd] = c
                for j, dc in enumerate(d.coeffs):
                    r[i - dd + j] = f.sub(r[i - dd + j], f.mul(c, dc))
        return Poly(f, qc), Poly(f, r[:dd])

    def __call__(self, x: int) -> int:
        f = self.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def evaluate_all(self) -> np.ndarray:
        """Values at every field element, vectorised (tabled contexts)."""
        f = self.ctx
        xs = np.arange(f.order, dtype=np.int64)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = f.vadd(f.vmul(acc, xs), c)
        return acc

    def roots(self) -> list[int]:
        if self.is_zero():
            raise DomainError("the zero polynomial has every element as a root")
        if self.ctx.tabled:
            return [int(r) for r in np.flatnonzero(self.evaluate_all() == 0)]
        return [x for x in range(self.ctx.order) if self(x) == 0]

    def monic(self) -> "Poly":
        if self.is_zero():
            raise DomainError("zero polynomial")
        inv = self.ctx.inv(self.coeffs[-1])
        return Poly(self.ctx, [self.ctx.mul(c, inv) for c in self.coeffs])


def find_roots(g: Poly) -> dict[int, int]:
    """Roots of g found by exhaustive evaluation, with multiplicities."""
    out: dict[int, int] = {}
    for r in g.roots():
        lin = Poly(g.ctx, [g.ctx.neg(r), 1])
        h, m = g, 0
        while True:
            quo, rem = h.divmod(lin)
            if not rem.is_zero():
                break
            h, m = quo, m + 1
        out[r] = m
    return out


def poly_tilde(g: Poly, q=None) -> Poly:
    """The conjugate-reciprocal companion of a monic g over GF(q^2) with g(0) != 0."""
    f = g.ctx
    if not g.is_monic():
        raise DomainError("poly_tilde needs a monic polynomial")
    a0 = g.coeffs[0] if g.coeffs else 0
    if a0 == 0:
        raise DomainError("poly_tilde needs a nonzero constant term")
    if q is None:
        qq = f.half_q
    else:
        qq = as_prime_power(q).q
        if f.order != qq * qq:
            raise DomainError(f"{f} is not GF({qq}^2)")
    n = g.degree
    inv0 = f.inv(f.pow(a0, qq))
    out = [0] * (n + 1)
    for i, a in enumerate(g.coeffs):
        out[n - i] = f.mul(f.pow(a, qq), inv0)
    return Poly(f, out)


def monic_polys(ctx: FieldCtx, degree: int) -> Iterator[Poly]:
    for t in range(ctx.order**degree):
        cs = []
        for _ in range(degree):
            t, r = divmod(t, ctx.order)
            cs.append(r)
        yield Poly(ctx, cs + [1])


def monic_irreducibles(ctx: FieldCtx, degree: int) -> list[Poly]:
    """Monic irreducibles of degree 2 or 3 (irreducible iff rootless)."""
    if degree not in (2, 3):
        raise DomainError("only degrees 2 and 3 are supported")
    n = ctx.order
    xs = np.arange(n, dtype=np.int64)
    # evaluate all monic polynomials at all points at once: columns are coefficient tuples
    total = n**degree
    t = np.arange(total, dtype=np.int64)
    coeffs = [(t // n**i) % n for i in range(degree)]
    # Horner: acc = x^degree + sum c_i x^i, evaluated for every (poly, x)
    rootless = np.ones(total, dtype=bool)
    xpow = [ctx.vpow(xs, i) for i in range(degree + 1)]
    for xi in range(n):
        val = np.full(total, int(xpow[degree][xi]), dtype=np.int64)
        for i in range(degree):
            val = ctx.vadd(val, ctx.vmul(coeffs[i], int(xpow[i][xi])))
        rootless &= val != 0
    return [Poly(ctx, [int(c[j]) for c in coeffs] + [1]) for j in np.flatnonzero(rootless)]
