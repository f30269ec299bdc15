"""Finite groups as dense multiplication tables, plus the small groups used as test vectors."""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from ..errors import DomainError, InvariantViolation, ResourceLimitError
from ..fields import gf_q2, make_field
from ..group import GroupTable, enumerate_su3, generate

DENSE_LIMIT = 10_000


class FiniteGroupModel:
    """Elements 0..n-1 with a dense Cayley table; ``labels`` keeps the source objects."""

    def __init__(self, table: np.ndarray, identity: int, name: str = "", labels: Sequence | None = None, check: bool = True):
        self.table = np.ascontiguousarray(table, dtype=np.int32)
        self.order = self.table.shape[0]
        self.identity = int(identity)
        self.name = name
        self.labels = labels
        inv = np.argmax(self.table == self.identity, axis=1)
        self.inverses = inv.astype(np.int64)
        if check:
            self.check_axioms(exhaustive=self.order <= 500)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroupModel({self.name or '?'}, order={self.order})"

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return self.table[a, b].astype(np.int64)

    def inverse(self, a) -> np.ndarray:
        return self.inverses[np.asarray(a, dtype=np.int64)]

    def check_axioms(self, exhaustive: bool = False, samples: int = 20000, seed: int = 0) -> None:
        n, T, e = self.order, self.table, self.identity
        if not ((T[e] == np.arange(n)).all() and (T[:, e] == np.arange(n)).all()):
            raise InvariantViolation("identity row/column is wrong")
        for row in (T, T.T):
            if not (np.sort(row, axis=1) == np.arange(n)).all():
                raise InvariantViolation("Cayley table is not a Latin square")
        if exhaustive:
            ab = T  # (a, b) -> ab
            lhs = T[ab[:, :, None], np.arange(n)[None, None, :]]
            rhs = T[np.arange(n)[:, None, None], ab[None, :, :]]
            if not (lhs == rhs).all():
                raise InvariantViolation("multiplication is not associative")
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, n, (3, samples))
            if not (T[T[a, b], c] == T[a, T[b, c]]).all():
                raise InvariantViolation("multiplication is not associative")

    @cached_property
    def orders(self) -> np.ndarray:
        n = self.order
        out = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        k = 1
        live = np.arange(n)
        while live.size:
            done = cur[live] == self.identity
            out[live[done]] = k
            live = live[~done]
            cur[live] = self.table[cur[live], live]
            k += 1
        return out

    def power(self, a: int, e: int) -> int:
        r = self.identity
        for _ in range(e % int(self.orders[a])):
            r = int(self.table[r, a])
        return r

    def cyclic(self, a: int) -> np.ndarray:
        out = [self.identity]
        x = int(a)
        while x != self.identity:
            out.append(x)
            x = int(self.table[x, a])
        return np.array(sorted(out), dtype=np.int64)

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def is_cyclic(self) -> bool:
        return bool((self.orders == self.order).any())

    @cached_property
    def center(self) -> np.ndarray:
        return np.flatnonzero((self.table == self.table.T).all(axis=1))

    @cached_property
    def commutator_subgroup(self) -> np.ndarray:
        n = self.order
        a = np.repeat(np.arange(n), n)
        b = np.tile(np.arange(n), n)
        comm = self.mul(self.mul(self.inverse(a), self.inverse(b)), self.mul(a, b))
        return generate(self, np.unique(comm))

    def is_perfect(self) -> bool:
        return len(self.commutator_subgroup) == self.order

    def is_normal(self, N) -> bool:
        N = np.asarray(N, dtype=np.int64)
        g = np.arange(self.order)
        for x in N:
            c = self.mul(self.mul(g, x), self.inverses)
            if not np.isin(c, N).all():
                return False
        return True

    def subgroup_model(self, H) -> "FiniteGroupModel":
        H = np.asarray(sorted(set(int(x) for x in H)), dtype=np.int64)
        pos = {int(h): i for i, h in enumerate(H)}
        sub = self.table[np.ix_(H, H)]
        tab = np.vectorize(pos.__getitem__)(sub)
        return FiniteGroupModel(tab, pos[self.identity], f"sub({self.name})", labels=H)


def from_elements(elements: Sequence[Hashable], op: Callable, identity: Hashable, name: str = "") -> FiniteGroupModel:
    n = len(elements)
    if n > DENSE_LIMIT:
        raise ResourceLimitError(f"dense tables stop at {DENSE_LIMIT} elements")
    idx = {e: i for i, e in enumerate(elements)}
    tab = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            tab[i, j] = idx[op(a, b)]
    return FiniteGroupModel(tab, idx[identity], name, labels=list(elements))


def closure(gens: Iterable[Hashable], op: Callable, identity: Hashable, limit: int = DENSE_LIMIT) -> list:
    seen = {identity}
    order = [identity]
    frontier = [identity]
    gens = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = op(x, g)
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise ResourceLimitError("closure exceeds the dense-table limit")
        frontier = nxt
    return order


def generated(gens, op, identity, name="") -> FiniteGroupModel:
    return from_elements(closure(gens, op, identity), op, identity, name)


# -- concrete groups -------------------------------------------------------


def _perm_mul(a, b):
    # apply a then b
    return tuple(b[i] for i in a)


def symmetric(n: int) -> FiniteGroupModel:
    els = list(itertools.permutations(range(n)))
    return from_elements(els, _perm_mul, tuple(range(n)), f"Sym({n})")


def alternating(n: int) -> FiniteGroupModel:
    def even(p):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        return inv % 2 == 0

    els = [p for p in itertools.permutations(range(n)) if even(p)]
    return from_elements(els, _perm_mul, tuple(range(n)), f"Alt({n})")


def cyclic(n: int) -> FiniteGroupModel:
    return from_elements(list(range(n)), lambda a, b: (a + b) % n, 0, f"C{n}")


def direct_product(g: FiniteGroupModel, h: FiniteGroupModel) -> FiniteGroupModel:
    n, m = g.order, h.order
    a = np.arange(n * m)
    gi, hi = a // m, a % m
    tab = g.table[gi[:, None], gi[None, :]] * m + h.table[hi[:, None], hi[None, :]]
    return FiniteGroupModel(tab, g.identity * m + h.identity, f"{g.name}x{h.name}")


def klein_four() -> FiniteGroupModel:
    c2 = cyclic(2)
    g = direct_product(c2, c2)
    g.name = "V4"
    return g


def _mat2_mul(p):
    def op(a, b):
        return (
            (a[0] * b[0] + a[1] * b[2]) % p,
            (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p,
            (a[2] * b[1] + a[3] * b[3]) % p,
        )

    return op


def special_linear2(p: int) -> FiniteGroupModel:
    """SL2(p) for a prime p."""
    if p not in (2, 3, 5, 7, 11, 13):
        raise DomainError("SL2 is provided for small primes only")
    els = [m for m in itertools.product(range(p), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % p == 1]
    return from_elements(els, _mat2_mul(p), (1, 0, 0, 1), f"SL2({p})")


def quaternion() -> FiniteGroupModel:
    # unit quaternions +-1, +-i, +-j, +-k as (sign, axis)
    basis = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k")}
    table = {
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
    }

    def op(a, b):
        if a[1] == "1":
            return (a[0] * b[0], b[1])
        if b[1] == "1":
            return (a[0] * b[0], a[1])
        s, ax = table[(a[1], b[1])]
        return (a[0] * b[0] * s, ax)

    del basis
    els = [(s, ax) for s in (1, -1) for ax in ("1", "i", "j", "k")]
    return from_elements(els, op, (1, "1"), "Q8")


def quotient(g: FiniteGroupModel, N) -> FiniteGroupModel:
    """G/N by coset representatives (least element of each coset)."""
    N = np.asarray(sorted(set(int(x) for x in N)), dtype=np.int64)
    if not g.is_normal(N):
        raise DomainError("subgroup is not normal")
    label = np.full(g.order, -1, dtype=np.int64)
    reps = []
    for x in range(g.order):
        if label[x] < 0:
            label[g.mul(x, N)] = len(reps)
            reps.append(x)
    reps = np.array(reps)
    tab = label[g.table[np.ix_(reps, reps)]]
    m = FiniteGroupModel(tab, int(label[g.identity]), f"{g.name}/N", labels=reps)
    m.projection = label
    return m


def u3_model(q: int, table: GroupTable | None = None) -> FiniteGroupModel:
    t = table or GroupTable.build(q)
    if t.order > DENSE_LIMIT:
        raise ResourceLimitError("use the GroupTable directly for large U3(q)")
    n = t.order
    a = np.repeat(np.arange(n), n)
    b = np.tile(np.arange(n), n)
    tab = t.mul(a, b).reshape(n, n)
    return FiniteGroupModel(tab, t.identity, f"U3({q})", check=n <= 500)


def su3_model(q: int) -> FiniteGroupModel:
    su = enumerate_su3(q)
    F = gf_q2(q)
    Q = F.order
    from ..kernels import encode_keys, mat_mul

    keys = encode_keys(su, Q)
    order = np.argsort(keys)
    su, keys = su[order], keys[order]
    n = len(su)
    if n > DENSE_LIMIT:
        raise ResourceLimitError("SU3(q) is too large for a dense table")
    add, mul = F.add_table.astype(np.uint8), F.mul_table.astype(np.uint8)
    a = np.repeat(np.arange(n), n)
    b = np.tile(np.arange(n), n)
    prod = mat_mul(su[a], su[b], add, mul)
    tab = np.searchsorted(keys, encode_keys(prod, Q)).reshape(n, n)
    ident = int(np.searchsorted(keys, encode_keys(np.array([[1, 0, 0, 0, 1, 0, 0, 0, 1]]), Q))[0])
    return FiniteGroupModel(tab, ident, f"SU3({q})")


SMALL_GROUPS = {
    "sym3": lambda: symmetric(3),
    "q8": quaternion,
    "sl2_3": lambda: special_linear2(3),
    "sl2_5": lambda: special_linear2(5),
    "a4": lambda: alternating(4),
    "a5": lambda: alternating(5),
    "c6": lambda: cyclic(6),
    "v4": klein_four,
    "u3_2": lambda: u3_model(2),
    "su3_2": lambda: su3_model(2),
}


def small_group(name: str) -> FiniteGroupModel:
    try:
        return SMALL_GROUPS[name]()
    except KeyError:
        raise DomainError(f"unknown group {name!r}; known: {sorted(SMALL_GROUPS)}") from None
