"""Maximal-subgroup lists: the brute-force lattice for small groups and a certified harvest for U3(q)."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, IncompleteCertificate, ResourceLimitError
from ..group import (
    AbsPointStab,
    GroupTable,
    ImagTriangleStab,
    NonAbsPointStab,
    TriangleStab,
    generate,
    imag_vertices_of,
    maximal_class_items,
    max_proper_order,
    stabilizer_members,
)

BRUTE_LIMIT = 2000


@dataclass
class SubgroupClass:
    label: str
    order: int
    members: list  # sorted id arrays, one per conjugate
    maximal_certified: bool = False

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class MaxSubgroupList:
    group_order: int
    classes: list  # SubgroupClass
    certificate: dict = field(default_factory=dict)
    conjugacy_classes: bool = False  # each SubgroupClass is a single conjugacy class

    @property
    def complete(self) -> bool:
        return bool(self.certificate.get("complete"))

    @property
    def sets(self) -> list:
        return [m for c in self.classes for m in c.members]

    @property
    def labels(self) -> list:
        return [c.label for c in self.classes for _ in c.members]

    def __len__(self) -> int:
        return sum(c.size for c in self.classes)

    def inventory(self) -> dict:
        return {c.label: {"order": c.order, "count": c.size} for c in self.classes}

    def require_complete(self) -> None:
        if not self.complete:
            raise IncompleteCertificate(f"maximal-subgroup list is incomplete: {self.certificate}")


# ---------------------------------------------------------------------------
# generic helpers over any model exposing order / identity / mul / inverse


def _as_sorted(a) -> np.ndarray:
    return np.unique(np.asarray(a, dtype=np.int64))


def conjugate_set(g, H: np.ndarray, x: int) -> np.ndarray:
    xi = g.inverse(np.array([x]))[0]
    return np.sort(g.mul(g.mul(np.full(len(H), xi), H), np.full(len(H), x)))


def conjugacy_class(g, H: np.ndarray, gens, limit: int | None = None) -> list:
    """All conjugates of H by closing under conjugation by gens (a generating set of G)."""
    H = _as_sorted(H)
    seen = {H.tobytes(): H}
    frontier = [H]
    while frontier:
        nxt = []
        for K in frontier:
            for s in gens:
                C = conjugate_set(g, K, int(s))
                k = C.tobytes()
                if k not in seen:
                    seen[k] = C
                    nxt.append(C)
                    if limit is not None and len(seen) > limit:
                        raise ResourceLimitError("conjugacy class exceeds limit")
        frontier = nxt
    return [seen[k] for k in sorted(seen)]


def group_generators(g, rng: np.random.Generator, tries: int = 200) -> list[int]:
    n = g.order
    for _ in range(tries):
        a, b = (int(x) for x in rng.integers(0, n, 2))
        full = generate(g, [a, b])
        if len(full) == n:
            return [a, b]
    raise ResourceLimitError("no generating pair found")


class CosetAction:
    """Right-coset action of G on H\\G with canonical coset labels min(H y)."""

    def __init__(self, g, H: np.ndarray, gens: list[int], chunk: int = 1 << 20):
        self.g, self.H, self.gens = g, _as_sorted(H), [int(s) for s in gens]
        self.index = g.order // len(self.H)
        self._chunk = chunk
        key_of: dict[int, int] = {}
        reps = [g.identity]
        key_of[int(self.H[0])] = 0
        perms = [[] for _ in self.gens]
        i = 0
        while i < len(reps):
            ys = g.mul(np.full(len(self.gens), reps[i]), np.array(self.gens))
            labs = self.labels(ys)
            for s, (y, lab) in enumerate(zip(ys, labs)):
                lab = int(lab)
                if lab not in key_of:
                    key_of[lab] = len(reps)
                    reps.append(int(y))
                perms[s].append(key_of[lab])
            i += 1
        if len(reps) != self.index:
            raise DomainError("H is not a subgroup (coset count mismatch)")
        self.reps = np.array(reps, dtype=np.int64)
        self.key_of = key_of
        self.perms = [np.array(p, dtype=np.int64) for p in perms]

    def labels(self, ys: np.ndarray) -> np.ndarray:
        H = self.H
        out = np.empty(len(ys), dtype=np.int64)
        step = max(1, self._chunk // len(H))
        for s in range(0, len(ys), step):
            blk = ys[s : s + step]
            prod = self.g.mul(np.tile(H, len(blk)), np.repeat(blk, len(H)))
            out[s : s + step] = prod.reshape(len(blk), len(H)).min(axis=1)
        return out

    def coset_ids(self, ys) -> np.ndarray:
        return np.array([self.key_of[int(k)] for k in self.labels(np.asarray(ys, dtype=np.int64))])

    def suborbit_reps(self, h_gens) -> list[int]:
        """One coset per orbit of H (the point stabilizer of coset 0)."""
        n = self.index
        parent = np.arange(n)

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for h in h_gens:
            img = self.coset_ids(self.g.mul(self.reps, np.full(n, int(h))))
            for a, b in enumerate(img):
                ra, rb = find(a), find(int(b))
                if ra != rb:
                    parent[ra] = rb
        roots = {}
        for x in range(1, n):
            r = find(x)
            if r != find(0) and r not in roots:
                roots[r] = x
        return sorted(roots.values())

    def minimal_block(self, j: int) -> np.ndarray:
        """Atkinson: the smallest block containing cosets 0 and j, as a coset-id array."""
        n = self.index
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        perms = [p.tolist() for p in self.perms]
        queue = [(0, j)]
        parent[find(j)] = find(0)
        while queue:
            a, b = queue.pop()
            for p in perms:
                ra, rb = find(p[a]), find(p[b])
                if ra != rb:
                    parent[rb] = ra
                    queue.append((p[a], p[b]))
        r0 = find(0)
        return np.array([x for x in range(n) if find(x) == r0], dtype=np.int64)

    def block_subgroup(self, block: np.ndarray) -> np.ndarray:
        H = self.H
        reps = self.reps[block]
        return np.unique(self.g.mul(np.tile(H, len(reps)), np.repeat(reps, len(H))))


def generators_small(g, H: np.ndarray) -> list[int]:
    gens: list[int] = []
    K = np.array([g.identity])
    Hs = set(H.tolist())
    while len(K) < len(H):
        rest = np.setdiff1d(H, K)
        gens.append(int(rest[len(rest) // 2]))
        K = generate(g, gens)
        if not Hs.issuperset(K.tolist()):
            raise DomainError("not a subgroup")
    return gens


def maximality_step(g, H: np.ndarray, gens: list[int]) -> np.ndarray | None:
    """None if H is maximal (primitive coset action); else a proper overgroup."""
    H = _as_sorted(H)
    if len(H) == g.order:
        raise DomainError("H is the whole group")
    act = CosetAction(g, H, gens)
    if act.index == 1:
        return None
    for j in act.suborbit_reps(generators_small(g, H)):
        blk = act.minimal_block(j)
        if len(blk) < act.index:
            return act.block_subgroup(blk)
    return None


def grow_to_maximal(g, H: np.ndarray, gens: list[int]) -> np.ndarray:
    H = _as_sorted(H)
    while True:
        K = maximality_step(g, H, gens)
        if K is None:
            return H
        H = K


# ---------------------------------------------------------------------------
# brute force


def _pack(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def all_subgroups(g) -> list[np.ndarray]:
    """Every subgroup, by closing cyclic subgroups under joins."""
    if g.order > BRUTE_LIMIT:
        raise ResourceLimitError(f"brute force stops at |G| = {BRUTE_LIMIT}")
    n = g.order
    cyc = {}
    for x in range(n):
        C = g.cyclic(x) if hasattr(g, "cyclic") else generate(g, [x])
        cyc.setdefault(C.tobytes(), (x, C))
    cyc_list = list(cyc.values())
    cyc_masks = []
    for _, C in cyc_list:
        m = np.zeros(n, dtype=bool)
        m[C] = True
        cyc_masks.append(_pack(m))
    found: dict[int, tuple[list[int], np.ndarray]] = {}
    queue = []
    for (x, C), bits in zip(cyc_list, cyc_masks):
        if bits not in found:
            found[bits] = ([x], C)
            queue.append(bits)
    while queue:
        hb = queue.pop()
        hg, H = found[hb]
        for (x, C), cb in zip(cyc_list, cyc_masks):
            if cb & hb == cb:
                continue
            K = generate(g, hg + [x])
            m = np.zeros(n, dtype=bool)
            m[K] = True
            kb = _pack(m)
            if kb not in found:
                found[kb] = (hg + [x], K)
                queue.append(kb)
    return sorted((v[1] for v in found.values()), key=lambda s: (len(s), s.tolist()))


def all_subgroups_brute(g) -> MaxSubgroupList:
    subs = all_subgroups(g)
    n = g.order
    proper = [s for s in subs if len(s) < n]
    bits = []
    for s in proper:
        m = np.zeros(n, dtype=bool)
        m[s] = True
        bits.append(_pack(m))
    maximal = []
    for i, s in enumerate(proper):
        if not any(len(proper[j]) > len(s) and bits[i] & bits[j] == bits[i] for j in range(len(proper))):
            maximal.append(s)
    by_order: dict[int, list] = {}
    for s in maximal:
        by_order.setdefault(len(s), []).append(s)
    classes = [SubgroupClass(f"order{o}", o, ms, True) for o, ms in sorted(by_order.items(), reverse=True)]
    covered = np.zeros(n, dtype=bool)
    for s in maximal:
        covered[s] = True
    cert = {
        "method": "exhaustive",
        "subgroups": len(subs),
        "covered": int(covered.sum()),
        "all_covered": bool(covered.all()),
        "complete": True,
    }
    return MaxSubgroupList(n, classes, cert)


# ---------------------------------------------------------------------------
# harvest for U3(q)


def conic_subgroup(t: GroupTable) -> np.ndarray:
    """Elements with every entry in GF(q): the orthogonal group of the unit form."""
    conj = np.asarray(t.plane.conj)
    sub = conj == np.arange(len(conj))
    return np.flatnonzero(sub[t.mats].all(axis=1))


def _geometric_seeds(t: GroupTable) -> list[tuple[str, np.ndarray]]:
    pl = t.plane
    seeds = [
        ("abs_point", stabilizer_members(AbsPointStab(pl.point(int(pl.absolute_ids[0]))), t)),
        ("nonabs_point", stabilizer_members(NonAbsPointStab(pl.point(int(pl.nonabsolute_ids[0]))), t)),
    ]
    tris = pl.self_polar_triangles
    if len(tris):
        seeds.append(("triangle", stabilizer_members(TriangleStab(pl.triangle(tris[0])), t)))
    t3 = np.flatnonzero(t.etype == 3)
    if t3.size:
        seeds.append(("imag_triangle", stabilizer_members(ImagTriangleStab(imag_vertices_of(t, int(t3[0]))), t)))
    else:
        seeds.append(("imag_triangle", None))
    if t.q % 2:
        seeds.append(("conic", conic_subgroup(t)))
    return seeds


def _label_for(order: int, seed_label: str | None, items) -> str:
    if seed_label is not None:
        for it in items:
            if it.label == seed_label and it.order == order:
                return seed_label
    for it in items:
        if it.order == order and it.present:
            return it.label
    return f"order{order}"


def harvest_maximals_u3(
    q, t: GroupTable, seed: int = 0, budget: int = 4000, saturation: int = 300, log=None
) -> MaxSubgroupList:
    """Geometric stabilizers, then two-generator sampling; every kept class is certified maximal."""
    if t.q != q:
        raise DomainError("table and q disagree")
    if q > 5:
        raise ResourceLimitError("harvest is limited to q <= 5")
    t0 = time.time()
    rng = np.random.default_rng(seed)
    items = maximal_class_items(q)
    limit = max_proper_order(q)
    gens = group_generators(t, rng)
    n = t.order
    covered = np.zeros(n, dtype=bool)
    classes: list[SubgroupClass] = []
    known: set[bytes] = set()
    resolved: dict[str, str] = {}
    witnesses: dict[int, int] = {}

    def note(msg):
        if log:
            log(f"[{time.time() - t0:7.1f}s] {msg}")

    def absorb(H: np.ndarray, label_hint: str | None) -> bool:
        M = grow_to_maximal(t, H, gens)
        if M.tobytes() in known:
            return False
        members = conjugacy_class(t, M, gens)
        lab = _label_for(len(M), label_hint if len(M) == len(H) else None, items)
        if any(c.label == lab for c in classes):
            lab = f"{lab}#{sum(c.label.split('#')[0] == lab for c in classes) + 1}"
        classes.append(SubgroupClass(lab, len(M), members, True))
        for m in members:
            known.add(m.tobytes())
            covered[m] = True
        note(f"class {lab}: order {len(M)} x {len(members)}")
        return True

    for lab, H in _geometric_seeds(t):
        if H is None:
            resolved[lab] = "no Type3 elements"
            continue
        M = grow_to_maximal(t, H, gens)
        resolved[lab] = "maximal" if len(M) == len(H) else f"inside order {len(M)}"
        absorb(M, lab if len(M) == len(H) else None)
    samples = 0
    quiet = 0
    while samples < budget:
        samples += 1
        unc = np.flatnonzero(~covered)
        unc = unc[unc != t.identity]
        x = int(rng.choice(unc)) if unc.size and rng.random() < 0.5 else int(rng.integers(0, n))
        y = int(rng.integers(0, n))
        H = generate(t, [x, y], limit=limit)
        if H is None or len(H) == n:
            quiet += 1
        else:
            witnesses[len(H)] = witnesses.get(len(H), 0) + 1
            if H.tobytes() in known or _inside_known(H, classes):
                quiet += 1
            elif absorb(H, None):
                quiet = 0
            else:
                quiet += 1
        if covered[np.arange(n) != t.identity].all() and quiet >= saturation:
            break
    present = [it for it in items if it.present]
    found_orders = {c.order for c in classes}
    unmatched = [c.label for c in classes if not any(it.order == c.order for it in present)]
    geo_unresolved = [it.label for it in present if it.geometric and it.label not in resolved]
    inventory = {}
    for it in present:
        if it.label in resolved:
            inventory[it.label] = resolved[it.label]
        elif it.order in found_orders:
            inventory[it.label] = "maximal"
        elif it.order in witnesses:
            inventory[it.label] = "order seen, not maximal"
        else:
            inventory[it.label] = "not found"
    all_cov = bool(covered[np.arange(n) != t.identity].all())
    cert = {
        "method": "harvest",
        "q": q,
        "samples": samples,
        "saturation_run": quiet,
        "saturated": quiet >= saturation,
        "all_covered": all_cov,
        "classes_match_inventory": not unmatched,
        "geometric_resolved": not geo_unresolved,
        "inventory": inventory,
        "seconds": round(time.time() - t0, 2),
    }
    cert["complete"] = all_cov and not unmatched and not geo_unresolved and quiet >= saturation
    return MaxSubgroupList(n, classes, cert, conjugacy_classes=True)


def _inside_known(H: np.ndarray, classes) -> bool:
    # cheap screen: H lies inside a harvested member; contained subgroups add no new class
    for c in classes:
        if c.order % len(H):
            continue
        for m in c.members:
            if len(np.intersect1d(m, H, assume_unique=True)) == len(H):
                return True
    return False
