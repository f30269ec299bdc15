"""Exact covering numbers by branch and bound over a reduced cover instance."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import DomainError, IncompleteCertificate
from .instance import CoverInstance
from .lp import certified_bound, lp_lower_bound

INFINITY = math.inf


@dataclass
class SigmaResult:
    sigma: int | None  # None when the search stopped with a gap
    lower: int
    upper: int
    cover: list  # reduced column ids
    root_lp: Fraction
    nodes: int
    certificate: str  # "LP-tight" | "closed-tree" | "interval"
    seconds: float = 0.0
    optimal_covers: list | None = None
    enumeration_capped: bool = False

    @property
    def exact(self) -> bool:
        return self.sigma is not None

    def as_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "lower": self.lower,
            "upper": self.upper,
            "cover": list(self.cover),
            "root_lp": str(self.root_lp),
            "nodes": self.nodes,
            "certificate": self.certificate,
            "seconds": round(self.seconds, 3),
            "n_optimal_covers": None if self.optimal_covers is None else len(self.optimal_covers),
            "enumeration_capped": self.enumeration_capped,
        }


class _Search:
    """Bitset DFS.  Items and columns are ints; ``col_bits[j]`` has bit i set when column j covers item i."""

    def __init__(self, inst: CoverInstance, node_limit: int, use_lp: bool, time_limit: float | None):
        self.inst = inst
        self.rows = inst.rows
        self.n_items = inst.n_items
        self.col_bits = [0] * inst.n_cols
        for i, r in enumerate(inst.rows):
            b = 1 << i
            for j in r:
                self.col_bits[j] |= b
        self.node_limit = node_limit
        self.use_lp = use_lp
        self.deadline = None if time_limit is None else time.time() + time_limit
        self.nodes = 0
        self.exhausted = False
        self.best: list | None = None
        self.open_bound = INFINITY  # least bound among abandoned nodes
        self.enum: list | None = None
        self.enum_cap = 0
        self.capped = False

    # -- helpers ---------------------------------------------------------
    def allowed_cols(self, i: int, banned: int) -> list:
        return [j for j in self.rows[i] if not (banned >> j) & 1]

    def greedy(self, residual: int, banned: int) -> list | None:
        chosen = []
        while residual:
            best, gain = -1, 0
            for j in range(self.inst.n_cols):
                if (banned >> j) & 1:
                    continue
                g = (self.col_bits[j] & residual).bit_count()
                if g > gain:
                    best, gain = j, g
            if best < 0:
                return None
            chosen.append(best)
            residual &= ~self.col_bits[best]
        return chosen

    def bound(self, residual: int, banned: int) -> int:
        if not residual:
            return 0
        items = _bits(residual)
        # disjoint items need distinct columns: a greedy packing gives a cheap bound
        used = 0
        pack = 0
        for i in sorted(items, key=lambda i: len(self.rows[i])):
            mask = 0
            for j in self.rows[i]:
                if not (banned >> j) & 1:
                    mask |= 1 << j
            if mask & used == 0:
                used |= mask
                pack += 1
        if not self.use_lp:
            return pack
        cols = [j for j in range(self.inst.n_cols) if not (banned >> j) & 1 and self.col_bits[j] & residual]
        lp = certified_bound(self.rows, self.inst.n_cols, items, cols)
        return max(pack, math.ceil(lp))

    # -- search ----------------------------------------------------------
    def run(self, chosen: list, residual: int, banned: int, enumerate_at: int | None = None) -> None:
        stack = [(chosen, residual, banned, 0)]
        while stack:
            if self.nodes >= self.node_limit or (self.deadline and time.time() > self.deadline):
                self.exhausted = True
                for _, _, _, lb in stack:
                    self.open_bound = min(self.open_bound, lb)
                return
            chosen, residual, banned, parent_lb = stack.pop()
            self.nodes += 1
            # unit propagation
            dead = False
            while True:
                forced = None
                r = residual
                while r:
                    low = r & -r
                    i = low.bit_length() - 1
                    r ^= low
                    cols = self.allowed_cols(i, banned)
                    if not cols:
                        dead = True
                        break
                    if len(cols) == 1:
                        forced = cols[0]
                        break
                if dead or forced is None:
                    break
                chosen = chosen + [forced]
                residual &= ~self.col_bits[forced]
            if dead:
                continue
            target = self.target(enumerate_at)
            if not residual:
                self.record(chosen, enumerate_at)
                continue
            if len(chosen) + 1 > target:
                continue
            lb = len(chosen) + self.bound(residual, banned)
            if lb > target:
                continue
            branch_item = min(_bits(residual), key=lambda i: (len(self.allowed_cols(i, banned)), i))
            cols = self.allowed_cols(branch_item, banned)
            cols.sort(key=lambda j: (-(self.col_bits[j] & residual).bit_count(), j))
            children = []
            excl = banned
            for j in cols:
                children.append((chosen + [j], residual & ~self.col_bits[j], excl, lb))
                excl |= 1 << j
            stack.extend(reversed(children))

    def target(self, enumerate_at: int | None) -> int:
        # largest size still worth exploring
        if enumerate_at is not None:
            return enumerate_at
        return (len(self.best) - 1) if self.best is not None else self.inst.n_cols

    def record(self, chosen: list, enumerate_at: int | None) -> None:
        if enumerate_at is not None:
            if len(chosen) == enumerate_at:
                if len(self.enum) < self.enum_cap:
                    self.enum.append(sorted(chosen))
                else:
                    self.capped = True
                    self.node_limit = self.nodes  # stop
            return
        if self.best is None or len(chosen) < len(self.best):
            self.best = sorted(chosen)


def _bits(x: int) -> list:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _gate(inst: CoverInstance) -> None:
    if inst.provenance.get("complete") is False:
        raise IncompleteCertificate("instance was built from an incomplete maximal-subgroup list")
    if any(not r for r in inst.rows):
        raise DomainError("an item lies in no column")


def exact_sigma(
    inst: CoverInstance,
    budget: int = 10**6,
    time_limit: float | None = None,
    node_lp: str = "auto",
    jobs: int = 1,
) -> SigmaResult:
    """Least number of columns covering every item, or a bracketing interval once the budget runs out."""
    _gate(inst)
    t0 = time.time()
    if inst.n_items == 0:
        return SigmaResult(0, 0, 0, [], Fraction(0), 0, "LP-tight", 0.0)
    root = lp_lower_bound(inst)
    lower = root.ceil
    use_lp = node_lp == "on" or (node_lp == "auto" and inst.n_items * inst.n_cols <= 5 * 10**7)
    s = _Search(inst, budget, use_lp, time_limit)
    full = (1 << inst.n_items) - 1
    s.best = s.greedy(full, 0)
    rounded = _round_lp(s, root.x)
    if rounded is not None and len(rounded) < len(s.best):
        s.best = rounded
    if len(s.best) == lower:
        return SigmaResult(lower, lower, lower, s.best, root.value, 0, "LP-tight", time.time() - t0)
    if jobs > 1:
        _parallel_run(s, jobs)
    else:
        s.run([], full, 0)
    upper = len(s.best)
    if s.exhausted:
        lo = max(lower, min(upper, s.open_bound if s.open_bound != INFINITY else upper))
        if lo >= upper:
            return SigmaResult(upper, upper, upper, s.best, root.value, s.nodes, "closed-tree", time.time() - t0)
        return SigmaResult(None, int(lo), upper, s.best, root.value, s.nodes, "interval", time.time() - t0)
    cert = "LP-tight" if upper == lower else "closed-tree"
    return SigmaResult(upper, upper, upper, s.best, root.value, s.nodes, cert, time.time() - t0)


def _round_lp(s: _Search, x: list) -> list | None:
    # columns in decreasing LP weight, then greedy repair and pruning of redundant columns
    order = sorted(range(len(x)), key=lambda j: (-x[j], j))
    residual = (1 << s.n_items) - 1
    chosen = []
    for j in order:
        if x[j] <= 0 or not residual:
            break
        if s.col_bits[j] & residual:
            chosen.append(j)
            residual &= ~s.col_bits[j]
    if residual:
        rest = s.greedy(residual, 0)
        if rest is None:
            return None
        chosen += rest
    return _prune(s, chosen)


def _prune(s: _Search, chosen: list) -> list:
    chosen = list(chosen)
    for j in sorted(chosen, key=lambda j: (s.col_bits[j].bit_count(), j)):
        rest = 0
        for k in chosen:
            if k != j:
                rest |= s.col_bits[k]
        if rest == (1 << s.n_items) - 1:
            chosen.remove(j)
    return sorted(chosen)


def _parallel_run(s: _Search, jobs: int) -> None:
    """Root children explored as independent subtrees; incumbents merged by min afterwards."""
    from concurrent.futures import ProcessPoolExecutor

    full = (1 << s.n_items) - 1
    i = min(range(s.n_items), key=lambda i: (len(s.rows[i]), i))
    cols = sorted(s.rows[i], key=lambda j: (-s.col_bits[j].bit_count(), j))
    tasks, excl = [], 0
    for j in cols:
        tasks.append(([j], full & ~s.col_bits[j], excl))
        excl |= 1 << j
    budget = max(1, s.node_limit // max(1, len(tasks)))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        results = list(ex.map(_subtree, [(s.inst, s.use_lp, budget, s.best, t) for t in tasks]))
    for best, nodes, exhausted, open_bound in results:
        s.nodes += nodes
        s.exhausted |= exhausted
        s.open_bound = min(s.open_bound, open_bound)
        if best is not None and len(best) < len(s.best):
            s.best = best


def _subtree(args):
    inst, use_lp, budget, incumbent, (chosen, residual, banned) = args
    s = _Search(inst, budget, use_lp, None)
    s.best = incumbent
    s.run(chosen, residual, banned)
    return s.best, s.nodes, s.exhausted, s.open_bound


def enumerate_optimal_covers(inst: CoverInstance, sigma: int, cap: int = 10**6, budget: int = 10**7) -> tuple[list, bool]:
    """All covers of size sigma (each reduced column stands for its merged subgroups).

    Returns (covers, capped).  ``capped`` is True when the cap or node budget stopped
    the enumeration before the tree was closed.
    """
    _gate(inst)
    s = _Search(inst, budget, False, None)
    s.enum, s.enum_cap = [], cap
    s.run([], (1 << inst.n_items) - 1, 0, enumerate_at=sigma)
    return s.enum, s.capped or s.exhausted
