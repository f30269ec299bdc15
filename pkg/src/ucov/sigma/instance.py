"""Set-cover instances built from a maximal-subgroup list."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, IncompleteCertificate


@dataclass
class CoverInstance:
    """Rows are universe items, columns are subgroups; ``rows[i]`` lists the columns covering item i."""

    n_cols: int
    rows: list  # list of sorted int tuples
    multiplicity: list  # elements represented by each item
    col_groups: list  # original subgroup indices behind each column (identical columns merged)
    provenance: dict = field(default_factory=dict)
    representatives: list = field(default_factory=list)  # one element id per item

    @property
    def n_items(self) -> int:
        return len(self.rows)

    def cols(self) -> list:
        out = [[] for _ in range(self.n_cols)]
        for i, r in enumerate(self.rows):
            for j in r:
                out[j].append(i)
        return [tuple(c) for c in out]

    def covers(self, chosen) -> bool:
        s = set(int(c) for c in chosen)
        return all(s.intersection(r) for r in self.rows)

    def with_extra_column(self, items) -> "CoverInstance":
        """A copy with one more column covering ``items`` (monotonicity experiments)."""
        items = set(int(i) for i in items)
        j = self.n_cols
        rows = [tuple(sorted(r + ((j,) if i in items else ()))) for i, r in enumerate(self.rows)]
        return CoverInstance(j + 1, rows, list(self.multiplicity), self.col_groups + [[-1]], dict(self.provenance, extra=True), list(self.representatives))

    def restrict_columns(self, keep) -> "CoverInstance":
        keep = sorted(set(int(c) for c in keep))
        pos = {c: k for k, c in enumerate(keep)}
        rows = [tuple(pos[c] for c in r if c in pos) for r in self.rows]
        if any(not r for r in rows):
            raise DomainError("restricted columns no longer cover the universe")
        return CoverInstance(len(keep), rows, list(self.multiplicity), [self.col_groups[c] for c in keep], dict(self.provenance, restricted=True), list(self.representatives))

    # -- json ---------------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "ucov-cover-instance-1",
                "n_cols": self.n_cols,
                "universe": [list(r) for r in self.rows],
                "multiplicity": self.multiplicity,
                "columns": self.col_groups,
                "representatives": self.representatives,
                "provenance": self.provenance,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "CoverInstance":
        d = json.loads(text)
        if d.get("format") != "ucov-cover-instance-1":
            raise DomainError("not a cover instance")
        rows = [tuple(sorted(int(c) for c in r)) for r in d["universe"]]
        n = int(d["n_cols"])
        if any(not r or r[-1] >= n or r[0] < 0 for r in rows):
            raise DomainError("instance has an uncoverable or out-of-range item")
        return cls(n, rows, [int(m) for m in d["multiplicity"]], d["columns"], d.get("provenance", {}), d.get("representatives", []))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def from_sets(n_elements: int, sets, identity: int | None = None, label: str = "") -> CoverInstance:
    """Plain instance: every element but the identity is an item; no reduction."""
    cols_of = [[] for _ in range(n_elements)]
    for j, s in enumerate(sets):
        for x in np.asarray(s).tolist():
            cols_of[x].append(j)
    rows, reps = [], []
    for x in range(n_elements):
        if x == identity:
            continue
        if not cols_of[x]:
            raise DomainError(f"element {x} lies in no column")
        rows.append(tuple(cols_of[x]))
        reps.append(x)
    return CoverInstance(len(sets), rows, [1] * len(rows), [[j] for j in range(len(sets))], {"reduction": "none", "label": label}, reps)


def maximal_cyclic_generators(g) -> np.ndarray:
    """Boolean mask: x generates a cyclic subgroup that is maximal among cyclic subgroups."""
    n = g.order
    orders = np.asarray(g.orders if not callable(getattr(g, "orders", None)) else g.orders(), dtype=np.int64)
    keep = orders > 1
    for o in np.unique(orders):
        o = int(o)
        xs = np.flatnonzero(orders == o)
        for d in range(2, o + 1):
            if o % d == 0:
                # x^d generates a proper subgroup of <x>
                keep[_power(g, xs, d)] = False
    keep[g.identity] = False
    return keep


def _power(g, xs: np.ndarray, e: int) -> np.ndarray:
    if hasattr(g, "power") and not hasattr(g, "table"):
        return np.asarray(g.power(xs, np.full(len(xs), e)), dtype=np.int64)
    r = np.full(len(xs), g.identity, dtype=np.int64)
    b = xs.copy()
    while e:
        if e & 1:
            r = g.mul(r, b)
        b = g.mul(b, b)
        e >>= 1
    return r


def reduce_instance(g, maximals, dominance: bool = True) -> CoverInstance:
    """Universe = maximal cyclic subgroups, merged by incidence; identical columns merged.

    With ``dominance`` an item whose column set contains another item's column set is
    dropped (covering the smaller set forces it).  Column dominance is never applied, so
    optimal covers of the reduced instance are exactly the optimal covers by the list.
    """
    if getattr(maximals, "complete", True) is False:
        raise IncompleteCertificate("reduce_instance needs a complete maximal-subgroup list")
    sets = maximals.sets if hasattr(maximals, "sets") else list(maximals)
    n = g.order
    gen_mask = maximal_cyclic_generators(g)
    cand = np.flatnonzero(gen_mask)
    # one item per cyclic subgroup: the least generator
    cyc_rep = np.full(n, -1, dtype=np.int64)
    orders = np.asarray(g.orders if not callable(getattr(g, "orders", None)) else g.orders(), dtype=np.int64)
    for o in np.unique(orders[cand]):
        o = int(o)
        xs = cand[orders[cand] == o]
        best = xs.copy()
        for k in range(2, o):
            if np.gcd(k, o) == 1:
                best = np.minimum(best, _power(g, xs, k))
        cyc_rep[xs] = best
    items = np.unique(cyc_rep[cand])
    item_pos = np.full(n, -1, dtype=np.int64)
    item_pos[items] = np.arange(len(items))
    # incidence: column j contains item i iff it contains the representative
    cols_of = [[] for _ in items]
    for j, s in enumerate(sets):
        s = np.asarray(s)
        hit = item_pos[s[item_pos[s] >= 0]]
        for i in hit.tolist():
            cols_of[i].append(j)
    if any(not c for c in cols_of):
        raise DomainError("some maximal cyclic subgroup lies in no column")
    # merge identical columns
    col_sig: dict[tuple, int] = {}
    col_map = np.empty(len(sets), dtype=np.int64)
    by_col = [[] for _ in range(len(sets))]
    for i, cs in enumerate(cols_of):
        for j in cs:
            by_col[j].append(i)
    col_groups: list[list[int]] = []
    for j in range(len(sets)):
        sig = tuple(by_col[j])
        if sig not in col_sig:
            col_sig[sig] = len(col_groups)
            col_groups.append([])
        col_map[j] = col_sig[sig]
        col_groups[col_sig[sig]].append(j)
    # merge items by pattern
    elems_per_item = np.bincount(item_pos[cyc_rep[cand]], minlength=len(items))
    pattern: dict[tuple, int] = {}
    rows, mult, reps = [], [], []
    for i, cs in enumerate(cols_of):
        r = tuple(sorted(set(col_map[cs].tolist())))
        if r in pattern:
            mult[pattern[r]] += int(elems_per_item[i])
        else:
            pattern[r] = len(rows)
            rows.append(r)
            mult.append(int(elems_per_item[i]))
            reps.append(int(items[i]))
    n_patterns = len(rows)
    labels = getattr(maximals, "labels", None)
    col_classes = None
    if labels is not None and getattr(maximals, "conjugacy_classes", False):
        col_classes = ["+".join(sorted({labels[j] for j in grp})) for grp in col_groups]
    if dominance:
        rows, mult, reps = _drop_dominated(rows, mult, reps)
    prov = {
        "reduction": "maximal-cyclic + pattern merge" + (" + item dominance" if dominance else ""),
        "elements": n,
        "generator_elements": int(len(cand)),
        "cyclic_items": int(len(items)),
        "patterns": n_patterns,
        "items": len(rows),
        "subgroups": len(sets),
        "columns": len(col_groups),
    }
    if col_classes is not None:
        prov["column_classes"] = col_classes
    return CoverInstance(len(col_groups), rows, mult, col_groups, prov, reps)


def _drop_dominated(rows, mult, reps):
    # item A is redundant when some other item's column set is a subset of A's
    order = sorted(range(len(rows)), key=lambda i: (len(rows[i]), rows[i]))
    kept: list[int] = []
    kept_sets: list[frozenset] = []
    by_col: dict[int, list[int]] = {}
    for i in order:
        ri = frozenset(rows[i])
        # candidate subsets share the first column of any subset; check kept sets touching ri
        cand = set()
        for c in rows[i]:
            cand.update(by_col.get(c, ()))
        if any(kept_sets[k] <= ri for k in cand):
            continue
        k = len(kept)
        kept.append(i)
        kept_sets.append(ri)
        for c in rows[i]:
            by_col.setdefault(c, []).append(k)
    kept.sort()
    return [rows[i] for i in kept], [mult[i] for i in kept], [reps[i] for i in kept]


def expand_cover(inst: CoverInstance, chosen) -> list[int]:
    """Original subgroup indices for chosen columns (the first subgroup of each merged group)."""
    return [int(inst.col_groups[c][0]) for c in chosen]


def covers_group(g, sets, chosen) -> bool:
    """Independent post-check: the union of the chosen subgroups is all of G."""
    seen = np.zeros(g.order, dtype=bool)
    for j in chosen:
        seen[np.asarray(sets[j])] = True
    return bool(seen.all())
