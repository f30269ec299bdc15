"""Fractional set-cover bounds: an exact rational simplex and a certified floating bound for search nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import InvariantViolation, ResourceLimitError

EXACT_CELL_LIMIT = 4_000_000


@dataclass
class PackingSolution:
    value: Fraction
    y: list  # primal packing solution, one per variable
    x: list  # dual covering solution, one per constraint
    pivots: int


def packing_simplex(M: list, b: list, c: list, max_pivots: int = 10**6) -> PackingSolution:
    """Exact primal simplex for  max c.y  s.t.  M y <= b, y >= 0  with b >= 0.

    ``M`` is a list of constraint rows (lists of ints or Fractions).  The slack basis
    is feasible, so no phase one is needed.  Dantzig pricing with a switch to Bland's
    rule after a run of degenerate pivots guarantees termination.
    """
    n_rows = len(M)
    n_vars = len(c)
    if n_rows * (n_vars + n_rows) > EXACT_CELL_LIMIT:
        raise ResourceLimitError("LP too large for the dense exact tableau")
    F = Fraction
    width = n_vars + n_rows
    T = []
    for i, row in enumerate(M):
        r = [F(v) for v in row] + [F(0)] * n_rows
        r[n_vars + i] = F(1)
        T.append(r)
    rhs = [F(v) for v in b]
    if any(v < 0 for v in rhs):
        raise ValueError("packing form needs b >= 0")
    # reduced costs  d_j = c_j - c_B B^-1 A_j ; start with slack basis
    d = [F(v) for v in c] + [F(0)] * n_rows
    z = F(0)
    basis = [n_vars + i for i in range(n_rows)]
    pivots = 0
    degenerate = 0
    while True:
        if degenerate > 50:
            enter = next((j for j in range(width) if d[j] > 0), None)
        else:
            best = max(range(width), key=lambda j: (d[j], -j))
            enter = best if d[best] > 0 else None
        if enter is None:
            break
        leave, best_ratio = None, None
        for i in range(n_rows):
            a = T[i][enter]
            if a > 0:
                r = rhs[i] / a
                if best_ratio is None or r < best_ratio or (r == best_ratio and basis[i] < basis[leave]):
                    leave, best_ratio = i, r
        if leave is None:
            raise InvariantViolation("packing LP is unbounded")
        degenerate = degenerate + 1 if best_ratio == 0 else 0
        piv = T[leave][enter]
        prow = [v / piv for v in T[leave]]
        prhs = rhs[leave] / piv
        nz = [j for j in range(width) if prow[j] != 0]
        T[leave], rhs[leave] = prow, prhs
        for i in range(n_rows):
            if i == leave:
                continue
            a = T[i][enter]
            if a != 0:
                row = T[i]
                for j in nz:
                    row[j] -= a * prow[j]
                rhs[i] -= a * prhs
        a = d[enter]
        for j in nz:
            d[j] -= a * prow[j]
        z += a * prhs
        basis[leave] = enter
        pivots += 1
        if pivots > max_pivots:
            raise ResourceLimitError("pivot limit reached")
    y = [F(0)] * n_vars
    for i, bv in enumerate(basis):
        if bv < n_vars:
            y[bv] = rhs[i]
    x = [-d[n_vars + i] for i in range(n_rows)]
    return PackingSolution(z, y, x, pivots)


@dataclass
class LPBound:
    value: Fraction
    x: list  # fractional cover, one weight per column
    y: list  # dual prices, one per item
    method: str
    pivots: int = 0
    verified: bool = False
    checks: dict = field(default_factory=dict)

    @property
    def ceil(self) -> int:
        return math.ceil(self.value)


def verify_lp_pair(inst, x: list, y: list) -> dict:
    """Exact checks: x covers every item, y prices every column at most 1, and the values agree."""
    F = Fraction
    cover_ok = all(sum((x[j] for j in r), F(0)) >= 1 for r in inst.rows)
    load = [F(0)] * inst.n_cols
    for i, r in enumerate(inst.rows):
        if y[i]:
            for j in r:
                load[j] += y[i]
    dual_ok = all(v <= 1 for v in load) and all(v >= 0 for v in y)
    px, dy = sum(x, F(0)), sum(y, F(0))
    return {"primal_feasible": cover_ok, "dual_feasible": dual_ok, "primal": px, "dual": dy, "tight": px == dy}


def _full_lp(inst) -> LPBound:
    # dual of the cover LP: one packing constraint per column, one variable per item
    cols = inst.cols()
    M = []
    for j in range(inst.n_cols):
        row = [0] * inst.n_items
        for i in cols[j]:
            row[i] = 1
        M.append(row)
    sol = packing_simplex(M, [1] * inst.n_cols, [1] * inst.n_items)
    return LPBound(sol.value, sol.x, sol.y, "exact simplex", sol.pivots)


def _orbit_lp(inst, classes: list) -> LPBound | None:
    """Column weights constant per class; exact solve of the aggregated LP, lifted and re-verified."""
    keys = sorted(set(classes))
    pos = {k: a for a, k in enumerate(keys)}
    size = [0] * len(keys)
    for k in classes:
        size[pos[k]] += 1
    vec_of: dict[tuple, int] = {}
    vecs = []
    item_vec = []
    for r in inst.rows:
        v = [0] * len(keys)
        for j in r:
            v[pos[classes[j]]] += 1
        v = tuple(v)
        if v not in vec_of:
            vec_of[v] = len(vecs)
            vecs.append(v)
        item_vec.append(vec_of[v])
    # aggregated packing:  max sum z_v  s.t.  sum_v a_{v,C} z_v <= |C|
    M = [[vecs[v][a] for v in range(len(vecs))] for a in range(len(keys))]
    sol = packing_simplex(M, size, [1] * len(vecs))
    x = [sol.x[pos[classes[j]]] for j in range(inst.n_cols)]
    count = np.bincount(item_vec, minlength=len(vecs))
    y = [sol.y[v] / int(count[v]) for v in item_vec]
    chk = verify_lp_pair(inst, x, y)
    if not (chk["primal_feasible"] and chk["dual_feasible"] and chk["tight"]):
        return None
    return LPBound(sol.value, x, y, "exact simplex on class-aggregated LP, lifted", sol.pivots, True, chk)


def lp_lower_bound(inst, method: str = "auto") -> LPBound:
    """Optimal value of the fractional relaxation as an exact rational, with primal and dual."""
    classes = inst.provenance.get("column_classes")
    res = None
    if method in ("auto", "orbit") and classes:
        res = _orbit_lp(inst, [tuple(c) if isinstance(c, list) else c for c in classes])
        if res is None and method == "orbit":
            raise InvariantViolation("class-aggregated LP did not lift to a certified optimum")
    if res is None:
        res = _full_lp(inst)
        res.checks = verify_lp_pair(inst, res.x, res.y)
        res.verified = bool(res.checks["primal_feasible"] and res.checks["dual_feasible"] and res.checks["tight"])
    if not res.verified:
        raise InvariantViolation(f"LP certificate failed: {res.checks}")
    return res


# ---------------------------------------------------------------------------
# node bounds inside the search

_SCALE = 1 << 30


def certified_bound(rows_cols: list, n_cols: int, item_ids: list, col_ids: list) -> Fraction:
    """A rigorous lower bound for the residual cover problem from a floating LP dual.

    Float duals are truncated to integers on a 2^-30 grid and rescaled by the worst
    column load, so the returned value is a feasible packing value in exact arithmetic.
    """
    from scipy.optimize import linprog
    from scipy.sparse import csr_matrix

    if not item_ids:
        return Fraction(0)
    cpos = {c: k for k, c in enumerate(col_ids)}
    r_idx, c_idx = [], []
    for a, i in enumerate(item_ids):
        for j in rows_cols[i]:
            k = cpos.get(j)
            if k is not None:
                r_idx.append(a)
                c_idx.append(k)
    A = csr_matrix((np.ones(len(r_idx)), (r_idx, c_idx)), shape=(len(item_ids), len(col_ids)))
    # packing form: max 1.y  s.t.  A^T y <= 1
    res = linprog(-np.ones(len(item_ids)), A_ub=A.T.tocsr(), b_ub=np.ones(len(col_ids)), bounds=(0, None), method="highs")
    if res.status != 0:
        return Fraction(0)
    Y = np.floor(np.clip(res.x, 0, None) * _SCALE).astype(np.int64)
    load = A.T.astype(np.int64) @ Y
    denom = max(_SCALE, int(load.max()) if load.size else 0)
    return Fraction(int(Y.sum()), denom)
