"""The unitary polarity graph and triangle-free vertex subsets.

Vertices are the point ids of ``HermitianPlane``; P ~ Q when P lies on the
polar line of Q. Absolute points carry loops, which never count towards
triangles. The triangle-free searches work on nonabsolute vertices only,
where graph triangles are exactly the self-polar triangles.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ResourceLimitError
from .fields import as_prime_power
from .geometry import HermitianPlane, plane

MAX_GRAPH_Q = 9
MAX_EXACT_VERTICES = 64


@dataclass
class PolarityGraph:
    q: int
    plane: HermitianPlane
    adj: np.ndarray  # (n, n) bool, symmetric, diagonal = loops
    loops: np.ndarray

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    def neighbors(self, v: int) -> np.ndarray:
        row = self.adj[v].copy()
        row[v] = False
        return np.flatnonzero(row)

    def degree(self, v: int) -> int:
        return int(self.adj[v].sum() - self.adj[v, v])


def build_graph(q) -> PolarityGraph:
    pp = as_prime_power(q)
    if pp.q > MAX_GRAPH_Q:
        raise ResourceLimitError(f"polarity graphs are built for q <= {MAX_GRAPH_Q}")
    pl = plane(pp.q)
    n = pl.n_points
    adj = np.zeros((n, n), dtype=bool)
    cc = pl.conj[pl.coords]
    step = max(1, (1 << 22) // n)
    for s in range(0, n, step):
        adj[s : s + step] = pl.vdot(pl.coords[s : s + step, None, :], cc[None, :, :]) == 0
    return PolarityGraph(pp.q, pl, adj, np.diag(adj).copy())


def graph_triangles(g: PolarityGraph) -> np.ndarray:
    """All 3-cycles u < v < w, found edge by edge via the meeting point of two polar lines."""
    pl = g.plane
    iu, iv = np.nonzero(np.triu(g.adj, 1))
    xu, xv = pl.coords[iu], pl.coords[iv]
    w = pl.ids_of(pl.vcross(pl.conj[xu], pl.conj[xv]))
    keep = (w > iv) & (w >= 0)
    # the common neighbour may coincide with u or v only through a loop
    keep &= (w != iu) & (w != iv)
    tri = np.stack([iu[keep], iv[keep], w[keep]], axis=1)
    return tri[np.lexsort(tri.T[::-1])]


def triangle_census(g: PolarityGraph) -> int:
    return int(graph_triangles(g).shape[0])


def triangle_census_matrix(g: PolarityGraph) -> int:
    """Independent count: trace(A^3)/6 on the loopless adjacency matrix."""
    a = g.adj.astype(np.int64)
    np.fill_diagonal(a, 0)
    return int(np.einsum("ij,jk,ki->", a, a, a) // 6)


def m_formula(q) -> int:
    pp = as_prime_power(q)
    q = pp.q
    if pp.p == 2:
        return q**4 // 2
    if pp.p == 3:
        return q**3 + 2 * q * q - 2 * q - 1
    n = (pp.p + 1) // 3 if (pp.p + 1) % 3 == 0 else (pp.p - 1) // 3
    return n * q**4 // pp.p


@dataclass(frozen=True)
class VertexSubset:
    ids: tuple[int, ...]
    verified: bool = False

    def __len__(self) -> int:
        return len(self.ids)


def is_triangle_free(g: PolarityGraph, ids) -> bool:
    """Edge iterator: each induced edge's unique common neighbour must lie outside the set."""
    ids = np.unique(np.asarray(ids, dtype=np.int64))
    if ids.size < 3:
        return True
    pl = g.plane
    sub = g.adj[np.ix_(ids, ids)]
    iu, iv = np.nonzero(np.triu(sub, 1))
    u, v = ids[iu], ids[iv]
    w = pl.ids_of(pl.vcross(pl.conj[pl.coords[u]], pl.conj[pl.coords[v]]))
    w = w[(w != u) & (w != v)]
    return not np.isin(w, ids).any()


def is_triangle_free_matrix(g: PolarityGraph, ids) -> bool:
    """Neighbourhood intersection on the induced adjacency matrix."""
    ids = np.unique(np.asarray(ids, dtype=np.int64))
    sub = g.adj[np.ix_(ids, ids)].astype(np.int64)
    np.fill_diagonal(sub, 0)
    return not ((sub @ sub) * sub).any()


def verify_subset(g: PolarityGraph, ids) -> VertexSubset:
    ids = tuple(sorted(int(i) for i in set(int(x) for x in ids)))
    if ids and g.loops[list(ids)].any():
        raise DomainError("subset contains absolute vertices")
    ok = is_triangle_free(g, ids)
    return VertexSubset(ids, ok)


class _TriangleIndex:
    """Nonabsolute triangles with vertex-to-triangle incidence."""

    def __init__(self, g: PolarityGraph):
        self.tri = graph_triangles(g)
        self.na = np.flatnonzero(~g.loops)
        order = np.argsort(self.tri.ravel(), kind="stable")
        flat = self.tri.ravel()[order]
        self.starts = np.searchsorted(flat, np.arange(g.n + 1))
        self.inc = order // 3
        self.inc_list = [self.inc[self.starts[v] : self.starts[v + 1]].tolist() for v in range(g.n)]
        self.tri_list = self.tri.tolist()


@dataclass
class SearchResult:
    subset: VertexSubset
    moves: int
    seconds: float
    ratio: float


def trifree_search(g: PolarityGraph, seed: int = 0, budget: int = 10**6, restarts: int = 1) -> SearchResult:
    """Randomized greedy plus swap-based local search with a tabu list.

    Deterministic for a given seed; budget counts local-search moves over all
    restarts. The best set is chosen by (size, then lexicographic ids).
    """
    t0 = time.perf_counter()
    idx = _TriangleIndex(g)
    best: tuple[int, ...] = ()
    total = 0
    per = max(1, budget // max(1, restarts))
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        s, used = _local_search(idx, g.n, rng, per)
        total += used
        cand = tuple(sorted(s))
        if len(cand) > len(best) or (len(cand) == len(best) and cand < best):
            best = cand
    sub = verify_subset(g, best)
    if not sub.verified:
        raise AssertionError("local search produced a set with a triangle")  # pragma: no cover
    return SearchResult(sub, total, time.perf_counter() - t0, len(sub) / m_formula(g.q))


def greedy_trifree(g: PolarityGraph, seed: int = 0) -> VertexSubset:
    idx = _TriangleIndex(g)
    rng = np.random.default_rng(seed)
    s, _ = _local_search(idx, g.n, rng, 0)
    return verify_subset(g, s)


def _local_search(idx: _TriangleIndex, n: int, rng, budget: int):
    tris, inc = idx.tri_list, idx.inc_list
    in_s = np.zeros(n, dtype=bool)
    # block[v] = number of triangles through v whose other two vertices are in S
    block = np.zeros(n, dtype=np.int64)
    cand = idx.na.copy()
    rng.shuffle(cand)

    def add(v):
        in_s[v] = True
        for t in inc[v]:
            a, b, c = tris[t]
            others = [x for x in (a, b, c) if x != v]
            x, y = others
            if in_s[x] and not in_s[y]:
                block[y] += 1
            elif in_s[y] and not in_s[x]:
                block[x] += 1

    def remove(v):
        in_s[v] = False
        for t in inc[v]:
            a, b, c = tris[t]
            x, y = [u for u in (a, b, c) if u != v]
            if in_s[x] and not in_s[y]:
                block[y] -= 1
            elif in_s[y] and not in_s[x]:
                block[x] -= 1

    for v in cand:
        if block[v] == 0:
            add(v)
    best = set(np.flatnonzero(in_s).tolist())
    tabu = np.zeros(n, dtype=np.int64)
    na = idx.na
    moves = 0
    tenure = max(3, len(na) // 20)
    while moves < budget:
        moves += 1
        out = na[~in_s[na]]
        if out.size == 0:
            break
        free = out[(block[out] == 0)]
        if free.size:
            add(int(free[rng.integers(free.size)]))
            cur = int(in_s.sum())
            if cur > len(best):
                best = set(np.flatnonzero(in_s).tolist())
            continue
        ok = out[(tabu[out] <= moves) & (block[out] == 1)]
        if ok.size == 0:
            ok = out[tabu[out] <= moves]
            if ok.size == 0:
                ok = out
        v = int(ok[rng.integers(ok.size)])
        # drop one vertex from every triangle that v would complete
        for t in inc[v]:
            x, y = [u for u in tris[t] if u != v]
            if in_s[x] and in_s[y]:
                w = x if rng.random() < 0.5 else y
                remove(w)
                tabu[w] = moves + tenure
        add(v)
        if int(in_s.sum()) > len(best):
            best = set(np.flatnonzero(in_s).tolist())
    return best, moves


@dataclass
class ExactResult:
    subset: VertexSubset
    optimum: int
    nodes: int
    hitting_set: tuple[int, ...]


def trifree_exact(g: PolarityGraph, node_limit: int | None = None) -> ExactResult:
    """Maximum triangle-free set of nonabsolute vertices by branch and bound.

    Equivalent to a minimum hitting set of the triangles. The bound adds, to
    the vertices removed so far, a greedy packing of vertex-disjoint untouched
    triangles, each of which needs its own removal.
    """
    idx = _TriangleIndex(g)
    na = idx.na
    if len(na) > MAX_EXACT_VERTICES:
        raise ResourceLimitError(f"exact search handles at most {MAX_EXACT_VERTICES} nonabsolute vertices")
    pos = {int(v): i for i, v in enumerate(na)}
    tmask = [sum(1 << pos[int(x)] for x in t) for t in idx.tri]
    start = greedy_trifree(g, 0)
    kept = sum(1 << pos[v] for v in start.ids)
    full = (1 << len(na)) - 1
    best_removed = full & ~kept
    best_size = bin(best_removed).count("1")
    nodes = 0

    def lower(live):
        used = 0
        k = 0
        for m in live:
            if not m & used:
                used |= m
                k += 1
        return k

    def dfs(removed: int, locked: int, count: int):
        nonlocal best_removed, best_size, nodes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise ResourceLimitError("node limit reached")
        live = [m for m in tmask if not m & removed]
        if not live:
            if count < best_size:
                best_size, best_removed = count, removed
            return
        if count + lower(live) >= best_size:
            return
        # branch on the live triangle with the fewest unlocked vertices
        m = min(live, key=lambda x: bin(x & ~locked).count("1"))
        free = m & ~locked
        lock = locked
        while free:
            bit = free & -free
            free ^= bit
            dfs(removed | bit, lock, count + 1)
            lock |= bit

    dfs(0, 0, 0)
    keep = [int(na[i]) for i in range(len(na)) if not (best_removed >> i) & 1]
    sub = verify_subset(g, keep)
    hit = tuple(int(na[i]) for i in range(len(na)) if (best_removed >> i) & 1)
    return ExactResult(sub, len(keep), nodes, hit)


# ---------------------------------------------------------------------------
# I/O


def write_dimacs(g: PolarityGraph, path) -> None:
    iu, iv = np.nonzero(np.triu(g.adj, 1))
    lines = [
        f"c unitary polarity graph of PG(2,{g.q}^2)",
        f"c loops on {int(g.loops.sum())} absolute vertices omitted",
        f"p edge {g.n} {len(iu)}",
    ]
    lines += [f"e {u + 1} {v + 1}" for u, v in zip(iu.tolist(), iv.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def read_dimacs(path) -> tuple[int, list[tuple[int, int]]]:
    n = 0
    edges = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("p"):
            n = int(line.split()[2])
        elif line.startswith("e"):
            _, u, v = line.split()
            edges.append((int(u) - 1, int(v) - 1))
    return n, edges


def subset_to_json(sub: VertexSubset, q: int) -> str:
    return json.dumps({"q": q, "ids": list(sub.ids), "triangle_free": sub.verified})


def subset_from_json(text: str, g: PolarityGraph) -> VertexSubset:
    data = json.loads(text)
    if int(data.get("q", g.q)) != g.q:
        raise DomainError("subset was saved for a different q")
    return verify_subset(g, data["ids"])
