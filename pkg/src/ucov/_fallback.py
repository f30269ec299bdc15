"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in the compiled
``_kernels`` extension; ``ucov.kernels`` picks one at import.

Small-field arguments (``add``, ``mul``) are full Q x Q uint8 tables for
GF(q^2). Big-field arguments (``exp``, ``log``, ``zech``) are the int64
tables of a FieldCtx, used for GF(q^6) where a full table would not fit.
"""

from __future__ import annotations

import numpy as np


# ---------------------------------------------------------------------------
# GF(q^2) matrices, entries as uint8 indices, shape (n, 9) row-major


def mat_mul(a, b, add, mul):
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    n = max(a.shape[0], b.shape[0])
    out = np.empty((n, 9), dtype=np.uint8)
    for i in range(3):
        for j in range(3):
            acc = mul[a[:, 3 * i], b[:, j]]
            acc = add[acc, mul[a[:, 3 * i + 1], b[:, 3 + j]]]
            acc = add[acc, mul[a[:, 3 * i + 2], b[:, 6 + j]]]
            out[:, 3 * i + j] = acc
    return out


def mat_apply(mats, vecs, add, mul):
    """Images M v for every matrix and vector, shape (n, m, 3)."""
    mats = np.asarray(mats, dtype=np.uint8)
    vecs = np.asarray(vecs, dtype=np.uint8)
    out = np.empty((mats.shape[0], vecs.shape[0], 3), dtype=np.uint8)
    for i in range(3):
        acc = mul[mats[:, 3 * i, None], vecs[None, :, 0]]
        acc = add[acc, mul[mats[:, 3 * i + 1, None], vecs[None, :, 1]]]
        acc = add[acc, mul[mats[:, 3 * i + 2, None], vecs[None, :, 2]]]
        out[:, :, i] = acc
    return out


def encode_keys(mats, qq):
    mats = np.asarray(mats)
    key = np.zeros(mats.shape[0], dtype=np.int64)
    for k in range(9):
        key = key * qq + mats[:, k].astype(np.int64)
    return key


def canon(mats, scalars, mul, qq):
    """Least-key representative among the scalar multiples; returns (mats, keys)."""
    mats = np.asarray(mats, dtype=np.uint8)
    best = mats.copy()
    best_key = encode_keys(mats, qq)
    for w in scalars:
        if w == 1:
            continue
        cand = mul[mats, w]
        ck = encode_keys(cand, qq)
        better = ck < best_key
        best[better] = cand[better]
        best_key = np.where(better, ck, best_key)
    return best, best_key


def su3_frames(norm1, add, mul, conj, neg):
    """All [c1 | c2 | conj(c1 x c2)] with c1, c2 orthonormal, as (N, 9) uint8."""
    v = np.asarray(norm1, dtype=np.uint8)
    cv = conj[v]
    chunks = []
    for c1 in v:
        cc1 = conj[c1]
        f = add[add[mul[v[:, 0], cc1[0]], mul[v[:, 1], cc1[1]]], mul[v[:, 2], cc1[2]]]
        c2 = v[f == 0]
        cc2 = cv[f == 0]
        m = c2.shape[0]
        c1b = np.broadcast_to(conj[c1], (m, 3))
        # conj(c1 x c2) = conj(c1) x conj(c2)
        x0 = add[mul[c1b[:, 1], cc2[:, 2]], neg[mul[c1b[:, 2], cc2[:, 1]]]]
        x1 = add[mul[c1b[:, 2], cc2[:, 0]], neg[mul[c1b[:, 0], cc2[:, 2]]]]
        x2 = add[mul[c1b[:, 0], cc2[:, 1]], neg[mul[c1b[:, 1], cc2[:, 0]]]]
        out = np.empty((m, 9), dtype=np.uint8)
        out[:, 0], out[:, 3], out[:, 6] = c1[0], c1[1], c1[2]
        out[:, 1], out[:, 4], out[:, 7] = c2[:, 0], c2[:, 1], c2[:, 2]
        out[:, 2], out[:, 5], out[:, 8] = x0, x1, x2
        chunks.append(out)
    return np.concatenate(chunks) if chunks else np.empty((0, 9), dtype=np.uint8)


def _cross(a, b, add, mul, neg):
    return (
        add[mul[a[1], b[2]], neg[mul[a[2], b[1]]]],
        add[mul[a[2], b[0]], neg[mul[a[0], b[2]]]],
        add[mul[a[0], b[1]], neg[mul[a[1], b[0]]]],
    )


def _normalize_ids(v, inv, mul, lookup, qq):
    """Point ids of the projective classes of the rows of v (n, 3); -1 for zero rows."""
    v = [np.asarray(c, dtype=np.int64) for c in v]
    lead = np.where(v[0] != 0, v[0], np.where(v[1] != 0, v[1], v[2]))
    nonzero = lead != 0
    s = inv[np.where(nonzero, lead, 1)]
    w = [mul[c, s].astype(np.int64) for c in v]
    code = (w[0] * qq + w[1]) * qq + w[2]
    return np.where(nonzero, lookup[code], -1)


def classify_batch(mats, add, mul, neg, inv, roots, lookup, line_abs, absolute):
    """Eigen-analysis of PSU3 elements (canonical representatives, det 1).

    Returns (etype, fix): etype 1/2/3, or 0 when no consistent type exists;
    fix[:, 0] is an absolute fixed point for type 1, fix[:, :3] the sorted
    vertices of the fixed triangle for type 2, and -1 elsewhere.
    """
    m = np.asarray(mats, dtype=np.int64)
    absolute = np.asarray(absolute).astype(bool)
    n = m.shape[0]
    qq = add.shape[0]
    tr = add[add[m[:, 0], m[:, 4]], m[:, 8]]
    minor = lambda a, b, c, d: add[mul[m[:, a], m[:, b]], neg[mul[m[:, c], m[:, d]]]]
    s2 = add[add[minor(0, 4, 1, 3), minor(0, 8, 2, 6)], minor(4, 8, 5, 7)]
    rts = roots[tr.astype(np.int64) * qq + s2]
    etype = np.zeros(n, dtype=np.int8)
    fix = np.full((n, 3), -1, dtype=np.int32)
    abs_pt = np.full(n, -1, dtype=np.int64)
    verts = np.full((n, 3), -1, dtype=np.int64)
    nvert = np.zeros(n, dtype=np.int64)
    for slot in range(3):
        lam = rts[:, slot].astype(np.int64)
        has = lam >= 0
        lam = np.where(has, lam, 0)
        nl = neg[lam]
        k = m.copy()
        for d in (0, 4, 8):
            k[:, d] = add[m[:, d], nl]
        rows = [(k[:, 0], k[:, 1], k[:, 2]), (k[:, 3], k[:, 4], k[:, 5]), (k[:, 6], k[:, 7], k[:, 8])]
        c01 = _cross(rows[0], rows[1], add, mul, neg)
        c02 = _cross(rows[0], rows[2], add, mul, neg)
        c12 = _cross(rows[1], rows[2], add, mul, neg)
        nz01 = (c01[0] != 0) | (c01[1] != 0) | (c01[2] != 0)
        nz02 = (c02[0] != 0) | (c02[1] != 0) | (c02[2] != 0)
        vec = [np.where(nz01, c01[i], np.where(nz02, c02[i], c12[i])) for i in range(3)]
        pid = _normalize_ids(vec, inv, mul, lookup, qq)
        rank2 = has & (pid >= 0)
        # rank <= 1: a whole line (or the plane) of fixed points
        r0nz = (k[:, 0] != 0) | (k[:, 1] != 0) | (k[:, 2] != 0)
        r1nz = (k[:, 3] != 0) | (k[:, 4] != 0) | (k[:, 5] != 0)
        row = [np.where(r0nz, k[:, i], np.where(r1nz, k[:, 3 + i], k[:, 6 + i])) for i in range(3)]
        lid = _normalize_ids(row, inv, mul, lookup, qq)
        low = has & (pid < 0)
        plane = low & (lid < 0)
        line = low & (lid >= 0)
        got = np.where(plane, int(np.flatnonzero(absolute)[0]), -1)
        got = np.where(line, line_abs[np.where(line, lid, 0)], got)
        iso = rank2 & absolute[np.where(rank2, pid, 0)]
        got = np.where(iso, pid, got)
        abs_pt = np.where((abs_pt < 0) & (got >= 0), got, abs_pt)
        add_v = rank2 & ~iso
        verts[add_v, slot] = pid[add_v]
        nvert += add_v
    t1 = abs_pt >= 0
    t3 = rts[:, 0] < 0
    t2 = ~t1 & ~t3 & (nvert == 3)
    etype[t1] = 1
    etype[t3] = 3
    etype[t2] = 2
    fix[t1, 0] = abs_pt[t1]
    fix[t2] = np.sort(verts[t2], axis=1)
    return etype, fix


# ---------------------------------------------------------------------------
# GF(q^6) arithmetic on int64 index arrays


def _bmul(a, b, exp, log):
    out = exp[log[a] + log[b]]
    return np.where((a == 0) | (b == 0), 0, out)


def _badd(a, b, exp, log, zech):
    n1 = log.shape[0] - 1
    la = log[a]
    d = (log[b] - la) % n1
    z = zech[d]
    s = np.where(z < 0, 0, exp[np.where(z < 0, 0, la + z)])
    s = np.where(a == 0, b, s)
    return np.where(b == 0, a, s)


def _bpow(a, e, exp, log):
    n1 = log.shape[0] - 1
    out = exp[(log[a] * e) % n1]
    return np.where(a == 0, 0, out)


def _bnormalize_encode(v, exp, log):
    n = log.shape[0]
    n1 = n - 1
    lead = np.where(v[0] != 0, v[0], np.where(v[1] != 0, v[1], v[2]))
    il = exp[(n1 - log[np.where(lead == 0, 1, lead)]) % n1]
    w = [_bmul(c, il, exp, log) for c in v]
    return (w[0] * n + w[1]) * n + w[2]


def imag_vertices(mats_big, coef, frob_e, exp, log, zech):
    """Encoded vertex triples of the imaginary triangles of type 3 elements.

    ``mats_big`` holds the element matrices embedded in GF(q^6), ``coef`` the
    eigenvector coefficients (n, 3) in the cyclic basis (v, Tv, T^2 v) with
    v = (1, 0, 0); the other two vertices are images under x -> x^frob_e.
    Returns sorted encodings, shape (n, 3).
    """
    t = np.asarray(mats_big, dtype=np.int64)
    c = np.asarray(coef, dtype=np.int64)
    add = lambda x, y: _badd(x, y, exp, log, zech)
    mul = lambda x, y: _bmul(x, y, exp, log)
    b1 = [t[:, 0], t[:, 3], t[:, 6]]
    b2 = [add(add(mul(t[:, 3 * i], b1[0]), mul(t[:, 3 * i + 1], b1[1])), mul(t[:, 3 * i + 2], b1[2])) for i in range(3)]
    e = [add(mul(c[:, 1], b1[i]), mul(c[:, 2], b2[i])) for i in range(3)]
    e[0] = add(e[0], c[:, 0])
    keys = [_bnormalize_encode(e, exp, log)]
    for _ in range(2):
        e = [_bpow(x, frob_e, exp, log) for x in e]
        keys.append(_bnormalize_encode(e, exp, log))
    return np.sort(np.stack(keys, axis=1), axis=1)


def apply_big(mats_big, vecs, exp, log, zech):
    """Encoded normalized images of big-field vectors, shape (n, m)."""
    t = np.asarray(mats_big, dtype=np.int64)
    out = np.empty((t.shape[0], len(vecs)), dtype=np.int64)
    for j, v in enumerate(vecs):
        img = []
        for i in range(3):
            acc = _bmul(t[:, 3 * i], v[0], exp, log)
            acc = _badd(acc, _bmul(t[:, 3 * i + 1], v[1], exp, log), exp, log, zech)
            acc = _badd(acc, _bmul(t[:, 3 * i + 2], v[2], exp, log), exp, log, zech)
            img.append(acc)
        out[:, j] = _bnormalize_encode(img, exp, log)
    return out
