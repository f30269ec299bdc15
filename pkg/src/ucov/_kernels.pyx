# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``ucov._fallback`` (same signatures, same results)."""

import numpy as np
from libc.stdint cimport uint8_t, int64_t, int32_t, int8_t, int16_t

ctypedef uint8_t u8


def _u8(x):
    return np.ascontiguousarray(x, dtype=np.uint8)


def _i64(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def mat_mul(a, b, add, mul):
    cdef const u8[:, ::1] A = _u8(a)
    cdef const u8[:, ::1] B = _u8(b)
    cdef const u8[:, ::1] AD = _u8(add)
    cdef const u8[:, ::1] MU = _u8(mul)
    cdef Py_ssize_t n = max(A.shape[0], B.shape[0])
    cdef Py_ssize_t sa = 0 if A.shape[0] == 1 else 1
    cdef Py_ssize_t sb = 0 if B.shape[0] == 1 else 1
    out = np.empty((n, 9), dtype=np.uint8)
    cdef u8[:, ::1] O = out
    cdef Py_ssize_t r, i, j, ra, rb
    cdef u8 acc
    with nogil:
        for r in range(n):
            ra = r * sa
            rb = r * sb
            for i in range(3):
                for j in range(3):
                    acc = MU[A[ra, 3 * i], B[rb, j]]
                    acc = AD[acc, MU[A[ra, 3 * i + 1], B[rb, 3 + j]]]
                    acc = AD[acc, MU[A[ra, 3 * i + 2], B[rb, 6 + j]]]
                    O[r, 3 * i + j] = acc
    return out


def mat_apply(mats, vecs, add, mul):
    cdef const u8[:, ::1] M = _u8(mats)
    cdef const u8[:, ::1] V = _u8(vecs)
    cdef const u8[:, ::1] AD = _u8(add)
    cdef const u8[:, ::1] MU = _u8(mul)
    cdef Py_ssize_t n = M.shape[0], m = V.shape[0]
    out = np.empty((n, m, 3), dtype=np.uint8)
    cdef u8[:, :, ::1] O = out
    cdef Py_ssize_t r, j, i
    cdef u8 acc
    with nogil:
        for r in range(n):
            for j in range(m):
                for i in range(3):
                    acc = MU[M[r, 3 * i], V[j, 0]]
                    acc = AD[acc, MU[M[r, 3 * i + 1], V[j, 1]]]
                    acc = AD[acc, MU[M[r, 3 * i + 2], V[j, 2]]]
                    O[r, j, i] = acc
    return out


def canon(mats, scalars, mul, qq):
    cdef const u8[:, ::1] M = _u8(mats)
    cdef const u8[:, ::1] MU = _u8(mul)
    cdef int64_t[::1] W = _i64(list(scalars))
    cdef Py_ssize_t n = M.shape[0], nw = W.shape[0]
    cdef int64_t Q = qq
    best = np.empty((n, 9), dtype=np.uint8)
    keys = np.empty(n, dtype=np.int64)
    cdef u8[:, ::1] B = best
    cdef int64_t[::1] K = keys
    cdef Py_ssize_t r, s, k, bs
    cdef int64_t key, bk
    cdef u8 w
    with nogil:
        for r in range(n):
            bk = -1
            bs = 0
            for s in range(nw):
                w = <u8>W[s]
                key = 0
                for k in range(9):
                    key = key * Q + MU[M[r, k], w]
                if bk < 0 or key < bk:
                    bk = key
                    bs = s
            w = <u8>W[bs]
            for k in range(9):
                B[r, k] = MU[M[r, k], w]
            K[r] = bk
    return best, keys


def su3_frames(norm1, add, mul, conj, neg):
    cdef const u8[:, ::1] V = _u8(norm1)
    cdef const u8[:, ::1] AD = _u8(add)
    cdef const u8[:, ::1] MU = _u8(mul)
    cdef const u8[::1] CJ = _u8(conj)
    cdef const u8[::1] NG = _u8(neg)
    cdef Py_ssize_t n1 = V.shape[0]
    cdef Py_ssize_t a, b, cnt = 0
    cdef u8 f, x0, x1, x2, p0, p1, p2, q0, q1, q2
    # first pass counts
    with nogil:
        for a in range(n1):
            p0 = CJ[V[a, 0]]; p1 = CJ[V[a, 1]]; p2 = CJ[V[a, 2]]
            for b in range(n1):
                f = AD[AD[MU[V[b, 0], p0], MU[V[b, 1], p1]], MU[V[b, 2], p2]]
                if f == 0:
                    cnt += 1
    out = np.empty((cnt, 9), dtype=np.uint8)
    cdef u8[:, ::1] O = out
    cdef Py_ssize_t r = 0
    with nogil:
        for a in range(n1):
            p0 = CJ[V[a, 0]]; p1 = CJ[V[a, 1]]; p2 = CJ[V[a, 2]]
            for b in range(n1):
                f = AD[AD[MU[V[b, 0], p0], MU[V[b, 1], p1]], MU[V[b, 2], p2]]
                if f != 0:
                    continue
                q0 = CJ[V[b, 0]]; q1 = CJ[V[b, 1]]; q2 = CJ[V[b, 2]]
                x0 = AD[MU[p1, q2], NG[MU[p2, q1]]]
                x1 = AD[MU[p2, q0], NG[MU[p0, q2]]]
                x2 = AD[MU[p0, q1], NG[MU[p1, q0]]]
                O[r, 0] = V[a, 0]; O[r, 3] = V[a, 1]; O[r, 6] = V[a, 2]
                O[r, 1] = V[b, 0]; O[r, 4] = V[b, 1]; O[r, 7] = V[b, 2]
                O[r, 2] = x0; O[r, 5] = x1; O[r, 8] = x2
                r += 1
    return out


cdef inline int64_t _point_id(int64_t c0, int64_t c1, int64_t c2,
                              const u8[::1] INV, const u8[:, ::1] MU,
                              const int32_t[::1] LOOK, int64_t Q) noexcept nogil:
    cdef int64_t lead
    if c0 != 0:
        lead = c0
    elif c1 != 0:
        lead = c1
    elif c2 != 0:
        lead = c2
    else:
        return -1
    cdef u8 s = INV[lead]
    return LOOK[(MU[c0, s] * Q + MU[c1, s]) * Q + MU[c2, s]]


def classify_batch(mats, add, mul, neg, inv, roots, lookup, line_abs, absolute):
    cdef const u8[:, ::1] M = _u8(mats)
    cdef const u8[:, ::1] AD = _u8(add)
    cdef const u8[:, ::1] MU = _u8(mul)
    cdef const u8[::1] NG = _u8(neg)
    cdef const u8[::1] INV = _u8(inv)
    cdef const int16_t[:, ::1] R = np.ascontiguousarray(roots, dtype=np.int16)
    cdef const int32_t[::1] LOOK = np.ascontiguousarray(lookup, dtype=np.int32)
    cdef const int32_t[::1] LABS = np.ascontiguousarray(line_abs, dtype=np.int32)
    cdef const u8[::1] ABS = _u8(absolute)
    cdef Py_ssize_t n = M.shape[0]
    cdef int64_t Q = AD.shape[0]
    etype_a = np.zeros(n, dtype=np.int8)
    fix_a = np.full((n, 3), -1, dtype=np.int32)
    cdef int8_t[::1] ET = etype_a
    cdef int32_t[:, ::1] FX = fix_a
    cdef int32_t first_abs = int(np.flatnonzero(np.asarray(absolute))[0])
    cdef Py_ssize_t r, s, i
    cdef u8 tr, s2, lam, nl
    cdef u8 k[9]
    cdef int64_t pid, lid, abs_pt, t
    cdef int64_t verts[3]
    cdef int nvert
    cdef u8 c0, c1, c2
    with nogil:
        for r in range(n):
            tr = AD[AD[M[r, 0], M[r, 4]], M[r, 8]]
            s2 = AD[AD[AD[MU[M[r, 0], M[r, 4]], NG[MU[M[r, 1], M[r, 3]]]],
                       AD[MU[M[r, 0], M[r, 8]], NG[MU[M[r, 2], M[r, 6]]]]],
                    AD[MU[M[r, 4], M[r, 8]], NG[MU[M[r, 5], M[r, 7]]]]]
            if R[tr * Q + s2, 0] < 0:
                ET[r] = 3
                continue
            abs_pt = -1
            nvert = 0
            for s in range(3):
                if R[tr * Q + s2, s] < 0:
                    break
                lam = <u8>R[tr * Q + s2, s]
                nl = NG[lam]
                for i in range(9):
                    k[i] = M[r, i]
                k[0] = AD[k[0], nl]; k[4] = AD[k[4], nl]; k[8] = AD[k[8], nl]
                # cross products of row pairs
                c0 = AD[MU[k[1], k[5]], NG[MU[k[2], k[4]]]]
                c1 = AD[MU[k[2], k[3]], NG[MU[k[0], k[5]]]]
                c2 = AD[MU[k[0], k[4]], NG[MU[k[1], k[3]]]]
                if c0 == 0 and c1 == 0 and c2 == 0:
                    c0 = AD[MU[k[1], k[8]], NG[MU[k[2], k[7]]]]
                    c1 = AD[MU[k[2], k[6]], NG[MU[k[0], k[8]]]]
                    c2 = AD[MU[k[0], k[7]], NG[MU[k[1], k[6]]]]
                    if c0 == 0 and c1 == 0 and c2 == 0:
                        c0 = AD[MU[k[4], k[8]], NG[MU[k[5], k[7]]]]
                        c1 = AD[MU[k[5], k[6]], NG[MU[k[3], k[8]]]]
                        c2 = AD[MU[k[3], k[7]], NG[MU[k[4], k[6]]]]
                pid = _point_id(c0, c1, c2, INV, MU, LOOK, Q)
                if pid < 0:
                    if k[0] != 0 or k[1] != 0 or k[2] != 0:
                        lid = _point_id(k[0], k[1], k[2], INV, MU, LOOK, Q)
                    elif k[3] != 0 or k[4] != 0 or k[5] != 0:
                        lid = _point_id(k[3], k[4], k[5], INV, MU, LOOK, Q)
                    else:
                        lid = _point_id(k[6], k[7], k[8], INV, MU, LOOK, Q)
                    if lid < 0:
                        t = first_abs
                    else:
                        t = LABS[lid]
                    if abs_pt < 0:
                        abs_pt = t
                elif ABS[pid]:
                    if abs_pt < 0:
                        abs_pt = pid
                else:
                    verts[nvert] = pid
                    nvert += 1
            if abs_pt >= 0:
                ET[r] = 1
                FX[r, 0] = <int32_t>abs_pt
            elif nvert == 3:
                ET[r] = 2
                # sort three
                if verts[0] > verts[1]:
                    t = verts[0]; verts[0] = verts[1]; verts[1] = t
                if verts[1] > verts[2]:
                    t = verts[1]; verts[1] = verts[2]; verts[2] = t
                if verts[0] > verts[1]:
                    t = verts[0]; verts[0] = verts[1]; verts[1] = t
                FX[r, 0] = <int32_t>verts[0]
                FX[r, 1] = <int32_t>verts[1]
                FX[r, 2] = <int32_t>verts[2]
            else:
                ET[r] = 0
    return etype_a, fix_a


# ---------------------------------------------------------------------------
# GF(q^6)

cdef inline int64_t _bmul(int64_t a, int64_t b, const int64_t[::1] EXP,
                          const int64_t[::1] LOG) noexcept nogil:
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


cdef inline int64_t _badd(int64_t a, int64_t b, const int64_t[::1] EXP,
                          const int64_t[::1] LOG, const int64_t[::1] ZECH,
                          int64_t n1) noexcept nogil:
    if a == 0:
        return b
    if b == 0:
        return a
    cdef int64_t la = LOG[a]
    cdef int64_t d = LOG[b] - la
    if d < 0:
        d += n1
    cdef int64_t z = ZECH[d]
    if z < 0:
        return 0
    return EXP[la + z]


cdef inline int64_t _bpow(int64_t a, int64_t e, const int64_t[::1] EXP,
                          const int64_t[::1] LOG, int64_t n1) noexcept nogil:
    if a == 0:
        return 0
    return EXP[(LOG[a] * e) % n1]


cdef inline int64_t _bencode(int64_t v0, int64_t v1, int64_t v2, const int64_t[::1] EXP,
                             const int64_t[::1] LOG, int64_t n) noexcept nogil:
    cdef int64_t lead
    cdef int64_t n1 = n - 1
    if v0 != 0:
        lead = v0
    elif v1 != 0:
        lead = v1
    else:
        lead = v2
    cdef int64_t il = EXP[(n1 - LOG[lead]) % n1]
    return (_bmul(v0, il, EXP, LOG) * n + _bmul(v1, il, EXP, LOG)) * n + _bmul(v2, il, EXP, LOG)


def imag_vertices(mats_big, coef, frob_e, exp, log, zech):
    cdef const int64_t[:, ::1] T = _i64(mats_big)
    cdef const int64_t[:, ::1] C = _i64(coef)
    cdef const int64_t[::1] EXP = _i64(exp)
    cdef const int64_t[::1] LOG = _i64(log)
    cdef const int64_t[::1] ZECH = _i64(zech)
    cdef int64_t n = LOG.shape[0]
    cdef int64_t n1 = n - 1
    cdef int64_t fe = frob_e
    cdef Py_ssize_t m = T.shape[0], r, i, j
    out = np.empty((m, 3), dtype=np.int64)
    cdef int64_t[:, ::1] O = out
    cdef int64_t b1[3]
    cdef int64_t b2[3]
    cdef int64_t e[3]
    cdef int64_t ks[3]
    cdef int64_t t
    with nogil:
        for r in range(m):
            b1[0] = T[r, 0]; b1[1] = T[r, 3]; b1[2] = T[r, 6]
            for i in range(3):
                b2[i] = _badd(_badd(_bmul(T[r, 3 * i], b1[0], EXP, LOG),
                                    _bmul(T[r, 3 * i + 1], b1[1], EXP, LOG), EXP, LOG, ZECH, n1),
                              _bmul(T[r, 3 * i + 2], b1[2], EXP, LOG), EXP, LOG, ZECH, n1)
                e[i] = _badd(_bmul(C[r, 1], b1[i], EXP, LOG), _bmul(C[r, 2], b2[i], EXP, LOG),
                             EXP, LOG, ZECH, n1)
            e[0] = _badd(e[0], C[r, 0], EXP, LOG, ZECH, n1)
            ks[0] = _bencode(e[0], e[1], e[2], EXP, LOG, n)
            for j in range(1, 3):
                for i in range(3):
                    e[i] = _bpow(e[i], fe, EXP, LOG, n1)
                ks[j] = _bencode(e[0], e[1], e[2], EXP, LOG, n)
            if ks[0] > ks[1]:
                t = ks[0]; ks[0] = ks[1]; ks[1] = t
            if ks[1] > ks[2]:
                t = ks[1]; ks[1] = ks[2]; ks[2] = t
            if ks[0] > ks[1]:
                t = ks[0]; ks[0] = ks[1]; ks[1] = t
            O[r, 0] = ks[0]; O[r, 1] = ks[1]; O[r, 2] = ks[2]
    return out


def apply_big(mats_big, vecs, exp, log, zech):
    cdef const int64_t[:, ::1] T = _i64(mats_big)
    cdef const int64_t[:, ::1] V = _i64(vecs)
    cdef const int64_t[::1] EXP = _i64(exp)
    cdef const int64_t[::1] LOG = _i64(log)
    cdef const int64_t[::1] ZECH = _i64(zech)
    cdef int64_t n = LOG.shape[0]
    cdef int64_t n1 = n - 1
    cdef Py_ssize_t m = T.shape[0], nv = V.shape[0], r, j, i
    out = np.empty((m, nv), dtype=np.int64)
    cdef int64_t[:, ::1] O = out
    cdef int64_t img[3]
    with nogil:
        for r in range(m):
            for j in range(nv):
                for i in range(3):
                    img[i] = _badd(_badd(_bmul(T[r, 3 * i], V[j, 0], EXP, LOG),
                                         _bmul(T[r, 3 * i + 1], V[j, 1], EXP, LOG), EXP, LOG, ZECH, n1),
                                   _bmul(T[r, 3 * i + 2], V[j, 2], EXP, LOG), EXP, LOG, ZECH, n1)
                O[r, j] = _bencode(img[0], img[1], img[2], EXP, LOG, n)
    return out
