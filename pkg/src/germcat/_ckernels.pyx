# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of ``germcat._kernels_py``.

Signatures and results match the pure-Python module exactly; the inputs are
converted to contiguous int64 buffers up front.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport free, malloc

BACKEND = "cython"

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32


cdef inline cnp.ndarray _as_i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


cdef inline cnp.ndarray _as_i32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


cdef Py_ssize_t _cone_search(const i32[:, ::1] c, list cands, edges, i64 lim, list out) except -1:
    """Depth-first search shared by ``enumerate_cones`` and ``count_cones``;
    appends each cone to ``out`` unless it is None and returns the count."""
    cdef Py_ssize_t n = len(cands)
    cdef Py_ssize_t j, k, q, total = 0, depth = 0, ne, m = 0
    cdef const i64[::1] col
    cdef cnp.ndarray e_a = _as_i64(edges).reshape(-1, 3)
    cdef const i64[:, ::1] e = e_a
    ne = e.shape[0]
    for j in range(n):
        m += len(cands[j])
    cdef i64* buf = <i64*> malloc((m + 5 * n + 2 + ne) * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    cdef i64* flat = buf
    cdef i64* offs = buf + m
    cdef i64* estart = offs + n + 1
    cdef i64* pos = estart + n + 1
    cdef i64* lam = pos + n
    cdef i64* order = lam + n
    cdef i64 s, t, u, w
    cdef bint ok
    try:
        offs[0] = 0
        for j in range(n):
            col = _as_i64(cands[j]).ravel()
            for k in range(col.shape[0]):
                flat[offs[j] + k] = col[k]
            offs[j + 1] = offs[j] + col.shape[0]
        # bucket the edges by their later endpoint
        for j in range(n + 1):
            estart[j] = 0
        for k in range(ne):
            w = e[k, 0] if e[k, 0] > e[k, 1] else e[k, 1]
            estart[w + 1] += 1
        for j in range(n):
            estart[j + 1] += estart[j]
        for j in range(n):
            pos[j] = estart[j]
        for k in range(ne):
            w = e[k, 0] if e[k, 0] > e[k, 1] else e[k, 1]
            order[pos[w]] = k
            pos[w] += 1
        pos[0] = offs[0]
        while depth >= 0:
            if pos[depth] >= offs[depth + 1]:
                depth -= 1
                if depth >= 0:
                    pos[depth] += 1
                continue
            lam[depth] = flat[pos[depth]]
            ok = True
            for k in range(estart[depth], estart[depth + 1]):
                q = order[k]
                s = e[q, 0]
                t = e[q, 1]
                u = e[q, 2]
                if c[u, lam[s]] != lam[t]:
                    ok = False
                    break
            if not ok:
                pos[depth] += 1
                continue
            if depth == n - 1:
                total += 1
                if out is not None:
                    out.append([lam[j] for j in range(n)])
                if lim >= 0 and total >= lim:
                    break
                pos[depth] += 1
            else:
                depth += 1
                pos[depth] = offs[depth]
    finally:
        free(buf)
    return total


def enumerate_cones(comp, cands, edges, limit=-1):
    cdef Py_ssize_t n = len(cands)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    cdef cnp.ndarray comp_a = _as_i32(comp)
    out = []
    _cone_search(comp_a, list(cands), edges, limit, out)
    return np.array(out, dtype=np.int64).reshape(len(out), n)


def count_cones(comp, cands, edges):
    if len(cands) == 0:
        return 1
    cdef cnp.ndarray comp_a = _as_i32(comp)
    return int(_cone_search(comp_a, list(cands), edges, -1, None))


def first_assoc_violation(comp, dom, cod):
    cdef cnp.ndarray comp_a = _as_i32(comp)
    cdef const i32[:, ::1] c = comp_a
    cdef const i64[::1] dm = _as_i64(dom)
    cdef const i64[::1] cd = _as_i64(cod)
    cdef Py_ssize_t n = c.shape[0]
    if n == 0:
        return None
    cdef cnp.ndarray order_a = np.argsort(np.asarray(dm), kind="stable").astype(np.int64)
    cdef i64[::1] order = order_a
    cdef Py_ssize_t nobj = int(np.asarray(dm).max()) + 1
    cdef cnp.ndarray start_a = np.zeros(nobj + 1, dtype=np.int64)
    cdef i64[::1] start = start_a
    cdef Py_ssize_t a, f, gi, hi, g, h
    cdef i32 gf, hg
    for a in range(n):
        start[dm[a] + 1] += 1
    for a in range(nobj):
        start[a + 1] += start[a]
    for f in range(n):
        for gi in range(start[cd[f]], start[cd[f] + 1]):
            g = order[gi]
            gf = c[g, f]
            if gf < 0:
                continue
            for hi in range(start[cd[g]], start[cd[g] + 1]):
                h = order[hi]
                hg = c[h, g]
                if hg < 0:
                    continue
                if c[h, gf] != c[hg, f]:
                    return (h, g, f)
    return None


def first_lifting_failure(comp, i, p, hom_ax, hom_by, hom_bx):
    cdef cnp.ndarray comp_a = _as_i32(comp)
    cdef const i32[:, ::1] c = comp_a
    cdef const i64[::1] ax = _as_i64(hom_ax)
    cdef const i64[::1] by = _as_i64(hom_by)
    cdef const i64[::1] bx = _as_i64(hom_bx)
    cdef i64 ii = i, pp = p
    cdef Py_ssize_t nax = ax.shape[0], nby = by.shape[0], nbx = bx.shape[0]
    cdef Py_ssize_t a, b, k
    cdef i64 u, v, pu
    cdef bint found
    for a in range(nax):
        u = ax[a]
        pu = c[pp, u]
        for b in range(nby):
            v = by[b]
            if c[v, ii] != pu:
                continue
            found = False
            for k in range(nbx):
                if c[bx[k], ii] == u and c[pp, bx[k]] == v:
                    found = True
                    break
            if not found:
                return (int(u), int(v))
    return None


def enumerate_simplicial_maps(x_sizes, x_faces, x_degens, y_sizes, y_faces, y_degens, limit=-1):
    cdef Py_ssize_t d = len(x_sizes) - 1
    cdef Py_ssize_t m, j, z, x, i, k
    # flatten slots: level, simplex, representation range
    slot_level = []
    slot_x = []
    rep_start = [0]
    rep_j = []
    rep_z = []
    for m in range(d + 1):
        source = {}
        if m > 0:
            deg = np.asarray(x_degens[m - 1])
            for j in range(m):
                for z in range(int(x_sizes[m - 1])):
                    source.setdefault(int(deg[j, z]), []).append((j, z))
        for x in range(int(x_sizes[m])):
            slot_level.append(m)
            slot_x.append(x)
            for j, z in source.get(x, []):
                rep_j.append(j)
                rep_z.append(z)
            rep_start.append(len(rep_j))
    cdef Py_ssize_t total = len(slot_level)
    cdef i64[::1] sl = np.asarray(slot_level, dtype=np.int64)
    cdef i64[::1] sx = np.asarray(slot_x, dtype=np.int64)
    cdef i64[::1] rs = np.asarray(rep_start, dtype=np.int64)
    cdef i64[::1] rj = np.asarray(rep_j + [0], dtype=np.int64)
    cdef i64[::1] rz = np.asarray(rep_z + [0], dtype=np.int64)
    # level offsets into flat per-simplex storage
    cdef cnp.ndarray xoff_a = np.zeros(d + 2, dtype=np.int64)
    cdef cnp.ndarray yoff_a = np.zeros(d + 2, dtype=np.int64)
    cdef i64[::1] xoff = xoff_a
    cdef i64[::1] yoff = yoff_a
    for m in range(d + 1):
        xoff[m + 1] = xoff[m] + int(x_sizes[m])
        yoff[m + 1] = yoff[m] + int(y_sizes[m])
    cdef Py_ssize_t maxm = d + 1
    # faces: [flat simplex, i] -> index in previous level; degens likewise
    cdef cnp.ndarray xf_a = np.full((max(xoff[d + 1], 1), maxm + 1), -1, dtype=np.int64)
    cdef cnp.ndarray yf_a = np.full((max(yoff[d + 1], 1), maxm + 1), -1, dtype=np.int64)
    cdef cnp.ndarray yd_a = np.full((max(yoff[d + 1], 1), maxm + 1), -1, dtype=np.int64)
    for m in range(1, d + 1):
        if int(x_sizes[m]):
            xf_a[xoff[m]:xoff[m + 1], : m + 1] = np.asarray(x_faces[m]).T
        if int(y_sizes[m]):
            yf_a[yoff[m]:yoff[m + 1], : m + 1] = np.asarray(y_faces[m]).T
    for m in range(d):
        if int(y_sizes[m]):
            yd_a[yoff[m]:yoff[m + 1], : m + 1] = np.asarray(y_degens[m]).T
    cdef i64[:, ::1] xf = xf_a
    cdef i64[:, ::1] yf = yf_a
    cdef i64[:, ::1] yd = yd_a
    cdef cnp.ndarray f_a = np.full(max(xoff[d + 1], 1), -1, dtype=np.int64)
    cdef i64[::1] f = f_a
    cdef cnp.ndarray cur_a = np.zeros(total + 1, dtype=np.int64)
    cdef cnp.ndarray end_a = np.zeros(total + 1, dtype=np.int64)
    cdef i64[::1] cur = cur_a
    cdef i64[::1] end = end_a
    cdef i64 lim = limit
    results = []
    if total == 0:
        return [[np.zeros(0, dtype=np.int64) for _ in range(d + 1)]]
    cdef Py_ssize_t depth = 0
    cdef i64 y, forced, val
    cdef bint ok, fresh = True
    while depth >= 0:
        m = sl[depth]
        x = sx[depth]
        if fresh:
            if rs[depth + 1] > rs[depth]:
                forced = yd[yoff[m - 1] + f[xoff[m - 1] + rz[rs[depth]]], rj[rs[depth]]]
                ok = True
                for k in range(rs[depth] + 1, rs[depth + 1]):
                    val = yd[yoff[m - 1] + f[xoff[m - 1] + rz[k]], rj[k]]
                    if val != forced:
                        ok = False
                        break
                if ok:
                    cur[depth] = forced
                    end[depth] = forced + 1
                else:
                    cur[depth] = 0
                    end[depth] = 0
            else:
                cur[depth] = 0
                end[depth] = int(y_sizes[m])
            fresh = False
        if cur[depth] >= end[depth]:
            f[xoff[m] + x] = -1
            depth -= 1
            if depth >= 0:
                cur[depth] += 1
            continue
        y = cur[depth]
        ok = True
        if m > 0:
            for i in range(m + 1):
                if yf[yoff[m] + y, i] != f[xoff[m - 1] + xf[xoff[m] + x, i]]:
                    ok = False
                    break
        if not ok:
            cur[depth] += 1
            continue
        f[xoff[m] + x] = y
        if depth == total - 1:
            results.append([f_a[xoff[k]:xoff[k + 1]].copy() for k in range(d + 1)])
            if lim >= 0 and len(results) >= lim:
                break
            cur[depth] += 1
        else:
            depth += 1
            fresh = True
    return results
