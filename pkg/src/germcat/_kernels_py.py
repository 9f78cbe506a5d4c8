"""Pure-Python reference kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature and
the same results; ``germcat.kernels`` picks one of them at import time.

Composition tables are square ``int32`` arrays with ``comp[g, f] == g o f`` and
``-1`` for non-composable pairs.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def enumerate_cones(comp, cands, edges, limit=-1):
    """All tuples ``lam`` with ``lam[j] in cands[j]`` and ``comp[u, lam[s]] == lam[t]``
    for every edge ``(s, t, u)``.  Returns an ``(k, len(cands))`` int array."""
    comp = np.asarray(comp)
    n = len(cands)
    cands = [np.asarray(c, dtype=np.int64).tolist() for c in cands]
    edges = [tuple(int(v) for v in e) for e in np.asarray(edges, dtype=np.int64).reshape(-1, 3)]
    # an edge is checked at the later of its two endpoints
    checks: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for s, t, u in edges:
        checks[max(s, t)].append((s, t, u))
    out: list[tuple[int, ...]] = []
    lam = [0] * n

    def rec(j: int) -> bool:
        if j == n:
            out.append(tuple(lam))
            return limit >= 0 and len(out) >= limit
        for a in cands[j]:
            lam[j] = a
            ok = True
            for s, t, u in checks[j]:
                if comp[u, lam[s]] != lam[t]:
                    ok = False
                    break
            if ok and rec(j + 1):
                return True
        return False

    if n == 0:
        out.append(())
    else:
        rec(0)
    return np.array(out, dtype=np.int64).reshape(len(out), n)


def count_cones(comp, cands, edges):
    return int(enumerate_cones(comp, cands, edges).shape[0])


def first_assoc_violation(comp, dom, cod):
    """First composable triple ``(h, g, f)`` with ``h(gf) != (hg)f``, or None."""
    comp = np.asarray(comp)
    n = comp.shape[0]
    dom = np.asarray(dom)
    out_of = [[] for _ in range(int(dom.max()) + 1 if n else 0)]
    for a in range(n):
        out_of[int(dom[a])].append(a)
    for f in range(n):
        y = int(cod[f])
        for g in out_of[y]:
            gf = comp[g, f]
            if gf < 0:
                continue
            for h in out_of[int(cod[g])]:
                hg = comp[h, g]
                if hg < 0:
                    continue
                if comp[h, gf] != comp[hg, f]:
                    return (h, g, f)
    return None


def first_lifting_failure(comp, i, p, hom_ax, hom_by, hom_bx):
    """First commuting square ``(u, v)`` (``p u == v i``) admitting no diagonal
    ``d`` with ``d i == u`` and ``p d == v``; None when ``i`` lifts against ``p``."""
    comp = np.asarray(comp)
    filled = set()
    for d in hom_bx:
        filled.add((int(comp[d, i]), int(comp[p, d])))
    for u in hom_ax:
        pu = comp[p, u]
        for v in hom_by:
            if comp[v, i] == pu and (int(u), int(v)) not in filled:
                return (int(u), int(v))
    return None


def enumerate_simplicial_maps(x_sizes, x_faces, x_degens, y_sizes, y_faces, y_degens, limit=-1):
    """All level-wise maps commuting with faces and degeneracies.

    ``*_faces[m]`` is an ``(m + 1, size_m)`` array (unused for m == 0) and
    ``*_degens[m]`` an ``(m + 1, size_m)`` array for ``m < d``.  Returns a list
    of maps, each a list of per-level int arrays.
    """
    d = len(x_sizes) - 1
    # (level, simplex, [(j, z) with s_j z == simplex])
    slots: list[tuple[int, int, list[tuple[int, int]]]] = []
    for m in range(d + 1):
        source: dict[int, list[tuple[int, int]]] = {}
        if m > 0:
            deg = np.asarray(x_degens[m - 1])
            for j in range(m):
                for z in range(int(x_sizes[m - 1])):
                    source.setdefault(int(deg[j, z]), []).append((j, z))
        for x in range(int(x_sizes[m])):
            slots.append((m, x, source.get(x, [])))
    xf = [np.asarray(a) for a in x_faces]
    yf = [np.asarray(a) for a in y_faces]
    yd = [np.asarray(a) for a in y_degens]
    f = [[-1] * int(s) for s in x_sizes]
    results = []
    total = len(slots)

    def rec(k: int) -> bool:
        if k == total:
            results.append([np.array(level, dtype=np.int64) for level in f])
            return limit >= 0 and len(results) >= limit
        m, x, reps = slots[k]
        if reps:
            forced = {int(yd[m - 1][j, f[m - 1][z]]) for j, z in reps}
            choices = list(forced) if len(forced) == 1 else []
        else:
            choices = range(int(y_sizes[m]))
        for y in choices:
            if m > 0:
                ok = True
                for i in range(m + 1):
                    if yf[m][i, y] != f[m - 1][xf[m][i, x]]:
                        ok = False
                        break
                if not ok:
                    continue
            f[m][x] = y
            if rec(k + 1):
                return True
        f[m][x] = -1
        return False

    rec(0)
    return results
