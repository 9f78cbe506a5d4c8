"""Independent reference computations used to derive frozen test values.

Nothing here imports the search machinery under test: every oracle works from
raw definitions with plain loops.
"""
from __future__ import annotations

import itertools
from math import comb


# ---------------------------------------------------------------------------
# categories


def arrows_between(C, x, y):
    return [f for f in range(C.n_arrows) if C.dom[f] == x and C.cod[f] == y]


def comp(C, g, f):
    return int(C.comp[g, f])


def is_product_naive(C, x, y, p, p1, p2):
    """Universal property of ``(p, p1, p2)`` checked against every span."""
    for z in range(C.n_objects):
        for f in arrows_between(C, z, x):
            for g in arrows_between(C, z, y):
                hs = [h for h in arrows_between(C, z, p) if comp(C, p1, h) == f and comp(C, p2, h) == g]
                if len(hs) != 1:
                    return False
    return True


def has_product_naive(C, x, y):
    for p in range(C.n_objects):
        for p1 in arrows_between(C, p, x):
            for p2 in arrows_between(C, p, y):
                if is_product_naive(C, x, y, p, p1, p2):
                    return True
    return False


def is_terminal_naive(C, t):
    return all(len(arrows_between(C, x, t)) == 1 for x in range(C.n_objects))


def is_mono_naive(C, f):
    x = C.dom[f]
    for z in range(C.n_objects):
        hs = arrows_between(C, z, x)
        for a, b in itertools.combinations(hs, 2):
            if comp(C, f, a) == comp(C, f, b):
                return False
    return True


def lifts_naive(C, i, p):
    """Does ``i`` have the left lifting property against ``p``?"""
    A, B, X, Y = C.dom[i], C.cod[i], C.dom[p], C.cod[p]
    for u in arrows_between(C, A, X):
        for v in arrows_between(C, B, Y):
            if comp(C, p, u) != comp(C, v, i):
                continue
            if not any(
                comp(C, h, i) == u and comp(C, p, h) == v for h in arrows_between(C, B, X)
            ):
                return False
    return True


# ---------------------------------------------------------------------------
# filters


def leq_from_arrows(C):
    n = C.n_objects
    rel = [[False] * n for _ in range(n)]
    for f in range(C.n_arrows):
        rel[C.dom[f]][C.cod[f]] = True
    return rel


def is_filter_naive(C, subset_names):
    """Three clauses on a thin category: non-empty, upward closed, and any two
    members have a common lower bound inside the set."""
    rel = leq_from_arrows(C)
    S = {C.objects.index(s) for s in subset_names}
    if not S:
        return False
    for x in S:
        for y in range(C.n_objects):
            if rel[x][y] and y not in S:
                return False
    for x in S:
        for y in S:
            if not any(rel[z][x] and rel[z][y] for z in S):
                return False
    return True


# ---------------------------------------------------------------------------
# simplicial sets, as dicts of level lists with explicit face/degeneracy maps


def monotone(m, n):
    return [s for s in itertools.product(range(n + 1), repeat=m + 1) if all(a <= b for a, b in zip(s, s[1:]))]


def surjective_count(m, n):
    """Monotone surjections [m] -> [n]: choose the n jump positions."""
    return comb(m, n)


def simplex_levels(n, d):
    return [comb(n + m + 1, m + 1) for m in range(d + 1)]


def boundary_levels(n, d):
    return [comb(n + m + 1, m + 1) - surjective_count(m, n) for m in range(d + 1)]


def quotient_sphere_levels(n, d):
    """``Delta[n] / dDelta[n]`` as a pointed quotient: the surjective simplices
    plus one base point per level."""
    return [surjective_count(m, n) + 1 for m in range(d + 1)]


def brute_levels(n, d, keep):
    return [sum(1 for s in monotone(m, n) if keep(s)) for m in range(d + 1)]


def family_levels(ctor, k, d):
    if ctor == "constant":
        return [k] * (d + 1)
    if ctor == "simplex":
        return simplex_levels(k, d)
    return quotient_sphere_levels(k, d)


def levelwise_constant(levels, m):
    return all(levels[j] == levels[0] for j in range(m + 1))


def direct_frechet_discrete(family_value, N=40, M=8):
    """For each level ``m <= M``: do all indices in the back half of the window
    have a levelwise-constant object through ``m``?"""
    for m in range(M + 1):
        good = {n for n in range(N + 1) if levelwise_constant(family_levels(*family_value(n), m), m)}
        if not set(range(N // 2, N + 1)) <= good:
            return False
    return True


def dn_direct(ctor, k, n):
    """The d_n rule from level sizes: n for a discrete object, otherwise the
    last level where the object is still levelwise constant."""
    if ctor == "constant" or k == 0:
        return n
    d = k + 2
    levels = family_levels(ctor, k, d)
    m = 0
    while m + 1 <= d and levels[m + 1] == levels[0]:
        m += 1
    return m


def brute_hom_count(X, Y):
    """Simplicial maps by trying every levelwise function (tiny inputs only)."""
    d = X.d
    spaces = [itertools.product(range(Y.sizes[m]), repeat=X.sizes[m]) for m in range(d + 1)]
    count = 0
    for f in itertools.product(*spaces):
        ok = True
        for m in range(1, d + 1):
            for i in range(m + 1):
                for x in range(X.sizes[m]):
                    if f[m - 1][X.faces[m][i, x]] != Y.faces[m][i, f[m][x]]:
                        ok = False
        for m in range(d):
            for j in range(m + 1):
                for x in range(X.sizes[m]):
                    if f[m + 1][X.degens[m][j, x]] != Y.degens[m][j, f[m][x]]:
                        ok = False
        count += ok
    return count
