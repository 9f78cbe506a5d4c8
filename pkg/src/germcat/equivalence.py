"""Search for equivalences of finite categories.

Both categories are reduced to skeleta (one object per isomorphism class), an
isomorphism of skeleta is found by backtracking with composition propagation,
and the two functors are assembled through the chosen isomorphisms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fincat import FiniteCategory, Functor
from .report import Report

__all__ = ["Equivalence", "find_equivalence", "find_isomorphism", "skeleton"]


@dataclass
class Skeleton:
    category: FiniteCategory
    reps: list[int]
    rep_of: np.ndarray  # object -> index into reps
    to_rep: np.ndarray  # object -> iso x -> rep(x)
    from_rep: np.ndarray  # object -> iso rep(x) -> x


def skeleton(C: FiniteCategory) -> Skeleton:
    groups = C.iso_classes()
    reps = [g[0] for g in groups]
    rep_of = np.empty(C.n_objects, dtype=np.int64)
    to_rep = np.empty(C.n_objects, dtype=np.int64)
    from_rep = np.empty(C.n_objects, dtype=np.int64)
    iso = C.iso_mask()
    for gi, grp in enumerate(groups):
        for x in grp:
            rep_of[x] = gi
            H = C.hom(x, grp[0])
            f = C.identity(x) if x == grp[0] else int(H[iso[H]][0])
            to_rep[x] = f
            from_rep[x] = C.inverse(f)
    return Skeleton(C, reps, rep_of, to_rep, from_rep)


def _object_signature(sizes: np.ndarray, i: int) -> tuple:
    return (int(sizes[i, i]), tuple(sorted(sizes[i])), tuple(sorted(sizes[:, i])))


def _object_maps(SA: np.ndarray, SB: np.ndarray):
    """Bijections ``p`` with ``SA[i, j] == SB[p[i], p[j]]``."""
    n = len(SA)
    if n != len(SB):
        return
    sig_a = [_object_signature(SA, i) for i in range(n)]
    sig_b = [_object_signature(SB, i) for i in range(n)]
    p = [-1] * n
    used = [False] * n

    def rec(i: int):
        if i == n:
            yield list(p)
            return
        for j in range(n):
            if used[j] or sig_a[i] != sig_b[j]:
                continue
            if any(SA[i, k] != SB[j, p[k]] or SA[k, i] != SB[p[k], j] for k in range(i)):
                continue
            if SA[i, i] != SB[j, j]:
                continue
            p[i], used[j] = j, True
            yield from rec(i + 1)
            p[i], used[j] = -1, False

    yield from rec(0)


def _arrow_iso(A: FiniteCategory, B: FiniteCategory, p: list[int]) -> np.ndarray | None:
    """An arrow bijection over the object bijection ``p`` respecting
    composition, or None."""
    na = A.n_arrows
    F = np.full(na, -1, dtype=np.int64)
    used = np.zeros(B.n_arrows, dtype=bool)
    trail: list[int] = []
    Acomp, Bcomp = A.comp, B.comp
    # composable partners of each arrow
    left = [np.flatnonzero(Acomp[:, a] >= 0) for a in range(na)]  # g with g o a
    right = [np.flatnonzero(Acomp[a, :] >= 0) for a in range(na)]  # f with a o f

    def assign(a: int, b: int) -> bool:
        queue = [(a, b)]
        while queue:
            a, b = queue.pop()
            if F[a] >= 0:
                if F[a] != b:
                    return False
                continue
            if used[b]:
                return False
            F[a] = b
            used[b] = True
            trail.append(a)
            for g in left[a]:
                if F[g] >= 0:
                    queue.append((int(Acomp[g, a]), int(Bcomp[F[g], b])))
            for f in right[a]:
                if F[f] >= 0:
                    queue.append((int(Acomp[a, f]), int(Bcomp[b, F[f]])))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            a = trail.pop()
            used[F[a]] = False
            F[a] = -1

    for x in range(A.n_objects):
        if not assign(int(A.ident[x]), int(B.ident[p[x]])):
            return None
    # larger hom-sets first: their constraints propagate furthest
    order = sorted(range(na), key=lambda a: -len(A.hom(int(A.dom[a]), int(A.cod[a]))))

    def rec(k: int) -> bool:
        while k < na and F[order[k]] >= 0:
            k += 1
        if k == na:
            return True
        a = order[k]
        for b in B.hom(p[int(A.dom[a])], p[int(A.cod[a])]):
            if used[b]:
                continue
            mark = len(trail)
            if assign(a, int(b)) and rec(k + 1):
                return True
            undo(mark)
        return False

    return F if rec(0) else None


def find_isomorphism(A: FiniteCategory, B: FiniteCategory) -> Functor | None:
    """An isomorphism of categories ``A -> B``, or None."""
    if A.n_objects != B.n_objects or A.n_arrows != B.n_arrows:
        return None
    for p in _object_maps(A.hom_sizes(), B.hom_sizes()):
        F = _arrow_iso(A, B, p)
        if F is not None:
            return Functor(A, B, p, F, name="iso")
    return None


@dataclass
class Equivalence:
    F: Functor
    G: Functor
    unit: np.ndarray  # x -> iso x -> G F x
    counit: np.ndarray  # y -> iso F G y -> y
    report: Report


def find_equivalence(C: FiniteCategory, D: FiniteCategory) -> Equivalence | None:
    """Functors ``F: C -> D``, ``G: D -> C`` with natural isomorphisms
    ``id => GF`` and ``FG => id``, verified exhaustively; None if the
    skeleta are not isomorphic."""
    sc, sd = skeleton(C), skeleton(D)
    A, _ = C.full_subcategory(sc.reps, name=f"sk({C.name})")
    B, _ = D.full_subcategory(sd.reps, name=f"sk({D.name})")
    iso = find_isomorphism(A, B)
    if iso is None:
        return None
    inv_obj = np.argsort(iso.obj_map)
    inv_arr = np.argsort(iso.arr_map)
    # skeleton arrows are indexed by position in the full subcategory
    a_pos = _subcategory_positions(C, sc.reps)
    b_pos = _subcategory_positions(D, sd.reps)
    a_arrows = np.array([C.arr(n) for n in A.arrows], dtype=np.int64)
    b_arrows = np.array([D.arr(n) for n in B.arrows], dtype=np.int64)

    def transport(X: FiniteCategory, sk: Skeleton, pos: dict[int, int], tgt_arrows: np.ndarray, amap: np.ndarray,
                  omap: np.ndarray, tgt_reps: list[int]):
        om = np.array([tgt_reps[omap[sk.rep_of[x]]] for x in range(X.n_objects)], dtype=np.int64)
        am = np.empty(X.n_arrows, dtype=np.int64)
        for f in range(X.n_arrows):
            x, y = int(X.dom[f]), int(X.cod[f])
            core = X.compose(int(sk.to_rep[y]), f, int(sk.from_rep[x]))
            am[f] = tgt_arrows[amap[pos[core]]]
        return om, am

    fo, fa = transport(C, sc, a_pos, b_arrows, iso.arr_map, iso.obj_map, sd.reps)
    go, ga = transport(D, sd, b_pos, a_arrows, inv_arr, inv_obj, sc.reps)
    F = Functor(C, D, fo, fa, name="F")
    G = Functor(D, C, go, ga, name="G")
    unit = sc.to_rep.copy()  # x -> rep(x) == G F x
    counit = sd.from_rep.copy()  # rep(y) == F G y -> y
    rep = verify_equivalence(F, G, unit, counit)
    return Equivalence(F, G, unit, counit, rep)


def _subcategory_positions(C: FiniteCategory, reps: list[int]) -> dict[int, int]:
    A, inc = C.full_subcategory(reps)
    return {int(a): i for i, a in enumerate(inc.arr_map)}


def verify_equivalence(F: Functor, G: Functor, unit: np.ndarray, counit: np.ndarray) -> Report:
    C, D = F.source, F.target
    rep = Report("equivalence")
    rep.extend(F.check(), prefix="F: ")
    rep.extend(G.check(), prefix="G: ")
    GF = F.then(G)
    FG = G.then(F)
    bad = []
    for x in range(C.n_objects):
        u = int(unit[x])
        if C.dom[u] != x or C.cod[u] != GF.obj_map[x] or not C.is_iso(u):
            bad.append(C.objects[x])
    for f in range(C.n_arrows):
        x, y = int(C.dom[f]), int(C.cod[f])
        if C.comp[unit[y], f] != C.comp[GF.arr_map[f], unit[x]]:
            bad.append(C.arrows[f])
            break
    rep.add("unit is a natural isomorphism", not bad, bad, anchor="equivalence")
    bad = []
    for y in range(D.n_objects):
        c = int(counit[y])
        if D.dom[c] != FG.obj_map[y] or D.cod[c] != y or not D.is_iso(c):
            bad.append(D.objects[y])
    for g in range(D.n_arrows):
        x, y = int(D.dom[g]), int(D.cod[g])
        if D.comp[counit[y], FG.arr_map[g]] != D.comp[g, counit[x]]:
            bad.append(D.arrows[g])
            break
    rep.add("counit is a natural isomorphism", not bad, bad, anchor="equivalence")
    # fully faithful and essentially surjective, checked directly as well
    ff = []
    for x in range(C.n_objects):
        for y in range(C.n_objects):
            img = F.arr_map[C.hom(x, y)]
            if len(np.unique(img)) != len(D.hom(int(F.obj_map[x]), int(F.obj_map[y]))):
                ff.append((C.objects[x], C.objects[y]))
    rep.add("F is fully faithful", not ff, ff[:3], anchor="equivalence")
    hit = {int(o) for o in F.obj_map}
    es = [D.objects[y] for y in range(D.n_objects) if not any(D.isomorphic(h, y) for h in hit)]
    rep.add("F is essentially surjective", not es, es[:3], anchor="equivalence")
    return rep
