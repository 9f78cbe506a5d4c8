"""Finitary model categories with shapes, and their filter quotients.

A shape theory is a fibration ``p : T1 -> T0`` whose fibres are lattices; a
model of it in ``V`` is a pair ``m0 : T0 -> V``, ``m1 : T1 -> Mono(V)`` over the
codomain fibration.  Everything is checked exhaustively on finite tables.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .catalog import arrow_category, finset, power_category
from .fincat import (
    Cone,
    Diagram,
    FiniteCategory,
    Functor,
    _factors,
    _same_subobject,
    exponential,
    exponential_candidates,
    is_limit,
    subobject_classifier,
    subobjects,
    subterminal_poset,
)
from .filtquot import (
    Filter,
    FilterQuotient,
    check_limit_preservation,
    filter_maps_into,
    filter_quotient,
    induced_functor,
    make_filter,
    principal_filter,
    validate_filter,
)
from .model import (
    ModelStructureData,
    MorphismClass,
    right_proper,
    transfer_model_structure,
    validate_model_filter,
    verify_model_structure,
)
from .report import Report

__all__ = [
    "PACKAGED_AXIOMS",
    "FiberLattice",
    "FibrationQuotient",
    "IntervalData",
    "MonoCategory",
    "ShapeModel",
    "ShapeTheoryData",
    "ShapesFilterTriple",
    "ShapesTuple",
    "cartesian_lift",
    "cartesian_mask",
    "check_coherent",
    "check_strict_interval",
    "fiber_lattice",
    "fibration_quotient",
    "interval_component",
    "interval_fragment",
    "is_fibration",
    "lifted_filter",
    "mono_category",
    "quotient_shapes_tuple",
    "regular_epi_mask",
    "regular_quotient_check",
    "subobject_union",
    "validate_shape_theory",
    "validate_shapes_tuple",
    "validate_triple",
]


# ---------------------------------------------------------------------------
# fibrations


def fibre(P: Functor, b: int) -> np.ndarray:
    return np.flatnonzero(P.obj_map == b)


def cartesian_mask(P: Functor) -> np.ndarray:
    """``mask[a]`` iff ``a`` is P-cartesian.

    ``a : e' -> e`` is cartesian iff for every ``e''`` the map
    ``k |-> (a k, P k)`` is a bijection from ``Hom(e'', e')`` onto the pairs
    ``(g, h)`` with ``P(a) h == P(g)``.
    """
    cached = getattr(P, "_cartesian", None)
    if cached is not None:
        return cached
    E, B = P.source, P.target
    pa, po = P.arr_map, P.obj_map
    nb = B.n_arrows
    mask = np.zeros(E.n_arrows, dtype=bool)
    ne = E.n_objects
    for e1 in range(ne):
        for e in range(ne):
            A = E.hom(e1, e)
            if not len(A):
                continue
            ok = np.ones(len(A), dtype=bool)
            PA = pa[A]
            for e2 in range(ne):
                G = E.hom(e2, e)
                K = E.hom(e2, e1)
                Hb = B.hom(int(po[e2]), int(po[e1]))
                if len(G) and len(Hb):
                    ph = B.comp[PA[:, None], Hb[None, :]]
                    cnt = (ph[:, :, None] == pa[G][None, None, :]).sum(axis=(1, 2))
                else:
                    cnt = np.zeros(len(A), dtype=np.int64)
                ok &= cnt == len(K)
                if len(K) > 1:
                    codes = E.comp[A[:, None], K[None, :]].astype(np.int64) * nb + pa[K][None, :]
                    s = np.sort(codes, axis=1)
                    ok &= ~(s[:, 1:] == s[:, :-1]).any(axis=1)
                if not ok.any():
                    break
            mask[A] = ok
    mask.setflags(write=False)
    P._cartesian = mask
    return mask


def cartesian_lift(P: Functor, f: int, e: int) -> int | None:
    """A cartesian arrow over ``f`` with codomain ``e``."""
    E = P.source
    if P.obj_map[e] != P.target.cod[f]:
        raise ValueError("object is not over the codomain of f")
    cart = cartesian_mask(P)
    cands = E.into(e)
    hit = cands[(P.arr_map[cands] == f) & cart[cands]]
    return int(hit[0]) if len(hit) else None


def is_fibration(P: Functor) -> Report:
    E, B = P.source, P.target
    rep = Report(f"fibration {P.name}")
    cart = np.flatnonzero(cartesian_mask(P))
    have = {(int(P.arr_map[a]), int(E.cod[a])) for a in cart}
    missing = [
        (B.arrows[f], E.objects[e])
        for f in range(B.n_arrows)
        for e in fibre(P, int(B.cod[f]))
        if (f, int(e)) not in have
    ]
    rep.add("cartesian lifts exist", not missing, missing[:3], anchor="fibration",
            detail=f"{len(cart)} cartesian arrows")
    return rep


# ---------------------------------------------------------------------------
# fibre lattices


@dataclass
class FiberLattice:
    """The fibre over ``base`` as a preorder; operations are up to isomorphism."""

    base: int
    elements: np.ndarray
    leq_matrix: np.ndarray

    def _i(self, e: int) -> int:
        hit = np.flatnonzero(self.elements == e)
        if not len(hit):
            raise KeyError(f"object {e} is not in the fibre")
        return int(hit[0])

    def __contains__(self, e: int) -> bool:
        return bool((self.elements == e).any())

    def leq(self, a: int, b: int) -> bool:
        return bool(self.leq_matrix[self._i(a), self._i(b)])

    def iso(self, a: int, b: int) -> bool:
        return self.leq(a, b) and self.leq(b, a)

    def _extreme(self, cand: np.ndarray, greatest: bool) -> int | None:
        L = self.leq_matrix
        for k in np.flatnonzero(cand):
            if (L[cand, k] if greatest else L[k, cand]).all():
                return int(self.elements[k])
        return None

    def meet(self, a: int, b: int) -> int | None:
        L = self.leq_matrix
        return self._extreme(L[:, self._i(a)] & L[:, self._i(b)], True)

    def join(self, a: int, b: int) -> int | None:
        L = self.leq_matrix
        return self._extreme(L[self._i(a), :] & L[self._i(b), :], False)

    def top(self) -> int | None:
        return self._extreme(np.ones(len(self.elements), dtype=bool), True)

    def bottom(self) -> int | None:
        return self._extreme(np.ones(len(self.elements), dtype=bool), False)

    def lattice_failures(self) -> list[str]:
        out = []
        if self.top() is None or self.bottom() is None:
            out.append("missing top or bottom")
        els = [int(e) for e in self.elements]
        for a, b in itertools.combinations_with_replacement(els, 2):
            m, j = self.meet(a, b), self.join(a, b)
            if m is None or j is None:
                out.append(f"no meet/join of {a},{b}")
                continue
            if not self.iso(self.meet(a, j), a) or not self.iso(self.join(a, m), a):
                out.append(f"absorption fails at {a},{b}")
        return out


def fiber_lattice(P: Functor, b: int) -> FiberLattice:
    cache = P.__dict__.setdefault("_fibres", {})
    if b not in cache:
        E = P.source
        els = fibre(P, b)
        idb = P.target.ident[b]
        n = len(els)
        L = np.zeros((n, n), dtype=bool)
        for i, x in enumerate(els):
            for j, y in enumerate(els):
                L[i, j] = bool((P.arr_map[E.hom(int(x), int(y))] == idb).any())
        cache[b] = FiberLattice(int(b), els, L)
    return cache[b]


@dataclass
class ShapeTheoryData:
    T0: FiniteCategory
    T1: FiniteCategory
    p: Functor


def validate_shape_theory(T: ShapeTheoryData) -> Report:
    rep = Report(f"shape theory over {T.T0.name}")
    rep.extend(T.p.check(), prefix="projection: ")
    rep.extend(is_fibration(T.p))
    bad = []
    for b in range(T.T0.n_objects):
        bad += [(T.T0.objects[b], msg) for msg in fiber_lattice(T.p, b).lattice_failures()]
    rep.add("every fibre is a bounded lattice", not bad, bad[:3], anchor="shapes",
            detail=f"{T.T0.n_objects} fibres")
    rep.add("T0 has a terminal object", T.T0.terminal() is not None, anchor="shapes")
    n = T.T0.n_objects
    present = sum(T.T0.product(x, y) is not None for x in range(n) for y in range(n))
    rep.add("binary products of T0 (within the fragment)", True, anchor="shapes",
            detail=f"{present} of {n * n} pairs have a product in the fragment")
    return rep


# ---------------------------------------------------------------------------
# Mono(V)


@dataclass
class MonoCategory:
    """The full subcategory of ``V``'s arrow category on monos."""

    base: FiniteCategory
    category: FiniteCategory
    dom: Functor
    cod: Functor
    _obj: dict = field(default_factory=dict, repr=False)
    _sq: dict = field(default_factory=dict, repr=False)

    def obj_of(self, m: int) -> int:
        return self._obj[int(m)]

    def square(self, src: int, tgt: int, u: int, v: int) -> int | None:
        return self._sq.get((int(src), int(tgt), int(u), int(v)))


def mono_category(V: FiniteCategory) -> MonoCategory:
    if "mono-cat" not in V._cache:
        mono = V.mono_mask()
        A, d, c = arrow_category(V, keep=lambda a: bool(mono[a]), name=f"Mono({V.name})")
        objs = {int(m): i for i, m in enumerate(A.obj_data)}
        sq = {tuple(int(x) for x in t): k for k, t in enumerate(A.arr_data)}
        V._cache["mono-cat"] = MonoCategory(V, A, d, c, objs, sq)
    return V._cache["mono-cat"]


@dataclass
class ShapeModel:
    m0: Functor
    m1: Functor
    mono: MonoCategory


# ---------------------------------------------------------------------------
# coherent functors


def _is_coequalizer(C: FiniteCategory, f: int, g: int, e: int) -> bool:
    D = Diagram.parallel(C, f, g).op()
    return is_limit(D, Cone(int(C.cod[e]), (int(C.comp[e, f]), int(e))))


def regular_epi_mask(C: FiniteCategory) -> np.ndarray:
    """Arrows that coequalize some parallel pair (their kernel pair, when it
    exists in the fragment)."""
    if "regepi" not in C._cache:
        out = np.zeros(C.n_arrows, dtype=bool)
        for e in np.flatnonzero(C.epi_mask()):
            e = int(e)
            kp = C.pullback(e, e)
            if kp is not None:
                out[e] = _is_coequalizer(C, kp.legs[0], kp.legs[1], e)
                continue
            X = int(C.dom[e])
            out[e] = any(
                _is_coequalizer(C, int(f), int(g), e)
                for z in range(C.n_objects)
                for f in C.hom(z, X)
                for g in C.hom(z, X)
                if C.comp[e, f] == C.comp[e, g]
            )
        out.setflags(write=False)
        C._cache["regepi"] = out
    return C._cache["regepi"]


def subobject_union(C: FiniteCategory, m1: int, m2: int) -> int | None:
    """The least subobject containing both monos, or None."""
    X = int(C.cod[m1])
    uppers = [r for r in subobjects(C, X) if _factors(C, m1, r) and _factors(C, m2, r)]
    for r in uppers:
        if all(_factors(C, r, s) for s in uppers):
            return r
    return None


def _least_subobject(C: FiniteCategory, X: int) -> int | None:
    subs = subobjects(C, X)
    for r in subs:
        if all(_factors(C, r, s) for s in subs):
            return r
    return None


def check_coherent(F: Functor, anchor: str = "coherent", epis: bool = False) -> Report:
    """Finite limits, regular epis, and finite unions of subobjects."""
    V, W = F.source, F.target
    rep = Report(f"coherence of {F.name}")
    for label, kind in (("terminal object", "terminal"), ("binary products", "product"),
                        ("pullbacks", "pullback"), ("equalizers", "equalizer")):
        checked, skipped, bad = check_limit_preservation(F, kind)
        rep.add(f"preserves {label}", not bad, bad, anchor=anchor,
                detail=f"{checked} diagrams, {skipped} without a limit in the fragment")
    reg_v, reg_w = regular_epi_mask(V), regular_epi_mask(W)
    bad = [V.arrows[e] for e in np.flatnonzero(reg_v) if not reg_w[F.arr_map[e]]]
    rep.add("preserves regular epimorphisms", not bad, bad[:3], anchor=anchor,
            detail=f"{int(reg_v.sum())} regular epis")
    if epis:
        ev, ew = V.epi_mask(), W.epi_mask()
        bad = [V.arrows[e] for e in np.flatnonzero(ev) if not ew[F.arr_map[e]]]
        rep.add("preserves epimorphisms", not bad, bad[:3], anchor=anchor)
    mono_w = W.mono_mask()
    bad, n = [], 0
    for X in range(V.n_objects):
        subs = subobjects(V, X)
        FX = int(F.obj_map[X])
        lo = _least_subobject(V, X)
        if lo is not None:
            n += 1
            tgt = _least_subobject(W, FX)
            if tgt is None or not _same_subobject(W, int(F.arr_map[lo]), tgt):
                bad.append(("empty union", V.objects[X]))
        for r1, r2 in itertools.combinations_with_replacement(subs, 2):
            u = subobject_union(V, r1, r2)
            if u is None:
                continue
            n += 1
            a, b = int(F.arr_map[r1]), int(F.arr_map[r2])
            if not (mono_w[a] and mono_w[b]):
                bad.append((V.arrows[r1], V.arrows[r2]))
                continue
            t = subobject_union(W, a, b)
            if t is None or not _same_subobject(W, int(F.arr_map[u]), t):
                bad.append((V.arrows[r1], V.arrows[r2]))
    rep.add("preserves finite unions of subobjects", not bad, bad[:3], anchor=anchor,
            detail=f"{n} unions")
    return rep


# ---------------------------------------------------------------------------
# strict interval


# Lattice equations in the fibres; a reconstruction from the lattice reading.
PACKAGED_AXIOMS: tuple[str, ...] = (
    "pull(0, at0) = top(1)",
    "pull(1, at1) = top(1)",
    "pull(1, at0) = bot(1)",
    "pull(0, at1) = bot(1)",
    "meet(at0, at1) = bot(I)",
    "pull(!, top(1)) = top(I)",
    "pull(!, bot(1)) = bot(I)",
    "meet(join(at0, at1), at0) = at0",
)


@dataclass(frozen=True)
class IntervalData:
    obj: int  # in T0
    zero: int  # T0 arrow 1 -> obj
    one: int
    predicates: tuple[tuple[str, int], ...]  # name -> T1 object
    axioms: tuple[str, ...] = PACKAGED_AXIOMS
    reconstructed: bool = True


class AxiomError(ValueError):
    pass


_TOKEN = re.compile(r'\s*(?:(<=|=|\(|\)|,|!)|"([^"]*)"|([A-Za-z_][\w]*|\d+))')


def _tokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise AxiomError(f"cannot parse {text[pos:]!r}")
        out.append(m.group(1) or (f'"{m.group(2)}"' if m.group(2) is not None else m.group(3)))
        pos = m.end()
    return out


def _parse_term(toks: list[str], i: int):
    head = toks[i]
    if i + 1 < len(toks) and toks[i + 1] == "(":
        args, j = [], i + 2
        while True:
            arg, j = _parse_term(toks, j)
            args.append(arg)
            if toks[j] == ",":
                j += 1
                continue
            if toks[j] != ")":
                raise AxiomError("expected )")
            return (head, *args), j + 1
    return head, i + 1


def parse_axiom(text: str):
    toks = _tokens(text)
    for op in ("<=", "="):
        if op in toks:
            k = toks.index(op)
            try:
                lhs, i = _parse_term(toks[:k], 0)
                rhs, j = _parse_term(toks[k + 1 :], 0)
            except IndexError:
                raise AxiomError(f"unbalanced term in {text!r}") from None
            if i != k or j != len(toks) - k - 1:
                raise AxiomError(f"trailing tokens in {text!r}")
            return op, lhs, rhs
    raise AxiomError(f"no relation in {text!r}")


class _Interpreter:
    def __init__(self, T: ShapeTheoryData, iv: IntervalData) -> None:
        self.T, self.iv = T, iv
        self.preds = dict(iv.predicates)
        self.one = int(T.T0.dom[iv.zero])

    def obj(self, tok) -> int:
        T0 = self.T.T0
        if tok == "I":
            return self.iv.obj
        if tok == "1":
            return self.one
        if isinstance(tok, str) and tok.startswith('"'):
            return T0.obj(tok.strip('"'))
        raise AxiomError(f"unknown object {tok!r}")

    def arr(self, tok) -> int:
        T0 = self.T.T0
        if tok == "0":
            return self.iv.zero
        if tok == "1":
            return self.iv.one
        if tok == "!":
            return int(T0.hom(self.iv.obj, self.one)[0])
        if isinstance(tok, str) and tok.startswith('"'):
            return T0.arr(tok.strip('"'))
        raise AxiomError(f"unknown arrow {tok!r}")

    def base(self, e: int) -> int:
        return int(self.T.p.obj_map[e])

    def lat(self, b: int) -> FiberLattice:
        return fiber_lattice(self.T.p, b)

    def eval(self, t) -> int:
        if isinstance(t, str):
            if t in self.preds:
                return self.preds[t]
            if t.startswith('"'):
                return self.T.T1.obj(t.strip('"'))
            raise AxiomError(f"unknown fibre element {t!r}")
        head, *args = t
        if head in ("top", "bot"):
            L = self.lat(self.obj(args[0]))
            r = L.top() if head == "top" else L.bottom()
        elif head in ("meet", "join"):
            a, b = self.eval(args[0]), self.eval(args[1])
            if self.base(a) != self.base(b):
                raise AxiomError(f"{head} of elements in different fibres")
            L = self.lat(self.base(a))
            r = L.meet(a, b) if head == "meet" else L.join(a, b)
        elif head == "pull":
            f, a = self.arr(args[0]), self.eval(args[1])
            if self.T.T0.cod[f] != self.base(a):
                raise AxiomError("pull along an arrow into a different fibre")
            lift = cartesian_lift(self.T.p, f, a)
            r = None if lift is None else int(self.T.T1.dom[lift])
        else:
            raise AxiomError(f"unknown operation {head!r}")
        if r is None:
            raise AxiomError(f"missing fibre element for {head}")
        return r

    def holds(self, text: str) -> bool:
        op, lhs, rhs = parse_axiom(text)
        a, b = self.eval(lhs), self.eval(rhs)
        if self.base(a) != self.base(b):
            raise AxiomError("sides live in different fibres")
        L = self.lat(self.base(a))
        return L.leq(a, b) if op == "<=" else L.iso(a, b)


def check_strict_interval(T: ShapeTheoryData, iv: IntervalData) -> Report:
    T0 = T.T0
    rep = Report(f"strict interval in {T0.name}")
    one = T0.terminal()
    shape_ok = one is not None and T0.isomorphic(int(T0.dom[iv.zero]), one) and all(
        int(T0.dom[x]) == int(T0.dom[iv.zero]) and int(T0.cod[x]) == iv.obj for x in (iv.zero, iv.one)
    )
    rep.add("points are arrows 1 -> I", shape_ok, [T0.arrows[iv.zero], T0.arrows[iv.one]], anchor="interval")
    rep.add("points are distinct", iv.zero != iv.one, [T0.arrows[iv.zero]], anchor="interval")
    ev = _Interpreter(T, iv)
    note = "packaged reconstruction" if iv.reconstructed else ""
    for ax in iv.axioms:
        try:
            ok, wit = ev.holds(ax), [ax]
        except AxiomError as exc:
            ok, wit = False, [f"{ax}: {exc}"]
        rep.add(f"axiom {ax}", ok, wit, anchor="interval", detail=note)
    return rep


# ---------------------------------------------------------------------------
# tuples


@dataclass
class ShapesTuple:
    M: ModelStructureData
    V: FiniteCategory
    theory: ShapeTheoryData
    model: ShapeModel
    omega: Functor  # V -> M.category
    interval: IntervalData | None = None
    name: str = ""


@dataclass
class ShapesFilterTriple:
    phi_T: Filter  # on T0
    phi_V: Filter
    phi_M: Filter


def _clause1(M: ModelStructureData, rep: Report) -> None:
    C = M.category
    rep.extend(verify_model_structure(M), prefix="(1) ")
    rep.extend(right_proper(M), prefix="(1) ")
    mono = C.mono_mask()
    bad = [C.arrows[f] for f in M.C.arrows() if not mono[f]]
    rep.add("(1) cofibrations are monomorphisms", not bad, bad[:3], anchor="shapes")
    rep.add("(1) terminal object", C.terminal() is not None, anchor="shapes")
    so = subobject_classifier(C)
    rep.add("(1) subobject classifier", so is not None, anchor="shapes",
            detail="" if so is None else f"Omega = {C.objects[so.omega]}")
    found = escaped = 0
    bad = []
    for X in range(C.n_objects):
        for Y in range(C.n_objects):
            if exponential(C, X, Y) is not None:
                found += 1
            elif any(C.product(E, X) is not None for E in exponential_candidates(C, X, Y)):
                bad.append((C.objects[X], C.objects[Y]))
            else:
                escaped += 1
    rep.add("(1) exponentials", not bad, bad[:3], anchor="shapes",
            detail=f"{found} found, {escaped} outside the fragment")
    n = C.n_objects
    pb = sum(C.pullback(int(f), int(g)) is not None for z in range(n) for f in C.into(z) for g in C.into(z))
    rep.add("(1) finite limits", True, anchor="shapes", detail=f"{pb} cospans with a pullback in the fragment")


def _clause2(tup: ShapesTuple, rep: Report) -> None:
    T, S = tup.theory, tup.model
    m0, m1, mono = S.m0, S.m1, S.mono
    rep.extend(validate_shape_theory(T), prefix="(2) theory: ")
    shape_ok = m0.source is T.T0 and m0.target is tup.V and m1.source is T.T1 and m1.target is mono.category
    rep.add("(2) m0, m1 have the right source and target", shape_ok, anchor="shapes")
    if not shape_ok:
        return
    rep.extend(m0.check(), prefix="(2) m0: ")
    rep.extend(m1.check(), prefix="(2) m1: ")
    for label, kind in (("terminal object", "terminal"), ("binary products", "product")):
        checked, skipped, bad = check_limit_preservation(m0, kind)
        rep.add(f"(2) m0 preserves {label}", not bad, bad, anchor="shapes",
                detail=f"{checked} diagrams, {skipped} without a limit in T0")
    bad_o = np.flatnonzero(mono.cod.obj_map[m1.obj_map] != m0.obj_map[T.p.obj_map])
    bad_a = np.flatnonzero(mono.cod.arr_map[m1.arr_map] != m0.arr_map[T.p.arr_map])
    wit = [T.T1.objects[x] for x in bad_o[:2]] + [T.T1.arrows[a] for a in bad_a[:2]]
    rep.add("(2) cod m1 == m0 p on objects and arrows", not len(bad_o) and not len(bad_a), wit, anchor="shapes")
    if len(bad_o) or len(bad_a):
        rep.skip("(2) m1 preserves cartesian arrows", "m1 does not lie over m0", anchor="shapes")
        rep.skip("(2) m1 preserves fibrewise meets and joins", "m1 does not lie over m0", anchor="shapes")
        return
    cart_t = cartesian_mask(T.p)
    cart_m = cartesian_mask(mono.cod)
    bad = [T.T1.arrows[a] for a in np.flatnonzero(cart_t & ~cart_m[m1.arr_map])]
    rep.add("(2) m1 preserves cartesian arrows", not bad, bad[:3], anchor="shapes",
            detail=f"{int(cart_t.sum())} cartesian arrows")
    bad = []
    for b in range(T.T0.n_objects):
        LT = fiber_lattice(T.p, b)
        LM = fiber_lattice(mono.cod, int(m0.obj_map[b]))
        img = lambda e: int(m1.obj_map[e])  # noqa: E731
        for nullary, ref in (("top", LM.top()), ("bottom", LM.bottom())):
            e = LT.top() if nullary == "top" else LT.bottom()
            if e is None or ref is None or not LM.iso(img(e), ref):
                bad.append((T.T0.objects[b], nullary))
        els = [int(e) for e in LT.elements]
        for x, y in itertools.combinations_with_replacement(els, 2):
            for op in ("meet", "join"):
                r = getattr(LT, op)(x, y)
                t = getattr(LM, op)(img(x), img(y))
                if r is None or t is None or not LM.iso(img(r), t):
                    bad.append((T.T1.objects[x], T.T1.objects[y], op))
    rep.add("(2) m1 preserves fibrewise meets and joins", not bad, bad[:3], anchor="shapes")


def _acyclic_product_failures(tup: ShapesTuple) -> tuple[list, int]:
    M = tup.M
    C = M.category
    CW = M.C & M.W
    bad, skipped = [], 0
    for U in range(tup.V.n_objects):
        u = int(tup.omega.obj_map[U])
        for f in CW.arrows():
            X, Y = int(C.dom[f]), int(C.cod[f])
            cx, cy = C.product(u, X), C.product(u, Y)
            if cx is None or cy is None:
                skipped += 1
                continue
            g = C.product_map(cx, cy, C.identity(u), int(f))
            if g not in CW:
                bad.append({"U": tup.V.objects[U], "f": C.arrows[f], "image": C.arrows[g]})
    return bad, skipped


def validate_shapes_tuple(tup: ShapesTuple, interval: bool = True) -> Report:
    """Clauses (1)-(4) of a finitary model category with shapes, each with
    witnesses; plus the strict interval when the tuple carries one."""
    rep = Report(f"shapes tuple {tup.name}")
    _clause1(tup.M, rep)
    _clause2(tup, rep)
    om = tup.omega
    ok = om.source is tup.V and om.target is tup.M.category
    rep.add("(3) omega: V -> M", ok, anchor="shapes")
    if ok:
        rep.extend(om.check(), prefix="(3) omega: ")
        rep.extend(check_coherent(om), prefix="(3) ")
    bad, skipped = _acyclic_product_failures(tup)
    rep.add("(4) omega(U) x - preserves acyclic cofibrations", not bad, bad[:3], anchor="shapes",
            detail=f"{skipped} products outside the fragment")
    for c in rep.checks:
        if not c.anchor:
            c.anchor = "shapes"
    if interval and tup.interval is not None:
        rep.extend(check_strict_interval(tup.theory, tup.interval), prefix="interval: ")
    return rep


def validate_triple(tup: ShapesTuple, triple: ShapesFilterTriple) -> Report:
    rep = Report("model filter for shapes")
    for label, phi, C in (("Phi_T", triple.phi_T, tup.theory.T0), ("Phi_V", triple.phi_V, tup.V),
                          ("Phi_M", triple.phi_M, tup.M.category)):
        if phi.category is not C:
            rep.add(f"{label} lives on the right category", False, [phi.name], anchor="shapes-filter")
            return rep
        sub = validate_filter(phi.poset, phi.elements)
        rep.add(f"{label} is a filter of subterminals", sub.ok, [c.name for c in sub.failures], anchor="shapes-filter")
    mf = validate_model_filter(tup.M, triple.phi_M, check_model=False)
    rep.extend(mf, prefix="Phi_M: ")
    stray = filter_maps_into(tup.model.m0, triple.phi_T, triple.phi_V)
    rep.add("m0 restricts to Phi_T -> Phi_V", not stray, stray, anchor="shapes-filter")
    stray = filter_maps_into(tup.omega, triple.phi_V, triple.phi_M)
    rep.add("omega restricts to Phi_V -> Phi_M", not stray, stray, anchor="shapes-filter")
    return rep


# ---------------------------------------------------------------------------
# quotients


def lifted_filter(P: Functor, phi: Filter) -> Filter:
    """The filter on the total category generated by the fibre tops over ``phi``."""
    E, B = P.source, P.target
    t = E.terminal()
    if t is None:
        raise ValueError("total category has no terminal object")
    tops = []
    for U in phi:
        a = cartesian_lift(P, B.bang(U), t)
        if a is None:
            raise ValueError(f"no cartesian lift over {B.objects[U]}")
        tops.append(int(E.dom[a]))
    PE = subterminal_poset(E)
    up = set()
    for x in tops:
        up |= PE.up_set(PE.rep[x])
    return make_filter(PE, sorted(up), name=f"lift({phi.name})")


@dataclass
class FibrationQuotient:
    total: FilterQuotient
    base: FilterQuotient
    functor: Functor


def fibration_quotient(P: Functor, phi: Filter, QB: FilterQuotient | None = None) -> tuple[FibrationQuotient, Report]:
    rep = Report(f"fibration quotient of {P.name} along {phi.name}")
    rep.extend(is_fibration(P), prefix="upstream: ")
    phi_e = lifted_filter(P, phi)
    QE = filter_quotient(P.source, phi_e)
    QB = QB or filter_quotient(P.target, phi)
    PF = induced_functor(P, QE, QB)
    rep.extend(PF.check(), prefix="P_Phi: ")
    rep.extend(is_fibration(PF), prefix="quotient: ")
    for c in rep.checks:
        if not c.anchor:
            c.anchor = "fibration"
    return FibrationQuotient(QE, QB, PF), rep


def regular_quotient_check(F: Functor, phi_c: Filter, phi_d: Filter) -> Report:
    rep = Report(f"regular quotient of {F.name}")
    stray = filter_maps_into(F, phi_c, phi_d)
    rep.add("functor restricts to the filters", not stray, stray, anchor="regular")
    if stray:
        return rep
    QC = filter_quotient(F.source, phi_c)
    QD = filter_quotient(F.target, phi_d)
    FQ = induced_functor(F, QC, QD)
    rep.extend(FQ.check(), prefix="induced: ")
    rep.extend(check_coherent(FQ, anchor="regular", epis=True), prefix="induced: ")
    return rep


def mono_comparison(mono: MonoCategory, QMono: FilterQuotient, QV: FilterQuotient) -> tuple[Functor, MonoCategory]:
    """``K : Mono(V)_Phi -> Mono(V_Phi)`` sending a germ of squares to the
    square of germs."""
    monoQ = mono_category(QV.category)
    A = mono.category
    Q = QMono.category
    obj = np.empty(A.n_objects, dtype=np.int64)
    for o in range(A.n_objects):
        m = int(QV.projection.arr_map[int(A.obj_data[o])])
        if m not in monoQ._obj:
            raise ValueError(f"{A.objects[o]} is not mono in the quotient")
        obj[o] = monoQ.obj_of(m)
    U = int(mono.dom.obj_map[QMono.W0])
    amap = np.empty(Q.n_arrows, dtype=np.int64)
    for q in range(Q.n_arrows):
        s = int(QMono.reps[q])
        X, Y = int(Q.dom[q]), int(Q.cod[q])
        cone = QMono.cones[X]
        dc = Cone(int(mono.dom.obj_map[cone.apex]), tuple(int(mono.dom.arr_map[l]) for l in cone.legs))
        cc = Cone(int(mono.cod.obj_map[cone.apex]), tuple(int(mono.cod.arr_map[l]) for l in cone.legs))
        gu = QV.germ_from_cone(dc, int(mono.dom.arr_map[s]), U)
        gv = QV.germ_from_cone(cc, int(mono.cod.arr_map[s]), U)
        k = monoQ.square(obj[X], obj[Y], gu, gv)
        if k is None:
            raise ValueError(f"no square for {Q.arrows[q]}")
        amap[q] = k
    return Functor(Q, monoQ.category, obj, amap, name="K"), monoQ


def _comparison_report(K: Functor) -> Report:
    S, T = K.source, K.target
    rep = Report("Mono(V)_Phi ~ Mono(V_Phi)")
    rep.extend(K.check(), prefix="K: ")
    bad = []
    for x in range(S.n_objects):
        for y in range(S.n_objects):
            img = K.arr_map[S.hom(x, y)]
            if len(np.unique(img)) != len(img) or len(img) != len(T.hom(int(K.obj_map[x]), int(K.obj_map[y]))):
                bad.append((S.objects[x], S.objects[y]))
    rep.add("K is fully faithful", not bad, bad[:3], anchor="shapes-quotient")
    hit = set(K.obj_map.tolist())
    es = [T.objects[y] for y in range(T.n_objects) if not any(T.isomorphic(h, y) for h in hit)]
    rep.add("K is essentially surjective", not es, es[:3], anchor="shapes-quotient")
    return rep


def quotient_shapes_tuple(tup: ShapesTuple, triple: ShapesFilterTriple,
                          upstream: Report | None = None) -> tuple[ShapesTuple | None, Report]:
    """Quotient every component and re-verify the whole package."""
    rep = Report(f"quotient of {tup.name}")
    pre = upstream if upstream is not None else validate_shapes_tuple(tup)
    rep.add("stage upstream: tuple is valid", pre.ok,
            [f"{c.name}: {c.witnesses[:1]}" for c in pre.failures[:1]], anchor="shapes-quotient")
    tri = validate_triple(tup, triple)
    rep.extend(tri, prefix="stage triple: ")
    if not rep.ok:
        return None, rep
    T, S = tup.theory, tup.model
    QT0 = filter_quotient(T.T0, triple.phi_T)
    fq, frep = fibration_quotient(T.p, triple.phi_T, QB=QT0)
    rep.extend(frep, prefix="stage theory: ")
    QV = filter_quotient(tup.V, triple.phi_V)
    same_m = tup.M.category is tup.V and triple.phi_M.elements == triple.phi_V.elements
    QM = QV if same_m else filter_quotient(tup.M.category, triple.phi_M)
    tr = transfer_model_structure(tup.M, triple.phi_M, QC=QM)
    rep.extend(tr.report, prefix="stage model: ")
    if tr.structure is None:
        return None, rep
    phi_mono = lifted_filter(S.mono.cod, triple.phi_V)
    QMono = filter_quotient(S.mono.category, phi_mono)
    m0q = induced_functor(S.m0, QT0, QV)
    K, monoQ = mono_comparison(S.mono, QMono, QV)
    rep.extend(_comparison_report(K), prefix="stage Mono: ")
    m1q = induced_functor(S.m1, fq.total, QMono).then(K)
    omq = induced_functor(tup.omega, QV, QM)
    theory = ShapeTheoryData(QT0.category, fq.total.category, fq.functor)
    iv = tup.interval
    if iv is not None:
        P0 = QT0.projection
        iv = replace(iv, zero=int(P0.arr_map[iv.zero]), one=int(P0.arr_map[iv.one]))
    q = ShapesTuple(tr.structure, QV.category, theory, ShapeModel(m0q, m1q, monoQ), omq, iv,
                    name=f"{tup.name}/Phi")
    rep.extend(validate_shapes_tuple(q), prefix="quotient: ")
    for c in rep.checks:
        if not c.anchor:
            c.anchor = "shapes-quotient"
    return q, rep


# ---------------------------------------------------------------------------
# the built-in interval fragment


def _fn(m: int, n: int, f: tuple[int, ...]) -> str:
    return f"{m}>{n}[{''.join(map(str, f))}]"


def _monotone(m: int, n: int) -> list[tuple[int, ...]]:
    return [f for f in itertools.product(range(n), repeat=m) if all(a <= b for a, b in zip(f, f[1:]))]


def _subsets(n: int) -> list[tuple[int, ...]]:
    return [s for k in range(n + 1) for s in itertools.combinations(range(n), k)]


@lru_cache(maxsize=None)
def interval_component() -> ShapeTheoryData:
    """Posets ``0``, ``1``, ``2`` with monotone maps, and subsets of points over them."""
    T0 = FiniteCategory.from_concrete(
        ["0", "1", "2"],
        [(m, n, f) for m in range(3) for n in range(3) for f in _monotone(m, n)],
        compose=lambda g, f: tuple(g[x] for x in f),
        identity=lambda m: tuple(range(m)),
        arrow_name=_fn,
        name="T0",
    )
    objs = [(n, s) for n in range(3) for s in _subsets(n)]
    names = [f"{n}{{{''.join(map(str, s))}}}" for n, s in objs]
    arrows = [
        (i, j, f)
        for i, (m, s) in enumerate(objs)
        for j, (n, t) in enumerate(objs)
        for f in _monotone(m, n)
        if all(f[x] in t for x in s)
    ]
    T1 = FiniteCategory.from_concrete(
        names,
        arrows,
        compose=lambda g, f: tuple(g[x] for x in f),
        identity=lambda i: tuple(range(objs[i][0])),
        arrow_name=lambda d, c, f: f"{_fn(objs[d][0], objs[c][0], f)}:{names[d]}>{names[c]}",
        name="T1",
        obj_data=objs,
    )
    idx0 = {(int(T0.dom[a]), int(T0.cod[a]), T0.arr_data[a]): a for a in range(T0.n_arrows)}
    pmap = [idx0[(objs[T1.dom[a]][0], objs[T1.cod[a]][0], T1.arr_data[a])] for a in range(T1.n_arrows)]
    p = Functor(T1, T0, [n for n, _ in objs], pmap, name="p")
    return ShapeTheoryData(T0, T1, p)


def _pair_functor(F: Functor, P: FiniteCategory, Q: FiniteCategory) -> Functor:
    """``F x F : P -> Q`` for power categories of two factors."""
    oidx = {t: i for i, t in enumerate(Q.obj_data)}
    aidx = {t: i for i, t in enumerate(Q.arr_data)}
    om = [oidx[(int(F.obj_map[a]), int(F.obj_map[b]))] for a, b in P.obj_data]
    am = [aidx[(int(F.arr_map[a]), int(F.arr_map[b]))] for a, b in P.arr_data]
    return Functor(P, Q, om, am, name=f"{F.name}^2")


@dataclass
class IntervalFragment:
    tuple: ShapesTuple
    triple: ShapesFilterTriple


@lru_cache(maxsize=None)
def interval_fragment() -> IntervalFragment:
    """The two-variable interval theory modelled in ``FinSet<=2 x FinSet<=2``,
    with ``M = (C = isos, F = all, W = all)`` and its filter triple."""
    c = interval_component()
    F2 = finset(2)
    # component model: poset -> its points; (I, S) -> the inclusion S -> I
    m0c = Functor(c.T0, F2, [F2.obj(o) for o in c.T0.objects], [F2.arr(a) for a in c.T0.arrows], name="m0")
    T0 = power_category([c.T0, c.T0], name="T0^2")
    T1 = power_category([c.T1, c.T1], name="T1^2")
    V = power_category([F2, F2], name="FinSet<=2 x FinSet<=2")
    p = _pair_functor(c.p, T1, T0)
    p.name = "p"
    m0 = _pair_functor(m0c, T0, V)
    m0.name = "m0"
    mono = mono_category(V)

    def inc(i: int) -> int:
        n, s = c.T1.obj_data[i]
        return F2.arr(_fn(len(s), n, s))

    vidx = {t: i for i, t in enumerate(V.arr_data)}
    om = [mono.obj_of(vidx[(inc(a), inc(b))]) for a, b in T1.obj_data]

    def restricted(a: int) -> int:
        (m, s), (n, t) = c.T1.obj_data[c.T1.dom[a]], c.T1.obj_data[c.T1.cod[a]]
        f = c.T1.arr_data[a]
        return F2.arr(_fn(len(s), len(t), tuple(t.index(f[x]) for x in s)))

    am = []
    for k, (a, b) in enumerate(T1.arr_data):
        u = vidx[(restricted(a), restricted(b))]
        v = int(m0.arr_map[p.arr_map[k]])
        sq = mono.square(om[T1.dom[k]], om[T1.cod[k]], u, v)
        am.append(sq)
    m1 = Functor(T1, mono.category, om, am, name="m1")
    M = ModelStructureData(V, MorphismClass.all(V), MorphismClass.isos(V), MorphismClass.all(V),
                           name="(isos, all, all)")
    one = T0.terminal()
    I = T0.obj("(2,2)")
    zero = T0.arr(f"({_fn(1, 2, (0,))},{_fn(1, 2, (0,))})")
    onep = T0.arr(f"({_fn(1, 2, (1,))},{_fn(1, 2, (1,))})")
    assert int(T0.dom[zero]) == one
    iv = IntervalData(I, zero, onep, (("at0", T1.obj("(2{0},2{0})")), ("at1", T1.obj("(2{1},2{1})"))))
    tup = ShapesTuple(M, V, ShapeTheoryData(T0, T1, p), ShapeModel(m0, m1, mono), Functor.identity(V), iv,
                      name="interval-fragment")
    triple = ShapesFilterTriple(
        principal_filter(T0, "(1,0)"), principal_filter(V, "(1,0)"), principal_filter(V, "(1,0)")
    )
    return IntervalFragment(tup, triple)
