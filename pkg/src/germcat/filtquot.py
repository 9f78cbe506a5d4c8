"""Filters of subterminal objects and filter quotients.

A filter on a finite subterminal poset has a least element ``W0``.  Two germs
``X x U -> Y`` and ``X x V -> Y`` agree on some filter element iff they agree
after restriction to ``W0``, so the hom-set ``Hom_Phi(X, Y)`` is materialised
as ``Hom(X x W0, Y)``.  ``germ_eq`` decides the defining existential directly
and the tests check that both views agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fincat import (
    Cone,
    Diagram,
    FiniteCategory,
    Functor,
    SubterminalPoset,
    _ev_universal,
    exponential,
    is_limit,
    is_subobject_classifier,
    limit,
    subobject_classifier,
    subterminal_poset,
    validate_category,
)
from .report import Report

__all__ = [
    "Filter",
    "FilterQuotient",
    "GermMorphism",
    "filter_quotient",
    "germ_eq",
    "germ_mono_characterization",
    "induced_functor",
    "make_filter",
    "principal_filter",
    "trivial_filter",
    "validate_filter",
    "verify_projection",
]


# ---------------------------------------------------------------------------
# filters


@dataclass(frozen=True)
class Filter:
    """A validated filter, stored as a set of representative subterminals."""

    poset: SubterminalPoset
    elements: frozenset[int]
    name: str = ""

    def __contains__(self, u: int) -> bool:
        return int(u) in self.poset and self.poset.rep[int(u)] in self.elements

    def __iter__(self):
        return iter(sorted(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def category(self) -> FiniteCategory:
        return self.poset.category

    def least(self) -> int:
        for w in sorted(self.elements):
            if all(self.poset.leq(w, v) for v in self.elements):
                return w
        raise ValueError("filter has no least element")

    def names(self) -> list[str]:
        return [self.category.objects[u] for u in sorted(self.elements)]


def _resolve(P: SubterminalPoset, items: Iterable[int | str]) -> tuple[set[int], list[str]]:
    C = P.category
    out, bad = set(), []
    for it in items:
        try:
            x = C.obj(it)
        except KeyError:
            bad.append(str(it))
            continue
        if x not in P:
            bad.append(C.objects[x])
        else:
            out.add(P.rep[x])
    return out, bad


def validate_filter(P: SubterminalPoset, phi: Iterable[int | str]) -> Report:
    """Check non-emptiness, upward closure and meet closure."""
    rep = Report("validate filter")
    C = P.category
    elems, bad = _resolve(P, phi)
    rep.add("elements are subterminal", not bad, bad, anchor="filter")
    rep.add("non-empty", bool(elems), ["empty"], anchor="filter")
    up = [
        (C.objects[u], C.objects[v])
        for u in sorted(elems)
        for v in P.elements
        if P.leq(u, v) and v not in elems
    ]
    rep.add("upward closed", not up, up[:5], anchor="filter")
    meet = [
        (C.objects[x], C.objects[y])
        for x in sorted(elems)
        for y in sorted(elems)
        if x < y and not any(P.leq(z, x) and P.leq(z, y) for z in elems)
    ]
    rep.add("intersection closed", not meet, meet[:5], anchor="filter")
    return rep


def make_filter(P: SubterminalPoset, phi: Iterable[int | str], name: str = "") -> Filter:
    phi = list(phi)
    rep = validate_filter(P, phi)
    if not rep.ok:
        bad = rep.first_failure()
        raise ValueError(f"not a filter: {bad.name} :: {bad.witnesses[:3]}")
    elems, _ = _resolve(P, phi)
    return Filter(P, frozenset(elems), name)


def principal_filter(C: FiniteCategory, u: int | str) -> Filter:
    P = subterminal_poset(C)
    x = C.obj(u)
    if x not in P:
        raise ValueError(f"{C.objects[x]} is not subterminal")
    return make_filter(P, P.up_set(x), name=f"up({C.objects[x]})")


def trivial_filter(C: FiniteCategory) -> Filter:
    P = subterminal_poset(C)
    t = P.top()
    if t is None:
        raise ValueError("no top subterminal")
    return make_filter(P, [t], name="trivial")


# ---------------------------------------------------------------------------
# germs


@dataclass(frozen=True)
class GermMorphism:
    """A representative ``(U, f: X x U -> Y)``; ``X x U`` is the canonical
    product of the base category."""

    source: int
    target: int
    U: int
    arrow: int


def _restriction(C: FiniteCategory, X: int, W: int, U: int) -> int:
    """``X x r : X x W -> X x U`` for the unique ``r : W -> U``."""
    r = C.hom(W, U)
    if len(r) != 1:
        raise ValueError(f"{C.objects[W]} is not below {C.objects[U]}")
    src, tgt = C.product(X, W), C.product(X, U)
    return C.product_map(src, tgt, C.identity(X), int(r[0]))


def restrict(C: FiniteCategory, g: GermMorphism, W: int) -> GermMorphism:
    k = _restriction(C, g.source, W, g.U)
    return GermMorphism(g.source, g.target, W, C.compose(g.arrow, k))


def germ_eq(C: FiniteCategory, phi: Filter, a: GermMorphism, b: GermMorphism) -> bool:
    """Is there ``W`` in the filter below both ``U``s where the restrictions agree?"""
    if (a.source, a.target) != (b.source, b.target):
        raise ValueError("germs have different source or target")
    P = phi.poset
    for W in phi:
        if P.leq(W, a.U) and P.leq(W, b.U):
            if restrict(C, a, W).arrow == restrict(C, b, W).arrow:
                return True
    return False


# ---------------------------------------------------------------------------
# the quotient


@dataclass
class FilterQuotient:
    base: FiniteCategory
    filter: Filter
    category: FiniteCategory
    projection: Functor
    W0: int
    cones: list[Cone]  # X -> product cone of X x W0
    reps: np.ndarray  # quotient arrow -> representative h: X x W0 -> Y
    class_index: np.ndarray  # (X, h) -> quotient arrow
    info: dict = field(default_factory=dict)

    def class_of(self, X: int, h: int) -> int:
        c = int(self.class_index[X, h])
        if c < 0:
            raise ValueError("arrow is not a germ representative over W0")
        return c

    def germ_class(self, g: GermMorphism) -> int:
        """The quotient arrow of a germ, via restriction to ``W0``."""
        return self.class_of(g.source, restrict(self.base, g, self.W0).arrow)

    def germ_from_cone(self, cone: Cone, h: int, U: int) -> int:
        """Class of ``h : P -> Y`` where ``cone = (P, q1: P -> X, q2: P -> U)``
        is any product of ``X`` with a filter element ``U``."""
        C = self.base
        X = int(C.cod[cone.legs[0]])
        c0 = self.cones[X]
        r = C.hom(self.W0, U)
        if len(r) != 1:
            raise ValueError("filter element is not above W0")
        k = C.pair(cone, c0.legs[0], C.compose(int(r[0]), c0.legs[1]))
        return self.class_of(X, C.compose(h, k))

    def representatives(self, c: int, U: int) -> list[int]:
        """All ``f: X x U -> Y`` whose germ is the quotient arrow ``c``."""
        C, Q = self.base, self.category
        X, Y = int(Q.dom[c]), int(Q.cod[c])
        cone = C.product(X, U)
        k = _restriction(C, X, self.W0, U)
        H = C.hom(cone.apex, Y)
        return [int(f) for f in H[C.comp[H, k] == self.reps[c]]]

    def class_product(self, c: int, U: int) -> list[int]:
        """``f x U : X x U -> Y x U`` for every representative ``f`` of ``c``."""
        C, Q = self.base, self.category
        X, Y = int(Q.dom[c]), int(Q.cod[c])
        cx, cy = C.product(X, U), C.product(Y, U)
        return [C.pair(cy, f, cx.legs[1]) for f in self.representatives(c, U)]


def filter_quotient(C: FiniteCategory, phi: Filter, name: str = "") -> FilterQuotient:
    """Materialise ``C_Phi`` together with the projection functor."""
    if phi.category is not C:
        raise ValueError("filter lives on a different category")
    missing = [
        (C.objects[X], C.objects[U]) for X in range(C.n_objects) for U in phi if C.product(X, U) is None
    ]
    if missing:
        raise ValueError(f"missing products X x U: {missing[:5]}")
    W0 = phi.least()
    n = C.n_objects
    cones = [C.product(X, W0) for X in range(n)]
    reps_list: list[int] = []
    dom_list: list[int] = []
    cod_list: list[int] = []
    class_index = np.full((n, C.n_arrows), -1, dtype=np.int64)
    for X in range(n):
        for Y in range(n):
            for h in C.hom(cones[X].apex, Y):
                class_index[X, h] = len(reps_list)
                reps_list.append(int(h))
                dom_list.append(X)
                cod_list.append(Y)
    reps = np.array(reps_list, dtype=np.int64)
    nq = len(reps)
    qdom = np.array(dom_list, dtype=np.int64)
    qcod = np.array(cod_list, dtype=np.int64)
    ident = np.array([class_index[X, cones[X].legs[0]] for X in range(n)], dtype=np.int64)
    # <f, q2> : X x W0 -> Y x W0 for each class f
    lifted = np.array(
        [C.pair(cones[qcod[f]], int(reps[f]), cones[qdom[f]].legs[1]) for f in range(nq)], dtype=np.int64
    )
    order = np.argsort(qdom, kind="stable")
    starts = np.searchsorted(qdom[order], np.arange(n + 1))
    comp = np.full((nq, nq), -1, dtype=np.int32)
    for f in range(nq):
        gs = order[starts[qcod[f]] : starts[qcod[f] + 1]]
        if len(gs):
            comp[gs, f] = class_index[qdom[f], C.comp[reps[gs], lifted[f]]]
    # projection and display names
    pmap = np.array([class_index[C.dom[f], C.comp[f, cones[C.dom[f]].legs[0]]] for f in range(C.n_arrows)])
    names: list[str | None] = [None] * nq
    for f in range(C.n_arrows):
        c = int(pmap[f])
        if names[c] is None:
            names[c] = f"[{C.arrows[f]}]"
    for c in range(nq):
        if names[c] is None:
            names[c] = f"[{C.arrows[reps[c]]}|{C.objects[qdom[c]]}]"
    Q = FiniteCategory(
        C.objects,
        names,
        qdom,
        qcod,
        ident,
        comp,
        name=name or f"{C.name}/{phi.name or 'Phi'}",
        obj_data=C.obj_data,
    )
    P = Functor(C, Q, np.arange(n), pmap, name="P_Phi")
    return FilterQuotient(C, phi, Q, P, W0, cones, reps, class_index)


# ---------------------------------------------------------------------------
# verification


def _diagrams(C: FiniteCategory, kind: str):
    n = C.n_objects
    if kind == "terminal":
        yield Diagram.empty(C)
    elif kind == "product":
        for x in range(n):
            for y in range(n):
                yield Diagram.discrete(C, [x, y])
    elif kind == "pullback":
        for z in range(n):
            into = C.into(z)
            for f in into:
                for g in into:
                    yield Diagram.cospan(C, int(f), int(g))
    elif kind == "equalizer":
        for x in range(n):
            for y in range(n):
                H = C.hom(x, y)
                for f in H:
                    for g in H:
                        yield Diagram.parallel(C, int(f), int(g))
    else:
        raise ValueError(kind)


def check_limit_preservation(F: Functor, kind: str, co: bool = False) -> tuple[int, int, list]:
    """Over every diagram of the given shape whose (co)limit exists in the
    source, is the image cone a (co)limit?  Returns (checked, skipped, witnesses)."""
    S = F.source.op() if co else F.source
    G = F.op() if co else F
    checked = skipped = 0
    bad: list = []
    for D in _diagrams(S, kind):
        L = limit(D)
        if L is None:
            skipped += 1
            continue
        checked += 1
        image = Cone(int(G.obj_map[L.apex]), tuple(int(G.arr_map[p]) for p in L.legs))
        if not is_limit(D.along(G), image):
            bad.append((kind if not co else "co" + kind, [S.arrows[a] for a in D.arr_map]))
            break
    return checked, skipped, bad


_SHAPES = (
    ("terminal object", "terminal", False),
    ("binary products", "product", False),
    ("pullbacks", "pullback", False),
    ("equalizers", "equalizer", False),
    ("initial object", "terminal", True),
    ("binary coproducts", "product", True),
    ("pushouts", "pullback", True),
    ("coequalizers", "equalizer", True),
)


def check_preservation(F: Functor, rep: Report, anchor: str, exponentials: bool = True) -> None:
    """Finite (co)limits, monos, exponentials and the subobject classifier."""
    C, Q = F.source, F.target
    for label, kind, co in _SHAPES:
        checked, skipped, bad = check_limit_preservation(F, kind, co)
        rep.add(f"preserves {label}", not bad, bad, anchor=anchor,
                detail=f"{checked} diagrams, {skipped} without a (co)limit in the fragment")
    monos = np.flatnonzero(C.mono_mask())
    bad = [C.arrows[f] for f in monos if not Q.mono_mask()[F.arr_map[f]]]
    rep.add("preserves monomorphisms", not bad, bad[:3], anchor=anchor, detail=f"{len(monos)} monos")
    if exponentials:
        n_exp, bad = 0, []
        for X in range(C.n_objects):
            test = [a for a in range(Q.n_objects) if Q.product(a, int(F.obj_map[X])) is not None]
            for Y in range(C.n_objects):
                e = exponential(C, X, Y)
                if e is None:
                    continue
                n_exp += 1
                pe = e.product
                img = Cone(int(F.obj_map[pe.apex]), tuple(int(F.arr_map[p]) for p in pe.legs))
                ok = is_limit(Diagram.discrete(Q, [int(F.obj_map[e.obj]), int(F.obj_map[X])]), img)
                if not ok or not _ev_universal(Q, img, int(F.arr_map[e.ev]), int(F.obj_map[X]), test):
                    bad.append((C.objects[X], C.objects[Y]))
        rep.add("preserves exponentials", not bad, bad[:3], anchor=anchor, detail=f"{n_exp} exponentials")
    so = subobject_classifier(C)
    if so is None:
        rep.skip("preserves the subobject classifier", detail="no classifier in the fragment", anchor=anchor)
    else:
        ok, wit = is_subobject_classifier(Q, int(F.obj_map[so.omega]), int(F.arr_map[so.true]))
        rep.add("preserves the subobject classifier", ok, [wit] if not ok else [], anchor=anchor)


def verify_projection(C: FiniteCategory, phi: Filter, QC: FilterQuotient | None = None) -> Report:
    """Exhaustive check that ``P_Phi`` preserves the finite structure."""
    rep = Report(f"projection {C.name} -> {C.name}/{phi.name or 'Phi'}")
    base = validate_category(C)
    rep.extend(base, prefix="base: ")
    if not base.ok:
        return rep
    if QC is None:
        try:
            QC = filter_quotient(C, phi)
        except ValueError as exc:
            rep.add("quotient constructed", False, [str(exc)], anchor="filter-quotient")
            return rep
    rep.extend(validate_category(QC.category), prefix="quotient: ")
    rep.extend(QC.projection.check(), prefix="P_Phi: ")
    if not rep.ok:
        return rep
    check_preservation(QC.projection, rep, anchor="projection")
    return rep


def germ_mono_characterization(QC: FilterQuotient) -> Report:
    """For every germ: mono in ``C_Phi`` iff some ``f x U`` is mono in ``C``."""
    C, Q = QC.base, QC.category
    rep = Report(f"germ monos {Q.name}")
    mono_c = C.mono_mask()
    mono_q = Q.mono_mask()
    bad: list = []
    n_mono = 0
    witnesses: list = []
    for c in range(Q.n_arrows):
        found = None
        for U in QC.filter:
            if any(mono_c[k] for k in QC.class_product(c, U)):
                found = U
                break
        n_mono += bool(mono_q[c])
        if bool(mono_q[c]) != (found is not None):
            bad.append((Q.arrows[c], bool(mono_q[c])))
        elif found is not None and len(witnesses) < 5:
            witnesses.append((Q.arrows[c], C.objects[found]))
    rep.add("mono iff mono after some filter element", not bad, bad[:5], anchor="germ-mono",
            detail=f"{Q.n_arrows} germs, {n_mono} monos, {len(bad)} counterexamples")
    rep.checks[-1].witnesses = bad[:5] if bad else witnesses
    return rep


def mono_witness(QC: FilterQuotient, c: int) -> int | None:
    """A filter element ``U`` with some ``f x U`` mono, or None."""
    mono = QC.base.mono_mask()
    for U in QC.filter:
        if any(mono[k] for k in QC.class_product(c, U)):
            return U
    return None


def filter_maps_into(F: Functor, phi_c: Filter, phi_d: Filter) -> list[str]:
    """Elements of ``phi_c`` whose image is not in ``phi_d``."""
    return [F.source.objects[U] for U in phi_c if int(F.obj_map[U]) not in phi_d]


def induced_functor(F: Functor, QC: FilterQuotient, QD: FilterQuotient) -> Functor:
    """``F_Phi : C_Phi -> D_Phi``; requires ``F`` to send the filter into the
    filter and to preserve the products ``X x W0``."""
    C, D = QC.base, QD.base
    if F.source is not C or F.target is not D:
        raise ValueError("functor does not match the quotients")
    stray = filter_maps_into(F, QC.filter, QD.filter)
    if stray:
        raise ValueError(f"functor does not map the filter into the filter: {stray}")
    U = int(F.obj_map[QC.W0])
    amap = np.empty(QC.category.n_arrows, dtype=np.int64)
    images: dict[int, Cone] = {}
    for X in range(C.n_objects):
        c = QC.cones[X]
        img = Cone(int(F.obj_map[c.apex]), (int(F.arr_map[c.legs[0]]), int(F.arr_map[c.legs[1]])))
        if not is_limit(Diagram.discrete(D, [int(F.obj_map[X]), U]), img):
            raise ValueError(f"functor does not preserve the product {C.objects[X]} x W0")
        images[X] = img
    for q in range(QC.category.n_arrows):
        X = int(QC.category.dom[q])
        amap[q] = QD.germ_from_cone(images[X], int(F.arr_map[QC.reps[q]]), U)
    return Functor(QC.category, QD.category, F.obj_map, amap, name=f"{F.name}_Phi")


def is_isomorphism(F: Functor) -> bool:
    return (
        len(set(F.obj_map.tolist())) == F.target.n_objects == F.source.n_objects
        and len(set(F.arr_map.tolist())) == F.target.n_arrows == F.source.n_arrows
        and F.check().ok
    )
