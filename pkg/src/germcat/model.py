"""Model structures on finite categories and their filter quotients."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .fincat import FiniteCategory, Functor
from .filtquot import Filter, FilterQuotient, filter_quotient
from .report import Report

__all__ = [
    "MorphismClass",
    "ModelStructureData",
    "TransferResult",
    "has_lift",
    "lifting_matrix",
    "parse_class",
    "product_with",
    "right_proper",
    "transfer_model_structure",
    "validate_model_filter",
    "verify_model_structure",
    "verify_wfs",
]


@dataclass(frozen=True)
class MorphismClass:
    """A set of arrows, kept as a boolean mask over ``category.arrows``."""

    category: FiniteCategory
    mask: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        m = np.asarray(self.mask, dtype=bool).copy()
        if m.shape != (self.category.n_arrows,):
            raise ValueError("class mask must cover every arrow")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    def __contains__(self, f: int) -> bool:
        return bool(self.mask[int(f)])

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __and__(self, other: "MorphismClass") -> "MorphismClass":
        return MorphismClass(self.category, self.mask & other.mask, f"{self.name}&{other.name}")

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MorphismClass)
            and other.category is self.category
            and bool((other.mask == self.mask).all())
        )

    def __hash__(self) -> int:
        return hash(self.mask.tobytes())

    def arrows(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def without(self, f: int) -> "MorphismClass":
        m = self.mask.copy()
        m[f] = False
        return MorphismClass(self.category, m, f"{self.name}-{self.category.arrows[f]}")

    def with_(self, f: int) -> "MorphismClass":
        m = self.mask.copy()
        m[f] = True
        return MorphismClass(self.category, m, f"{self.name}+{self.category.arrows[f]}")

    # common classes
    @classmethod
    def all(cls, C: FiniteCategory) -> "MorphismClass":
        return cls(C, np.ones(C.n_arrows, dtype=bool), "all")

    @classmethod
    def isos(cls, C: FiniteCategory) -> "MorphismClass":
        return cls(C, C.iso_mask(), "isos")

    @classmethod
    def identities(cls, C: FiniteCategory) -> "MorphismClass":
        m = np.zeros(C.n_arrows, dtype=bool)
        m[C.ident] = True
        return cls(C, m, "identities")

    @classmethod
    def monos(cls, C: FiniteCategory) -> "MorphismClass":
        return cls(C, C.mono_mask(), "monos")

    @classmethod
    def epis(cls, C: FiniteCategory) -> "MorphismClass":
        return cls(C, C.epi_mask(), "epis")

    @classmethod
    def explicit(cls, C: FiniteCategory, arrows: Iterable[int | str], name: str = "explicit") -> "MorphismClass":
        m = np.zeros(C.n_arrows, dtype=bool)
        for a in arrows:
            m[C.arr(a)] = True
        return cls(C, m, name)

    @classmethod
    def component_iso(cls, C: FiniteCategory, factors: list[FiniteCategory], i: int) -> "MorphismClass":
        """Arrows of a product category whose ``i``-th component (1-based) is iso."""
        if C.arr_data is None or not isinstance(C.arr_data[0], tuple):
            raise ValueError("component-iso needs a product category")
        F = factors[i - 1]
        iso = F.iso_mask()
        return cls(C, np.array([iso[t[i - 1]] for t in C.arr_data]), f"component-iso {i}")


def parse_class(C: FiniteCategory, text: str, factors: list[FiniteCategory] | None = None) -> MorphismClass:
    """``isos | all | identities | monos | epis | explicit {ids} | component-iso <i>``."""
    text = text.strip()
    simple = {
        "isos": MorphismClass.isos,
        "all": MorphismClass.all,
        "identities": MorphismClass.identities,
        "monos": MorphismClass.monos,
        "epis": MorphismClass.epis,
    }
    if text in simple:
        return simple[text](C)
    m = re.match(r"^explicit\s*\{(.*)\}$", text)
    if m:
        names = [s.strip() for s in re.split(r",(?![^()\[\]]*[)\]])", m.group(1)) if s.strip()]
        return MorphismClass.explicit(C, names)
    m = re.match(r"^component-iso\s+(\d+)$", text)
    if m:
        if factors is None:
            raise ValueError("component-iso needs the factor categories")
        return MorphismClass.component_iso(C, factors, int(m.group(1)))
    raise ValueError(f"bad class specification {text!r}")


@dataclass(frozen=True)
class ModelStructureData:
    category: FiniteCategory
    F: MorphismClass
    C: MorphismClass
    W: MorphismClass
    name: str = ""


# ---------------------------------------------------------------------------
# lifting


def has_lift(C: FiniteCategory, i: int, p: int, u: int, v: int) -> int | None:
    """A diagonal ``d`` with ``d i == u`` and ``p d == v`` for the square
    ``p u == v i``, or None.  Raises on a non-commuting square."""
    if C.dom[u] != C.dom[i] or C.cod[u] != C.dom[p] or C.dom[v] != C.cod[i] or C.cod[v] != C.cod[p]:
        raise ValueError("square arrows have the wrong shape")
    if C.comp[p, u] != C.comp[v, i]:
        raise ValueError("square does not commute")
    D = C.hom(int(C.cod[i]), int(C.dom[p]))
    ok = (C.comp[D, i] == u) & (C.comp[p, D] == v)
    hit = D[ok]
    return int(hit[0]) if len(hit) else None


def lifting_failure(C: FiniteCategory, i: int, p: int) -> tuple[int, int] | None:
    """A commuting square ``(u, v)`` from ``i`` to ``p`` with no diagonal."""
    a, b = int(C.dom[i]), int(C.cod[i])
    x, y = int(C.dom[p]), int(C.cod[p])
    return kernels.first_lifting_failure(C.comp, int(i), int(p), C.hom(a, x), C.hom(b, y), C.hom(b, x))


def lifting_matrix(C: FiniteCategory) -> np.ndarray:
    """``M[i, p]`` is True iff ``i`` has the left lifting property against ``p``."""
    if "lift" not in C._cache:
        n = C.n_arrows
        M = np.zeros((n, n), dtype=bool)
        for i in range(n):
            for p in range(n):
                M[i, p] = lifting_failure(C, i, p) is None
        M.setflags(write=False)
        C._cache["lift"] = M
    return C._cache["lift"]


# ---------------------------------------------------------------------------
# verification


def _factorization_gaps(C: FiniteCategory, L: np.ndarray, R: np.ndarray) -> list[int]:
    """Arrows that do not factor as an R-arrow after an L-arrow."""
    n = C.n_objects
    gaps = []
    for x in range(n):
        for z in range(n):
            H = C.hom(x, z)
            if not len(H):
                continue
            reached: set[int] = set()
            for y in range(n):
                ls = C.hom(x, y)
                rs = C.hom(y, z)
                ls, rs = ls[L[ls]], rs[R[rs]]
                if len(ls) and len(rs):
                    reached.update(np.unique(C.comp[rs[:, None], ls[None, :]]).tolist())
            gaps.extend(int(h) for h in H if int(h) not in reached)
    return gaps


def verify_wfs(C: FiniteCategory, L: MorphismClass, R: MorphismClass, label: str = "") -> Report:
    """Factorisation, lifting, and ``L = llp(R)``, ``R = rlp(L)``."""
    rep = Report(f"wfs {label or f'({L.name}, {R.name})'} on {C.name}")
    gaps = _factorization_gaps(C, L.mask, R.mask)
    rep.add("every arrow factors as L then R", not gaps, [C.arrows[g] for g in gaps[:3]], anchor="wfs",
            detail=f"{len(gaps)} arrows without a factorisation")
    M = lifting_matrix(C)
    li, ri = L.arrows(), R.arrows()
    bad = np.argwhere(~M[np.ix_(li, ri)])
    wit = []
    if len(bad):
        i, p = int(li[bad[0, 0]]), int(ri[bad[0, 1]])
        u, v = lifting_failure(C, i, p)
        wit = [{"i": C.arrows[i], "p": C.arrows[p], "u": C.arrows[u], "v": C.arrows[v]}]
    rep.add("L lifts against R", not len(bad), wit, anchor="wfs", detail=f"{len(li)} x {len(ri)} pairs")
    llp = M[:, ri].all(axis=1) if len(ri) else np.ones(C.n_arrows, dtype=bool)
    rlp = M[li, :].all(axis=0) if len(li) else np.ones(C.n_arrows, dtype=bool)
    extra = np.flatnonzero(llp & ~L.mask)
    rep.add("L is everything lifting against R", not len(extra), [C.arrows[f] for f in extra[:3]], anchor="wfs")
    extra = np.flatnonzero(rlp & ~R.mask)
    rep.add("R is everything R-lifting against L", not len(extra), [C.arrows[f] for f in extra[:3]], anchor="wfs")
    return rep


def two_out_of_three_failures(C: FiniteCategory, W: MorphismClass) -> list[tuple[int, int]]:
    g, f = np.nonzero(C.comp >= 0)
    gf = C.comp[g, f]
    w = W.mask
    cnt = w[f].astype(int) + w[g].astype(int) + w[gf].astype(int)
    bad = np.flatnonzero(cnt == 2)
    return [(int(g[k]), int(f[k])) for k in bad]


def verify_model_structure(M: ModelStructureData) -> Report:
    C = M.category
    rep = Report(f"model structure {M.name or ''} on {C.name}".replace("  ", " "))
    rep.extend(verify_wfs(C, M.C & M.W, M.F, "(C&W, F)"), prefix="(C&W, F): ")
    rep.extend(verify_wfs(C, M.C, M.F & M.W, "(C, F&W)"), prefix="(C, F&W): ")
    bad = two_out_of_three_failures(C, M.W)
    rep.add("two-out-of-three for W", not bad, [(C.arrows[g], C.arrows[f]) for g, f in bad[:3]],
            anchor="model-axioms")
    for c in rep.checks:
        if not c.anchor:
            c.anchor = "model-axioms"
    return rep


def product_with(C: FiniteCategory, f: int, U: int) -> int | None:
    """``f x U : X x U -> Y x U`` on canonical products, None if one is missing."""
    X, Y = int(C.dom[f]), int(C.cod[f])
    cx, cy = C.product(X, U), C.product(Y, U)
    if cx is None or cy is None:
        return None
    return C.product_map(cx, cy, f, C.identity(U))


def stability_failures(S: MorphismClass, phi: Filter) -> list[tuple[int, int]]:
    """Pairs ``(f, U)`` with ``f`` in ``S`` but ``f x U`` not in ``S``."""
    C = S.category
    out = []
    for f in S.arrows():
        for U in phi:
            g = product_with(C, int(f), U)
            if g is None or g not in S:
                out.append((int(f), U))
    return out


def validate_model_filter(M: ModelStructureData, phi: Filter, check_model: bool = True) -> Report:
    C = M.category
    rep = Report(f"model filter {phi.name} on {C.name}")
    if check_model:
        base = verify_model_structure(M)
        rep.add("host is a model structure", base.ok,
                [f"{c.name}: {c.witnesses[:1]}" for c in base.failures[:1]], anchor="model-axioms")
    t = C.terminal()
    bad = [C.objects[U] for U in phi if t is None or C.bang(U) not in M.F]
    rep.add("every filter element is fibrant", not bad, bad, anchor="model-filter")
    for label, S in (("cofibrations", M.C), ("weak equivalences", M.W)):
        bad = stability_failures(S, phi)
        rep.add(f"{label} are filter-product stable", not bad,
                [{"f": C.arrows[f], "U": C.objects[U]} for f, U in bad[:3]], anchor="model-filter",
                detail=f"{len(S)} arrows x {len(phi)} filter elements")
    return rep


def transferred_class(S: MorphismClass, QC: FilterQuotient, name: str = "") -> MorphismClass:
    """``S_Phi``: germs with some representative ``f`` and ``U`` in the filter
    such that ``f x U`` lies in ``S``."""
    Q = QC.category
    mask = np.zeros(Q.n_arrows, dtype=bool)
    for c in range(Q.n_arrows):
        mask[c] = any(k in S for U in QC.filter for k in QC.class_product(c, U))
    return MorphismClass(Q, mask, name or f"{S.name}_Phi")


def right_proper(M: ModelStructureData) -> Report:
    """Pullbacks of weak equivalences along fibrations are weak equivalences
    (wherever the pullback exists in the fragment)."""
    C = M.category
    rep = Report(f"right properness on {C.name}")
    checked = skipped = 0
    bad = []
    for w in M.W.arrows():
        for p in M.F.arrows():
            if C.cod[p] != C.cod[w]:
                continue
            pb = C.pullback(int(w), int(p))
            if pb is None:
                skipped += 1
                continue
            checked += 1
            if pb.legs[1] not in M.W:
                bad.append((C.arrows[w], C.arrows[p]))
    rep.add("pullback of W along F is in W", not bad, bad[:3], anchor="transfer",
            detail=f"{checked} squares, {skipped} pullbacks outside the fragment")
    return rep


@dataclass
class TransferResult:
    structure: ModelStructureData | None
    quotient: FilterQuotient | None
    report: Report


def transfer_model_structure(M: ModelStructureData, phi: Filter, QC: FilterQuotient | None = None) -> TransferResult:
    """The induced model structure on ``M_Phi``, fully re-verified."""
    rep = Report(f"transfer along {phi.name} on {M.category.name}")
    pre = validate_model_filter(M, phi)
    rep.extend(pre, prefix="precondition: ")
    if not pre.ok:
        return TransferResult(None, None, rep)
    QC = QC or filter_quotient(M.category, phi)
    F = transferred_class(M.F, QC, "F_Phi")
    Cc = transferred_class(M.C, QC, "C_Phi")
    W = transferred_class(M.W, QC, "W_Phi")
    MQ = ModelStructureData(QC.category, F, Cc, W, name=f"{M.name}_Phi")
    rep.extend(verify_model_structure(MQ), prefix="quotient: ")
    P: Functor = QC.projection
    for S, SQ, label in ((M.F, F, "fibrations"), (M.C, Cc, "cofibrations"), (M.W, W, "weak equivalences")):
        bad = [M.category.arrows[f] for f in S.arrows() if P.arr_map[f] not in SQ]
        rep.add(f"P_Phi preserves {label}", not bad, bad[:3], anchor="transfer")
    if right_proper(M).ok:
        rep.extend(right_proper(MQ), prefix="quotient: ")
    return TransferResult(MQ, QC, rep)
