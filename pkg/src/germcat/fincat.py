"""Finite categories given by explicit composition tables.

Objects and arrows are integers ``0..n-1``; names are kept only for display and
parsing.  ``comp[g, f]`` is ``g o f`` or ``-1`` when ``cod f != dom g``.  Every
universal property is decided by exhaustive search, and a construction whose
result would leave the tabulated fragment returns ``None``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .report import Report

__all__ = [
    "Cone",
    "Diagram",
    "Exponential",
    "FiniteCategory",
    "Functor",
    "SubobjectClassifier",
    "SubterminalPoset",
    "colimit",
    "cones",
    "exponential",
    "exponential_candidates",
    "is_epi",
    "is_limit",
    "is_mono",
    "is_subobject_classifier",
    "kernel_pair_is_trivial",
    "limit",
    "subobject_classifier",
    "subobjects",
    "subterminal_poset",
    "validate_category",
]


def _ro(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class FiniteCategory:
    """An immutable finite category.

    Derived data (hom-sets, products, mono masks, ...) is memoised in a private
    cache; entries are pure functions of the table, so concurrent readers can
    at worst compute the same value twice.
    """

    def __init__(
        self,
        objects: Sequence[str],
        arrows: Sequence[str],
        dom: Sequence[int],
        cod: Sequence[int],
        identities: Sequence[int],
        comp: np.ndarray,
        *,
        name: str = "",
        obj_data: Sequence[Any] | None = None,
        arr_data: Sequence[Any] | None = None,
    ) -> None:
        self.name = name
        self.objects: tuple[str, ...] = tuple(str(o) for o in objects)
        self.arrows: tuple[str, ...] = tuple(str(a) for a in arrows)
        self.dom = _ro(np.asarray(dom, dtype=np.int64).copy())
        self.cod = _ro(np.asarray(cod, dtype=np.int64).copy())
        self.ident = _ro(np.asarray(identities, dtype=np.int64).copy())
        self.comp = _ro(np.ascontiguousarray(comp, dtype=np.int32).copy())
        self.obj_data = tuple(obj_data) if obj_data is not None else None
        self.arr_data = tuple(arr_data) if arr_data is not None else None
        n, na = len(self.objects), len(self.arrows)
        if self.dom.shape != (na,) or self.cod.shape != (na,):
            raise ValueError("dom/cod must have one entry per arrow")
        if self.ident.shape != (n,):
            raise ValueError("identities must have one entry per object")
        if self.comp.shape != (na, na):
            raise ValueError("composition table must be square in the arrows")
        self._obj_index = {o: i for i, o in enumerate(self.objects)}
        self._arr_index = {a: i for i, a in enumerate(self.arrows)}
        if len(self._obj_index) != n or len(self._arr_index) != na:
            raise ValueError("object and arrow names must be unique")
        key = self.dom * max(n, 1) + self.cod
        order = np.argsort(key, kind="stable")
        self._by_dc = _ro(order.astype(np.int64))
        self._hom_start = _ro(np.searchsorted(key[order], np.arange(n * n + 1)).astype(np.int64))
        self._cache: dict[Any, Any] = {}

    # -- construction --------------------------------------------------

    @classmethod
    def from_concrete(
        cls,
        objects: Sequence[str],
        arrows: Sequence[tuple[int, int, Hashable]],
        compose: Callable[[Hashable, Hashable], Hashable],
        identity: Callable[[int], Hashable],
        *,
        arrow_name: Callable[[int, int, Hashable], str] | None = None,
        name: str = "",
        obj_data: Sequence[Any] | None = None,
    ) -> "FiniteCategory":
        """Tabulate a category whose arrows are ``(dom, cod, data)`` triples.

        ``compose(g_data, f_data)`` must return the data of ``g o f``.
        """
        index = {a: k for k, a in enumerate(arrows)}
        if len(index) != len(arrows):
            raise ValueError("duplicate arrows")
        na = len(arrows)
        out_of: list[list[int]] = [[] for _ in objects]
        for k, (d, _, _) in enumerate(arrows):
            out_of[d].append(k)
        comp = np.full((na, na), -1, dtype=np.int32)
        for f, (d, c, fd) in enumerate(arrows):
            for g in out_of[c]:
                _, c2, gd = arrows[g]
                comp[g, f] = index[(d, c2, compose(gd, fd))]
        ident = [index[(i, i, identity(i))] for i in range(len(objects))]
        namer = arrow_name or (lambda d, c, data: f"{objects[d]}->{objects[c]}:{data}")
        names = [namer(d, c, data) for d, c, data in arrows]
        return cls(
            objects,
            names,
            [a[0] for a in arrows],
            [a[1] for a in arrows],
            ident,
            comp,
            name=name,
            obj_data=obj_data,
            arr_data=[a[2] for a in arrows],
        )

    # -- basic access --------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_arrows(self) -> int:
        return len(self.arrows)

    def __repr__(self) -> str:
        return f"<FiniteCategory {self.name or '?'}: {self.n_objects} objects, {self.n_arrows} arrows>"

    def obj(self, name: str | int) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self._obj_index[name]
        except KeyError:
            raise KeyError(f"unknown object {name!r} in {self.name or 'category'}") from None

    def arr(self, name: str | int) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self._arr_index[name]
        except KeyError:
            raise KeyError(f"unknown arrow {name!r} in {self.name or 'category'}") from None

    def has_object(self, name: str) -> bool:
        return name in self._obj_index

    def hom(self, x: int, y: int) -> np.ndarray:
        k = int(x) * self.n_objects + int(y)
        return self._by_dc[self._hom_start[k] : self._hom_start[k + 1]]

    def hom_sizes(self) -> np.ndarray:
        """Matrix of ``|Hom(x, y)|``."""
        if "homsize" not in self._cache:
            n = self.n_objects
            self._cache["homsize"] = _ro(np.diff(self._hom_start).reshape(n, n))
        return self._cache["homsize"]

    def out_of(self, x: int) -> np.ndarray:
        n = self.n_objects
        return self._by_dc[self._hom_start[x * n] : self._hom_start[(x + 1) * n]]

    def into(self, y: int) -> np.ndarray:
        return np.flatnonzero(self.cod == y)

    def identity(self, x: int) -> int:
        return int(self.ident[x])

    def compose(self, *fs: int) -> int:
        """``compose(h, g, f) == h o g o f``; raises on a non-composable pair."""
        out = int(fs[-1])
        for g in reversed(fs[:-1]):
            nxt = int(self.comp[int(g), out])
            if nxt < 0:
                raise ValueError(f"{self.arrows[g]} and {self.arrows[out]} are not composable")
            out = nxt
        return out

    def is_identity(self, f: int) -> bool:
        return int(self.ident[self.dom[f]]) == int(f)

    def describe(self, f: int) -> str:
        return f"{self.arrows[f]}: {self.objects[self.dom[f]]} -> {self.objects[self.cod[f]]}"

    # -- derived categories --------------------------------------------

    def op(self) -> "FiniteCategory":
        if "op" not in self._cache:
            D = FiniteCategory(
                self.objects,
                self.arrows,
                self.cod,
                self.dom,
                self.ident,
                np.ascontiguousarray(self.comp.T),
                name=f"{self.name}^op",
                obj_data=self.obj_data,
                arr_data=self.arr_data,
            )
            D._cache["op"] = self
            self._cache["op"] = D
        return self._cache["op"]

    def full_subcategory(self, objs: Iterable[int], name: str = "") -> tuple["FiniteCategory", "Functor"]:
        """The full subcategory on ``objs`` with its inclusion functor."""
        objs = sorted({int(o) for o in objs})
        omap = np.full(self.n_objects, -1, dtype=np.int64)
        omap[objs] = np.arange(len(objs))
        keep = np.flatnonzero((omap[self.dom] >= 0) & (omap[self.cod] >= 0))
        amap = np.full(self.n_arrows, -1, dtype=np.int64)
        amap[keep] = np.arange(len(keep))
        sub = self.comp[np.ix_(keep, keep)]
        comp = np.where(sub >= 0, amap[np.maximum(sub, 0)], -1)
        D = FiniteCategory(
            [self.objects[o] for o in objs],
            [self.arrows[a] for a in keep],
            omap[self.dom[keep]],
            omap[self.cod[keep]],
            amap[self.ident[objs]],
            comp,
            name=name or f"{self.name}|sub",
            obj_data=[self.obj_data[o] for o in objs] if self.obj_data else None,
            arr_data=[self.arr_data[a] for a in keep] if self.arr_data else None,
        )
        return D, Functor(D, self, np.array(objs, dtype=np.int64), keep)

    def permuted(self, obj_perm: Sequence[int], arr_perm: Sequence[int], rename: bool = False) -> "FiniteCategory":
        """An isomorphic copy: old object ``i`` becomes ``obj_perm[i]``."""
        op_ = np.asarray(obj_perm, dtype=np.int64)
        ap = np.asarray(arr_perm, dtype=np.int64)
        inv_o = np.argsort(op_)
        inv_a = np.argsort(ap)
        comp = self.comp[np.ix_(inv_a, inv_a)]
        comp = np.where(comp >= 0, ap[np.maximum(comp, 0)], -1)
        objects = [f"o{i}" if rename else self.objects[inv_o[i]] for i in range(self.n_objects)]
        arrows = [f"a{i}" if rename else self.arrows[inv_a[i]] for i in range(self.n_arrows)]
        return FiniteCategory(
            objects,
            arrows,
            op_[self.dom[inv_a]],
            op_[self.cod[inv_a]],
            ap[self.ident[inv_o]],
            comp,
            name=f"{self.name}~",
        )

    # -- masks and small searches --------------------------------------

    def iso_mask(self) -> np.ndarray:
        if "iso" not in self._cache:
            mask = np.zeros(self.n_arrows, dtype=bool)
            inv = np.full(self.n_arrows, -1, dtype=np.int64)
            n = self.n_objects
            for x in range(n):
                for y in range(n):
                    F, G = self.hom(x, y), self.hom(y, x)
                    if not len(F) or not len(G):
                        continue
                    a = self.comp[G[:, None], F[None, :]] == self.ident[x]
                    b = self.comp[F[None, :], G[:, None]] == self.ident[y]
                    both = a & b
                    hit = both.any(axis=0)
                    mask[F[hit]] = True
                    inv[F[hit]] = G[np.argmax(both[:, hit], axis=0)]
            self._cache["iso"] = _ro(mask)
            self._cache["inverse"] = _ro(inv)
        return self._cache["iso"]

    def is_iso(self, f: int) -> bool:
        return bool(self.iso_mask()[f])

    def inverse(self, f: int) -> int | None:
        self.iso_mask()
        g = int(self._cache["inverse"][f])
        return g if g >= 0 else None

    def isomorphic(self, x: int, y: int) -> bool:
        return bool(self.iso_mask()[self.hom(x, y)].any())

    def iso_classes(self) -> list[list[int]]:
        """Objects grouped by isomorphism, each group in index order."""
        if "isoclasses" not in self._cache:
            seen: dict[int, int] = {}
            groups: list[list[int]] = []
            for x in range(self.n_objects):
                for g, grp in enumerate(groups):
                    if self.isomorphic(grp[0], x):
                        grp.append(x)
                        seen[x] = g
                        break
                else:
                    seen[x] = len(groups)
                    groups.append([x])
            self._cache["isoclasses"] = groups
        return self._cache["isoclasses"]

    def mono_mask(self) -> np.ndarray:
        if "mono" not in self._cache:
            mask = np.ones(self.n_arrows, dtype=bool)
            n = self.n_objects
            for x in range(n):
                fs = self.out_of(x)
                if not len(fs):
                    continue
                for a in range(n):
                    H = self.hom(a, x)
                    if len(H) < 2:
                        continue
                    vals = np.sort(self.comp[fs[:, None], H[None, :]], axis=1)
                    dup = (vals[:, 1:] == vals[:, :-1]).any(axis=1)
                    mask[fs[dup]] = False
            self._cache["mono"] = _ro(mask)
        return self._cache["mono"]

    def epi_mask(self) -> np.ndarray:
        return self.op().mono_mask()

    def terminal(self) -> int | None:
        if "terminal" not in self._cache:
            c = limit(Diagram.empty(self))
            self._cache["terminal"] = None if c is None else c.apex
        return self._cache["terminal"]

    def initial(self) -> int | None:
        return self.op().terminal()

    def bang(self, x: int) -> int:
        """The unique arrow ``x -> 1``."""
        t = self.terminal()
        if t is None:
            raise ValueError("no terminal object")
        return int(self.hom(x, t)[0])

    def product(self, x: int, y: int) -> "Cone | None":
        key = ("prod", int(x), int(y))
        if key not in self._cache:
            self._cache[key] = limit(Diagram.discrete(self, [x, y]))
        return self._cache[key]

    def coproduct(self, x: int, y: int) -> "Cone | None":
        return self.op().product(x, y)

    def pullback(self, f: int, g: int) -> "Cone | None":
        """Limit of ``f -> . <- g``; legs are (to dom f, to dom g, to the base)."""
        key = ("pb", int(f), int(g))
        if key not in self._cache:
            self._cache[key] = limit(Diagram.cospan(self, f, g))
        return self._cache[key]

    def factor_through(self, cone: "Cone", legs: Sequence[int]) -> int | None:
        """The unique ``k`` with ``cone.legs[j] o k == legs[j]``, if any."""
        if not legs:
            raise ValueError("factor_through needs at least one leg")
        a = int(self.dom[legs[0]])
        H = self.hom(a, cone.apex)
        ok = np.ones(len(H), dtype=bool)
        for p, f in zip(cone.legs, legs):
            ok &= self.comp[p, H] == f
        hit = H[ok]
        return int(hit[0]) if len(hit) == 1 else None

    def pair(self, cone: "Cone", f: int, g: int) -> int:
        k = self.factor_through(cone, [f, g])
        if k is None:
            raise ValueError("arrows do not factor uniquely through the product")
        return k

    def product_map(self, src: "Cone", tgt: "Cone", f: int, g: int) -> int:
        """``f x g : src.apex -> tgt.apex``."""
        return self.pair(tgt, self.compose(f, src.legs[0]), self.compose(g, src.legs[1]))


# ---------------------------------------------------------------------------
# functors and diagrams


class Functor:
    """A functor between finite categories as two index maps."""

    def __init__(self, source: FiniteCategory, target: FiniteCategory, obj_map, arr_map, name: str = "") -> None:
        self.source = source
        self.target = target
        self.obj_map = _ro(np.asarray(obj_map, dtype=np.int64).reshape(-1).copy())
        self.arr_map = _ro(np.asarray(arr_map, dtype=np.int64).reshape(-1).copy())
        self.name = name
        if self.obj_map.shape != (source.n_objects,) or self.arr_map.shape != (source.n_arrows,):
            raise ValueError("functor maps must cover the source category")

    def __repr__(self) -> str:
        return f"<Functor {self.name or '?'}: {self.source.name} -> {self.target.name}>"

    def __call__(self, f: int) -> int:
        return int(self.arr_map[f])

    def on_obj(self, x: int) -> int:
        return int(self.obj_map[x])

    @classmethod
    def identity(cls, C: FiniteCategory) -> "Functor":
        return cls(C, C, np.arange(C.n_objects), np.arange(C.n_arrows), name=f"id_{C.name}")

    def then(self, other: "Functor") -> "Functor":
        """``other o self``."""
        if other.source is not self.target:
            raise ValueError("functors are not composable")
        return Functor(
            self.source,
            other.target,
            other.obj_map[self.obj_map],
            other.arr_map[self.arr_map],
            name=f"{other.name}.{self.name}",
        )

    def op(self) -> "Functor":
        return Functor(self.source.op(), self.target.op(), self.obj_map, self.arr_map, name=f"{self.name}^op")

    def check(self) -> Report:
        """Exhaustive functoriality check."""
        S, T = self.source, self.target
        rep = Report(f"functor {self.name}")
        om, am = self.obj_map, self.arr_map
        bad_range = np.flatnonzero((am < 0) | (am >= T.n_arrows))
        bad_obj = np.flatnonzero((om < 0) | (om >= T.n_objects))
        rep.add("maps land in the target", not len(bad_range) and not len(bad_obj),
                [S.arrows[i] for i in bad_range[:3]] + [S.objects[i] for i in bad_obj[:3]])
        if not rep.ok:
            return rep
        bad = np.flatnonzero((T.dom[am] != om[S.dom]) | (T.cod[am] != om[S.cod]))
        rep.add("domains and codomains preserved", not len(bad), [S.arrows[i] for i in bad[:3]])
        bad = np.flatnonzero(am[S.ident] != T.ident[om])
        rep.add("identities preserved", not len(bad), [S.objects[i] for i in bad[:3]])
        g, f = np.nonzero(S.comp >= 0)
        lhs = am[S.comp[g, f]]
        rhs = T.comp[am[g], am[f]]
        bad = np.flatnonzero(lhs != rhs)
        rep.add("composition preserved", not len(bad),
                [(S.arrows[g[i]], S.arrows[f[i]]) for i in bad[:3]], anchor="category-laws")
        return rep

    def is_functor(self) -> bool:
        return self.check().ok


def _shape(objects: Sequence[str], arrows: Sequence[tuple[str, int, int]], name: str) -> FiniteCategory:
    """A free shape with no composable non-identity pairs."""
    n = len(objects)
    names = [f"id_{o}" for o in objects] + [a[0] for a in arrows]
    dom = list(range(n)) + [a[1] for a in arrows]
    cod = list(range(n)) + [a[2] for a in arrows]
    na = len(names)
    comp = np.full((na, na), -1, dtype=np.int32)
    for f in range(na):
        for g in range(na):
            if cod[f] != dom[g]:
                continue
            if g < n:
                comp[g, f] = f
            elif f < n:
                comp[g, f] = g
            else:
                raise ValueError("shape arrows must not compose")
    return FiniteCategory(objects, names, dom, cod, list(range(n)), comp, name=name)


_SHAPES: dict[str, FiniteCategory] = {}


def shape(kind: str, n: int = 0) -> FiniteCategory:
    """Common diagram shapes: ``discrete`` (n objects), ``cospan``, ``span``, ``parallel``."""
    key = f"{kind}{n}"
    if key not in _SHAPES:
        if kind == "discrete":
            _SHAPES[key] = _shape([f"j{i}" for i in range(n)], [], key)
        elif kind == "cospan":
            _SHAPES[key] = _shape(["a", "b", "c"], [("u", 0, 2), ("v", 1, 2)], key)
        elif kind == "span":
            _SHAPES[key] = _shape(["a", "b", "c"], [("u", 2, 0), ("v", 2, 1)], key)
        elif kind == "parallel":
            _SHAPES[key] = _shape(["a", "b"], [("u", 0, 1), ("v", 0, 1)], key)
        else:
            raise ValueError(f"unknown shape {kind!r}")
    return _SHAPES[key]


class Diagram(Functor):
    """A functor out of a small shape, used as input to (co)limit search."""

    @classmethod
    def of(cls, C: FiniteCategory, J: FiniteCategory, objs: Sequence[int], arrows: Sequence[int]) -> "Diagram":
        return cls(J, C, objs, arrows)

    @classmethod
    def empty(cls, C: FiniteCategory) -> "Diagram":
        return cls(shape("discrete", 0), C, [], [])

    @classmethod
    def discrete(cls, C: FiniteCategory, objs: Sequence[int]) -> "Diagram":
        objs = [int(o) for o in objs]
        return cls(shape("discrete", len(objs)), C, objs, [C.ident[o] for o in objs])

    @classmethod
    def cospan(cls, C: FiniteCategory, f: int, g: int) -> "Diagram":
        if C.cod[f] != C.cod[g]:
            raise ValueError("cospan arrows must share a codomain")
        a, b, c = int(C.dom[f]), int(C.dom[g]), int(C.cod[f])
        return cls(shape("cospan"), C, [a, b, c], [C.ident[a], C.ident[b], C.ident[c], f, g])

    @classmethod
    def span(cls, C: FiniteCategory, f: int, g: int) -> "Diagram":
        if C.dom[f] != C.dom[g]:
            raise ValueError("span arrows must share a domain")
        a, b, c = int(C.cod[f]), int(C.cod[g]), int(C.dom[f])
        return cls(shape("span"), C, [a, b, c], [C.ident[a], C.ident[b], C.ident[c], f, g])

    @classmethod
    def parallel(cls, C: FiniteCategory, f: int, g: int) -> "Diagram":
        if C.dom[f] != C.dom[g] or C.cod[f] != C.cod[g]:
            raise ValueError("parallel arrows must share domain and codomain")
        a, b = int(C.dom[f]), int(C.cod[f])
        return cls(shape("parallel"), C, [a, b], [C.ident[a], C.ident[b], f, g])

    def op(self) -> "Diagram":
        return Diagram(self.source.op(), self.target.op(), self.obj_map, self.arr_map)

    def along(self, F: Functor) -> "Diagram":
        """The image diagram ``F o D``."""
        return Diagram(self.source, F.target, F.obj_map[self.obj_map], F.arr_map[self.arr_map])


# ---------------------------------------------------------------------------
# limits


@dataclass(frozen=True)
class Cone:
    apex: int
    legs: tuple[int, ...]


def _edges(D: Diagram) -> np.ndarray:
    J = D.source
    rows = [(int(J.dom[u]), int(J.cod[u]), int(D.arr_map[u])) for u in range(J.n_arrows) if not J.is_identity(u)]
    return np.asarray(rows, dtype=np.int64).reshape(-1, 3)


def cones(D: Diagram, apex: int, limit_: int = -1) -> np.ndarray:
    """All cones over ``D`` with the given apex, one per row."""
    C = D.target
    cands = [C.hom(apex, int(x)) for x in D.obj_map]
    return kernels.enumerate_cones(C.comp, cands, _edges(D), limit_)


def _cone_counts(D: Diagram) -> np.ndarray:
    C = D.target
    edges = _edges(D)
    out = np.empty(C.n_objects, dtype=np.int64)
    for a in range(C.n_objects):
        out[a] = kernels.count_cones(C.comp, [C.hom(a, int(x)) for x in D.obj_map], edges)
    return out


def _universal(D: Diagram, legs: np.ndarray, apex: int, counts: np.ndarray) -> bool:
    C = D.target
    legs = np.asarray(legs, dtype=np.int64)
    for a in range(C.n_objects):
        H = C.hom(a, apex)
        if len(H) != counts[a]:
            return False
        if len(H) < 2 or not len(legs):
            if not len(legs) and len(H) > 1:
                return False
            continue
        M = C.comp[legs[:, None], H[None, :]]
        if np.unique(M, axis=1).shape[1] != len(H):
            return False
    return True


def is_limit(D: Diagram, cone: Cone) -> bool:
    """Is ``cone`` a limiting cone over ``D``?"""
    C = D.target
    legs = np.asarray(cone.legs, dtype=np.int64)
    if len(legs) != D.source.n_objects:
        return False
    for j, p in enumerate(legs):
        if C.dom[p] != cone.apex or C.cod[p] != D.obj_map[j]:
            return False
    for s, t, u in _edges(D):
        if C.comp[u, legs[s]] != legs[t]:
            return False
    return _universal(D, legs, cone.apex, _cone_counts(D))


def limit(D: Diagram) -> Cone | None:
    """A limiting cone over ``D`` found by exhaustive search, or None."""
    C = D.target
    counts = _cone_counts(D)
    sizes = C.hom_sizes()
    for L in np.flatnonzero((sizes == counts[:, None]).all(axis=0)):
        for row in cones(D, int(L)):
            if _universal(D, row, int(L), counts):
                return Cone(int(L), tuple(int(v) for v in row))
    return None


def colimit(D: Diagram) -> Cone | None:
    """A colimiting cocone; ``legs[j]`` runs from ``D(j)`` to the apex."""
    return limit(D.op())


# ---------------------------------------------------------------------------
# monos, epis


def is_mono(C: FiniteCategory, f: int) -> bool:
    return bool(C.mono_mask()[f])


def is_epi(C: FiniteCategory, f: int) -> bool:
    return bool(C.epi_mask()[f])


def kernel_pair_is_trivial(C: FiniteCategory, f: int) -> bool:
    """Is ``(id, id)`` a pullback of ``f`` along itself?"""
    x = int(C.dom[f])
    i = C.identity(x)
    return is_limit(Diagram.cospan(C, f, f), Cone(x, (i, i, f)))


# ---------------------------------------------------------------------------
# subterminals


@dataclass
class SubterminalPoset:
    """Subterminal objects up to isomorphism, ordered by existence of arrows."""

    category: FiniteCategory
    elements: tuple[int, ...]
    leq_matrix: np.ndarray
    rep: dict[int, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, u: int) -> bool:
        return int(u) in self.rep

    def index(self, u: int) -> int:
        return self.elements.index(self.rep[int(u)])

    def leq(self, u: int, v: int) -> bool:
        return bool(self.leq_matrix[self.index(u), self.index(v)])

    def names(self) -> list[str]:
        return [self.category.objects[u] for u in self.elements]

    def up_set(self, u: int) -> frozenset[int]:
        return frozenset(v for v in self.elements if self.leq(u, v))

    def down_set(self, u: int) -> frozenset[int]:
        return frozenset(v for v in self.elements if self.leq(v, u))

    def meet(self, u: int, v: int) -> int | None:
        lower = [w for w in self.elements if self.leq(w, u) and self.leq(w, v)]
        for w in lower:
            if all(self.leq(z, w) for z in lower):
                return w
        return None

    def top(self) -> int | None:
        for u in self.elements:
            if all(self.leq(v, u) for v in self.elements):
                return u
        return None


def subterminal_poset(C: FiniteCategory) -> SubterminalPoset:
    if "subterminals" not in C._cache:
        sizes = C.hom_sizes()
        subs = [x for x in range(C.n_objects) if sizes[:, x].max(initial=0) <= 1]
        elements: list[int] = []
        rep: dict[int, int] = {}
        for x in subs:
            for e in elements:
                if sizes[x, e] and sizes[e, x]:
                    rep[x] = e
                    break
            else:
                elements.append(x)
                rep[x] = x
        leq = np.array([[sizes[u, v] > 0 for v in elements] for u in elements], dtype=bool).reshape(
            len(elements), len(elements)
        )
        C._cache["subterminals"] = SubterminalPoset(C, tuple(elements), _ro(leq), rep)
    return C._cache["subterminals"]


# ---------------------------------------------------------------------------
# exponentials


@dataclass(frozen=True)
class Exponential:
    obj: int
    ev: int
    product: Cone


def _hom_counts_match(C: FiniteCategory, E: int, X: int, Y: int, test: Sequence[int]) -> bool:
    for a in test:
        ax = C.product(a, X)
        if len(C.hom(a, E)) != len(C.hom(ax.apex, Y)):
            return False
    return True


def _exp_domain(C: FiniteCategory, X: int) -> list[int]:
    return [a for a in range(C.n_objects) if C.product(a, X) is not None]


def exponential_candidates(C: FiniteCategory, X: int, Y: int) -> list[int]:
    """Objects ``E`` with ``|Hom(A, E)| == |Hom(A x X, Y)|`` for every ``A``
    whose product with ``X`` exists in the fragment."""
    test = _exp_domain(C, X)
    return [E for E in range(C.n_objects) if _hom_counts_match(C, E, X, Y, test)]


def _ev_universal(C: FiniteCategory, pe: Cone, ev: int, X: int, test: Sequence[int]) -> bool:
    for a in test:
        q = C.product(a, X)
        H = C.hom(a, int(C.cod[pe.legs[0]]))
        K = C.hom(q.apex, pe.apex)
        # h x X is the k with p1 k = h q1 and p2 k = q2
        keys = {(int(C.comp[pe.legs[0], k]), int(C.comp[pe.legs[1], k])): int(k) for k in K}
        seen = set()
        for h in H:
            k = keys.get((int(C.comp[h, q.legs[0]]), int(q.legs[1])))
            if k is None:
                return False
            val = int(C.comp[ev, k])
            if val in seen:
                return False
            seen.add(val)
        if len(seen) != len(C.hom(q.apex, int(C.cod[ev]))):
            return False
    return True


def exponential(C: FiniteCategory, X: int, Y: int) -> Exponential | None:
    """``Y^X`` with evaluation, verified against every ``A`` with ``A x X`` in the fragment."""
    key = ("exp", int(X), int(Y))
    if key in C._cache:
        return C._cache[key]
    test = _exp_domain(C, X)
    found = None
    for E in range(C.n_objects):
        pe = C.product(E, X)
        if pe is None or not _hom_counts_match(C, E, X, Y, test):
            continue
        for ev in C.hom(pe.apex, Y):
            if _ev_universal(C, pe, int(ev), X, test):
                found = Exponential(E, int(ev), pe)
                break
        if found:
            break
    C._cache[key] = found
    return found


# ---------------------------------------------------------------------------
# subobjects and classifiers


def subobjects(C: FiniteCategory, X: int) -> list[int]:
    """One representative mono per subobject of ``X``."""
    key = ("sub", int(X))
    if key not in C._cache:
        monos = [int(m) for m in C.into(X) if C.mono_mask()[m]]
        reps: list[int] = []
        for m in monos:
            for r in reps:
                if C.isomorphic(int(C.dom[m]), int(C.dom[r])) and _factors(C, m, r) and _factors(C, r, m):
                    break
            else:
                reps.append(m)
        C._cache[key] = reps
    return C._cache[key]


def _factors(C: FiniteCategory, m: int, r: int) -> bool:
    """Does ``m`` factor through ``r``?"""
    return bool((C.comp[r, C.hom(int(C.dom[m]), int(C.dom[r]))] == m).any())


def _same_subobject(C: FiniteCategory, m: int, r: int) -> bool:
    return _factors(C, m, r) and _factors(C, r, m)


@dataclass(frozen=True)
class SubobjectClassifier:
    omega: int
    true: int
    terminal: int


def is_subobject_classifier(C: FiniteCategory, omega: int, true: int) -> tuple[bool, Any]:
    """Check that pulling back ``true`` is a bijection ``Hom(X, Omega) -> Sub(X)``
    for every ``X``; returns ``(ok, witness)``."""
    if C.cod[true] != omega or C.terminal() is None or not C.isomorphic(int(C.dom[true]), C.terminal()):
        return False, "true is not a point of omega"
    for X in range(C.n_objects):
        subs = subobjects(C, X)
        chis = C.hom(X, omega)
        if len(chis) != len(subs):
            return False, ("hom/sub size mismatch", C.objects[X])
        hit: set[int] = set()
        for chi in chis:
            pb = C.pullback(true, int(chi))
            if pb is None:
                return False, ("missing pullback", C.arrows[chi])
            m = pb.legs[1]
            idx = next((i for i, r in enumerate(subs) if _same_subobject(C, m, r)), None)
            if idx is None or idx in hit:
                return False, ("not injective", C.arrows[chi])
            hit.add(idx)
    return True, None


def subobject_classifier(C: FiniteCategory) -> SubobjectClassifier | None:
    if "omega" in C._cache:
        return C._cache["omega"]
    t = C.terminal()
    found = None
    if t is not None:
        nsub = np.array([len(subobjects(C, X)) for X in range(C.n_objects)])
        sizes = C.hom_sizes()
        for omega in np.flatnonzero((sizes == nsub[:, None]).all(axis=0)):
            for true in C.hom(t, int(omega)):
                ok, _ = is_subobject_classifier(C, int(omega), int(true))
                if ok:
                    found = SubobjectClassifier(int(omega), int(true), t)
                    break
            if found:
                break
    C._cache["omega"] = found
    return found


# ---------------------------------------------------------------------------
# validation


def _raw_to_arrays(data: Mapping[str, Any], rep: Report):
    objects = [str(o) for o in data.get("objects", [])]
    oidx = {o: i for i, o in enumerate(objects)}
    raw_arrows = data.get("arrows", {})
    if isinstance(raw_arrows, Mapping):
        items = [(str(k), v[0], v[1]) for k, v in raw_arrows.items()]
    else:
        items = [(str(a[0]), a[1], a[2]) for a in raw_arrows]
    arrows = [a[0] for a in items]
    aidx = {a: i for i, a in enumerate(arrows)}
    bad_refs = []
    dom = np.full(len(arrows), -1, dtype=np.int64)
    cod = np.full(len(arrows), -1, dtype=np.int64)
    for i, (a, d, c) in enumerate(items):
        for which, o, arr in (("dom", d, dom), ("cod", c, cod)):
            if str(o) in oidx:
                arr[i] = oidx[str(o)]
            else:
                bad_refs.append(f"{which}({a}) = unknown object {o!r}")
    ident = np.full(len(objects), -1, dtype=np.int64)
    for o, a in dict(data.get("identities", {})).items():
        if str(o) not in oidx:
            bad_refs.append(f"identity for unknown object {o!r}")
        elif str(a) not in aidx:
            bad_refs.append(f"identity of {o} is unknown arrow {a!r}")
        else:
            ident[oidx[str(o)]] = aidx[str(a)]
    comp = np.full((len(arrows), len(arrows)), -1, dtype=np.int32)
    raw_comp = data.get("compose", {})
    entries = raw_comp.items() if isinstance(raw_comp, Mapping) else (((g, f), h) for g, f, h in raw_comp)
    for (g, f), h in entries:
        missing = [x for x in (g, f, h) if str(x) not in aidx]
        if missing:
            bad_refs.append(f"composition {g} o {f} = {h} mentions unknown arrow {missing[0]!r}")
            continue
        comp[aidx[str(g)], aidx[str(f)]] = aidx[str(h)]
    rep.add("references resolve", not bad_refs, bad_refs)
    return objects, arrows, dom, cod, ident, comp


def validate_category(data: FiniteCategory | Mapping[str, Any]) -> Report:
    """Check every category law and list the violations with witnesses.

    ``data`` is either a ``FiniteCategory`` or a mapping with keys
    ``objects`` (names), ``arrows`` (name -> (dom, cod)), ``identities``
    (object -> arrow) and ``compose`` ((g, f) -> g o f).
    """
    rep = Report("validate category")
    if isinstance(data, FiniteCategory):
        C = data
        objects, arrows = C.objects, C.arrows
        dom, cod, ident, comp = C.dom, C.cod, C.ident, C.comp
        rep.add("references resolve", True)
    else:
        objects, arrows, dom, cod, ident, comp = _raw_to_arrays(data, rep)
    n, na = len(objects), len(arrows)
    typed = (dom >= 0) & (cod >= 0)
    rep.add("every arrow has a declared domain and codomain", bool(typed.all()),
            [arrows[i] for i in np.flatnonzero(~typed)[:5]], anchor="category-laws")
    missing_id = [objects[i] for i in range(n) if ident[i] < 0]
    wrong_id = [objects[i] for i in range(n) if ident[i] >= 0 and (dom[ident[i]] != i or cod[ident[i]] != i)]
    rep.add("identities exist and are endomorphisms", not missing_id and not wrong_id,
            missing_id + wrong_id, anchor="category-laws")
    composable = (cod[:, None] == dom[None, :]).T & typed[:, None] & typed[None, :]
    defined = comp >= 0
    extra = np.argwhere(defined & ~composable)
    absent = np.argwhere(~defined & composable)
    rep.add("composition defined exactly on composable pairs", not len(extra) and not len(absent),
            [("undefined", arrows[g], arrows[f]) for g, f in absent[:3]]
            + [("spurious", arrows[g], arrows[f]) for g, f in extra[:3]], anchor="category-laws")
    g, f = np.nonzero(defined & composable)
    h = comp[g, f]
    out_of_range = (h < 0) | (h >= na)
    hh = np.where(out_of_range, 0, h)
    mistyped = out_of_range | (dom[hh] != dom[f]) | (cod[hh] != cod[g])
    idx = np.flatnonzero(mistyped)
    rep.add("composites have the right type", not len(idx),
            [(arrows[g[i]], arrows[f[i]]) for i in idx[:3]], anchor="category-laws")
    if not rep.ok:
        return rep
    ar = np.arange(na)
    left = comp[ident[cod], ar] != ar
    right = comp[ar, ident[dom]] != ar
    bad = np.flatnonzero(left | right)
    rep.add("identity laws", not len(bad), [arrows[i] for i in bad[:5]], anchor="category-laws")
    v = kernels.first_assoc_violation(comp, dom, cod) if na else None
    rep.add("associativity", v is None, [tuple(arrows[i] for i in v)] if v else [], anchor="category-laws")
    return rep


def category_from_raw(data: Mapping[str, Any], name: str = "") -> FiniteCategory:
    """Build a category from a raw description, raising ``ValueError`` with the
    first violated law when the description is not a category."""
    rep = validate_category(data)
    if not rep.ok:
        bad = rep.first_failure()
        raise ValueError(f"not a category: {bad.name} :: {bad.witnesses[:3]}")
    objects, arrows, dom, cod, ident, comp = _raw_to_arrays(data, Report("-"))
    return FiniteCategory(objects, arrows, dom, cod, ident, comp, name=name)


def category_to_raw(C: FiniteCategory) -> dict[str, Any]:
    g, f = np.nonzero(C.comp >= 0)
    return {
        "objects": list(C.objects),
        "arrows": {C.arrows[i]: (C.objects[C.dom[i]], C.objects[C.cod[i]]) for i in range(C.n_arrows)},
        "identities": {C.objects[i]: C.arrows[C.ident[i]] for i in range(C.n_objects)},
        "compose": {(C.arrows[a], C.arrows[b]): C.arrows[C.comp[a, b]] for a, b in zip(g, f)},
    }
