"""Truncated, levelwise-finite simplicial sets.

Level ``m`` is ``range(sizes[m])``.  ``faces[m][i, x]`` is ``d_i x`` in level
``m - 1`` and ``degens[m][j, x]`` is ``s_j x`` in level ``m + 1``.  Every claim
about maps, subobjects and locality is checked by exhaustive search.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .filterprod import CONSTRUCTORS, EventualSequence, Tail, parse_seq
from .report import Report

Simplex = tuple[int, int]  # (level, index)


@dataclass(eq=False)
class TruncatedSimplicialObject:
    d: int
    sizes: tuple[int, ...]
    faces: list[np.ndarray]
    degens: list[np.ndarray]
    labels: list[list[str]] | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.sizes = tuple(int(s) for s in self.sizes)
        if len(self.sizes) != self.d + 1 or len(self.faces) != self.d + 1 or len(self.degens) != self.d:
            raise ValueError("level data does not match the truncation")
        for m in range(1, self.d + 1):
            if self.faces[m].shape != (m + 1, self.sizes[m]):
                raise ValueError(f"face table at level {m} has the wrong shape")
        for m in range(self.d):
            if self.degens[m].shape != (m + 1, self.sizes[m]):
                raise ValueError(f"degeneracy table at level {m} has the wrong shape")

    def __repr__(self) -> str:
        return f"<sSet {self.name or '?'} d={self.d} sizes={self.sizes}>"

    def face(self, i: int, m: int, x: int) -> int:
        return int(self.faces[m][i, x])

    def degen(self, j: int, m: int, x: int) -> int:
        return int(self.degens[m][j, x])

    def label(self, m: int, x: int) -> str:
        return self.labels[m][x] if self.labels else f"{m}:{x}"

    @property
    def is_empty(self) -> bool:
        return self.sizes[0] == 0

    def identity_failures(self) -> list[str]:
        """Violations of the simplicial identities, as readable strings."""
        bad: list[str] = []
        F, S = self.faces, self.degens
        for m in range(2, self.d + 1):
            for i in range(m + 1):
                for j in range(i + 1, m + 1):
                    lhs = F[m - 1][i][F[m][j]]
                    rhs = F[m - 1][j - 1][F[m][i]]
                    for x in np.nonzero(lhs != rhs)[0][:1]:
                        bad.append(f"d{i}d{j} != d{j - 1}d{i} at {self.label(m, int(x))}")
        for m in range(self.d):
            n = m + 1  # s_j : X_m -> X_n, faces d_i : X_n -> X_m
            for i in range(n + 1):
                for j in range(m + 1):
                    lhs = F[n][i][S[m][j]]
                    if i < j:
                        rhs = S[m - 1][j - 1][F[m][i]]
                    elif i in (j, j + 1):
                        rhs = np.arange(self.sizes[m])
                    else:
                        rhs = S[m - 1][j][F[m][i - 1]]
                    for x in np.nonzero(lhs != rhs)[0][:1]:
                        bad.append(f"d{i}s{j} identity fails at {self.label(m, int(x))}")
        for m in range(self.d - 1):
            for i in range(m + 1):
                for j in range(i, m + 1):
                    lhs = S[m + 1][i][S[m][j]]
                    rhs = S[m + 1][j + 1][S[m][i]]
                    for x in np.nonzero(lhs != rhs)[0][:1]:
                        bad.append(f"s{i}s{j} != s{j + 1}s{i} at {self.label(m, int(x))}")
        return bad

    def validate(self) -> Report:
        r = Report(f"simplicial identities: {self.name}")
        bad = self.identity_failures()
        r.add("simplicial identities up to the truncation", not bad, bad)
        return r

    # --- derived structure ---------------------------------------------

    def total_degeneracy(self, v: int, m: int) -> int:
        x = v
        for k in range(m):
            x = int(self.degens[k][0, x])
        return x

    def nondegenerate(self) -> list[Simplex]:
        out = [(0, x) for x in range(self.sizes[0])]
        for m in range(1, self.d + 1):
            hit = set(self.degens[m - 1].ravel().tolist())
            out.extend((m, x) for x in range(self.sizes[m]) if x not in hit)
        return out

    def closure(self, seeds: Iterable[Simplex]) -> frozenset[Simplex]:
        """Smallest simplicial subset containing ``seeds``."""
        seen = set(seeds)
        stack = list(seen)
        while stack:
            m, x = stack.pop()
            nxt = []
            if m > 0:
                nxt += [(m - 1, int(self.faces[m][i, x])) for i in range(m + 1)]
            if m < self.d:
                nxt += [(m + 1, int(self.degens[m][j, x])) for j in range(m + 1)]
            for s in nxt:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return frozenset(seen)

    def all_simplices(self) -> frozenset[Simplex]:
        return frozenset((m, x) for m in range(self.d + 1) for x in range(self.sizes[m]))

    def subobjects(self) -> list[frozenset[Simplex]]:
        """Every simplicial subset, smallest first (found from generating sets of
        nondegenerate simplices)."""
        if "subobjects" not in self._cache:
            gens = self.nondegenerate()
            found = {frozenset()}
            for r in range(1, len(gens) + 1):
                for combo in itertools.combinations(gens, r):
                    found.add(self.closure(combo))
            self._cache["subobjects"] = sorted(found, key=lambda s: (len(s), sorted(s)))
        return self._cache["subobjects"]

    def levelwise_constant_upto(self) -> int:
        """Largest ``m`` with the total degeneracy ``X_0 -> X_k`` bijective for
        every ``k <= m`` (``d`` if it never breaks below the truncation)."""
        for m in range(1, self.d + 1):
            if self.sizes[m] != self.sizes[0]:
                return m - 1
        return self.d


# ---------------------------------------------------------------------------
# builders


def _arr(rows: list[list[int]], n_rows: int) -> np.ndarray:
    if not rows or not rows[0]:
        return np.zeros((n_rows, 0), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64).reshape(n_rows, -1)


def _assemble(d: int, levels: list[list], face_fn, degen_fn, label_fn, name: str) -> TruncatedSimplicialObject:
    index = [{s: k for k, s in enumerate(level)} for level in levels]
    faces = [np.zeros((1, len(levels[0])), dtype=np.int64)]
    degens = []
    for m in range(1, d + 1):
        faces.append(_arr([[index[m - 1][face_fn(s, i)] for s in levels[m]] for i in range(m + 1)], m + 1))
    for m in range(d):
        degens.append(_arr([[index[m + 1][degen_fn(s, j)] for s in levels[m]] for j in range(m + 1)], m + 1))
    labels = [[label_fn(s) for s in level] for level in levels]
    return TruncatedSimplicialObject(d, tuple(len(l) for l in levels), faces, degens, labels, name)


def _monotone(m: int, n: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(n + 1), m + 1))


def simplex(n: int, d: int) -> TruncatedSimplicialObject:
    """Representable ``Delta[n]``: level ``m`` is the monotone maps ``[m] -> [n]``."""
    return _monotone_subset(n, d, lambda s: True, f"Delta[{n}]")


def boundary(n: int, d: int) -> TruncatedSimplicialObject:
    """``dDelta[n]``: the non-surjective monotone maps."""
    return _monotone_subset(n, d, lambda s: len(set(s)) < n + 1, f"dDelta[{n}]")


def _monotone_subset(n: int, d: int, keep, name: str) -> TruncatedSimplicialObject:
    if n < 0 or d < 0:
        raise ValueError("dimensions are natural numbers")
    levels = [[s for s in _monotone(m, n) if keep(s)] for m in range(d + 1)]
    return _assemble(
        d,
        levels,
        lambda s, i: s[:i] + s[i + 1 :],
        lambda s, j: s[: j + 1] + s[j:],
        lambda s: "".join(map(str, s)),
        name,
    )


def constant(k: int, d: int) -> TruncatedSimplicialObject:
    """The discrete simplicial set on ``k`` points."""
    levels = [[(p,) for p in range(k)] for _ in range(d + 1)]
    return _assemble(d, levels, lambda s, i: s, lambda s, j: s, lambda s: f"p{s[0]}", f"const[{k}]")


def empty(d: int) -> TruncatedSimplicialObject:
    return constant(0, d)._renamed("empty")


def _surjections(m: int, k: int) -> list[tuple[int, ...]]:
    """Monotone surjections ``[m] -> [k]``."""
    out = []
    for jumps in itertools.combinations(range(1, m + 1), k):
        s, v = [], 0
        for t in range(m + 1):
            if t in jumps:
                v += 1
            s.append(v)
        out.append(tuple(s))
    return out


FaceRef = "str | tuple[str, tuple[int, ...]]"


def from_cells(cells: Sequence[tuple[str, int, Sequence | None]], d: int, name: str = "") -> TruncatedSimplicialObject:
    """Build from nondegenerate cells ``(name, dim, faces)``.

    Each face is a cell name or ``(cell, surjection)``, the surjection given as
    its value tuple.  Simplices are pairs (cell, surjection), the
    Eilenberg-Zilber normal form; cells above the truncation are dropped.
    """
    cells = [c for c in cells if c[1] <= d]
    dims = {c[0]: c[1] for c in cells}
    if len(dims) != len(cells):
        raise ValueError("duplicate cell names")
    face_tab: dict[str, list[tuple[str, tuple[int, ...]]]] = {}
    for cname, k, fs in cells:
        if k == 0:
            continue
        if fs is None or len(fs) != k + 1:
            raise ValueError(f"cell {cname} needs {k + 1} faces")
        norm = []
        for f in fs:
            c2, sig = (f, tuple(range(dims.get(f, 0) + 1))) if isinstance(f, str) else (f[0], tuple(f[1]))
            if c2 not in dims:
                raise ValueError(f"unknown face cell {c2!r}")
            if len(sig) != k or sorted(sig) != list(sig) or set(sig) != set(range(dims[c2] + 1)):
                raise ValueError(f"face {f!r} of {cname} is not a {k - 1}-simplex")
            norm.append((c2, sig))
        face_tab[cname] = norm

    @lru_cache(maxsize=None)
    def restrict(c: str, eta: tuple[int, ...]) -> tuple[str, tuple[int, ...]]:
        k = dims[c]
        if eta == tuple(range(k + 1)):
            return (c, eta)
        i = max(t for t in range(k + 1) if t not in eta)
        c1, tau = face_tab[c][i]
        return act((c1, tau), tuple(e if e < i else e - 1 for e in eta))

    def act(s: tuple[str, tuple[int, ...]], g: tuple[int, ...]) -> tuple[str, tuple[int, ...]]:
        c, sig = s
        h = tuple(sig[t] for t in g)
        image = sorted(set(h))
        eps = tuple(image.index(v) for v in h)
        c2, tau = restrict(c, tuple(image))
        return (c2, tuple(tau[e] for e in eps))

    levels = [
        [(c, s) for c, k, _ in cells if k <= m for s in _surjections(m, k)] for m in range(d + 1)
    ]

    def face_fn(s, i):
        m = len(s[1]) - 1
        return act(s, tuple(t for t in range(m + 1) if t != i))

    def degen_fn(s, j):
        m = len(s[1]) - 1
        return act(s, tuple(t if t <= j else t - 1 for t in range(m + 2)))

    def label_fn(s):
        c, sig = s
        return c if len(set(sig)) == len(sig) else f"{c}{''.join(map(str, sig))}"

    return _assemble(d, levels, face_fn, degen_fn, label_fn, name)


def sphere(n: int, d: int) -> TruncatedSimplicialObject:
    """``Delta[n] / dDelta[n]``: one vertex and one nondegenerate ``n``-cell.
    ``S^0`` is two points."""
    if n < 0:
        raise ValueError("dimensions are natural numbers")
    if n == 0:
        return boundary(1, d)._renamed("S^0")
    collapsed = ("v", (0,) * n)
    return from_cells([("v", 0, None), ("s", n, [collapsed] * (n + 1))], d, f"S^{n}")


def product(X: TruncatedSimplicialObject, Y: TruncatedSimplicialObject) -> TruncatedSimplicialObject:
    _same_d(X, Y)
    levels = [list(itertools.product(range(X.sizes[m]), range(Y.sizes[m]))) for m in range(X.d + 1)]
    faces = [np.zeros((1, len(levels[0])), dtype=np.int64)]
    degens = []
    for m in range(1, X.d + 1):
        faces.append((X.faces[m][:, :, None] * Y.sizes[m - 1] + Y.faces[m][:, None, :]).reshape(m + 1, -1))
    for m in range(X.d):
        degens.append((X.degens[m][:, :, None] * Y.sizes[m + 1] + Y.degens[m][:, None, :]).reshape(m + 1, -1))
    labels = [[f"({X.label(m, a)},{Y.label(m, b)})" for a, b in levels[m]] for m in range(X.d + 1)]
    return TruncatedSimplicialObject(X.d, tuple(len(l) for l in levels), faces, degens, labels, f"{X.name} x {Y.name}")


def coproduct(X: TruncatedSimplicialObject, Y: TruncatedSimplicialObject) -> TruncatedSimplicialObject:
    _same_d(X, Y)
    faces = [np.zeros((1, X.sizes[0] + Y.sizes[0]), dtype=np.int64)]
    degens = []
    for m in range(1, X.d + 1):
        faces.append(np.concatenate([X.faces[m], Y.faces[m] + X.sizes[m - 1]], axis=1))
    for m in range(X.d):
        degens.append(np.concatenate([X.degens[m], Y.degens[m] + X.sizes[m + 1]], axis=1))
    labels = [
        [f"L{X.label(m, a)}" for a in range(X.sizes[m])] + [f"R{Y.label(m, b)}" for b in range(Y.sizes[m])]
        for m in range(X.d + 1)
    ]
    sizes = tuple(a + b for a, b in zip(X.sizes, Y.sizes))
    return TruncatedSimplicialObject(X.d, sizes, faces, degens, labels, f"{X.name} + {Y.name}")


def _renamed(self: TruncatedSimplicialObject, name: str) -> TruncatedSimplicialObject:
    self.name = name
    return self


TruncatedSimplicialObject._renamed = _renamed  # type: ignore[attr-defined]


def _same_d(X: TruncatedSimplicialObject, Y: TruncatedSimplicialObject) -> None:
    if X.d != Y.d:
        raise ValueError(f"truncation levels differ ({X.d} vs {Y.d})")


def build(name: str, k: int, d: int) -> TruncatedSimplicialObject:
    table = {"simplex": simplex, "boundary": boundary, "sphere": sphere, "constant": constant}
    if name not in table:
        raise ValueError(f"unknown constructor {name!r}")
    if k < 0:
        raise ValueError("constructor parameter must be a natural number")
    X = table[name](k, d)
    return X


_ATOM = re.compile(r"^\s*(simplex|boundary|sphere|constant)\s*\(\s*(\d+)\s*\)\s*$|^\s*(empty|point)\s*$")


def parse_sset(text: str, d: int) -> TruncatedSimplicialObject:
    """``simplex(1) x sphere(2) + constant(3)``; ``x`` binds tighter than ``+``."""
    summands = [s for s in re.split(r"\s\+\s", f" {text} ")]
    total = None
    for summand in summands:
        prod = None
        for factor in re.split(r"\sx\s", f" {summand.strip()} "):
            m = _ATOM.match(factor)
            if not m:
                raise ValueError(f"bad simplicial set literal {factor.strip()!r}")
            if m.group(1):
                X = build(m.group(1), int(m.group(2)), d)
            else:
                X = empty(d) if m.group(3) == "empty" else simplex(0, d)
            prod = X if prod is None else product(prod, X)
        total = prod if total is None else coproduct(total, prod)
    assert total is not None
    total.name = text.strip()
    return total


# ---------------------------------------------------------------------------
# maps


SimplicialMap = tuple[tuple[int, ...], ...]


def hom_set(X: TruncatedSimplicialObject, Y: TruncatedSimplicialObject, limit: int = -1) -> list[SimplicialMap]:
    """Every simplicial map ``X -> Y`` (at most ``limit`` of them if given)."""
    _same_d(X, Y)
    maps = kernels.enumerate_simplicial_maps(
        list(X.sizes), X.faces, X.degens, list(Y.sizes), Y.faces, Y.degens, limit
    )
    return [tuple(tuple(int(v) for v in level) for level in f) for f in maps]


def is_constant_map(f: SimplicialMap, Y: TruncatedSimplicialObject) -> bool:
    """Does ``f`` factor through the terminal object?"""
    if not f[0]:
        return True
    vs = set(f[0])
    if len(vs) != 1:
        return False
    v = next(iter(vs))
    return all(set(level) <= {Y.total_degeneracy(v, m)} for m, level in enumerate(f))


def is_isomorphic(X: TruncatedSimplicialObject, Y: TruncatedSimplicialObject) -> bool:
    if X.d != Y.d or X.sizes != Y.sizes:
        return False
    return any(all(len(set(level)) == len(level) for level in f) for f in hom_set(X, Y))


# ---------------------------------------------------------------------------
# external discreteness in the plain truncated context


def suitable_propositions(d: int) -> Report:
    """Terminal object, finite coproducts of it, and (-1)-truncation as support,
    checked on the gallery of small objects."""
    r = Report("suitable propositions")
    one = simplex(0, d)
    sample = [empty(d), one, simplex(1, d), boundary(2, d), sphere(min(2, d) or 1, d), constant(2, d)]
    r.add("Delta[0] is terminal", all(len(hom_set(X, one)) == 1 for X in sample), anchor="external-discrete")
    two = coproduct(one, one)
    r.add(
        "1 + 1 is the two-point discrete object",
        is_isomorphic(two, constant(2, d)),
        anchor="external-discrete",
    )
    bad = []
    for X in sample:
        tau = truncation(X)
        for U in (empty(d), one):
            if bool(hom_set(X, U, limit=1)) != bool(hom_set(tau, U, limit=1)):
                bad.append((X.name, U.name))
    r.add("support is the reflection onto subterminals", not bad, bad, anchor="external-discrete")
    return r


def truncation(X: TruncatedSimplicialObject) -> TruncatedSimplicialObject:
    """(-1)-truncation: the point if ``X`` is inhabited, else empty."""
    return empty(X.d) if X.is_empty else simplex(0, X.d)


def _local_for(Y: TruncatedSimplicialObject, X: TruncatedSimplicialObject) -> bool:
    """Is precomposition ``Hom(tau X, X) -> Hom(Y x tau X, X)`` bijective?

    ``Y`` is inhabited, so the map is injective and counting suffices."""
    tau = truncation(X)
    n_src = len(hom_set(tau, X))
    return len(hom_set(product(Y, tau), X, limit=n_src + 1)) == n_src


def is_externally_discrete(X: TruncatedSimplicialObject, d: int | None = None, cross_check: int = 3) -> bool:
    """Locality against ``Delta[n] x tau X`` for ``n <= d``.

    The criterion with ``Delta[1]^n`` is evaluated for ``n <= cross_check`` and
    must agree; a disagreement raises ``AssertionError``.
    """
    d = X.d if d is None else d
    if d > X.d:
        raise ValueError("cannot test above the truncation level")
    local = [_local_for(simplex(n, X.d), X) for n in range(d + 1)]
    cube = simplex(0, X.d)
    for n in range(1, min(cross_check, d) + 1):
        cube = product(cube, simplex(1, X.d))
        if _local_for(cube, X) != all(local[: n + 1]):
            raise AssertionError(f"locality criteria disagree on {X.name} at n={n}")
    verdict = all(local)
    return verdict


# ---------------------------------------------------------------------------
# symbolic families


@dataclass(frozen=True)
class SymbolicFamily:
    seq: EventualSequence

    def __post_init__(self) -> None:
        if self.seq.constructor is None:
            raise ValueError("a family needs a constructor")

    @classmethod
    def parse(cls, text: str) -> "SymbolicFamily":
        return cls(parse_seq(text))

    @classmethod
    def of(cls, ctor: str, tail: str, exceptions: dict | None = None) -> "SymbolicFamily":
        return cls(EventualSequence.of(tail, exceptions, ctor))

    def value(self, n: int) -> tuple[str, int]:
        return self.seq(n)

    def at(self, n: int, d: int) -> TruncatedSimplicialObject:
        ctor, k = self.value(n)
        return build(ctor, k, d)

    def encode(self) -> str:
        return self.seq.encode()

    def __str__(self) -> str:
        return self.encode()


def _discrete_upto(ctor: str, k: int, m: int) -> bool:
    """Is ``ctor(k)`` levelwise constant through level ``m``?"""
    if ctor == "constant" or k == 0:
        return True
    if ctor == "simplex":
        return m == 0
    return k > m  # sphere(k): one simplex per level below k


def _tail_values(tail: Tail) -> tuple[int, ...] | None:
    """Values taken infinitely often by a bounded tail; ``None`` if unbounded."""
    if not tail.bounded:
        return None
    return tail.params


def frechet_externally_discrete(F: SymbolicFamily) -> bool:
    """Is ``{n : F_n levelwise constant through level m}`` cofinite for every m?

    Decided from the tail alone: finitely many exceptions never matter.
    """
    ctor, tail = F.seq.constructor, F.seq.tail
    if ctor == "constant":
        return True
    vals = _tail_values(tail)
    if ctor == "simplex":
        return vals is not None and all(v == 0 for v in vals)
    # sphere
    if vals is None:
        return True  # the dimension eventually exceeds every level
    return all(v == 0 for v in vals)


def _symbolic_dn(ctor: str, k: int, n: int) -> int:
    if ctor == "constant" or k == 0:
        return n
    if ctor == "simplex":
        return 0
    return k - 1


def family_diverges(F: SymbolicFamily) -> bool:
    """Does ``d_n`` tend to infinity?  Decided from the tail."""
    ctor, tail = F.seq.constructor, F.seq.tail
    if ctor == "constant":
        return True
    vals = _tail_values(tail)
    if vals is None:
        return ctor == "sphere"
    return all(v == 0 for v in vals)


def dn_value(X: TruncatedSimplicialObject, n: int, discrete: bool) -> int:
    """``n`` for a discrete object, else the last level reached by the
    levelwise constant part (needs the truncation above it)."""
    if discrete:
        return n
    m = X.levelwise_constant_upto()
    if m == X.d:
        raise ValueError(f"truncation {X.d} too low to locate d_n of {X.name}")
    return m


def _needed_truncation(ctor: str, k: int) -> int:
    return k if ctor == "sphere" else 1


@dataclass
class DnResult:
    family: SymbolicFamily
    window: int
    values: list[int]
    bound: int
    window_diverges: bool
    symbolic_diverges: bool
    report: Report

    def table(self) -> str:
        rows = [f"n={n:>3}  {self.family.value(n)[0]}({self.family.value(n)[1]})  d_n={v}" for n, v in enumerate(self.values)]
        return "\n".join(rows)


def dn_sequence(
    F: SymbolicFamily, N: int, bound: int | None = None, factor_check: bool = True, expect: bool | None = None
) -> DnResult:
    """``d_0 .. d_N`` with the window divergence verdict and, for each ``d_n >= 1``,
    the check that every map ``S^(d_n - 1) -> F_n`` is constant.

    With ``expect`` given, the verdict check passes when the window verdict
    equals it; otherwise it passes on divergence."""
    bound = N // 4 if bound is None else bound
    r = Report(f"d_n: {F.encode()}")
    values: list[int] = []
    for n in range(N + 1):
        ctor, k = F.value(n)
        discrete = ctor == "constant" or k == 0
        T = 1 if discrete else _needed_truncation(ctor, k)
        X = build(ctor, k, T)
        values.append(dn_value(X, n, discrete))
    sym = [_symbolic_dn(*F.value(n), n) for n in range(N + 1)]
    mism = [n for n in range(N + 1) if sym[n] != values[n]]
    r.add("computed d_n matches the constructor rule", not mism, mism, anchor="dn")
    # tails start in the first half so each covers at least half the window
    tail_min = [min(values[n:]) for n in range(N // 2 + 1)]
    window = any(t >= bound for t in tail_min)
    symbolic = family_diverges(F)
    r.add(
        f"tail minimum reaches {bound} inside the window"
        + ("" if expect is None else f" (expected: {'yes' if expect else 'no'})"),
        window if expect is None else window == expect,
        [{"tail_min": tail_min[-1]}],
        anchor="dn",
        detail=f"symbolic verdict {'diverges' if symbolic else 'bounded'}",
    )
    r.add("window verdict agrees with the symbolic verdict", window == symbolic, [F.encode()], anchor="dn")
    if factor_check:
        bad, zero = [], []
        for n, dn in enumerate(values):
            if dn == 0:
                zero.append(n)
                continue
            ctor, k = F.value(n)
            T = max(dn, 1)
            S = sphere(dn - 1, T)
            R = build(ctor, k, T)
            for f in hom_set(S, R):
                if not is_constant_map(f, R):
                    bad.append({"n": n, "map": f[0]})
                    break
        r.add("every map S^(d_n - 1) -> R_n factors through the point", not bad, bad, anchor="dn")
        if zero:
            r.skip(
                "predecessor sphere at d_n = 0",
                detail=f"no S^(d_n - 1) at {len(zero)} indices, first {zero[0]}",
                anchor="dn",
            )
    return DnResult(F, N, values, bound, window, symbolic, r)


BUILTIN_FAMILIES: dict[str, str] = {
    "spheres": "family tail=sphere(identity) except {}",
    "half-spheres": "family tail=sphere(half(1)) except {}",
    "interval": "family tail=simplex(const(1)) except {}",
    "points": "family tail=constant(const(1)) except {}",
    "discrete-pairs": "family tail=constant(identity) except {}",
    "even-discrete": "family tail=sphere(periodic(0,1)) except {}",
    "late-spheres": "family tail=sphere(identity(3)) except {0:simplex(2), 1:simplex(1)}",
    "bounded-spheres": "family tail=sphere(const(2)) except {}",
    "zero-spheres": "family tail=sphere(const(0)) except {0:sphere(4)}",
    "simplices": "family tail=simplex(identity) except {}",
    "vertices": "family tail=simplex(periodic(0)) except {3:simplex(3)}",
    "mixed-period": "family tail=sphere(periodic(0,0,5)) except {}",
}


def builtin_family(name: str) -> SymbolicFamily:
    return SymbolicFamily.parse(BUILTIN_FAMILIES[name])


# ---------------------------------------------------------------------------
# the unique-arrow conditions


@dataclass(frozen=True)
class ProductContext:
    """Filter product of copies of truncated sSet over ``index`` along the
    principal filter generated by ``support``.  Germs over a principal filter are
    maps on the generator, so objects are tuples indexed by ``support``."""

    name: str
    index: tuple[str, ...]
    support: tuple[str, ...]
    d: int

    @property
    def width(self) -> int:
        return len(self.support)

    def subterminals(self) -> list[tuple[int, ...]]:
        return list(itertools.product((0, 1), repeat=self.width))

    def times(self, X: TruncatedSimplicialObject, U: tuple[int, ...]) -> tuple[TruncatedSimplicialObject, ...]:
        return tuple(X if u else empty(self.d) for u in U)

    def coproduct(self, A, B):
        return tuple(coproduct(a, b) for a, b in zip(A, B))


def builtin_contexts(d: int = 2) -> list[ProductContext]:
    return [
        ProductContext("sset", ("1",), ("1",), d),
        ProductContext("filter-product", ("1", "2", "3"), ("1", "2"), d),
    ]


CONDITIONS = (
    "(1) 0-truncated",
    "(2) (-1)-truncation is U",
    "(3) Map(U, A) has 2 elements",
    "(4) 0+1 : U+U -> A is not an iso",
    "(5) non-trivial subobjects lie in U+U",
    "(6) 0+1 has no non-trivial factorization",
)


def _atom_conditions(X: TruncatedSimplicialObject) -> dict[str, tuple[bool | None, list]]:
    """Conditions (3)-(6) at one atom of Sub(1), where U is the point."""
    out: dict[str, tuple[bool | None, list]] = {}
    pts = len(hom_set(simplex(0, X.d), X))
    out[CONDITIONS[2]] = (pts == 2, [{"points": pts}])
    if pts != 2:
        for c in CONDITIONS[3:]:
            out[c] = (None, ["needs exactly two points"])
        return out
    iso = all(s == 2 for s in X.sizes)
    out[CONDITIONS[3]] = (not iso, [X.name])
    whole = X.all_simplices()
    image = X.closure((0, v) for v in range(2))
    subs = X.subobjects()
    stray = [s for s in subs if s and s != whole and not s <= image]
    out[CONDITIONS[4]] = (not stray, [_sub_label(X, s) for s in stray[:1]])
    between = [s for s in subs if image < s < whole]
    out[CONDITIONS[5]] = (not between, [_sub_label(X, s) for s in between[:1]])
    return out


def _sub_label(X: TruncatedSimplicialObject, s: frozenset[Simplex]) -> list[str]:
    nd = set(X.nondegenerate())
    return sorted(X.label(m, x) for m, x in s if (m, x) in nd)


def unique_arrow_check(ctx: ProductContext, U: tuple[int, ...], A) -> Report:
    """Conditions (1)-(6) on ``A`` over the subterminal ``U``, read at each atom of
    Sub(1) below ``U``."""
    if isinstance(A, TruncatedSimplicialObject):
        A = (A,)
    A = tuple(A)
    if len(A) != ctx.width or len(U) != ctx.width:
        raise ValueError("object and subterminal must match the context width")
    r = Report(f"unique arrow in {ctx.name} over U={U}")
    bad1 = [(i, b) for i, X in enumerate(A) for b in X.identity_failures()[:1]]
    r.add(CONDITIONS[0], not bad1, bad1, anchor="unique-arrow", detail="levels are finite sets")
    support = tuple(int(not X.is_empty) for X in A)
    r.add(CONDITIONS[1], support == tuple(U), [{"support": support}], anchor="unique-arrow")
    per_atom = {i: _atom_conditions(A[i]) for i, u in enumerate(U) if u}
    for c in CONDITIONS[2:]:
        vals = [(i, per_atom[i][c]) for i in per_atom]
        if any(v[0] is None for _, v in vals):
            r.add(c, None, [i for i, v in vals if v[0] is None], anchor="unique-arrow", detail="condition (3) fails first")
            continue
        bad = [{"atom": ctx.support[i], "witness": v[1]} for i, v in vals if not v[0]]
        r.add(c, not bad, bad, anchor="unique-arrow", detail=f"{len(vals)} atoms")
    return r


def passes_all(report: Report) -> bool:
    return all(c.status == "pass" for c in report.checks)


def _edge_types() -> list[tuple[int, int]]:
    return [(s, t) for s in range(2) for t in range(2)]


def _two_vertex_candidates(max_cells: int, d: int) -> Iterable[tuple[list, dict]]:
    """Cell lists on two vertices with at most ``max_cells`` nondegenerate cells in
    dimensions <= min(d, 2)."""
    budget = max_cells - 2
    for ne in range(budget + 1):
        for etypes in itertools.combinations_with_replacement(_edge_types(), ne):
            cells: list = [("v0", 0, None), ("v1", 0, None)]
            ones = [("v0", (0, 0)), ("v1", (0, 0))]
            ends = [(0, 0), (1, 1)]
            for k, (s, t) in enumerate(etypes):
                cells.append((f"e{k}", 1, [f"v{t}", f"v{s}"]))
                ones.append((f"e{k}", (0, 1)))
                ends.append((s, t))
            if d < 2:
                yield cells, {"edges": ne, "triangles": 0}
                continue
            # triangles: (d0, d1, d2) with matching vertices
            tri = [
                (a, b, c)
                for a, b, c in itertools.product(range(len(ones)), repeat=3)
                if ends[b][1] == ends[a][1] and ends[c][1] == ends[a][0] and ends[c][0] == ends[b][0]
            ]
            for nt in range(budget - ne + 1):
                for combo in itertools.combinations_with_replacement(tri, nt):
                    full = list(cells)
                    for k, (a, b, c) in enumerate(combo):
                        full.append((f"t{k}", 2, [ones[a], ones[b], ones[c]]))
                    yield full, {"edges": ne, "triangles": nt}


def _cell_closure_ok(cells: list) -> bool:
    """Cheap form of condition (5): each non-vertex cell must generate everything."""
    faces = {c: [f if isinstance(f, str) else f[0] for f in (fs or [])] for c, _, fs in cells}
    names = set(faces)

    def reach(c):
        seen, stack = {c}, [c]
        while stack:
            for f in faces[stack.pop()]:
                if f not in seen:
                    seen.add(f)
                    stack.append(f)
        return seen

    return all(reach(c) == names for c, k, _ in cells if k > 0)


@dataclass
class SearchResult:
    context: str
    U: tuple[int, ...]
    examined: int
    pruned: int
    survivors: list[tuple[TruncatedSimplicialObject, ...]]
    all_isomorphic_to_arrow: bool


def unique_arrow_search(ctx: ProductContext, U: tuple[int, ...], max_cells: int = 6) -> SearchResult:
    """All candidates with at most ``max_cells`` nondegenerate cells per atom that
    pass the six conditions, up to isomorphism.

    Conditions are read atomwise, so the search runs per atom: condition (2)
    forces the empty object off the support and condition (3) forces exactly two
    vertices on it.
    """
    d = ctx.d
    atom_survivors: list[TruncatedSimplicialObject] = []
    examined = pruned = 0
    single = ProductContext("atom", ("1",), ("1",), d)
    if any(U):
        for cells, _ in _two_vertex_candidates(max_cells, d):
            examined += 1
            if not _cell_closure_ok(cells):
                pruned += 1
                continue
            X = from_cells(cells, d, "candidate")
            if passes_all(unique_arrow_check(single, (1,), X)):
                if not any(is_isomorphic(X, Y) for Y in atom_survivors):
                    atom_survivors.append(X)
    arrow = simplex(1, d)
    survivors = [tuple(X if u else empty(d) for u in U) for X in (atom_survivors if any(U) else [None])]
    if any(U):
        same = len(atom_survivors) == 1 and is_isomorphic(atom_survivors[0], arrow)
    else:
        same = True  # only the empty object has empty support
    return SearchResult(ctx.name, tuple(U), examined, pruned, survivors, same)


__all__ = [
    "BUILTIN_FAMILIES",
    "CONDITIONS",
    "DnResult",
    "ProductContext",
    "SearchResult",
    "SymbolicFamily",
    "TruncatedSimplicialObject",
    "boundary",
    "build",
    "builtin_contexts",
    "builtin_family",
    "constant",
    "coproduct",
    "dn_sequence",
    "empty",
    "family_diverges",
    "frechet_externally_discrete",
    "from_cells",
    "hom_set",
    "is_constant_map",
    "is_externally_discrete",
    "is_isomorphic",
    "parse_sset",
    "passes_all",
    "product",
    "simplex",
    "sphere",
    "suitable_propositions",
    "truncation",
    "unique_arrow_check",
    "unique_arrow_search",
]
