"""Built-in finite categories."""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .fincat import FiniteCategory, Functor

__all__ = [
    "arrow_category",
    "chain",
    "finset",
    "poset_category",
    "power_category",
    "product_category",
    "random_poset",
    "sierpinski",
    "terminal_category",
    "walking_arrow",
]


def poset_category(elements: Sequence[str], leq: Callable[[int, int], bool], name: str = "") -> FiniteCategory:
    """The thin category of a finite preorder."""
    n = len(elements)
    arrows = [(i, j, 0) for i in range(n) for j in range(n) if leq(i, j)]
    return FiniteCategory.from_concrete(
        list(elements),
        arrows,
        compose=lambda g, f: 0,
        identity=lambda i: 0,
        arrow_name=lambda d, c, _: f"{elements[d]}<={elements[c]}",
        name=name or "poset",
    )


def random_poset(rng: np.random.Generator, n: int, density: float = 0.4) -> FiniteCategory:
    """A random partial order on ``n`` points: a random DAG along the index
    order, transitively closed."""
    rel = np.eye(n, dtype=bool) | np.triu(rng.random((n, n)) < density, 1)
    for k in range(n):
        rel |= rel[:, k : k + 1] & rel[k : k + 1, :]
    return poset_category([f"p{i}" for i in range(n)], lambda i, j: bool(rel[i, j]), name=f"random-poset{n}")


def terminal_category() -> FiniteCategory:
    return poset_category(["*"], lambda i, j: True, name="1")


def walking_arrow() -> FiniteCategory:
    return poset_category(["0", "1"], lambda i, j: i <= j, name="walking-arrow")


def chain(n: int) -> FiniteCategory:
    """The chain ``0 < 1 < ... < n-1``."""
    return poset_category([str(i) for i in range(n)], lambda i, j: i <= j, name=f"chain{n}")


def _fn_name(m: int, n: int, f: tuple[int, ...]) -> str:
    return f"{m}>{n}[{''.join(map(str, f))}]"


@lru_cache(maxsize=None)
def finset(k: int) -> FiniteCategory:
    """Skeletal finite sets ``{0, ..., m-1}`` for ``m <= k``, all functions."""
    arrows = [
        (m, n, f)
        for m in range(k + 1)
        for n in range(k + 1)
        for f in itertools.product(range(n), repeat=m)
    ]
    return FiniteCategory.from_concrete(
        [str(m) for m in range(k + 1)],
        arrows,
        compose=lambda g, f: tuple(g[x] for x in f),
        identity=lambda m: tuple(range(m)),
        arrow_name=_fn_name,
        name=f"FinSet<={k}",
        obj_data=list(range(k + 1)),
    )


def power_category(factors: Sequence[FiniteCategory], name: str = "") -> FiniteCategory:
    """The product category of ``factors`` with componentwise composition.

    Objects are named ``(a,b,...)``; ``obj_data``/``arr_data`` hold the
    component indices.
    """
    factors = list(factors)
    no = [C.n_objects for C in factors]
    na = [C.n_arrows for C in factors]
    obj_tuples = list(itertools.product(*[range(n) for n in no]))
    arr_tuples = list(itertools.product(*[range(n) for n in na]))
    ostride = np.array([int(np.prod(no[i + 1 :])) for i in range(len(no))], dtype=np.int64)
    astride = np.array([int(np.prod(na[i + 1 :])) for i in range(len(na))], dtype=np.int64)
    A = np.array(arr_tuples, dtype=np.int64).reshape(len(arr_tuples), len(factors))
    N = len(arr_tuples)
    dom = sum(ostride[i] * factors[i].dom[A[:, i]] for i in range(len(factors)))
    cod = sum(ostride[i] * factors[i].cod[A[:, i]] for i in range(len(factors)))
    O = np.array(obj_tuples, dtype=np.int64).reshape(len(obj_tuples), len(factors))
    ident = sum(astride[i] * factors[i].ident[O[:, i]] for i in range(len(factors)))
    comp = np.empty((N, N), dtype=np.int32)
    chunk = max(1, 2_000_000 // max(N, 1))
    for r0 in range(0, N, chunk):
        rows = slice(r0, min(N, r0 + chunk))
        acc = np.zeros((rows.stop - rows.start, N), dtype=np.int64)
        bad = np.zeros_like(acc, dtype=bool)
        for i, C in enumerate(factors):
            c = C.comp[A[rows, i][:, None], A[:, i][None, :]].astype(np.int64)
            bad |= c < 0
            acc += astride[i] * c
        acc[bad] = -1
        comp[rows] = acc
    objects = ["(" + ",".join(C.objects[t[i]] for i, C in enumerate(factors)) + ")" for t in obj_tuples]
    arrows = ["(" + ",".join(C.arrows[t[i]] for i, C in enumerate(factors)) + ")" for t in arr_tuples]
    return FiniteCategory(
        objects,
        arrows,
        dom,
        cod,
        ident,
        comp,
        name=name or " x ".join(C.name for C in factors),
        obj_data=obj_tuples,
        arr_data=arr_tuples,
    )


def product_category(C: FiniteCategory, D: FiniteCategory, name: str = "") -> FiniteCategory:
    return power_category([C, D], name=name)


def projection(P: FiniteCategory, factors: Sequence[FiniteCategory], i: int) -> Functor:
    """The ``i``-th projection out of ``power_category(factors)``."""
    om = [t[i] for t in P.obj_data]
    am = [t[i] for t in P.arr_data]
    return Functor(P, factors[i], om, am, name=f"pr{i + 1}")


def arrow_category(
    C: FiniteCategory, keep: Callable[[int], bool] | None = None, name: str = ""
) -> tuple[FiniteCategory, Functor, Functor]:
    """The arrow category on the arrows selected by ``keep`` (full on squares),
    with its domain and codomain functors."""
    objs = [a for a in range(C.n_arrows) if keep is None or keep(a)]
    N = C.n_arrows
    squares: list[tuple[int, int, int, int]] = []  # (src, tgt, u, v)
    for si, a in enumerate(objs):
        for ti, b in enumerate(objs):
            U = C.hom(int(C.dom[a]), int(C.dom[b]))
            V = C.hom(int(C.cod[a]), int(C.cod[b]))
            if not len(U) or not len(V):
                continue
            ok = C.comp[V, a][:, None] == C.comp[b, U][None, :]
            for vi, ui in zip(*np.nonzero(ok)):
                squares.append((si, ti, int(U[ui]), int(V[vi])))
    S = np.array(squares, dtype=np.int64).reshape(-1, 4)
    keyed = S[:, 2] * N + S[:, 3]
    # a square is determined by (u, v) together with its endpoints; (u, v) alone
    # can repeat across endpoints, so key on endpoints too
    nobj = len(objs)
    full_key = (S[:, 0] * nobj + S[:, 1]) * (N * N) + keyed
    order = np.argsort(full_key)
    sorted_keys = full_key[order]
    ns = len(S)
    comp = np.full((ns, ns), -1, dtype=np.int32)
    for t in range(ns):
        # g = square t; f ranges over squares ending at src(t)
        fs = np.flatnonzero(S[:, 1] == S[t, 0])
        if not len(fs):
            continue
        u = C.comp[S[t, 2], S[fs, 2]].astype(np.int64)
        v = C.comp[S[t, 3], S[fs, 3]].astype(np.int64)
        key = (S[fs, 0] * nobj + S[t, 1]) * (N * N) + u * N + v
        pos = np.searchsorted(sorted_keys, key)
        comp[t, fs] = order[pos]
    ident = []
    for si, a in enumerate(objs):
        key = (si * nobj + si) * (N * N) + C.ident[C.dom[a]] * N + C.ident[C.cod[a]]
        ident.append(int(order[np.searchsorted(sorted_keys, key)]))
    A = FiniteCategory(
        [C.arrows[a] for a in objs],
        [f"[{C.arrows[u]}|{C.arrows[v]}]:{C.arrows[objs[si]]}=>{C.arrows[objs[ti]]}" for si, ti, u, v in S],
        S[:, 0],
        S[:, 1],
        ident,
        comp,
        name=name or f"{C.name}^->",
        obj_data=objs,
        arr_data=[tuple(int(x) for x in row) for row in S],
    )
    objs_a = np.array(objs, dtype=np.int64)
    dom_f = Functor(A, C, C.dom[objs_a], S[:, 2], name="dom")
    cod_f = Functor(A, C, C.cod[objs_a], S[:, 3], name="cod")
    return A, dom_f, cod_f


@lru_cache(maxsize=None)
def sierpinski(max_dom: int = 2, max_cod: int = 2) -> FiniteCategory:
    """Functions ``[m] -> [n]`` with ``m <= max_dom``, ``n <= max_cod`` as the
    objects of a fragment of the arrow category of finite sets."""
    F = finset(max(max_dom, max_cod))
    sizes = F.obj_data
    A, _, _ = arrow_category(
        F,
        keep=lambda a: sizes[F.dom[a]] <= max_dom and sizes[F.cod[a]] <= max_cod,
        name=f"FinSet^->[{max_dom},{max_cod}]",
    )
    return A
