"""Compare the compiled and pure-Python kernels on representative workloads.

    python3 bench/bench_kernels.py [--repeat 3]

Each row times the same call with both backends and checks that the results
agree before reporting the speedup.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from germcat import _kernels_py as py
from germcat.catalog import finset, power_category, sierpinski
from germcat.fincat import Diagram, _edges
from germcat.sset import product, simplex, sphere

try:
    from germcat import _ckernels as cy
except ImportError:  # pragma: no cover
    cy = None


def _assoc(mod, C):
    return mod.first_assoc_violation(C.comp, C.dom, C.cod)


def _products(mod, C):
    total = 0
    for x in range(C.n_objects):
        for y in range(C.n_objects):
            D = Diagram.discrete(C, [x, y])
            e = _edges(D)
            for a in range(C.n_objects):
                total += mod.count_cones(C.comp, [C.hom(a, x), C.hom(a, y)], e)
    return total


def _pullbacks(mod, C, limit=60):
    total, seen = 0, 0
    for z in range(C.n_objects):
        into = C.into(z)
        for f in into:
            for g in into:
                if seen >= limit:
                    return total
                seen += 1
                D = Diagram.cospan(C, int(f), int(g))
                e = _edges(D)
                for a in range(C.n_objects):
                    total += mod.count_cones(C.comp, [C.hom(a, int(o)) for o in D.obj_map], e)
    return total


def _lifting(mod, C):
    fails = 0
    for i in range(C.n_arrows):
        a, b = C.dom[i], C.cod[i]
        for p in range(C.n_arrows):
            x, y = C.dom[p], C.cod[p]
            fails += mod.first_lifting_failure(C.comp, i, p, C.hom(a, x), C.hom(b, y), C.hom(b, x)) is not None
    return fails


def _smaps(mod, X, Y):
    return len(mod.enumerate_simplicial_maps(np.array(X.sizes), X.faces, X.degens, np.array(Y.sizes), Y.faces, Y.degens))


def workloads():
    V = power_category([finset(2), finset(2)])
    S = sierpinski(2, 2)
    F = finset(2)
    return [
        ("associativity, FinSet<=2^2", lambda m: _assoc(m, V)),
        ("associativity, arrow category", lambda m: _assoc(m, S)),
        ("binary product cones, FinSet<=2^2", lambda m: _products(m, V)),
        ("pullback cones, arrow category", lambda m: _pullbacks(m, S)),
        ("lifting matrix, FinSet<=2", lambda m: _lifting(m, F)),
        ("simplicial maps Delta[3] -> S^2 x S^1", lambda m: _smaps(m, simplex(3, 3), product(sphere(2, 3), sphere(1, 3)))),
    ]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if cy is None:
        print("compiled extension not built; nothing to compare")
        return
    print(f"{'workload':<42} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, fn in workloads():
        r_py, r_cy = fn(py), fn(cy)
        if r_py != r_cy:
            raise SystemExit(f"{name}: backends disagree ({r_py} vs {r_cy})")
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:<42} {t_py:>10.4f} {t_cy:>10.4f} {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
