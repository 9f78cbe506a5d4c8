from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from germcat import _kernels_py, kernels
from germcat.catalog import chain, finset, power_category, random_poset, walking_arrow
from germcat.fincat import Diagram, _edges
from germcat.sset import boundary, coproduct, simplex, sphere

ck = pytest.importorskip("germcat._ckernels")

CATS = [finset(2), chain(3), walking_arrow(), power_category([finset(1), finset(2)])]


def test_backend_selected():
    assert kernels.BACKEND in ("python", "cython")
    assert _kernels_py.BACKEND == "python" and ck.BACKEND == "cython"


def test_pure_python_switch():
    env = dict(os.environ, GERMCAT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from germcat import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env=env,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("C", CATS, ids=lambda C: C.name)
def test_cones_agree(C):
    for x in range(C.n_objects):
        for y in range(C.n_objects):
            for apex in range(C.n_objects):
                D = Diagram.discrete(C, [x, y])
                cands = [C.hom(apex, x), C.hom(apex, y)]
                a = _kernels_py.enumerate_cones(C.comp, cands, _edges(D))
                b = ck.enumerate_cones(C.comp, cands, _edges(D))
                assert np.array_equal(a, b)
                assert _kernels_py.count_cones(C.comp, cands, _edges(D)) == ck.count_cones(C.comp, cands, _edges(D))


@pytest.mark.parametrize("C", CATS, ids=lambda C: C.name)
def test_parallel_pair_cones_agree(C):
    for f in range(C.n_arrows):
        for g in range(C.n_arrows):
            if C.dom[f] != C.dom[g] or C.cod[f] != C.cod[g]:
                continue
            D = Diagram.parallel(C, f, g)
            for apex in range(C.n_objects):
                cands = [C.hom(apex, int(o)) for o in D.obj_map]
                for lim in (-1, 1):
                    a = _kernels_py.enumerate_cones(C.comp, cands, _edges(D), lim)
                    b = ck.enumerate_cones(C.comp, cands, _edges(D), lim)
                    assert np.array_equal(a, b)


@pytest.mark.parametrize("C", CATS, ids=lambda C: C.name)
def test_associativity_agrees(C):
    assert _kernels_py.first_assoc_violation(C.comp, C.dom, C.cod) is None
    assert ck.first_assoc_violation(C.comp, C.dom, C.cod) is None


def test_associativity_violation_agrees():
    C = finset(2)
    comp = C.comp.copy()
    g, f = C.arr("2>2[10]"), C.arr("1>2[0]")
    comp[g, f] = C.arr("1>2[0]")  # swap o point0 should be point1
    a = _kernels_py.first_assoc_violation(comp, C.dom, C.cod)
    b = ck.first_assoc_violation(comp, C.dom, C.cod)
    assert a is not None and tuple(a) == tuple(b)


@pytest.mark.parametrize("C", CATS[:3], ids=lambda C: C.name)
def test_lifting_agrees(C):
    for i in range(C.n_arrows):
        for p in range(C.n_arrows):
            a, b, x, y = C.dom[i], C.cod[i], C.dom[p], C.cod[p]
            args = (C.comp, i, p, C.hom(a, x), C.hom(b, y), C.hom(b, x))
            r1, r2 = _kernels_py.first_lifting_failure(*args), ck.first_lifting_failure(*args)
            assert (r1 is None and r2 is None) or tuple(r1) == tuple(r2)


def _maps(mod, X, Y, limit=-1):
    res = mod.enumerate_simplicial_maps(
        np.array(X.sizes), X.faces, X.degens, np.array(Y.sizes), Y.faces, Y.degens, limit
    )
    return sorted(tuple(tuple(int(v) for v in lvl) for lvl in m) for m in res)


@pytest.mark.parametrize(
    "X,Y",
    [
        (simplex(1, 2), simplex(2, 2)),
        (boundary(2, 2), simplex(2, 2)),
        (sphere(1, 2), coproduct(sphere(1, 2), simplex(1, 2))),
        (simplex(2, 3), sphere(2, 3)),
        (simplex(0, 2), boundary(2, 2)),
    ],
    ids=lambda X: X.name,
)
def test_simplicial_maps_agree(X, Y):
    assert _maps(_kernels_py, X, Y) == _maps(ck, X, Y)
    assert len(_maps(ck, X, Y, 1)) == min(1, len(_maps(ck, X, Y)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_random_poset_kernels_agree(seed, n):
    C = random_poset(np.random.default_rng(seed), n)
    assert _kernels_py.first_assoc_violation(C.comp, C.dom, C.cod) == ck.first_assoc_violation(C.comp, C.dom, C.cod)
    for x in range(n):
        for y in range(n):
            D = Diagram.discrete(C, [x, y])
            for apex in range(n):
                cands = [C.hom(apex, x), C.hom(apex, y)]
                assert np.array_equal(
                    _kernels_py.enumerate_cones(C.comp, cands, _edges(D)), ck.enumerate_cones(C.comp, cands, _edges(D))
                )
