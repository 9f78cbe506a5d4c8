from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from germcat.catalog import chain, finset, power_category, random_poset, sierpinski, terminal_category, walking_arrow
from germcat.fincat import (
    Diagram,
    Functor,
    category_from_raw,
    category_to_raw,
    colimit,
    exponential,
    is_limit,
    limit,
    subobject_classifier,
    subobjects,
    subterminal_poset,
    validate_category,
)

from oracles import has_product_naive, is_mono_naive, is_product_naive, is_terminal_naive

SMALL = [finset(2), chain(3), walking_arrow(), terminal_category(), finset(1)]


@pytest.mark.parametrize("C", SMALL + [power_category([finset(2), finset(2)])], ids=lambda C: C.name)
def test_catalog_categories_satisfy_the_laws(C):
    assert validate_category(C).ok


def test_finset2_counts():
    C = finset(2)
    # DERIVED: 1 + 1 + 1 + 1 + 2 + 1 + 4 = 11 functions between sets of size <= 2
    assert (C.n_objects, C.n_arrows) == (3, 11)
    assert C.objects[C.terminal()] == "1" and C.objects[C.initial()] == "0"


@pytest.mark.parametrize("C", SMALL, ids=lambda C: C.name)
def test_terminal_matches_oracle(C):
    t = C.terminal()
    naive = [x for x in range(C.n_objects) if is_terminal_naive(C, x)]
    assert (t is None and not naive) or (t in naive)


@pytest.mark.parametrize("C", SMALL, ids=lambda C: C.name)
def test_products_match_oracle(C):
    for x, y in itertools.product(range(C.n_objects), repeat=2):
        cone = C.product(x, y)
        assert (cone is not None) == has_product_naive(C, x, y)
        if cone is not None:
            assert is_product_naive(C, x, y, cone.apex, *cone.legs)


@pytest.mark.parametrize("C", SMALL, ids=lambda C: C.name)
def test_monos_match_oracle(C):
    mask = C.mono_mask()
    assert [bool(mask[f]) for f in range(C.n_arrows)] == [is_mono_naive(C, f) for f in range(C.n_arrows)]


def test_no_product_in_two_discrete_objects():
    raw = {
        "objects": ["a", "b"],
        "arrows": {"1a": ("a", "a"), "1b": ("b", "b")},
        "identities": {"a": "1a", "b": "1b"},
        "compose": {("1a", "1a"): "1a", ("1b", "1b"): "1b"},
    }
    C = category_from_raw(raw)
    assert C.product(0, 1) is None and C.terminal() is None


def test_pullback_in_finset():
    C = finset(2)
    a = C.arr("1>2[0]")
    b = C.arr("1>2[1]")
    pb = C.pullback(a, b)
    assert pb is not None and C.objects[pb.apex] == "0"


def test_limit_of_empty_diagram_is_terminal():
    C = chain(3)
    L = limit(Diagram.empty(C))
    assert L.apex == C.terminal()
    assert colimit(Diagram.empty(C)).apex == C.initial()
    assert is_limit(Diagram.empty(C), L)


def test_equalizer_of_the_two_points():
    C = finset(2)
    f, g = C.arr("1>2[0]"), C.arr("1>2[1]")
    L = limit(Diagram.parallel(C, f, g))
    assert C.objects[L.apex] == "0"


def test_exponential_in_finset():
    C = finset(2)
    # 2^2 has four elements and does not fit
    assert exponential(C, C.obj("2"), C.obj("2")) is None
    e = exponential(C, C.obj("2"), C.obj("1"))
    assert e is not None and C.objects[e.obj] == "1"
    e0 = exponential(C, C.obj("0"), C.obj("2"))
    assert C.objects[e0.obj] == "1"


def test_subobject_classifiers():
    assert finset(2).objects[subobject_classifier(finset(2)).omega] == "2"
    assert subobject_classifier(chain(3)) is None
    V = power_category([finset(2), finset(2)])
    assert V.objects[subobject_classifier(V).omega] == "(2,2)"


def test_subobjects_of_two():
    C = finset(2)
    # empty, the two points, everything
    assert len(subobjects(C, C.obj("2"))) == 4


def test_subterminals():
    assert subterminal_poset(finset(2)).names() == ["0", "1"]
    P = subterminal_poset(power_category([finset(2), finset(2)]))
    assert P.names() == ["(0,0)", "(0,1)", "(1,0)", "(1,1)"]
    a, b = P.index(P.elements[1]), P.index(P.elements[2])
    assert P.names()[P.index(P.meet(P.elements[a], P.elements[b]))] == "(0,0)"
    assert subterminal_poset(sierpinski(2, 2)).names() == ["0>0[]", "0>1[]", "1>1[0]"]


def test_raw_roundtrip():
    C = finset(2)
    D = category_from_raw(category_to_raw(C))
    assert D.objects == C.objects and D.arrows == C.arrows
    assert np.array_equal(D.comp, C.comp)


def test_raw_validation_reports_each_law():
    raw = category_to_raw(walking_arrow())
    raw["compose"] = dict(raw["compose"])
    raw["compose"][("1<=1", "0<=1")] = "0<=0"
    rep = validate_category(raw)
    assert [c.name for c in rep.failures] == ["composites have the right type"]
    with pytest.raises(ValueError, match="not a category"):
        category_from_raw(raw)


def test_missing_identity_is_reported():
    rep = validate_category({"objects": ["a"], "arrows": []})
    assert rep.first_failure().name == "identities exist and are endomorphisms"


def test_unknown_reference():
    rep = validate_category({"objects": ["a"], "arrows": {"f": ("a", "z")}})
    assert rep.first_failure().name == "references resolve"


def test_op_and_functor_checks():
    C = finset(2)
    assert validate_category(C.op()).ok
    assert Functor.identity(C).check().ok
    F = Functor.identity(C).then(Functor.identity(C))
    assert F.is_functor()


def test_broken_functor_detected():
    C = walking_arrow()
    F = Functor(C, C, [0, 1], [0, 0, 2])  # 0<=1 sent to an endomorphism
    assert not F.check().ok


def test_full_subcategory():
    C = finset(2)
    S, inc = C.full_subcategory([C.obj("0"), C.obj("2")])
    assert S.n_arrows == 1 + 1 + 4
    assert inc.is_functor()


def test_iso_classes():
    C = finset(2)
    assert [len(c) for c in C.iso_classes()] == [1, 1, 1]
    assert C.is_iso(C.arr("2>2[10]"))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_random_posets_are_categories(seed, n):
    C = random_poset(np.random.default_rng(seed), n)
    assert validate_category(C).ok
    # thin: at most one arrow per hom
    assert C.hom_sizes().max() <= 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_poset_products_are_meets(seed, n):
    C = random_poset(np.random.default_rng(seed), n)
    for x, y in itertools.product(range(n), repeat=2):
        assert (C.product(x, y) is not None) == has_product_naive(C, x, y)
