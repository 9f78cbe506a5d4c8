from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from germcat.catalog import chain, finset, power_category, random_poset, walking_arrow
from germcat.docformat import random_filter_cases
from germcat.equivalence import find_equivalence, find_isomorphism
from germcat.fincat import Functor, subterminal_poset, validate_category
from germcat.filtquot import (
    GermMorphism,
    filter_quotient,
    germ_eq,
    germ_mono_characterization,
    induced_functor,
    is_isomorphism,
    make_filter,
    mono_witness,
    principal_filter,
    restrict,
    trivial_filter,
    validate_filter,
    verify_projection,
)

from oracles import is_filter_naive


@pytest.fixture(scope="module")
def V():
    return power_category([finset(2), finset(2)])


def test_principal_and_trivial(V):
    phi = principal_filter(V, "(1,0)")
    assert phi.names() == ["(1,0)", "(1,1)"]
    assert V.objects[phi.least()] == "(1,0)"
    assert trivial_filter(V).names() == ["(1,1)"]


def test_non_subterminal_rejected(V):
    with pytest.raises(ValueError, match="not subterminal"):
        principal_filter(V, "(2,0)")


def test_filter_clauses_reported(V):
    P = subterminal_poset(V)
    assert validate_filter(P, ["(1,0)"]).first_failure().name == "upward closed"
    assert validate_filter(P, []).first_failure().name == "non-empty"
    rep = validate_filter(P, ["(1,0)", "(0,1)", "(1,1)"])
    assert rep.first_failure().name == "intersection closed"
    assert validate_filter(P, ["(2,2)"]).first_failure().name == "elements are subterminal"
    with pytest.raises(ValueError, match="not a filter"):
        make_filter(P, ["(1,0)"])


def test_quotient_by_trivial_filter_is_isomorphic(V):
    QC = filter_quotient(V, trivial_filter(V))
    assert is_isomorphism(QC.projection)


def test_quotient_by_principal_collapses_to_factor(V):
    # DERIVED: germs over (1,0) only see the first coordinate
    QC = filter_quotient(V, principal_filter(V, "(1,0)"))
    assert validate_category(QC.category).ok
    # Hom((x1, 0), (y1, y2)) = Hom(x1, y1): 11 arrows for each choice of x2, y2
    assert QC.category.n_arrows == 3 * 3 * 11
    assert find_equivalence(QC.category, finset(2)) is not None


def test_chain_quotient_is_upper_segment():
    C = chain(3)
    QC = filter_quotient(C, principal_filter(C, "1"))
    E = find_equivalence(QC.category, chain(2))
    assert E is not None


@pytest.mark.parametrize(
    "C,u",
    [(chain(3), "1"), (finset(2), "1"), (walking_arrow(), "1"), (chain(4), "2")],
    ids=lambda x: getattr(x, "name", x),
)
def test_projection_preserves_structure(C, u):
    rep = verify_projection(C, principal_filter(C, u))
    assert rep.ok, rep.to_text()


def test_germ_equality_and_restriction(V):
    phi = principal_filter(V, "(1,0)")
    X, Y, U = V.obj("(2,2)"), V.obj("(2,2)"), V.obj("(1,1)")
    swap_second = V.arr("(2>2[01],2>2[10])")
    ident = V.identity(X)
    a = GermMorphism(X, Y, U, V.compose(ident, V.product(X, U).legs[0]))
    b = GermMorphism(X, Y, U, V.compose(swap_second, V.product(X, U).legs[0]))
    assert germ_eq(V, phi, a, b)
    assert not germ_eq(V, trivial_filter(V), a, b)
    r = restrict(V, a, phi.least())
    assert r.U == phi.least()


def test_germ_mono_characterization(V):
    QC = filter_quotient(V, principal_filter(V, "(1,0)"))
    assert germ_mono_characterization(QC).ok
    Q = QC.category
    for c in range(Q.n_arrows):
        assert (mono_witness(QC, c) is not None) == bool(Q.mono_mask()[c])


def test_induced_functor_identity(V):
    phi = principal_filter(V, "(1,0)")
    QC = filter_quotient(V, phi)
    F = induced_functor(Functor.identity(V), QC, QC)
    assert F.check().ok and is_isomorphism(F)


def test_induced_functor_rejects_stray_filter(V):
    QC = filter_quotient(V, principal_filter(V, "(1,0)"))
    QD = filter_quotient(V, principal_filter(V, "(0,1)"))
    with pytest.raises(ValueError, match="filter into the filter"):
        induced_functor(Functor.identity(V), QC, QD)


def test_quotient_isomorphic_to_itself(V):
    Q = filter_quotient(V, principal_filter(V, "(0,1)")).category
    assert find_isomorphism(Q, Q) is not None


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_random_filters_agree_with_naive(seed):
    cases = random_filter_cases(seed, 200)
    for P, S in cases:
        assert validate_filter(subterminal_poset(P), S).ok == is_filter_naive(P, S)


def test_random_filters_hit_both_sides():
    verdicts = [validate_filter(subterminal_poset(P), S).ok for P, S in random_filter_cases(0, 200)]
    assert any(verdicts) and not all(verdicts)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.data())
def test_filter_check_matches_definition(seed, n, data):
    C = random_poset(np.random.default_rng(seed), n)
    subset = data.draw(st.lists(st.sampled_from(C.objects), unique=True))
    assert validate_filter(subterminal_poset(C), subset).ok == is_filter_naive(C, subset)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_principal_filters_always_valid(seed, n):
    C = random_poset(np.random.default_rng(seed), n)
    for x in range(n):
        up = [C.objects[y] for y in range(n) if C.hom(x, y).size]
        assert is_filter_naive(C, up)
