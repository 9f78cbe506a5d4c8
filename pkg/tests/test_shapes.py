from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from germcat.catalog import finset, power_category, walking_arrow
from germcat.fincat import Functor
from germcat.filtquot import principal_filter
from germcat.model import ModelStructureData, MorphismClass
from germcat.shapes import (
    AxiomError,
    ShapeModel,
    ShapesFilterTriple,
    check_coherent,
    check_strict_interval,
    fiber_lattice,
    interval_component,
    interval_fragment,
    is_fibration,
    lifted_filter,
    mono_category,
    parse_axiom,
    quotient_shapes_tuple,
    regular_epi_mask,
    subobject_union,
    validate_shape_theory,
    validate_shapes_tuple,
    validate_triple,
)


@pytest.fixture(scope="module")
def frag():
    return interval_fragment()


@pytest.fixture(scope="module")
def tuple_report(frag):
    return validate_shapes_tuple(frag.tuple)


def _names(rep):
    return [c.name for c in rep.failures]


def test_codomain_fibration_of_finset():
    mono = mono_category(finset(2))
    assert is_fibration(mono.cod).ok
    for b in range(3):
        assert not fiber_lattice(mono.cod, b).lattice_failures()


def test_subobject_lattice_of_two():
    mono = mono_category(finset(2))
    L = fiber_lattice(mono.cod, finset(2).obj("2"))
    # DERIVED: subobjects of a two-element set form the square 0 < {a},{b} < 2
    reps = []
    for e in L.elements:
        if not any(L.iso(int(e), r) for r in reps):
            reps.append(int(e))
    assert len(reps) == 4
    a, b = [r for r in reps if not L.iso(r, L.top()) and not L.iso(r, L.bottom())]
    assert L.iso(L.meet(a, b), L.bottom()) and L.iso(L.join(a, b), L.top())


def test_identity_is_a_fibration():
    assert is_fibration(Functor.identity(walking_arrow())).ok


def test_regular_epis_in_finset_are_surjections():
    C = finset(2)
    names = [C.arrows[f] for f in np.flatnonzero(regular_epi_mask(C))]
    assert names == ["0>0[]", "1>1[0]", "2>1[00]", "2>2[01]", "2>2[10]"]


def test_subobject_union():
    C = finset(2)
    u = subobject_union(C, C.arr("1>2[0]"), C.arr("1>2[1]"))
    assert u is not None and C.objects[C.dom[u]] == "2"


def test_identity_is_coherent():
    assert check_coherent(Functor.identity(finset(2))).ok


def test_interval_component_theory():
    assert validate_shape_theory(interval_component()).ok


def test_fragment_tuple_is_valid(tuple_report):
    assert tuple_report.ok, tuple_report.to_text()


def test_every_packaged_axiom_holds(frag):
    rep = check_strict_interval(frag.tuple.theory, frag.tuple.interval)
    axioms = [c for c in rep.checks if c.name.startswith("axiom")]
    assert len(axioms) == len(frag.tuple.interval.axioms) and rep.ok


def test_fragment_triple_is_valid(frag):
    assert validate_triple(frag.tuple, frag.triple).ok


def test_quotient_pipeline(frag, tuple_report):
    q, rep = quotient_shapes_tuple(frag.tuple, frag.triple, upstream=tuple_report)
    assert rep.ok, rep.to_text()
    # the quotient sees one coordinate of the pair
    assert q.V.n_objects == 9 and q.V.n_arrows == 99
    assert check_strict_interval(q.theory, q.interval).ok


def test_lifted_filter_is_a_filter(frag):
    lf = lifted_filter(frag.tuple.theory.p, frag.triple.phi_T)
    assert len(lf) >= len(frag.triple.phi_T)


# --- negatives ------------------------------------------------------------------


def test_broken_m0_gives_clause_two_witness(frag):
    tup = frag.tuple
    T0, V = tup.theory.T0, tup.V
    z = V.obj("(0,0)")
    m0 = Functor(T0, V, [z] * T0.n_objects, [V.identity(z)] * T0.n_arrows, name="collapsed")
    bad = replace(tup, model=ShapeModel(m0, tup.model.m1, tup.model.mono))
    rep = validate_shapes_tuple(bad, interval=False)
    failing = _names(rep)
    assert "(2) m0 preserves terminal object" in failing
    assert "(2) cod m1 == m0 p on objects and arrows" in failing
    wit = next(c for c in rep.failures if c.name.startswith("(2) cod m1")).witnesses
    assert wit


def test_shrunk_weak_equivalences_give_clause_four_witness(frag):
    tup = frag.tuple
    V = tup.V
    W = MorphismClass.isos(V).with_(V.arr("(0>1[],0>1[])"))
    M = ModelStructureData(V, MorphismClass.all(V), MorphismClass.all(V), W, "shrunk")
    rep = validate_shapes_tuple(replace(tup, M=M), interval=False)
    c4 = next(c for c in rep.checks if c.name.startswith("(4)"))
    assert c4.status == "fail"
    assert {"U", "f", "image"} <= set(c4.witnesses[0])


def test_triple_with_stray_m0_is_rejected(frag, tuple_report):
    tup = frag.tuple
    V = tup.V
    off = principal_filter(V, "(0,1)")
    tri = ShapesFilterTriple(frag.triple.phi_T, off, off)
    rep = validate_triple(tup, tri)
    assert "m0 restricts to Phi_T -> Phi_V" in _names(rep)
    q, qrep = quotient_shapes_tuple(tup, tri, upstream=tuple_report)
    assert q is None and not qrep.ok


def test_filter_on_wrong_category_is_rejected(frag):
    wrong = principal_filter(finset(2), "1")
    tri = ShapesFilterTriple(wrong, frag.triple.phi_V, frag.triple.phi_M)
    assert "Phi_T lives on the right category" in _names(validate_triple(frag.tuple, tri))


def test_false_axiom_reported(frag):
    tup = frag.tuple
    iv = replace(tup.interval, axioms=("pull(0, at0) = bot(1)",))
    rep = check_strict_interval(tup.theory, iv)
    assert not rep.ok


# --- axiom language -------------------------------------------------------------


def test_parse_axiom():
    assert parse_axiom("meet(at0, at1) = bot(I)") == ("=", ("meet", "at0", "at1"), ("bot", "I"))
    assert parse_axiom("at0 <= top(I)")[0] == "<="


@pytest.mark.parametrize("text", ["meet(at0, at1)", "top(I) = bot(I) bot(I)", "pull(0, at0 = top(1)", "at0 # at1"])
def test_parse_axiom_errors(text):
    with pytest.raises(AxiomError):
        parse_axiom(text)


@pytest.mark.parametrize("text", ["frob(at0) = at0", "meet(at0, top(1)) = at0", "zap = at0"])
def test_axiom_evaluation_errors_are_reported(frag, text):
    tup = frag.tuple
    rep = check_strict_interval(tup.theory, replace(tup.interval, axioms=(text,)))
    assert not rep.ok
    assert text in rep.failures[0].witnesses[0]
