from __future__ import annotations

import numpy as np
import pytest

from germcat.catalog import chain, finset, power_category, walking_arrow
from germcat.equivalence import find_equivalence
from germcat.filtquot import principal_filter, trivial_filter
from germcat.model import (
    ModelStructureData,
    MorphismClass,
    has_lift,
    lifting_failure,
    lifting_matrix,
    parse_class,
    right_proper,
    stability_failures,
    transfer_model_structure,
    transferred_class,
    two_out_of_three_failures,
    validate_model_filter,
    verify_model_structure,
    verify_wfs,
)

from oracles import lifts_naive


@pytest.mark.parametrize("C", [finset(2), chain(3), walking_arrow()], ids=lambda C: C.name)
def test_lifting_matrix_matches_oracle(C):
    L = lifting_matrix(C)
    for i in range(C.n_arrows):
        for p in range(C.n_arrows):
            assert bool(L[i, p]) == lifts_naive(C, i, p)
            assert (lifting_failure(C, i, p) is None) == bool(L[i, p])


def test_has_lift_rejects_bad_square():
    C = finset(2)
    i, p = C.arr("1>2[0]"), C.identity(C.obj("2"))
    u = C.arr("1>2[1]")
    with pytest.raises(ValueError):
        has_lift(C, i, p, u, C.identity(C.obj("2")))


@pytest.mark.parametrize(
    "L,R,ok",
    [
        ("isos", "all", True),
        ("all", "isos", True),
        ("epis", "monos", True),
        ("monos", "epis", False),
        ("identities", "all", False),
    ],
)
def test_weak_factorization_systems_on_finset(L, R, ok):
    C = finset(2)
    assert verify_wfs(C, parse_class(C, L), parse_class(C, R)).ok is ok


def test_class_parsing():
    C = finset(2)
    assert len(parse_class(C, "isos")) == 4  # three identities and the swap
    assert len(parse_class(C, "explicit {1>2[0], 2>2[10]}")) == 2
    V = power_category([C, C])
    comp = parse_class(V, "component-iso 1", [C, C])
    assert len(comp) == 4 * 11
    with pytest.raises(ValueError):
        parse_class(C, "fibrant")
    with pytest.raises(ValueError):
        parse_class(V, "component-iso 1")


def test_class_mask_must_cover():
    with pytest.raises(ValueError):
        MorphismClass(finset(2), np.zeros(3, dtype=bool))


def test_two_out_of_three():
    C = finset(2)
    assert not two_out_of_three_failures(C, MorphismClass.all(C))
    assert not two_out_of_three_failures(C, MorphismClass.isos(C))
    assert two_out_of_three_failures(C, MorphismClass.monos(C))


def _trivial(C, cof="all", weak="isos"):
    return ModelStructureData(C, MorphismClass.all(C), parse_class(C, cof), parse_class(C, weak), "trivial")


@pytest.mark.parametrize("C", [finset(2), chain(3), power_category([finset(2), finset(2)])], ids=lambda C: C.name)
def test_trivial_structures(C):
    assert verify_model_structure(_trivial(C)).ok
    assert verify_model_structure(_trivial(C, "isos", "all")).ok
    assert right_proper(_trivial(C)).ok


def test_broken_structure_reports_weak_equivalences():
    C = finset(2)
    M = ModelStructureData(C, MorphismClass.all(C), MorphismClass.all(C), MorphismClass.monos(C))
    rep = verify_model_structure(M)
    assert "two-out-of-three for W" in [c.name for c in rep.failures]


@pytest.fixture(scope="module")
def V():
    return power_category([finset(2), finset(2)])


def test_model_filter_and_transfer(V):
    M = _trivial(V)
    phi = principal_filter(V, "(1,0)")
    assert validate_model_filter(M, phi).ok
    tr = transfer_model_structure(M, phi)
    assert tr.report.ok, tr.report.to_text()
    MQ = tr.structure
    assert len(MQ.F) == MQ.category.n_arrows
    assert len(MQ.C) == MQ.category.n_arrows
    # isomorphism germs: the first component of a representative is a bijection
    assert len(MQ.W) == 9 * 4
    assert find_equivalence(MQ.category, finset(2)) is not None


def test_transfer_along_trivial_filter_is_identity(V):
    M = _trivial(V)
    tr = transfer_model_structure(M, trivial_filter(V))
    assert tr.report.ok
    assert len(tr.structure.W) == len(M.W)


def test_unstable_class_blocks_transfer():
    # explicit cofibrations that are not closed under - x U
    C = power_category([finset(1), finset(1)])
    # (0,0) -> (1,1) times (1,0) is (0,0) -> (1,0), which is left out
    cof = MorphismClass.isos(C).with_(C.arr("(0>1[],0>1[])"))
    M = ModelStructureData(C, MorphismClass.all(C), cof, MorphismClass.isos(C), "odd")
    phi = principal_filter(C, "(1,0)")
    assert stability_failures(cof, phi)
    rep = transfer_model_structure(M, phi).report
    assert not rep.ok
    assert any("filter-product stable" in c.name for c in rep.failures)


def test_transferred_class_of_all_is_all(V):
    from germcat.filtquot import filter_quotient

    QC = filter_quotient(V, principal_filter(V, "(0,1)"))
    S = transferred_class(MorphismClass.all(V), QC)
    assert len(S) == QC.category.n_arrows
