from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from germcat.catalog import chain, finset, power_category, walking_arrow
from germcat.equivalence import find_equivalence
from germcat.filterprod import (
    UNDECIDABLE,
    EventualSequence,
    Tail,
    check_powerset_embedding,
    distinct_germs,
    finite_filter_product,
    frechet_germ_eq,
    internal_naturals,
    parse_seq,
    strict_initial,
    tails_eventually_equal,
)


def test_strict_initial():
    assert finset(2).objects[strict_initial(finset(2))] == "0"
    # the bottom of a chain receives only its identity
    assert strict_initial(chain(3)) == 0


def test_product_over_principal_filter_is_a_power():
    F = finset(2)
    P = finite_filter_product(F, [1, 2, 3], [{1, 2}, {1, 2, 3}])
    E = find_equivalence(P.category, power_category([F, F]))
    assert E is not None
    assert P.report.ok


def test_product_over_a_point_is_the_category():
    F = finset(2)
    P = finite_filter_product(F, [1, 2], [{1}, {1, 2}])
    assert find_equivalence(P.category, F) is not None


def test_product_requires_a_filter():
    with pytest.raises(ValueError, match="not a filter"):
        finite_filter_product(finset(1), [1, 2], [{1}])
    with pytest.raises(ValueError, match="outside the index"):
        finite_filter_product(finset(1), [1, 2], [{3}])


def test_product_requires_strict_initial():
    # no initial object in two discrete points
    from germcat.fincat import category_from_raw

    raw = {
        "objects": ["a", "b"],
        "arrows": {"1a": ("a", "a"), "1b": ("b", "b")},
        "identities": {"a": "1a", "b": "1b"},
        "compose": {("1a", "1a"): "1a", ("1b", "1b"): "1b"},
    }
    with pytest.raises(ValueError, match="strict initial"):
        finite_filter_product(category_from_raw(raw), [1], [{1}])


@pytest.mark.parametrize("C", [finset(2), walking_arrow(), finset(1)], ids=lambda C: C.name)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_powerset_embedding(C, k):
    assert check_powerset_embedding(C, list(range(k))).ok


# --- tails and sequences -------------------------------------------------------


def test_tail_values():
    assert [Tail("half", (1,))(n) for n in range(5)] == [1, 1, 2, 2, 3]
    assert [Tail("identity", (3,))(n) for n in range(3)] == [3, 4, 5]
    assert [Tail("periodic", (0, 1))(n) for n in range(4)] == [0, 1, 0, 1]
    assert Tail("identity", (0,)) == Tail("identity")


@pytest.mark.parametrize(
    "kind,params",
    [("const", ()), ("periodic", ()), ("identity", (1, 2)), ("const", (-1,)), ("cubic", ())],
)
def test_bad_tails(kind, params):
    with pytest.raises(ValueError):
        Tail(kind, params)


def test_eventual_equality():
    assert tails_eventually_equal(Tail("const", (2,)), Tail("periodic", (2, 2)))
    assert not tails_eventually_equal(Tail("periodic", (0, 1)), Tail("periodic", (1, 0)))
    assert not tails_eventually_equal(Tail("identity"), Tail("half"))
    assert not tails_eventually_equal(Tail("identity"), Tail("identity", (1,)))
    assert not tails_eventually_equal(Tail("identity"), Tail("const", (4,)))


def test_exceptions_do_not_change_the_germ():
    s = parse_seq("seq tail=identity except {0:5, 3:1}")
    t = parse_seq("seq tail=identity except {}")
    assert s.window(4) == [5, 1, 2, 1, 4]
    assert frechet_germ_eq(s, t) is True


def test_mixed_constructors_undecidable():
    a = parse_seq("family tail=sphere(identity) except {}")
    b = parse_seq("family tail=simplex(identity) except {}")
    assert frechet_germ_eq(a, b) is UNDECIDABLE
    with pytest.raises(TypeError):
        bool(frechet_germ_eq(a, b))
    with pytest.raises(ValueError):
        frechet_germ_eq(a, parse_seq("seq tail=identity except {}"))


def test_internal_naturals_partition():
    sample = [
        parse_seq("seq tail=const(0) except {}"),
        parse_seq("seq tail=periodic(0) except {1:7}"),
        parse_seq("seq tail=identity except {}"),
        parse_seq("seq tail=identity except {2:0}"),
        parse_seq("seq tail=half except {}"),
    ]
    part = internal_naturals(sample)
    assert part.count == 3 and not part.flagged


def test_internal_naturals_flags_undecidable():
    part = internal_naturals(
        [parse_seq("family tail=sphere(const(1)) except {}"), parse_seq("family tail=simplex(const(1)) except {}")]
    )
    assert part.count == 2 and len(part.flagged) == 1


@pytest.mark.parametrize("k", [1, 5, 17])
def test_distinct_germs(k):
    assert internal_naturals(distinct_germs(k)).count == k


@pytest.mark.parametrize(
    "text",
    [
        "seq tail=const(3) except {}",
        "seq tail=periodic(1,2,3) except {0:9}",
        "seq tail=half(2) except {1:0, 4:4}",
        "family tail=sphere(half(1)) except {0:sphere(0)}",
        "family tail=simplex(identity(3)) except {0:simplex(2), 1:simplex(1)}",
        "family tail=constant(const(1)) except {}",
    ],
)
def test_literal_roundtrip(text):
    s = parse_seq(text)
    assert s.encode() == text
    assert parse_seq(s.encode()) == s


@pytest.mark.parametrize(
    "text",
    [
        "seq tail=cubic except {}",
        "seq tail=identity except {0:1, 0:2}",
        "seq tail=identity except {0:sphere(1)}",
        "family tail=sphere(identity) except {0:3}",
        "family tail=torus(identity) except {}",
        "tail=identity",
    ],
)
def test_literal_errors(text):
    with pytest.raises(ValueError):
        parse_seq(text)


tails = st.one_of(
    st.integers(0, 5).map(lambda v: Tail("const", (v,))),
    st.integers(0, 3).map(lambda c: Tail("identity", (c,))),
    st.integers(0, 3).map(lambda c: Tail("half", (c,))),
    st.lists(st.integers(0, 3), min_size=1, max_size=4).map(lambda p: Tail("periodic", tuple(p))),
)


@settings(max_examples=200, deadline=None)
@given(tails, tails)
def test_eventual_equality_matches_a_long_window(a, b):
    # beyond the largest period, agreement on a long window decides the germ
    window = range(100, 160)
    assert tails_eventually_equal(a, b) == all(a(n) == b(n) for n in window)


@settings(max_examples=100, deadline=None)
@given(tails, st.dictionaries(st.integers(0, 20), st.integers(0, 9), max_size=4))
def test_encode_parse_roundtrip(tail, exc):
    s = EventualSequence.of(tail, exc)
    assert parse_seq(s.encode()) == s
    assert frechet_germ_eq(s, EventualSequence.of(tail)) is True


@settings(max_examples=50, deadline=None)
@given(st.lists(tails, min_size=1, max_size=8))
def test_partition_is_an_equivalence(ts):
    part = internal_naturals([EventualSequence.of(t) for t in ts])
    for c1, c2 in itertools.combinations(part.classes, 2):
        assert not tails_eventually_equal(c1[0].tail, c2[0].tail)
    for c in part.classes:
        assert all(tails_eventually_equal(c[0].tail, s.tail) for s in c)
