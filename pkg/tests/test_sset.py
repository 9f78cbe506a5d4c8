from __future__ import annotations

import numpy as np
import pytest

from germcat.filterprod import parse_seq
from germcat.sset import (
    BUILTIN_FAMILIES,
    SymbolicFamily,
    TruncatedSimplicialObject,
    boundary,
    build,
    builtin_contexts,
    builtin_family,
    constant,
    coproduct,
    dn_sequence,
    empty,
    family_diverges,
    frechet_externally_discrete,
    from_cells,
    hom_set,
    is_constant_map,
    is_externally_discrete,
    is_isomorphic,
    parse_sset,
    passes_all,
    product,
    simplex,
    sphere,
    suitable_propositions,
    unique_arrow_check,
    unique_arrow_search,
)

from oracles import (
    boundary_levels,
    brute_hom_count,
    direct_frechet_discrete,
    dn_direct,
    quotient_sphere_levels,
    simplex_levels,
)


# --- construction -----------------------------------------------------------


def test_simplex_one_sizes():
    assert simplex(1, 1).sizes == (2, 3)


def test_boundary_one_sizes():
    assert boundary(1, 1).sizes == (2, 2)


@pytest.mark.parametrize("n", range(5))
def test_sphere_has_one_vertex_or_two_for_zero(n):
    assert sphere(n, 3).sizes[0] == (2 if n == 0 else 1)


@pytest.mark.parametrize("n,d", [(0, 3), (1, 4), (2, 4), (3, 5), (4, 5)])
def test_level_sizes_match_counting_oracle(n, d):
    assert list(simplex(n, d).sizes) == simplex_levels(n, d)
    assert list(boundary(n, d).sizes) == boundary_levels(n, d)
    assert list(sphere(n, d).sizes) == quotient_sphere_levels(n, d)


@pytest.mark.parametrize(
    "X",
    [
        simplex(3, 3),
        boundary(3, 3),
        sphere(2, 4),
        sphere(3, 3),
        constant(2, 3),
        product(simplex(1, 2), sphere(1, 2)),
        coproduct(simplex(2, 2), boundary(2, 2)),
        empty(2),
    ],
    ids=lambda X: X.name,
)
def test_simplicial_identities(X):
    assert X.identity_failures() == []
    assert X.validate().ok


def test_identity_checker_catches_a_broken_face():
    X = simplex(1, 1)
    faces = [f.copy() for f in X.faces]
    faces[1][0, 2] = 0  # d0 of the edge 01 now lands on 0
    Y = TruncatedSimplicialObject(1, X.sizes, faces, X.degens, X.labels, "broken")
    assert Y.identity_failures()


def test_shape_mismatch_rejected():
    X = simplex(1, 1)
    with pytest.raises(ValueError):
        TruncatedSimplicialObject(2, X.sizes, X.faces, X.degens)


def test_from_cells_rejects_wrong_face_count():
    with pytest.raises(ValueError):
        from_cells([("v", 0, None), ("e", 1, ["v"])], 1)


def test_build_dispatch_and_errors():
    assert build("sphere", 2, 3).sizes == sphere(2, 3).sizes
    with pytest.raises(ValueError):
        build("torus", 1, 2)
    with pytest.raises(ValueError):
        build("simplex", -1, 2)


def test_parse_sset_precedence():
    X = parse_sset("simplex(1) x simplex(1) + constant(2)", 2)
    assert X.sizes == tuple(a * a + 2 for a in simplex(1, 2).sizes)
    with pytest.raises(ValueError):
        parse_sset("cube(2)", 2)


# --- maps -----------------------------------------------------------------


def test_points_of_x_are_vertices():
    for X in (simplex(2, 2), sphere(2, 2), constant(3, 2)):
        assert len(hom_set(simplex(0, 2), X)) == X.sizes[0]


def test_points_of_the_arrow():
    assert len(hom_set(simplex(0, 1), simplex(1, 1))) == 2


def test_maps_from_arrow_to_two_sphere():
    # DERIVED: every 1-simplex of S^2 is degenerate, so only the constant map
    maps = hom_set(simplex(1, 3), sphere(2, 3))
    assert len(maps) == 1 and is_constant_map(maps[0], sphere(2, 3))


@pytest.mark.parametrize(
    "X,Y",
    [
        (simplex(1, 1), simplex(1, 1)),
        (boundary(1, 1), simplex(1, 1)),
        (simplex(1, 1), sphere(1, 1)),
        (sphere(1, 1), coproduct(sphere(1, 1), simplex(0, 1))),
        (simplex(0, 2), simplex(1, 2)),
    ],
)
def test_hom_count_matches_brute_force(X, Y):
    assert len(hom_set(X, Y)) == brute_hom_count(X, Y)


def test_hom_limit():
    assert len(hom_set(simplex(1, 2), simplex(2, 2), limit=2)) == 2


def test_isomorphism():
    assert is_isomorphic(sphere(0, 2), boundary(1, 2))
    assert is_isomorphic(coproduct(simplex(0, 2), simplex(0, 2)), constant(2, 2))
    assert not is_isomorphic(simplex(1, 2), boundary(1, 2))


def test_subobjects_of_the_arrow():
    subs = simplex(1, 1).subobjects()
    assert len(subs) == 5  # empty, {0}, {1}, {0,1}, everything


# --- external discreteness ---------------------------------------------------


@pytest.mark.parametrize(
    "X,expected",
    [
        (constant(3, 3), True),
        (simplex(1, 3), False),
        (sphere(2, 3), False),
        (sphere(2, 2), False),
        (sphere(3, 2), True),  # invisible below the truncation
        (sphere(0, 3), True),
        (empty(2), True),
        (product(simplex(1, 2), simplex(1, 2)), False),
    ],
    ids=str,
)
def test_externally_discrete(X, expected):
    assert is_externally_discrete(X) is expected


def test_suitable_propositions():
    for d in (1, 2, 3):
        assert suitable_propositions(d).ok


FAMILY_TABLE = {
    "spheres": lambda n: ("sphere", n),
    "half-spheres": lambda n: ("sphere", n // 2 + 1),
    "interval": lambda n: ("simplex", 1),
    "points": lambda n: ("constant", 1),
    "discrete-pairs": lambda n: ("constant", n),
    "even-discrete": lambda n: ("sphere", n % 2),
    "late-spheres": lambda n: ("sphere", n + 3),
    "bounded-spheres": lambda n: ("sphere", 2),
    "zero-spheres": lambda n: ("sphere", 0),
    "simplices": lambda n: ("simplex", n),
    "vertices": lambda n: ("simplex", 0),
    "mixed-period": lambda n: ("sphere", (0, 0, 5)[n % 3]),
}


@pytest.mark.parametrize("name", sorted(FAMILY_TABLE))
def test_family_values_follow_the_tail(name):
    F = builtin_family(name)
    assert all(F.value(n) == FAMILY_TABLE[name](n) for n in range(10, 40))


@pytest.mark.parametrize("name", sorted(FAMILY_TABLE))
def test_frechet_discreteness_matches_window_oracle(name):
    assert frechet_externally_discrete(builtin_family(name)) == direct_frechet_discrete(FAMILY_TABLE[name])


def test_family_needs_constructor():
    with pytest.raises(ValueError):
        SymbolicFamily(parse_seq("seq tail=identity except {}"))


def test_family_roundtrip():
    for text in BUILTIN_FAMILIES.values():
        F = SymbolicFamily.parse(text)
        assert SymbolicFamily.parse(F.encode()) == F


# --- d_n ------------------------------------------------------------------

HALF_WINDOW_DN = [n // 2 for n in range(51)]  # DERIVED: oracle dn_direct on S^(n//2 + 1)


def test_dn_half_spheres_window_50():
    res = dn_sequence(builtin_family("half-spheres"), 50)
    assert res.values == HALF_WINDOW_DN
    assert [dn_direct("sphere", n // 2 + 1, n) for n in range(51)] == HALF_WINDOW_DN
    assert res.window_diverges and res.symbolic_diverges
    assert res.report.ok


def test_dn_interval_is_zero_and_bounded():
    res = dn_sequence(builtin_family("interval"), 50)
    assert res.values == [0] * 51
    assert not res.window_diverges and not res.symbolic_diverges
    skipped = [c for c in res.report.checks if c.status == "skipped"]
    assert skipped and "51 indices" in skipped[0].detail


def test_dn_constant_discrete():
    res = dn_sequence(builtin_family("points"), 30)
    assert res.values == list(range(31)) and res.report.ok


def test_dn_expectation_flag():
    res = dn_sequence(builtin_family("interval"), 20, expect=False)
    assert res.report.ok


def test_dn_even_discrete_not_fooled_by_last_index():
    res = dn_sequence(builtin_family("even-discrete"), 12)
    assert not res.window_diverges


@pytest.mark.parametrize("name", sorted(FAMILY_TABLE))
def test_symbolic_divergence_matches_window(name):
    res = dn_sequence(builtin_family(name), 24, factor_check=False)
    assert res.window_diverges == family_diverges(builtin_family(name))


def test_two_point_family_factorization_fails_at_one():
    # S^0 is two points, so maps S^0 -> two points need not be constant
    res = dn_sequence(SymbolicFamily.parse("family tail=constant(const(2)) except {}"), 6)
    bad = [c for c in res.report.checks if c.status == "fail"]
    assert bad and bad[0].witnesses[0]["n"] == 1


# --- unique arrow -----------------------------------------------------------


@pytest.mark.parametrize("ctx", builtin_contexts(), ids=lambda c: c.name)
def test_arrow_over_each_subterminal_passes(ctx):
    for U in ctx.subterminals():
        assert passes_all(unique_arrow_check(ctx, U, ctx.times(simplex(1, ctx.d), U)))


@pytest.mark.parametrize("ctx", builtin_contexts(), ids=lambda c: c.name)
def test_points_of_arrow_over_u(ctx):
    for U in ctx.subterminals():
        A = ctx.times(simplex(1, ctx.d), U)
        n = int(np.prod([len(hom_set(simplex(0, ctx.d), X)) for X, u in zip(A, U) if u] or [0]))
        assert n == (2 ** sum(U) if any(U) else 0)


def _status(rep, prefix):
    return next(c.status for c in rep.checks if c.name.startswith(prefix))


def test_two_points_fail_condition_four():
    ctx = builtin_contexts()[0]
    A = (coproduct(simplex(0, 2), simplex(0, 2)),)
    rep = unique_arrow_check(ctx, (1,), A)
    assert _status(rep, "(4)") == "fail"
    assert all(_status(rep, f"({k})") == "pass" for k in (1, 2, 3, 5, 6))


def test_triangle_fails_three():
    ctx = builtin_contexts()[1]
    rep = unique_arrow_check(ctx, (1, 1), ctx.times(simplex(2, 2), (1, 1)))
    assert _status(rep, "(3)") == "fail"


def test_wrong_support_fails_two():
    ctx = builtin_contexts()[1]
    rep = unique_arrow_check(ctx, (1, 0), ctx.times(simplex(1, 2), (1, 1)))
    assert _status(rep, "(2)") == "fail"


def test_boundary_of_triangle_fails_subobject_conditions():
    ctx = builtin_contexts()[0]
    X = from_cells([("a", 0, None), ("b", 0, None), ("e", 1, ["b", "a"]), ("f", 1, ["b", "a"])], 2)
    rep = unique_arrow_check(ctx, (1,), X)
    assert _status(rep, "(5)") == "fail" and _status(rep, "(6)") == "fail"


@pytest.mark.parametrize("ctx", builtin_contexts(), ids=lambda c: c.name)
def test_search_finds_only_the_arrow(ctx):
    for U in ctx.subterminals():
        res = unique_arrow_search(ctx, U, max_cells=6)
        assert res.all_isomorphic_to_arrow
        assert len(res.survivors) == 1


DISC_SAMPLE = [
    "empty", "point", "constant(2)", "constant(3)", "simplex(1)", "boundary(2)", "sphere(0)",
    "sphere(1)", "simplex(1) + point", "constant(2) x constant(2)", "sphere(0) + sphere(0)",
]


def test_discrete_objects_are_sets():
    # discrete part of truncated sSet is equivalent to FinSet on the built-in sample
    d = 2
    objs = [parse_sset(t, d) for t in DISC_SAMPLE]
    disc = [X for X in objs if is_externally_discrete(X)]
    assert {X.name for X in disc} >= {"empty", "point", "constant(2)", "constant(3)", "sphere(0)"}
    for X in disc:
        assert is_isomorphic(X, constant(X.sizes[0], d)), X.name
    for X in disc:
        for Y in disc:
            assert len(hom_set(X, Y)) == Y.sizes[0] ** X.sizes[0], (X.name, Y.name)
