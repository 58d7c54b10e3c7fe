import numpy as np
from hypothesis import given, settings, strategies as st

from hwcolim import intmat as im
from hwcolim.chain import ChainComplex, ChainMap, homology
from hwcolim.corpus import random_poset, random_quiver_category, rng_from, scaled_unit_host
from hwcolim.enriched import (DgCategory, FiniteCategory, PresheafMap, constant_presheaf, corepresentable,
                              diagram_from_functor, direct_sum_presheaf, flatness_report, free_dg_category,
                              full_subcategory_of_ch, nerve, representable, shift_presheaf, under_category,
                              validate_category, validate_dg_category, validate_presheaf,
                              validate_presheaf_map, validate_simplicial_set, zk_chains, SimplicialSet)

from oracles import nerve_counts_by_chains

Z, Z1 = ChainComplex.sphere(0), ChainComplex.sphere(1)
seeds = st.integers(0, 2 ** 32 - 1)


def point_homology(H):
    return {n: H[n] for n in H.degrees()} == {0: (1, ())}


def test_one_object_category():
    C = full_subcategory_of_ch({"z": Z})
    assert validate_dg_category(C)
    assert C.hom("z", "z") == Z
    W = representable(C, "z")
    assert validate_presheaf(W) and W.value("z") == Z


def test_z_and_shift_host_homs():
    C = full_subcategory_of_ch({"Z": Z, "Z1": Z1})
    assert validate_dg_category(C)
    # hom(X, Y)_n = maps raising degree by n
    assert C.hom("Z", "Z1") == ChainComplex.sphere(1)
    assert C.hom("Z1", "Z") == ChainComplex.sphere(-1)
    assert C.hom("Z1", "Z1") == Z
    rep = representable(C, "Z1")
    assert rep.value("Z1") == Z and rep.value("Z") == ChainComplex.sphere(1)
    f = flatness_report(C)
    assert f["locally_flat"] and f["locally_star_flat"]


def test_associativity_violation_is_named():
    I = FiniteCategory.poset([0, 1, 2], [(0, 1), (1, 2)])
    C = free_dg_category(I)
    vals = {x: Z for x in I.objects}
    good = diagram_from_functor(C, vals, {"0<1": {0: [[2]]}, "1<2": {0: [[3]]}, "0<2": {0: [[6]]}})
    bad = diagram_from_functor(C, vals, {"0<1": {0: [[2]]}, "1<2": {0: [[3]]}, "0<2": {0: [[5]]}})
    assert validate_presheaf(good)
    v = validate_presheaf(bad)
    assert not v and v.where == ("assoc", 0, 1, 2)


def test_broken_category_table_is_named():
    I = FiniteCategory(["a", "b"], {"f": ("a", "b"), "g": ("b", "a")}, {("g", "f"): "id_a"})
    v = validate_category(I)
    assert not v and v.where == ("f", "g")


def test_free_dg_category_examples():
    D = free_dg_category(FiniteCategory.discrete(["x", "y"]))
    assert D.hom("x", "x") == Z and D.hom("x", "y").is_zero()
    A = free_dg_category(FiniteCategory.arrow())
    assert A.hom(0, 1) == Z and A.hom(1, 0).is_zero()
    rep = representable(A, 1)
    assert rep.value(0) == Z and rep.value(1) == Z
    P = free_dg_category(FiniteCategory.poset([0, 1, 2], [(0, 1), (1, 2)]))
    for a, b, c in [(0, 1, 2), (0, 0, 1), (1, 2, 2)]:
        assert np.array_equal(P.comp(a, b, c)[0], im.eye(1))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_free_linearization_matches_composition_table(seed):
    rng = rng_from(seed)
    I = random_quiver_category(rng) if seed % 2 else random_poset(rng)
    assert validate_category(I)
    C = free_dg_category(I)
    assert validate_dg_category(C)
    for a in I.objects:
        for b in I.objects:
            assert C.hom(a, b).rank(0) == len(I.hom(a, b))
    for a in I.objects:
        for b in I.objects:
            for c in I.objects:
                M = C.comp(a, b, c)[0]
                if M.size:
                    assert set(np.unique(M.astype(int)).tolist()) <= {0, 1}
                    assert all(int(x) == 1 for x in M.sum(axis=0))
    assert flatness_report(C)["locally_star_flat"]


def test_nerve_examples():
    assert nerve(FiniteCategory.arrow()).counts() == [2, 1]
    N = nerve(FiniteCategory.poset([0, 1, 2], [(0, 1), (1, 2)]))
    assert N.counts() == [3, 3, 1]
    assert validate_simplicial_set(N)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_nerve_counts_and_contractibility(seed):
    rng = rng_from(seed)
    I = random_poset(rng, 4)
    N = nerve(I)
    for n, c in enumerate(N.counts()):
        assert c == nerve_counts_by_chains(I, n)
    H = homology(zk_chains(N))
    if I.initial_objects() or I.terminal_objects():
        assert point_homology(H)
    for i in I.objects:
        U = under_category(i, I)
        assert validate_category(U)
        assert point_homology(homology(zk_chains(nerve(U))))


def test_simplex_chains():
    assert point_homology(homology(zk_chains(SimplicialSet.standard_simplex(1))))
    H = homology(zk_chains(SimplicialSet.boundary_simplex(2)))
    assert {n: H[n] for n in H.degrees()} == {0: (1, ()), 1: (1, ())}
    assert homology(zk_chains(SimplicialSet.empty())).is_zero()


def test_loops_need_a_cap():
    I = FiniteCategory.free_on_quiver(["a"], [])
    J = FiniteCategory(["a"], {"e": ("a", "a")}, {("e", "e"): "e"})
    assert validate_category(J)
    import pytest
    with pytest.raises(ValueError):
        nerve(J)
    assert nerve(J, cap=3).truncated


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_representables_satisfy_presheaf_axioms(seed):
    from hwcolim.corpus import random_host
    C = random_host(rng_from(seed))
    assert validate_dg_category(C)
    for c in C.objects:
        assert validate_presheaf(representable(C, c))
        assert validate_presheaf(corepresentable(C, c))


def test_constant_weight_and_sums():
    C = free_dg_category(FiniteCategory.span())
    W = constant_presheaf(C)
    assert validate_presheaf(W)
    S = direct_sum_presheaf([W, representable(C, "a")])
    assert validate_presheaf(S)
    assert S.value("a").rank(0) == 2


def test_scaled_unit_is_not_star_flat():
    C, _, _ = scaled_unit_host(2)
    assert not validate_dg_category(C)
    rep = flatness_report(C)
    assert not rep["locally_star_flat"]
    assert "2" in rep["objects"]["a"]["detail"]


def test_shift_presheaf_iso_for_suspended_representable():
    C = full_subcategory_of_ch({"Z": Z, "Z1": Z1})
    A = representable(C, "Z1")
    B = shift_presheaf(representable(C, "Z"), 1)
    assert validate_presheaf(B)
    comps = {c: ChainMap(A.value(c), B.value(c), {n: im.eye(A.value(c).rank(n)) for n in A.value(c).degrees()})
             for c in C.objects}
    alpha = PresheafMap(A, B, comps)
    assert validate_presheaf_map(alpha)
    assert alpha.is_isomorphism()
