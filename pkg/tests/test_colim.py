import pytest
from hypothesis import given, settings, strategies as st

from hwcolim import intmat as im
from hwcolim.chain import ChainComplex, ChainMap, UnsoundWindow, homology, is_cofibration, shift
from hwcolim.colim import (WeightCell, bar_compare, bar_construction, bar_resolution, bk_hocolim,
                           bk_terminal_map, cofibrant_replacement, composition_law_check, observation_check,
                           pushout_corner_map, reedy_report, replay_matches, weighted_colimit, yoneda_check,
                           CubicalDiagram, cube_tensor)
from hwcolim.corpus import (bar_instances, random_diagram, random_host, random_one_cube_pair, random_poset,
                            random_weight_cell, rng_from, scaled_unit_bar, random_functor_diagram)
from hwcolim.enriched import (FiniteCategory, constant_presheaf, corepresentable, diagram_from_functor,
                              free_dg_category, full_subcategory_of_ch, representable, validate_presheaf)
from hwcolim.simplicial import check_extra_degeneracy, collapse_check, normalize, validate_simplicial, window_quasi_iso

seeds = st.integers(0, 2 ** 32 - 1)
Z, Z1, O = ChainComplex.sphere(0), ChainComplex.sphere(1), ChainComplex.zero()


def groups(H):
    return {n: H[n] for n in H.degrees()}


def span_point():
    C = free_dg_category(FiniteCategory.span())
    return C, constant_presheaf(C), diagram_from_functor(C, {"a": Z, "b": O, "c": O}, {})


# weighted colimits ------------------------------------------------------------

def test_one_object_colimit_is_tensor():
    # identity actions: the coequalizer is just W(*) ⊗ D(*)
    C = free_dg_category(FiniteCategory.discrete(["*"]))
    X = ChainComplex({0: 1, 1: 1}, {1: [[3]]})
    W = WeightCell(C).attach("*", 0).attach("*", 1)
    D = diagram_from_functor(C, {"*": X}, {})
    col = weighted_colimit(W, D)
    from hwcolim.chain import tensor
    assert col.complex == tensor(W.value("*"), X)
    assert groups(homology(col.complex)) == {0: (0, (3,)), 1: (0, (3,))}


def test_desuspension_weight():
    # one object with hom Z: weighting by Z[-1] shifts the diagram down
    C = free_dg_category(FiniteCategory.discrete(["*"]))
    W = WeightCell(C).attach("*", -1)
    X = ChainComplex({0: 1, 1: 1}, {1: [[2]]})
    D = diagram_from_functor(C, {"*": X}, {})
    col = weighted_colimit(W, D)
    assert col.complex == shift(X, -1)
    assert groups(homology(col.complex)) == {-1: (0, (2,))}


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_yoneda(seed):
    rng = rng_from(seed)
    C = random_host(rng)
    D = random_diagram(rng, C)
    for c in C.objects:
        assert yoneda_check(D, c)


# bar construction -------------------------------------------------------------

def test_one_object_unit_bar_normalizes_to_level_zero():
    C = free_dg_category(FiniteCategory.discrete(["*"]))
    X = bar_construction(representable(C, "*"), corepresentable(C, "*"), 3)
    qs = normalize(X)
    assert qs[0].complex.rank(0) == 1
    assert all(q.complex.is_zero() for q in qs[1:])


def test_mayer_vietoris_contrast():
    C, W, D = span_point()
    assert homology(weighted_colimit(W, D).complex).is_zero()
    r = bar_compare(W, D, (0, 2))
    assert r.certificate.sound
    assert groups(r.bar_homology) == {1: (1, ())}
    assert not r.quasi_iso and r.verdict.where == 1


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_bar_identities_and_observation(seed):
    insts, _ = bar_instances(rng_from(seed), 1, size_cap=300)
    C, W, D, win, N = insts[0]
    X = bar_construction(W, D, min(N, 2))
    assert validate_simplicial(X)
    assert observation_check(X)
    assert all(reedy_report(X))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_cell_weight_bar_is_quasi_iso(seed):
    insts, _ = bar_instances(rng_from(seed), 1)
    C, W, D, win, N = insts[0]
    assert replay_matches(W)
    r = bar_compare(W, D, win, N=N)
    assert r.certificate.sound and r.quasi_iso, r.verdict.message


def test_representable_weight_is_quasi_iso():
    C = full_subcategory_of_ch({"a": Z, "b": Z1})
    r = bar_compare(representable(C, "b"), corepresentable(C, "a"), (0, 1))
    assert r.certificate.sound and r.quasi_iso


def test_narrow_truncation_is_rejected():
    C = full_subcategory_of_ch({"a": Z, "b": Z1})
    with pytest.raises(UnsoundWindow):
        bar_compare(representable(C, "b"), corepresentable(C, "a"), (0, 4), N=1)


# resolutions ------------------------------------------------------------------

@settings(max_examples=12, deadline=None)
@given(seeds)
def test_bar_resolution_collapses(seed):
    rng = rng_from(seed)
    C = free_dg_category(random_poset(rng))
    W = random_weight_cell(rng, C)
    for c in C.objects:
        X = bar_resolution(W, c, 3)
        assert validate_simplicial(X)
        assert check_extra_degeneracy(X)
        assert collapse_check(X, (0, 1))


def test_cofibrant_replacement_of_constant_weight():
    C, W, D = span_point()
    rep = cofibrant_replacement(W, (0, 2))
    assert validate_presheaf(rep.weight)
    assert all(rep.verdicts.values())
    assert groups(homology(weighted_colimit(rep.weight, D).complex, (0, 2))) == {1: (1, ())}


# Bousfield-Kan -----------------------------------------------------------------

def test_bk_span():
    C, W, D = span_point()
    hc = bk_hocolim(D, (0, 2))
    assert hc.certificate.sound
    assert groups(homology(hc.complex, (0, 2))) == {1: (1, ())}


def test_bk_terminal_object_collapse():
    I = FiniteCategory.poset([0, 1, 2], [(0, 1), (1, 2)])
    C = free_dg_category(I)
    D = random_functor_diagram(rng_from(3), C)
    hc = bk_hocolim(D, (0, 2))
    assert window_quasi_iso(bk_terminal_map(D, 2, hc), (0, 2))


def test_bk_desuspension_is_visible():
    I = FiniteCategory.arrow()
    C = free_dg_category(I)
    D = diagram_from_functor(C, {0: ChainComplex.sphere(-1), 1: ChainComplex.sphere(-1)}, {"0<1": {-1: [[1]]}})
    hc = bk_hocolim(D, (-1, 1))
    assert groups(homology(hc.complex, (-1, 1))) == {-1: (1, ())}


# cubes ------------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seeds)
def test_composition_law(seed):
    f, g = random_one_cube_pair(rng_from(seed))
    v = composition_law_check(f, g)
    assert v, v.message


def test_corner_map_examples():
    f = ChainMap(O, Z, {})
    g = ChainMap(Z, Z, {0: [[2]]})
    X = cube_tensor(CubicalDiagram.arrow(f, "s"), CubicalDiagram.arrow(g, "t"))
    assert not is_cofibration(pushout_corner_map(X).map)
    h = ChainMap(Z, ChainComplex({0: 1, 1: 1}, {1: [[3]]}), {0: [[1]]})
    Y = cube_tensor(CubicalDiagram.arrow(f, "s"), CubicalDiagram.arrow(h, "t"))
    assert is_cofibration(pushout_corner_map(Y).map)


def test_reedy_flags_scaled_unit():
    rep = reedy_report(scaled_unit_bar(2))
    assert rep[0] and not rep[1]
    assert rep[1].where == (1, ("a", "a"))
    assert "[2]" in rep[1].message


@settings(max_examples=12, deadline=None)
@given(seeds)
def test_additivity_in_the_weight(seed):
    from hwcolim.enriched import direct_sum_presheaf
    insts, _ = bar_instances(rng_from(seed), 2, size_cap=250)
    (C, W1, D, win, N), (_, _, _, win2, _) = insts
    W2 = random_weight_cell(rng_from(seed + 1), C)
    S = direct_sum_presheaf([W1, W2])
    a, b = weighted_colimit(W1, D).complex, weighted_colimit(W2, D).complex
    s = weighted_colimit(S, D).complex
    from hwcolim.chain import direct_sum
    assert homology(s) == homology(direct_sum([a, b]))
    assert all(s.rank(n) == a.rank(n) + b.rank(n) for n in set(a.degrees()) | set(b.degrees()) | set(s.degrees()))
    from hwcolim.colim import auto_truncation
    M = auto_truncation(S, D, win)
    if M is not None:
        r = bar_compare(S, D, win, N=M)
        assert r.quasi_iso and r.bar_homology == homology(direct_sum([a, b]), win)


@settings(max_examples=12, deadline=None)
@given(seeds)
def test_observation_on_generated_instances(seed):
    insts, _ = bar_instances(rng_from(seed), 1, size_cap=300)
    C, W, D, win, N = insts[0]
    assert observation_check(bar_construction(W, D, 1))


def test_empty_host_gives_zero():
    C = free_dg_category(FiniteCategory.discrete([]))
    from hwcolim.enriched import Presheaf, Diagram
    assert weighted_colimit(Presheaf(C, {}), Diagram(C, {})).complex.is_zero()
