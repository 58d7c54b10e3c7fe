"""Acceptance criteria, one test each; a summary line per criterion is printed at the end of the run."""

import json
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from hwcolim import intmat as im
from hwcolim.chain import ChainComplex, ChainMap, homology, tensor, validate_complex
from hwcolim.colim import (WeightCell, bar_compare, bar_construction, bar_resolution, bk_hocolim,
                           cofibrant_replacement, composition_law_check, reedy_report, resolution_truncation,
                           weighted_colimit, yoneda_check)
from hwcolim.corpus import (bar_instances, elementary_complex, expected_homology, random_complex,
                            random_graded_diagram, random_host, random_index_category, random_one_cube_pair,
                            random_pieces, rng_from, scaled_unit_bar, scramble)
from hwcolim.dwyerkan import DgFunctor, derived_counit_check, h0_retract_witness, is_homotopically_ff
from hwcolim.enriched import (FiniteCategory, PresheafMap, constant_presheaf, diagram_from_functor,
                              flatness_report, free_dg_category, full_subcategory_of_ch, representable,
                              shift_presheaf, validate_dg_category, validate_presheaf_map)
from hwcolim.simplicial import collapse_check, dold_kan_gamma, dold_kan_normalize

from oracles import kunneth

ROOT = Path(__file__).resolve().parent.parent
RESULTS = {}
Z, Z1, O = ChainComplex.sphere(0), ChainComplex.sphere(1), ChainComplex.zero()


@contextmanager
def criterion(n, title):
    info = {"detail": ""}
    t0 = time.perf_counter()
    try:
        yield info
    except BaseException:
        RESULTS[n] = ("FAIL", title, info["detail"], time.perf_counter() - t0)
        raise
    RESULTS[n] = ("PASS", title, info["detail"], time.perf_counter() - t0)


def groups(H):
    return {n: H[n] for n in H.degrees()}


def test_01_chain_core():
    with criterion(1, "chain core: d^2 validation and homology vs Kunneth") as info:
        bad = ChainComplex({0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]})
        assert not validate_complex(bad)
        rng = rng_from(101)
        pairs = 0
        for _ in range(120):
            pa, pb = random_pieces(rng, -1, 4, 3), random_pieces(rng, 0, 4, 3)
            A, B = scramble(elementary_complex(pa), rng), scramble(elementary_complex(pb), rng)
            assert validate_complex(A) and validate_complex(B)
            assert groups(homology(A)) == expected_homology(pa)
            assert groups(homology(B)) == expected_homology(pb)
            assert groups(homology(tensor(A, B))) == kunneth(homology(A), homology(B))
            pairs += 1
        info["detail"] = "%d pairs" % pairs


def test_02_yoneda():
    with criterion(2, "Yoneda isomorphism on generated hosts") as info:
        rng = rng_from(202)
        hosts = checks = 0
        while hosts < 24:
            C = random_host(rng)
            assert validate_dg_category(C)
            homs = [C.hom(a, b) for a in C.objects for b in C.objects]
            assert len(C.objects) <= 3
            assert all(-1 <= n <= 1 for H in homs for n in H.degrees() if H.rank(n))
            assert all(H.rank(n) <= 2 for H in homs for n in H.degrees())
            from hwcolim.corpus import random_diagram
            D = random_diagram(rng, C)
            for c in C.objects:
                assert yoneda_check(D, c)
                checks += 1
            hosts += 1
        info["detail"] = "%d hosts, %d objects" % (hosts, checks)


def test_03_bar_quasi_iso_for_cell_weights():
    with criterion(3, "bar construction of cell weights is a quasi-iso (sound windows)") as info:
        insts, skipped = bar_instances(rng_from(303), 55)
        for C, W, D, win, N in insts:
            assert flatness_report(C)["locally_star_flat"]
            r = bar_compare(W, D, win, N=N)
            assert r.certificate.sound
            assert r.quasi_iso, r.verdict.message
        info["detail"] = "%d instances, skipped %s" % (len(insts), skipped)


def test_04_mayer_vietoris():
    with criterion(4, "non-cofibrant contrast on the span") as info:
        C = free_dg_category(FiniteCategory.span())
        W = constant_presheaf(C)
        D = diagram_from_functor(C, {"a": Z, "b": O, "c": O}, {})
        # Mayer-Vietoris: 0 -> H_1(pushout) -> H_0(a) -> H_0(b) + H_0(c) = 0, so H_1 = Z, rest 0
        assert homology(weighted_colimit(W, D).complex).is_zero()
        r = bar_compare(W, D, (0, 3))
        assert r.certificate.sound
        assert groups(r.bar_homology) == {1: (1, ())}
        assert not r.quasi_iso
        info["detail"] = "colimit 0, bar H_1 = Z"


def test_05_conical_vs_weighted():
    with criterion(5, "Bousfield-Kan agrees with the bar under a replaced constant weight") as info:
        rng = rng_from(505)
        count = 0
        while count < 22:
            C = free_dg_category(random_index_category(rng))
            D = random_graded_diagram(rng, C)
            win = (0, 3)
            hc = bk_hocolim(D, win)
            assert hc.certificate.sound
            rep = cofibrant_replacement(constant_presheaf(C), win)
            assert all(rep.verdicts.values())
            r = bar_compare(rep.weight, D, win)
            assert r.certificate.sound and r.quasi_iso
            assert homology(hc.complex, win) == r.bar_homology == r.colimit_homology
            count += 1
        info["detail"] = "%d index categories" % count


def test_06_collapse_of_bar_resolutions():
    with criterion(6, "collapse of bar resolutions with verified extra degeneracy") as info:
        insts, _ = bar_instances(rng_from(606), 30)
        done = 0
        for C, W, D, win, N in insts:
            for c in C.objects:
                M = resolution_truncation(W, c, win)
                assert M is not None
                X = bar_resolution(W, c, M)
                v = collapse_check(X, win)
                assert v, v.message
                done += 1
        info["detail"] = "%d resolutions" % done


def test_07_cubes_and_reedy():
    with criterion(7, "pushout-corner composition law and Reedy cofibrancy") as info:
        rng = rng_from(707)
        for _ in range(60):
            f, g = random_one_cube_pair(rng)
            v = composition_law_check(f, g)
            assert v, v.message
        insts, _ = bar_instances(rng_from(708), 20, size_cap=400)
        for C, W, D, win, N in insts:
            assert all(reedy_report(bar_construction(W, D, min(N, 3))))
        bad = reedy_report(scaled_unit_bar(2))
        assert not bad[1] and "torsion [2]" in bad[1].message
        info["detail"] = "60 cube pairs, %d bars, unit x2 flagged at level 1" % len(insts)


def test_08_connectivity():
    with criterion(8, "non-negative diagrams have no negative homotopy colimit homology") as info:
        rng = rng_from(808)
        for k in range(55):
            C = free_dg_category(random_index_category(rng))
            D = random_graded_diagram(rng, C)
            hc = bk_hocolim(D, (-3, 2))
            assert hc.certificate.sound
            H = homology(hc.complex, (-3, 2))
            assert all(H[n] == (0, ()) for n in range(-3, 0))
        # the Z[-1]-weighted colimit of Z lands in degree -1
        P = free_dg_category(FiniteCategory.discrete(["*"]))
        W = WeightCell(P).attach("*", -1)
        Dz = diagram_from_functor(P, {"*": Z}, {})
        r = bar_compare(W, Dz, (-2, 1))
        assert r.certificate.sound and r.quasi_iso
        assert groups(r.bar_homology) == {-1: (1, ())}
        info["detail"] = "55 diagrams; desuspension gives H_-1 = Z"


def _incl(objs):
    C = full_subcategory_of_ch(objs)
    return DgFunctor.inclusion(full_subcategory_of_ch({"Z": Z}), C)


def test_09_dwyer_kan_suite():
    with criterion(9, "Quillen-equivalence criteria suite") as info:
        # (a)
        F = _incl({"Z": Z, "ZZ": ChainComplex.sphere(0, 2)})
        assert all(is_homotopically_ff(F).values())
        assert all(h0_retract_witness(F, c).status == "found" for c in F.target.objects)
        for c in F.target.objects:
            v = derived_counit_check(F, c, (0, 1))
            assert v and v.data["mode"] == "sound"
        # (b)
        G = _incl({"Z": Z, "Z1": Z1})
        C = G.target
        A, B = representable(C, "Z1"), shift_presheaf(representable(C, "Z"), 1)
        alpha = PresheafMap(A, B, {c: ChainMap(A.value(c), B.value(c),
                                               {n: im.eye(A.value(c).rank(n)) for n in A.value(c).degrees()})
                                   for c in C.objects})
        assert validate_presheaf_map(alpha) and alpha.is_isomorphism()
        assert h0_retract_witness(G, "Z1").status == "nonexistent"
        modes = []
        for c in C.objects:
            v = derived_counit_check(G, c, (0, 1), trust_tail_bound=False)
            assert v
            modes.append(v.data["mode"])
        assert modes == ["heuristic-stable", "heuristic-stable"]
        # (c)
        Ar = free_dg_category(FiniteCategory.arrow())
        homs = {(x, y): ChainMap.identity(Ar.hom(x, y)) for x in Ar.objects for y in Ar.objects}
        homs[(0, 1)] = ChainMap(Ar.hom(0, 1), Ar.hom(0, 1), {0: [[2]]})
        H = DgFunctor(Ar, Ar, {0: 0, 1: 1}, homs)
        hff = is_homotopically_ff(H)
        assert [k for k, v in hff.items() if not v] == [(0, 1)]
        assert "Z/2" in hff[(0, 1)].message
        v = derived_counit_check(H, 1, (0, 1))
        assert not v and v.where == 0
        info["detail"] = "(b) counit modes %s; (c) fails at hom(0,1)" % modes


def test_10_dold_kan():
    with criterion(10, "Dold-Kan round trip") as info:
        rng = rng_from(1010)
        for _ in range(60):
            C = random_complex(rng, 0, 4, 3)
            assert dold_kan_normalize(dold_kan_gamma(C, 3)) == C
        info["detail"] = "60 complexes in degrees 0..3"


def test_11_determinism():
    with criterion(11, "shipped scenarios give byte-identical structured reports") as info:
        paths = sorted((ROOT / "scenarios").glob("*.json"))
        assert paths
        for p in paths:
            outs = [subprocess.run([sys.executable, "-m", "hwcolim", "run", str(p), "--format", "structured"],
                                   capture_output=True).stdout for _ in range(2)]
            assert outs[0] == outs[1] and outs[0]
            json.loads(outs[0])
        info["detail"] = "%d scenarios" % len(paths)
