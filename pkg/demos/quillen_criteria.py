"""Three inclusions into small dg-categories of complexes, and one that is not even fully faithful."""

from hwcolim import ChainComplex, DgFunctor, FiniteCategory, derived_counit_check, free_dg_category
from hwcolim import full_subcategory_of_ch, h0_retract_witness, is_homotopically_ff
from hwcolim.chain import ChainMap

Z = ChainComplex.sphere(0)
image = full_subcategory_of_ch({"Z": Z})


def report(name, F, heuristic=False):
    print("==", name)
    for pair, v in is_homotopically_ff(F).items():
        print("  hom%s: %s %s" % (pair, "ok" if v else "FAIL", v.message))
    for c in F.target.objects:
        w = h0_retract_witness(F, c)
        v = derived_counit_check(F, c, (0, 1), trust_tail_bound=not heuristic)
        print("  %s: retract %s, counit %s [%s] %s" % (c, w.status, bool(v), v.data["mode"], v.message))


report("Z and Z+Z", DgFunctor.inclusion(image, full_subcategory_of_ch({"Z": Z, "ZZ": ChainComplex.sphere(0, 2)})))
# Z[1] is no retract of a sum of copies of Z, yet the counit is still an equivalence
report("Z and Z[1]", DgFunctor.inclusion(image, full_subcategory_of_ch({"Z": Z, "Z1": ChainComplex.sphere(1)})),
       heuristic=True)

A = free_dg_category(FiniteCategory.arrow())
homs = {(x, y): ChainMap.identity(A.hom(x, y)) for x in A.objects for y in A.objects}
homs[(0, 1)] = ChainMap(A.hom(0, 1), A.hom(0, 1), {0: [[2]]})
report("doubling the arrow", DgFunctor(A, A, {0: 0, 1: 1}, homs))
