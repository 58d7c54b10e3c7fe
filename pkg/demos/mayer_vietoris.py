"""Why the weight must be cofibrant.

Over the span b <- a -> c take the constant weight Z and the diagram that is Z
at the apex and zero elsewhere. The strict weighted colimit is a pushout of
0 <- Z -> 0 and so vanishes. The bar construction instead computes the
homotopy pushout, which is the suspension of Z.
"""

from hwcolim import (ChainComplex, FiniteCategory, bar_compare, constant_presheaf, free_dg_category,
                     homology, weighted_colimit)
from hwcolim.enriched import diagram_from_functor

C = free_dg_category(FiniteCategory.span())
W = constant_presheaf(C)
D = diagram_from_functor(C, {"a": ChainComplex.sphere(0), "b": ChainComplex.zero(), "c": ChainComplex.zero()}, {})

print("strict colimit:", homology(weighted_colimit(W, D).complex))
r = bar_compare(W, D, (0, 3))
print("bar realization:", r.bar_homology, "(truncation %s at N=%d)" % (r.certificate.mode, r.N))
print("level ranks:", r.rank_table)
print("quasi-isomorphic?", r.quasi_iso, "-", r.verdict.message)
