"""A weighted colimit that no ordinary homotopy colimit reaches.

Homotopy colimits of diagrams concentrated in degrees >= 0 stay in degrees
>= 0. Weighting by Z[-1] moves Z down to degree -1.
"""

from hwcolim import ChainComplex, FiniteCategory, WeightCell, bar_compare, bk_hocolim, free_dg_category, homology
from hwcolim.corpus import random_graded_diagram, random_index_category, rng_from

rng = rng_from(0)
worst = 0
for _ in range(30):
    C = free_dg_category(random_index_category(rng))
    D = random_graded_diagram(rng, C)
    H = homology(bk_hocolim(D, (-3, 3)).complex, (-3, 3))
    worst = min([worst] + H.degrees())
print("lowest degree with homology over 30 random conical homotopy colimits:", worst)

P = free_dg_category(FiniteCategory.discrete(["*"]))
W = WeightCell(P).attach("*", -1)
from hwcolim.enriched import diagram_from_functor
D = diagram_from_functor(P, {"*": ChainComplex.sphere(0)}, {})
r = bar_compare(W, D, (-2, 1))
print("weight Z[-1] applied to Z:", r.bar_homology, "quasi-iso to strict colimit:", r.quasi_iso)
