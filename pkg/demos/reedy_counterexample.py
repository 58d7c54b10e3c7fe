"""Latching maps of bar constructions.

For a genuine dg-category every latching map is a cofibration. Scaling the
unit by 2 breaks this at the first level where a repeated object appears.
"""

from hwcolim import ChainComplex, bar_construction, corepresentable, full_subcategory_of_ch, reedy_report, representable
from hwcolim.corpus import scaled_unit_bar

C = full_subcategory_of_ch({"a": ChainComplex.sphere(0), "b": ChainComplex.sphere(1)})
X = bar_construction(representable(C, "b"), corepresentable(C, "a"), 3)
print("genuine host:", [bool(v) for v in reedy_report(X)])
for v in reedy_report(scaled_unit_bar(2)):
    print("unit x2:", bool(v), v.message)
