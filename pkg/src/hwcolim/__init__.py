"""Exact weighted colimits, bar constructions and homotopy colimits of integer chain complexes."""

from .intmat import NonFreeCokernel, smith_normal_form
from .chain import (ChainComplex, ChainMap, GradedAbelianGroup, UnsoundWindow, Verdict, homology,
                    is_quasi_iso, mapping_cone, tensor, validate_complex, validate_map)
from .enriched import (DgCategory, FiniteCategory, Presheaf, Diagram, constant_presheaf, corepresentable,
                       free_dg_category, full_subcategory_of_ch, nerve, representable, validate_dg_category,
                       validate_presheaf)
from .simplicial import (SimplicialObject, TruncationCertificate, collapse_check, dold_kan_gamma,
                         dold_kan_normalize, normalize, realize)
from .colim import (WeightCell, bar_compare, bar_construction, bar_resolution, bk_hocolim,
                    cofibrant_replacement, composition_law_check, pushout_corner_map, reedy_report,
                    weighted_colimit)
from .dwyerkan import (DgFunctor, derived_counit_check, h0_retract_witness, is_homotopically_ff, left_kan,
                       restrict)

__version__ = "0.1.0"
