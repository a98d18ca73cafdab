"""Exact computations with algebraic families of A-infinity bimodules over the Novikov field."""

from .novikov import NovikovScalar, GaussianRational, parse_novikov
from .torus_ring import LaurentElement, TorusPoint, parse_laurent, parse_point, exp_poly_zeros
from .ainf_core import AInfCategory, check_ainf_relations, check_units
from .ainf_modules import ModuleLike, ModuleMorphism, diagonal, left_yoneda, right_yoneda
from .bar_convolution import Convolution, collapse_diagonal, collapse_yoneda_hom, stable_cone_ranks
from .family_engine import (build_local_system_family, build_decorated_yoneda_family, restrict_family,
                            action_map, grouplike_check)
from .sheaf_analysis import floer_sheaf, rank_at_point, rank_stratification, real_line_exceptional_set
from .affinoid_domains import (Polytope, sup_norm_over_polytope, shrink_polytope_invertibility,
                               semicontinuity_shrink)
from .fixtures import build_fixture

__version__ = "0.1.0"
