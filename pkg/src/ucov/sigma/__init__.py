"""Exact covering numbers: group models, maximal subgroups, cover instances, LP and search."""

from .instance import CoverInstance, covers_group, expand_cover, from_sets, reduce_instance
from .lemmas import GroupSigma, PerfectReport, QuotientReport, perfect_transfer_check, quotient_sigma_check, sigma_of_group
from .lp import LPBound, lp_lower_bound, packing_simplex
from .models import FiniteGroupModel, quotient, small_group, su3_model, u3_model
from .solver import INFINITY, SigmaResult, enumerate_optimal_covers, exact_sigma
from .subgroups import MaxSubgroupList, SubgroupClass, all_subgroups_brute, harvest_maximals_u3
from .u3 import sigma_u3

__all__ = [
    "CoverInstance", "FiniteGroupModel", "GroupSigma", "INFINITY", "LPBound", "MaxSubgroupList",
    "PerfectReport", "QuotientReport", "SigmaResult", "SubgroupClass", "all_subgroups_brute",
    "covers_group", "enumerate_optimal_covers", "exact_sigma", "expand_cover", "from_sets",
    "harvest_maximals_u3", "lp_lower_bound", "packing_simplex", "perfect_transfer_check",
    "quotient", "quotient_sigma_check", "reduce_instance", "sigma_of_group", "sigma_u3",
    "small_group", "su3_model", "u3_model",
]
