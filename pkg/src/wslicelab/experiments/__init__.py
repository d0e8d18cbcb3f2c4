"""Scenario runners: scaling tables, EX32 sweeps, obstruction measurements, alpha-sets."""
from .alphaset import (CombineMode, RecipeClass, alpha_set_probe, classify, combine_specs,
                       ex45_trajectories, format_set, in_set, predicted_set, recipe_classes)
from .example32 import iter_pairs, run_example32, sample_pairs, witness_growth
from .report import ExperimentReport, param_hash, provenance
from .scaling import CLOSED_FORMS, ScalingRow, closed_form_ratio, exact_L, log2_L, related_exponents, scaling_table
from .thm43 import (best_strip_dataset, exhaust_strips, midline_bound, midline_routes,
                    obstruction_measurements, obstruction_pair, thm43_obstruction,
                    toy_exhaustion, toy_ring_domain)

__all__ = [
    "CombineMode", "RecipeClass", "alpha_set_probe", "classify", "combine_specs",
    "ex45_trajectories", "format_set", "in_set", "predicted_set", "recipe_classes",
    "iter_pairs", "run_example32", "sample_pairs", "witness_growth", "ExperimentReport",
    "param_hash", "provenance", "CLOSED_FORMS", "ScalingRow", "closed_form_ratio", "exact_L", "log2_L", "related_exponents",
    "scaling_table", "best_strip_dataset", "exhaust_strips", "midline_bound", "midline_routes",
    "obstruction_measurements", "obstruction_pair", "thm43_obstruction", "toy_exhaustion",
    "toy_ring_domain",
]
