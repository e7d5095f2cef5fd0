"""Matroid secretary lab: matroid oracles, density decompositions, online
selection policies under several arrival and information models, exact
secretary LPs, and an experiment harness.
"""
from .matroid import (ExplicitMatroid, GraphicMatroid, Matroid, PartitionMatroid, UniformMatroid,
                      WeightAssignment, greedy_opt, minor)
from .principal import densest_subset, density, is_uniformly_dense, principal_minors, soto_partition_matroid
from .classical import (AcceptanceSchedule, evaluate_policy_enumeration, evaluate_policy_exact,
                        harmonic_policy, one_over_e_policy)
from .lp import build_secretary_lp, policy_from_lp, solve_lp_exact
from .policies import make_policy, run_online
from .harness import ExperimentConfig, Report, run_experiment, run_sharded, worstcase_order_search
from .hardness import expected_max_exact, hard_instance, hardness_sweep

__version__ = "0.1.0"

__all__ = [
    "Matroid", "UniformMatroid", "PartitionMatroid", "GraphicMatroid", "ExplicitMatroid",
    "WeightAssignment", "greedy_opt", "minor",
    "density", "densest_subset", "is_uniformly_dense", "principal_minors", "soto_partition_matroid",
    "AcceptanceSchedule", "harmonic_policy", "one_over_e_policy",
    "evaluate_policy_exact", "evaluate_policy_enumeration",
    "build_secretary_lp", "solve_lp_exact", "policy_from_lp",
    "make_policy", "run_online",
    "ExperimentConfig", "Report", "run_experiment", "run_sharded", "worstcase_order_search",
    "hard_instance", "expected_max_exact", "hardness_sweep",
]
