"""Randomized max-min optimization over independence systems.

Two solver schemes for distributing probability mass over independent
sets so that the worst-case expected objective across adversarial
scenarios is maximized: an LP/cutting-plane scheme for linear objectives
and a multiplicative-weights scheme driven by approximate best-response
subroutines, both backed by exact brute-force oracles at desk scale.
"""
from .instance import (
    CardinalityRatioObjective,
    CoverageObjective,
    GroundSet,
    LinearObjective,
    MixedStrategy,
    ProblemInstance,
    SubmodularTableObjective,
    expected_values,
    scenario_value,
    worst_case_value,
)
from .systems import (
    ExplicitListSystem,
    IntersectionSystem,
    KnapsackSystem,
    PartitionMatroid,
    StPathSystem,
    UniformMatroid,
)


def __getattr__(name):
    # Solver entry points are re-exported lazily to keep import light.
    entry_points = {
        "exact_game_solve": "exact",
        "mwu_solve": "mwu",
        "sparsify": "mwu",
        "solve_lp_scheme": "lpscheme",
        "solve_relaxed": "lpscheme",
        "decompose": "lpscheme",
        "robust_shortest_path": "lpscheme",
        "load_instance": "serialize",
        "save_instance": "serialize",
    }
    if name in entry_points:
        import importlib

        module = importlib.import_module(f".{entry_points[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__version__ = "0.1.0"

__all__ = [
    "CardinalityRatioObjective",
    "CoverageObjective",
    "ExplicitListSystem",
    "GroundSet",
    "IntersectionSystem",
    "KnapsackSystem",
    "LinearObjective",
    "MixedStrategy",
    "PartitionMatroid",
    "ProblemInstance",
    "StPathSystem",
    "SubmodularTableObjective",
    "UniformMatroid",
    "expected_values",
    "scenario_value",
    "worst_case_value",
]
