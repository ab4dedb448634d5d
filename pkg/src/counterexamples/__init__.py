from src.counterexamples.barrier import INDETERMINATE, SATISFIED, VIOLATED, BarrierResult, barrier_check
from src.counterexamples.constructions import (
    Construction,
    VanishingFamily,
    compare_energies,
    non_sbv_minimizer,
    non_w11_minimizer,
    nonunique_pair,
    vanishing_l1_family,
)
from src.counterexamples.perturbation import (
    STAIRCASE,
    TRIANGLE,
    PerturbationSpec,
    facet_perturbation,
    perturbation_report,
    resolve_facet,
)
from src.counterexamples.profiles import (
    CantorProfile,
    FlatProfile,
    LevelProfile,
    PlateauProfile,
    ProfileSolution,
    ShiftedBoundaryProfile,
    TriangleBumpProfile,
    cantor_function,
)

__all__ = [
    "BarrierResult", "CantorProfile", "Construction", "FlatProfile", "INDETERMINATE", "LevelProfile",
    "PerturbationSpec", "PlateauProfile", "ProfileSolution", "SATISFIED", "STAIRCASE", "ShiftedBoundaryProfile",
    "TRIANGLE", "TriangleBumpProfile", "VIOLATED", "VanishingFamily", "barrier_check", "cantor_function",
    "compare_energies", "facet_perturbation", "non_sbv_minimizer", "non_w11_minimizer", "nonunique_pair",
    "perturbation_report", "resolve_facet", "vanishing_l1_family",
]
