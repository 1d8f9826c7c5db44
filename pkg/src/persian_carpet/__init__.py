"""
Persian Carpet - Rational Maps with Buried Julia Components

Tools around a family of rational maps whose Julia sets contain buried
components that are not points or Jordan curves:

- trees: weighted dynamical trees, transition matrices and obstructions
- hurwitz: realizability of branch data by permutation triples
- family: the explicit cubic f_λ, McMullen maps, PCF quadratic parameters
- symbolic: the subshift coding the components and its interval model
- moduli: modulus inequalities and equipotential levels of the surgery
- render: tile-parallel basin renders of the dynamical and parameter planes

Everything numeric lives on the Riemann sphere (numerics) with ∞ handled
by a second chart.
"""

from .errors import (
    BudgetError,
    ConfigError,
    DegenerateEvaluation,
    DomainError,
    NumericalFailure,
    PersianCarpetError,
)
from .numerics import (
    INFINITY,
    MobiusMap,
    Polynomial,
    RationalMap,
    SpherePoint,
    chordal_distance,
    conjugate,
    critical_points,
    evaluate,
    fixed_points,
    polynomial_roots,
)
from .trees import (
    WeightedDynamicalTree,
    builtin_trees,
    is_unobstructed,
    leading_eigenvalue,
    transition_matrix,
)
from .hurwitz import (
    BranchData,
    Permutation,
    brute_force_realizable,
    check_h1prime,
    construct_permutations,
    verify_hurwitz_conditions,
)
from .family import (
    PersianCarpetMap,
    build_f_lambda,
    derive_coefficients,
    hat_map,
    magnitude_ladder_check,
    solve_pcf_parameter,
)
from .symbolic import (
    IntervalModel,
    Word,
    admissible_words,
    build_interval_model,
    equivalent,
    itinerary_cylinder,
    word_distance,
)
from .moduli import (
    EquipotentialLevels,
    ModuliSolution,
    annulus_disk_bound,
    levels_from_moduli,
    mcmullen_annulus_check,
    separating_circle_bound,
    solve_moduli,
)
from .config import JobConfig

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ConfigError",
    "DegenerateEvaluation",
    "DomainError",
    "NumericalFailure",
    "PersianCarpetError",
    "INFINITY",
    "MobiusMap",
    "Polynomial",
    "RationalMap",
    "SpherePoint",
    "chordal_distance",
    "conjugate",
    "critical_points",
    "evaluate",
    "fixed_points",
    "polynomial_roots",
    "WeightedDynamicalTree",
    "builtin_trees",
    "is_unobstructed",
    "leading_eigenvalue",
    "transition_matrix",
    "BranchData",
    "Permutation",
    "brute_force_realizable",
    "check_h1prime",
    "construct_permutations",
    "verify_hurwitz_conditions",
    "PersianCarpetMap",
    "build_f_lambda",
    "derive_coefficients",
    "hat_map",
    "magnitude_ladder_check",
    "solve_pcf_parameter",
    "IntervalModel",
    "Word",
    "admissible_words",
    "build_interval_model",
    "equivalent",
    "itinerary_cylinder",
    "word_distance",
    "EquipotentialLevels",
    "ModuliSolution",
    "annulus_disk_bound",
    "levels_from_moduli",
    "mcmullen_annulus_check",
    "separating_circle_bound",
    "solve_moduli",
    "JobConfig",
]
