"""coopequil: a coopetitive-equilibrium engine.

Translates strategic-dependency networks into quantitative game models,
solves dependency-coupled equilibria, and supports sweeps, validation
scoring, and counterfactual what-if analysis.
"""

from .model import (
    BargainingSpec,
    CostModel,
    Dependum,
    DependencyLink,
    DependencyNetwork,
    InterdependenceMatrix,
    Scenario,
    ScenarioFormatError,
    ScenarioValidationError,
    ValueSpec,
    Violation,
    canonical_actor_order,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)
from .interdependence import (
    asymmetry_report,
    compute_coefficient,
    compute_matrix,
    criticality_from_alternatives,
    effective_matrix,
)
from .valuation import ValueBreakdown, individual_value, superadditivity_gap, synergy, total_value, value_gradient
from .appropriation import cost, payoffs, shapley_bargaining_estimate, shares_from_power
from .equilibrium import (
    EquilibriumResult,
    SolveSettings,
    best_response,
    solve,
    utility,
    utility_gradient,
    verify_epsilon_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "BargainingSpec",
    "CostModel",
    "Dependum",
    "DependencyLink",
    "DependencyNetwork",
    "EquilibriumResult",
    "InterdependenceMatrix",
    "Scenario",
    "ScenarioFormatError",
    "ScenarioValidationError",
    "SolveSettings",
    "ValueBreakdown",
    "ValueSpec",
    "Violation",
    "asymmetry_report",
    "best_response",
    "canonical_actor_order",
    "compute_coefficient",
    "compute_matrix",
    "cost",
    "criticality_from_alternatives",
    "effective_matrix",
    "individual_value",
    "payoffs",
    "scenario_from_dict",
    "scenario_to_dict",
    "shapley_bargaining_estimate",
    "shares_from_power",
    "solve",
    "superadditivity_gap",
    "synergy",
    "total_value",
    "utility",
    "utility_gradient",
    "validate_scenario",
    "value_gradient",
    "verify_epsilon_equilibrium",
    "__version__",
]
