"""Favor-exchange networks with substitutable favors.

Payoff evaluation, stability and strong-stability analysis, the
cooperation bound, transfer-augmented stability, heterogeneous-player
stratification, enforcement-mechanism comparison, a seeded protocol
simulator, and exhaustive small-instance oracles.
"""

from .model import (
    EnforcementConfig,
    FavorMatrix,
    Network,
    PlayerType,
    Society,
    SocietyDocument,
    SocietyParams,
    TransferScheme,
    export_dot,
    load_network,
    load_society,
    save_society,
    validate,
)
from .payoff import (
    PayoffBreakdown,
    payoff,
    payoff_general,
    payoff_monopolistic,
    payoff_substitutable,
    payoff_with_enforcement,
    payoff_with_transfers,
)
from .stability import (
    MonopolisticOutcome,
    SustainabilityReport,
    bound_from_params,
    comparative_statics_scan,
    cooperation_bound,
    cutoff_cost,
    example_h,
    general_matrix_bound,
    is_stable,
    monopolistic_verdict,
    rich_cost_threshold,
    sustainability_margin,
)
from .strong import (
    Deviation,
    ViolationWitness,
    audit_theorem2,
    build_regular_network,
    classify_stratification,
    enumerate_deviations,
    find_violation,
    find_violation_with_transfers,
    is_strongly_stable,
)
from .enforcement import (
    LegalCost,
    MechanismComparison,
    compare_mechanisms,
    community_payoff,
    is_community_stable,
    kappa_thresholds,
    optimal_community_size,
    optimal_legal_gamma,
    population_analysis,
    pure_bilateral_payoff,
)
from .simulate import SimConfig, SimResult, estimate_payoff_general, simulate

__version__ = "0.1.0"
