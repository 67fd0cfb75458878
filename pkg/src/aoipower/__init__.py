"""Age-of-information toolkit for two-step update processing under a power budget.

Analytic layer: SHS age-balance solver plus the closed-form age and
power-weighted processor activity of seven series/parallel policies.
Stochastic layer: event-driven simulation with wasted-power accounting.
Decision layer: power-constrained service-rate optimization.
"""

from .shs import (
    ZERO,
    AgeSolution,
    RateSpec,
    ResetMap,
    ShsError,
    ShsModel,
    Transition,
    average_age,
    model_from_json,
    model_to_json,
    solve_age_balance,
    stationary_distribution,
    validate_model,
)
from .policies import (
    POLICY_NAMES,
    Family,
    Policy,
    PwpaBreakdown,
    RatePair,
    age_factor,
    build_model,
    busy_fractions,
    closed_form_age,
    parse_policy,
    pwpa,
    pwpa_total,
)
from .optimize import (
    OptResult,
    PowerModel,
    PowerSweepRow,
    RhoSweepPoint,
    SearchSettings,
    mu2_star,
    objective,
    optimize,
    sweep_power,
    sweep_rho,
)
from .simulation import (
    EffortDecomposition,
    EventLog,
    SimConfig,
    SimConfigError,
    SimResult,
    classify_effort,
    load_event_log,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # shs
    "ZERO", "AgeSolution", "RateSpec", "ResetMap", "ShsError", "ShsModel",
    "Transition", "average_age", "model_from_json", "model_to_json",
    "solve_age_balance", "stationary_distribution", "validate_model",
    # policies
    "POLICY_NAMES", "Family", "Policy", "PwpaBreakdown", "RatePair",
    "age_factor", "build_model", "busy_fractions", "closed_form_age",
    "parse_policy", "pwpa", "pwpa_total",
    # optimize
    "OptResult", "PowerModel", "PowerSweepRow", "RhoSweepPoint",
    "SearchSettings", "mu2_star", "objective", "optimize", "sweep_power",
    "sweep_rho",
    # simulation
    "EffortDecomposition", "EventLog", "SimConfig", "SimConfigError",
    "SimResult", "classify_effort", "load_event_log", "simulate",
]
