"""Achievable-rate and decoding-complexity bounds for LDPC ensembles over
parallel binary-input memoryless output-symmetric channels."""
from .bounds_rate import (
    BoundResult,
    punctured_design_rate,
    rate_bound_bec,
    rate_bound_ip,
    rate_bound_parallel,
    rate_bound_rp,
)
from .channel import (
    BEC,
    BIAWGN,
    BSC,
    DiscreteChannel,
    EffectiveChannel,
    NumericControls,
    capacity,
    g_moment,
    g_moments,
    h2,
    h2_series,
    puncture_channel,
    uncoded_error_prob,
)
from .complexity import (
    ComplexityBound,
    chi_d,
    chi_d_punctured,
    complexity_bound_ip,
    complexity_bound_parallel,
    complexity_bound_rp,
    gamma_power_lower,
    legacy_bound,
)
from .degree import DegreePolynomial, Ensemble, average_right_degree, check_rate_convergence, convert, design_rate, psi
from .density_evolution import DEControls
from .errors import DegenerateBoundError, LdpcbError, NumericError, ValidationError
from .parallel import (
    IntentionalPuncturing,
    ParallelAssignment,
    RandomPuncturing,
    average_capacity,
    edge_fractions,
    ip_assignment,
    rp_assignment,
)
from .thresholds import ThresholdRow, capacity_limit, de_threshold, ml_threshold, table_report

__version__ = "0.1.0"

__all__ = [
    "BEC",
    "BIAWGN",
    "BSC",
    "BoundResult",
    "ComplexityBound",
    "DEControls",
    "DegenerateBoundError",
    "DegreePolynomial",
    "DiscreteChannel",
    "EffectiveChannel",
    "Ensemble",
    "IntentionalPuncturing",
    "LdpcbError",
    "NumericControls",
    "NumericError",
    "ParallelAssignment",
    "RandomPuncturing",
    "ThresholdRow",
    "ValidationError",
    "average_capacity",
    "average_right_degree",
    "capacity",
    "capacity_limit",
    "check_rate_convergence",
    "chi_d",
    "chi_d_punctured",
    "complexity_bound_ip",
    "complexity_bound_parallel",
    "complexity_bound_rp",
    "convert",
    "de_threshold",
    "design_rate",
    "edge_fractions",
    "g_moment",
    "g_moments",
    "gamma_power_lower",
    "h2",
    "h2_series",
    "ip_assignment",
    "ml_threshold",
    "legacy_bound",
    "psi",
    "puncture_channel",
    "punctured_design_rate",
    "rate_bound_bec",
    "rate_bound_ip",
    "rate_bound_parallel",
    "rate_bound_rp",
    "rp_assignment",
    "table_report",
    "uncoded_error_prob",
]
