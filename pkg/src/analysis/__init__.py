"""
Verifiers and oracles for constructed functions: continuity checks,
oscillation estimates, the finite-coordinate criterion, nearly-open traces and
brute-force grid oracles.
"""
from src.analysis.continuity import (
    lower_semicontinuity_check,
    s_continuity_check,
    separate_continuity_check,
    ssc_check,
)
from src.analysis.criterion import criterion_check_3_9
from src.analysis.nearly_open import TraceMode, nearly_open_trace_check
from src.analysis.oracles import (
    brute_force_oscillation,
    brute_force_set_distance,
    brute_force_sphere_distance,
    brute_force_sphere_distances,
    escape_region_complement,
    trace_complement,
)
from src.analysis.oscillation import (
    claim1_bound_check,
    claim3_witness,
    claim4_check,
    claim4_neighborhood,
    oscillation_estimate,
)
from src.analysis.reports import CheckReport, CriterionResult, NearlyOpenReport, OscillationEstimate, TraceVerdict
from src.analysis.sampling import NetSpec

__all__ = [
    "lower_semicontinuity_check",
    "s_continuity_check",
    "separate_continuity_check",
    "ssc_check",
    "criterion_check_3_9",
    "TraceMode",
    "nearly_open_trace_check",
    "brute_force_oscillation",
    "brute_force_set_distance",
    "brute_force_sphere_distance",
    "brute_force_sphere_distances",
    "escape_region_complement",
    "trace_complement",
    "claim1_bound_check",
    "claim3_witness",
    "claim4_check",
    "claim4_neighborhood",
    "oscillation_estimate",
    "CheckReport",
    "CriterionResult",
    "NearlyOpenReport",
    "OscillationEstimate",
    "TraceVerdict",
    "NetSpec",
]
