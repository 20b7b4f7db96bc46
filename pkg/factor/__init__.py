from factor.canonical import CanonicalFactor, canonical_lead, canonicalize_factor, constant_real_factor
from factor.classifier import Classification, Verdict, classify, gram_distance
from factor.recovery import factor_offset, recover_hrep, recover_hrep_with_residuals
from factor.skew_solver import skew_offset_symmetric, skew_operator, skew_residual, solve_skew_particular

__all__ = [
    "CanonicalFactor",
    "Classification",
    "Verdict",
    "canonical_lead",
    "canonicalize_factor",
    "classify",
    "constant_real_factor",
    "factor_offset",
    "gram_distance",
    "recover_hrep",
    "recover_hrep_with_residuals",
    "skew_offset_symmetric",
    "skew_operator",
    "skew_residual",
    "solve_skew_particular",
]
