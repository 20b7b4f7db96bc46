from hrep.h_representation import (
    HRep,
    HRepReport,
    assemble_mixer,
    assemble_toeplitz,
    canonicalize_hrep,
    canonicalizing_rotation,
    hrep_distance,
    mix_coefficients,
    mixer_from_blocks,
    stack_r,
    to_factor,
    toeplitz_from_blocks,
    validate,
)
from hrep.sampler import R0_CONDITIONING_FLOOR, r0_conditioning, sample

__all__ = [
    "R0_CONDITIONING_FLOOR",
    "HRep",
    "HRepReport",
    "assemble_mixer",
    "assemble_toeplitz",
    "canonicalize_hrep",
    "canonicalizing_rotation",
    "hrep_distance",
    "mix_coefficients",
    "mixer_from_blocks",
    "r0_conditioning",
    "sample",
    "stack_r",
    "to_factor",
    "toeplitz_from_blocks",
    "validate",
]
