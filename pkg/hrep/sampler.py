"""
Random points of the representation set
=======================================

W_k = (M + M^T) / 2 with M Gaussian(0, scale^2), then R is drawn inside the
nullspace of the block-Toeplitz matrix: R = B C with B an orthonormal kernel
basis and C a standard Gaussian (nullity x N) matrix. WR = 0 therefore holds up
to kernel accuracy.

Draws whose R_0 is close to rank deficiency are rejected: recovering W from a
factor divides by R_0 once per block, so rounding grows like
(||R|| / sigma_min(R_0))^(2P). The floor on

    sigma_min(R_0) * sqrt(P + 1) / ||(R_0; ...; R_P)||

is R0_CONDITIONING_FLOOR (the ratio is about 1 for a typical draw).
"""

import logging
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from common.config import DEFAULT_TOLERANCES, Tolerances
from common.exceptions import DimensionError, SamplingFailed
from hrep.h_representation import HRep, toeplitz_from_blocks, validate
from numeric.linalg import frobenius, nullspace

logger = logging.getLogger(__name__)

MAX_RETRIES = 16
R0_CONDITIONING_FLOOR = 0.05


def r0_conditioning(R: Sequence[np.ndarray]) -> float:
    """sigma_min(R_0) * sqrt(P + 1) / ||stack(R)||, 0 when R_0 is rank deficient."""
    total = frobenius(np.vstack(R))
    if total == 0:
        return 0.0
    sigma_min = scipy.linalg.svdvals(R[0])[-1]
    return float(sigma_min * np.sqrt(len(R)) / total)


def sample(d: int, N: int, P: int, seed: Optional[int] = None, scale: float = 1.0,
           tolerances: Tolerances = DEFAULT_TOLERANCES, max_retries: int = MAX_RETRIES,
           min_conditioning: float = R0_CONDITIONING_FLOOR) -> HRep:
    """
    Samples a valid H-representation. Deterministic for a fixed seed.

    Args:
        d (int): Rank, 1 <= d <= N.
        N (int): Gramian size.
        P (int): Factor degree, P >= 1.
        seed (Optional[int]): Seed of ``numpy.random.default_rng``.
        scale (float): Standard deviation of the entries of M; 0 gives W = 0 (a real factor).
        tolerances (Tolerances): Tolerances used for the rank and validation checks.
        max_retries (int): Number of draws before giving up.
        min_conditioning (float): Floor of :func:`r0_conditioning` for an accepted draw.

    Returns:
        HRep: A point passing :func:`hrep.validate` (not canonicalized).

    Raises:
        DimensionError: On invalid (d, N, P) or negative scale.
        SamplingFailed: If no draw passes within ``max_retries``.
    """
    if not (N >= d >= 1 and P >= 1):
        raise DimensionError(f"Sampling needs N >= d >= 1 and P >= 1, got d={d}, N={N}, P={P}")
    if scale < 0:
        raise DimensionError(f"scale must be non-negative, got {scale}")

    rng = np.random.default_rng(seed)
    last_failure = "no attempt made"
    for attempt in range(1, max_retries + 1):
        W = []
        for _ in range(2 * P):
            M = rng.normal(0.0, scale, size=(d, d))
            W.append(0.5 * (M + M.T))

        basis = nullspace(toeplitz_from_blocks(W, d, P), tolerances.rank_tol)
        nullity = basis.shape[1]
        if nullity < d:
            # a Pd x (P+1)d matrix always has nullity >= d
            last_failure = f"nullity {nullity} < d = {d}"
            continue

        C = rng.standard_normal((nullity, N))
        R_stack = basis @ C
        R = np.split(R_stack, P + 1, axis=0)

        conditioning = r0_conditioning(R)
        if conditioning < min_conditioning:
            last_failure = f"R_0 conditioning {conditioning:.3e} < {min_conditioning:.3e}"
            logger.debug(f"Attempt {attempt}: {last_failure}, resampling")
            continue

        h = HRep(d, N, P, tuple(W), tuple(R), canonical=False, seed=seed)
        report = validate(h, tolerances)
        if not report.passed:
            last_failure = report.summary()
            logger.debug(f"Attempt {attempt}: validation failed, {last_failure}")
            continue
        return h

    raise SamplingFailed(f"No valid sample for d={d}, N={N}, P={P}, seed={seed} after "
                         f"{max_retries} attempts; last failure: {last_failure}")
