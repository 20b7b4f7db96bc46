"""
Real-factorability classifier
=============================

A real Gramian has a real spectral factor exactly when its representation has
W = 0. The classifier canonicalizes the supplied factor, recovers (W, R) and
compares the normalized size of W with ``classify_tol``. The margin is reported
instead of being hidden behind the verdict.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from common.config import DEFAULT_TOLERANCES, Tolerances
from common.exceptions import ValidationFailed
from factor.canonical import canonicalize_factor, constant_real_factor
from factor.recovery import recover_hrep_with_residuals
from hrep.h_representation import HRep
from numeric.linalg import frobenius
from polymat.poly_matrix import PolyMatrix

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    REAL_FACTORABLE = "RealFactorable"
    COMPLEX_ONLY = "ComplexOnly"


@dataclass(frozen=True, eq=False)
class Classification:
    """
    Attributes:
        verdict (Verdict): RealFactorable iff w_norm <= classify_tol.
        w_norm (float): max_k ||W_k|| / (1 + ||R||).
        real_factor (Optional[PolyMatrix]): Real factor with the same Gramian, for RealFactorable.
        residuals (Dict[str, float]): Canonicalization, recovery and Gramian-match residuals.
        hrep (Optional[HRep]): The recovered canonical representation.
    """
    verdict: Verdict
    w_norm: float
    real_factor: Optional[PolyMatrix] = None
    residuals: Dict[str, float] = field(default_factory=dict)
    hrep: Optional[HRep] = None

    @property
    def margin(self) -> float:
        """w_norm minus the threshold it was compared with; negative means real."""
        return self.residuals.get("w_norm_margin", float("nan"))


def gram_distance(X: PolyMatrix, Y: PolyMatrix) -> float:
    """||gram(X) - gram(Y)|| relative to ||gram(X)|| + 1."""
    GX = np.stack(X.gram().coeffs)
    GY = np.stack(Y.gram().coeffs)
    return frobenius(GX - GY) / (frobenius(GX) + 1.0)


def classify(X: PolyMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Classification:
    """
    Decides whether the Gramian of ``X`` has a real spectral factor.

    Args:
        X (PolyMatrix): Factor with a real Gramian and full-row-rank A_0.
        tolerances (Tolerances): ``classify_tol`` is the W = 0 threshold.

    Returns:
        Classification: Verdict, w_norm, residuals and, when real, the real factor.

    Raises:
        PolygramError: Canonicalization and recovery errors propagate unchanged.
        ValidationFailed: If the real factor does not reproduce the Gramian.
    """
    cf = canonicalize_factor(X, tolerances)
    h, recovery_residuals = recover_hrep_with_residuals(cf, tolerances)

    w_norm = h.w_norm() / (1.0 + h.r_norm())
    residuals = dict(cf.residuals)
    residuals.update(recovery_residuals)
    residuals["w_norm_margin"] = w_norm - tolerances.classify_tol

    if w_norm > tolerances.classify_tol:
        logger.debug(f"ComplexOnly: w_norm = {w_norm:.3e} > {tolerances.classify_tol:.1e}")
        return Classification(verdict=Verdict.COMPLEX_ONLY, w_norm=w_norm, residuals=residuals, hrep=h)

    if X.degree == 0:
        # constant Gramian: the eigen factor of B_0
        real_factor = PolyMatrix.from_real([constant_real_factor(X.gram().coeffs[0].real, tolerances)])
    else:
        real_factor = PolyMatrix.from_real(cf.X.real_parts)
    mismatch = gram_distance(X, real_factor)
    residuals["gram_mismatch"] = mismatch
    if mismatch > tolerances.eps_real:
        # a W below classify_tol but large enough to move the Gramian
        raise ValidationFailed(f"Real factor does not reproduce the Gramian: relative mismatch {mismatch:.3e} "
                               f"(w_norm {w_norm:.3e}); classification is borderline")

    logger.debug(f"RealFactorable: w_norm = {w_norm:.3e}, Gramian mismatch {mismatch:.3e}")
    return Classification(verdict=Verdict.REAL_FACTORABLE, w_norm=w_norm, real_factor=real_factor,
                          residuals=residuals, hrep=h)
