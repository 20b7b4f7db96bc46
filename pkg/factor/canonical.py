"""
Canonical spectral factor
=========================

Among all factors U X(t) of a real Gramian there is exactly one whose leading
coefficient is real with orthogonal rows, descending row norms and positive
leading entries. It is built from the eigendecomposition of the (real) degree-0
Gramian block B_0 = A_0^H A_0.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
import scipy.linalg

from common.config import DEFAULT_TOLERANCES, Tolerances
from common.exceptions import DegenerateSpectrum, NotRealGramian, RankDeficientLead, UnitarityFailure
from numeric.linalg import fix_row_signs, frobenius, rank, sym_eig
from polymat.poly_matrix import PolyMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CanonicalFactor:
    """
    Attributes:
        X (PolyMatrix): Factor with real A_0 in the canonical set.
        U (np.ndarray): d x d unitary with X = U * (input factor).
        residuals (Dict[str, float]): Unitarity, U A_0 = R_0 and realness residuals.
    """
    X: PolyMatrix
    U: np.ndarray
    residuals: Dict[str, float] = field(default_factory=dict)


def canonical_lead(B0: np.ndarray, d: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Canonical d x N leading coefficient with R_0^T R_0 = B_0: rows are
    sqrt(lambda_j) v_j^T for the top d eigenpairs of B_0, descending.

    Raises:
        RankDeficientLead: If B_0 has fewer than d significant eigenvalues.
        DegenerateSpectrum: If two of the top d eigenvalues are closer than eps_gap (relative).
    """
    eigenvalues, V = sym_eig(B0, tolerances.eps_sym, tolerances.rank_tol, tolerances.eps_recon)
    top = eigenvalues[:d]
    if top[0] <= 0 or top[-1] <= tolerances.rank_tol * top[0]:
        raise RankDeficientLead(f"B_0 has fewer than {d} significant eigenvalues: {top}")
    gaps = top[:-1] - top[1:]
    if np.any(gaps <= tolerances.eps_gap * top[0]):
        raise DegenerateSpectrum(f"B_0 has a repeated eigenvalue among its top {d} (smallest gap "
                                 f"{np.min(gaps):.3e}); canonical factor is not unique")

    R0 = np.sqrt(top)[:, None] * V[:, :d].T
    R0, _ = fix_row_signs(R0, tolerances.rank_tol)
    return R0


def canonicalize_factor(X: PolyMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> CanonicalFactor:
    """
    Rotates a spectral factor of a real Gramian into canonical form.

    Args:
        X (PolyMatrix): Complex d x N factor whose Gramian is real and whose A_0 has rank d.
        tolerances (Tolerances): Tolerances for realness, rank, spectral gaps and unitarity.

    Returns:
        CanonicalFactor: U X with U A_0 = R_0 canonical; the Gramian is unchanged.

    Raises:
        NotRealGramian: Gramian of X is not real.
        RankDeficientLead: A_0 does not have full row rank.
        DegenerateSpectrum: B_0 has repeated eigenvalues among its top d.
        UnitarityFailure: The computed U is not unitary or does not map A_0 to R_0.
    """
    real, max_imag = X.gram().is_real(tolerances.eps_real)
    if not real:
        raise NotRealGramian(f"Gramian of the factor is not real: max imaginary entry {max_imag:.3e}")

    d = X.shape[0]
    A0 = X.coeffs[0]
    lead_rank = rank(A0, tolerances.rank_tol)
    if lead_rank < d:
        raise RankDeficientLead(f"A_0 has rank {lead_rank} < d = {d}")

    B0 = (A0.conj().T @ A0).real
    R0 = canonical_lead(0.5 * (B0 + B0.T), d, tolerances)

    # U = R_0 A_0^+ through the SVD of A_0; exact when U A_0 = R_0 is solvable
    U = R0 @ scipy.linalg.pinv(A0, rtol=tolerances.rank_tol)

    unitarity = frobenius(U @ U.conj().T - np.eye(d))
    lead_residual = frobenius(U @ A0 - R0)
    if unitarity > tolerances.eps_unitary:
        raise UnitarityFailure(f"U is not unitary: ||U U^H - I|| = {unitarity:.3e}")
    if lead_residual > tolerances.eps_unitary * (frobenius(R0) + 1.0):
        raise UnitarityFailure(f"U A_0 != R_0: residual {lead_residual:.3e}")

    coeffs = [U @ A for A in X.coeffs]
    lead_imag = frobenius(coeffs[0].imag)
    coeffs[0] = R0.astype(complex)

    logger.debug(f"Canonicalized factor: ||U U^H - I|| = {unitarity:.2e}, ||U A_0 - R_0|| = {lead_residual:.2e}")
    return CanonicalFactor(X=PolyMatrix(tuple(coeffs)),
                           U=U,
                           residuals={"unitarity": unitarity,
                                      "lead": lead_residual,
                                      "lead_imag": lead_imag,
                                      "gram_imag": max_imag})


def constant_real_factor(B0: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Real factor R with R^T R = B0 of a constant symmetric PSD matrix, from its
    eigendecomposition. Constant Gramians always have one, unlike polynomial ones.

    Returns:
        np.ndarray: rank(B0) x N real matrix with orthogonal rows (0 x N for B0 = 0).
    """
    eigenvalues, V = sym_eig(B0, tolerances.eps_sym, tolerances.rank_tol, tolerances.eps_recon)
    if eigenvalues.size == 0 or eigenvalues[0] <= 0:
        return np.zeros((0, np.asarray(B0).shape[0]))
    d = int(np.sum(eigenvalues > tolerances.rank_tol * eigenvalues[0]))
    R = np.sqrt(eigenvalues[:d])[:, None] * V[:, :d].T
    R, _ = fix_row_signs(R, tolerances.rank_tol)
    return R
