"""
Dense linear-algebra kernels
============================

Thin, tolerance-explicit wrappers over ``scipy.linalg`` used by every other
package. All tolerances are relative to the Frobenius norm (or the largest
singular value for rank decisions) of the matrix they apply to.

Sign convention:
----------------
A row (or eigenvector) is normalized so that its first entry whose magnitude
exceeds ``tol`` times the row norm is positive. The same helper is used for
eigenvectors, canonical leading coefficients and nullspace bases.
"""

from typing import Tuple

import numpy as np
import scipy.linalg

from common.config import DEFAULT_TOLERANCES
from common.exceptions import DimensionError, NotSymmetric, RankDeficient, ReconstructionFailure


def frobenius(M) -> float:
    return float(np.linalg.norm(np.asarray(M)))


def leading_sign(row, tol: float = DEFAULT_TOLERANCES.rank_tol) -> float:
    """
    Sign of the first significant entry of ``row``.

    Args:
        row (array_like): Real vector.
        tol (float): Entries with magnitude <= tol * ||row|| are skipped.

    Returns:
        float: +1.0 or -1.0; +1.0 for an all-zero row.
    """
    row = np.asarray(row, dtype=float)
    threshold = tol * np.linalg.norm(row)
    for value in row:
        if abs(value) > threshold:
            return 1.0 if value > 0 else -1.0
    return 1.0


def fix_row_signs(M, tol: float = DEFAULT_TOLERANCES.rank_tol) -> Tuple[np.ndarray, np.ndarray]:
    """
    Flips rows of ``M`` so each satisfies the leading-sign convention.

    Returns:
        Tuple[np.ndarray, np.ndarray]: The normalized matrix and the applied signs.
    """
    M = np.asarray(M, dtype=float)
    signs = np.array([leading_sign(row, tol) for row in M])
    return signs[:, None] * M, signs


def sym_eig(M, eps_sym: float = DEFAULT_TOLERANCES.eps_sym,
            sign_tol: float = DEFAULT_TOLERANCES.rank_tol,
            eps_recon: float = DEFAULT_TOLERANCES.eps_recon) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a real symmetric matrix.

    Eigenvalues are sorted descending (stable for ties) and every eigenvector is
    sign-normalized so M = V diag(w) V^T is deterministic.

    Args:
        M (array_like): Real symmetric n x n matrix.
        eps_sym (float): Allowed ||M - M^T|| relative to ||M||.
        sign_tol (float): Threshold of the leading-sign convention.
        eps_recon (float): Allowed ||V diag(w) V^T - M|| relative to ||M||.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Eigenvalues (descending) and orthonormal eigenvectors as columns.

    Raises:
        NotSymmetric: If the symmetry check fails.
        ReconstructionFailure: If V diag(w) V^T does not reproduce M.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"sym_eig needs a square matrix, got shape {M.shape}")

    asym = frobenius(M - M.T)
    if asym > eps_sym * frobenius(M):
        raise NotSymmetric(f"Matrix is not symmetric: ||M - M^T|| = {asym:.3e}, ||M|| = {frobenius(M):.3e}")

    M = 0.5 * (M + M.T)
    w, V = scipy.linalg.eigh(M)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]

    normalized, _ = fix_row_signs(V.T, sign_tol)
    V = normalized.T

    residual = frobenius((V * w) @ V.T - M)
    if residual > eps_recon * frobenius(M):
        raise ReconstructionFailure(f"Eigendecomposition does not reproduce M: residual {residual:.3e}, "
                                    f"||M|| = {frobenius(M):.3e}")
    return w, V


def rank(M, tol: float = DEFAULT_TOLERANCES.rank_tol) -> int:
    """
    Numerical rank: number of singular values above tol times the largest one.
    Works for real and complex matrices; the zero matrix has rank 0.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = scipy.linalg.svdvals(M)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def nullspace(M, tol: float = DEFAULT_TOLERANCES.rank_tol) -> np.ndarray:
    """
    Orthonormal basis of the kernel of a real matrix.

    The cut-off matches :func:`rank`, so rank + nullity = number of columns. Basis
    columns follow the leading-sign convention.

    Args:
        M (array_like): Real m x n matrix.
        tol (float): Relative singular-value threshold.

    Returns:
        np.ndarray: n x k basis, k = n - rank(M, tol); k may be 0.
    """
    M = np.asarray(M, dtype=float)
    basis = scipy.linalg.null_space(M, rcond=tol)
    if basis.shape[1] == 0:
        return basis
    normalized, _ = fix_row_signs(basis.T, tol)
    return normalized.T


def right_pinv(M, tol: float = DEFAULT_TOLERANCES.rank_tol) -> np.ndarray:
    """
    Right inverse M^T (M M^T)^{-1} of a full-row-rank real matrix, computed from
    the SVD so its error grows with cond(M) and not cond(M)^2.

    Args:
        M (array_like): Real d x N matrix with rank d.
        tol (float): Rank threshold.

    Returns:
        np.ndarray: N x d matrix with M @ result = I_d.

    Raises:
        RankDeficient: If rank(M, tol) < d.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"right_pinv needs a matrix, got shape {M.shape}")
    r = rank(M, tol)
    if r < M.shape[0]:
        raise RankDeficient(f"Matrix of shape {M.shape} has rank {r} < {M.shape[0]}")

    return scipy.linalg.pinv(M, rtol=tol)


def in_canonical_set(R0, eps_orth: float = DEFAULT_TOLERANCES.eps_orth,
                     tol: float = DEFAULT_TOLERANCES.rank_tol) -> bool:
    """
    Membership in the canonical set: rows mutually orthogonal and each row's
    first significant entry positive.
    """
    R0 = np.asarray(R0)
    if np.iscomplexobj(R0):
        if frobenius(R0.imag) > eps_orth * (frobenius(R0) + 1.0):
            return False
        R0 = R0.real
    gram = R0 @ R0.T
    off_diagonal = gram - np.diag(np.diag(gram))
    if frobenius(off_diagonal) > eps_orth * (frobenius(gram) + 1.0):
        return False
    return all(leading_sign(row, tol) > 0 for row in R0 if np.any(row != 0))
