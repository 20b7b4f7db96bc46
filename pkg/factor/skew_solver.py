"""
Skew matrix equation X^T A - A^T X = C
======================================

For A (d x N) of full row rank, any two solutions differ by W A with W
symmetric. ``solve_skew_particular`` finds one solution by dense least squares
over the dN unknowns; ``skew_offset_symmetric`` recovers the symmetric W
between two solutions and checks that structure.
"""

import numpy as np
import scipy.linalg

from common.config import DEFAULT_TOLERANCES
from common.exceptions import DimensionError, Infeasible, NotSkew, RankDeficient, StructureViolation
from numeric.linalg import frobenius, rank, right_pinv


def skew_operator(A: np.ndarray) -> np.ndarray:
    """
    Matrix of X -> X^T A - A^T X acting on row-major vec(X).

    Returns:
        np.ndarray: N^2 x dN real matrix.
    """
    A = np.asarray(A, dtype=float)
    d, N = A.shape
    L = np.zeros((N * N, d * N))
    for r in range(d):
        for c in range(N):
            E = np.zeros((d, N))
            E[r, c] = 1.0
            L[:, r * N + c] = (E.T @ A - A.T @ E).ravel()
    return L


def skew_residual(A: np.ndarray, X: np.ndarray, C: np.ndarray) -> float:
    return frobenius(X.T @ A - A.T @ X - C)


def solve_skew_particular(A, C, tol: float = DEFAULT_TOLERANCES.skew_tol) -> np.ndarray:
    """
    One solution of X^T A - A^T X = C (the minimum-norm least-squares one).

    Args:
        A (array_like): Real d x N matrix of full row rank.
        C (array_like): Real skew-symmetric N x N matrix.
        tol (float): Relative tolerance for the skew check and the residual.

    Returns:
        np.ndarray: d x N solution X.

    Raises:
        NotSkew: If C is not skew-symmetric within tol.
        RankDeficient: If A does not have full row rank.
        Infeasible: If C is not in the range of the skew map.
    """
    A = np.asarray(A, dtype=float)
    C = np.asarray(C, dtype=float)
    d, N = A.shape
    if C.shape != (N, N):
        raise DimensionError(f"C must be {N} x {N}, got {C.shape}")
    if frobenius(C + C.T) > tol * frobenius(C):
        raise NotSkew(f"C is not skew-symmetric: ||C + C^T|| = {frobenius(C + C.T):.3e}")
    if rank(A) < d:
        raise RankDeficient(f"A of shape {A.shape} does not have full row rank")

    solution, *_ = scipy.linalg.lstsq(skew_operator(A), C.ravel())
    X = solution.reshape(d, N)

    residual = skew_residual(A, X, C)
    bound = tol * (frobenius(A) * frobenius(X) + frobenius(C))
    if residual > bound:
        raise Infeasible(f"X^T A - A^T X = C has no solution: least-squares residual {residual:.3e} > {bound:.3e}")
    return X


def skew_offset_symmetric(A, X1, X2, tol: float = DEFAULT_TOLERANCES.skew_tol) -> np.ndarray:
    """
    The symmetric W with X1 - X2 = W A, for two solutions of the same skew equation.

    Returns:
        np.ndarray: Symmetric d x d matrix W.

    Raises:
        StructureViolation: If X1 - X2 is not W A with W symmetric within tol.
    """
    A = np.asarray(A, dtype=float)
    X1 = np.asarray(X1, dtype=float)
    X2 = np.asarray(X2, dtype=float)
    offset = X1 - X2

    # each solution carries a residual of order tol * ||A|| * ||X_i||
    homogeneous = frobenius(offset.T @ A - A.T @ offset)
    if homogeneous > tol * (frobenius(A) * (frobenius(X1) + frobenius(X2)) + 1.0):
        raise StructureViolation(f"Inputs do not solve the same equation: homogeneous residual {homogeneous:.3e}")

    try:
        W = offset @ right_pinv(A)
    except RankDeficient as e:
        raise StructureViolation(f"A is rank deficient: {e}") from e

    asymmetry = frobenius(W - W.T)
    if asymmetry > tol * (frobenius(W) + 1.0):
        raise StructureViolation(f"Offset is not symmetric: ||W - W^T|| = {asymmetry:.3e}")
    reconstruction = frobenius(W @ A - offset)
    if reconstruction > tol * (frobenius(W) * frobenius(A) + frobenius(offset) + 1.0):
        raise StructureViolation(f"W A does not reproduce the offset: residual {reconstruction:.3e}")
    return 0.5 * (W + W.T)
