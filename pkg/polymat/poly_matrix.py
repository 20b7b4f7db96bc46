"""
Polynomial matrices on the real line
====================================

``PolyMatrix`` holds X(t) = sum_p A_p t^p as its coefficient list and
``GramPoly`` holds G(t) = sum_k B_k t^k. The Hermitian transpose is taken
coefficient-wise (t stays a real indeterminate), so

    B_k = sum_{0 <= p, k - p <= P} A_p^H A_{k-p}

and G(t) = X(t)^H X(t) holds for real t only.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from common.config import DEFAULT_TOLERANCES
from common.exceptions import DimensionError, NotReal
from numeric.linalg import frobenius, rank


def chebyshev_grid(n: int = 21, radius: float = 10.0) -> np.ndarray:
    """
    Default sample points for PSD diagnostics: ``n`` Chebyshev nodes on
    [-radius, radius] plus both endpoints, sorted ascending. For odd ``n`` the
    grid contains t = 0.
    """
    j = np.arange(n)
    nodes = radius * np.cos((2 * j + 1) * np.pi / (2 * n))
    nodes[np.abs(nodes) < 1e-12 * radius] = 0.0
    return np.sort(np.concatenate([[-radius], nodes, [radius]]))


def _as_coefficients(coeffs: Iterable) -> Tuple[np.ndarray, ...]:
    arrays = tuple(np.array(c, dtype=complex, ndmin=2) for c in coeffs)
    if not arrays:
        raise DimensionError("A polynomial matrix needs at least one coefficient.")
    shape = arrays[0].shape
    if len(shape) != 2:
        raise DimensionError(f"Coefficients must be matrices, got shape {shape}")
    for index, array in enumerate(arrays):
        if array.shape != shape:
            raise DimensionError(f"Coefficient {index} has shape {array.shape}, expected {shape}")
    return arrays


def _horner(coeffs: Sequence[np.ndarray], t: float) -> np.ndarray:
    result = coeffs[-1].copy()
    for coefficient in reversed(coeffs[:-1]):
        result = result * t + coefficient
    return result


@dataclass(frozen=True, eq=False)
class PolyMatrix:
    """
    Degree-P polynomial matrix with complex d x N coefficients.

    Attributes:
        coeffs (Tuple[np.ndarray, ...]): P + 1 complex matrices; index p holds A_p,
            whose real and imaginary parts are R_p and Q_p.
    """
    coeffs: Tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coefficients(self.coeffs))

    @classmethod
    def from_stack(cls, stacked: np.ndarray, degree: int) -> "PolyMatrix":
        """Splits a (P+1)d x N stack (A_0; ...; A_P) into coefficients."""
        return cls(tuple(np.split(np.asarray(stacked), degree + 1, axis=0)))

    @classmethod
    def from_real(cls, coeffs: Iterable) -> "PolyMatrix":
        """Real coefficients R_0..R_P as a polynomial matrix (Q_p = 0)."""
        return cls(tuple(np.asarray(c, dtype=float) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def shape(self) -> Tuple[int, int]:
        return self.coeffs[0].shape

    @property
    def real_parts(self) -> Tuple[np.ndarray, ...]:
        return tuple(c.real.copy() for c in self.coeffs)

    @property
    def imag_parts(self) -> Tuple[np.ndarray, ...]:
        return tuple(c.imag.copy() for c in self.coeffs)

    def stacked(self) -> np.ndarray:
        return np.vstack(self.coeffs)

    def is_real_valued(self, tol: float = 0.0) -> bool:
        return frobenius(self.stacked().imag) <= tol * frobenius(self.stacked())

    def evaluate(self, t: float) -> np.ndarray:
        """Horner evaluation of X(t)."""
        return _horner(self.coeffs, t)

    def left_multiply(self, U: np.ndarray) -> "PolyMatrix":
        """Returns U X(t) for a constant matrix U."""
        U = np.asarray(U)
        return PolyMatrix(tuple(U @ c for c in self.coeffs))

    def gram(self) -> "GramPoly":
        """
        Coefficients of X(t)^H X(t) with the coefficient-wise Hermitian transpose.

        Returns:
            GramPoly: 2P + 1 Hermitian N x N coefficients.
        """
        P = self.degree
        N = self.shape[1]
        blocks = []
        for k in range(2 * P + 1):
            B = np.zeros((N, N), dtype=complex)
            for p in range(max(0, k - P), min(P, k) + 1):
                B += self.coeffs[p].conj().T @ self.coeffs[k - p]
            blocks.append(B)
        return GramPoly(tuple(blocks))


@dataclass(frozen=True)
class PsdProfile:
    min_eig: float
    max_rank: int
    rank_at_0: int


@dataclass(frozen=True, eq=False)
class GramPoly:
    """
    Polynomial Gramian G(t) = sum_k B_k t^k.

    Attributes:
        coeffs (Tuple[np.ndarray, ...]): K + 1 Hermitian N x N complex matrices.
    """
    coeffs: Tuple[np.ndarray, ...]

    def __post_init__(self):
        coeffs = _as_coefficients(self.coeffs)
        rows, cols = coeffs[0].shape
        if rows != cols:
            raise DimensionError(f"Gramian coefficients must be square, got {rows} x {cols}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def size(self) -> int:
        return self.coeffs[0].shape[0]

    def norm(self) -> float:
        return frobenius(np.stack(self.coeffs))

    def hermitian_residual(self) -> float:
        """max_k ||B_k - B_k^H||."""
        return max(frobenius(B - B.conj().T) for B in self.coeffs)

    def evaluate(self, t: float) -> np.ndarray:
        return _horner(self.coeffs, t)

    def is_real(self, tol: float = DEFAULT_TOLERANCES.eps_real) -> Tuple[bool, float]:
        """
        Realness test of all coefficients.

        Args:
            tol (float): Allowed imaginary magnitude relative to the overall coefficient norm.

        Returns:
            Tuple[bool, float]: The flag and the largest absolute imaginary entry.
        """
        max_imag = max(float(np.max(np.abs(B.imag))) for B in self.coeffs)
        return max_imag <= tol * self.norm(), max_imag

    def relative_imag(self) -> float:
        """Largest imaginary entry divided by the coefficient norm (0 for G = 0)."""
        norm = self.norm()
        _, max_imag = self.is_real()
        return max_imag / norm if norm > 0 else 0.0

    def real_coeffs(self) -> Tuple[np.ndarray, ...]:
        return tuple(B.real.copy() for B in self.coeffs)

    def psd_profile(self, t_samples: Optional[Sequence[float]] = None,
                    tol: float = DEFAULT_TOLERANCES.rank_tol,
                    eps_real: float = DEFAULT_TOLERANCES.eps_real) -> PsdProfile:
        """
        Sampled PSD diagnostic. This is evidence, not a certificate.

        Args:
            t_samples (Optional[Sequence[float]]): Evaluation points; defaults to :func:`chebyshev_grid`.
            tol (float): Relative rank threshold.
            eps_real (float): Realness tolerance checked first.

        Returns:
            PsdProfile: Smallest sampled eigenvalue, largest sampled rank and the rank of G(0).

        Raises:
            NotReal: If the Gramian fails the realness check.
        """
        real, max_imag = self.is_real(eps_real)
        if not real:
            raise NotReal(f"Gramian is not real: max imaginary entry {max_imag:.3e}")

        samples = chebyshev_grid() if t_samples is None else np.asarray(t_samples, dtype=float)
        real_coeffs = self.real_coeffs()
        min_eig = np.inf
        max_rank = 0
        for t in samples:
            G_t = _horner(real_coeffs, float(t))
            G_t = 0.5 * (G_t + G_t.T)
            min_eig = min(min_eig, float(np.linalg.eigvalsh(G_t)[0]))
            max_rank = max(max_rank, rank(G_t, tol))
        return PsdProfile(min_eig=min_eig,
                          max_rank=max_rank,
                          rank_at_0=rank(real_coeffs[0], tol))
