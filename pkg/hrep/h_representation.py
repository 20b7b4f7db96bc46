"""
H-representation
================

A real polynomial Gramian of rank d with a degree-P spectral factor is encoded
by 2P symmetric d x d matrices W_1..W_2P and P + 1 real d x N matrices
R_0..R_P such that

    block-Toeplitz(W) @ (R_0; ...; R_P) = 0,   block (p, q) = W_{P+p-q},
    p = 1..P, q = 0..P

and the factor coefficients are obtained with the unit lower-triangular mixer

    A_p = R_p + i * sum_{j=1..p} W_j R_{p-j}.

Index convention: ``HRep.W[k - 1]`` holds W_k (k is 1-based everywhere in the
docs, 0-based only in Python indexing).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from common.config import DEFAULT_TOLERANCES, Tolerances
from common.exceptions import DegenerateSpectrum, DimensionError, InvalidHRep, RankDeficient
from numeric.linalg import fix_row_signs, frobenius, in_canonical_set, rank, sym_eig
from polymat.poly_matrix import PolyMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HRep:
    """
    A point (W, R) of the representation set.

    Attributes:
        d (int): Rank of the Gramian / number of factor rows.
        N (int): Size of the Gramian.
        P (int): Degree of the factor.
        W (Tuple[np.ndarray, ...]): 2P real d x d matrices, W[k-1] = W_k.
        R (Tuple[np.ndarray, ...]): P + 1 real d x N matrices, R[p] = R_p.
        canonical (bool): Whether R_0 is claimed to be in the canonical set.
        seed (Optional[int]): Sampler seed, when the point was sampled.
    """
    d: int
    N: int
    P: int
    W: Tuple[np.ndarray, ...]
    R: Tuple[np.ndarray, ...]
    canonical: bool = False
    seed: Optional[int] = None

    def __post_init__(self):
        if self.d < 1 or self.N < 1 or self.P < 0:
            raise DimensionError(f"Invalid sizes d={self.d}, N={self.N}, P={self.P}")
        W = tuple(np.array(w, dtype=float, ndmin=2) for w in self.W)
        R = tuple(np.array(r, dtype=float, ndmin=2) for r in self.R)
        if len(W) != 2 * self.P:
            raise DimensionError(f"Expected {2 * self.P} W blocks, got {len(W)}")
        if len(R) != self.P + 1:
            raise DimensionError(f"Expected {self.P + 1} R blocks, got {len(R)}")
        for k, w in enumerate(W, start=1):
            if w.shape != (self.d, self.d):
                raise DimensionError(f"W_{k} has shape {w.shape}, expected {(self.d, self.d)}")
        for p, r in enumerate(R):
            if r.shape != (self.d, self.N):
                raise DimensionError(f"R_{p} has shape {r.shape}, expected {(self.d, self.N)}")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "R", R)

    def w(self, k: int) -> np.ndarray:
        """W_k with the 1-based index used in the docs."""
        return self.W[k - 1]

    def w_norm(self) -> float:
        """max_k ||W_k|| (0 for P = 0)."""
        return max((frobenius(w) for w in self.W), default=0.0)

    def r_norm(self) -> float:
        return frobenius(stack_r(self.R))

    def with_blocks(self, W: Sequence[np.ndarray], R: Sequence[np.ndarray], canonical: bool) -> "HRep":
        return HRep(self.d, self.N, self.P, tuple(W), tuple(R), canonical=canonical, seed=self.seed)


def stack_r(R: Sequence[np.ndarray]) -> np.ndarray:
    """(R_0; ...; R_P) as a (P+1)d x N matrix."""
    return np.vstack(R)


def toeplitz_from_blocks(W: Sequence[np.ndarray], d: int, P: int) -> np.ndarray:
    """
    Block-Toeplitz constraint matrix of shape Pd x (P+1)d.

    Block row p (1..P) reads W_{P+p}, W_{P+p-1}, ..., W_p.
    """
    T = np.zeros((P * d, (P + 1) * d), dtype=float)
    for p in range(1, P + 1):
        for q in range(P + 1):
            T[(p - 1) * d:p * d, q * d:(q + 1) * d] = W[P + p - q - 1]
    return T


def mixer_from_blocks(W: Sequence[np.ndarray], d: int, P: int) -> np.ndarray:
    """
    Unit block lower-triangular (P+1)d x (P+1)d complex matrix whose block
    (p, q), p > q, is i * W_{p-q}.
    """
    M = np.eye((P + 1) * d, dtype=complex)
    for p in range(1, P + 1):
        for q in range(p):
            M[p * d:(p + 1) * d, q * d:(q + 1) * d] = 1j * W[p - q - 1]
    return M


def assemble_toeplitz(h: HRep) -> np.ndarray:
    return toeplitz_from_blocks(h.W, h.d, h.P)


def assemble_mixer(h: HRep) -> np.ndarray:
    return mixer_from_blocks(h.W, h.d, h.P)


def mix_coefficients(W: Sequence[np.ndarray], R: Sequence[np.ndarray]) -> PolyMatrix:
    """
    Factor coefficients mixer(W) @ stack(R) without checking symmetry or WR = 0.
    Used off the variety by finite differences.
    """
    P = len(R) - 1
    d = R[0].shape[0]
    stacked = mixer_from_blocks(W, d, P) @ stack_r(R)
    return PolyMatrix.from_stack(stacked, P)


@dataclass
class HRepReport:
    """Residuals of every defining condition of the representation set."""
    symmetry_residuals: List[float] = field(default_factory=list)
    symmetry_ok: bool = True
    constraint_residual: float = 0.0
    constraint_bound: float = 0.0
    rank_r0: int = 0
    rank_ok: bool = True
    in_canonical_set: bool = False
    canonical_ok: bool = True

    @property
    def constraint_ok(self) -> bool:
        return self.constraint_residual <= self.constraint_bound

    @property
    def passed(self) -> bool:
        return self.symmetry_ok and self.constraint_ok and self.rank_ok and self.canonical_ok

    def summary(self) -> str:
        worst_symmetry = max(self.symmetry_residuals, default=0.0)
        return (f"symmetry={worst_symmetry:.3e} ({'ok' if self.symmetry_ok else 'FAIL'}), "
                f"||WR||={self.constraint_residual:.3e} <= {self.constraint_bound:.3e} "
                f"({'ok' if self.constraint_ok else 'FAIL'}), "
                f"rank(R_0)={self.rank_r0} ({'ok' if self.rank_ok else 'FAIL'}), "
                f"canonical={'ok' if self.canonical_ok else 'FAIL'}")


def validate(h: HRep, tolerances: Tolerances = DEFAULT_TOLERANCES) -> HRepReport:
    """
    Checks symmetry of every W_k, the block-Toeplitz constraint, rank(R_0) = d
    and, for points flagged canonical, membership of R_0 in the canonical set.
    Never raises; callers decide what a failing report means.
    """
    report = HRepReport()
    for w in h.W:
        residual = frobenius(w - w.T)
        report.symmetry_residuals.append(residual)
        if residual > tolerances.eps_sym * frobenius(w):
            report.symmetry_ok = False

    T = assemble_toeplitz(h)
    R = stack_r(h.R)
    report.constraint_residual = frobenius(T @ R)
    report.constraint_bound = tolerances.eps_cons * (frobenius(T) * frobenius(R) + 1.0)

    report.rank_r0 = rank(h.R[0], tolerances.rank_tol)
    report.rank_ok = report.rank_r0 == h.d

    report.in_canonical_set = in_canonical_set(h.R[0], tolerances.eps_orth, tolerances.rank_tol)
    report.canonical_ok = report.in_canonical_set or not h.canonical
    return report


def to_factor(h: HRep, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PolyMatrix:
    """
    Spectral factor of the Gramian represented by ``h``.

    Returns:
        PolyMatrix: Coefficients A_p = R_p + i sum_{j=1..p} W_j R_{p-j}.

    Raises:
        InvalidHRep: If a W_k is not symmetric or WR = 0 fails beyond tolerance.
    """
    report = validate(h, tolerances)
    if not (report.symmetry_ok and report.constraint_ok):
        raise InvalidHRep(f"Not a valid H-representation: {report.summary()}")
    return mix_coefficients(h.W, h.R)


def canonicalizing_rotation(R0: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    The real orthogonal U with U R0 in the canonical set: rows of U R0 are the
    eigen-directions of R0 R0^T in descending eigenvalue order, each with a
    positive leading entry.

    Raises:
        RankDeficient: If R0 does not have full row rank.
        DegenerateSpectrum: If two eigenvalues of R0 R0^T are closer than eps_gap (relative).
    """
    R0 = np.asarray(R0, dtype=float)
    d = R0.shape[0]
    if rank(R0, tolerances.rank_tol) < d:
        raise RankDeficient(f"R_0 of shape {R0.shape} is rank deficient")

    eigenvalues, V = sym_eig(R0 @ R0.T, tolerances.eps_sym, tolerances.rank_tol, tolerances.eps_recon)
    gaps = eigenvalues[:-1] - eigenvalues[1:]
    if np.any(gaps <= tolerances.eps_gap * eigenvalues[0]):
        raise DegenerateSpectrum(f"R_0 R_0^T has a repeated eigenvalue (smallest gap {np.min(gaps):.3e}, "
                                 f"top eigenvalue {eigenvalues[0]:.3e}); canonical form is not unique")

    U = V.T
    _, signs = fix_row_signs(U @ R0, tolerances.rank_tol)
    return signs[:, None] * U


def canonicalize_hrep(h: HRep, tolerances: Tolerances = DEFAULT_TOLERANCES) -> HRep:
    """
    Moves ``h`` to its canonical representative: R'_p = U R_p, W'_k = U W_k U^T.
    Then to_factor(h') = U to_factor(h) and both represent the same Gramian.
    """
    U = canonicalizing_rotation(h.R[0], tolerances)
    W = [U @ w @ U.T for w in h.W]
    W = [0.5 * (w + w.T) for w in W]
    R = [U @ r for r in h.R]
    return h.with_blocks(W, R, canonical=True)


def hrep_distance(h1: HRep, h2: HRep) -> float:
    """
    Relative distance between two representations of the same sizes:
    ||(W, R) - (W', R')|| / (||(W', R')|| + 1).
    """
    if (h1.d, h1.N, h1.P) != (h2.d, h2.N, h2.P):
        raise DimensionError(f"Cannot compare sizes {(h1.d, h1.N, h1.P)} and {(h2.d, h2.N, h2.P)}")
    diff = sum(frobenius(a - b) ** 2 for a, b in zip(h1.W + h1.R, h2.W + h2.R)) ** 0.5
    scale = sum(frobenius(b) ** 2 for b in h2.W + h2.R) ** 0.5
    return diff / (scale + 1.0)
