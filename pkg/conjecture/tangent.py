"""
Local dimension estimates
=========================

At a canonical point h of the representation set, the gauge-fixed tangent
space is the kernel of the linearized constraints

    T(dW) R + T(W) dR = 0                   (block-Toeplitz constraint)
    offdiag(R_0 dR_0^T + dR_0 R_0^T) = 0    (rows of R_0 stay orthogonal)

and, for the real stratum, dW = 0. The rank of the differential of
h -> coefficients of gram(to_factor(h)) restricted to that space is estimated
by central finite differences at two step sizes.

Parameter vector layout: every W_k through the orthonormal symmetric basis
{E_ii} and {(E_ij + E_ji) / sqrt(2), i < j}, then every R_p row-major.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from common.config import DEFAULT_TOLERANCES, Tolerances
from common.exceptions import InvalidHRep, StepTooLarge, StepTooSmall
from hrep.h_representation import HRep, mix_coefficients, stack_r, toeplitz_from_blocks, validate
from numeric.linalg import frobenius, nullspace, rank

logger = logging.getLogger(__name__)

STRATUM_FULL = "full"
STRATUM_REAL = "real"


def expected_chart_dim_complex(d: int, N: int, P: int) -> int:
    """Parameter count minus constraints minus gauge: Pd(d+1) + dN - d(d-1)/2."""
    return P * d * (d + 1) + d * N - d * (d - 1) // 2


def expected_image_rank_real(d: int, N: int, P: int) -> int:
    """Real-factor parameter count modulo the orthogonal gauge: (P+1)dN - d(d-1)/2."""
    return (P + 1) * d * N - d * (d - 1) // 2


def ambient_dim(N: int, P: int) -> int:
    """Number of independent real Gramian coefficients: N(N+1)/2 * (2P+1)."""
    return N * (N + 1) // 2 * (2 * P + 1)


class ParameterLayout:
    """Packs (W, R) into the flattened parameter vector and back."""

    def __init__(self, d: int, N: int, P: int):
        self.d = d
        self.N = N
        self.P = P
        self.__pairs = [(i, j) for i in range(d) for j in range(i, d)]
        self.n_sym = len(self.__pairs)
        self.n_w = 2 * P * self.n_sym
        self.n_r = (P + 1) * d * N
        self.size = self.n_w + self.n_r

    def pack(self, W, R) -> np.ndarray:
        theta = np.empty(self.size)
        for k, w in enumerate(W):
            for s, (i, j) in enumerate(self.__pairs):
                theta[k * self.n_sym + s] = w[i, i] if i == j else np.sqrt(2.0) * w[i, j]
        theta[self.n_w:] = stack_r(R).ravel()
        return theta

    def unpack(self, theta: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
        W = []
        for k in range(2 * self.P):
            w = np.zeros((self.d, self.d))
            for s, (i, j) in enumerate(self.__pairs):
                value = theta[k * self.n_sym + s]
                if i == j:
                    w[i, i] = value
                else:
                    w[i, j] = w[j, i] = value / np.sqrt(2.0)
            W.append(w)
        R_stack = theta[self.n_w:].reshape((self.P + 1) * self.d, self.N)
        return W, np.split(R_stack, self.P + 1, axis=0)

    def pack_hrep(self, h: HRep) -> np.ndarray:
        return self.pack(h.W, h.R)


def linearized_constraints(h: HRep, stratum: str = STRATUM_FULL) -> np.ndarray:
    """
    Rows of the linear system whose kernel is the gauge-fixed tangent space.

    Returns:
        np.ndarray: (constraints + gauge [+ dW = 0]) x parameter-count matrix.
    """
    layout = ParameterLayout(h.d, h.N, h.P)
    T = toeplitz_from_blocks(h.W, h.d, h.P)
    R = stack_r(h.R)
    R0 = h.R[0]
    upper = [(i, j) for i in range(h.d) for j in range(i + 1, h.d)]

    columns = []
    for index in range(layout.size):
        unit = np.zeros(layout.size)
        unit[index] = 1.0
        dW, dR = layout.unpack(unit)
        constraint = toeplitz_from_blocks(dW, h.d, h.P) @ R + T @ stack_r(dR)
        gauge_matrix = R0 @ dR[0].T + dR[0] @ R0.T
        gauge = np.array([gauge_matrix[i, j] for i, j in upper])
        columns.append(np.concatenate([constraint.ravel(), gauge]))
    system = np.array(columns).T

    if stratum == STRATUM_REAL:
        fix_w = np.eye(layout.size)[:layout.n_w]
        system = np.vstack([system, fix_w])
    elif stratum != STRATUM_FULL:
        raise ValueError(f"Unknown stratum {stratum!r}")
    return system


def tangent_basis(h: HRep, stratum: str = STRATUM_FULL,
                  tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Orthonormal basis of the gauge-fixed tangent space at a canonical point.

    Args:
        h (HRep): Canonical, valid representation.
        stratum (str): ``"full"`` for the representation set, ``"real"`` to also impose dW = 0.
        tolerances (Tolerances): ``rank_tol`` decides the kernel.

    Returns:
        np.ndarray: parameter-count x k basis, columns orthonormal.

    Raises:
        InvalidHRep: If h is not valid or not canonical.
    """
    report = validate(h, tolerances)
    if not (report.passed and h.canonical):
        raise InvalidHRep(f"Tangent space needs a valid canonical point: {report.summary()}, canonical={h.canonical}")

    system = linearized_constraints(h, stratum)
    basis = nullspace(system, tolerances.rank_tol)

    if basis.size:
        residual = frobenius(system @ basis) / (frobenius(system) + 1.0)
        logger.debug(f"Tangent basis: dim={basis.shape[1]}, residual={residual:.3e}")
    return basis


def gram_coefficient_vector(layout: ParameterLayout, theta: np.ndarray) -> np.ndarray:
    """Upper triangles of Re(B_k), k = 0..2P, of the factor mixed from theta."""
    W, R = layout.unpack(theta)
    gram = mix_coefficients(W, R).gram()
    rows, cols = np.triu_indices(layout.N)
    return np.concatenate([B.real[rows, cols] for B in gram.coeffs])


def fd_jacobian(h: HRep, basis: np.ndarray, step: float) -> np.ndarray:
    """
    Central-difference Jacobian of the Gramian-coefficient map along the basis.
    ``step`` is absolute; points off the variety are evaluated directly.
    """
    layout = ParameterLayout(h.d, h.N, h.P)
    theta = layout.pack_hrep(h)
    columns = [(gram_coefficient_vector(layout, theta + step * b) -
                gram_coefficient_vector(layout, theta - step * b)) / (2.0 * step)
               for b in basis.T]
    if not columns:
        return np.zeros((ambient_dim(h.N, h.P), 0))
    return np.array(columns).T


@dataclass(frozen=True)
class RankReport:
    rank_full_step: int
    rank_half_step: int
    top_singular_value: float
    step: float

    @property
    def stable(self) -> bool:
        return self.rank_full_step == self.rank_half_step


def gram_map_rank_report(h: HRep, basis: np.ndarray, fd_step: float = DEFAULT_TOLERANCES.fd_step,
                         rank_tol: float = DEFAULT_TOLERANCES.jacobian_rank_tol) -> RankReport:
    """Jacobian ranks at fd_step and fd_step / 2 (steps relative to max(1, ||theta||))."""
    layout = ParameterLayout(h.d, h.N, h.P)
    step = fd_step * max(1.0, frobenius(layout.pack_hrep(h)))
    J_full = fd_jacobian(h, basis, step)
    J_half = fd_jacobian(h, basis, step / 2.0)
    top = float(np.linalg.norm(J_full, 2)) if J_full.size else 0.0
    return RankReport(rank_full_step=rank(J_full, rank_tol),
                      rank_half_step=rank(J_half, rank_tol),
                      top_singular_value=top,
                      step=step)


def gram_map_rank(h: HRep, basis: np.ndarray, fd_step: float = DEFAULT_TOLERANCES.fd_step,
                  rank_tol: float = DEFAULT_TOLERANCES.jacobian_rank_tol) -> int:
    """
    Rank of the differential of the Gramian-coefficient map on the tangent space.

    Raises:
        StepTooLarge: The rank at fd_step exceeds the rank at fd_step / 2.
        StepTooSmall: The rank at fd_step / 2 exceeds the rank at fd_step.
    """
    report = gram_map_rank_report(h, basis, fd_step, rank_tol)
    if report.rank_full_step > report.rank_half_step:
        raise StepTooLarge(f"Jacobian rank {report.rank_full_step} at step {report.step:.2e} but "
                           f"{report.rank_half_step} at half step", report.rank_full_step, report.rank_half_step)
    if report.rank_half_step > report.rank_full_step:
        raise StepTooSmall(f"Jacobian rank {report.rank_half_step} at half step but "
                           f"{report.rank_full_step} at step {report.step:.2e}",
                           report.rank_full_step, report.rank_half_step)
    return report.rank_full_step
