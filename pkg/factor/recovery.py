"""
Factor -> (W, R) recovery
=========================

Solves for W_1..W_2P one block at a time. With R_p = Re(A_p), Q_p = Im(A_p) and R_0^+ the right inverse of R_0:

    W_p     = (Q_p - sum_{i=1}^{p-1} W_i R_{p-i}) R_0^+          p = 1..P
    W_{P+p} = -(sum_{i=1}^{P} W_{P+p-i} R_i) R_0^+               p = 1..P

Every step checks that the solved W is symmetric and that it reproduces its
equation. A failing step means the factor's Gramian is not real.

W_{P+1}..W_{2P} never enter the factor, so a wrong upper block still satisfies
every equation above. Each step therefore also propagates a first-order bound
on the rounding error of the blocks solved so far; it depends on R, Q and
||R_0^+|| only and must stay below eps_forward * (||A|| + 1).
"""

import logging
from typing import Dict, List, Tuple

import numpy as np
import scipy.linalg

from common.config import DEFAULT_TOLERANCES, Tolerances
from common.exceptions import IllConditioned, NotRepresentable
from factor.canonical import CanonicalFactor
from hrep.h_representation import HRep, mix_coefficients, validate
from numeric.linalg import frobenius, right_pinv

logger = logging.getLogger(__name__)

UNIT_ROUNDOFF = float(np.finfo(float).eps)


def _solve_step(k: int, target: np.ndarray, R0: np.ndarray, R0_pinv: np.ndarray,
                tol: float, residuals: Dict[str, float]) -> np.ndarray:
    """Solves W_k R_0 = target for a symmetric W_k, or raises NotRepresentable."""
    W = target @ R0_pinv
    # ||target|| * ||R_0^+|| bounds ||W|| for every solution, so neither check scales with W
    w_bound = frobenius(target) * frobenius(R0_pinv)
    scale = w_bound * frobenius(R0) + frobenius(target) + 1.0

    asymmetry = frobenius(W - W.T) / (w_bound + 1.0)
    equation = frobenius(W @ R0 - target) / scale
    residuals[f"W_{k}_asymmetry"] = asymmetry
    residuals[f"W_{k}_equation"] = equation

    if asymmetry > tol:
        raise NotRepresentable(f"W_{k} is not symmetric (relative asymmetry {asymmetry:.3e}); "
                               f"the factor does not have a real Gramian")
    if equation > tol:
        raise NotRepresentable(f"W_{k} R_0 cannot reproduce its equation (relative residual {equation:.3e}); "
                               f"the factor does not have a real Gramian")
    return 0.5 * (W + W.T)


class _ErrorBound:
    """Running first-order bound on the absolute error of each recovered W_k."""

    def __init__(self, R: List[np.ndarray], pinv_norm: float, reference: float, limit: float):
        self.__r = [frobenius(r) for r in R]
        self.__pinv_norm = pinv_norm
        self.__reference = reference
        self.__limit = limit
        self.errors: List[float] = []

    def step(self, k: int, magnitude: float, terms: List[Tuple[int, int]]) -> float:
        """
        Error of W_k from rounding ``magnitude`` and from the earlier errors
        entering through W_j R_i for every (j, i) in ``terms``.

        Raises:
            IllConditioned: If the relative bound exceeds the limit.
        """
        propagated = sum(self.errors[j - 1] * self.__r[i] for j, i in terms)
        error = self.__pinv_norm * (UNIT_ROUNDOFF * magnitude + propagated)
        relative = error / self.__reference
        if relative > self.__limit:
            raise IllConditioned(f"Recovering W_{k} would amplify rounding to {relative:.3e} relative "
                                 f"(||R_0^+|| = {self.__pinv_norm:.3e}); R_0 is too close to rank deficiency")
        self.errors.append(error)
        return relative


def recover_hrep_with_residuals(cf: CanonicalFactor,
                                tolerances: Tolerances = DEFAULT_TOLERANCES) -> Tuple[HRep, Dict[str, float]]:
    """
    Same as :func:`recover_hrep`, also returning the per-step residuals.
    """
    X = cf.X
    d, N = X.shape
    P = X.degree
    R = X.real_parts
    Q = X.imag_parts
    tol = tolerances.eps_recover
    residuals: Dict[str, float] = {}

    lead_imag = frobenius(Q[0]) / (frobenius(R[0]) + 1.0)
    residuals["lead_imag"] = lead_imag
    if lead_imag > tol:
        raise NotRepresentable(f"Leading coefficient is not real (relative imaginary part {lead_imag:.3e})")

    R0_pinv = right_pinv(R[0], tolerances.rank_tol)
    pinv_norm = 1.0 / scipy.linalg.svdvals(R[0])[-1]
    bound = _ErrorBound(R, pinv_norm, frobenius(X.stacked()) + 1.0, tolerances.eps_forward)
    W: List[np.ndarray] = []
    forward = 0.0

    for p in range(1, P + 1):
        terms = [(i, p - i) for i in range(1, p)]
        magnitude = frobenius(Q[p]) + sum(frobenius(W[j - 1]) * frobenius(R[i]) for j, i in terms)
        forward = max(forward, bound.step(p, magnitude, terms))
        target = Q[p] - sum((W[j - 1] @ R[i] for j, i in terms), np.zeros((d, N)))
        W.append(_solve_step(p, target, R[0], R0_pinv, tol, residuals))

    for p in range(1, P + 1):
        terms = [(P + p - i, i) for i in range(1, P + 1)]
        magnitude = sum(frobenius(W[j - 1]) * frobenius(R[i]) for j, i in terms)
        forward = max(forward, bound.step(P + p, magnitude, terms))
        coupled = sum((W[j - 1] @ R[i] for j, i in terms), np.zeros((d, N)))
        W.append(_solve_step(P + p, -coupled, R[0], R0_pinv, tol, residuals))
    residuals["forward_error"] = forward

    h = HRep(d, N, P, tuple(W), tuple(R), canonical=True)

    check = tolerances.model_copy(update={"eps_cons": max(tolerances.eps_cons, tol)})
    report = validate(h, check)
    if not report.passed:
        raise NotRepresentable(f"Recovered representation is invalid: {report.summary()}")

    round_trip = frobenius(mix_coefficients(h.W, h.R).stacked() - X.stacked()) / (frobenius(X.stacked()) + 1.0)
    residuals["round_trip"] = round_trip
    residuals["constraint"] = report.constraint_residual
    if round_trip > tol:
        raise NotRepresentable(f"Recovered representation does not reproduce the factor (residual {round_trip:.3e})")

    logger.debug(f"Recovered representation d={d}, N={N}, P={P}, max ||W_k|| = {h.w_norm():.3e}, "
                 f"forward error bound {forward:.2e}")
    return h, residuals


def recover_hrep(cf: CanonicalFactor, tolerances: Tolerances = DEFAULT_TOLERANCES) -> HRep:
    """
    The unique (W, R) that generates a canonical factor.

    Args:
        cf (CanonicalFactor): Output of :func:`factor.canonicalize_factor`.
        tolerances (Tolerances): ``eps_recover`` bounds every step residual,
            ``eps_forward`` the propagated rounding error.

    Returns:
        HRep: Canonical representation with mix_coefficients(W, R) = cf.X.

    Raises:
        NotRepresentable: If a step fails its symmetry or residual check.
        RankDeficient: If R_0 does not have full row rank.
        IllConditioned: If R_0 is too close to rank deficiency for the blocks to be trusted.
    """
    h, _ = recover_hrep_with_residuals(cf, tolerances)
    return h


def factor_offset(h1: HRep, h2: HRep) -> float:
    """||stack(A) - stack(A')|| between the factors generated by two representations."""
    return frobenius(mix_coefficients(h1.W, h1.R).stacked() - mix_coefficients(h2.W, h2.R).stacked())
