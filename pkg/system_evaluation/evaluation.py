"""
Acceptance sweep
================

Seeded sweeps over the grid d in {1,2,3}, P in {1,2,3}, N in {d..6}:

- realness:    relative imaginary magnitude of gram(to_factor(h))
- round trip:  recover_hrep(canonicalize_factor(to_factor(h))) vs canonicalize_hrep(h)
- classifier:  W = 0 samples are RealFactorable, clearly complex samples are ComplexOnly
- nullity:     every block-Toeplitz constraint matrix has nullity >= d
- skew:        two solutions of X^T A - A^T X = C differ by W A with W symmetric
- degenerate:  W_1..W_P = 0 gives recovered W_{P+1}..W_{2P} = 0

Trial i uses grid triple i mod |grid| and seed + i. The report (worst residuals,
pass counts, timings) is printed and written as JSON. Without --trials each
sweep runs its own default count (DEFAULT_TRIALS).

Usage:
------
    python -m system_evaluation.evaluation --out evaluation.json
"""

import argparse
import json
import logging
import time
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import tqdm

from common.config import Config, DEFAULT_TOLERANCES, Tolerances
from common.exceptions import PolygramError
from common.logging_setup import configure_logging
from factor import (
    Verdict,
    canonicalize_factor,
    classify,
    gram_distance,
    recover_hrep,
    skew_offset_symmetric,
    solve_skew_particular,
)
from hrep import assemble_toeplitz, canonicalize_hrep, hrep_distance, sample, to_factor
from numeric import frobenius, rank, right_pinv

logger = logging.getLogger(__name__)

REALNESS_BOUND = 1e-9
ROUND_TRIP_BOUND = 1e-7
REAL_W_BOUND = 1e-9
COMPLEX_W_FLOOR = 1e-3
SKEW_BOUND = 1e-9
DEGENERATE_BOUND = 1e-9
MISS = 1.0

DEFAULT_TRIALS = {
    "realness": 1000,
    "round_trip": 500,
    "classifier": 200,
    "nullity": 200,
    "skew": 1000,
    "degenerate": 100,
}


def grid() -> List[Tuple[int, int, int]]:
    """(d, N, P) triples of the acceptance grid."""
    return [(d, N, P) for d in (1, 2, 3) for P in (1, 2, 3) for N in range(d, 7)]


def _sweep(name: str, n: int, seed: int, trial: Callable[[int, int, int, int], Optional[float]],
           bound: float) -> Dict:
    """
    Runs ``trial(d, N, P, seed)`` n times. A trial returns its residual, or None
    when it does not apply to the sampled point.
    """
    triples = grid()
    worst = 0.0
    passed = failed = skipped = 0
    errors: Dict[str, int] = {}
    times = []

    for i in tqdm.tqdm(range(n), desc=name):
        d, N, P = triples[i % len(triples)]
        start = time.time()
        try:
            residual = trial(d, N, P, seed + i)
        except PolygramError as e:
            errors[type(e).__name__] = errors.get(type(e).__name__, 0) + 1
            logger.warning(f"{name}: d={d} N={N} P={P} seed={seed + i}: {type(e).__name__}: {e}")
            failed += 1
            continue
        finally:
            times.append(time.time() - start)

        if residual is None:
            skipped += 1
        elif residual <= bound:
            passed += 1
            worst = max(worst, residual)
        else:
            failed += 1
            worst = max(worst, residual)

    return {
        "trials": n,
        "passed": passed,
        "failed": failed,
        "skipped": skipped,
        "worst_residual": worst,
        "bound": bound,
        "errors": dict(sorted(errors.items())),
        "total_time": round(sum(times), 3),
        "average_time": round(sum(times) / len(times), 6) if times else 0.0,
    }


def evaluate_realness(n: int, seed: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    def trial(d, N, P, s):
        h = sample(d, N, P, seed=s, tolerances=tolerances)
        return to_factor(h, tolerances).gram().relative_imag()

    return _sweep("Realness", n, seed, trial, REALNESS_BOUND)


def evaluate_round_trip(n: int, seed: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    def trial(d, N, P, s):
        h = sample(d, N, P, seed=s, tolerances=tolerances)
        recovered = recover_hrep(canonicalize_factor(to_factor(h, tolerances), tolerances), tolerances)
        return hrep_distance(recovered, canonicalize_hrep(h, tolerances))

    return _sweep("Round trip", n, seed, trial, ROUND_TRIP_BOUND)


def evaluate_classifier(n: int, seed: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    """
    Two sweeps: W = 0 samples must be RealFactorable with w_norm <= 1e-9 and a
    real factor reproducing the Gramian; samples whose canonical W norm exceeds
    1e-3 must be ComplexOnly (others are skipped).
    """
    def real_trial(d, N, P, s):
        X = to_factor(sample(d, N, P, seed=s, scale=0.0, tolerances=tolerances), tolerances)
        result = classify(X, tolerances)
        if result.verdict is not Verdict.REAL_FACTORABLE:
            return MISS
        return max(result.w_norm, gram_distance(X, result.real_factor))

    def complex_trial(d, N, P, s):
        h = sample(d, N, P, seed=s, tolerances=tolerances)
        if canonicalize_hrep(h, tolerances).w_norm() <= COMPLEX_W_FLOOR:
            return None
        result = classify(to_factor(h, tolerances), tolerances)
        return 0.0 if result.verdict is Verdict.COMPLEX_ONLY else MISS

    return {
        "real": _sweep("Classifier (real)", n, seed, real_trial, REAL_W_BOUND),
        "complex": _sweep("Classifier (complex)", n, seed, complex_trial, 0.0),
    }


def evaluate_nullity(n: int, seed: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    def trial(d, N, P, s):
        h = sample(d, N, P, seed=s, tolerances=tolerances)
        T = assemble_toeplitz(h)
        nullity = T.shape[1] - rank(T, tolerances.rank_tol)
        return 0.0 if nullity >= d else float(d - nullity)

    return _sweep("Nullity", n, seed, trial, 0.0)


def evaluate_skew(n: int, seed: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    """
    Unfiltered Gaussian A (N = d included): the particular solution and the
    generating X differ by W A, W = offset A^+ symmetric and reproducing the
    offset within 1e-9 relative to the operand norms.
    """
    def trial(d, N, P, s):
        rng = np.random.default_rng(s)
        A = rng.standard_normal((d, N))
        X2 = rng.standard_normal((d, N))
        X1 = solve_skew_particular(A, X2.T @ A - A.T @ X2, tolerances.skew_tol)
        skew_offset_symmetric(A, X1, X2, tolerances.skew_tol)

        offset = X1 - X2
        W = offset @ right_pinv(A, tolerances.rank_tol)
        asymmetry = frobenius(W - W.T) / (frobenius(W) + 1.0)
        reconstruction = frobenius(W @ A - offset) / (frobenius(W) * frobenius(A) + frobenius(offset) + 1.0)
        return max(asymmetry, reconstruction)

    return _sweep("Skew offset", n, seed, trial, SKEW_BOUND)


def evaluate_degenerate_stratum(n: int, seed: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Dict:
    """
    W = 0 samples rotated by a random unitary: every recovered block, the
    upper W_{P+1}..W_{2P} included, vanishes within 1e-9 relative to 1 + ||R||.
    """
    def trial(d, N, P, s):
        rng = np.random.default_rng([s, 1])
        U, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        h = sample(d, N, P, seed=s, scale=0.0, tolerances=tolerances)
        X = to_factor(h, tolerances).left_multiply(U)
        recovered = recover_hrep(canonicalize_factor(X, tolerances), tolerances)
        return recovered.w_norm() / (1.0 + recovered.r_norm())

    return _sweep("Degenerate stratum", n, seed, trial, DEGENERATE_BOUND)


def _all_passed(report: Dict) -> bool:
    if "failed" in report:
        return report["failed"] == 0
    return all(_all_passed(part) for part in report.values())


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Acceptance sweep over the (d, N, P) grid")
    parser.add_argument("--trials", type=int, default=None, help="trials per sweep (default DEFAULT_TRIALS)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="evaluation.json")
    args = parser.parse_args(argv)

    config = Config()
    configure_logging(config.log_level, config.log_file)
    tolerances = config.tolerances()

    sweeps = {
        "realness": evaluate_realness,
        "round_trip": evaluate_round_trip,
        "classifier": evaluate_classifier,
        "nullity": evaluate_nullity,
        "skew": evaluate_skew,
        "degenerate": evaluate_degenerate_stratum,
    }
    result = {name: sweep(args.trials or DEFAULT_TRIALS[name], args.seed, tolerances)
              for name, sweep in sweeps.items()}

    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(result, f, indent=2, ensure_ascii=False)

    print(json.dumps(result, indent=2, ensure_ascii=False))
    ok = _all_passed(result)
    logger.info(f"Acceptance sweep {'passed' if ok else 'FAILED'}; report written to {args.out}")
    return 0 if ok else 3


if __name__ == "__main__":
    raise SystemExit(main())
