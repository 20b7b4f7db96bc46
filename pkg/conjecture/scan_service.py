"""
ScanService
===========

Monte Carlo dimension scan over a grid of (d, N, P) triples.

For every triple and every trial seed the service samples two points of the
representation set with the same seed: a complex-stratum point (W drawn with
the configured scale) and a real-stratum point (W = 0). It then measures

- chart_dim_C / image_rank_C: tangent dimension of the full stratum and rank of
  the Gramian-coefficient map on it,
- chart_dim_R / image_rank_R: the same with dW = 0 imposed,

and aggregates the per-trial rank tuples into their mode. The margin
image_rank_R - image_rank_C is positive when the real-factorable Gramians fill
more dimensions than the complex-only ones.

A complex-stratum point whose factor has ||Im A|| / ||A|| <= sqrt(rank_tol) is
still counted but flagged ``near_real_point``: its image rank sits at the rank
threshold and may drop.

Trials are independent functions of their seed, so the scan can fan out to
worker processes without changing a single output byte.
"""

import logging
from collections import Counter
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator
from tqdm import tqdm
from tqdm.contrib.concurrent import process_map

from common.config import DEFAULT_TOLERANCES, Tolerances
from common.exceptions import PolygramError
from numeric.linalg import frobenius
from conjecture.tangent import (
    STRATUM_FULL,
    STRATUM_REAL,
    ambient_dim,
    expected_chart_dim_complex,
    expected_image_rank_real,
    gram_map_rank,
    tangent_basis,
)
from hrep.h_representation import HRep, canonicalize_hrep, mix_coefficients
from hrep.sampler import sample

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["d", "P", "N", "trials", "chart_dim_C", "image_rank_C",
               "chart_dim_R", "image_rank_R", "margin", "agreement", "flags"]
NO_TRIAL_COMPLETED = "no_trial_completed"
IMAGE_EXCEEDS_CHART = "image_exceeds_chart"
IMAGE_EXCEEDS_AMBIENT = "image_exceeds_ambient"
NEAR_REAL_POINT = "near_real_point"


class ScanConfig(BaseModel):
    """
    Validated scan parameters. ``grid`` holds (d, N, P) triples.
    """
    model_config = ConfigDict(frozen=True)

    grid: List[Tuple[int, int, int]]
    trials: int = Field(8, ge=1)
    seed: int = 0
    fd_step: float = Field(DEFAULT_TOLERANCES.fd_step, gt=0)
    rank_tol: float = Field(DEFAULT_TOLERANCES.jacobian_rank_tol, gt=0)
    scale: float = Field(1.0, ge=0)
    workers: int = Field(1, ge=1)

    @field_validator("grid")
    @classmethod
    def check_grid(cls, grid):
        if not grid:
            raise ValueError("Scan grid is empty")
        for d, N, P in grid:
            if not (N >= d >= 1 and P >= 1):
                raise ValueError(f"Invalid grid triple (d={d}, N={N}, P={P}): need N >= d >= 1 and P >= 1")
        return list(dict.fromkeys(tuple(triple) for triple in grid))

    @classmethod
    def from_lists(cls, d_values: Sequence[int], P_values: Sequence[int], N_values: Sequence[int],
                   **kwargs) -> "ScanConfig":
        """Cartesian product of the value lists, keeping only triples with N >= d."""
        grid = [(d, N, P) for d, P, N in product(d_values, P_values, N_values) if N >= d]
        return cls(grid=grid, **kwargs)


class ScanRow(BaseModel):
    d: int
    P: int
    N: int
    trials: int
    chart_dim_C: int
    image_rank_C: int
    chart_dim_R: int
    image_rank_R: int
    margin: int
    agreement: int
    flags: str = ""


class TrialOutcome(BaseModel):
    """
    Ranks (chart_C, image_C, chart_R, image_R) of one trial, or the name of the
    failure. ``flags`` names conditions that make completed ranks suspect.
    """
    ranks: Optional[Tuple[int, int, int, int]] = None
    failure: Optional[str] = None
    flags: Tuple[str, ...] = ()


def _stratum_ranks(h: HRep, stratum: str, fd_step: float, rank_tol: float,
                   tolerances: Tolerances) -> Tuple[int, int]:
    basis = tangent_basis(h, stratum, tolerances)
    return basis.shape[1], gram_map_rank(h, basis, fd_step, rank_tol)


def imaginary_fraction(h: HRep) -> float:
    """||Im A|| / ||A|| of the factor generated by h."""
    stacked = mix_coefficients(h.W, h.R).stacked()
    return frobenius(stacked.imag) / frobenius(stacked)


def run_trial(task: Tuple[int, int, int, int, float, float, float, Tolerances]) -> TrialOutcome:
    """
    One trial of one grid triple. Module-level so worker processes can pickle it.

    Args:
        task: (d, N, P, seed, scale, fd_step, rank_tol, tolerances).

    Returns:
        TrialOutcome: The rank tuple, or the exception class name when a
        toolkit error interrupted the trial.
    """
    d, N, P, seed, scale, fd_step, rank_tol, tolerances = task
    try:
        complex_point = canonicalize_hrep(sample(d, N, P, seed=seed, scale=scale, tolerances=tolerances), tolerances)
        chart_c, image_c = _stratum_ranks(complex_point, STRATUM_FULL, fd_step, rank_tol, tolerances)
        real_point = canonicalize_hrep(sample(d, N, P, seed=seed, scale=0.0, tolerances=tolerances), tolerances)
        chart_r, image_r = _stratum_ranks(real_point, STRATUM_REAL, fd_step, rank_tol, tolerances)
    except PolygramError as exc:
        logger.warning(f"Trial (d={d}, N={N}, P={P}, seed={seed}) failed: {type(exc).__name__}: {exc}")
        return TrialOutcome(failure=type(exc).__name__)

    # image-rank singular values scale with the square of the imaginary part
    flags = (NEAR_REAL_POINT,) if imaginary_fraction(complex_point) <= np.sqrt(rank_tol) else ()
    return TrialOutcome(ranks=(chart_c, image_c, chart_r, image_r), flags=flags)


def _format_flags(flags: Counter) -> str:
    return ";".join(f"{name}={count}" for name, count in sorted(flags.items()))


def aggregate(d: int, N: int, P: int, trials: int, outcomes: Sequence[TrialOutcome]) -> ScanRow:
    """
    Modal rank tuple over the completed trials (ties go to the smallest tuple),
    with failures, trial flags and violated rank bounds counted in ``flags``.
    """
    flags = Counter(o.failure for o in outcomes if o.failure is not None)
    flags.update(flag for o in outcomes for flag in o.flags)
    completed = Counter(o.ranks for o in outcomes if o.ranks is not None)
    if not completed:
        flags[NO_TRIAL_COMPLETED] += 1
        return ScanRow(d=d, P=P, N=N, trials=trials, chart_dim_C=-1, image_rank_C=-1, chart_dim_R=-1,
                       image_rank_R=-1, margin=-1, agreement=0, flags=_format_flags(flags))

    top = max(completed.values())
    modal = min(ranks for ranks, count in completed.items() if count == top)
    chart_c, image_c, chart_r, image_r = modal

    for ranks, count in completed.items():
        if ranks[1] > ranks[0] or ranks[3] > ranks[2]:
            flags[IMAGE_EXCEEDS_CHART] += count
        if max(ranks[1], ranks[3]) > ambient_dim(N, P):
            flags[IMAGE_EXCEEDS_AMBIENT] += count

    return ScanRow(d=d, P=P, N=N, trials=trials, chart_dim_C=chart_c, image_rank_C=image_c,
                   chart_dim_R=chart_r, image_rank_R=image_r, margin=image_r - image_c,
                   agreement=top, flags=_format_flags(flags))


class ScanService:
    """
    Runs the dimension scan described by a ScanConfig and renders the result
    as a DataFrame or CSV.
    """

    def __init__(self, config: ScanConfig, tolerances: Tolerances = DEFAULT_TOLERANCES):
        self.__config = config
        self.__tolerances = tolerances
        self.__rows: Optional[List[ScanRow]] = None

    def __tasks(self) -> List[Tuple]:
        cfg = self.__config
        return [(d, N, P, cfg.seed + trial, cfg.scale, cfg.fd_step, cfg.rank_tol, self.__tolerances)
                for d, N, P in cfg.grid for trial in range(cfg.trials)]

    def __execute(self, tasks: List[Tuple]) -> List[TrialOutcome]:
        workers = self.__config.workers
        if workers > 1:
            return process_map(run_trial, tasks, max_workers=workers, chunksize=1,
                               desc="Scanning", disable=None)
        return [run_trial(task) for task in tqdm(tasks, desc="Scanning", disable=None)]

    def run(self) -> List[ScanRow]:
        """
        Executes every trial and aggregates one row per grid triple.

        Returns:
            List[ScanRow]: Rows sorted by (d, P, N).
        """
        cfg = self.__config
        tasks = self.__tasks()
        logger.info(f"Scanning {len(cfg.grid)} triples x {cfg.trials} trials with {cfg.workers} worker(s)")
        outcomes = self.__execute(tasks)

        by_triple: Dict[Tuple[int, int, int], List[TrialOutcome]] = {}
        for task, outcome in zip(tasks, outcomes):
            by_triple.setdefault(task[:3], []).append(outcome)

        rows = [aggregate(d, N, P, cfg.trials, by_triple[(d, N, P)]) for d, N, P in cfg.grid]
        rows.sort(key=lambda row: (row.d, row.P, row.N))
        for row in rows:
            logger.info(f"d={row.d} P={row.P} N={row.N}: margin={row.margin} "
                        f"agreement={row.agreement}/{row.trials} {row.flags}")
        self.__rows = rows
        return rows

    @property
    def rows(self) -> List[ScanRow]:
        if self.__rows is None:
            return self.run()
        return self.__rows

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.rows], columns=CSV_COLUMNS)

    def margin_table(self) -> pd.DataFrame:
        """The scan rows next to the closed-form counts they are compared with."""
        frame = self.to_frame()[["d", "P", "N", "chart_dim_C", "image_rank_C", "image_rank_R", "margin", "agreement"]]
        frame = frame.copy()
        frame["expected_chart_dim_C"] = [expected_chart_dim_complex(d, N, P)
                                         for d, N, P in zip(frame["d"], frame["N"], frame["P"])]
        frame["expected_image_rank_R"] = [expected_image_rank_real(d, N, P)
                                          for d, N, P in zip(frame["d"], frame["N"], frame["P"])]
        return frame

    def write_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator="\n")
        logger.info(f"Scan written to {path}")

    def any_completed(self) -> bool:
        return any(row.agreement > 0 for row in self.rows)


def scan(config: ScanConfig, tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[ScanRow]:
    """Functional entry point: ScanService(config, tolerances).run()."""
    return ScanService(config, tolerances).run()
