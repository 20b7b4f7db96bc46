"""
Configuration
=============

Numeric tolerances and process-level settings.

Environment Variables (via .env):
---------------------------------
- POLYGRAM_TOL (float): global multiplicative scale applied to every tolerance
- POLYGRAM_LOG_LEVEL (str): logging level name, default INFO
- POLYGRAM_LOG_FILE (str): optional path of a UTF-8 log file
- POLYGRAM_WORKERS (int): default number of scan worker processes
"""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv()

# fd_step is a step length, every other field is a tolerance
_UNSCALED_FIELDS = {"fd_step"}


class Tolerances(BaseModel):
    """
    Default tolerances of every numeric check. All are relative to the norm of
    the quantities involved (Frobenius), never absolute.
    """
    model_config = ConfigDict(frozen=True)

    eps_sym: float = Field(1e-8, gt=0)
    eps_orth: float = Field(1e-10, gt=0)
    eps_recon: float = Field(1e-10, gt=0)
    rank_tol: float = Field(1e-9, gt=0)
    eps_real: float = Field(1e-9, gt=0)
    eps_cons: float = Field(1e-9, gt=0)
    eps_gap: float = Field(1e-8, gt=0)
    eps_unitary: float = Field(1e-8, gt=0)
    eps_recover: float = Field(1e-7, gt=0)
    # propagated rounding error of recovered W blocks, relative to ||A|| + 1
    eps_forward: float = Field(1e-4, gt=0)
    classify_tol: float = Field(1e-7, gt=0)
    skew_tol: float = Field(1e-9, gt=0)
    jacobian_rank_tol: float = Field(1e-6, gt=0)
    fd_step: float = Field(1e-5, gt=0)

    def scaled(self, factor: float) -> "Tolerances":
        """
        Returns a copy with every tolerance multiplied by ``factor``.

        Args:
            factor (float): Positive multiplier; ratios between tolerances are preserved.

        Returns:
            Tolerances: The scaled tolerances.
        """
        if factor <= 0:
            raise ValueError(f"Tolerance scale must be positive, got {factor}")
        update = {name: value * factor
                  for name, value in self.model_dump().items()
                  if name not in _UNSCALED_FIELDS}
        return self.model_copy(update=update)


DEFAULT_TOLERANCES = Tolerances()


class Config:
    """Process configuration loaded from environment variables / a .env file."""

    def __init__(self):
        """
        Reads and validates the POLYGRAM_* variables.

        Raises:
            ValueError: If a variable is set to a value that cannot be parsed.
        """
        self.tol_scale = self.__read_float("POLYGRAM_TOL", 1.0)
        self.log_level = os.getenv("POLYGRAM_LOG_LEVEL", "INFO").upper()
        self.log_file = os.getenv("POLYGRAM_LOG_FILE") or None
        self.workers = int(self.__read_float("POLYGRAM_WORKERS", 1))

        if self.tol_scale <= 0:
            raise ValueError("POLYGRAM_TOL must be positive.")
        if self.workers < 1:
            raise ValueError("POLYGRAM_WORKERS must be at least 1.")

    @staticmethod
    def __read_float(name: str, default: float) -> float:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return default
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"Environment variable {name}={raw!r} is not a number.") from None

    def tolerances(self, cli_scale: Optional[float] = None) -> Tolerances:
        """
        Builds the tolerance set for this run. A ``--tol`` value given on the
        command line wins over POLYGRAM_TOL.

        Args:
            cli_scale (Optional[float]): Scale passed on the command line, if any.

        Returns:
            Tolerances: Defaults scaled multiplicatively.
        """
        scale = cli_scale if cli_scale is not None else self.tol_scale
        return DEFAULT_TOLERANCES.scaled(scale)
