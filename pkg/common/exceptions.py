"""
Exception hierarchy
===================

Every failure raised by the toolkit derives from ``PolygramError``. Each class
carries the process exit code the command-line surface maps it to, so the
numeric layers never need to know about the CLI and the CLI never needs a
lookup table.

Exit codes:
-----------
- 1: usage or artifact parse errors
- 2: sampling failure
- 3: invalid H-representation / failed validation
- 4: Gramian is not real
- 5: rank, spectrum, symmetry or structure failures
- 6: infeasible skew equation
- 7: factor not representable
"""


class PolygramError(Exception):
    """Base class for all toolkit errors."""
    exit_code = 1


class DimensionError(PolygramError, ValueError):
    """Sizes (d, N, P) or matrix shapes are inconsistent."""
    exit_code = 1


class ArtifactError(PolygramError):
    """A JSON artifact could not be parsed or does not match its schema."""
    exit_code = 1


class SamplingFailed(PolygramError):
    """The H-representation sampler exhausted its retries."""
    exit_code = 2


class InvalidHRep(PolygramError):
    """An H-representation violates symmetry, WR = 0 or the rank of R_0."""
    exit_code = 3


class ValidationFailed(PolygramError):
    """A post-condition check of a generated artifact failed."""
    exit_code = 3


class NotReal(PolygramError):
    """A Gramian expected to be real has a non-negligible imaginary part."""
    exit_code = 4


class NotRealGramian(NotReal):
    """The factor handed to canonicalization does not have a real Gramian."""
    exit_code = 4


class NumericError(PolygramError):
    exit_code = 5


class NotSymmetric(NumericError):
    pass


class RankDeficient(NumericError):
    pass


class RankDeficientLead(RankDeficient):
    """The leading coefficient A_0 does not have full row rank."""


class IllConditioned(RankDeficient):
    """R_0 is so close to rank deficiency that recovered blocks would be dominated by rounding."""


class DegenerateSpectrum(NumericError):
    """Repeated eigenvalues make the canonical representative non-unique."""


class UnitarityFailure(NumericError):
    pass


class ReconstructionFailure(NumericError):
    """An eigendecomposition does not reproduce the matrix it was computed from."""


class NotSkew(NumericError):
    pass


class StructureViolation(NumericError):
    """The offset of two skew-equation solutions is not W·A with W symmetric."""


class Infeasible(PolygramError):
    """The right-hand side is not in the range of X -> X^T A - A^T X."""
    exit_code = 6


class NotRepresentable(PolygramError):
    """A factor has no (W, R) representation: its Gramian is not real."""
    exit_code = 7


class RankInstability(PolygramError):
    """Jacobian rank changed between fd_step and fd_step / 2."""

    def __init__(self, message: str, rank_full: int, rank_half: int):
        super().__init__(message)
        self.rank_full = rank_full
        self.rank_half = rank_half


class StepTooLarge(RankInstability):
    """Truncation noise at the larger step inflated the rank."""


class StepTooSmall(RankInstability):
    """Rounding noise at the smaller step inflated the rank."""
