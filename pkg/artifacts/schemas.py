"""
Artifact schemas
================

JSON documents exchanged by the command-line tools, as pydantic models, plus
converters from and to the numeric types.

Formats:
--------
- matrix:          nested row-major list of floats
- factor / gram:   {"rows", "cols", "degree", "coeffs_re", "coeffs_im"}
- hrep:            {"d", "N", "P", "W", "R", "canonical", "seed"}
- classification:  {"verdict", "w_norm", "residuals", "real_factor"}
- skew solution:   {"X", "residual", "family"}

Floats are written by ``json`` with the shortest repr that round-trips, so a
matrix read back is bit-identical to the one written.
"""

import json
from functools import singledispatch
from typing import Dict, List, Optional, Type, TypeVar

import numpy as np
from pydantic import BaseModel, Field, FiniteFloat, RootModel, ValidationError, model_validator

from common.exceptions import ArtifactError
from factor.classifier import Classification
from hrep.h_representation import HRep
from polymat.poly_matrix import GramPoly, PolyMatrix

# NaN and infinities are rejected on read
Matrix = List[List[FiniteFloat]]
ModelT = TypeVar("ModelT", bound=BaseModel)


class MatrixModel(RootModel[Matrix]):

    @model_validator(mode="after")
    def check_rectangular(self):
        if not self.root or not self.root[0]:
            raise ValueError("Matrix needs at least one row and one column")
        widths = {len(row) for row in self.root}
        if len(widths) > 1:
            raise ValueError(f"Ragged matrix: row lengths {sorted(widths)}")
        return self

    def to_array(self) -> np.ndarray:
        return np.array(self.root, dtype=float, ndmin=2)


class PolyMatrixModel(BaseModel):
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    degree: int = Field(ge=0)
    coeffs_re: List[Matrix]
    coeffs_im: List[Matrix]

    @model_validator(mode="after")
    def check_shapes(self):
        if len(self.coeffs_re) != self.degree + 1 or len(self.coeffs_im) != self.degree + 1:
            raise ValueError(f"Expected {self.degree + 1} coefficients for degree {self.degree}")
        for coeff in self.coeffs_re + self.coeffs_im:
            if len(coeff) != self.rows or any(len(row) != self.cols for row in coeff):
                raise ValueError(f"Coefficient does not have shape ({self.rows}, {self.cols})")
        return self

    def to_arrays(self) -> List[np.ndarray]:
        return [np.array(re, dtype=float).reshape(self.rows, self.cols) +
                1j * np.array(im, dtype=float).reshape(self.rows, self.cols)
                for re, im in zip(self.coeffs_re, self.coeffs_im)]


class GramPolyModel(PolyMatrixModel):
    pass


class HRepModel(BaseModel):
    d: int = Field(ge=1)
    N: int = Field(ge=1)
    P: int = Field(ge=0)
    W: List[Matrix]
    R: List[Matrix]
    canonical: bool = False
    seed: Optional[int] = None


class ClassificationModel(BaseModel):
    verdict: str
    w_norm: float
    residuals: Dict[str, float]
    real_factor: Optional[PolyMatrixModel] = None


class SkewSolutionModel(BaseModel):
    X: Matrix
    residual: float
    family: str


def _coefficient_fields(coeffs) -> dict:
    rows, cols = coeffs[0].shape
    return {
        "rows": rows,
        "cols": cols,
        "degree": len(coeffs) - 1,
        "coeffs_re": [np.real(c).tolist() for c in coeffs],
        "coeffs_im": [np.imag(c).tolist() for c in coeffs],
    }


@singledispatch
def to_model(obj) -> BaseModel:
    """Converts a numeric object into its artifact model."""
    raise TypeError(f"No artifact model for {type(obj).__name__}")


@to_model.register
def _(obj: np.ndarray) -> MatrixModel:
    return MatrixModel(np.atleast_2d(obj).astype(float).tolist())


@to_model.register
def _(obj: PolyMatrix) -> PolyMatrixModel:
    return PolyMatrixModel(**_coefficient_fields(obj.coeffs))


@to_model.register
def _(obj: GramPoly) -> GramPolyModel:
    return GramPolyModel(**_coefficient_fields(obj.coeffs))


@to_model.register
def _(obj: HRep) -> HRepModel:
    return HRepModel(d=obj.d, N=obj.N, P=obj.P,
                     W=[w.tolist() for w in obj.W], R=[r.tolist() for r in obj.R],
                     canonical=obj.canonical, seed=obj.seed)


@to_model.register
def _(obj: Classification) -> ClassificationModel:
    real_factor = to_model(obj.real_factor) if obj.real_factor is not None else None
    return ClassificationModel(verdict=obj.verdict.value, w_norm=obj.w_norm,
                               residuals=dict(sorted(obj.residuals.items())), real_factor=real_factor)


@singledispatch
def from_model(model):
    """Converts an artifact model back into the numeric object it describes."""
    raise TypeError(f"No numeric type for {type(model).__name__}")


@from_model.register
def _(model: MatrixModel) -> np.ndarray:
    return model.to_array()


@from_model.register
def _(model: PolyMatrixModel) -> PolyMatrix:
    return PolyMatrix(tuple(model.to_arrays()))


@from_model.register
def _(model: GramPolyModel) -> GramPoly:
    return GramPoly(tuple(model.to_arrays()))


@from_model.register
def _(model: HRepModel) -> HRep:
    W = tuple(np.array(w, dtype=float).reshape(model.d, model.d) for w in model.W)
    R = tuple(np.array(r, dtype=float).reshape(model.d, model.N) for r in model.R)
    return HRep(model.d, model.N, model.P, W, R, canonical=model.canonical, seed=model.seed)


def read_json(path: str, model: Type[ModelT]) -> ModelT:
    """
    Loads a JSON artifact and validates it against ``model``.

    Raises:
        ArtifactError: If the file is unreadable, not JSON or off-schema.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        return model.model_validate(data)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ArtifactError(f"Cannot load {model.__name__} from {path}: {e}") from e


def write_json(path: str, model: BaseModel) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model.model_dump(mode="json"), f, indent=2, ensure_ascii=False)
        f.write("\n")
