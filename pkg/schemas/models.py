from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from frame_core.errors import InvalidInputError
from utils.serialization import complex_from_pairs, complex_to_pairs


# --- Frames ---

class Frame(BaseModel):
    """
    Ordered list of m vectors in ℂ^d, stored as an (m, d) read-only
    complex array whose row i is φ_i.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vectors: np.ndarray = Field(..., description="(m, d) complex128 array; row i is the i-th frame vector")

    @field_validator("vectors", mode="before")
    @classmethod
    def _coerce_vectors(cls, v):
        arr = np.array(v, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"frame vectors must form a non-empty (m, d) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("frame vectors have non-finite entries")
        arr.setflags(write=False)
        return arr

    @classmethod
    def from_vectors(cls, vectors) -> "Frame":
        try:
            return cls(vectors=vectors)
        except ValidationError as exc:
            raise InvalidInputError("invalid frame", {"reason": exc.errors()[0]["msg"]}) from exc

    @classmethod
    def from_synthesis(cls, T) -> "Frame":
        """Frame whose vectors are the columns of the d×m matrix T."""
        return cls.from_vectors(np.asarray(T).T)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @property
    def synthesis(self) -> np.ndarray:
        return self.vectors.T

    @property
    def norms_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.vectors) ** 2, axis=1)

    @property
    def total(self) -> float:
        return float(self.norms_sq.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return bool(np.array_equal(self.vectors, other.vectors))

    __hash__ = None

    def to_payload(self) -> Dict[str, Any]:
        return {"d": self.d, "m": self.m, "vectors": complex_to_pairs(self.vectors)}

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "Frame":
        if not isinstance(payload, dict) or not {"d", "m", "vectors"} <= payload.keys():
            raise InvalidInputError("frame JSON needs keys 'd', 'm' and 'vectors'")
        vectors = complex_from_pairs(payload["vectors"], ndim=2)
        frame = cls.from_vectors(vectors)
        if frame.d != payload["d"] or frame.m != payload["m"]:
            raise InvalidInputError("frame JSON header disagrees with its vectors",
                                    {"d": payload["d"], "m": payload["m"], "shape": [frame.m, frame.d]})
        return frame


# --- Solver telemetry ---

class SectionSolveReport(BaseModel):
    iterations: int = Field(..., ge=0)
    residual: float = Field(..., ge=0, description="∞-norm of the diagonal mismatch")
    unitary_distance: float = Field(..., ge=0, description="Operator-norm distance of U from the identity")
    converged: bool
    tol: float = Field(..., gt=0)
    warnings: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _converged_within_tol(self):
        if self.converged and self.residual > self.tol:
            raise ValueError("a converged report must have residual ≤ tol")
        return self

    def to_payload(self) -> Dict[str, Any]:
        payload = {
            "iterations": self.iterations,
            "residual": self.residual,
            "unitary_distance": self.unitary_distance,
            "converged": self.converged,
        }
        if self.warnings:
            payload["warnings"] = list(self.warnings)
        return payload


# --- Service / CLI reports ---

class FrameBoundsModel(BaseModel):
    lower: float
    upper: float
    is_frame: bool
    is_tight: bool


class VerificationReport(BaseModel):
    d: int
    m: int
    norms_sq: List[float]
    spectrum: List[float]
    frame_bounds: FrameBoundsModel
    components: List[List[int]]
    irreducible: bool
    welch_ratio: Optional[float] = None
    minimizer_structure: Optional[bool] = None
    checks: Dict[str, bool] = Field(default_factory=dict, description="Named postcondition checks")

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


class PotentialReport(BaseModel):
    potential: str
    value: float
    welch_ratio: Optional[float] = None
    bounds_simplex: Tuple[float, float]
    bounds_profile: Optional[Tuple[float, float]] = None
    attained_lower: Optional[bool] = None
    attained_upper: bool


class BoundsReport(BaseModel):
    potential: str
    a: List[float]
    d: int
    n: Optional[int] = None
    irregularity: int
    minimal_spectrum: List[float]
    lower: float
    upper: float


class ProbeReport(BaseModel):
    potential: str
    constraint: str
    radius: float
    samples: int
    seed: int
    base_value: float
    best_value: float
    descent_found: bool
    best_frame: Dict[str, Any]


class PerturbResult(BaseModel):
    mode: str
    frame: Dict[str, Any]
    vv_distance: float
    report: Optional[SectionSolveReport] = None

    def to_payload(self) -> Dict[str, Any]:
        payload = {"mode": self.mode, "frame": self.frame, "vv_distance": self.vv_distance}
        if self.report is not None:
            payload["report"] = self.report.to_payload()
        return payload
