"""
Frame Core: synthesis, frame and Gram operators of a finite frame,
its spectrum and frame bounds, the vector-wise distance between frames,
and the orthogonal-partition (irreducibility) analysis of the Gram matrix.

Conventions:
  - T (d×m) has the frame vectors as columns, S = T T*, G = T* T,
    so G[i, j] = ⟨φ_j, φ_i⟩ and diag(G) = (‖φ_i‖²).
  - Index sets are 0-based.
"""

from typing import Dict, List, NamedTuple, Optional

import numpy as np
import structlog
from scipy.linalg import eigvalsh
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from frame_core.errors import InvalidInputError
from frame_core.majorization import as_rvec, sums_close
from schemas.models import Frame

logger = structlog.get_logger("FrameCore")

HERMITIAN_ATOL = 1e-12
PSD_FLOOR = 1e-10
TIGHT_RTOL = 1e-10
NORM_RTOL = 1e-9


class FrameBounds(NamedTuple):
    lower: float
    upper: float
    is_frame: bool
    is_tight: bool


# ── Operators ────────────────────────────────────────────────────────
def as_hermitian(S, name: str = "S") -> np.ndarray:
    """Validate a square Hermitian matrix and return its exactly Hermitian part."""
    M = np.asarray(S, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty square matrix", {"shape": list(M.shape)})
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} has non-finite entries")
    deviation = float(np.max(np.abs(M - M.conj().T)))
    if deviation > HERMITIAN_ATOL * max(1.0, float(np.max(np.abs(M)))):
        raise InvalidInputError(f"{name} is not Hermitian", {"deviation": deviation})
    return (M + M.conj().T) / 2


def synthesis_matrix(F: Frame) -> np.ndarray:
    return np.array(F.synthesis)


def frame_operator(F: Frame) -> np.ndarray:
    T = F.synthesis
    S = T @ T.conj().T
    return (S + S.conj().T) / 2


def gram(F: Frame) -> np.ndarray:
    T = F.synthesis
    G = T.conj().T @ T
    return (G + G.conj().T) / 2


def spectrum(S) -> np.ndarray:
    """
    Eigenvalues of a Hermitian PSD matrix, non-increasing.

    Values in [−floor, 0) are clamped to 0, anything below −floor is
    rejected; floor = 1e-10·max(1, λ_max).
    """
    M = as_hermitian(S)
    lam = eigvalsh(M)[::-1]
    floor = PSD_FLOOR * max(1.0, float(lam[0]))
    if lam[-1] < -floor:
        raise InvalidInputError("operator is not positive semidefinite", {"min_eigenvalue": float(lam[-1])})
    return np.where(lam < 0, 0.0, lam)


def frame_bounds(F: Frame) -> FrameBounds:
    lam = spectrum(frame_operator(F))
    upper, lower = float(lam[0]), float(lam[-1])
    is_frame = upper > 0 and lower > TIGHT_RTOL * upper
    is_tight = is_frame and (upper - lower) <= TIGHT_RTOL * upper
    if not is_frame:
        logger.debug("not_a_frame", d=F.d, m=F.m, lower=lower, upper=upper)
    return FrameBounds(lower=lower, upper=upper, is_frame=is_frame, is_tight=is_tight)


def vv_distance(F: Frame, G: Frame) -> float:
    """d(F, G) = max_i ‖φ_i − ψ_i‖."""
    if F.vectors.shape != G.vectors.shape:
        raise InvalidInputError("frames must have the same m and d",
                                {"left": [F.m, F.d], "right": [G.m, G.d]})
    return float(np.max(np.linalg.norm(F.vectors - G.vectors, axis=1)))


# ── Orthogonal partition ─────────────────────────────────────────────
def support_components(G, tol: float) -> List[List[int]]:
    """Connected components of the graph with an edge (i, j) iff |G[i, j]| > tol."""
    if tol < 0:
        raise InvalidInputError("tol must be non-negative", {"tol": tol})
    adjacency = csr_matrix(np.abs(np.asarray(G)) > tol)
    _, labels = connected_components(adjacency, directed=False)
    groups: Dict[int, List[int]] = {}
    for index, label in enumerate(labels):
        groups.setdefault(int(label), []).append(index)
    return sorted(groups.values(), key=lambda group: group[0])


def default_partition_tol(F: Frame) -> float:
    return 1e-10 * float(np.max(F.norms_sq))


def orthogonal_partition(F: Frame, tol: Optional[float] = None) -> List[List[int]]:
    if tol is None:
        tol = default_partition_tol(F)
    return support_components(gram(F), tol)


def is_irreducible(F: Frame, tol: Optional[float] = None) -> bool:
    return len(orthogonal_partition(F, tol)) == 1


def component_tight_constants(F: Frame, tol: Optional[float] = None) -> List[Optional[float]]:
    """
    For each orthogonal component, the tight constant of the sub-frame on
    its own span, or None when that sub-frame is not tight there.
    """
    constants: List[Optional[float]] = []
    for component in orthogonal_partition(F, tol):
        lam = spectrum(frame_operator(Frame.from_vectors(F.vectors[component])))
        if lam[0] == 0:
            constants.append(None)
            continue
        nonzero = lam[lam > PSD_FLOOR * lam[0]]
        tight = (nonzero[0] - nonzero[-1]) <= 1e-8 * nonzero[0]
        constants.append(float(nonzero.mean()) if tight else None)
    return constants


# ── Constraint sets A(c), B(a) ───────────────────────────────────────
def in_sum_set(F: Frame, c: float) -> bool:
    return sums_close(F.total, float(c))


def in_norm_set(F: Frame, a, tol: float = NORM_RTOL) -> bool:
    a = as_rvec(a, "a")
    if a.size != F.m:
        raise InvalidInputError("profile length must equal m", {"len_a": a.size, "m": F.m})
    return bool(np.all(np.abs(F.norms_sq - a) <= tol * np.maximum(1.0, a)))


# ── Frame algebra and generators ─────────────────────────────────────
def juxtapose(F1: Frame, F2: Frame) -> Frame:
    """F1 ⊔ F2."""
    if F1.d != F2.d:
        raise InvalidInputError("juxtaposed frames must share d", {"d1": F1.d, "d2": F2.d})
    return Frame.from_vectors(np.vstack([F1.vectors, F2.vectors]))


def scale_frame(F: Frame, alpha: float) -> Frame:
    return Frame.from_vectors(alpha * F.vectors)


def interpolate(F1: Frame, F2: Frame, t: float) -> Frame:
    """t^{1/2}·F1 ⊔ (1−t)^{1/2}·F2; its frame operator is t·S1 + (1−t)·S2."""
    if not 0.0 <= t <= 1.0:
        raise InvalidInputError("t must lie in [0, 1]", {"t": t})
    return juxtapose(scale_frame(F1, np.sqrt(t)), scale_frame(F2, np.sqrt(1.0 - t)))


def random_frame(d: int, m: int, rng: np.random.Generator, real: bool = False) -> Frame:
    vectors = rng.standard_normal((m, d))
    if not real:
        vectors = vectors + 1j * rng.standard_normal((m, d))
    return Frame.from_vectors(vectors)
