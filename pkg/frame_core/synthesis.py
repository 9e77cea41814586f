"""
Frame Synthesis: constructive frames with a prescribed frame-operator
spectrum and prescribed squared norms, tight frames, and the canonical
global minimizer of every convex potential over B(a).

Squared norms are used throughout: a_i = ‖φ_i‖².
"""

from typing import Optional

import numpy as np
import structlog

from frame_core.errors import InfeasibleError, InfeasibleTightError, InvalidInputError
from frame_core.frames import frame_operator, spectrum
from frame_core.majorization import (
    as_dimension,
    as_norm_profile,
    as_spectrum,
    constrained_minimal_vector,
    d_irregularity,
    partial_slack,
    sort_desc,
    sums_close,
)
from schemas.models import Frame

logger = structlog.get_logger("Synthesis")

UNITARY_ATOL = 1e-10


def feasible(lam, a) -> bool:
    """True iff a frame with spectrum λ and squared norms a exists."""
    lam = as_spectrum(lam)
    a = as_norm_profile(a)
    d = as_dimension(lam.size, a.size)
    total = float(a.sum())
    if not sums_close(float(lam.sum()), total):
        return False
    slack = partial_slack(total)
    return bool(np.all(np.cumsum(a)[: d - 1] <= np.cumsum(lam)[: d - 1] + slack))


def schur_horn_frame(lam, a) -> Frame:
    """
    Real frame with S = diag(λ) exactly and ‖φ_i‖² = a_i.

    Starts from D = diag(λ, 0, …, 0) and fixes the targets a_0 ≥ a_1 ≥ …
    one at a time. Step k swaps into position k the free diagonal entry
    just above a_k, then mixes it with the free entry just below a_k by
    one Givens rotation. The free block stays diagonal, and the free
    entries keep majorizing the remaining targets. G = W D Wᵀ has diagonal a,
    and the vectors are the rows of W[:, :d]·diag(√λ).
    """
    if not feasible(lam, a):
        raise InfeasibleError("no frame has this spectrum and these norms",
                              {"lambda": np.asarray(lam, dtype=float).tolist(),
                               "a": np.asarray(a, dtype=float).tolist()})
    lam = as_spectrum(lam)
    a = as_norm_profile(a)
    d, m = lam.size, a.size
    eps = 1e-13 * max(1.0, float(a.sum()))

    x = np.concatenate([lam, np.zeros(m - d)])
    W = np.eye(m)
    rotations = 0
    for k in range(m - 1):
        free = np.arange(k, m)
        above = free[x[free] >= a[k] - eps]
        if above.size == 0:
            raise InfeasibleError("Givens chain found no entry above the target", {"index": int(k)})
        p = above[np.argmin(x[above])]
        if p != k:
            x[[k, p]] = x[[p, k]]
            W[[k, p]] = W[[p, k]]
        if abs(x[k] - a[k]) <= eps:
            x[k] = a[k]
            continue
        rest = free[1:]
        below = rest[x[rest] < a[k]]
        if below.size == 0:
            raise InfeasibleError("Givens chain found no entry below the target", {"index": int(k)})
        q = below[np.argmax(x[below])]
        c2 = np.clip((a[k] - x[q]) / (x[k] - x[q]), 0.0, 1.0)
        c, s = np.sqrt(c2), np.sqrt(1.0 - c2)
        row_k, row_q = W[k].copy(), W[q].copy()
        W[k] = c * row_k + s * row_q
        W[q] = -s * row_k + c * row_q
        x[q] = x[k] + x[q] - a[k]
        x[k] = a[k]
        rotations += 1

    logger.debug("schur_horn_frame_built", d=d, m=m, rotations=rotations)
    return Frame.from_vectors(W[:, :d] * np.sqrt(lam))


def _line_frame(a: np.ndarray) -> Frame:
    """Tight frame of ℂ¹: ±√a_i with alternating signs."""
    signs = np.where(np.arange(a.size) % 2 == 0, 1.0, -1.0)
    return Frame.from_vectors((signs * np.sqrt(a))[:, None])


def _tight_block(a: np.ndarray, d: int) -> Frame:
    if d == 1:
        return _line_frame(a)
    return schur_horn_frame(np.full(d, a.sum() / d), a)


def tight_frame(a, d: int) -> Frame:
    """Frame in B(a) with S = (∑a_i/d)·I; needs r_d(a) = 0."""
    a = as_norm_profile(a)
    d = as_dimension(d, a.size)
    r = d_irregularity(a, d)
    if r > 0:
        raise InfeasibleTightError("no tight frame with these norms exists in this dimension",
                                   {"irregularity": r, "d": d})
    return _tight_block(a, d)


def minimizer_frame(a, d: int) -> Frame:
    """
    {√a_i e_i}_{i<r} followed by a tight frame for the tail profile on
    span{e_r, …, e_{d−1}}; its spectrum is the minimal vector of P(a).
    """
    a = as_norm_profile(a)
    d = as_dimension(d, a.size)
    r = d_irregularity(a, d)
    vectors = np.zeros((a.size, d), dtype=np.complex128)
    vectors[np.arange(r), np.arange(r)] = np.sqrt(a[:r])
    vectors[r:, r:] = _tight_block(a[r:], d - r).vectors
    logger.info("minimizer_frame_built", d=d, m=int(a.size), irregularity=r)
    return Frame.from_vectors(vectors)


def has_minimizer_structure(F: Frame, tol: float = 1e-8) -> bool:
    """Spectrum of S^F equals the minimal vector of P(sorted norms)."""
    a = sort_desc(F.norms_sq)
    if F.d > F.m or np.any(a <= 0):
        return False
    target = constrained_minimal_vector(a, F.d)
    lam = spectrum(frame_operator(F))
    return bool(np.allclose(lam, target, rtol=0.0, atol=tol * max(1.0, float(a.sum()))))


def rotate_frame(F: Frame, U) -> Frame:
    """ψ_i = U φ_i."""
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (F.d, F.d):
        raise InvalidInputError("U must be d×d", {"shape": list(U.shape), "d": F.d})
    if not is_unitary(U):
        raise InvalidInputError("U is not unitary")
    return Frame.from_vectors(F.vectors @ U.T)


def is_unitary(U, atol: float = UNITARY_ATOL) -> bool:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= atol)


def random_unitary(d: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Haar-distributed d×d unitary (QR of a complex Gaussian with phase fix)."""
    rng = rng or np.random.default_rng()
    d = as_dimension(d)
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases
