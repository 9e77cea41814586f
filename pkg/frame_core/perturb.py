"""
Frame-operator perturbation engines.

Polar transport
    Write T = S^{1/2} W with W a co-isometry and swap S^{1/2} for the
    square root of a target operator. The frame operator is hit exactly
    but the norms drift.

Norm-preserving transport
    With G_t = W* S_target W, find a unitary U near the identity with
    diag(U* G_t U) = diag(G^F) and return the columns of S_target^{1/2} W U.
    The unitary comes from a Gauss-Newton solve on U ↦ diag(U* G U) with
    a Cayley retraction.

The differential of U ↦ diag(U* G U) evaluated on X is reported as
diag([X, U* G U]); it is the derivative along the curve t ↦ U·cayley(−tX).
"""

from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import structlog
from scipy.linalg import eigh, polar, solve

from config import settings
from frame_core.errors import DegeneratePolarError, InvalidInputError, NoConvergenceError
from frame_core.frames import (
    PSD_FLOOR,
    as_hermitian,
    frame_operator,
    is_irreducible,
    support_components,
)
from frame_core.majorization import Polytope, Simplex, as_rvec, pinch_step, sort_desc, sums_close
from frame_core.potentials import Potential, eval_potential
from frame_core.synthesis import is_unitary
from schemas.models import Frame, SectionSolveReport

logger = structlog.get_logger("Perturb")

RANK_RTOL = 1e-10
ANTI_HERMITIAN_ATOL = 1e-10
REDUCIBLE_WARNING = "reducible: the Gram support graph is disconnected, a local section may not exist"


# ── Operator helpers ─────────────────────────────────────────────────
def _psd_eigh(S, name: str = "S") -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a PSD matrix, eigenvalues non-increasing and clamped at 0."""
    M = as_hermitian(S, name)
    lam, Q = eigh(M)
    lam, Q = lam[::-1], Q[:, ::-1]
    if lam[-1] < -PSD_FLOOR * max(1.0, float(lam[0])):
        raise InvalidInputError(f"{name} is not positive semidefinite", {"min_eigenvalue": float(lam[-1])})
    return np.where(lam < 0, 0.0, lam), Q


def operator_sqrt(S) -> np.ndarray:
    lam, Q = _psd_eigh(S)
    root = (Q * np.sqrt(lam)) @ Q.conj().T
    return (root + root.conj().T) / 2


def polar_factor(F: Frame) -> np.ndarray:
    """Co-isometry W (d×m, W W* = I) with T = (S^F)^{1/2} W; full-rank frames only."""
    lam, _ = _psd_eigh(frame_operator(F))
    if lam[0] == 0 or lam[-1] <= RANK_RTOL * lam[0]:
        raise DegeneratePolarError("frame operator is rank deficient; the polar factor is not unique",
                                   {"lambda_min": float(lam[-1]), "lambda_max": float(lam[0])})
    W, _ = polar(F.synthesis, side="left")
    return W


def cayley(X) -> np.ndarray:
    """(I − X/2)^{-1}(I + X/2); unitary whenever X is anti-Hermitian."""
    X = np.asarray(X, dtype=np.complex128)
    I = np.eye(X.shape[0])
    return solve(I - X / 2, I + X / 2)


def _validate_target(F: Frame, S_target) -> np.ndarray:
    St = as_hermitian(S_target, "S_target")
    if St.shape != (F.d, F.d):
        raise InvalidInputError("target operator must be d×d", {"shape": list(St.shape), "d": F.d})
    _psd_eigh(St, "S_target")
    trace = float(np.trace(St).real)
    if not sums_close(trace, F.total):
        raise InvalidInputError("target trace differs from the frame's total squared norm",
                                {"trace": trace, "expected": F.total})
    return St


# ── Polar transport ──────────────────────────────────────────────────
def polar_transport(F: Frame, S_target) -> Frame:
    St = _validate_target(F, S_target)
    W = polar_factor(F)
    moved = Frame.from_synthesis(operator_sqrt(St) @ W)
    logger.info("polar_transport_complete", d=F.d, m=F.m)
    return moved


# ── Differential of U ↦ diag(U* G U) ─────────────────────────────────
def _as_anti_hermitian(X, m: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.complex128)
    if X.shape != (m, m):
        raise InvalidInputError("X must be m×m", {"shape": list(X.shape), "m": m})
    deviation = float(np.max(np.abs(X + X.conj().T)))
    if deviation > ANTI_HERMITIAN_ATOL * max(1.0, float(np.max(np.abs(X)))):
        raise InvalidInputError("X is not anti-Hermitian", {"deviation": deviation})
    return X


def section_differential(G, U, X) -> np.ndarray:
    """diag([X, U* G U]) as a real m-vector."""
    G = as_hermitian(G, "G")
    m = G.shape[0]
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (m, m) or not is_unitary(U):
        raise InvalidInputError("U must be an m×m unitary", {"shape": list(U.shape), "m": m})
    X = _as_anti_hermitian(X, m)
    H = U.conj().T @ G @ U
    return np.real(np.diag(X @ H - H @ X))


def anti_hermitian_basis(m: int) -> List[np.ndarray]:
    """Real-linear basis of the m×m anti-Hermitian matrices."""
    basis = []
    for i in range(m):
        for j in range(i + 1, m):
            E = np.zeros((m, m), dtype=np.complex128)
            E[i, j], E[j, i] = 1.0, -1.0
            basis.append(E)
            E = np.zeros((m, m), dtype=np.complex128)
            E[i, j], E[j, i] = 1j, 1j
            basis.append(E)
    for i in range(m):
        E = np.zeros((m, m), dtype=np.complex128)
        E[i, i] = 1j
        basis.append(E)
    return basis


def _differential_matrix(H: np.ndarray) -> np.ndarray:
    """
    Matrix of θ ↦ diag([X(θ), H]) over the off-diagonal coordinates
    θ = (Re X_ij, Im X_ij)_{i<j}; diagonal entries of X do not contribute.
    """
    m = H.shape[0]
    iu, ju = np.triu_indices(m, k=1)
    J = np.zeros((m, 2 * iu.size))
    cols = np.arange(iu.size)
    J[iu, 2 * cols] = 2 * H[iu, ju].real
    J[ju, 2 * cols] = -2 * H[iu, ju].real
    J[iu, 2 * cols + 1] = 2 * H[iu, ju].imag
    J[ju, 2 * cols + 1] = -2 * H[iu, ju].imag
    return J


def _assemble(theta: np.ndarray, m: int) -> np.ndarray:
    iu, ju = np.triu_indices(m, k=1)
    X = np.zeros((m, m), dtype=np.complex128)
    X[iu, ju] = theta[0::2] + 1j * theta[1::2]
    X[ju, iu] = -np.conj(X[iu, ju])
    return X


def section_rank(G) -> int:
    """Numerical rank of X ↦ diag([X, G]) over the anti-Hermitian basis."""
    G = as_hermitian(G, "G")
    m = G.shape[0]
    identity = np.eye(m)
    columns = [section_differential(G, identity, E) for E in anti_hermitian_basis(m)]
    return int(np.linalg.matrix_rank(np.column_stack(columns)))


def section_rank_check(G, tol: Optional[float] = None) -> bool:
    """True iff the support graph of G is connected (then the differential has rank m−1)."""
    G = as_hermitian(G, "G")
    if tol is None:
        tol = 1e-10 * float(np.max(np.abs(np.diag(G))))
    connected = len(support_components(G, tol)) == 1
    rank = section_rank(G)
    if connected != (rank == G.shape[0] - 1):
        logger.warning("section_rank_mismatch", connected=connected, rank=rank, m=G.shape[0])
    return connected


# ── Gauss-Newton section solve ───────────────────────────────────────
def diagonal_section_solve(
    G,
    target,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> Tuple[np.ndarray, SectionSolveReport]:
    """
    Unitary U near the identity with diag(U* G U) = target.

    Each step takes the minimum-norm anti-Hermitian X solving the
    linearized equation and retracts U ← U·cayley(X), halving X while the
    residual fails to decrease.
    """
    tol = settings.FRAMECRAFT_TOL if tol is None else tol
    max_iter = settings.SOLVER_MAX_ITER if max_iter is None else max_iter
    if not tol > 0:
        raise InvalidInputError("tol must be positive", {"tol": tol})
    G = as_hermitian(G, "G")
    m = G.shape[0]
    target = as_rvec(target, "target")
    if target.size != m:
        raise InvalidInputError("target must have length m", {"len_target": target.size, "m": m})
    trace = float(np.trace(G).real)
    if not sums_close(float(target.sum()), trace):
        raise InvalidInputError("target must sum to tr(G)", {"sum_target": float(target.sum()), "trace": trace})

    warnings: List[str] = []
    if not section_rank_check(G):
        warnings.append(REDUCIBLE_WARNING)
        logger.warning("section_solve_reducible", m=m)

    U = np.eye(m, dtype=np.complex128)
    mismatch = target - np.real(np.diag(G))
    iterations = 0

    def report(converged: bool) -> SectionSolveReport:
        return SectionSolveReport(
            iterations=iterations,
            residual=float(np.max(np.abs(mismatch))),
            unitary_distance=float(np.linalg.norm(U - np.eye(m), 2)),
            converged=converged,
            tol=tol,
            warnings=warnings,
        )

    while np.max(np.abs(mismatch)) > tol:
        if iterations >= max_iter:
            raise NoConvergenceError("section solve hit the iteration limit", report(False))
        H = U.conj().T @ G @ U
        # d/dt diag(U(t)* G U(t)) along U·cayley(tX) equals −diag([X, H]).
        theta = -np.linalg.pinv(_differential_matrix(H), rcond=settings.PINV_RCOND) @ mismatch
        X = _assemble(theta, m)
        current = np.linalg.norm(mismatch)
        for _ in range(settings.SOLVER_MAX_HALVINGS + 1):
            U_try = U @ cayley(X)
            trial = target - np.real(np.diag(U_try.conj().T @ G @ U_try))
            if np.linalg.norm(trial) < current:
                U, mismatch = U_try, trial
                break
            X = X / 2
        else:
            raise NoConvergenceError("section solve stalled: no damped step reduces the residual", report(False))
        iterations += 1

    result = report(True)
    logger.info("section_solve_converged", iterations=iterations, residual=result.residual,
                unitary_distance=result.unitary_distance)
    return U, result


# ── Norm-preserving transport ────────────────────────────────────────
def norm_preserving_transport(
    F: Frame,
    S_target,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> Tuple[Frame, SectionSolveReport]:
    St = _validate_target(F, S_target)
    notes: List[str] = []
    if not is_irreducible(F):
        notes.append(REDUCIBLE_WARNING)
        logger.warning("norm_preserving_transport_reducible_frame", d=F.d, m=F.m)

    W = polar_factor(F)
    G_target = W.conj().T @ St @ W
    G_target = (G_target + G_target.conj().T) / 2
    try:
        U, report = diagonal_section_solve(G_target, F.norms_sq, tol=tol, max_iter=max_iter)
    except NoConvergenceError as exc:
        exc.report = exc.report.model_copy(update={"warnings": _merge(notes, exc.report.warnings)})
        raise

    moved = Frame.from_synthesis(operator_sqrt(St) @ W @ U)
    return moved, report.model_copy(update={"warnings": _merge(notes, report.warnings)})


def _merge(first: List[str], second: List[str]) -> List[str]:
    return list(dict.fromkeys(first + second))


# ── One constructive descent step ────────────────────────────────────
class DescentStep(NamedTuple):
    frame: Frame
    before: float
    after: float
    report: Optional[SectionSolveReport]


def transport_descent(
    F: Frame,
    f: Potential,
    epsilon: float,
    tol: Optional[float] = None,
) -> DescentStep:
    """
    Pinch the spectrum of S^F toward the minimal vector and transport F to
    the pinched operator (same eigenvectors). Irreducible frames keep their
    norms and the pinch stays in P(a). Otherwise the move is a polar
    transport inside A(c). The potential drops strictly for strictly convex f.
    """
    S = frame_operator(F)
    lam, Q = _psd_eigh(S)
    if is_irreducible(F) and F.d <= F.m:
        constraint = Polytope(a=tuple(sort_desc(F.norms_sq)), d=F.d)
    else:
        constraint = Simplex(c=F.total)
    pinched = pinch_step(lam, epsilon, constraint)
    S_target = (Q * pinched) @ Q.conj().T
    S_target = (S_target + S_target.conj().T) / 2

    if isinstance(constraint, Polytope):
        moved, report = norm_preserving_transport(F, S_target, tol=tol)
    else:
        moved, report = polar_transport(F, S_target), None
    before, after = eval_potential(f, S), eval_potential(f, frame_operator(moved))
    logger.info("transport_descent_step", potential=f.name, mode="norm-preserving" if report else "polar",
                epsilon=epsilon, before=before, after=after)
    return DescentStep(frame=moved, before=before, after=after, report=report)
