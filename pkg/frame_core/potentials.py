"""
Convex Frame Potentials: catalog, evaluation and sharp bounds.

P_f(S) = tr f(S) = ∑ f(λ_i(S)) for a convex f on [0, ∞). The module covers:
  - the catalog (bf = x², power:n = xⁿ, xlogx = x·ln x with f(0) = 0),
  - evaluation through the frame operator or the Gram matrix,
  - the explicit cyclic-product form of the n-th potential,
  - the lower/upper bounds over A(c) and B(a) and the Welch ratio,
  - a seeded random probe that looks for nearby frames with lower potential.
"""

import concurrent.futures
import math
from typing import Callable, List, NamedTuple, Optional, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator

from config import settings
from frame_core.errors import BudgetExceededError, InvalidInputError
from frame_core.frames import frame_operator, gram, in_norm_set, in_sum_set, spectrum
from frame_core.majorization import (
    as_dimension,
    as_norm_profile,
    d_irregularity,
    majorizes,
    sums_close,
)
from schemas.models import Frame

logger = structlog.get_logger("Potentials")


# ── Catalog ──────────────────────────────────────────────────────────
class Potential(BaseModel):
    """Named convex function on [0, ∞) with its structural flags."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    f: Callable[[np.ndarray], np.ndarray] = Field(..., exclude=True)
    convex: bool = True
    strictly_convex: bool
    non_decreasing: bool
    f_zero: float

    def __call__(self, x) -> np.ndarray:
        return self.f(np.asarray(x, dtype=float))

    def at(self, x: float) -> float:
        return float(self(np.array([x]))[0])


def _square(x: np.ndarray) -> np.ndarray:
    return x * x


def _xlogx(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def bf() -> Potential:
    return Potential(name="bf", f=_square, strictly_convex=True, non_decreasing=True, f_zero=0.0)


def power(n: int) -> Potential:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidInputError("power potentials need an integer exponent n ≥ 2", {"n": n})
    n = int(n)

    def _power(x: np.ndarray) -> np.ndarray:
        return x ** n

    return Potential(name=f"power:{n}", f=_power, strictly_convex=True, non_decreasing=True, f_zero=0.0)


def xlogx() -> Potential:
    # Minimizing tr(S ln S) maximizes the von Neumann entropy.
    return Potential(name="xlogx", f=_xlogx, strictly_convex=True, non_decreasing=False, f_zero=0.0)


POTENTIAL_REGISTRY = {
    "bf": bf,
    "xlogx": xlogx,
}


def resolve_potential(name: str) -> Potential:
    """'bf' | 'power:<n>' | 'xlogx' → Potential."""
    if name in POTENTIAL_REGISTRY:
        return POTENTIAL_REGISTRY[name]()
    if name.startswith("power:"):
        exponent = name.split(":", 1)[1]
        if not exponent.isdigit():
            raise InvalidInputError("power exponent must be an integer", {"potential": name})
        return power(int(exponent))
    raise InvalidInputError("unknown potential", {"potential": name, "known": ["bf", "power:<n>", "xlogx"]})


def default_catalog() -> List[Potential]:
    return [bf(), power(3), power(4), xlogx()]


def verify_convexity(f: Potential, samples: int = 1000, seed: int = 0, scale: float = 10.0) -> bool:
    """Randomized secant test f(tx + (1−t)y) ≤ t·f(x) + (1−t)·f(y), plus f(0) = f_zero."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, scale, samples)
    y = rng.uniform(0.0, scale, samples)
    t = rng.uniform(0.0, 1.0, samples)
    lhs = f(t * x + (1 - t) * y)
    rhs = t * f(x) + (1 - t) * f(y)
    secant_ok = bool(np.all(lhs <= rhs + 1e-12 * (1.0 + np.abs(rhs))))
    return secant_ok and f.at(0.0) == f.f_zero


# ── Evaluation ───────────────────────────────────────────────────────
def eval_potential(f: Potential, S) -> float:
    return float(np.sum(f(spectrum(S))))


def eval_potential_gram(f: Potential, F: Frame) -> float:
    """tr f(G) − (m−d)·f(0)."""
    return float(np.sum(f(spectrum(gram(F))))) - (F.m - F.d) * f.f_zero


def bf_potential_double_sum(F: Frame) -> float:
    return float(np.sum(np.abs(gram(F)) ** 2))


def _check_exponent(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidInputError("n must be an integer ≥ 2", {"n": n})
    return int(n)


def _cyclic_row_sums(G: np.ndarray, n: int, budget: int) -> np.ndarray:
    """
    Row k: ∑ over i_2..i_n of ∏_j ⟨φ_{i_j}, φ_{i_{j+1}}⟩ with i_1 = i_{n+1} = k,
    enumerated term by term. ⟨φ_a, φ_b⟩ = G[b, a].
    """
    m = G.shape[0]
    if m ** n > budget:
        raise BudgetExceededError("cyclic-product enumeration exceeds the budget; use the Gram evaluation",
                                  {"m": m, "n": n, "budget": budget})
    step = G.T  # step[a, b] = ⟨φ_a, φ_b⟩
    rows = np.empty(m, dtype=np.complex128)
    for k in range(m):
        terms = step[k]
        for _ in range(n - 2):
            terms = terms[..., :, None] * step
        rows[k] = np.sum(terms * step[..., k])
    return rows


def nth_potential_products(F: Frame, n: int, budget: Optional[int] = None) -> float:
    n = _check_exponent(n)
    budget = settings.ENUMERATION_BUDGET if budget is None else budget
    total = _cyclic_row_sums(gram(F), n, budget).sum()
    if abs(total.imag) > 1e-8 * max(1.0, abs(total.real)):
        logger.warning("cyclic_sum_imaginary_residue", residue=float(total.imag), n=n)
    return float(total.real)


def nth_potential_ratio(F: Frame, n: int) -> float:
    """tr(Gⁿ)/(∑‖φ_i‖²)ⁿ, which lies in [1/d^{n−1}, 1]."""
    n = _check_exponent(n)
    if F.total == 0:
        raise InvalidInputError("ratio undefined for the zero frame")
    return float(np.sum(spectrum(gram(F)) ** n)) / F.total ** n


def row_sum_bound_check(F: Frame, n: int, budget: Optional[int] = None) -> bool:
    """max_k ⟨Gⁿ e_k, e_k⟩ ≥ (∑‖φ_i‖²)ⁿ / (m·d^{n−1}), up to 1e-9 relative slack."""
    n = _check_exponent(n)
    budget = settings.ENUMERATION_BUDGET if budget is None else budget
    rows = _cyclic_row_sums(gram(F), n, budget).real
    bound = F.total ** n / (F.m * F.d ** (n - 1))
    return bool(rows.max() >= bound - 1e-9 * max(1.0, bound))


def welch_ratio(F: Frame) -> float:
    total = F.total
    if total == 0:
        raise InvalidInputError("Welch ratio undefined for the zero frame")
    return bf_potential_double_sum(F) / total ** 2


def von_neumann_entropy(S) -> float:
    """−tr(S ln S) for a density operator (PSD, trace one)."""
    lam = spectrum(S)
    if not sums_close(float(lam.sum()), 1.0):
        raise InvalidInputError("entropy needs a trace-one operator", {"trace": float(lam.sum())})
    return -eval_potential(xlogx(), S)


# ── Bounds ───────────────────────────────────────────────────────────
def potential_bounds_simplex(f: Potential, c: float, d: int) -> Tuple[float, float]:
    """Extremes of P_f over frames in A(c): (d·f(c/d), (d−1)·f(0) + f(c))."""
    if not (math.isfinite(c) and c > 0):
        raise InvalidInputError("c must be a positive real", {"c": c})
    d = as_dimension(d)
    return d * f.at(c / d), (d - 1) * f.f_zero + f.at(c)


def potential_bounds_profile(f: Potential, a, d: int) -> Tuple[float, float]:
    """Extremes of P_f over frames in B(a), the lower one attained by the minimal spectrum."""
    a = as_norm_profile(a)
    d = as_dimension(d, a.size)
    r = d_irregularity(a, d)
    h = a[r:].sum() / (d - r)
    lower = float(np.sum(f(a[:r]))) + (d - r) * f.at(h)
    upper = (d - 1) * f.f_zero + f.at(float(a.sum()))
    return lower, upper


def majorization_monotonicity_check(f: Potential, S1, S2) -> bool:
    lam1, lam2 = spectrum(S1), spectrum(S2)
    if lam1.size != lam2.size or not majorizes(lam2, lam1):
        raise InvalidInputError("monotonicity check needs spectrum(S1) ≺ spectrum(S2)")
    return eval_potential(f, S1) <= eval_potential(f, S2) + 1e-9


# ── Local-minimality probe ───────────────────────────────────────────
class SumConstraint(BaseModel):
    """A(c): total squared norm fixed."""
    model_config = ConfigDict(frozen=True)

    c: float = Field(..., gt=0)


class NormConstraint(BaseModel):
    """B(a): every squared norm fixed, in the frame's vector order."""
    model_config = ConfigDict(frozen=True)

    a: Tuple[float, ...]

    @field_validator("a")
    @classmethod
    def _positive(cls, v):
        if not v or any(not (math.isfinite(x) and x > 0) for x in v):
            raise ValueError("squared norms must be positive and finite")
        return v


FrameConstraint = Union[SumConstraint, NormConstraint]


class ProbeOutcome(NamedTuple):
    best_frame: Frame
    best_value: float


def descent_found(base_value: float, best_value: float, margin: float = 1e-9) -> bool:
    return best_value < base_value - margin * max(1.0, abs(base_value))


def _check_membership(F: Frame, constraint: FrameConstraint) -> None:
    if isinstance(constraint, SumConstraint):
        ok = in_sum_set(F, constraint.c)
    else:
        ok = len(constraint.a) == F.m and in_norm_set(F, constraint.a)
    if not ok:
        raise InvalidInputError("frame does not satisfy the probe constraint", {"constraint": repr(constraint)})


def _probe_sample(F: Frame, f: Potential, constraint: FrameConstraint, radius: float,
                  seed: np.random.SeedSequence) -> Tuple[float, np.ndarray]:
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal(F.vectors.shape) + 1j * rng.standard_normal(F.vectors.shape)
    step = rng.uniform(0.0, 1.0) * radius / 2.0

    if isinstance(constraint, NormConstraint):
        Z *= step / np.max(np.linalg.norm(Z, axis=1))
        moved = F.vectors + Z
        lengths = np.linalg.norm(moved, axis=1)
        if np.any(lengths == 0):
            return math.inf, F.vectors
        candidate = moved * (np.sqrt(np.asarray(constraint.a)) / lengths)[:, None]
    else:
        Z *= step / np.linalg.norm(Z)
        moved = F.vectors + Z
        candidate = moved * math.sqrt(constraint.c / np.sum(np.abs(moved) ** 2))

    T = candidate.T
    value = float(np.sum(f(spectrum(T @ T.conj().T))))
    return value, candidate


def local_min_probe(
    F: Frame,
    f: Potential,
    constraint: FrameConstraint,
    radius: Optional[float] = None,
    samples: Optional[int] = None,
    seed: int = 0,
    workers: Optional[int] = None,
) -> ProbeOutcome:
    """
    Sample constraint-respecting frames within vv-distance `radius` of F and
    return the one with the lowest potential. F itself is returned when no
    sample improves on it.

    Sample i draws from SeedSequence(seed).spawn(samples)[i], so the outcome
    does not depend on `workers`; ties keep the earliest sample.
    """
    radius = settings.PROBE_RADIUS if radius is None else radius
    samples = settings.PROBE_SAMPLES if samples is None else samples
    workers = settings.PROBE_WORKERS if workers is None else workers
    if not (math.isfinite(radius) and radius >= 0):
        raise InvalidInputError("radius must be a non-negative real", {"radius": radius})
    if samples < 1:
        raise InvalidInputError("samples must be at least 1", {"samples": samples})
    _check_membership(F, constraint)

    base_value = eval_potential(f, frame_operator(F))
    if radius == 0:
        return ProbeOutcome(best_frame=F, best_value=base_value)

    seeds = np.random.SeedSequence(seed).spawn(samples)

    def run(child: np.random.SeedSequence) -> Tuple[float, np.ndarray]:
        return _probe_sample(F, f, constraint, radius, child)

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, seeds))
    else:
        results = [run(child) for child in seeds]

    best_value, best_vectors = base_value, F.vectors
    for value, vectors in results:
        if value < best_value:
            best_value, best_vectors = value, vectors

    logger.info("local_min_probe_complete", potential=f.name, samples=samples, radius=radius,
                base_value=base_value, best_value=best_value)
    return ProbeOutcome(best_frame=Frame.from_vectors(best_vectors), best_value=best_value)
