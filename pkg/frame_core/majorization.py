"""
Majorization toolkit: the preorder b ≺ c, the feasibility sets

    K(c) = {b ∈ ℝ^d : b ≥ 0, ∑ b_i = c}
    P(a) = {b ∈ ℝ^d : b ≥ 0, ∑_{i≤k} b↓_i ≥ ∑_{i≤k} a_i (k ≤ d), ∑ b_i = ∑ a_i}

their majorization-minimal vectors, the d-irregularity of a norm profile,
and the strict-decrease pinch step that moves mass between two adjacent
sorted coordinates.

All vectors are treated as multisets: comparisons are always made between
sorted copies and inputs are never mutated.
"""

import math
from typing import List, Optional, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator

from frame_core.errors import InvalidInputError, NoDescentError, StepTooLargeError

logger = structlog.get_logger("Majorization")

# Equality of totals is relative; partial-sum dominance gets an absolute
# slack scaled by max(1, |total|).
SUM_RTOL = 1e-10
PARTIAL_ATOL = 1e-12


# ── Validation helpers ───────────────────────────────────────────────
def as_rvec(v, name: str = "v") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be a 1-D real vector", {"shape": list(arr.shape)})
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def as_norm_profile(a, name: str = "a") -> np.ndarray:
    arr = as_rvec(a, name)
    if arr.size == 0:
        raise InvalidInputError(f"{name} must be non-empty")
    if np.any(arr <= 0):
        raise InvalidInputError(f"{name} must be strictly positive (squared norms)")
    if np.any(np.diff(arr) > partial_slack(arr.sum())):
        raise InvalidInputError(f"{name} must be non-increasing", {name: arr.tolist()})
    return arr


def as_spectrum(lam, name: str = "lambda") -> np.ndarray:
    arr = as_rvec(lam, name)
    if arr.size == 0:
        raise InvalidInputError(f"{name} must be non-empty")
    if np.any(arr < 0):
        raise InvalidInputError(f"{name} must be non-negative")
    if np.any(np.diff(arr) > partial_slack(arr.sum())):
        raise InvalidInputError(f"{name} must be non-increasing", {name: arr.tolist()})
    return arr


def as_dimension(d, m: Optional[int] = None) -> int:
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidInputError("d must be a positive integer", {"d": d})
    d = int(d)
    if m is not None and d > m:
        raise InvalidInputError("d must not exceed the number of vectors m", {"d": d, "m": m})
    return d


def sums_close(x: float, y: float) -> bool:
    return abs(x - y) <= SUM_RTOL * max(abs(x), abs(y), 1.0)


def partial_slack(total: float) -> float:
    return PARTIAL_ATOL * max(1.0, abs(total))


# ── Constraint sets for the pinch step ───────────────────────────────
class Simplex(BaseModel):
    """K(c): non-negative vectors of total c."""
    model_config = ConfigDict(frozen=True)

    c: float = Field(..., gt=0, description="Common total of the set")


class Polytope(BaseModel):
    """P(a): vectors in ℝ^d dominating the profile a in partial sums."""
    model_config = ConfigDict(frozen=True)

    a: Tuple[float, ...] = Field(..., description="Non-increasing squared norms")
    d: int = Field(..., ge=1)

    @field_validator("a", mode="before")
    @classmethod
    def _profile(cls, v):
        return tuple(as_norm_profile(v).tolist())


Constraint = Union[Simplex, Polytope]


# ── Operations ───────────────────────────────────────────────────────
def sort_desc(v) -> np.ndarray:
    """Non-increasing rearrangement; ties keep their original order."""
    arr = as_rvec(v)
    return arr[np.argsort(-arr, kind="stable")]


def majorizes(c, b) -> bool:
    """True iff b ≺ c."""
    c = as_rvec(c, "c")
    b = as_rvec(b, "b")
    if c.shape != b.shape:
        raise InvalidInputError("majorization needs vectors of equal length", {"len_c": c.size, "len_b": b.size})
    if c.size == 0:
        raise InvalidInputError("majorization needs non-empty vectors")
    cb = np.cumsum(sort_desc(b))
    cc = np.cumsum(sort_desc(c))
    if not sums_close(cb[-1], cc[-1]):
        return False
    return bool(np.all(cb[:-1] <= cc[:-1] + partial_slack(cc[-1])))


def d_irregularity(a, d: int) -> int:
    """r_d(a) = max{1 ≤ j ≤ d−1 : (d−j)·a_j > ∑_{i>j} a_i}, or 0 if empty."""
    a = as_norm_profile(a)
    d = as_dimension(d, a.size)
    tails = a.sum() - np.cumsum(a)
    slack = partial_slack(a.sum())
    r = 0
    for j in range(1, d):
        if (d - j) * a[j - 1] > tails[j - 1] + slack:
            r = j
    return r


def uniform_minimal_vector(c: float, d: int) -> np.ndarray:
    if not (math.isfinite(c) and c > 0):
        raise InvalidInputError("c must be a positive real", {"c": c})
    d = as_dimension(d)
    return np.full(d, c / d)


def constrained_minimal_vector(a, d: int) -> np.ndarray:
    """The ≺-minimum of P(a): (a_1, …, a_r, h, …, h) with r = r_d(a)."""
    a = as_norm_profile(a)
    d = as_dimension(d, a.size)
    r = d_irregularity(a, d)
    h = a[r:].sum() / (d - r)
    return np.concatenate([a[:r], np.full(d - r, h)])


def in_feasible_set(b, a, d: int) -> bool:
    """Membership b ∈ P(a)."""
    b = as_rvec(b, "b")
    a = as_norm_profile(a)
    d = as_dimension(d, a.size)
    if b.size != d:
        raise InvalidInputError("b must have length d", {"len_b": b.size, "d": d})
    if np.any(b < 0):
        return False
    total = a.sum()
    if not sums_close(b.sum(), total):
        return False
    sb = np.cumsum(sort_desc(b))
    sa = np.cumsum(a)[:d]
    return bool(np.all(sb >= sa - partial_slack(total)))


def _in_simplex(b: np.ndarray, c: float) -> bool:
    return bool(np.all(b >= 0)) and sums_close(b.sum(), c)


def pinch_step(b, epsilon: float, constraint: Constraint) -> np.ndarray:
    """
    Move δ = ε/√2 of mass from b↓_j to b↓_{j+1} for the smallest admissible j.

    The result is sorted, strictly below b in the majorization order,
    at Euclidean distance exactly ε from b↓, and stays in the constraint set.
    """
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise InvalidInputError("epsilon must be a positive real", {"epsilon": epsilon})
    bs = sort_desc(b)
    d = bs.size

    if isinstance(constraint, Simplex):
        if not _in_simplex(bs, constraint.c):
            raise InvalidInputError("b is not in K(c)", {"c": constraint.c})
        minimal = uniform_minimal_vector(constraint.c, d)
        prefix_floor = None
        total = constraint.c
    else:
        if constraint.d != d:
            raise InvalidInputError("b must have length d", {"len_b": d, "d": constraint.d})
        if not in_feasible_set(bs, constraint.a, d):
            raise InvalidInputError("b is not in P(a)")
        minimal = constrained_minimal_vector(constraint.a, d)
        prefix_floor = np.cumsum(constraint.a)[:d]
        total = float(np.sum(constraint.a))

    slack = partial_slack(total)
    if np.allclose(bs, minimal, rtol=0.0, atol=slack):
        raise NoDescentError("b already equals the minimal vector of its constraint set",
                             {"minimal": minimal.tolist()})

    prefix_b = np.cumsum(bs)
    delta = epsilon / math.sqrt(2.0)
    admissible: List[float] = []
    for j in range(d - 1):
        room = (bs[j] - bs[j + 1]) / 2.0
        if room <= slack:
            continue
        if prefix_floor is not None:
            surplus = prefix_b[j] - prefix_floor[j]
            if surplus <= slack:
                continue
            room = min(room, surplus)
        if delta <= room:
            out = bs.copy()
            out[j] -= delta
            out[j + 1] += delta
            logger.debug("pinch_step", index=j, epsilon=epsilon)
            return out
        admissible.append(room)

    if not admissible:
        raise NoDescentError("no index admits a strict transfer", {"b": bs.tolist()})
    raise StepTooLargeError("epsilon too large for every admissible index",
                            {"epsilon": epsilon, "max_epsilon": math.sqrt(2.0) * max(admissible)})


# ── Samplers and descent chains ──────────────────────────────────────
def sample_simplex(c: float, d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of K(c)."""
    d = as_dimension(d)
    return c * rng.dirichlet(np.ones(d))


def sample_feasible_spectrum(a, d: int, rng: np.random.Generator) -> np.ndarray:
    """Random sorted member of P(a) (convex hull of v, (∑a)e_1 and a random draw)."""
    a = as_norm_profile(a)
    d = as_dimension(d, a.size)
    total = float(a.sum())
    points = [constrained_minimal_vector(a, d), np.concatenate([[total], np.zeros(d - 1)])]
    draw = sort_desc(total * rng.dirichlet(np.ones(d)))
    if in_feasible_set(draw, a, d):
        points.append(draw)
    weights = rng.dirichlet(np.ones(len(points)))
    return sort_desc(weights @ np.vstack(points))


def pinch_descent(b, constraint: Constraint, epsilon: float, max_steps: int = 64) -> List[np.ndarray]:
    """Chain b↓ ≻ b_1 ≻ b_2 ≻ … of pinch steps; ε halves when a step is too large."""
    path = [sort_desc(b)]
    eps = epsilon
    while len(path) <= max_steps and eps > 1e-14:
        try:
            path.append(pinch_step(path[-1], eps, constraint))
        except StepTooLargeError as exc:
            eps = min(eps / 2.0, exc.details["max_epsilon"])
        except NoDescentError:
            break
    return path
