"""
Cyclic geometrically uniform (CGU) frames: orbits {U^s φ_j} of seed
vectors under a finite cyclic group of unitaries, their repeated norm
profile and irregularity, and the CGU minimizer of every convex potential.

Orbits are laid out seed-major: vector j·n + s is U^s φ_j, so the norm
profile of the orbit is exactly repeated_profile(a, n).
"""

from typing import NamedTuple, Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

from frame_core.errors import (
    FrameCraftError,
    InfeasibleError,
    InvalidInputError,
    InvalidOrderError,
    NonPrimitiveError,
)
from frame_core.majorization import as_dimension, as_norm_profile, d_irregularity
from frame_core.potentials import Potential
from frame_core.synthesis import is_unitary, minimizer_frame
from schemas.models import Frame

logger = structlog.get_logger("CGU")

ORDER_ATOL = 1e-9
PRIMITIVE_ATOL = 1e-6
BASIS_ATOL = 1e-9


class CyclicUnitaryGroup(BaseModel):
    """{U^0, …, U^{n−1}} with U^n = I and n the exact order of U."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    generator: np.ndarray
    order: int
    elements: Tuple[np.ndarray, ...]

    @property
    def d(self) -> int:
        return self.generator.shape[0]


class CguIrregularity(NamedTuple):
    r: int
    r0: int


def _positive_int(value, name: str) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise InvalidInputError(f"{name} must be a positive integer", {name: value})
    return int(value)


def cyclic_group(U, n: int) -> CyclicUnitaryGroup:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidInputError("generator must be a square matrix", {"shape": list(U.shape)})
    n = _positive_int(n, "n")
    if not is_unitary(U, atol=ORDER_ATOL):
        raise InvalidInputError("generator is not unitary")

    identity = np.eye(U.shape[0])
    powers = [identity.astype(np.complex128)]
    for _ in range(1, n):
        powers.append(powers[-1] @ U)
    if np.max(np.abs(powers[-1] @ U - identity)) > ORDER_ATOL:
        raise InvalidOrderError("U^n differs from the identity", {"n": n})
    for k in range(1, n):
        if np.max(np.abs(powers[k] - identity)) <= PRIMITIVE_ATOL:
            raise NonPrimitiveError("U has order smaller than n", {"n": n, "order_divisor": k})

    for P in powers:
        P.setflags(write=False)
    generator = U.copy()
    generator.setflags(write=False)
    return CyclicUnitaryGroup(generator=generator, order=n, elements=tuple(powers))


def block_cyclic_shift(N: int, n: int) -> np.ndarray:
    """Generator on ℂ^{nN} with U e_{kN+j} = e_{((k+1) mod n)N + j}."""
    N = _positive_int(N, "N")
    n = _positive_int(n, "n")
    U = np.zeros((n * N, n * N))
    for k in range(n):
        for j in range(N):
            U[((k + 1) % n) * N + j, k * N + j] = 1.0
    return U


def cgu_frame(G: CyclicUnitaryGroup, seeds: Frame) -> Frame:
    if seeds.d != G.d:
        raise InvalidInputError("seed dimension must match the group", {"seed_d": seeds.d, "group_d": G.d})
    powers = np.stack(G.elements)
    orbit = np.einsum("sab,jb->jsa", powers, seeds.vectors)
    return Frame.from_vectors(orbit.reshape(seeds.m * G.order, G.d))


def repeated_profile(a, n: int) -> np.ndarray:
    return np.repeat(as_norm_profile(a), _positive_int(n, "n"))


def cgu_irregularity(a, d: int, n: int) -> CguIrregularity:
    """r = max{j : (d/n − j)·a_j > ∑_{k>j} a_k} and r0 = n·r, the irregularity of the orbit profile."""
    a = as_norm_profile(a)
    d = as_dimension(d)
    n = _positive_int(n, "n")
    if d % n:
        raise InvalidInputError("n must divide d", {"d": d, "n": n})
    N = d // n
    r = d_irregularity(a, as_dimension(N, a.size))
    r0 = d_irregularity(repeated_profile(a, n), d)
    if r0 != n * r:
        logger.error("cgu_irregularity_mismatch", r=r, r0=r0, n=n)
        raise FrameCraftError("orbit irregularity disagrees with n·r", {"r": r, "r0": r0, "n": n})
    return CguIrregularity(r=r, r0=r0)


def compatible_basis(G: CyclicUnitaryGroup) -> Optional[np.ndarray]:
    """
    N = d/n seeds {e_j} with {U^k e_j} an orthonormal basis, or None.

    Candidates are the block seeds of a block cyclic shift in either
    coordinate grouping (k-major e_j, or j-major e_{jn}); each is verified.
    """
    n, d = G.order, G.d
    if d % n:
        return None
    N = d // n
    identity = np.eye(d)
    for positions in (np.arange(N), np.arange(N) * n):
        seeds = identity[positions].astype(np.complex128)
        orbit = cgu_frame(G, Frame.from_vectors(seeds)).vectors
        if np.max(np.abs(orbit.conj() @ orbit.T - identity)) <= BASIS_ATOL:
            return seeds
    logger.info("compatible_basis_not_found", d=d, n=n)
    return None


def cgu_minimizer(G: CyclicUnitaryGroup, a) -> Frame:
    """
    Orbit of {√a_i e_i}_{i<r} ∪ (tight frame on span{e_r, …, e_{N−1}}),
    written in a compatible basis {e_j}.
    """
    a = as_norm_profile(a)
    n, d = G.order, G.d
    if d % n:
        raise InvalidInputError("n must divide d", {"d": d, "n": n})
    basis = compatible_basis(G)
    if basis is None:
        raise InfeasibleError("no compatible orthonormal basis for this group", {"d": d, "n": n})
    N = d // n
    if a.size < N:
        raise InvalidInputError("need at least d/n seeds", {"m": int(a.size), "N": N})

    coefficients = minimizer_frame(a, N).vectors
    seeds = Frame.from_vectors(coefficients @ basis)
    logger.info("cgu_minimizer_built", d=d, n=n, m=int(a.size))
    return cgu_frame(G, seeds)


def cgu_potential_bounds(f: Potential, a, d: int, n: int) -> Tuple[float, float]:
    """(n·{∑_{i<r} f(a_i) + (N−r)·f(h)}, (d−1)·f(0) + f(n·∑a)) with N = d/n."""
    a = as_norm_profile(a)
    r, _ = cgu_irregularity(a, d, n)
    N = d // n
    h = a[r:].sum() / (N - r)
    lower = n * (float(np.sum(f(a[:r]))) + (N - r) * f.at(h))
    upper = (d - 1) * f.f_zero + f.at(n * float(a.sum()))
    return lower, upper


def random_cgu_frame(G: CyclicUnitaryGroup, a, rng: np.random.Generator) -> Frame:
    """Orbit of random seeds with ‖φ_i‖² = a_i."""
    a = as_norm_profile(a)
    Z = rng.standard_normal((a.size, G.d)) + 1j * rng.standard_normal((a.size, G.d))
    Z *= (np.sqrt(a) / np.linalg.norm(Z, axis=1))[:, None]
    return cgu_frame(G, Frame.from_vectors(Z))
