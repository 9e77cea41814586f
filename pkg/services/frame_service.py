from typing import Optional, Sequence, Tuple

import numpy as np
import structlog

from config import settings
from frame_core.cgu import (
    block_cyclic_shift,
    cgu_irregularity,
    cgu_minimizer,
    cgu_potential_bounds,
    cyclic_group,
    repeated_profile,
)
from frame_core.errors import InvalidInputError
from frame_core.frames import (
    frame_bounds,
    frame_operator,
    gram,
    in_norm_set,
    orthogonal_partition,
    spectrum,
    vv_distance,
)
from frame_core.majorization import (
    as_dimension,
    as_norm_profile,
    constrained_minimal_vector,
    d_irregularity,
    sort_desc,
    sums_close,
)
from frame_core.perturb import norm_preserving_transport, polar_transport
from frame_core.potentials import (
    NormConstraint,
    SumConstraint,
    descent_found,
    eval_potential,
    local_min_probe,
    potential_bounds_profile,
    potential_bounds_simplex,
    resolve_potential,
    welch_ratio,
)
from frame_core.synthesis import has_minimizer_structure, minimizer_frame, schur_horn_frame, tight_frame
from schemas.models import (
    BoundsReport,
    Frame,
    FrameBoundsModel,
    PerturbResult,
    PotentialReport,
    ProbeReport,
    VerificationReport,
)

logger = structlog.get_logger("FrameService")

DESIGN_KINDS = ("tight", "minimizer", "schur-horn", "cgu-minimizer")
PERTURB_MODES = ("polar", "norm-preserving")


def _attained(value: float, bound: float) -> bool:
    return abs(value - bound) <= 1e-9 * max(1.0, abs(bound))


def _padded(x: np.ndarray, size: int) -> np.ndarray:
    return np.concatenate([x, np.zeros(size - x.size)])


class FrameService:

    def design(
        self,
        kind: str,
        a: Optional[Sequence[float]] = None,
        d: Optional[int] = None,
        lam: Optional[Sequence[float]] = None,
        n: Optional[int] = None,
        generator: Optional[np.ndarray] = None,
        verify: bool = False,
    ) -> Tuple[Frame, Optional[VerificationReport]]:
        if kind not in DESIGN_KINDS:
            raise InvalidInputError("unknown design kind", {"kind": kind, "known": list(DESIGN_KINDS)})
        if a is None:
            raise InvalidInputError("--a is required for every design")
        a = as_norm_profile(a)

        if kind == "schur-horn":
            if lam is None:
                raise InvalidInputError("schur-horn needs --lambda")
            frame = schur_horn_frame(lam, a)
            expected = np.asarray(lam, dtype=float)
            profile = a
        elif kind == "cgu-minimizer":
            if n is None:
                raise InvalidInputError("cgu-minimizer needs --n")
            if generator is None:
                if d is None or d % n:
                    raise InvalidInputError("cgu-minimizer needs --d divisible by --n or a generator file",
                                            {"d": d, "n": n})
                generator = block_cyclic_shift(d // n, n)
            group = cyclic_group(generator, n)
            frame = cgu_minimizer(group, a)
            profile = repeated_profile(a, n)
            expected = constrained_minimal_vector(profile, group.d)
        else:
            if d is None:
                raise InvalidInputError(f"{kind} needs --d")
            d = as_dimension(d, a.size)
            frame = tight_frame(a, d) if kind == "tight" else minimizer_frame(a, d)
            expected = constrained_minimal_vector(a, d)
            profile = a

        logger.info("design_complete", kind=kind, d=frame.d, m=frame.m)
        report = self.verify(frame, a=profile, expected_spectrum=expected) if verify else None
        return frame, report

    def verify(
        self,
        frame: Frame,
        a: Optional[Sequence[float]] = None,
        d: Optional[int] = None,
        expected_spectrum: Optional[Sequence[float]] = None,
    ) -> VerificationReport:
        lam = spectrum(frame_operator(frame))
        sigma = spectrum(gram(frame))
        size = max(lam.size, sigma.size)
        bounds = frame_bounds(frame)
        components = orthogonal_partition(frame)

        checks = {
            "gram_spectrum_consistent": bool(np.allclose(_padded(lam, size), _padded(sigma, size), rtol=0, atol=1e-8)),
            "trace_matches_norms": sums_close(float(lam.sum()), frame.total),
        }
        if a is not None:
            checks["norms_match"] = len(a) == frame.m and in_norm_set(frame, a)
        if d is not None:
            checks["dimension_match"] = frame.d == d
        if expected_spectrum is not None:
            target = np.asarray(expected_spectrum, dtype=float)
            checks["spectrum_match"] = target.size == lam.size and bool(
                np.allclose(lam, target, rtol=0, atol=1e-8 * max(1.0, frame.total)))

        report = VerificationReport(
            d=frame.d,
            m=frame.m,
            norms_sq=frame.norms_sq.tolist(),
            spectrum=lam.tolist(),
            frame_bounds=FrameBoundsModel(**bounds._asdict()),
            components=components,
            irreducible=len(components) == 1,
            welch_ratio=welch_ratio(frame) if frame.total > 0 else None,
            minimizer_structure=has_minimizer_structure(frame),
            checks=checks,
        )
        if not report.passed:
            logger.warning("verification_failed", failed=[k for k, ok in checks.items() if not ok])
        return report

    def potential(self, frame: Frame, name: str) -> PotentialReport:
        f = resolve_potential(name)
        value = eval_potential(f, frame_operator(frame))
        simplex = potential_bounds_simplex(f, frame.total, frame.d)

        profile = None
        norms = sort_desc(frame.norms_sq)
        if frame.d <= frame.m and np.all(norms > 0):
            profile = potential_bounds_profile(f, norms, frame.d)

        return PotentialReport(
            potential=f.name,
            value=value,
            welch_ratio=welch_ratio(frame) if f.name == "bf" else None,
            bounds_simplex=simplex,
            bounds_profile=profile,
            attained_lower=_attained(value, profile[0]) if profile else None,
            attained_upper=_attained(value, simplex[1]),
        )

    def bounds(self, a: Sequence[float], d: int, name: str, n: Optional[int] = None) -> BoundsReport:
        f = resolve_potential(name)
        a = as_norm_profile(a)
        if n is None:
            lower, upper = potential_bounds_profile(f, a, d)
            irregularity = d_irregularity(a, d)
            minimal = constrained_minimal_vector(a, d)
        else:
            lower, upper = cgu_potential_bounds(f, a, d, n)
            irregularity = cgu_irregularity(a, d, n).r0
            minimal = constrained_minimal_vector(repeated_profile(a, n), d)
        return BoundsReport(potential=f.name, a=a.tolist(), d=d, n=n, irregularity=irregularity,
                            minimal_spectrum=minimal.tolist(), lower=lower, upper=upper)

    def perturb(self, frame: Frame, S_target: np.ndarray, mode: str, tol: Optional[float] = None) -> PerturbResult:
        if mode not in PERTURB_MODES:
            raise InvalidInputError("unknown perturb mode", {"mode": mode, "known": list(PERTURB_MODES)})
        report = None
        if mode == "polar":
            moved = polar_transport(frame, S_target)
        else:
            moved, report = norm_preserving_transport(frame, S_target, tol=tol)
        return PerturbResult(mode=mode, frame=moved.to_payload(), vv_distance=vv_distance(frame, moved), report=report)

    def probe(
        self,
        frame: Frame,
        name: str,
        constraint: str = "B",
        radius: Optional[float] = None,
        samples: Optional[int] = None,
        seed: int = 0,
        workers: Optional[int] = None,
    ) -> ProbeReport:
        f = resolve_potential(name)
        radius = settings.PROBE_RADIUS if radius is None else radius
        samples = settings.PROBE_SAMPLES if samples is None else samples
        if constraint == "A":
            fixed = SumConstraint(c=frame.total)
        elif constraint == "B":
            fixed = NormConstraint(a=tuple(frame.norms_sq.tolist()))
        else:
            raise InvalidInputError("constraint must be A or B", {"constraint": constraint})

        base_value = eval_potential(f, frame_operator(frame))
        outcome = local_min_probe(frame, f, fixed, radius=radius, samples=samples, seed=seed, workers=workers)
        return ProbeReport(
            potential=f.name,
            constraint=constraint,
            radius=radius,
            samples=samples,
            seed=seed,
            base_value=base_value,
            best_value=outcome.best_value,
            descent_found=descent_found(base_value, outcome.best_value),
            best_frame=outcome.best_frame.to_payload(),
        )


frame_service = FrameService()
