"""
FrameCraft CLI: Finite Frame Design & Perturbation
==================================================
Builds frames with prescribed squared norms, evaluates convex frame
potentials against their sharp bounds, moves frames to nearby frame
operators, and probes frames for local minimality.

Every result is a JSON document on stdout (or --out); logs go to stderr.
Squared norms are used everywhere: --a 4,1,1,1 means ‖φ_1‖² = 4, …

Commands
--------
  design {tight,minimizer,schur-horn,cgu-minimizer}   construct a frame
  potential   P_f of a frame, Welch ratio and attainment of the bounds
  bound       lower/upper potential bounds for a norm profile
  perturb     polar or norm-preserving transport to a target operator
  probe       randomized local-minimality probe
  verify      norms, spectrum, frame bounds, orthogonal partition

Exit codes
----------
  0 success · 1 invalid input · 2 mathematical infeasibility · 3 no convergence

Run
---
    python -m cli design minimizer --a 4,1,1,1 --d 2
    python -m cli design tight --a 1,1,1 --d 2 --verify --out mb.json
    python -m cli potential --in mb.json --f bf
    python -m cli perturb --in mb.json --target S.json --mode norm-preserving
    python -m cli probe --in mb.json --f bf --constraint B --seed 7
"""

import argparse
import sys
from typing import Any, List, Optional

import structlog

from config import settings
from frame_core.errors import FrameCraftError, InvalidInputError, UsageError
from schemas.models import Frame
from services.frame_service import DESIGN_KINDS, PERTURB_MODES, frame_service
from utils.logging_utils import configure_logging
from utils.serialization import dumps, matrix_from_payload, parse_real_list, read_json, write_json

logger = structlog.get_logger("CLI")


class FrameCraftArgumentParser(argparse.ArgumentParser):
    """argparse exits 2 on bad arguments; we reserve 2 for infeasibility."""

    def error(self, message: str) -> None:
        raise UsageError(message, {"prog": self.prog})


# ── argument helpers ─────────────────────────────────────────────────
def _real_list(name: str):
    def parse(text: str) -> List[float]:
        return parse_real_list(text, name)
    return parse


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="Write the JSON result here instead of stdout")


def _add_frame_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="input", required=True, help="Frame JSON file")


def _add_potential(p: argparse.ArgumentParser, default: Optional[str] = "bf") -> None:
    p.add_argument("--f", dest="potential", default=default, help="bf | power:<n> | xlogx (default: bf)")


def build_parser() -> FrameCraftArgumentParser:
    parser = FrameCraftArgumentParser(prog="framecraft", description="Finite frame design and perturbation")
    parser.add_argument("--debug", action="store_true", help="Console logging at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design", help="Construct a frame")
    design.add_argument("kind", choices=DESIGN_KINDS)
    design.add_argument("--a", type=_real_list("a"), required=True, help="Squared norms, non-increasing")
    design.add_argument("--d", type=int, help="Dimension")
    design.add_argument("--n", type=int, help="Group order (cgu-minimizer)")
    design.add_argument("--lambda", dest="lam", type=_real_list("lambda"), help="Spectrum (schur-horn)")
    design.add_argument("--in", dest="input", help="Generator matrix JSON (cgu-minimizer)")
    design.add_argument("--verify", action="store_true", help="Re-check postconditions and append a report")
    _add_output(design)

    potential = sub.add_parser("potential", help="Evaluate a frame potential")
    _add_frame_input(potential)
    _add_potential(potential)
    _add_output(potential)

    bound = sub.add_parser("bound", help="Potential bounds for a norm profile")
    bound.add_argument("--a", type=_real_list("a"), required=True)
    bound.add_argument("--d", type=int, required=True)
    bound.add_argument("--n", type=int, help="CGU bounds for a cyclic group of this order")
    _add_potential(bound)
    _add_output(bound)

    perturb = sub.add_parser("perturb", help="Transport a frame to a target frame operator")
    _add_frame_input(perturb)
    perturb.add_argument("--target", required=True, help="Target operator JSON (d×d [re, im] pairs)")
    perturb.add_argument("--mode", choices=PERTURB_MODES, default="norm-preserving")
    perturb.add_argument("--tol", type=float, default=None,
                         help=f"Section solver tolerance (default: FRAMECRAFT_TOL={settings.FRAMECRAFT_TOL})")
    _add_output(perturb)

    probe = sub.add_parser("probe", help="Randomized local-minimality probe")
    _add_frame_input(probe)
    _add_potential(probe)
    probe.add_argument("--constraint", choices=("A", "B"), default="B",
                       help="A: total norm fixed, B: every norm fixed")
    probe.add_argument("--radius", type=float, default=settings.PROBE_RADIUS)
    probe.add_argument("--samples", type=int, default=settings.PROBE_SAMPLES)
    probe.add_argument("--seed", type=int, default=0)
    probe.add_argument("--workers", type=int, default=settings.PROBE_WORKERS)
    _add_output(probe)

    verify = sub.add_parser("verify", help="Report the structure of a frame")
    _add_frame_input(verify)
    verify.add_argument("--a", type=_real_list("a"), help="Expected squared norms, in vector order")
    verify.add_argument("--d", type=int, help="Expected dimension")
    _add_output(verify)

    return parser


# ── commands ─────────────────────────────────────────────────────────
def _load_frame(path: str) -> Frame:
    return Frame.from_payload(read_json(path))


def cmd_design(args: argparse.Namespace) -> Any:
    generator = matrix_from_payload(read_json(args.input)) if args.input else None
    frame, report = frame_service.design(
        args.kind, a=args.a, d=args.d, lam=args.lam, n=args.n, generator=generator, verify=args.verify,
    )
    payload = frame.to_payload()
    if report is not None:
        payload["verification"] = {**report.model_dump(), "passed": report.passed}
    return payload


def cmd_potential(args: argparse.Namespace) -> Any:
    return frame_service.potential(_load_frame(args.input), args.potential).model_dump()


def cmd_bound(args: argparse.Namespace) -> Any:
    return frame_service.bounds(args.a, args.d, args.potential, n=args.n).model_dump()


def cmd_perturb(args: argparse.Namespace) -> Any:
    frame = _load_frame(args.input)
    target = matrix_from_payload(read_json(args.target))
    return frame_service.perturb(frame, target, args.mode, tol=args.tol).to_payload()


def cmd_probe(args: argparse.Namespace) -> Any:
    report = frame_service.probe(
        _load_frame(args.input), args.potential, constraint=args.constraint,
        radius=args.radius, samples=args.samples, seed=args.seed, workers=args.workers,
    )
    return report.model_dump()


def cmd_verify(args: argparse.Namespace) -> Any:
    report = frame_service.verify(_load_frame(args.input), a=args.a, d=args.d)
    return {**report.model_dump(), "passed": report.passed}


COMMANDS = {
    "design": cmd_design,
    "potential": cmd_potential,
    "bound": cmd_bound,
    "perturb": cmd_perturb,
    "probe": cmd_probe,
    "verify": cmd_verify,
}


def _emit(result: Any, out: Optional[str]) -> None:
    if out:
        write_json(out, result)
    else:
        sys.stdout.write(dumps(result).decode() + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except FrameCraftError as exc:
        configure_logging()
        sys.stderr.write(dumps(exc.to_dict()).decode() + "\n")
        return exc.exit_code

    configure_logging(debug=True if args.debug else None)
    structlog.contextvars.bind_contextvars(command=args.command)
    try:
        _emit(COMMANDS[args.command](args), args.out)
    except FrameCraftError as exc:
        logger.warning("command_failed", error=exc.code, exit_code=exc.exit_code)
        sys.stderr.write(dumps(exc.to_dict()).decode() + "\n")
        return exc.exit_code
    except (ValueError, TypeError) as exc:
        wrapped = InvalidInputError(str(exc))
        sys.stderr.write(dumps(wrapped.to_dict()).decode() + "\n")
        return wrapped.exit_code
    finally:
        structlog.contextvars.unbind_contextvars("command")
    return 0


if __name__ == "__main__":
    sys.exit(main())
