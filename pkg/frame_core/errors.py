"""
FrameCraft error hierarchy.

Every failure a caller can act on is a FrameCraftError carrying a
machine-readable ``code`` and the process exit code the CLI maps it to:

  1  invalid input / usage
  2  mathematical infeasibility
  3  numerical non-convergence

Conditions the contract treats as information (not-a-frame, reducible Gram,
no compatible basis) are returned as values, never raised.
"""

from typing import Any, Dict, Optional


class FrameCraftError(Exception):
    code: str = "framecraft_error"
    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": self.message, **self.details}


# ── exit 1: invalid input ────────────────────────────────────────────
class InvalidInputError(FrameCraftError, ValueError):
    code = "invalid_input"
    exit_code = 1


class InvalidOrderError(InvalidInputError):
    """Generator does not satisfy U^n = I."""
    code = "invalid_order"


class NonPrimitiveError(InvalidInputError):
    """U^k = I for some 0 < k < n."""
    code = "non_primitive"


class BudgetExceededError(InvalidInputError):
    code = "budget_exceeded"


class UsageError(InvalidInputError):
    code = "usage_error"


# ── exit 2: infeasibility ────────────────────────────────────────────
class NoDescentError(FrameCraftError):
    """The vector already equals the minimal vector of its constraint set."""
    code = "no_descent"
    exit_code = 2


class StepTooLargeError(FrameCraftError):
    code = "step_too_large"
    exit_code = 2


class InfeasibleError(FrameCraftError):
    code = "infeasible"
    exit_code = 2


class InfeasibleTightError(InfeasibleError):
    code = "infeasible_tight"


class DegeneratePolarError(FrameCraftError):
    code = "degenerate_polar"
    exit_code = 2


# ── exit 3: non-convergence ──────────────────────────────────────────
class NoConvergenceError(FrameCraftError):
    code = "no_convergence"
    exit_code = 3

    def __init__(self, message: str, report: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.report = report

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        if self.report is not None:
            payload["report"] = self.report.to_payload()
        return payload
