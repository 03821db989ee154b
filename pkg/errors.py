"""
Error hierarchy for the lmx toolkit.
Input problems map to CLI exit code 2, numerical failures to exit code 3.
"""

from typing import Optional, Tuple


class LauricellaError(Exception):
    """Base class for every error raised by this package."""


# ── Input errors ─────────────────────────────────────────────────────────────

class InputError(LauricellaError, ValueError):
    """Malformed input: wrong shapes, unknown ids, wrong point length."""


class ProblemFileError(InputError):
    """Structural error in a problem file, with field and line context."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        prefix = ""
        if field:
            prefix += f"{field}: "
        if line is not None:
            prefix = f"line {line}: " + prefix
        super().__init__(prefix + message)


class PreconditionError(InputError):
    """An operation was called outside its precondition."""


class HypothesisError(PreconditionError):
    """A commutation or positive-stability hypothesis does not hold."""

    def __init__(self, conditions: Tuple[str, ...], detail: str = ""):
        self.conditions = tuple(conditions)
        message = "hypothesis violated: " + "; ".join(self.conditions)
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class DomainError(PreconditionError):
    """An evaluation point lies outside a stated domain inequality."""

    def __init__(self, inequality: str, lhs: float, rhs: float):
        self.inequality = inequality
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(f"point outside domain: {inequality} fails ({lhs:.6g} vs {rhs:.6g})")


# ── Numerical errors ─────────────────────────────────────────────────────────

class NumericalError(LauricellaError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy value."""


class SpectralError(NumericalError):
    """Eigen-solver failure."""


class PoleError(NumericalError):
    """Gamma function evaluated at a pole."""


class DefectiveMatrixError(NumericalError):
    """Eigenvector matrix too ill-conditioned for functional calculus."""


class SingularDenominatorError(NumericalError):
    """A denominator Pochhammer (or shifted matrix) is singular."""

    def __init__(self, role: str, index, detail: str = ""):
        self.role = role
        self.index = index
        message = f"singular denominator for role {role} at index {index}"
        if detail:
            message += f": {detail}"
        super().__init__(message)
