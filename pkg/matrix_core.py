"""
Matrix Core - functional calculus primitives
Spectral summaries, scalar-base matrix powers, gamma / reciprocal gamma / beta
matrix functions, Pochhammer products and commutator diagnostics.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from dotenv import load_dotenv
from scipy import linalg as sla
from scipy import special

from errors import (
    DefectiveMatrixError,
    InputError,
    NumericalError,
    PoleError,
    PreconditionError,
    SingularDenominatorError,
    SpectralError,
)
from quadrature_rules import unit_interval_rule

load_dotenv()

LOG = logging.getLogger(__name__)

ComplexMatrix = np.ndarray

# ── Configuration ────────────────────────────────────────────────────────────
DEFAULT_EIG_TOL = 1e-10
DEFAULT_COMMUTE_TOL = 1e-10
DEFAULT_VALUE_TOL = 1e-9
DEFAULT_EIGCOND_CAP = 1e8

# Reciprocal condition below which a shifted denominator counts as singular.
SINGULAR_RCOND = 1e-14


@dataclass(frozen=True)
class Tolerances:
    """Tolerances shared by every comparison in the package."""
    eig_tol: float = DEFAULT_EIG_TOL
    commute_tol: float = DEFAULT_COMMUTE_TOL
    value_tol: float = DEFAULT_VALUE_TOL
    eigcond_cap: float = DEFAULT_EIGCOND_CAP

    def __post_init__(self):
        for name in ("eig_tol", "commute_tol", "value_tol", "eigcond_cap"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise InputError(f"tolerance {name} must be a finite nonnegative number, got {value}")

    @classmethod
    def from_env(cls) -> "Tolerances":
        """Build tolerances from LMX_* environment variables (see .env.example)."""
        return cls(
            eig_tol=float(os.getenv("LMX_EIG_TOL", DEFAULT_EIG_TOL)),
            commute_tol=float(os.getenv("LMX_COMMUTE_TOL", DEFAULT_COMMUTE_TOL)),
            value_tol=float(os.getenv("LMX_VALUE_TOL", DEFAULT_VALUE_TOL)),
            eigcond_cap=float(os.getenv("LMX_EIGCOND_CAP", DEFAULT_EIGCOND_CAP)),
        )

    def commutes(self, residual: float, norm1: float, norm2: float) -> bool:
        return residual <= self.commute_tol * norm1 * norm2


DEFAULT_TOLERANCES = Tolerances.from_env()


def _tol(tol: Optional[Tolerances]) -> Tolerances:
    return tol if tol is not None else DEFAULT_TOLERANCES


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues with multiplicity, spectral abscissas and eigenvector conditioning."""
    eigenvalues: Tuple[complex, ...]
    alpha: float
    beta: float
    eigcond: float
    defective: bool

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "alpha": self.alpha,
            "beta": self.beta,
            "eigcond": self.eigcond if math.isfinite(self.eigcond) else "inf",
            "defective": self.defective,
        }


# ── Matrix values ────────────────────────────────────────────────────────────

def as_matrix(value, name: str = "matrix") -> ComplexMatrix:
    """Return a read-only complex128 square matrix; scalars become 1x1."""
    arr = np.array(value, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise InputError(f"{name} must be a nonempty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def identity(order: int) -> ComplexMatrix:
    return np.eye(order, dtype=np.complex128)


def frobenius(M: ComplexMatrix) -> float:
    return float(np.linalg.norm(M, "fro"))


def _eigensystem(M: ComplexMatrix, name: str):
    try:
        eigenvalues, vectors = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigen-solver did not converge for {name}: {exc}") from exc
    with np.errstate(all="ignore"):
        eigcond = float(np.linalg.cond(vectors))
    if not math.isfinite(eigcond):
        eigcond = math.inf
    return eigenvalues, vectors, eigcond


def spectral_summary(M, tol: Optional[Tolerances] = None, name: str = "matrix") -> SpectralSummary:
    """Eigenvalues, alpha = max real part, beta = min real part, eigcond and defective flag."""
    tol = _tol(tol)
    M = as_matrix(M, name)
    eigenvalues, _, eigcond = _eigensystem(M, name)
    real = eigenvalues.real
    return SpectralSummary(
        eigenvalues=tuple(complex(z) for z in eigenvalues),
        alpha=float(real.max()),
        beta=float(real.min()),
        eigcond=eigcond,
        defective=eigcond > tol.eigcond_cap,
    )


def is_positive_stable(M, tol: Optional[Tolerances] = None, name: str = "matrix") -> bool:
    return spectral_summary(M, tol, name).beta > 0


def _require_diagonalizable(name: str, eigcond: float, tol: Tolerances) -> None:
    if eigcond > tol.eigcond_cap:
        raise DefectiveMatrixError(
            f"{name} is defective or nearly so (eigenvector condition {eigcond:.3g} > cap "
            f"{tol.eigcond_cap:.3g}); perturb the parameters slightly"
        )


def checked_inverse(M: ComplexMatrix, role: str, index) -> ComplexMatrix:
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(M)
    if not math.isfinite(cond) or cond * SINGULAR_RCOND > 1.0:
        raise SingularDenominatorError(role, index, f"condition number {cond:.3g}")
    return np.linalg.inv(M)


# ── Powers ───────────────────────────────────────────────────────────────────

class ExponentKernel:
    """
    Raises many scalar bases to one matrix exponent, t^E = exp(E ln t).
    The eigensystem of E is computed once; defective exponents fall back to
    batched scaling-and-squaring exponentials.
    """

    def __init__(self, E, tol: Optional[Tolerances] = None, name: str = "exponent"):
        tol = _tol(tol)
        self.E = as_matrix(E, name)
        self.order = self.E.shape[0]
        eigenvalues, vectors, eigcond = _eigensystem(self.E, name)
        self.diagonalizable = eigcond <= tol.eigcond_cap
        if self.diagonalizable:
            self._w = eigenvalues
            self._V = vectors
            self._Vinv = np.linalg.inv(vectors)
        else:
            LOG.warning("%s is defective (eigcond %.3g); using expm for powers", name, eigcond)

    def powers(self, bases) -> np.ndarray:
        """Return an array of shape (N, r, r) holding bases[k]**E."""
        bases = np.asarray(bases)
        logs = np.log(bases.astype(np.complex128))
        if self.diagonalizable:
            scaled = np.exp(logs[:, None] * self._w[None, :])
            return (self._V[None, :, :] * scaled[:, None, :]) @ self._Vinv
        return sla.expm(logs[:, None, None] * self.E[None, :, :])

    def power(self, t) -> ComplexMatrix:
        return self.powers(np.array([t]))[0]


def scalar_power(t, E, tol: Optional[Tolerances] = None) -> ComplexMatrix:
    """t^E = exp(E ln t) for t > 0 (complex t uses the principal logarithm)."""
    if isinstance(t, (int, float, np.floating, np.integer)) and not t > 0:
        raise PreconditionError(f"scalar_power needs a positive base, got {t}")
    if t == 0:
        raise PreconditionError("scalar_power needs a nonzero base")
    E = as_matrix(E, "exponent")
    if t == 1:
        return identity(E.shape[0])
    return ExponentKernel(E, tol).power(t)


# ── Gamma family ─────────────────────────────────────────────────────────────

def _check_poles(eigenvalues: np.ndarray, name: str, tol: Tolerances) -> None:
    for lam in eigenvalues:
        nearest = round(lam.real)
        if (nearest <= 0 and abs(lam.real - nearest) <= tol.eig_tol
                and abs(lam.imag) <= tol.eig_tol):
            raise PoleError(f"eigenvalue {complex(lam):.6g} of {name} is a pole of the gamma function")


def matrix_gamma(A, tol: Optional[Tolerances] = None, name: str = "A") -> ComplexMatrix:
    """Gamma(A) = V diag(gamma(lambda_i)) V^-1."""
    tol = _tol(tol)
    A = as_matrix(A, name)
    eigenvalues, vectors, eigcond = _eigensystem(A, name)
    _check_poles(eigenvalues, name, tol)
    _require_diagonalizable(name, eigcond, tol)
    return (vectors * special.gamma(eigenvalues)) @ np.linalg.inv(vectors)


def pochhammer(A, n: int) -> ComplexMatrix:
    """(A)_n = A(A+I)...(A+(n-1)I), multiplied left to right."""
    if n < 0:
        raise InputError(f"pochhammer order must be nonnegative, got {n}")
    A = as_matrix(A)
    I = identity(A.shape[0])
    result = I
    for k in range(n):
        result = result @ (A + k * I)
    return result


def reciprocal_shift(beta: float) -> int:
    return max(0, math.ceil(1 - beta) + 1)


def reciprocal_gamma(A, tol: Optional[Tolerances] = None, name: str = "A") -> ComplexMatrix:
    """Gamma^-1(A) = (A)_n Gamma^-1(A + nI), with n chosen so A + nI is positive stable."""
    tol = _tol(tol)
    A = as_matrix(A, name)
    n = reciprocal_shift(spectral_summary(A, tol, name).beta)
    shifted = A + n * identity(A.shape[0])
    return pochhammer(A, n) @ np.linalg.inv(matrix_gamma(shifted, tol, f"{name}+{n}I"))


def gamma_quotient(numerators: Sequence, denominators: Sequence = (),
                   tol: Optional[Tolerances] = None) -> ComplexMatrix:
    """Gamma(N1)...Gamma(Np) Gamma^-1(D1)...Gamma^-1(Dq), in that order."""
    factors = [matrix_gamma(M, tol, f"numerator {k + 1}") for k, M in enumerate(numerators)]
    factors += [reciprocal_gamma(M, tol, f"denominator {k + 1}") for k, M in enumerate(denominators)]
    if not factors:
        raise InputError("gamma_quotient needs at least one matrix")
    result = factors[0]
    for F in factors[1:]:
        result = result @ F
    return result


def gamma_limit_approx(A, n: int) -> ComplexMatrix:
    """
    (n-1)! (A)_n^-1 n^A, the limit form of Gamma(A).
    Evaluated as A^-1 (I + A/1)^-1 ... (I + A/(n-1))^-1 n^A, which never forms (n-1)!.
    """
    if n < 1:
        raise InputError(f"gamma_limit_approx needs n >= 1, got {n}")
    A = as_matrix(A)
    I = identity(A.shape[0])
    result = checked_inverse(A, "A", 0)
    for k in range(1, n):
        result = result @ checked_inverse(I + A / k, "A", k)
    return result @ scalar_power(float(n), A)


def beta_matrix(A, B, level: int = 16, tol: Optional[Tolerances] = None) -> ComplexMatrix:
    """B(A, B) = integral over [0,1] of t^(A-I) (1-t)^(B-I), by tanh-sinh quadrature."""
    tol = _tol(tol)
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    _require_same_order(A, B)
    for name, M in (("A", A), ("B", B)):
        if not is_positive_stable(M, tol, name):
            raise PreconditionError(f"beta_matrix needs positive stable {name}")
    I = identity(A.shape[0])
    rule = unit_interval_rule(level)
    left = ExponentKernel(A - I, tol, "A-I").powers(rule.nodes)
    right = ExponentKernel(B - I, tol, "B-I").powers(rule.complements)
    value = np.einsum("k,kij->ij", rule.weights, left @ right)

    if tol.commutes(commute_residual(A, B), frobenius(A), frobenius(B)):
        closed = gamma_quotient([A, B], [A + B], tol)
        gap = frobenius(value - closed)
        LOG.debug("beta quadrature vs gamma form: %.3e", gap)
        if gap > tol.value_tol * max(1.0, frobenius(closed)):
            raise NumericalError(f"beta quadrature disagrees with the gamma form by {gap:.3e}; "
                                 f"raise the quadrature level (now {level})")
    return value


def commute_residual(M1, M2) -> float:
    """Frobenius norm of M1 M2 - M2 M1."""
    M1 = as_matrix(M1, "M1")
    M2 = as_matrix(M2, "M2")
    _require_same_order(M1, M2)
    return frobenius(M1 @ M2 - M2 @ M1)


def _require_same_order(M1: ComplexMatrix, M2: ComplexMatrix) -> None:
    if M1.shape != M2.shape:
        raise InputError(f"matrix orders differ: {M1.shape[0]} vs {M2.shape[0]}")


def schur_exponential_bound(A, t: float) -> float:
    """Upper bound e^(t alpha(A)) sum_{k<r} (||A|| sqrt(r) t)^k / k! for ||e^(tA)||."""
    A = as_matrix(A)
    r = A.shape[0]
    alpha = spectral_summary(A).alpha
    scale = frobenius(A) * math.sqrt(r) * t
    return math.exp(t * alpha) * sum(scale ** k / math.factorial(k) for k in range(r))

