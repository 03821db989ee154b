"""
PDE Verifier
Checks the transcribed differential systems against the series, exactly at the
coefficient level and numerically at points, and probes which commutation
hypotheses the systems actually need.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from function_catalog import CommutationFamily
from matrix_core import ComplexMatrix, frobenius
from pde_systems import (
    TAG_LOWERCASE_U,
    TAG_RIGHT_PRODUCT,
    OperatorTerm,
    PdeSystemId,
    system_for,
    system_ids,
    system_terms,
)
from sampling import rng_for, violating_draw
from series_engine import (
    FunctionSpec,
    MultiIndex,
    SeriesCoefficients,
    TruncationPolicy,
    as_point,
    evaluate_partials,
    falling_factorial,
    multi_indices,
    shell,
)
from verification_report import VerificationReport

LOG = logging.getLogger(__name__)

# ── Configuration ────────────────────────────────────────────────────────────
DEFAULT_SWEEP_DEGREE = int(os.getenv("LMX_SWEEP_DEGREE", "6"))
DEFAULT_POINTWISE_TOL = float(os.getenv("LMX_POINTWISE_TOL", "1e-6"))
COEFFICIENT_TOL = 1e-10
# Relative residual above which a probe counts a violation as detected.
DETECTION_THRESHOLD = 1e-8


@dataclass(frozen=True)
class SweepEntry:
    id: PdeSystemId
    index: Tuple[int, ...]
    residual: float
    scale: float

    @property
    def relative(self) -> float:
        return self.residual / self.scale if self.scale > 0 else self.residual


# ── Coefficient level ────────────────────────────────────────────────────────

def _residual_parts(terms: Iterable[OperatorTerm], spec: FunctionSpec, idx: Tuple[int, ...],
                    coefficients: SeriesCoefficients) -> Tuple[ComplexMatrix, float]:
    """Coefficient of x^idx in sum(L x^beta d^alpha U R), and the sum of the term norms."""
    r = spec.order
    total = np.zeros((r, r), dtype=np.complex128)
    scale = 0.0
    for term in terms:
        base = [m - b for m, b in zip(idx, term.monomial)]
        if any(m < 0 for m in base):
            continue
        k = tuple(m + a for m, a in zip(base, term.derivative))
        weight = term.coefficient * math.prod(falling_factorial(ki, a) for ki, a in zip(k, term.derivative))
        contribution = weight * (term.left_matrix(spec.params, r) @ coefficients(k)
                                 @ term.right_matrix(spec.params, r))
        total = total + contribution
        scale += frobenius(contribution)
    return total, scale


def coefficient_residual(id: PdeSystemId, spec: FunctionSpec, idx, reading: str = "intended",
                         coefficients: Optional[SeriesCoefficients] = None) -> ComplexMatrix:
    """Coefficient of x^idx in the residual of one equation applied to the full series."""
    idx = MultiIndex.of(idx, spec.n).components
    residual, _ = _residual_parts(system_terms(id, spec, reading), spec, idx,
                                  coefficients or SeriesCoefficients(spec))
    return residual


def coefficient_sweep(system: str, spec: FunctionSpec, max_degree: int = DEFAULT_SWEEP_DEGREE,
                      reading: str = "intended",
                      coefficients: Optional[SeriesCoefficients] = None) -> List[SweepEntry]:
    """Residual of every equation of `system` at every multi-index of total degree <= max_degree."""
    coefficients = coefficients or SeriesCoefficients(spec)
    entries = []
    for eq in system_ids(system, spec.n):
        terms = system_terms(eq, spec, reading)
        for idx in multi_indices(spec.n, max_degree):
            residual, scale = _residual_parts(terms, spec, idx, coefficients)
            entries.append(SweepEntry(eq, idx, frobenius(residual), scale))
    return entries


def worst_entries(entries: Sequence[SweepEntry]) -> List[SweepEntry]:
    """Largest relative residual per equation."""
    worst = {}
    for entry in entries:
        current = worst.get(entry.id)
        if current is None or entry.relative > current.relative:
            worst[entry.id] = entry
    return list(worst.values())


# ── Point level ──────────────────────────────────────────────────────────────

def pointwise_residual(id: PdeSystemId, spec: FunctionSpec, point, policy: Optional[TruncationPolicy] = None,
                       reading: str = "intended") -> float:
    """Frobenius norm of one equation assembled from termwise-differentiated truncated sums."""
    policy = policy or TruncationPolicy()
    x = as_point(spec, point)
    terms = system_terms(id, spec, reading)
    partials = evaluate_partials(spec, x, policy, sorted({t.derivative for t in terms}))
    r = spec.order
    total = np.zeros((r, r), dtype=np.complex128)
    for term in terms:
        monomial = np.prod([xi ** p for xi, p in zip(x, term.monomial)])
        total = total + term.coefficient * monomial * (
            term.left_matrix(spec.params, r) @ partials[term.derivative] @ term.right_matrix(spec.params, r))
    return frobenius(total)


# ── Necessity ────────────────────────────────────────────────────────────────

def _first_detection(system: str, spec: FunctionSpec, max_degree: int,
                     reading: str) -> Optional[Tuple[Tuple[int, ...], PdeSystemId, float]]:
    """Smallest multi-index (ascending shells, lexicographic within a shell) with a nonzero residual."""
    coefficients = SeriesCoefficients(spec)
    equations = [(eq, system_terms(eq, spec, reading)) for eq in system_ids(system, spec.n)]
    for degree in range(max_degree + 1):
        for idx in shell(spec.n, degree):
            for eq, terms in equations:
                residual, scale = _residual_parts(terms, spec, idx, coefficients)
                relative = frobenius(residual) / scale if scale > 0 else 0.0
                if relative > DETECTION_THRESHOLD:
                    return idx, eq, relative
    return None


def _hypothesis_pairs(families: Sequence[CommutationFamily]) -> List[Tuple[str, Tuple[str, str]]]:
    pairs, seen = [], set()
    for family in families:
        for pair in family.pairs:
            if pair not in seen:
                seen.add(pair)
                pairs.append((family.label, pair))
    return pairs


def necessity_probe(id: PdeSystemId, spec: FunctionSpec, seed: Optional[int] = None,
                    max_degree: int = DEFAULT_SWEEP_DEGREE, reading: str = "intended",
                    order: Optional[int] = None) -> VerificationReport:
    """
    Violate each commutation hypothesis of the system on its own and report the
    first multi-index where the system stops holding. An undetected violation fails.
    """
    rng = rng_for(seed)
    r = max(order or spec.order, 2)
    report = VerificationReport(f"necessity {id.system}")
    roles = spec.definition.roles
    for label, (left, right) in _hypothesis_pairs(spec.definition.commutations):
        params = violating_draw(roles, (left, right), r, rng)
        probe = FunctionSpec(spec.id, params, spec.n)
        check = f"violate {left}{right} = {right}{left}"
        anchor = f"{id.function_id} system hypotheses ({label})"
        found = _first_detection(id.system, probe, max_degree, reading)
        if found is None:
            report.add_fail(check, anchor, 0.0, DETECTION_THRESHOLD,
                            reason=f"no nonzero residual up to total degree {max_degree}")
            continue
        idx, eq, relative = found
        LOG.info("%s: %s detected at %s in equation %d", id.system, check, idx, eq.equation)
        report.add_pass(check, anchor, relative, DETECTION_THRESHOLD,
                        first_index=list(idx), equation=eq.equation)
    return report


# ── Combined verification ────────────────────────────────────────────────────

def verify_system(spec: FunctionSpec, points: Sequence = (), policy: Optional[TruncationPolicy] = None,
                  max_degree: int = DEFAULT_SWEEP_DEGREE, reading: str = "intended",
                  pointwise_tol: float = DEFAULT_POINTWISE_TOL) -> VerificationReport:
    """Coefficient sweep of every equation, then pointwise residuals at the given points."""
    system = system_for(spec.id)
    report = VerificationReport(f"verify-pde {system}")
    coefficients = SeriesCoefficients(spec)
    entries = coefficient_sweep(system, spec, max_degree, reading, coefficients)
    for worst in worst_entries(entries):
        report.add_result(f"coefficients up to degree {max_degree}", worst.id.anchor, worst.relative,
                          COEFFICIENT_TOL, worst_index=list(worst.index))
        if any(t.tag == TAG_RIGHT_PRODUCT for t in system_terms(worst.id, spec, reading)):
            LOG.info("%s contains the U B B' term; sweep residual %.3e", worst.id.anchor, worst.relative)

    if spec.canonical_id == "F10":
        other = "literal" if reading == "intended" else "intended"
        alt = worst_entries(coefficient_sweep(system, spec, max_degree, other, coefficients))[-1]
        report.add_skip(f"coefficients, {other} reading", alt.id.anchor,
                        f"alternate reading of the {TAG_LOWERCASE_U} term, not gated: "
                        f"max relative residual {alt.relative:.3e}")

    for k, point in enumerate(points):
        for eq in system_ids(system, spec.n):
            residual = pointwise_residual(eq, spec, point, policy, reading)
            report.add_result(f"pointwise at point {k + 1}", eq.anchor, residual, pointwise_tol)
    return report
