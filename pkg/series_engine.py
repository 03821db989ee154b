"""
Series Engine
Evaluates the Lauricella (FA-FD, any n), three-variable Lauricella and
Srivastava triple matrix series by ascending total-degree shells, checks the
sufficient convergence conditions and validates parameter hypotheses.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from errors import InputError
from function_catalog import (
    REPRESENTATIONS_BY_FUNCTION,
    FunctionDefinition,
    definition,
    infer_variable_count,
    representation_hypotheses,
)
from matrix_core import (
    ComplexMatrix,
    Tolerances,
    as_matrix,
    checked_inverse,
    commute_residual,
    frobenius,
    identity,
    spectral_summary,
    DEFAULT_TOLERANCES,
)

LOG = logging.getLogger(__name__)

# ── Configuration ────────────────────────────────────────────────────────────
DEFAULT_MAX_DEGREE = 20
HYPER0F1_REL_TOL = 1e-16
HYPER0F1_MAX_TERMS = 2000

GUARANTEED = "guaranteed"
NOT_GUARANTEED = "not-guaranteed"
DIVERGING_SUSPECTED = "diverging-suspected"


# ── Domain types ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MultiIndex:
    components: Tuple[int, ...]

    def __post_init__(self):
        comps = tuple(int(m) for m in self.components)
        if any(m < 0 for m in comps):
            raise InputError(f"multi-index components must be nonnegative, got {comps}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, value, n: Optional[int] = None) -> "MultiIndex":
        idx = value if isinstance(value, MultiIndex) else cls(tuple(value))
        if n is not None and len(idx.components) != n:
            raise InputError(f"multi-index {idx.components} needs {n} components")
        return idx

    @property
    def total(self) -> int:
        return sum(self.components)

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)


def shell(n: int, degree: int) -> Iterator[Tuple[int, ...]]:
    """All multi-indices of length n and total `degree`, in ascending lexicographic order."""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree + 1):
        for rest in shell(n - 1, degree - first):
            yield (first,) + rest


def multi_indices(n: int, max_degree: int) -> Iterator[Tuple[int, ...]]:
    for degree in range(max_degree + 1):
        yield from shell(n, degree)


@dataclass(frozen=True)
class TruncationPolicy:
    max_total_degree: int = DEFAULT_MAX_DEGREE
    tail_tol: Optional[float] = None

    def __post_init__(self):
        if self.max_total_degree < 1:
            raise InputError(f"max_total_degree must be >= 1, got {self.max_total_degree}")
        if self.tail_tol is not None and self.tail_tol < 0:
            raise InputError(f"tail_tol must be nonnegative, got {self.tail_tol}")


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """Which series: function id, parameter matrices by role, and variable count."""
    id: str
    params: Mapping[str, ComplexMatrix]
    n: Optional[int] = None

    def __post_init__(self):
        n = self.n if self.n is not None else infer_variable_count(self.id, list(self.params))
        defn = definition(self.id, n)
        missing = [role for role in defn.roles if role not in self.params]
        if missing:
            raise InputError(f"missing required role(s) {', '.join(missing)} for {self.id} (n={defn.n})")
        extra = [role for role in self.params if role not in defn.roles]
        if extra:
            raise InputError(f"unexpected role(s) {', '.join(extra)} for {self.id} (n={defn.n})")
        params = {role: as_matrix(self.params[role], role) for role in defn.roles}
        orders = {M.shape[0] for M in params.values()}
        if len(orders) != 1:
            raise InputError(f"parameter matrices of {self.id} have different orders {sorted(orders)}")
        object.__setattr__(self, "n", defn.n)
        object.__setattr__(self, "params", MappingProxyType(params))
        object.__setattr__(self, "_definition", defn)

    @property
    def definition(self) -> FunctionDefinition:
        return self._definition

    @property
    def canonical_id(self) -> str:
        return self._definition.id

    @property
    def order(self) -> int:
        return next(iter(self.params.values())).shape[0]


@dataclass(frozen=True)
class SeriesValue:
    value: ComplexMatrix
    tail_estimate: float
    terms_summed: int
    convergence_flag: str
    shell_norms: Tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "value": matrix_to_pairs(self.value),
            "tail_estimate": self.tail_estimate,
            "terms_summed": self.terms_summed,
            "convergence_flag": self.convergence_flag,
        }


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    lhs: float
    relation: str
    rhs: float
    kind: str = "spectral"

    @property
    def passed(self) -> bool:
        return self.lhs < self.rhs if self.relation == "<" else self.lhs > self.rhs

    @property
    def inequality(self) -> str:
        return f"{self.name} {self.relation} {self.rhs:g}" if self.kind == "positivity" else self.name


@dataclass(frozen=True)
class ConvergenceReport:
    function_id: str
    checks: Tuple[ConditionCheck, ...]
    region_stated: bool
    note: str = ""

    @property
    def overall(self) -> bool:
        return self.region_stated and bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        return GUARANTEED if self.overall else NOT_GUARANTEED


@dataclass(frozen=True)
class Violation:
    condition: str
    family: str
    kind: str
    residual: float

    def describe(self) -> str:
        if self.kind == "commutation":
            return f"{self.condition} (family {self.family}): residual {self.residual:.3e}"
        return f"{self.condition}: beta = {self.residual:.6g}"


def matrix_to_pairs(M: ComplexMatrix) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


# ── Coefficients ─────────────────────────────────────────────────────────────

class PochhammerCache:
    """(M)_k and (M)_k^-1 per role, extended one factor at a time."""

    def __init__(self, params: Mapping[str, ComplexMatrix]):
        self._params = params
        self._values: Dict[str, List[ComplexMatrix]] = {}
        self._inverses: Dict[str, List[ComplexMatrix]] = {}

    def _start(self, role: str) -> List[ComplexMatrix]:
        return [identity(self._params[role].shape[0])]

    def value(self, role: str, k: int) -> ComplexMatrix:
        seq = self._values.setdefault(role, self._start(role))
        M = self._params[role]
        while len(seq) <= k:
            j = len(seq) - 1
            seq.append(seq[j] @ (M + j * np.eye(M.shape[0])))
        return seq[k]

    def inverse(self, role: str, k: int, idx=None) -> ComplexMatrix:
        seq = self._inverses.setdefault(role, self._start(role))
        M = self._params[role]
        while len(seq) <= k:
            j = len(seq) - 1
            shifted = M + j * np.eye(M.shape[0])
            seq.append(checked_inverse(shifted, role, idx if idx is not None else j) @ seq[j])
        return seq[k]


class SeriesCoefficients:
    """Memoized term coefficients of one FunctionSpec, reciprocal factorials included."""

    def __init__(self, spec: FunctionSpec):
        self.spec = spec
        self._pochhammer = PochhammerCache(spec.params)
        self._memo: Dict[Tuple[int, ...], ComplexMatrix] = {}

    def __call__(self, idx: Tuple[int, ...]) -> ComplexMatrix:
        cached = self._memo.get(idx)
        if cached is not None:
            return cached
        coeff = None
        with np.errstate(over="ignore", invalid="ignore"):
            for factor in self.spec.definition.factors:
                k = factor.order(idx)
                if factor.inverse:
                    P = self._pochhammer.inverse(factor.role, k, idx)
                else:
                    P = self._pochhammer.value(factor.role, k)
                coeff = P if coeff is None else coeff @ P
            coeff = coeff / factorial_product(idx)
        self._memo[idx] = coeff
        return coeff


def factorial_product(idx: Sequence[int]) -> float:
    return float(math.prod(math.factorial(m) for m in idx))


def falling_factorial(k: int, order: int) -> int:
    """k (k-1) ... (k-order+1)."""
    return math.prod(range(k - order + 1, k + 1)) if order else 1


def term_coefficient(spec: FunctionSpec, idx) -> ComplexMatrix:
    """Matrix coefficient of x1^m1 ... xn^mn, factors multiplied in printed order."""
    idx = MultiIndex.of(idx, spec.n)
    return SeriesCoefficients(spec)(idx.components)


# ── Evaluation ───────────────────────────────────────────────────────────────

def as_point(spec: FunctionSpec, point) -> np.ndarray:
    x = np.atleast_1d(np.asarray(point, dtype=np.complex128))
    if x.ndim != 1 or x.shape[0] != spec.n:
        raise InputError(f"{spec.id} needs a point with {spec.n} coordinates, got {np.shape(point)}")
    if not np.all(np.isfinite(x)):
        raise InputError("evaluation point has non-finite coordinates")
    return x


@dataclass
class _ShellSum:
    totals: Dict[Tuple[int, ...], ComplexMatrix]
    shell_norms: List[float] = field(default_factory=list)
    terms: int = 0
    overflow: bool = False


def _sum_series(spec: FunctionSpec, x: np.ndarray, policy: TruncationPolicy,
                orders: Sequence[Tuple[int, ...]], coefficients: Optional[SeriesCoefficients] = None) -> _ShellSum:
    """Termwise-differentiated truncated sums; shell norms track the first order in `orders`."""
    coefficients = coefficients or SeriesCoefficients(spec)
    r = spec.order
    result = _ShellSum({a: np.zeros((r, r), dtype=np.complex128) for a in orders})
    primary = orders[0]
    for degree in range(policy.max_total_degree + 1):
        shell_values = {a: np.zeros((r, r), dtype=np.complex128) for a in orders}
        for idx in shell(spec.n, degree):
            coeff = None
            for a in orders:
                if any(m < d for m, d in zip(idx, a)):
                    continue
                scalar = 1.0 + 0j
                for m, d, xi in zip(idx, a, x):
                    scalar *= falling_factorial(m, d) * xi ** (m - d)
                if scalar == 0:
                    continue
                if coeff is None:
                    coeff = coefficients(idx)
                    result.terms += 1
                shell_values[a] = shell_values[a] + scalar * coeff
        if not all(np.all(np.isfinite(v)) for v in shell_values.values()):
            LOG.warning("%s series overflowed at total degree %d", spec.id, degree)
            result.overflow = True
            break
        for a in orders:
            result.totals[a] = result.totals[a] + shell_values[a]
        norm = frobenius(shell_values[primary])
        result.shell_norms.append(norm)
        if (policy.tail_tol is not None and degree >= 1
                and norm <= policy.tail_tol * frobenius(result.totals[primary])):
            break
    return result


def _flag(spec: FunctionSpec, x: np.ndarray, summed: _ShellSum) -> str:
    norms = summed.shell_norms
    if summed.overflow or (len(norms) >= 2 and norms[-1] > norms[-2]):
        return DIVERGING_SUSPECTED
    return convergence_report(spec, x).status


def evaluate(spec: FunctionSpec, point, policy: Optional[TruncationPolicy] = None) -> SeriesValue:
    """Sum all terms of total degree <= K by ascending shells; tail = norm of the last shell."""
    policy = policy or TruncationPolicy()
    x = as_point(spec, point)
    zero = (0,) * spec.n
    summed = _sum_series(spec, x, policy, [zero])
    flag = _flag(spec, x, summed)
    if flag == DIVERGING_SUSPECTED:
        LOG.warning("%s at %s: last shell norm grew, series may diverge", spec.id, x.tolist())
    return SeriesValue(
        value=summed.totals[zero],
        tail_estimate=summed.shell_norms[-1] if summed.shell_norms else math.inf,
        terms_summed=summed.terms,
        convergence_flag=flag,
        shell_norms=tuple(summed.shell_norms),
    )


def evaluate_partials(spec: FunctionSpec, point, policy: Optional[TruncationPolicy],
                      orders: Sequence[Tuple[int, ...]],
                      coefficients: Optional[SeriesCoefficients] = None) -> Dict[Tuple[int, ...], ComplexMatrix]:
    """Truncated sums of the requested partial derivatives, keyed by derivative order."""
    policy = policy or TruncationPolicy()
    x = as_point(spec, point)
    zero = (0,) * spec.n
    wanted = [zero] + [tuple(a) for a in orders if tuple(a) != zero]
    summed = _sum_series(spec, x, policy, wanted, coefficients)
    flag = _flag(spec, x, summed)
    if flag == DIVERGING_SUSPECTED:
        LOG.warning("%s at %s: derivative sums taken from a suspect series", spec.id, x.tolist())
    return summed.totals


# ── Convergence conditions ───────────────────────────────────────────────────

STATED_REGIONS = ("FA", "FB", "FC", "FD", "F3")

# Domains taken over from the integral representations; no theorem here restates them.
TABLE_DOMAINS = {
    "F6": (("|x|+|z| < 1", lambda r, s, t: (r + t, 1.0)),),
    "F7": (("|y|+|z| < 1", lambda r, s, t: (s + t, 1.0)),),
    "F8": (("|x|+|y|+|z| < 1", lambda r, s, t: (r + s + t, 1.0)),),
    "F11": (("|x|+|z| < 1", lambda r, s, t: (r + t, 1.0)),),
    "F12": (("|x|+|y|+|z| < 1+|y||z|", lambda r, s, t: (r + s + t, 1.0 + s * t)),),
    "F13": (("|y|+|z| < 1", lambda r, s, t: (s + t, 1.0)),),
    "HA": (("|x|+|y|+|z| < 1+|y||z|", lambda r, s, t: (r + s + t, 1.0 + s * t)),),
    "HB": (("max(|x|,|y|,|z|) < 1", lambda r, s, t: (max(r, s, t), 1.0)),),
    "HC": (("|x|+|y|+|z|+|x||z| < 1+|y|", lambda r, s, t: (r + s + t + r * t, 1.0 + s)),),
}


def convergence_report(spec: FunctionSpec, point, tol: Optional[Tolerances] = None) -> ConvergenceReport:
    """
    Sufficient conditions for absolute convergence at `point`. Failing means the
    series is not guaranteed to converge there, never that it diverges.
    """
    x = as_point(spec, point)
    mags = [float(v) for v in np.abs(x)]
    fid = spec.canonical_id
    if fid not in STATED_REGIONS:
        checks = []
        for name, rule in TABLE_DOMAINS.get(fid, ()):
            lhs, rhs = rule(*mags)
            checks.append(ConditionCheck(name, lhs, "<", rhs, "domain"))
        note = (f"{fid}: domain copied from its integral representation, unverified"
                if checks else f"{fid}: no convergence region stated")
        return ConvergenceReport(spec.id, tuple(checks), False, note)

    summary = {role: spectral_summary(M, tol, role) for role, M in spec.params.items()}
    alpha = {role: s.alpha for role, s in summary.items()}
    beta = {role: s.beta for role, s in summary.items()}
    checks = [ConditionCheck(f"beta({role})", beta[role], ">", 0.0, "positivity") for role in spec.params]
    n = spec.n

    def spectral(name, lhs, relation, rhs):
        checks.append(ConditionCheck(name, lhs, relation, rhs))

    if fid == "FA":
        spectral("alpha(A) < 1", alpha["A"], "<", 1.0)
        for i in range(1, n + 1):
            spectral(f"alpha(B{i}) < beta(C{i})", alpha[f"B{i}"], "<", beta[f"C{i}"])
        checks.append(ConditionCheck(" + ".join(f"|x{i}|" for i in range(1, n + 1)) + " < 1",
                                     sum(mags), "<", 1.0, "domain"))
    elif fid == "FB":
        for i in range(1, n + 1):
            spectral(f"alpha(A{i}) + alpha(B{i}) < 2", alpha[f"A{i}"] + alpha[f"B{i}"], "<", 2.0)
        spectral("beta(C) > 1", beta["C"], ">", 1.0)
        checks.append(ConditionCheck("max |x_i| < 1", max(mags), "<", 1.0, "domain"))
    elif fid == "FC":
        spectral("alpha(A) + alpha(B) < 2", alpha["A"] + alpha["B"], "<", 2.0)
        for i in range(1, n + 1):
            spectral(f"beta(C{i}) > 1", beta[f"C{i}"], ">", 1.0)
        checks.append(ConditionCheck(" + ".join(f"sqrt|x{i}|" for i in range(1, n + 1)) + " < 1",
                                     sum(math.sqrt(v) for v in mags), "<", 1.0, "domain"))
    elif fid == "FD":
        spectral("alpha(A) < beta(C)", alpha["A"], "<", beta["C"])
        for i in range(1, n + 1):
            spectral(f"alpha(B{i}) < 1", alpha[f"B{i}"], "<", 1.0)
        checks.append(ConditionCheck("max |x_i| < 1", max(mags), "<", 1.0, "domain"))
    else:
        spectral("alpha(A1) < beta(C1)", alpha["A1"], "<", beta["C1"])
        spectral("alpha(A2) < 1", alpha["A2"], "<", 1.0)
        spectral("alpha(B1) < 1", alpha["B1"], "<", 1.0)
        spectral("alpha(B2) < beta(C2)", alpha["B2"], "<", beta["C2"])
        spectral("beta(C3) > 1", beta["C3"], ">", 1.0)
        r, s, t = mags
        checks.append(ConditionCheck("|x| < 1", r, "<", 1.0, "domain"))
        checks.append(ConditionCheck("|y| < 1", s, "<", 1.0, "domain"))
        checks.append(ConditionCheck("|z| < (1-|x|)(1-|y|)", t, "<", (1 - r) * (1 - s), "domain"))
    return ConvergenceReport(spec.id, tuple(checks), True)


# ── Hypotheses ───────────────────────────────────────────────────────────────

def validate_parameters(spec: FunctionSpec, scope: str = "pde", representation: Optional[str] = None,
                        tol: Optional[Tolerances] = None) -> List[Violation]:
    """
    Violated commutation / positive-stability hypotheses.
    scope "pde" checks the differential system, "integral" the representation
    (default: the function's first one), "all" both. Empty list: all hold.
    """
    tol = tol or DEFAULT_TOLERANCES
    if scope not in ("pde", "integral", "all"):
        raise InputError(f"unknown validation scope {scope!r}")
    families = []
    stable = []
    if scope in ("pde", "all"):
        families.extend(spec.definition.commutations)
    if scope in ("integral", "all"):
        hyps = representation_hypotheses(representation or _default_representation(spec), spec.n)
        families.extend(hyps.commutations)
        stable.extend(hyps.positive_stable)

    violations: List[Violation] = []
    seen = set()
    for family in families:
        for left, right in family.pairs:
            if (left, right) in seen:
                continue
            seen.add((left, right))
            X, Y = spec.params[left], spec.params[right]
            residual = commute_residual(X, Y)
            if not tol.commutes(residual, frobenius(X), frobenius(Y)):
                violations.append(Violation(f"{left}{right} = {right}{left}", family.label,
                                            "commutation", residual))
    for combo in stable:
        beta = spectral_summary(combo.evaluate(spec.params), tol, combo.label).beta
        if not beta > 0:
            violations.append(Violation(f"{combo.label} positive stable", "positive stability",
                                        "positive-stability", beta))
    return violations


def _default_representation(spec: FunctionSpec) -> str:
    reps = REPRESENTATIONS_BY_FUNCTION.get(spec.canonical_id)
    if not reps:
        raise InputError(f"{spec.id} has no integral representation")
    return reps[0]


# ── 0F1 ──────────────────────────────────────────────────────────────────────

def hyper0f1_batch(C, z, max_terms: int = HYPER0F1_MAX_TERMS, start=None) -> np.ndarray:
    """
    0F1(-; C; z_k) for every z_k, shape (N, r, r); terms T_{k+1} = T_k (C+kI)^-1 z/(k+1).
    `start` scales T_0 per node, so callers can keep fast-growing sums finite.
    """
    C = as_matrix(C, "C")
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    r = C.shape[0]
    term = np.broadcast_to(np.eye(r, dtype=np.complex128), (z.shape[0], r, r)).copy()
    if start is not None:
        term = term * np.asarray(start, dtype=np.complex128)[:, None, None]
    total = term.copy()
    I = np.eye(r)
    for k in range(max_terms):
        term = (term @ checked_inverse(C + k * I, "C", k)) * (z / (k + 1))[:, None, None]
        total = total + term
        term_norms = np.linalg.norm(term, axis=(1, 2))
        total_norms = np.linalg.norm(total, axis=(1, 2))
        if np.all(term_norms <= HYPER0F1_REL_TOL * total_norms):
            return total
    LOG.warning("0F1 series stopped at %d terms before reaching relative tolerance", max_terms)
    return total


def hyper0F1(C, z) -> ComplexMatrix:
    """Sum_k (C)_k^-1 z^k / k!."""
    return hyper0f1_batch(C, [z])[0]
