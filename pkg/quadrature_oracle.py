"""
Quadrature Oracle
Independent evaluation of the integral representations of the matrix series,
used to cross-check the series engine.

Each representation is laid out as a region (product of intervals, simplices
or half-lines), an integrand that multiplies scalar-base matrix powers in the
printed left-to-right order, and a gamma normalizer applied on the printed side.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from errors import DomainError, HypothesisError, InputError, PreconditionError
from function_catalog import (
    REPRESENTATION_IDS,
    REPRESENTATIONS_BY_FUNCTION,
    canonical_id,
    representation_hypotheses,
)
from matrix_core import (
    ComplexMatrix,
    ExponentKernel,
    Tolerances,
    as_matrix,
    commute_residual,
    frobenius,
    gamma_quotient,
    identity,
    is_positive_stable,
    DEFAULT_TOLERANCES,
)
from quadrature_rules import Block, QuadratureSpec, TensorGrid, region_dimension, region_name, tensor_grid
from series_engine import TABLE_DOMAINS, FunctionSpec, as_point, hyper0f1_batch, validate_parameters

LOG = logging.getLogger(__name__)

# ── Configuration ────────────────────────────────────────────────────────────
DEFAULT_WORKERS = int(os.getenv("LMX_QUAD_WORKERS", "4"))
DEFAULT_CHUNK = int(os.getenv("LMX_QUAD_CHUNK", "20000"))
# Half-line truncation R = HALF_LINE_DECAY / kappa, kappa the decay rate of the HB integrand.
HALF_LINE_DECAY = 50.0
MIN_DECAY = 0.05
HB_DECAY_CONDITION = "min eig [[1, -sqrt|x|, -sqrt|y|], [-sqrt|x|, 1, -sqrt|z|], [-sqrt|y|, -sqrt|z|, 1]] > 0"


@dataclass(frozen=True)
class IntegralResult:
    value: ComplexMatrix
    error_estimate: float
    nodes: int
    level: int
    region: str = "unit-cube"
    dimension: int = 1

    def to_dict(self) -> dict:
        return {"error_estimate": self.error_estimate, "nodes": self.nodes, "level": self.level,
                "region": self.region, "dimension": self.dimension}


class Integrand:
    """Ordered product of matrix factors evaluated at every node of a tensor grid."""

    def __init__(self, order: int, tol: Optional[Tolerances] = None):
        self.order = order
        self.tol = tol
        self._factors: List[Tuple[str, Callable, Optional[ExponentKernel]]] = []

    def power(self, base: Callable[[TensorGrid], np.ndarray], exponent, name: str = "exponent") -> "Integrand":
        self._factors.append(("power", base, ExponentKernel(exponent, self.tol, name)))
        return self

    def matrix(self, fn: Callable[[TensorGrid], np.ndarray]) -> "Integrand":
        self._factors.append(("matrix", fn, None))
        return self

    def scalar(self, fn: Callable[[TensorGrid], np.ndarray]) -> "Integrand":
        self._factors.append(("scalar", fn, None))
        return self

    def __call__(self, grid: TensorGrid) -> np.ndarray:
        values = np.broadcast_to(identity(self.order), (grid.size, self.order, self.order))
        weight = np.ones(grid.size, dtype=np.complex128)
        for kind, fn, kernel in self._factors:
            if kind == "scalar":
                weight = weight * fn(grid)
            elif kind == "power":
                values = values @ kernel.powers(fn(grid))
            else:
                values = values @ fn(grid)
        return values * weight[:, None, None]


@dataclass(frozen=True)
class Layout:
    blocks: Tuple[Block, ...]
    integrand: Integrand
    normalizer: ComplexMatrix
    normalizer_first: bool
    keep: Optional[Callable[[TensorGrid], np.ndarray]] = None


# ── Coordinates ──────────────────────────────────────────────────────────────

def _coord(block: int, axis: int = 0):
    return lambda g: g.blocks[block].coords[axis]


def _slack(block: int):
    return lambda g: g.blocks[block].slack


def _linear_base(x: Sequence[complex], coords: Sequence[Callable]):
    """1 - sum_i x_i c_i."""
    return lambda g: 1.0 - sum(xi * c(g) for xi, c in zip(x, coords))


# ── Layouts ──────────────────────────────────────────────────────────────────

def _fa_nfold(p, x, n, tol):
    I = identity(p["A"].shape[0])
    f = Integrand(I.shape[0], tol)
    f.power(_linear_base(x, [_coord(i) for i in range(n)]), -p["A"], "-A")
    for i in range(n):
        B, C = p[f"B{i + 1}"], p[f"C{i + 1}"]
        f.power(_coord(i), B - I, f"B{i + 1}-I")
        f.power(_slack(i), C - B - I, f"C{i + 1}-B{i + 1}-I")
    Bs = [p[f"B{i + 1}"] for i in range(n)]
    Cs = [p[f"C{i + 1}"] for i in range(n)]
    normalizer = gamma_quotient(Cs, Bs + [C - B for B, C in zip(Bs, Cs)], tol)
    return Layout(tuple(Block.interval() for _ in range(n)), f, normalizer, False)


def _simplex_coords(n: int):
    return [_coord(0, i) for i in range(n)]


def _fb_simplex(p, x, n, tol):
    I = identity(p["C"].shape[0])
    f = Integrand(I.shape[0], tol)
    for i in range(n):
        f.power(_linear_base([x[i]], [_coord(0, i)]), -p[f"A{i + 1}"], f"-A{i + 1}")
    Bs = [p[f"B{i + 1}"] for i in range(n)]
    for i, B in enumerate(Bs):
        f.power(_coord(0, i), B - I, f"B{i + 1}-I")
    f.power(_slack(0), p["C"] - sum(Bs) - I, "C-sum(B)-I")
    normalizer = gamma_quotient([p["C"]], Bs + [p["C"] - sum(Bs)], tol)
    return Layout((Block.simplex(n),), f, normalizer, False)


def _fd_euler(p, x, n, tol):
    A, C = p["A"], p["C"]
    I = identity(A.shape[0])
    f = Integrand(I.shape[0], tol)
    f.power(_coord(0), A - I, "A-I")
    f.power(_slack(0), C - A - I, "C-A-I")
    for i in range(n):
        f.power(_linear_base([x[i]], [_coord(0)]), -p[f"B{i + 1}"], f"-B{i + 1}")
    normalizer = gamma_quotient([C], [A, C - A], tol)
    return Layout((Block.interval(),), f, normalizer, True)


def _fd_simplex(p, x, n, tol):
    I = identity(p["A"].shape[0])
    f = Integrand(I.shape[0], tol)
    f.power(_linear_base(x, _simplex_coords(n)), -p["A"], "-A")
    Bs = [p[f"B{i + 1}"] for i in range(n)]
    for i, B in enumerate(Bs):
        f.power(_coord(0, i), B - I, f"B{i + 1}-I")
    f.power(_slack(0), p["C"] - sum(Bs) - I, "C-sum(B)-I")
    normalizer = gamma_quotient([p["C"]], Bs + [p["C"] - sum(Bs)], tol)
    return Layout((Block.simplex(n),), f, normalizer, False)


def _dirichlet(p, x, n, tol):
    As = [p[f"A{i + 1}"] for i in range(n)]
    C = p["C"]
    I = identity(C.shape[0])
    f = Integrand(I.shape[0], tol)
    for i, A in enumerate(As):
        f.power(_coord(0, i), A - I, f"A{i + 1}-I")
    f.power(_slack(0), C - I, "C-I")
    # Inverse of the gamma product, so that a correct integral normalizes to I.
    normalizer = gamma_quotient([sum(As) + C], [C] + As[::-1], tol)
    return Layout((Block.simplex(n),), f, normalizer, False)


def _f6(p, x, n, tol):
    X, Y, Z = x
    I = identity(p["A1"].shape[0])
    u, cu = _coord(0), _slack(0)
    v, w, vw = _coord(1, 0), _coord(1, 1), _slack(1)
    f = Integrand(I.shape[0], tol)
    f.power(u, p["A1"] - I, "A1-I").power(v, p["A2"] - I, "A2-I").power(w, p["A3"] - I, "A3-I")
    f.power(cu, p["C1"] - p["A1"] - I, "C1-A1-I")
    f.power(vw, p["C2"] - p["A2"] - p["A3"] - I, "C2-A2-A3-I")
    f.power(lambda g: 1.0 - Y * v(g), -p["B2"], "-B2")
    f.power(lambda g: 1.0 - X * u(g) - Z * w(g), -p["B1"], "-B1")
    normalizer = gamma_quotient([p["C1"], p["C2"]],
                                [p["A1"], p["A2"], p["A3"], p["C1"] - p["A1"], p["C2"] - p["A2"] - p["A3"]], tol)
    return Layout((Block.interval(), Block.simplex(2)), f, normalizer, True)


def _f7(p, x, n, tol):
    X, Y, Z = x
    I = identity(p["A1"].shape[0])
    u, v, w, rest = _coord(0, 0), _coord(0, 1), _coord(0, 2), _slack(0)
    Bsum = p["B1"] + p["B2"] + p["B3"]
    f = Integrand(I.shape[0], tol)
    f.power(lambda g: 1.0 - X * u(g), -p["A1"], "-A1")
    f.power(lambda g: 1.0 - Y * v(g) - Z * w(g), -p["A2"], "-A2")
    f.power(u, p["B1"] - I, "B1-I").power(v, p["B2"] - I, "B2-I").power(w, p["B3"] - I, "B3-I")
    f.power(rest, p["C1"] - Bsum - I, "C1-B1-B2-B3-I")
    normalizer = gamma_quotient([p["C1"]], [p["B1"], p["B2"], p["B3"], p["C1"] - Bsum], tol)
    return Layout((Block.simplex(3),), f, normalizer, False)


def _f8(p, x, n, tol):
    X, Y, Z = x
    I = identity(p["A1"].shape[0])
    u, cu = _coord(0), _slack(0)
    v, w, vw = _coord(1, 0), _coord(1, 1), _slack(1)
    f = Integrand(I.shape[0], tol)
    f.power(lambda g: 1.0 - X * u(g) - Y * v(g) - Z * w(g), -p["A1"], "-A1")
    f.power(u, p["B1"] - I, "B1-I").power(v, p["B2"] - I, "B2-I").power(w, p["B3"] - I, "B3-I")
    f.power(cu, p["C1"] - p["B1"] - I, "C1-B1-I")
    f.power(vw, p["C2"] - p["B2"] - p["B3"] - I, "C2-B2-B3-I")
    normalizer = gamma_quotient([p["C1"], p["C2"]],
                                [p["B1"], p["B2"], p["B3"], p["C1"] - p["B1"], p["C2"] - p["B2"] - p["B3"]], tol)
    return Layout((Block.interval(), Block.simplex(2)), f, normalizer, False)


def _f11(p, x, n, tol):
    X, Y, Z = x
    I = identity(p["A1"].shape[0])
    u, cu, v, cv = _coord(0), _slack(0), _coord(1), _slack(1)
    f = Integrand(I.shape[0], tol)
    f.power(u, p["A1"] - I, "A1-I").power(v, p["A2"] - I, "A2-I")
    f.power(cu, p["C1"] - p["A1"] - I, "C1-A1-I").power(cv, p["C2"] - p["A2"] - I, "C2-A2-I")
    f.power(lambda g: 1.0 - X * u(g) - Z * v(g), -p["B1"], "-B1")
    f.power(lambda g: 1.0 - Y * v(g), -p["B2"], "-B2")
    normalizer = gamma_quotient([p["C1"], p["C2"]],
                                [p["A1"], p["A2"], p["C1"] - p["A1"], p["C2"] - p["A2"]], tol)
    return Layout((Block.interval(), Block.interval()), f, normalizer, True)


def _f12(p, x, n, tol):
    X, Y, Z = x
    I = identity(p["A1"].shape[0])
    u, cu = _coord(0), _slack(0)
    v, w, vw = _coord(1, 0), _coord(1, 1), _slack(1)
    f = Integrand(I.shape[0], tol)
    f.power(lambda g: 1.0 - Y * v(g), p["A1"], "A1")
    f.power(lambda g: 1.0 - X * u(g) - Y * v(g) - Z * w(g) + Y * Z * v(g) * w(g), -p["A1"], "-A1")
    f.power(u, p["B1"] - I, "B1-I").power(v, p["A2"] - I, "A2-I").power(w, p["B2"] - I, "B2-I")
    f.power(cu, p["C1"] - p["B1"] - I, "C1-B1-I")
    f.power(vw, p["C2"] - p["A2"] - p["B2"] - I, "C2-A2-B2-I")
    f.power(lambda g: 1.0 - Y * v(g), -p["B1"], "-B1")
    normalizer = gamma_quotient([p["C1"], p["C2"]],
                                [p["A2"], p["B1"], p["B2"], p["C1"] - p["B1"], p["C2"] - p["A2"] - p["B2"]], tol)
    return Layout((Block.interval(), Block.simplex(2)), f, normalizer, False)


def _f13(p, x, n, tol):
    X, Y, Z = x
    I = identity(p["A1"].shape[0])
    u, v, rest = _coord(0, 0), _coord(0, 1), _slack(0)
    f = Integrand(I.shape[0], tol)
    f.power(lambda g: 1.0 - X * u(g), -p["A1"], "-A1")
    f.power(lambda g: 1.0 - Y * v(g) - Z * u(g), -p["A2"], "-A2")
    f.power(u, p["B1"] - I, "B1-I").power(v, p["B2"] - I, "B2-I")
    f.power(rest, p["C1"] - p["B1"] - p["B2"] - I, "C1-B1-B2-I")
    normalizer = gamma_quotient([p["C1"]], [p["B1"], p["B2"], p["C1"] - p["B1"] - p["B2"]], tol)
    return Layout((Block.simplex(2),), f, normalizer, False)


def _ha(p, x, n, tol):
    X, Y, Z = x
    A, B, Bp, C, Cp = p["A"], p["B"], p["B'"], p["C"], p["C'"]
    I = identity(A.shape[0])
    u, cu, v, cv = _coord(0), _slack(0), _coord(1), _slack(1)
    f = Integrand(I.shape[0], tol)
    f.power(lambda g: 1.0 - X * u(g) - Y * v(g) - Z * v(g) + Y * Z * v(g) ** 2, -A, "-A")
    f.power(lambda g: 1.0 - Y * v(g), A, "A")
    f.power(u, B - I, "B-I").power(v, Bp - I, "B'-I")
    f.power(cu, C - B - I, "C-B-I").power(cv, Cp - Bp - I, "C'-B'-I")
    f.power(lambda g: 1.0 - Y * v(g), -B, "-B")
    normalizer = gamma_quotient([C, Cp], [B, Bp, C - B, Cp - Bp], tol)
    return Layout((Block.interval(), Block.interval()), f, normalizer, False)


def _hb_decay(x) -> float:
    """
    Smallest eigenvalue of the form bounding the HB exponent in (sqrt u, sqrt v, sqrt w):
    -(u + v + w) + 2 sqrt|x| sqrt(uv) + 2 sqrt|y| sqrt(uw) + 2 sqrt|z| sqrt(vw) <= -kappa (u + v + w).
    """
    r, s, t = (math.sqrt(abs(v)) for v in x)
    form = np.array([[1.0, -r, -s], [-r, 1.0, -t], [-s, -t, 1.0]])
    return float(np.linalg.eigvalsh(form)[0])


def _hb(p, x, n, tol):
    X, Y, Z = x
    A, B, Bp = p["A"], p["B"], p["B'"]
    I = identity(A.shape[0])
    kappa = _hb_decay(x)
    if kappa <= 0:
        raise DomainError(HB_DECAY_CONDITION, kappa, 0.0)
    if kappa < MIN_DECAY:
        LOG.warning("HB integrand decays slowly (rate %.3g); truncation clamped at rate %.3g", kappa, MIN_DECAY)
        kappa = MIN_DECAY
    upper = HALF_LINE_DECAY / kappa
    u, v, w = _coord(0), _coord(1), _coord(2)

    # Each 0F1 is scaled by exp(-2 sqrt|z|) and the scale folded into the exponential weight.
    def growth(g):
        return 2.0 * (np.sqrt(abs(X) * u(g) * v(g)) + np.sqrt(abs(Y) * u(g) * w(g))
                      + np.sqrt(abs(Z) * v(g) * w(g)))

    f = Integrand(I.shape[0], tol)
    f.scalar(lambda g: np.exp(growth(g) - (u(g) + v(g) + w(g))))
    f.power(v, A - I, "A-I").power(u, B - I, "B-I").power(w, Bp - I, "B'-I")
    f.matrix(lambda g: _scaled_0f1(p["C"], X * u(g) * v(g)))
    f.matrix(lambda g: _scaled_0f1(p["C'"], Y * u(g) * w(g)))
    f.matrix(lambda g: _scaled_0f1(p["C''"], Z * v(g) * w(g)))
    normalizer = gamma_quotient([], [A, B, Bp], tol)
    blocks = tuple(Block.half_line(upper) for _ in range(3))
    return Layout(blocks, f, normalizer, True, keep=lambda g: u(g) + v(g) + w(g) <= upper)


def _scaled_0f1(C, z) -> np.ndarray:
    scale = np.exp(-2.0 * np.sqrt(np.abs(z)))
    return hyper0f1_batch(C, z, start=scale)


def _hc(p, x, n, tol):
    X, Y, Z = x
    A, B, Bp, C = p["A"], p["B"], p["B'"], p["C"]
    I = identity(A.shape[0])
    u, cu, v, cv = _coord(0), _slack(0), _coord(1), _slack(1)
    f = Integrand(I.shape[0], tol)
    f.power(u, A - I, "A-I").power(v, B - I, "B-I")
    f.power(cu, C - A - I, "C-A-I").power(cv, C - A - B - I, "C-A-B-I")
    f.power(lambda g: 1.0 - X * u(g), -B, "-B")
    f.power(lambda g: 1.0 - X * u(g), Bp, "B'")
    f.power(lambda g: (1.0 - X * u(g) - Y * v(g) + Y * u(g) * v(g) - Z * u(g)
                       + X * Z * u(g) ** 2), -Bp, "-B'")
    normalizer = gamma_quotient([C], [A, B, C - A - B], tol)
    return Layout((Block.interval(), Block.interval()), f, normalizer, True)


LAYOUTS = {
    "FA-nfold": _fa_nfold, "FB-simplex": _fb_simplex, "FD-euler": _fd_euler, "FD-simplex": _fd_simplex,
    "dirichlet-lemma": _dirichlet, "F6": _f6, "F7": _f7, "F8": _f8, "F11": _f11, "F12": _f12,
    "F13": _f13, "HA": _ha, "HB": _hb, "HC": _hc,
}


# ── Domains and hypotheses ───────────────────────────────────────────────────

def _check_domain(rep: str, x: np.ndarray) -> None:
    mags = [float(v) for v in np.abs(x)]
    if rep in ("FA-nfold", "FD-simplex"):
        rules = (("sum |x_i| < 1", lambda *m: (sum(m), 1.0)),)
    elif rep in ("FB-simplex", "FD-euler"):
        rules = (("max |x_i| < 1", lambda *m: (max(m), 1.0)),)
    elif rep == "dirichlet-lemma":
        rules = ()
    else:
        rules = TABLE_DOMAINS[rep]
    for inequality, rule in rules:
        lhs, rhs = rule(*mags)
        if not lhs < rhs:
            raise DomainError(inequality, lhs, rhs)


def representations_for(function_id: str) -> Tuple[str, ...]:
    return REPRESENTATIONS_BY_FUNCTION.get(canonical_id(function_id), ())


def _require_hypotheses(rep: str, spec: FunctionSpec, tol: Tolerances) -> None:
    violations = validate_parameters(spec, scope="integral", representation=rep, tol=tol)
    if violations:
        raise HypothesisError(tuple(v.describe() for v in violations), f"representation {rep}")


# ── Integration ──────────────────────────────────────────────────────────────

def _integrate(layout: Layout, level: int, workers: int, chunk: int) -> Tuple[ComplexMatrix, ComplexMatrix, int]:
    grid = tensor_grid(layout.blocks, level)
    if layout.keep is not None:
        grid = grid.take(layout.keep(grid))

    def work(start: int):
        part = grid.take(slice(start, start + chunk))
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            values = layout.integrand(part)
        return (np.einsum("k,kij->ij", part.weights, values),
                np.einsum("k,kij->ij", part.coarse_weights, values))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        partials = list(executor.map(work, range(0, grid.size, chunk)))
    fine = sum(p[0] for p in partials)
    coarse = sum(p[1] for p in partials)
    if not (np.all(np.isfinite(fine)) and np.all(np.isfinite(coarse))):
        raise PreconditionError("integrand overflowed on the quadrature grid; move the point inward")
    return fine, coarse, grid.size


def integrate_representation(rep: str, spec: FunctionSpec, point, q: Optional[QuadratureSpec] = None,
                             tol: Optional[Tolerances] = None, workers: int = DEFAULT_WORKERS,
                             chunk: int = DEFAULT_CHUNK) -> IntegralResult:
    """Integral representation `rep` of `spec` at `point`, with a nested-rule error estimate."""
    if rep not in REPRESENTATION_IDS:
        raise InputError(f"unknown representation {rep!r}; valid ids: {', '.join(REPRESENTATION_IDS)}")
    tol = tol or DEFAULT_TOLERANCES
    q = q or QuadratureSpec()
    hyps = representation_hypotheses(rep, spec.n)
    if spec.canonical_id != hyps.function_id:
        raise InputError(f"representation {rep} belongs to {hyps.function_id}, not {spec.id}")
    x = as_point(spec, point)
    _check_domain(rep, x)
    _require_hypotheses(rep, spec, tol)

    layout = LAYOUTS[rep](spec.params, x, spec.n, tol)
    q.require(layout.blocks)
    fine, coarse, nodes = _integrate(layout, q.level, workers, chunk)
    N = layout.normalizer
    if layout.normalizer_first:
        value, rough = N @ fine, N @ coarse
    else:
        value, rough = fine @ N, coarse @ N
    estimate = frobenius(value - rough)
    LOG.debug("%s at %s: %d nodes, level %d, estimate %.3e", rep, x.tolist(), nodes, q.level, estimate)
    return IntegralResult(value, estimate, nodes, q.level,
                          region_name(layout.blocks), region_dimension(layout.blocks))


def integral_value(rep: str, spec: FunctionSpec, point, q: Optional[QuadratureSpec] = None,
                   tol: Optional[Tolerances] = None) -> ComplexMatrix:
    return integrate_representation(rep, spec, point, q, tol).value


def dirichlet_simplex_integral(A_list: Sequence, C, q: Optional[QuadratureSpec] = None,
                               tol: Optional[Tolerances] = None) -> ComplexMatrix:
    """Integral of u1^(A1-I) ... un^(An-I) (1 - sum u)^(C-I) over the n-simplex."""
    tol = tol or DEFAULT_TOLERANCES
    q = q or QuadratureSpec()
    As = [as_matrix(A, f"A{i + 1}") for i, A in enumerate(A_list)]
    C = as_matrix(C, "C")
    if not As:
        raise InputError("dirichlet_simplex_integral needs at least one A matrix")
    mats = As + [C]
    names = [f"A{i + 1}" for i in range(len(As))] + ["C"]
    failed = []
    for i in range(len(mats)):
        if not is_positive_stable(mats[i], tol, names[i]):
            failed.append(f"{names[i]} positive stable")
        for j in range(i + 1, len(mats)):
            res = commute_residual(mats[i], mats[j])
            if not tol.commutes(res, frobenius(mats[i]), frobenius(mats[j])):
                failed.append(f"{names[i]}{names[j]} = {names[j]}{names[i]}")
    if failed:
        raise HypothesisError(tuple(failed), "simplex Dirichlet integral")
    I = identity(C.shape[0])
    f = Integrand(I.shape[0], tol)
    for i, A in enumerate(As):
        f.power(_coord(0, i), A - I, f"A{i + 1}-I")
    f.power(_slack(0), C - I, "C-I")
    layout = Layout((Block.simplex(len(As)),), f, I, False)
    q.require(layout.blocks)
    fine, _, _ = _integrate(layout, q.level, DEFAULT_WORKERS, DEFAULT_CHUNK)
    return fine
