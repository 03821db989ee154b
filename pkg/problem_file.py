"""
Problem File Module
JSON problem files: function id, named parameter matrices (entries as
[re, im] pairs, matrices as arrays of rows), evaluation points, truncation,
quadrature level, requested checks and the seed for randomized checks.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from errors import InputError, ProblemFileError
from function_catalog import REPRESENTATION_IDS, canonical_id
from quadrature_rules import DEFAULT_LEVEL, REGIONS, QuadratureSpec
from series_engine import DEFAULT_MAX_DEGREE, FunctionSpec, TruncationPolicy

Matrix = Tuple[Tuple[complex, ...], ...]

CHECKS = ("eval", "converge", "validate", "verify-integral", "verify-pde", "necessity", "terms")
# "run" executes the file's own checks list.
COMMANDS = CHECKS + ("run",)
KNOWN_FIELDS = ("function", "n", "variables", "parameters", "points", "truncation", "quadrature",
                "checks", "representations", "seed", "reading")


@dataclass
class ProblemFile:
    function: str
    parameters: Dict[str, Matrix]
    n: Optional[int] = None
    variables: Tuple[str, ...] = ()
    points: Tuple[Tuple[complex, ...], ...] = ()
    max_total_degree: int = DEFAULT_MAX_DEGREE
    tail_tol: Optional[float] = None
    quad_level: int = DEFAULT_LEVEL
    quad_region: Optional[str] = None
    quad_dimension: Optional[int] = None
    checks: Tuple[str, ...] = ()
    representations: Tuple[str, ...] = ()
    seed: int = 0
    reading: str = "intended"
    source: Optional[str] = field(default=None, compare=False)

    def to_spec(self) -> FunctionSpec:
        params = {role: np.array(M, dtype=np.complex128) for role, M in self.parameters.items()}
        try:
            return FunctionSpec(self.function, params, self.n)
        except InputError as e:
            raise ProblemFileError(str(e), "parameters") from e

    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(self.max_total_degree, self.tail_tol)

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(level=self.quad_level, dimension=self.quad_dimension, region=self.quad_region)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"function": self.function}
        if self.n is not None:
            data["n"] = self.n
        if self.variables:
            data["variables"] = list(self.variables)
        data["parameters"] = {role: [[_pair(z) for z in row] for row in M] for role, M in self.parameters.items()}
        data["points"] = [[_pair(z) for z in p] for p in self.points]
        data["truncation"] = {"max_total_degree": self.max_total_degree, "tail_tol": self.tail_tol}
        data["quadrature"] = {"level": self.quad_level}
        if self.quad_region is not None:
            data["quadrature"]["region"] = self.quad_region
        if self.quad_dimension is not None:
            data["quadrature"]["dimension"] = self.quad_dimension
        data["checks"] = list(self.checks)
        data["representations"] = list(self.representations)
        data["seed"] = self.seed
        data["reading"] = self.reading
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


# ── Parsing ──────────────────────────────────────────────────────────────────

class _Context:
    """Raw text, so structural errors can name the line a field sits on."""

    def __init__(self, text: str, source: Optional[str]):
        self.text = text
        self.source = source

    def line_of(self, key: str) -> Optional[int]:
        match = re.search(r'"' + re.escape(key) + r'"\s*:', self.text)
        return self.text.count("\n", 0, match.start()) + 1 if match else None

    def error(self, message: str, field: str, key: Optional[str] = None) -> ProblemFileError:
        return ProblemFileError(message, field, self.line_of(key or field.split(".")[0]))


def _complex(value, ctx: _Context, field: str, key: str) -> complex:
    if isinstance(value, bool):
        raise ctx.error(f"expected a number or [re, im] pair, got {value!r}", field, key)
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise ctx.error(f"expected a number or [re, im] pair, got {value!r}", field, key)


def _matrix(value, ctx: _Context, role: str) -> Matrix:
    field = f"parameters.{role}"
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        raise ctx.error("matrix must be a non-empty array of rows", field, role)
    r = len(value)
    lengths = [len(row) for row in value]
    if any(length != r for length in lengths):
        raise ctx.error(f"ragged or non-square matrix: {r} rows with lengths {lengths}", field, role)
    return tuple(tuple(_complex(z, ctx, field, role) for z in row) for row in value)


def _int(value, ctx: _Context, field: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ctx.error(f"expected an integer >= {minimum}, got {value!r}", field)
    return value


def parse_problem_text(text: str, source: Optional[str] = None) -> ProblemFile:
    ctx = _Context(text, source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"invalid JSON: {e.msg}", None, e.lineno) from e
    if not isinstance(data, dict):
        raise ProblemFileError("top level must be a JSON object", None, 1)

    unknown = [k for k in data if k not in KNOWN_FIELDS]
    if unknown:
        raise ctx.error(f"unknown field(s) {', '.join(unknown)}", unknown[0])
    if "function" not in data:
        raise ProblemFileError("missing required field", "function", 1)
    function = data["function"]
    try:
        canonical_id(function)
    except InputError as e:
        raise ctx.error(str(e), "function") from e

    raw_params = data.get("parameters")
    if not isinstance(raw_params, dict) or not raw_params:
        raise ctx.error("expected an object of named matrices", "parameters")
    parameters = {role: _matrix(M, ctx, role) for role, M in raw_params.items()}

    variables = data.get("variables", [])
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ctx.error("expected a list of variable names", "variables")
    n = data.get("n")
    if n is not None:
        n = _int(n, ctx, "n", 1)
    elif variables:
        n = len(variables)
    if n is not None and variables and len(variables) != n:
        raise ctx.error(f"{len(variables)} variable names for n = {n}", "variables")

    raw_points = data.get("points", [])
    if not isinstance(raw_points, list) or not all(isinstance(p, list) for p in raw_points):
        raise ctx.error("expected a list of points, each a list of coordinates", "points")
    points = tuple(tuple(_complex(z, ctx, "points", "points") for z in p) for p in raw_points)

    truncation = data.get("truncation", {})
    if not isinstance(truncation, dict):
        raise ctx.error("expected an object", "truncation")
    max_degree = _int(truncation.get("max_total_degree", DEFAULT_MAX_DEGREE), ctx,
                      "truncation.max_total_degree", 1)
    tail_tol = truncation.get("tail_tol")
    if tail_tol is not None and (not isinstance(tail_tol, (int, float)) or tail_tol < 0):
        raise ctx.error(f"expected a nonnegative number, got {tail_tol!r}", "truncation.tail_tol")

    quadrature = data.get("quadrature", {})
    if not isinstance(quadrature, dict):
        raise ctx.error("expected an object", "quadrature")
    level = _int(quadrature.get("level", DEFAULT_LEVEL), ctx, "quadrature.level", 3)
    region = quadrature.get("region")
    if region is not None and region not in REGIONS:
        raise ctx.error(f"unknown region {region!r}; valid: {', '.join(REGIONS)}", "quadrature.region")
    dimension = quadrature.get("dimension")
    if dimension is not None:
        dimension = _int(dimension, ctx, "quadrature.dimension", 1)

    checks = tuple(data.get("checks", []))
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise ctx.error(f"unknown check(s) {', '.join(map(str, bad))}; valid: {', '.join(CHECKS)}", "checks")
    reps = tuple(data.get("representations", []))
    bad = [r for r in reps if r not in REPRESENTATION_IDS]
    if bad:
        raise ctx.error(f"unknown representation(s) {', '.join(map(str, bad))}", "representations")

    reading = data.get("reading", "intended")
    if reading not in ("intended", "literal"):
        raise ctx.error(f"expected 'intended' or 'literal', got {reading!r}", "reading")

    pf = ProblemFile(
        function=function,
        parameters=parameters,
        n=n,
        variables=tuple(variables),
        points=points,
        max_total_degree=max_degree,
        tail_tol=None if tail_tol is None else float(tail_tol),
        quad_level=level,
        quad_region=region,
        quad_dimension=dimension,
        checks=checks,
        representations=reps,
        seed=_int(data.get("seed", 0), ctx, "seed", 0),
        reading=reading,
        source=source,
    )
    spec = pf.to_spec()
    if spec.n != n:
        pf.n = spec.n
    for k, p in enumerate(points):
        if len(p) != spec.n:
            raise ctx.error(f"point {k + 1} has {len(p)} coordinates, {function} needs {spec.n}", "points")
    return pf


def parse_problem_file(path) -> ProblemFile:
    """Read and validate a problem file; structural errors carry field and line context."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemFileError(f"cannot read {path}: {e.strerror}") from e
    return parse_problem_text(text, str(path))
