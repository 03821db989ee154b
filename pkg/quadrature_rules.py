"""
Double-exponential quadrature rules.

tanh-sinh on [0, 1] keeps the complement 1 - u as its own array so that
factors like (1 - u)^(C - B - I) stay accurate next to u = 1. Truncated
half-lines use the exponential-decay variant of exp-sinh, u = exp(t - exp(-t)).
Tensor grids combine intervals, simplices (through the stick-breaking map
u2 = (1 - u1) s2, u3 = (1 - u1)(1 - s2) s3, ...) and half-lines.

Every rule also carries the weights of the nested rule with twice the step,
so one integrand evaluation yields both a value and a refinement estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from errors import InputError

# ── Configuration ────────────────────────────────────────────────────────────
MIN_LEVEL = 3
DEFAULT_LEVEL = 8
# Nodes stop once min(u, 1 - u) reaches exp(-EXPONENT_LIMIT).
EXPONENT_LIMIT = 230.0
# Tensor nodes below this weight are dropped.
WEIGHT_FLOOR = 1e-250
REGIONS = ("unit-cube", "simplex", "semi-infinite-octant", "product")


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Quadrature request: level = nodes per unit step of the transformed variable.
    region and dimension, when given, must match the region the integral is laid out on.
    """
    level: int = DEFAULT_LEVEL
    dimension: Optional[int] = None
    region: Optional[str] = None

    def __post_init__(self):
        if self.level < MIN_LEVEL:
            raise InputError(f"quadrature level must be >= {MIN_LEVEL}, got {self.level}")
        if self.dimension is not None and self.dimension < 1:
            raise InputError(f"quadrature dimension must be >= 1, got {self.dimension}")
        if self.region is not None and self.region not in REGIONS:
            raise InputError(f"unknown quadrature region {self.region!r}; expected one of {REGIONS}")

    def require(self, blocks: Sequence["Block"]) -> None:
        region, dimension = region_name(blocks), region_dimension(blocks)
        # [0, 1] is both the unit cube and the 1-simplex.
        accepted = {region, "simplex"} if dimension == 1 else {region}
        if self.region is not None and self.region not in accepted:
            raise InputError(f"quadrature region {self.region!r} requested, integral is over {region!r}")
        if self.dimension is not None and self.dimension != dimension:
            raise InputError(f"quadrature dimension {self.dimension} requested, integral has {dimension}")


@dataclass(frozen=True)
class AxisRule:
    nodes: np.ndarray
    complements: Optional[np.ndarray]
    weights: np.ndarray
    coarse_weights: np.ndarray


def _check_level(level: int) -> None:
    if level < 1:
        raise InputError(f"quadrature level must be positive, got {level}")


def _frozen(*arrays: np.ndarray) -> None:
    for arr in arrays:
        if arr is not None:
            arr.flags.writeable = False


@lru_cache(maxsize=32)
def unit_interval_rule(level: int) -> AxisRule:
    """tanh-sinh nodes u = 1/(1 + exp(-pi sinh t)) on [0, 1], step 1/level."""
    _check_level(level)
    h = 1.0 / level
    t_max = math.asinh(EXPONENT_LIMIT / math.pi)
    k = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
    t = k * h
    s = math.pi * np.sinh(t)
    nodes = special.expit(s)
    complements = special.expit(-s)
    weights = h * math.pi * np.cosh(t) * nodes * complements
    coarse = np.where(k % 2 == 0, 2.0 * weights, 0.0)
    _frozen(nodes, complements, weights, coarse)
    return AxisRule(nodes, complements, weights, coarse)


def _log_map_inverse(y: float) -> float:
    """t with t - exp(-t) = y, by Newton's method."""
    t = y if y >= 0 else -math.log(-y)
    for _ in range(60):
        step = (t - math.exp(-t) - y) / (1.0 + math.exp(-t))
        t -= step
        if abs(step) < 1e-14 * max(1.0, abs(t)):
            break
    return t


@lru_cache(maxsize=32)
def half_line_rule(level: int, upper: float) -> AxisRule:
    """Nodes u = exp(t - exp(-t)) on (0, upper], step 1/level; suited to exponentially decaying integrands."""
    _check_level(level)
    if upper <= 1.0:
        raise InputError(f"half-line truncation must exceed 1, got {upper}")
    h = 1.0 / level
    t_lo = _log_map_inverse(-2.0 * EXPONENT_LIMIT)
    t_hi = _log_map_inverse(math.log(upper))
    k = np.arange(math.ceil(t_lo / h), math.floor(t_hi / h) + 1)
    t = k * h
    nodes = np.exp(t - np.exp(-t))
    weights = h * (1.0 + np.exp(-t)) * nodes
    coarse = np.where(k % 2 == 0, 2.0 * weights, 0.0)
    _frozen(nodes, weights, coarse)
    return AxisRule(nodes, None, weights, coarse)


# ── Tensor grids ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Block:
    """One factor of an integration region: a k-simplex (k = 1 is [0, 1]) or a half-line."""
    kind: str
    dimension: int = 1
    upper: float = 0.0

    @classmethod
    def interval(cls) -> "Block":
        return cls("simplex", 1)

    @classmethod
    def simplex(cls, dimension: int) -> "Block":
        return cls("simplex", dimension)

    @classmethod
    def half_line(cls, upper: float) -> "Block":
        return cls("half-line", 1, upper)


@dataclass(frozen=True)
class BlockPoints:
    """Coordinates of one block at every tensor node; slack = 1 - sum(coords) on simplices."""
    coords: Tuple[np.ndarray, ...]
    slack: Optional[np.ndarray]

    def take(self, selector) -> "BlockPoints":
        slack = None if self.slack is None else self.slack[selector]
        return BlockPoints(tuple(c[selector] for c in self.coords), slack)


@dataclass(frozen=True)
class TensorGrid:
    blocks: Tuple[BlockPoints, ...]
    weights: np.ndarray
    coarse_weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    def take(self, selector) -> "TensorGrid":
        return TensorGrid(
            tuple(b.take(selector) for b in self.blocks),
            self.weights[selector],
            self.coarse_weights[selector],
        )


def _axis_rules(block: Block, level: int):
    if block.kind == "half-line":
        return [half_line_rule(level, block.upper)]
    return [unit_interval_rule(level)] * block.dimension


def tensor_grid(blocks: Sequence[Block], level: int) -> TensorGrid:
    """Flattened tensor product of the blocks' axis rules, simplices mapped by stick-breaking."""
    rules = [rule for block in blocks for rule in _axis_rules(block, level)]
    if not rules:
        raise InputError("an integration region needs at least one block")
    mesh = np.meshgrid(*[np.arange(rule.nodes.shape[0]) for rule in rules], indexing="ij")
    picks = [m.ravel() for m in mesh]

    weights = np.ones(picks[0].shape[0])
    coarse = np.ones(picks[0].shape[0])
    points = []
    axis = 0
    for block in blocks:
        if block.kind == "half-line":
            rule, pick = rules[axis], picks[axis]
            weights = weights * rule.weights[pick]
            coarse = coarse * rule.coarse_weights[pick]
            points.append(BlockPoints((rule.nodes[pick],), None))
            axis += 1
            continue
        coords = []
        remaining = np.ones(picks[0].shape[0])
        for _ in range(block.dimension):
            rule, pick = rules[axis], picks[axis]
            coords.append(remaining * rule.nodes[pick])
            # Jacobian of the stick-breaking map picks up the remaining length.
            weights = weights * rule.weights[pick] * remaining
            coarse = coarse * rule.coarse_weights[pick] * remaining
            remaining = remaining * rule.complements[pick]
            axis += 1
        points.append(BlockPoints(tuple(coords), remaining))

    keep = weights >= WEIGHT_FLOOR
    grid = TensorGrid(tuple(points), weights, coarse)
    return grid.take(keep) if not keep.all() else grid


def region_dimension(blocks: Sequence[Block]) -> int:
    return sum(block.dimension for block in blocks)


def region_name(blocks: Sequence[Block]) -> str:
    """unit-cube, simplex, semi-infinite-octant, or product for mixed factors."""
    if all(block.kind == "half-line" for block in blocks):
        return "semi-infinite-octant"
    if all(block.kind == "simplex" and block.dimension == 1 for block in blocks):
        return "unit-cube"
    if len(blocks) == 1:
        return "simplex"
    return "product"
