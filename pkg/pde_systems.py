"""
PDE Systems
Bilateral matrix differential systems satisfied by each series, written once
in OperatorTerm normal form: coefficient * L * monomial(x) * dU * R.

Factors L and R are ordered products of (role + shift*I) atoms, so
"-A1 U (B1+I)" is OperatorTerm(-1, (0,0,0), (0,0,0), (("A1", 0),), (("B1", 1),)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from errors import InputError
from function_catalog import N_VARIABLE_IDS, TRIPLE_IDS, canonical_id
from matrix_core import ComplexMatrix, identity

Atom = Tuple[str, int]

SYSTEM_IDS = tuple(f"{fid}-sys" for fid in N_VARIABLE_IDS + TRIPLE_IDS)
READINGS = ("intended", "literal")

# Printed lowercase u_xx in the third F10 equation; "literal" drops it.
TAG_LOWERCASE_U = "lowercase-u"
# U B B' in the second HA / HB equations.
TAG_RIGHT_PRODUCT = "right-product"

TRIPLE_VARIABLES = ("x", "y", "z")


@dataclass(frozen=True)
class OperatorTerm:
    coefficient: float
    monomial: Tuple[int, ...]
    derivative: Tuple[int, ...]
    left: Tuple[Atom, ...] = ()
    right: Tuple[Atom, ...] = ()
    tag: str = ""

    @property
    def order(self) -> int:
        return sum(self.derivative)

    def left_matrix(self, params: Mapping[str, ComplexMatrix], r: int) -> ComplexMatrix:
        return _product(self.left, params, r)

    def right_matrix(self, params: Mapping[str, ComplexMatrix], r: int) -> ComplexMatrix:
        return _product(self.right, params, r)

    def describe(self, variables: Optional[Sequence[str]] = None) -> str:
        names = variables or default_variables(len(self.monomial))
        coef = abs(self.coefficient)
        text = "-" if self.coefficient < 0 else "+"
        if coef != 1:
            text += f"{coef:g}"
        text += _atoms_text(self.left)
        text += "".join(name * p for name, p in zip(names, self.monomial))
        wrt = "".join(name * d for name, d in zip(names, self.derivative))
        text += f"U_{wrt}" if wrt else "U"
        text += _atoms_text(self.right)
        return text


@dataclass(frozen=True)
class PdeSystemId:
    system: str
    equation: int

    def __post_init__(self):
        if self.system not in SYSTEM_IDS:
            raise InputError(f"unknown PDE system {self.system!r}; valid ids: {', '.join(SYSTEM_IDS)}")
        if self.equation < 1:
            raise InputError(f"equation index must be >= 1, got {self.equation}")

    @property
    def function_id(self) -> str:
        return self.system[:-4]

    @property
    def anchor(self) -> str:
        return f"{self.function_id} system, equation {self.equation}"


def default_variables(n: int) -> Tuple[str, ...]:
    return TRIPLE_VARIABLES if n == 3 else tuple(f"x{i}" for i in range(1, n + 1))


def system_variables(system: str, n: int) -> Tuple[str, ...]:
    if system[:-4] in N_VARIABLE_IDS:
        return tuple(f"x{i}" for i in range(1, n + 1))
    return TRIPLE_VARIABLES


def system_for(function_id: str) -> str:
    return f"{canonical_id(function_id)}-sys"


def equation_count(system: str, n: int) -> int:
    return n if system[:-4] in N_VARIABLE_IDS else 3


def system_ids(system: str, n: int) -> List[PdeSystemId]:
    return [PdeSystemId(system, e) for e in range(1, equation_count(system, n) + 1)]


def _atoms_text(atoms: Tuple[Atom, ...]) -> str:
    parts = []
    for role, shift in atoms:
        parts.append(f"({role}+{shift}I)" if shift > 1 else f"({role}+I)" if shift == 1 else role)
    return "".join(parts)


def _product(atoms: Tuple[Atom, ...], params: Mapping[str, ComplexMatrix], r: int) -> ComplexMatrix:
    result = identity(r)
    for role, shift in atoms:
        result = result @ (params[role] + shift * np.eye(r))
    return result


# ── Term builders ────────────────────────────────────────────────────────────

def _atoms(text: str) -> Tuple[Atom, ...]:
    """'B1+I' -> (('B1', 1),); "B B'" -> (('B', 0), ("B'", 0))."""
    atoms = []
    for part in text.split():
        role, _, shift = part.partition("+")
        atoms.append((role, 1 if shift == "I" else 0))
    return tuple(atoms)


def _letters(text: str) -> Tuple[int, ...]:
    return tuple(text.count(v) for v in TRIPLE_VARIABLES)


def _t(coef: float, mono: str, deriv: str, left: str = "", right: str = "", tag: str = "") -> OperatorTerm:
    """Triple-variable term; monomial and derivative as letter strings, e.g. ("xz", "xz") = xz U_xz."""
    return OperatorTerm(float(coef), _letters(mono), _letters(deriv), _atoms(left), _atoms(right), tag)


def _powers(n: int, *indices: int) -> Tuple[int, ...]:
    return tuple(indices.count(k) for k in range(n))


def _nt(coef: float, n: int, mono: Sequence[int], deriv: Sequence[int],
        left: str = "", right: str = "") -> OperatorTerm:
    """n-variable term; monomial and derivative as lists of 0-based variable indices."""
    return OperatorTerm(float(coef), _powers(n, *mono), _powers(n, *deriv), _atoms(left), _atoms(right))


# ── n-variable systems ───────────────────────────────────────────────────────

def _fa_equation(n: int, i: int) -> List[OperatorTerm]:
    k = i + 1
    terms = [_nt(1, n, [i], [i, i]), _nt(-1, n, [i, i], [i, i])]
    terms += [_nt(-1, n, [i, j], [i, j]) for j in range(n) if j != i]
    terms.append(_nt(-1, n, [i], [i], left="A+I"))
    terms += [_nt(-1, n, [j], [j], right=f"B{k}") for j in range(n)]
    terms.append(_nt(1, n, [], [i], right=f"C{k}"))
    terms.append(_nt(-1, n, [], [], left="A", right=f"B{k}"))
    return terms


def _fb_equation(n: int, i: int) -> List[OperatorTerm]:
    k = i + 1
    terms = [_nt(1, n, [i], [i, i]), _nt(-1, n, [i, i], [i, i])]
    terms += [_nt(1, n, [j], [i, j]) for j in range(n) if j != i]
    terms.append(_nt(-1, n, [i], [i], left=f"A{k}+I"))
    terms.append(_nt(-1, n, [i], [i], right=f"B{k}"))
    terms.append(_nt(1, n, [], [i], right="C"))
    terms.append(_nt(-1, n, [], [], left=f"A{k}", right=f"B{k}"))
    return terms


def _fc_equation(n: int, i: int) -> List[OperatorTerm]:
    k = i + 1
    terms = [_nt(1, n, [i], [i, i]), _nt(-1, n, [i, i], [i, i])]
    terms += [_nt(-1, n, [j, j], [j, j]) for j in range(n) if j != i]
    terms += [_nt(-2, n, [a, b], [a, b]) for a in range(n) for b in range(a + 1, n)]
    terms += [_nt(-1, n, [j], [j], left="A+I") for j in range(n)]
    terms.append(_nt(1, n, [], [i], right=f"C{k}"))
    terms += [_nt(-1, n, [j], [j], right="B") for j in range(n)]
    terms.append(_nt(-1, n, [], [], left="A", right="B"))
    return terms


def _fd_equation(n: int, i: int) -> List[OperatorTerm]:
    k = i + 1
    terms = [_nt(1, n, [i], [i, i]), _nt(-1, n, [i, i], [i, i])]
    for j in range(n):
        if j != i:
            terms += [_nt(1, n, [j], [i, j]), _nt(-1, n, [i, j], [i, j])]
    terms.append(_nt(-1, n, [i], [i], left="A+I"))
    terms.append(_nt(1, n, [], [i], right="C"))
    terms += [_nt(-1, n, [j], [j], right=f"B{k}") for j in range(n)]
    terms.append(_nt(-1, n, [], [], left="A", right=f"B{k}"))
    return terms


N_VARIABLE_SYSTEMS = {"FA": _fa_equation, "FB": _fb_equation, "FC": _fc_equation, "FD": _fd_equation}


# ── Triple-variable systems ──────────────────────────────────────────────────

_F6_EQ1 = (
    _t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-1, "xz", "xz"), _t(1, "", "x", right="C1"),
    _t(-1, "x", "x", right="B1+I"), _t(-1, "x", "x", left="A1"), _t(-1, "z", "z", left="A1"),
    _t(-1, "", "", left="A1", right="B1"),
)

_HA_EQ1 = (
    _t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"), _t(-1, "xz", "xz"),
    _t(-1, "z", "z", right="B"), _t(1, "", "x", right="C"), _t(-1, "x", "x", right="B+I"),
    _t(-1, "y", "y", left="A"), _t(-1, "x", "x", left="A"), _t(-1, "", "", left="A", right="B"),
)

TRIPLE_SYSTEMS: Dict[str, Tuple[Tuple[OperatorTerm, ...], ...]] = {
    "F3": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-1, "xz", "xz"), _t(1, "", "x", right="C1"),
         _t(-1, "x", "x", right="B1+I"), _t(-1, "x", "x", left="A1"), _t(-1, "z", "z", left="A1"),
         _t(-1, "", "", left="A1", right="B1")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "yz", "yz"), _t(1, "", "y", right="C2"),
         _t(-1, "y", "y", right="B2+I"), _t(-1, "z", "z", right="B2"), _t(-1, "y", "y", left="A2"),
         _t(-1, "", "", left="A2", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"), _t(-1, "xz", "xz"),
         _t(1, "", "z", right="C3"), _t(-1, "z", "z", right="B1+I"), _t(-1, "y", "y", right="B1"),
         _t(-1, "x", "x", left="A2"), _t(-1, "z", "z", left="A2"), _t(-1, "", "", left="A2", right="B1")),
    ),
    "F4": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-1, "xy", "xy"), _t(-1, "xz", "xz"),
         _t(-1, "y", "y", right="B1"), _t(-1, "z", "z", right="B1"), _t(1, "", "x", right="C1"),
         _t(-1, "x", "x", right="B1+I"), _t(-1, "x", "x", left="A1"), _t(-1, "", "", left="A1", right="B1")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "xy", "xy"), _t(-1, "xz", "xz"), _t(-2, "yz", "yz"),
         _t(-1, "zz", "zz"), _t(-1, "x", "x", right="B2"), _t(1, "", "y", right="C2"),
         _t(-1, "y", "y", right="B2+I"), _t(-1, "y", "y", left="A1"), _t(-1, "z", "z", left="A1"),
         _t(-1, "z", "z", right="B2+I"), _t(-1, "", "", left="A1", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xy", "xy"), _t(-1, "xz", "xz"), _t(-2, "yz", "yz"),
         _t(-1, "yy", "yy"), _t(-1, "x", "x", right="B2"), _t(1, "", "z", right="C3"),
         _t(-1, "z", "z", right="B2+I"), _t(-1, "y", "y", left="A1"), _t(-1, "z", "z", left="A1"),
         _t(-1, "y", "y", right="B2+I"), _t(-1, "", "", left="A1", right="B2")),
    ),
    "F6": (
        _F6_EQ1,
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(1, "z", "yz"), _t(1, "", "y", right="C2"),
         _t(-1, "y", "y", right="B2+I"), _t(-1, "y", "y", left="A2"), _t(-1, "", "", left="A2", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xz", "xz"), _t(1, "y", "yz"), _t(1, "", "z", right="C2"),
         _t(-1, "z", "z", right="B1+I"), _t(-1, "x", "x", left="A3"), _t(-1, "z", "z", left="A3"),
         _t(-1, "", "", left="A3", right="B1")),
    ),
    "F7": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(1, "y", "xy"), _t(1, "z", "xz"), _t(1, "", "x", right="C1"),
         _t(-1, "x", "x", right="B1+I"), _t(-1, "x", "x", left="A1"), _t(-1, "", "", left="A1", right="B1")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(1, "x", "xy"), _t(1, "z", "yz"), _t(-1, "yz", "yz"),
         _t(-1, "z", "z", right="B2"), _t(1, "", "y", right="C1"), _t(-1, "y", "y", right="B2+I"),
         _t(-1, "y", "y", left="A2"), _t(-1, "", "", left="A2", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(1, "x", "xz"), _t(1, "y", "yz"), _t(-1, "yz", "yz"),
         _t(-1, "y", "y", right="B3"), _t(1, "", "z", right="C1"), _t(-1, "z", "z", right="B3+I"),
         _t(-1, "z", "z", left="A2"), _t(-1, "", "", left="A2", right="B3")),
    ),
    "F8": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-1, "xy", "xy"), _t(-1, "xz", "xz"), _t(-1, "x", "x", left="A1"),
         _t(1, "", "x", right="C1"), _t(-1, "x", "x", right="B1+I"), _t(-1, "y", "y", right="B1"),
         _t(-1, "z", "z", right="B1"), _t(-1, "", "", left="A1", right="B1")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"), _t(1, "z", "yz"),
         _t(-1, "y", "y", left="A1"), _t(-1, "x", "x", right="B2"), _t(-1, "z", "z", right="B2"),
         _t(1, "", "y", right="C2"), _t(-1, "y", "y", right="B2+I"), _t(-1, "", "", left="A1", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xz", "xz"), _t(-1, "yz", "yz"), _t(1, "y", "yz"),
         _t(-1, "z", "z", left="A1"), _t(-1, "x", "x", right="B3"), _t(-1, "y", "y", right="B3"),
         _t(1, "", "z", right="C2"), _t(-1, "z", "z", right="B3+I"), _t(-1, "", "", left="A1", right="B3")),
    ),
    "F10": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-2, "xz", "xz"), _t(-1, "zz", "zz"),
         _t(-1, "z", "z", right="B1+I"), _t(1, "", "x", right="C1"), _t(-1, "x", "x", right="B1+I"),
         _t(-1, "x", "x", left="A1"), _t(-1, "z", "z", left="A1"), _t(-1, "", "", left="A1", right="B1")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(1, "z", "yz"), _t(1, "", "y", right="C2"),
         _t(-1, "y", "y", right="B2+I"), _t(-1, "y", "y", left="A2"), _t(-1, "", "", left="A2", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-2, "xz", "xz"), _t(1, "y", "yz"),
         _t(-1, "xx", "xx", tag=TAG_LOWERCASE_U), _t(1, "", "z", right="C2"), _t(-1, "x", "x", right="B1+I"),
         _t(-1, "z", "z", right="B1+I"), _t(-1, "x", "x", left="A1"), _t(-1, "z", "z", left="A1"),
         _t(-1, "", "", left="A1", right="B1")),
    ),
    "F11": (
        _F6_EQ1,
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "yz", "yz"), _t(1, "z", "yz"), _t(-1, "z", "z", right="B2"),
         _t(1, "", "y", right="C2"), _t(-1, "y", "y", right="B2+I"), _t(-1, "y", "y", left="A2"),
         _t(-1, "", "", left="A2", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"), _t(-1, "xz", "xz"),
         _t(1, "y", "yz"), _t(-1, "y", "y", right="B1"), _t(1, "", "z", right="C2"),
         _t(-1, "z", "z", right="B1+I"), _t(-1, "x", "x", left="A2"), _t(-1, "z", "z", left="A2"),
         _t(-1, "", "", left="A2", right="B1")),
    ),
    "F12": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"), _t(-1, "xz", "xz"),
         _t(-1, "z", "z", right="B1"), _t(1, "", "x", right="C1"), _t(-1, "x", "x", right="B1+I"),
         _t(-1, "x", "x", left="A1"), _t(-1, "y", "y", left="A1"), _t(-1, "", "", left="A1", right="B1")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "xy", "xy"), _t(1, "z", "yz"), _t(1, "", "y", right="C2"),
         _t(-1, "y", "y", right="B1+I"), _t(-1, "x", "x", left="A2"), _t(-1, "y", "y", left="A2"),
         _t(-1, "", "", left="A2", right="B1")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xz", "xz"), _t(1, "y", "yz"), _t(1, "", "z", right="C2"),
         _t(-1, "z", "z", right="B2+I"), _t(-1, "x", "x", right="B2"), _t(-1, "z", "z", left="A1"),
         _t(-1, "", "", left="A1", right="B2")),
    ),
    "F13": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(1, "y", "xy"), _t(1, "z", "xz"), _t(-1, "xz", "xz"),
         _t(1, "", "x", right="C1"), _t(-1, "x", "x", right="B1+I"), _t(-1, "x", "x", left="A1"),
         _t(-1, "z", "z", left="A1"), _t(-1, "", "", left="A1", right="B1")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(1, "x", "xy"), _t(1, "z", "yz"), _t(-1, "yz", "yz"),
         _t(-1, "z", "z", right="B2"), _t(1, "", "y", right="C1"), _t(-1, "y", "y", right="B2+I"),
         _t(-1, "y", "y", left="A2"), _t(-1, "", "", left="A2", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(1, "x", "xz"), _t(1, "y", "yz"), _t(-1, "xy", "xy"),
         _t(-1, "yz", "yz"), _t(-1, "xz", "xz"), _t(1, "", "z", right="C1"), _t(-1, "z", "z", right="B1+I"),
         _t(-1, "y", "y", right="B1"), _t(-1, "x", "x", left="A2"), _t(-1, "z", "z", left="A2"),
         _t(-1, "", "", left="A2", right="B1")),
    ),
    "F14": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"), _t(-2, "xz", "xz"),
         _t(-1, "zz", "zz"), _t(1, "", "x", right="C1"), _t(-1, "x", "x", right="B1+I"), _t(-1, "z", "z"),
         _t(-1, "y", "y", right="B1"), _t(-1, "z", "z", right="B1"), _t(-1, "x", "x", left="A1"),
         _t(-1, "z", "z", left="A1"), _t(-1, "", "", left="A1", right="B1")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "xy", "xy"), _t(1, "z", "yz"), _t(-1, "yz", "yz"),
         _t(-1, "z", "z", right="B2"), _t(-1, "x", "x", right="B2"), _t(1, "", "y", right="C2"),
         _t(-1, "y", "y", right="B2+I"), _t(-1, "y", "y", left="A1"), _t(-1, "", "", left="A1", right="B2")),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-2, "xz", "xz"), _t(1, "y", "yz"), _t(-1, "xy", "xy"),
         _t(-1, "yz", "yz"), _t(1, "", "z", right="C2"), _t(-1, "z", "z", right="B1+I"), _t(-1, "xx", "xx"),
         _t(-1, "x", "x", right="B1+I"), _t(-1, "y", "y", right="B1"), _t(-1, "x", "x", left="A1"),
         _t(-1, "z", "z", left="A1"), _t(-1, "", "", left="A1", right="B1")),
    ),
    "HA": (
        _HA_EQ1,
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "xy", "xy"), _t(-1, "xz", "xz"), _t(-1, "yz", "yz"),
         _t(1, "z", "yz"), _t(-1, "x", "x", right="B'"), _t(1, "", "y", right="C'"),
         _t(-1, "y", "y", right="B'+I"), _t(-1, "y", "y", right="B"), _t(-1, "z", "z", right="B"),
         _t(-1, "", "", right="B B'", tag=TAG_RIGHT_PRODUCT)),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xz", "xz"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"),
         _t(1, "y", "yz"), _t(-1, "x", "x", right="B'"), _t(1, "", "z", right="C'"),
         _t(-1, "z", "z", right="B'+I"), _t(-1, "y", "y", left="A"), _t(-1, "z", "z", left="A"),
         _t(-1, "", "", left="A", right="B'")),
    ),
    "HB": (
        _HA_EQ1,
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "xy", "xy"), _t(-1, "xz", "xz"), _t(-1, "yz", "yz"),
         _t(-1, "x", "x", right="B'"), _t(1, "", "y", right="C'"), _t(-1, "y", "y", right="B'+I"),
         _t(-1, "y", "y", right="B"), _t(-1, "z", "z", right="B"),
         _t(-1, "", "", right="B B'", tag=TAG_RIGHT_PRODUCT)),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xz", "xz"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"),
         _t(-1, "x", "x", right="B'"), _t(1, "", "z", right="C''"), _t(-1, "z", "z", right="B'+I"),
         _t(-1, "y", "y", left="A"), _t(-1, "z", "z", left="A"), _t(-1, "", "", left="A", right="B'")),
    ),
    "HC": (
        (_t(1, "x", "xx"), _t(-1, "xx", "xx"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"), _t(-1, "xz", "xz"),
         _t(1, "y", "xy"), _t(1, "z", "xz"), _t(-1, "z", "z", right="B"), _t(1, "", "x", right="C"),
         _t(-1, "x", "x", right="B+I"), _t(-1, "y", "y", left="A"), _t(-1, "x", "x", left="A"),
         _t(-1, "", "", left="A", right="B")),
        (_t(1, "y", "yy"), _t(-1, "yy", "yy"), _t(-1, "xy", "xy"), _t(-1, "xz", "xz"), _t(-1, "yz", "yz"),
         _t(1, "x", "xy"), _t(1, "z", "yz"), _t(-1, "x", "x", right="B'"), _t(1, "", "y", right="C"),
         _t(-1, "y", "y", right="B'+I"), _t(-1, "y", "y", right="B"), _t(-1, "z", "z", right="B"),
         _t(-1, "", "", right="B B'", tag=TAG_RIGHT_PRODUCT)),
        (_t(1, "z", "zz"), _t(-1, "zz", "zz"), _t(-1, "xz", "xz"), _t(-1, "xy", "xy"), _t(-1, "yz", "yz"),
         _t(1, "x", "xz"), _t(1, "y", "yz"), _t(1, "", "z", right="C"), _t(-1, "z", "z", right="B'+I"),
         _t(-1, "x", "x", right="B'"), _t(-1, "y", "y", left="A"), _t(-1, "z", "z", left="A"),
         _t(-1, "", "", left="A", right="B'")),
    ),
}


def system_terms(id: PdeSystemId, spec, reading: str = "intended") -> List[OperatorTerm]:
    """Terms of one equation, signs included, in the order they are printed."""
    if reading not in READINGS:
        raise InputError(f"unknown reading {reading!r}; expected one of {READINGS}")
    if spec.canonical_id != id.function_id:
        raise InputError(f"system {id.system} does not belong to function {spec.id}")
    count = equation_count(id.system, spec.n)
    if id.equation > count:
        raise InputError(f"{id.system} has {count} equations, got equation {id.equation}")
    if id.function_id in N_VARIABLE_SYSTEMS:
        return N_VARIABLE_SYSTEMS[id.function_id](spec.n, id.equation - 1)
    terms = TRIPLE_SYSTEMS[id.function_id][id.equation - 1]
    if reading == "literal":
        return [t for t in terms if t.tag != TAG_LOWERCASE_U]
    return list(terms)


def format_equation(id: PdeSystemId, spec, reading: str = "intended") -> str:
    names = system_variables(id.system, spec.n)
    body = " ".join(t.describe(names) for t in system_terms(id, spec, reading))
    return f"{id.anchor}: {body.lstrip('+')} = 0"
