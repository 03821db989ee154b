"""
Function Catalog
Factor tables of every Lauricella / Srivastava matrix series, the commutation
hypotheses of their differential systems, and the ids that are aliases.

A series coefficient is the product, left to right, of one Pochhammer symbol
per factor, (M)_k or (M)_k^-1, where M is the role's parameter matrix and k is
the weighted sum of the summation indices named by the factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from errors import InputError

N_VARIABLE_IDS = ("FA", "FB", "FC", "FD")
TRIPLE_IDS = ("F3", "F4", "F6", "F7", "F8", "F10", "F11", "F12", "F13", "F14", "HA", "HB", "HC")
ALIASES = {"F1": "FA", "F2": "FB", "F5": "FC", "F9": "FD"}
FUNCTION_IDS = N_VARIABLE_IDS + TRIPLE_IDS + tuple(ALIASES)


@dataclass(frozen=True)
class PochhammerFactor:
    role: str
    weights: Tuple[int, ...]
    inverse: bool = False

    def order(self, idx: Sequence[int]) -> int:
        return sum(w * m for w, m in zip(self.weights, idx))

    def label(self) -> str:
        power = "^-1" if self.inverse else ""
        return f"({self.role})_k{power}"


@dataclass(frozen=True)
class CommutationFamily:
    """A printed hypothesis such as "B_iC_j = C_jB_i" and the role pairs it covers."""
    label: str
    pairs: Tuple[Tuple[str, str], ...]


@dataclass(frozen=True)
class FunctionDefinition:
    id: str
    n: int
    factors: Tuple[PochhammerFactor, ...]
    commutations: Tuple[CommutationFamily, ...]

    @property
    def roles(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for factor in self.factors:
            if factor.role not in seen:
                seen.append(factor.role)
        return tuple(seen)

    @property
    def denominator_roles(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(f.role for f in self.factors if f.inverse))


def canonical_id(function_id: str) -> str:
    if function_id not in FUNCTION_IDS:
        raise InputError(f"unknown function id {function_id!r}; valid ids: {', '.join(FUNCTION_IDS)}")
    return ALIASES.get(function_id, function_id)


# ── Factor tables ────────────────────────────────────────────────────────────

def _unit(n: int, i: int) -> Tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def _all(n: int) -> Tuple[int, ...]:
    return (1,) * n


def _indexed(letter: str, n: int) -> List[str]:
    return [f"{letter}{i}" for i in range(1, n + 1)]


def _family(label: str, pairs) -> CommutationFamily:
    return CommutationFamily(label, tuple(pairs))


def _pairwise(label: str, roles: Sequence[str]) -> CommutationFamily:
    return _family(label, combinations(roles, 2))


def _cross(label: str, left: Sequence[str], right: Sequence[str]) -> CommutationFamily:
    return _family(label, [(a, b) for a in left for b in right])


def _n_variable(function_id: str, n: int) -> FunctionDefinition:
    B, C, A = _indexed("B", n), _indexed("C", n), _indexed("A", n)
    if function_id == "FA":
        factors = [PochhammerFactor("A", _all(n))]
        factors += [PochhammerFactor(B[i], _unit(n, i)) for i in range(n)]
        factors += [PochhammerFactor(C[i], _unit(n, i), True) for i in range(n)]
        hyps = [_pairwise("B_iB_j = B_jB_i", B), _cross("C_iB_j = B_jC_i", C, B),
                _pairwise("C_iC_j = C_jC_i", C)]
    elif function_id == "FB":
        factors = [PochhammerFactor(A[i], _unit(n, i)) for i in range(n)]
        factors += [PochhammerFactor(B[i], _unit(n, i)) for i in range(n)]
        factors += [PochhammerFactor("C", _all(n), True)]
        hyps = [_pairwise("A_iA_j = A_jA_i", A), _pairwise("B_iB_j = B_jB_i", B),
                _cross("CB_j = B_jC", ["C"], B)]
    elif function_id == "FC":
        factors = [PochhammerFactor("A", _all(n)), PochhammerFactor("B", _all(n))]
        factors += [PochhammerFactor(C[i], _unit(n, i), True) for i in range(n)]
        hyps = [_pairwise("C_iC_j = C_jC_i", C), _cross("C_jB = BC_j", C, ["B"])]
    else:
        factors = [PochhammerFactor("A", _all(n))]
        factors += [PochhammerFactor(B[i], _unit(n, i)) for i in range(n)]
        factors += [PochhammerFactor("C", _all(n), True)]
        hyps = [_pairwise("B_iB_j = B_jB_i", B), _cross("CB_j = B_jC", ["C"], B)]
    return FunctionDefinition(function_id, n, tuple(factors), tuple(h for h in hyps if h.pairs))


M, N, P = (1, 0, 0), (0, 1, 0), (0, 0, 1)
MN, MP, NP, MNP = (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)


def _f(role: str, weights: Tuple[int, ...], inverse: bool = False) -> PochhammerFactor:
    return PochhammerFactor(role, weights, inverse)


_BC_TWO_THREE = _cross("B_iC_j = C_jB_i", ["B1", "B2"], ["C1", "C2", "C3"])
_BC_TWO_TWO = _cross("B_iC_j = C_jB_i", ["B1", "B2"], ["C1", "C2"])

TRIPLE_FACTORS: Dict[str, Tuple[PochhammerFactor, ...]] = {
    "F3": (_f("A1", M), _f("A2", NP), _f("B1", MP), _f("B2", N),
           _f("C1", M, True), _f("C2", N, True), _f("C3", P, True)),
    "F4": (_f("A1", MNP), _f("B1", M), _f("B2", NP),
           _f("C1", M, True), _f("C2", N, True), _f("C3", P, True)),
    "F6": (_f("A1", M), _f("A2", N), _f("A3", P), _f("B1", MP), _f("B2", N),
           _f("C1", M, True), _f("C2", NP, True)),
    "F7": (_f("A1", M), _f("A2", NP), _f("B1", M), _f("B2", N), _f("B3", P),
           _f("C1", MNP, True)),
    "F8": (_f("A1", MNP), _f("B1", M), _f("B2", N), _f("B3", P),
           _f("C1", M, True), _f("C2", NP, True)),
    "F10": (_f("A1", MP), _f("A2", N), _f("B1", MP), _f("B2", N),
            _f("C1", M, True), _f("C2", NP, True)),
    "F11": (_f("A1", M), _f("A2", NP), _f("B1", MP), _f("B2", N),
            _f("C1", M, True), _f("C2", NP, True)),
    "F12": (_f("A1", MP), _f("A2", N), _f("B1", MN), _f("B2", P),
            _f("C1", M, True), _f("C2", NP, True)),
    "F13": (_f("A1", M), _f("A2", NP), _f("B1", MP), _f("B2", N),
            _f("C1", MNP, True)),
    "F14": (_f("A1", MNP), _f("B1", MP), _f("B2", N),
            _f("C1", M, True), _f("C2", NP, True)),
    "HA": (_f("A", MP), _f("B", MN), _f("B'", NP), _f("C", M, True), _f("C'", NP, True)),
    "HB": (_f("A", MP), _f("B", MN), _f("B'", NP),
           _f("C", M, True), _f("C'", N, True), _f("C''", P, True)),
    "HC": (_f("A", MP), _f("B", MN), _f("B'", NP), _f("C", MNP, True)),
}

TRIPLE_COMMUTATIONS: Dict[str, Tuple[CommutationFamily, ...]] = {
    "F3": (_pairwise("A1A2 = A2A1", ["A1", "A2"]), _pairwise("B1B2 = B2B1", ["B1", "B2"]),
           _BC_TWO_THREE, _pairwise("C_iC_j = C_jC_i", ["C1", "C2", "C3"])),
    "F4": (_pairwise("B1B2 = B2B1", ["B1", "B2"]), _pairwise("C_iC_j = C_jC_i", ["C1", "C2", "C3"]),
           _BC_TWO_THREE),
    "F6": (_pairwise("A_iA_j = A_jA_i", ["A1", "A2", "A3"]), _pairwise("B1B2 = B2B1", ["B1", "B2"]),
           _pairwise("C1C2 = C2C1", ["C1", "C2"]), _BC_TWO_TWO),
    "F7": (_pairwise("A1A2 = A2A1", ["A1", "A2"]), _pairwise("B_iB_j = B_jB_i", ["B1", "B2", "B3"]),
           _cross("B_iC1 = C1B_i", ["B1", "B2", "B3"], ["C1"])),
    "F8": (_pairwise("B_iB_j = B_jB_i", ["B1", "B2", "B3"]), _pairwise("C1C2 = C2C1", ["C1", "C2"]),
           _cross("B_iC_j = C_jB_i", ["B1", "B2", "B3"], ["C1", "C2"])),
    "F10": (_pairwise("A1A2 = A2A1", ["A1", "A2"]), _pairwise("B1B2 = B2B1", ["B1", "B2"]),
            _pairwise("C1C2 = C2C1", ["C1", "C2"]), _BC_TWO_TWO),
    "F11": (_pairwise("A1A2 = A2A1", ["A1", "A2"]), _pairwise("B1B2 = B2B1", ["B1", "B2"]),
            _pairwise("C1C2 = C2C1", ["C1", "C2"]), _BC_TWO_TWO),
    "F12": (_pairwise("A1A2 = A2A1", ["A1", "A2"]), _pairwise("B1B2 = B2B1", ["B1", "B2"]),
            _pairwise("C1C2 = C2C1", ["C1", "C2"]), _BC_TWO_TWO),
    "F13": (_pairwise("A1A2 = A2A1", ["A1", "A2"]), _pairwise("B1B2 = B2B1", ["B1", "B2"]),
            _cross("B_iC1 = C1B_i", ["B1", "B2"], ["C1"])),
    "F14": (_pairwise("B1B2 = B2B1", ["B1", "B2"]), _pairwise("C1C2 = C2C1", ["C1", "C2"]),
            _BC_TWO_TWO),
    "HA": (_pairwise("B, B', C, C' commute", ["B", "B'", "C", "C'"]),),
    "HB": (_pairwise("B, B', C, C', C'' commute", ["B", "B'", "C", "C'", "C''"]),),
    "HC": (_pairwise("B, B', C commute", ["B", "B'", "C"]),),
}


def definition(function_id: str, n: Optional[int] = None) -> FunctionDefinition:
    """Factor table and hypotheses for a function id; aliases resolve to n = 3."""
    canonical = canonical_id(function_id)
    if function_id in ALIASES:
        if n not in (None, 3):
            raise InputError(f"{function_id} is a three-variable function, got n={n}")
        n = 3
    if canonical in N_VARIABLE_IDS:
        if n is None or n < 1:
            raise InputError(f"{canonical} needs a variable count n >= 1, got {n}")
        return _n_variable(canonical, n)
    if n not in (None, 3):
        raise InputError(f"{canonical} is a three-variable function, got n={n}")
    return FunctionDefinition(canonical, 3, TRIPLE_FACTORS[canonical], TRIPLE_COMMUTATIONS[canonical])


def infer_variable_count(function_id: str, roles: Sequence[str]) -> Optional[int]:
    """Variable count implied by indexed role names (B1..Bn etc.), None if nothing indexed."""
    canonical = canonical_id(function_id)
    if canonical not in N_VARIABLE_IDS or function_id in ALIASES:
        return 3
    letter = {"FA": "B", "FB": "A", "FC": "C", "FD": "B"}[canonical]
    indices = [int(r[1:]) for r in roles if r.startswith(letter) and r[1:].isdigit()]
    return max(indices) if indices else None


# ── Integral representations ─────────────────────────────────────────────────

@dataclass(frozen=True)
class RoleCombination:
    """Signed sum of role matrices, e.g. C - B1 - B2."""
    terms: Tuple[Tuple[int, str], ...]

    @property
    def label(self) -> str:
        text = ""
        for sign, role in self.terms:
            text += (role if not text else f"+{role}") if sign > 0 else f"-{role}"
        return text

    def evaluate(self, params):
        first_sign, first_role = self.terms[0]
        value = first_sign * params[first_role]
        for sign, role in self.terms[1:]:
            value = value + sign * params[role]
        return value


def _combo(*labels: str) -> RoleCombination:
    terms = [(1, labels[0])] + [(-1, r[1:]) if r.startswith("-") else (1, r) for r in labels[1:]]
    return RoleCombination(tuple(terms))


@dataclass(frozen=True)
class RepresentationHypotheses:
    id: str
    function_id: str
    commutations: Tuple[CommutationFamily, ...]
    positive_stable: Tuple[RoleCombination, ...]


REPRESENTATION_IDS = ("FA-nfold", "FB-simplex", "FD-euler", "FD-simplex", "dirichlet-lemma",
                      "F6", "F7", "F8", "F11", "F12", "F13", "HA", "HB", "HC")

REPRESENTATIONS_BY_FUNCTION = {
    "FA": ("FA-nfold",), "FB": ("FB-simplex",), "FD": ("FD-euler", "FD-simplex"),
    "F6": ("F6",), "F7": ("F7",), "F8": ("F8",), "F11": ("F11",), "F12": ("F12",),
    "F13": ("F13",), "HA": ("HA",), "HB": ("HB",), "HC": ("HC",),
}


def _stable(*labels: str) -> Tuple[RoleCombination, ...]:
    return tuple(_combo(*label.split()) for label in labels)


def representation_hypotheses(rep_id: str, n: int = 3) -> RepresentationHypotheses:
    """Commutation and positive-stability hypotheses under which an integral representation holds."""
    if rep_id not in REPRESENTATION_IDS:
        raise InputError(f"unknown representation {rep_id!r}; valid ids: {', '.join(REPRESENTATION_IDS)}")
    A, B, C = _indexed("A", n), _indexed("B", n), _indexed("C", n)
    minus_b = " ".join(f"-{b}" for b in B)
    if rep_id == "FA-nfold":
        return RepresentationHypotheses(rep_id, "FA", (
            _pairwise("B_iB_j = B_jB_i", B), _cross("C_iB_j = B_jC_i", C, B),
            _pairwise("C_iC_j = C_jC_i", C)),
            _stable(*B, *C, *[f"{c} -{b}" for b, c in zip(B, C)]))
    if rep_id in ("FB-simplex", "FD-simplex"):
        return RepresentationHypotheses(rep_id, rep_id[:2], (
            _pairwise("B_iB_j = B_jB_i", B), _cross("CB_j = B_jC", ["C"], B)),
            _stable(*B, "C", f"C {minus_b}"))
    if rep_id == "FD-euler":
        return RepresentationHypotheses(rep_id, "FD", (
            _cross("CB_i = B_iC", ["C"], B), _pairwise("AC = CA", ["A", "C"])),
            _stable("A", "C", "C -A"))
    if rep_id == "dirichlet-lemma":
        return RepresentationHypotheses(rep_id, "FB", (_pairwise("A_1, ..., A_n, C commute", [*A, "C"]),),
                                        _stable(*A, "C", " ".join([*A, "C"])))
    table = {
        "F6": ((_pairwise("A_iA_j = A_jA_i", ["A1", "A2", "A3"]), _BC_TWO_TWO,
                _pairwise("C1C2 = C2C1", ["C1", "C2"]),
                _cross("A_iC_j = C_jA_i", ["A1", "A2", "A3"], ["C1", "C2"])),
               _stable("A1", "A2", "A3", "C1", "C2", "C1 -A1", "C2 -A2 -A3")),
        "F7": ((_pairwise("B_iB_j = B_jB_i", ["B1", "B2", "B3"]),
                _cross("B_iC1 = C1B_i", ["B1", "B2", "B3"], ["C1"])),
               _stable("B1", "B2", "B3", "C1", "C1 -B1 -B2 -B3")),
        "F8": ((_pairwise("B_iB_j = B_jB_i", ["B1", "B2", "B3"]), _pairwise("C1C2 = C2C1", ["C1", "C2"]),
                _cross("B_iC_j = C_jB_i", ["B1", "B2", "B3"], ["C1", "C2"])),
               _stable("B1", "B2", "B3", "C1", "C2", "C1 -B1", "C2 -B2 -B3")),
        "F11": ((_pairwise("A1A2 = A2A1", ["A1", "A2"]), _BC_TWO_TWO, _pairwise("C1C2 = C2C1", ["C1", "C2"]),
                 _cross("A_iC_j = C_jA_i", ["A1", "A2"], ["C1", "C2"])),
                _stable("A1", "A2", "C1", "C2", "C1 -A1", "C2 -A2")),
        "F12": ((_pairwise("C1, C2, B1, B2, A2 commute", ["C1", "C2", "B1", "B2", "A2"]),),
                _stable("A2", "B1", "B2", "C1", "C2", "C1 -B1", "C2 -A2 -B2")),
        "F13": ((_pairwise("C1, B1, B2 commute", ["C1", "B1", "B2"]),),
                _stable("B1", "B2", "C1", "C1 -B1 -B2")),
        "HA": ((_pairwise("B, B', C, C' commute", ["B", "B'", "C", "C'"]),),
               _stable("B", "B'", "C", "C'", "C -B", "C' -B'")),
        "HB": ((_cross("B, B' commute with A", ["B", "B'"], ["A"]),),
               _stable("A", "B", "B'")),
        "HC": ((_pairwise("A, B, C commute", ["A", "B", "C"]), _pairwise("B'C = CB'", ["B'", "C"])),
               _stable("A", "B", "C", "C -A -B")),
    }
    commutations, stable = table[rep_id]
    return RepresentationHypotheses(rep_id, rep_id, commutations, stable)
