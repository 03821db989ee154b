"""
Seeded parameter draws.

Commuting draws share one random unitary eigenbasis V: every role is
V diag(d) V^H with real spectra, so all commutation hypotheses hold exactly.
Violating draws keep that construction for one pair and add a strictly upper
triangular perturbation (in the V basis) to one member of the pair.
"""

from __future__ import annotations

import logging
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from errors import InputError
from function_catalog import RoleCombination, definition, representation_hypotheses
from matrix_core import ComplexMatrix

LOG = logging.getLogger(__name__)

DEFAULT_SEED = 0
SPECTRUM = (0.3, 1.5)
# Gap added on top of the subtracted roles so C - B1 - ... stays positive stable.
MARGIN = (0.5, 1.2)
PERTURBATION_NORM = 0.1


def rng_for(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def random_unitary(r: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar unitary: QR of a complex Gaussian matrix with the phases of R folded into Q."""
    Z = (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def _conjugate(V: ComplexMatrix, spectrum: np.ndarray) -> ComplexMatrix:
    return (V * spectrum) @ V.conj().T


def _spectra(roles: Iterable[str], r: int, rng: np.random.Generator,
             combos: Sequence[RoleCombination] = ()) -> Dict[str, np.ndarray]:
    """Real spectra per role; a combination's head role is lifted above the roles it subtracts."""
    low, high = SPECTRUM
    spectra = {role: rng.uniform(low, high, r) for role in roles}
    lifts: Dict[str, np.ndarray] = {}
    for combo in combos:
        head_sign, head = combo.terms[0]
        minus = [role for sign, role in combo.terms[1:] if sign < 0]
        if head_sign < 0 or not minus:
            continue
        floor = sum(spectra[role] for role in minus)
        lifts[head] = np.maximum(lifts.get(head, floor), floor)
    for head, floor in lifts.items():
        spectra[head] = floor + rng.uniform(*MARGIN, r)
    return spectra


def commuting_draw(roles: Sequence[str], r: int, rng: np.random.Generator,
                   combos: Sequence[RoleCombination] = ()) -> Dict[str, ComplexMatrix]:
    V = random_unitary(r, rng)
    return {role: _conjugate(V, d) for role, d in _spectra(roles, r, rng, combos).items()}


def diagonal_draw(roles: Sequence[str], r: int, rng: np.random.Generator,
                  combos: Sequence[RoleCombination] = ()) -> Dict[str, ComplexMatrix]:
    return {role: np.diag(d).astype(np.complex128) for role, d in _spectra(roles, r, rng, combos).items()}


def system_draw(function_id: str, n: Optional[int], r: int, rng: np.random.Generator) -> Dict[str, ComplexMatrix]:
    """Parameters satisfying every commutation hypothesis of the function's PDE system."""
    return commuting_draw(definition(function_id, n).roles, r, rng)


def representation_draw(rep: str, n: int, r: int, rng: np.random.Generator) -> Dict[str, ComplexMatrix]:
    """Parameters satisfying the commutation and positive-stability hypotheses of a representation."""
    hyps = representation_hypotheses(rep, n)
    roles = definition(hyps.function_id, n).roles
    return commuting_draw(roles, r, rng, hyps.positive_stable)


def violating_draw(roles: Sequence[str], pair: Tuple[str, str], r: int, rng: np.random.Generator,
                   scale: float = PERTURBATION_NORM) -> Dict[str, ComplexMatrix]:
    """
    Scalar multiples of I for every role outside `pair`; the pair shares a random
    eigenbasis and the first member gets a strictly upper triangular perturbation.
    """
    if r < 2:
        raise InputError("a commutation hypothesis can only be violated with matrices of order >= 2")
    first, second = pair
    for role in pair:
        if role not in roles:
            raise InputError(f"role {role} is not a parameter of this function")
    low, high = SPECTRUM
    params = {role: complex(rng.uniform(low, high)) * np.eye(r, dtype=np.complex128) for role in roles}
    V = random_unitary(r, rng)
    # Distinct eigenvalues on the partner keep the commutator with the perturbation nonzero.
    partner = np.sort(rng.uniform(low, high, r)) + np.arange(r) * 0.1
    N = np.triu(rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r)), k=1)
    N *= scale / np.linalg.norm(N)
    params[first] = _conjugate(V, rng.uniform(low, high, r)) + V @ N @ V.conj().T
    params[second] = _conjugate(V, partner)
    LOG.debug("violating %s%s = %s%s with perturbation norm %.3g", first, second, second, first, scale)
    return params


def interior_point(n: int, rng: np.random.Generator, radius: float = 0.3) -> np.ndarray:
    """Real point with sum |x_i| <= radius, inside every tabulated domain."""
    x = rng.uniform(-1.0, 1.0, n)
    total = np.sum(np.abs(x))
    return x * (radius * rng.uniform(0.2, 1.0) / total) if total > 0 else x
