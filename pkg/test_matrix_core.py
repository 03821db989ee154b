import os
import unittest
from unittest.mock import patch

import numpy as np
from scipy import linalg as sla
from scipy import special

from errors import (
    DefectiveMatrixError,
    InputError,
    NumericalError,
    PoleError,
    PreconditionError,
    SingularDenominatorError,
)
from matrix_core import (
    ExponentKernel,
    Tolerances,
    as_matrix,
    beta_matrix,
    checked_inverse,
    commute_residual,
    gamma_limit_approx,
    gamma_quotient,
    matrix_gamma,
    pochhammer,
    reciprocal_gamma,
    scalar_power,
    schur_exponential_bound,
    spectral_summary,
)
from sampling import random_unitary


def positive_stable(rng, r, spread=0.3):
    """Non-normal matrix with eigenvalues in Re > 0.5."""
    V = np.eye(r) + spread * rng.standard_normal((r, r))
    lam = rng.uniform(0.5, 2.5, r) + 1j * rng.uniform(-0.5, 0.5, r)
    return V @ np.diag(lam) @ np.linalg.inv(V)


def relative(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class SpectralTests(unittest.TestCase):
    def test_summary_of_diagonal_matrix(self) -> None:
        summary = spectral_summary(np.diag([1.0, -2.0, 0.5]))
        self.assertAlmostEqual(summary.alpha, 1.0)
        self.assertAlmostEqual(summary.beta, -2.0)
        self.assertFalse(summary.defective)

    def test_jordan_block_is_flagged_defective(self) -> None:
        summary = spectral_summary([[1.0, 1.0], [0.0, 1.0]])
        self.assertTrue(summary.defective)
        self.assertEqual(summary.to_dict()["defective"], True)

    def test_as_matrix_rejects_rectangular(self) -> None:
        with self.assertRaises(InputError):
            as_matrix(np.zeros((2, 3)))

    def test_scalar_becomes_one_by_one(self) -> None:
        self.assertEqual(as_matrix(2.5).shape, (1, 1))

    def test_commute_residual(self) -> None:
        A = np.array([[1.0, 1.0], [0.0, 2.0]])
        self.assertAlmostEqual(commute_residual(A, np.eye(2)), 0.0)
        self.assertGreater(commute_residual(A, A.T), 0.1)

    def test_tolerances_read_environment(self) -> None:
        with patch.dict(os.environ, {"LMX_EIG_TOL": "1e-6", "LMX_EIGCOND_CAP": "1e4"}):
            tol = Tolerances.from_env()
        self.assertEqual(tol.eig_tol, 1e-6)
        self.assertEqual(tol.eigcond_cap, 1e4)

    def test_negative_tolerance_rejected(self) -> None:
        with self.assertRaises(InputError):
            Tolerances(commute_tol=-1.0)


class PowerTests(unittest.TestCase):
    def test_scalar_power_of_identity_exponent(self) -> None:
        np.testing.assert_allclose(scalar_power(3.0, np.eye(2)), 3.0 * np.eye(2), atol=1e-14)

    def test_scalar_power_matches_expm(self) -> None:
        rng = np.random.default_rng(4)
        E = positive_stable(rng, 3) - 1.2 * np.eye(3)
        expected = sla.expm(np.log(0.37) * E)
        np.testing.assert_allclose(scalar_power(0.37, E), expected, rtol=1e-11, atol=1e-12)

    def test_scalar_power_rejects_nonpositive_base(self) -> None:
        with self.assertRaises(PreconditionError):
            scalar_power(0.0, np.eye(2))
        with self.assertRaises(PreconditionError):
            scalar_power(-1.0, np.eye(2))

    def test_defective_exponent_falls_back_to_expm(self) -> None:
        kernel = ExponentKernel([[1.0, 1.0], [0.0, 1.0]])
        self.assertFalse(kernel.diagonalizable)
        expected = 2.0 * np.array([[1.0, np.log(2.0)], [0.0, 1.0]])
        np.testing.assert_allclose(kernel.power(2.0), expected, atol=1e-12)

    def test_batched_powers_match_single_powers(self) -> None:
        rng = np.random.default_rng(5)
        E = positive_stable(rng, 2)
        bases = np.array([0.1, 0.5, 0.9])
        batch = ExponentKernel(E).powers(bases)
        for k, t in enumerate(bases):
            np.testing.assert_allclose(batch[k], scalar_power(t, E), atol=1e-13)

    def test_schur_bound_dominates_exponential(self) -> None:
        rng = np.random.default_rng(6)
        for _ in range(10):
            A = rng.standard_normal((3, 3))
            for t in (0.1, 1.0, 3.0):
                self.assertGreaterEqual(schur_exponential_bound(A, t) * (1 + 1e-12),
                                        np.linalg.norm(sla.expm(t * A), 2))


class GammaTests(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(2024)

    def test_diagonal_gamma_matches_scalar(self) -> None:
        values = np.array([0.5, 1.5, 3.2])
        np.testing.assert_allclose(np.diag(matrix_gamma(np.diag(values))), special.gamma(values), rtol=1e-13)

    def test_gamma_pole_raises(self) -> None:
        with self.assertRaises(PoleError):
            matrix_gamma(np.diag([-1.0, 0.5]))

    def test_reciprocal_gamma_vanishes_at_pole(self) -> None:
        result = reciprocal_gamma(np.diag([-1.0, 0.5]))
        self.assertAlmostEqual(abs(result[0, 0]), 0.0, places=12)
        self.assertAlmostEqual(result[1, 1].real, 1.0 / special.gamma(0.5), places=12)

    def test_reciprocal_gamma_inverts_gamma(self) -> None:
        A = positive_stable(self.rng, 3)
        np.testing.assert_allclose(reciprocal_gamma(A) @ matrix_gamma(A), np.eye(3), atol=1e-10)

    def test_defective_gamma_raises(self) -> None:
        with self.assertRaises(DefectiveMatrixError):
            matrix_gamma([[1.0, 1.0], [0.0, 1.0]])

    def test_pochhammer_product_order(self) -> None:
        A = positive_stable(self.rng, 2)
        I = np.eye(2)
        np.testing.assert_allclose(pochhammer(A, 0), I)
        np.testing.assert_allclose(pochhammer(A, 3), A @ (A + I) @ (A + 2 * I), rtol=1e-13)

    def test_pochhammer_gamma_identity(self) -> None:
        for _ in range(20):
            A = positive_stable(self.rng, 3)
            for n in range(9):
                expected = reciprocal_gamma(A) @ matrix_gamma(A + n * np.eye(3))
                self.assertLessEqual(relative(pochhammer(A, n), expected), 1e-9)

    def test_gamma_limit_form_converges(self) -> None:
        for _ in range(5):
            A = positive_stable(self.rng, 3, spread=0.1)
            exact = matrix_gamma(A)
            errors = [np.linalg.norm(gamma_limit_approx(A, n) - exact) for n in (16, 64, 256, 1024)]
            for before, after in zip(errors, errors[1:]):
                self.assertLess(after, 1.1 * before)
            self.assertLess(errors[-1], errors[0])

    def test_gamma_quotient_order(self) -> None:
        A = positive_stable(self.rng, 2)
        B = positive_stable(self.rng, 2)
        expected = matrix_gamma(A) @ reciprocal_gamma(B)
        np.testing.assert_allclose(gamma_quotient([A], [B]), expected, atol=1e-12)

    def test_gamma_quotient_needs_a_factor(self) -> None:
        with self.assertRaises(InputError):
            gamma_quotient([], [])

    def test_checked_inverse_rejects_singular(self) -> None:
        with self.assertRaises(SingularDenominatorError) as ctx:
            checked_inverse(np.diag([1.0, 0.0]), "C1", (1, 0, 0))
        self.assertIn("C1", str(ctx.exception))


class BetaTests(unittest.TestCase):
    def test_beta_matches_gamma_form_for_commuting_pairs(self) -> None:
        rng = np.random.default_rng(11)
        for r in (1, 2, 3, 4):
            V = random_unitary(r, rng)
            A = (V * rng.uniform(0.5, 2.0, r)) @ V.conj().T
            B = (V * rng.uniform(0.5, 2.0, r)) @ V.conj().T
            closed = gamma_quotient([A, B], [A + B])
            np.testing.assert_allclose(beta_matrix(A, B), closed, atol=1e-7)

    def test_scalar_beta(self) -> None:
        self.assertAlmostEqual(beta_matrix(0.3, 1.7)[0, 0].real, special.beta(0.3, 1.7), places=9)

    def test_beta_requires_positive_stable(self) -> None:
        with self.assertRaises(PreconditionError):
            beta_matrix(np.diag([-0.5, 1.0]), np.eye(2))

    def test_beta_rejects_disagreeing_gamma_form(self) -> None:
        A, B = np.diag([0.7, 1.2]), np.diag([1.5, 0.9])
        shifted = gamma_quotient([A, B], [A + B]) + 1e-4 * np.eye(2)
        with patch("matrix_core.gamma_quotient", return_value=shifted):
            with self.assertRaises(NumericalError) as ctx:
                beta_matrix(A, B)
        self.assertIn("gamma form", str(ctx.exception))

    def test_beta_of_non_commuting_pair_skips_gamma_form(self) -> None:
        A = np.array([[1.0, 0.4], [0.0, 1.5]])
        B = np.array([[1.2, 0.0], [0.3, 0.8]])
        with patch("matrix_core.gamma_quotient") as closed:
            value = beta_matrix(A, B)
        closed.assert_not_called()
        self.assertTrue(np.all(np.isfinite(value)))


if __name__ == "__main__":
    unittest.main(verbosity=2)
