import unittest

import numpy as np

from errors import DomainError, HypothesisError, InputError
from function_catalog import N_VARIABLE_IDS, REPRESENTATION_IDS, representation_hypotheses
from matrix_core import frobenius, gamma_quotient
from quadrature_oracle import (
    HB_DECAY_CONDITION,
    dirichlet_simplex_integral,
    integrate_representation,
    integral_value,
    representations_for,
)
from quadrature_rules import QuadratureSpec
from sampling import commuting_draw, interior_point, representation_draw
from series_engine import FunctionSpec, TruncationPolicy, evaluate

SERIES_POLICY = TruncationPolicy(30)
RELATIVE_TOL = 1e-6
LEVEL = QuadratureSpec(level=6)


def relative(a, b):
    return frobenius(a - b) / frobenius(b)


def variable_count(rep):
    return 2 if representation_hypotheses(rep, 2).function_id in N_VARIABLE_IDS else 3


def spec_for(rep, rng, r=2, n=None):
    n = n or variable_count(rep)
    hyps = representation_hypotheses(rep, n)
    return FunctionSpec(hyps.function_id, representation_draw(rep, n, r, rng), n)


CASES = [(rep, variable_count(rep)) for rep in REPRESENTATION_IDS if rep != "dirichlet-lemma"] + [("FA-nfold", 3)]
DRAWS = 5
POINTS = 3


class DirichletIntegralTests(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(5)

    def test_gamma_closed_form(self) -> None:
        for n in (1, 2, 3):
            roles = [f"A{i + 1}" for i in range(n)] + ["C"]
            params = commuting_draw(roles, 2, self.rng)
            As = [params[f"A{i + 1}"] for i in range(n)]
            closed = gamma_quotient(As + [params["C"]], [sum(As) + params["C"]])
            value = dirichlet_simplex_integral(As, params["C"], QuadratureSpec(level=7, dimension=n, region="simplex"))
            with self.subTest(n=n):
                self.assertLess(relative(value, closed), 1e-7)

    def test_non_commuting_pair_rejected(self) -> None:
        A = np.array([[1.0, 0.3], [0.0, 1.2]])
        with self.assertRaises(HypothesisError) as ctx:
            dirichlet_simplex_integral([A, A.T], np.eye(2))
        self.assertIn("A1A2 = A2A1", ctx.exception.conditions)

    def test_lemma_normalizes_to_identity(self) -> None:
        spec = spec_for("dirichlet-lemma", self.rng)
        value = integral_value("dirichlet-lemma", spec, [0.0, 0.0], QuadratureSpec(level=7))
        self.assertLess(frobenius(value - np.eye(2)), 1e-7)


class RepresentationTests(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(17)

    def test_every_representation_matches_the_series(self) -> None:
        for rep, n in CASES:
            for draw in range(DRAWS):
                spec = spec_for(rep, self.rng, n=n)
                for k in range(POINTS):
                    x = interior_point(n, self.rng)
                    series = evaluate(spec, x, SERIES_POLICY).value
                    result = integrate_representation(rep, spec, x, LEVEL)
                    with self.subTest(representation=rep, n=n, draw=draw, point=k):
                        error = frobenius(result.value - series)
                        self.assertLessEqual(error, RELATIVE_TOL * (1.0 + frobenius(series)))
                        self.assertGreater(result.nodes, 0)

    def test_three_by_three_parameters(self) -> None:
        for rep in ("FD-euler", "F7", "HC"):
            spec = spec_for(rep, self.rng, r=3)
            x = interior_point(spec.n, self.rng)
            series = evaluate(spec, x, SERIES_POLICY).value
            with self.subTest(representation=rep):
                self.assertLess(relative(integral_value(rep, spec, x, LEVEL), series), RELATIVE_TOL)

    def test_origin_gives_identity(self) -> None:
        spec = spec_for("FD-euler", self.rng)
        value = integral_value("FD-euler", spec, [0.0, 0.0], QuadratureSpec(level=6))
        self.assertLess(frobenius(value - np.eye(2)), 1e-7)

    def test_error_estimate_is_reported(self) -> None:
        spec = spec_for("FB-simplex", self.rng)
        result = integrate_representation("FB-simplex", spec, [0.1, -0.05], QuadratureSpec(level=6))
        data = result.to_dict()
        self.assertEqual(data["level"], 6)
        self.assertGreaterEqual(data["error_estimate"], 0.0)

    def test_representations_for_function(self) -> None:
        self.assertEqual(representations_for("F9"), ("FD-euler", "FD-simplex"))
        self.assertEqual(representations_for("FC"), ())


class GuardTests(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(23)

    def test_point_outside_domain(self) -> None:
        spec = spec_for("FD-euler", self.rng)
        with self.assertRaises(DomainError) as ctx:
            integrate_representation("FD-euler", spec, [1.2, 0.0])
        self.assertEqual(ctx.exception.inequality, "max |x_i| < 1")

    def test_hb_needs_decaying_integrand(self) -> None:
        spec = spec_for("HB", self.rng)
        with self.assertRaises(DomainError) as ctx:
            integrate_representation("HB", spec, [0.3, 0.3, 0.3])
        self.assertEqual(ctx.exception.inequality, HB_DECAY_CONDITION)
        self.assertLess(ctx.exception.lhs, 0.0)

    def test_hb_accepts_point_with_positive_decay(self) -> None:
        spec = spec_for("HB", self.rng)
        x = [0.3, 0.3, 0.0]
        result = integrate_representation("HB", spec, x, LEVEL)
        series = evaluate(spec, x, TruncationPolicy(60)).value
        self.assertLess(relative(result.value, series), RELATIVE_TOL)

    def test_region_request_must_match_layout(self) -> None:
        spec = spec_for("FD-euler", self.rng)
        with self.assertRaises(InputError):
            integrate_representation("FD-euler", spec, [0.1, 0.1], QuadratureSpec(level=6, region="semi-infinite-octant"))
        with self.assertRaises(InputError):
            integrate_representation("FD-euler", spec, [0.1, 0.1], QuadratureSpec(level=6, dimension=2))

    def test_result_reports_region(self) -> None:
        spec = spec_for("HB", self.rng)
        q = QuadratureSpec(level=5, dimension=3, region="semi-infinite-octant")
        data = integrate_representation("HB", spec, [0.1, 0.05, -0.05], q).to_dict()
        self.assertEqual((data["region"], data["dimension"]), ("semi-infinite-octant", 3))

    def test_unstable_combination_rejected(self) -> None:
        params = {"A": 1.5 * np.eye(2), "B1": np.eye(2), "C": np.eye(2)}
        spec = FunctionSpec("FD", params, 1)
        with self.assertRaises(HypothesisError) as ctx:
            integrate_representation("FD-euler", spec, [0.1])
        self.assertTrue(any("C-A positive stable" in c for c in ctx.exception.conditions))

    def test_representation_of_another_function(self) -> None:
        spec = spec_for("FD-euler", self.rng)
        with self.assertRaises(InputError):
            integrate_representation("FB-simplex", spec, [0.1, 0.1])

    def test_unknown_representation(self) -> None:
        spec = spec_for("FD-euler", self.rng)
        with self.assertRaises(InputError):
            integrate_representation("FC-mellin", spec, [0.1, 0.1])


if __name__ == "__main__":
    unittest.main(verbosity=2)
