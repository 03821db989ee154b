import io
import json
import os
import tempfile
import unittest
from unittest.mock import patch

import numpy as np

import lmx
from errors import InputError
from function_catalog import definition
from problem_file import parse_problem_text
from sampling import system_draw
from series_engine import matrix_to_pairs

SCALAR_FD = {
    "function": "FD",
    "parameters": {"A": [[1]], "B1": [[1]], "C": [[2]]},
    "points": [[0.5]],
    "truncation": {"max_total_degree": 60},
}


def f3_commuting_problem(seed=3):
    params = system_draw("F3", 3, 2, np.random.default_rng(seed))
    return {
        "function": "F3",
        "parameters": {role: matrix_to_pairs(M) for role, M in params.items()},
        "points": [[0.1, 0.05, -0.08]],
        "truncation": {"max_total_degree": 12},
    }


class MainTests(unittest.TestCase):
    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def _write(self, data, name="problem.json") -> str:
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f)
        return path

    def _run(self, *argv):
        stdout = io.TextIOWrapper(io.BytesIO(), encoding="utf-8")
        stderr = io.StringIO()
        with patch("sys.stdout", stdout), patch("sys.stderr", stderr):
            code = lmx.main(list(argv))
        stdout.flush()
        return code, stdout.buffer.getvalue().decode("utf-8"), stderr.getvalue()

    def test_eval_scalar_gauss_function(self) -> None:
        code, out, err = self._run("eval", self._write(SCALAR_FD))
        self.assertEqual(code, 0)
        self.assertIn("1.38629436", out)
        self.assertIn("[+]", err)

    def test_verify_pde_on_commuting_parameters(self) -> None:
        code, out, _ = self._run("verify-pde", self._write(f3_commuting_problem()))
        self.assertEqual(code, 0)
        self.assertIn("F3 system, equation 3", out)

    def test_verify_integral_without_representation_is_skipped(self) -> None:
        problem = {"function": "FC", "n": 2,
                   "parameters": {"A": [[0.5]], "B": [[0.5]], "C1": [[1.5]], "C2": [[1.5]]},
                   "points": [[0.1, 0.1]]}
        code, out, _ = self._run("verify-integral", self._write(problem), "--format", "jsonl")
        self.assertEqual(code, 0)
        record = json.loads(out.splitlines()[0])
        self.assertEqual(record["status"], "skipped")
        self.assertEqual(record["reason"], "no integral representation in simple form (FC)")

    def test_input_error_exits_two(self) -> None:
        problem = dict(SCALAR_FD, function="F15")
        code, out, err = self._run("eval", self._write(problem))
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("F15", err)

    def test_numerical_error_exits_three(self) -> None:
        problem = dict(SCALAR_FD, parameters={"A": [[1]], "B1": [[1]], "C": [[-1]]})
        code, _, err = self._run("eval", self._write(problem))
        self.assertEqual(code, 3)
        self.assertIn("singular denominator", err)

    def test_hypothesis_violation_exits_one(self) -> None:
        problem = {"function": "FD",
                   "parameters": {"A": [[1, 0.5], [0, 1.2]], "B1": [[1, 0], [0.4, 1.1]], "C": [[3, 1], [0, 3.5]]},
                   "points": [[0.1]]}
        code, out, _ = self._run("validate", self._write(problem))
        self.assertEqual(code, 1)
        self.assertIn("AC = CA", out)

    def test_run_command_uses_problem_checks(self) -> None:
        code, out, _ = self._run("run", self._write(dict(SCALAR_FD, checks=["eval", "terms"])), "--format", "jsonl")
        self.assertEqual(code, 0)
        checks = [json.loads(line)["check"] for line in out.splitlines()]
        self.assertEqual(checks, ["eval point 1", "equation 1"])

    def test_unknown_command_rejected_by_parser(self) -> None:
        with patch("sys.stderr", io.StringIO()):
            with self.assertRaises(SystemExit):
                lmx.main(["prove", self._write(SCALAR_FD)])


class RunCommandTests(unittest.TestCase):
    def test_flag_overrides_truncation(self) -> None:
        pf = parse_problem_text(json.dumps(SCALAR_FD))
        report, code = lmx.run_command("eval", pf, max_degree=8)
        self.assertEqual(code, 0)
        self.assertEqual(report.checks[0].anchor, "FD series, degree <= 8")

    def test_terms_prints_each_equation(self) -> None:
        pf = parse_problem_text(json.dumps(f3_commuting_problem()))
        report, code = lmx.run_command("terms", pf)
        self.assertEqual(code, 0)
        self.assertEqual(len(report.checks), 3)
        self.assertTrue(report.checks[0].data["terms"].startswith("F3 system, equation 1: xU_xx"))

    def test_converge_on_tabulated_domain_skips(self) -> None:
        roles = definition("F6").roles
        problem = {"function": "F6", "parameters": {role: [[1]] for role in roles}, "points": [[0.1, 0.1, 0.1]]}
        report, code = lmx.run_command("converge", parse_problem_text(json.dumps(problem)))
        self.assertEqual(code, 0)
        self.assertTrue(all(c.status == "skipped" for c in report.checks))
        self.assertIn("unverified", report.checks[0].reason)

    def test_necessity_seed_override(self) -> None:
        pf = parse_problem_text(json.dumps(f3_commuting_problem()))
        report, code = lmx.run_command("necessity", pf, seed=4, max_degree=4)
        self.assertEqual(code, 0)
        self.assertTrue(all(c.check.startswith("violate ") for c in report.checks))

    def test_run_executes_listed_checks_in_order(self) -> None:
        problem = dict(SCALAR_FD, checks=["converge", "eval"])
        report, code = lmx.run_command("run", parse_problem_text(json.dumps(problem)))
        self.assertEqual(code, 0)
        self.assertEqual(report.title, "run FD")
        self.assertTrue(report.checks[0].check.startswith("point 1: "))
        self.assertEqual(report.checks[-1].check, "eval point 1")

    def test_run_without_checks_is_an_input_error(self) -> None:
        with self.assertRaises(InputError):
            lmx.run_command("run", parse_problem_text(json.dumps(SCALAR_FD)))

    def test_verify_integral_matches_series(self) -> None:
        problem = {"function": "FD", "parameters": {"A": [[0.7]], "B1": [[0.6]], "C": [[1.9]]},
                   "points": [[0.2]], "truncation": {"max_total_degree": 40}, "quadrature": {"level": 6}}
        report, code = lmx.run_command("verify-integral", parse_problem_text(json.dumps(problem)))
        self.assertEqual(code, 0)
        self.assertEqual([c.check for c in report.checks], ["FD-euler point 1", "FD-simplex point 1"])


if __name__ == "__main__":
    unittest.main(verbosity=2)
