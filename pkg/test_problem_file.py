import json
import os
import tempfile
import unittest

import numpy as np

from errors import InputError, ProblemFileError
from problem_file import parse_problem_file, parse_problem_text

MINIMAL = """{
  "function": "FD",
  "parameters": {
    "A": [[1]],
    "B1": [[1]],
    "C": [[2]]
  },
  "points": [[0.5]]
}"""


class ParseTests(unittest.TestCase):
    def test_minimal_file(self) -> None:
        pf = parse_problem_text(MINIMAL)
        self.assertEqual(pf.function, "FD")
        self.assertEqual(pf.n, 1)
        self.assertEqual(pf.points, ((0.5 + 0j,),))
        self.assertEqual(pf.max_total_degree, 20)
        self.assertEqual(pf.reading, "intended")

    def test_complex_entries(self) -> None:
        text = MINIMAL.replace('"A": [[1]]', '"A": [[[1.5, -0.25]]]')
        spec = parse_problem_text(text).to_spec()
        self.assertEqual(spec.params["A"][0, 0], 1.5 - 0.25j)

    def test_ragged_matrix_names_field_and_line(self) -> None:
        text = MINIMAL.replace('"B1": [[1]]', '"B1": [[1, 0, 0], [0, 1, 0]]')
        with self.assertRaises(ProblemFileError) as ctx:
            parse_problem_text(text)
        self.assertEqual(ctx.exception.field, "parameters.B1")
        self.assertEqual(ctx.exception.line, 5)
        self.assertIn("non-square", str(ctx.exception))

    def test_unknown_function(self) -> None:
        with self.assertRaises(ProblemFileError) as ctx:
            parse_problem_text(MINIMAL.replace('"FD"', '"F15"'))
        self.assertEqual(ctx.exception.field, "function")
        self.assertIn("HC", str(ctx.exception))

    def test_invalid_json_reports_line(self) -> None:
        with self.assertRaises(ProblemFileError) as ctx:
            parse_problem_text('{\n  "function": "FD",\n  "parameters": ]\n}')
        self.assertEqual(ctx.exception.line, 3)

    def test_unknown_field(self) -> None:
        text = MINIMAL.replace('"points"', '"pointz"')
        with self.assertRaises(ProblemFileError) as ctx:
            parse_problem_text(text)
        self.assertEqual(ctx.exception.field, "pointz")

    def test_point_length_checked(self) -> None:
        with self.assertRaises(ProblemFileError) as ctx:
            parse_problem_text(MINIMAL.replace("[[0.5]]", "[[0.5, 0.1]]"))
        self.assertEqual(ctx.exception.field, "points")

    def test_missing_role_is_an_input_error(self) -> None:
        text = MINIMAL.replace('"B1": [[1]],\n    "C": [[2]]', '"B1": [[1]]')
        with self.assertRaises(InputError) as ctx:
            parse_problem_text(text)
        self.assertIn("missing required role(s) C", str(ctx.exception))

    def test_variables_set_the_count(self) -> None:
        data = json.loads(MINIMAL)
        data["variables"] = ["s", "t"]
        data["parameters"]["B2"] = [[1]]
        data["points"] = [[0.1, 0.2]]
        pf = parse_problem_text(json.dumps(data))
        self.assertEqual(pf.n, 2)

    def test_unknown_check_and_reading(self) -> None:
        data = json.loads(MINIMAL)
        data["checks"] = ["eval", "prove"]
        with self.assertRaises(ProblemFileError):
            parse_problem_text(json.dumps(data))
        data["checks"] = ["eval"]
        data["reading"] = "loose"
        with self.assertRaises(ProblemFileError):
            parse_problem_text(json.dumps(data))

    def test_low_quadrature_level(self) -> None:
        data = json.loads(MINIMAL)
        data["quadrature"] = {"level": 2}
        with self.assertRaises(ProblemFileError) as ctx:
            parse_problem_text(json.dumps(data))
        self.assertEqual(ctx.exception.field, "quadrature.level")

    def test_run_is_not_a_check(self) -> None:
        data = json.loads(MINIMAL)
        data["checks"] = ["eval", "run"]
        with self.assertRaises(ProblemFileError) as ctx:
            parse_problem_text(json.dumps(data))
        self.assertEqual(ctx.exception.field, "checks")

    def test_quadrature_region_request(self) -> None:
        data = json.loads(MINIMAL)
        data["quadrature"] = {"level": 5, "region": "unit-cube", "dimension": 1}
        q = parse_problem_text(json.dumps(data)).quadrature()
        self.assertEqual((q.level, q.region, q.dimension), (5, "unit-cube", 1))
        data["quadrature"] = {"region": "sphere"}
        with self.assertRaises(ProblemFileError) as ctx:
            parse_problem_text(json.dumps(data))
        self.assertEqual(ctx.exception.field, "quadrature.region")

    def test_serialized_file_parses_back(self) -> None:
        data = json.loads(MINIMAL)
        data["parameters"]["A"] = [[[0.5, 0.1], 0], [0, 1]]
        data["parameters"]["B1"] = [[1, 0], [0, 2]]
        data["parameters"]["C"] = [[3, 1], [0, 3]]
        data["truncation"] = {"max_total_degree": 12, "tail_tol": 1e-12}
        pf = parse_problem_text(json.dumps(data))
        again = parse_problem_text(pf.to_json())
        self.assertEqual(again, pf)
        np.testing.assert_array_equal(again.to_spec().params["C"], pf.to_spec().params["C"])


class FileTests(unittest.TestCase):
    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "problem.json")

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def test_reads_from_disk(self) -> None:
        with open(self.path, "w", encoding="utf-8") as f:
            f.write(MINIMAL)
        pf = parse_problem_file(self.path)
        self.assertEqual(pf.source, self.path)

    def test_missing_file(self) -> None:
        with self.assertRaises(ProblemFileError):
            parse_problem_file(os.path.join(self.tmp.name, "absent.json"))


if __name__ == "__main__":
    unittest.main(verbosity=2)
