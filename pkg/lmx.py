"""
lmx command-line front end.

    python lmx.py <command> <problem.json> [--seed N] [--max-degree K]
                  [--quad-level L] [--format text|jsonl] [--reading R] [--log-level LEVEL]

The run command executes the checks listed in the problem file, in order.

Exit codes: 0 pass, 1 check failure, 2 input error, 3 numerical error.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence, Tuple

from errors import InputError, NumericalError
from function_catalog import REPRESENTATIONS_BY_FUNCTION
from matrix_core import frobenius, identity
from pde_systems import PdeSystemId, format_equation, system_for, system_ids
from pde_verifier import DEFAULT_SWEEP_DEGREE, necessity_probe, verify_system
from problem_file import COMMANDS, ProblemFile, parse_problem_file
from quadrature_oracle import integrate_representation
from series_engine import (
    DIVERGING_SUSPECTED,
    convergence_report,
    evaluate,
    matrix_to_pairs,
    validate_parameters,
)
from verification_report import MODES, VerificationReport, format_report

LOG = logging.getLogger("lmx")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
# Relative agreement required between series and integral values.
INTEGRAL_TOL = 1e-6
NO_REPRESENTATION = {"FC": "no integral representation in simple form (FC)"}


def _require_points(pf: ProblemFile, cmd: str) -> None:
    if not pf.points:
        raise InputError(f"{cmd} needs at least one evaluation point in the problem file")


def _eval(pf: ProblemFile, report: VerificationReport) -> None:
    spec = pf.to_spec()
    _require_points(pf, "eval")
    for k, point in enumerate(pf.points, start=1):
        result = evaluate(spec, point, pf.policy())
        data = {"value": matrix_to_pairs(result.value), "convergence_flag": result.convergence_flag,
                "terms_summed": result.terms_summed}
        check, anchor = f"eval point {k}", f"{spec.id} series, degree <= {pf.max_total_degree}"
        if result.convergence_flag == DIVERGING_SUSPECTED:
            report.add_fail(check, anchor, result.tail_estimate, reason=result.convergence_flag, **data)
        else:
            report.add_pass(check, anchor, result.tail_estimate, **data)


def _converge(pf: ProblemFile, report: VerificationReport) -> None:
    spec = pf.to_spec()
    _require_points(pf, "converge")
    for k, point in enumerate(pf.points, start=1):
        verdict = convergence_report(spec, point)
        if not verdict.checks:
            report.add_skip(f"converge point {k}", f"{spec.id} convergence", verdict.note)
            continue
        anchor = f"{spec.id} convergence conditions"
        for c in verdict.checks:
            check = f"point {k}: {c.inequality}"
            if not verdict.region_stated:
                holds = "holds" if c.passed else "fails"
                report.add_skip(check, f"{spec.id} integral domain",
                                f"unverified: {holds} ({c.lhs:.6g} vs {c.rhs:.6g})")
            elif c.passed:
                report.add_pass(check, anchor, c.lhs, c.rhs)
            else:
                report.add_fail(check, anchor, c.lhs, c.rhs)
        LOG.info("point %d: %s", k, verdict.status)


def _validate(pf: ProblemFile, report: VerificationReport) -> None:
    spec = pf.to_spec()
    reps = pf.representations or REPRESENTATIONS_BY_FUNCTION.get(spec.canonical_id, ())
    scopes = [("pde", None)] + [("integral", rep) for rep in reps]
    for scope, rep in scopes:
        anchor = f"{spec.id} system hypotheses" if scope == "pde" else f"{rep} representation hypotheses"
        violations = validate_parameters(spec, scope, rep)
        for v in violations:
            report.add_fail(v.condition, anchor, v.residual, reason=v.family)
        if not violations:
            report.add_pass("all hypotheses hold", anchor)


def _verify_integral(pf: ProblemFile, report: VerificationReport) -> None:
    spec = pf.to_spec()
    reps = pf.representations or REPRESENTATIONS_BY_FUNCTION.get(spec.canonical_id, ())
    if not reps:
        reason = NO_REPRESENTATION.get(spec.canonical_id, f"no integral representation for {spec.canonical_id}")
        report.add_skip("verify-integral", f"{spec.id} integral representations", reason)
        return
    _require_points(pf, "verify-integral")
    for rep in reps:
        for k, point in enumerate(pf.points, start=1):
            result = integrate_representation(rep, spec, point, pf.quadrature())
            if rep == "dirichlet-lemma":
                expected = identity(spec.order)
            else:
                expected = evaluate(spec, point, pf.policy()).value
            residual = frobenius(expected - result.value) / (1.0 + frobenius(expected))
            report.add_result(f"{rep} point {k}", f"{rep} integral representation", residual, INTEGRAL_TOL,
                              **result.to_dict())


def _verify_pde(pf: ProblemFile, report: VerificationReport) -> None:
    report.extend(verify_system(pf.to_spec(), pf.points, pf.policy(), _sweep_degree(pf), pf.reading))


def _necessity(pf: ProblemFile, report: VerificationReport) -> None:
    spec = pf.to_spec()
    report.extend(necessity_probe(PdeSystemId(system_for(spec.id), 1), spec, pf.seed,
                                  _sweep_degree(pf), pf.reading))


def _terms(pf: ProblemFile, report: VerificationReport) -> None:
    spec = pf.to_spec()
    for eq in system_ids(system_for(spec.id), spec.n):
        report.add_pass(f"equation {eq.equation}", eq.anchor, terms=format_equation(eq, spec, pf.reading))


def _run(pf: ProblemFile, report: VerificationReport) -> None:
    if not pf.checks:
        raise InputError("run needs a non-empty 'checks' list in the problem file")
    for check in pf.checks:
        LOG.info("running %s on %s", check, pf.function)
        HANDLERS[check](pf, report)


def _sweep_degree(pf: ProblemFile) -> int:
    return min(DEFAULT_SWEEP_DEGREE, pf.max_total_degree)


HANDLERS = {
    "eval": _eval,
    "converge": _converge,
    "validate": _validate,
    "verify-integral": _verify_integral,
    "verify-pde": _verify_pde,
    "necessity": _necessity,
    "terms": _terms,
    "run": _run,
}


def run_command(cmd: str, pf: ProblemFile, seed: Optional[int] = None, max_degree: Optional[int] = None,
                quad_level: Optional[int] = None, reading: Optional[str] = None) -> Tuple[VerificationReport, int]:
    """Run one command on a parsed problem file; flags override the file's settings."""
    if cmd not in HANDLERS:
        raise InputError(f"unknown command {cmd!r}; valid commands: {', '.join(COMMANDS)}")
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if max_degree is not None:
        overrides["max_total_degree"] = max_degree
    if quad_level is not None:
        overrides["quad_level"] = quad_level
    if reading is not None:
        overrides["reading"] = reading
    pf = replace(pf, **overrides)
    report = VerificationReport(f"{cmd} {pf.function}")
    HANDLERS[cmd](pf, report)
    return report, report.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmx", description="Lauricella and Srivastava matrix series toolkit")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("problem", help="JSON problem file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--max-degree", type=int, default=None, help="series truncation K")
    parser.add_argument("--quad-level", type=int, default=None, help="quadrature nodes per unit step")
    parser.add_argument("--format", choices=MODES, default="text")
    parser.add_argument("--reading", choices=("intended", "literal"), default=None)
    parser.add_argument("--log-level", default=os.getenv("LMX_LOG_LEVEL", "WARNING"))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format=LOG_FORMAT, stream=sys.stderr)
    try:
        pf = parse_problem_file(args.problem)
        print(f"[*] {args.command} {pf.function} ({args.problem})", file=sys.stderr)
        report, code = run_command(args.command, pf, args.seed, args.max_degree, args.quad_level, args.reading)
    except InputError as e:
        print(f"[!] {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"[!] {e}", file=sys.stderr)
        return 3
    sys.stdout.buffer.write(format_report(report, args.format))
    sys.stdout.flush()
    print(f"[+] {report.summary}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
