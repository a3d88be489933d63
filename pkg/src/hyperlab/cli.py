"""Command-line entry point: ``hyperlab run``, ``hyperlab verify-all`` and ``hyperlab eig``.

Exit status is 0 when every asserted invariant passed, 1 on a failed invariant
or a numerical failure, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    BudgetError,
    DimensionError,
    GeneratorContractError,
    InfeasibleError,
    NotHyperbolicAtPoint,
    NumericalFailure,
    PreconditionError,
)
from .forms import form_from_descriptor
from .montecarlo import resolve_threads
from .spectra import eigenvalues
from .suites import ExperimentSpec, rows_to_csv, run_suite, summary_json

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

USAGE_ERRORS = (PreconditionError, DimensionError, BudgetError, InfeasibleError, KeyError, TypeError, ValueError)
NUMERICAL_ERRORS = (NotHyperbolicAtPoint, NumericalFailure, GeneratorContractError, ArithmeticError)


def write_reports(spec: ExperimentSpec, prefix: str, threads: int | None) -> int:
    result = run_suite(spec, threads)
    out = Path(prefix)
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.csv").write_text(rows_to_csv(result.rows))
    Path(f"{prefix}.json").write_text(summary_json(spec, result))
    status = "PASS" if result.passed else f"FAIL ({result.failures} failing rows)"
    print(f"{spec.suite}: {len(result.rows)} rows, {status} -> {prefix}.csv, {prefix}.json")
    return EXIT_OK if result.passed else EXIT_FAILED


def _cmd_run(args) -> int:
    try:
        text = Path(args.spec).read_text()
    except OSError as exc:
        raise PreconditionError(f"cannot read spec: {exc}") from None
    spec = ExperimentSpec.from_json(text)
    return write_reports(spec, args.out or spec.output, args.threads)


def _cmd_verify_all(args) -> int:
    spec = ExperimentSpec("verify_all", args.seed, output=args.out)
    return write_reports(spec, args.out, args.threads)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise PreconditionError(f"cannot parse {text!r} as comma-separated reals") from None


FAMILY_ALIASES = {
    "product": "product",
    "lorentz": "lorentz",
    "det": "det_symmetric",
    "det_symmetric": "det_symmetric",
    "esym": "elementary_symmetric",
    "elementary_symmetric": "elementary_symmetric",
}


def _cmd_eig(args) -> int:
    kind = FAMILY_ALIASES.get(args.family)
    if kind is None:
        raise PreconditionError(f"unknown family {args.family!r}")
    desc = {"type": kind}
    for key in ("m", "d", "k"):
        if getattr(args, key) is not None:
            desc[key] = getattr(args, key)
    if args.e is not None:
        desc["e"] = _parse_floats(args.e)
    form = form_from_descriptor(desc)
    spec = eigenvalues(form, _parse_floats(args.x))
    print(json.dumps(spec.to_json()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment spec (JSON)")
    run.add_argument("spec", help="path to the experiment JSON")
    run.add_argument("--threads", type=int, default=None, help="worker threads (default: HYPERLAB_THREADS or 1)")
    run.add_argument("--out", default=None, help="output prefix (default: the experiment's output field)")
    run.set_defaults(func=_cmd_run)

    va = sub.add_parser("verify-all", help="run the fixed-budget property battery")
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--threads", type=int, default=None)
    va.add_argument("--out", default="verify_all")
    va.set_defaults(func=_cmd_verify_all)

    eig = sub.add_parser("eig", help="print the hyperbolic eigenvalues of one point")
    eig.add_argument("--family", required=True, help="product, lorentz, det_symmetric or elementary_symmetric")
    eig.add_argument("--m", type=int, default=None)
    eig.add_argument("--d", type=int, default=None)
    eig.add_argument("--k", type=int, default=None)
    eig.add_argument("--e", default=None, help="direction for product forms, comma separated")
    eig.add_argument("--x", required=True, help="point, comma separated")
    eig.set_defaults(func=_cmd_eig)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if getattr(args, "threads", None) is not None:
            resolve_threads(args.threads)
        return args.func(args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except USAGE_ERRORS as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
