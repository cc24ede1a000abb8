"""Command-line driver: parse, classify, solve, verify, report as JSON."""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Any, Optional

from .classify import ClassTag, classify
from .core import RationalAIR
from .errors import AirError, InvalidArgumentError
from .parser import parse_ode, render
from .solve import pull_back, select_start, solve_canonical, verify

EXIT_PASS = 0
EXIT_INPUT = 1
EXIT_FAIL = 2

COEFF_NAMES = ("a0", "a1", "a2", "a3", "s0", "s1", "s2", "r0", "r1", "r2")

DEGENERATE_NOTE = (
    "S(x) and R(x) share a root: after swapping x and y the equation is a first-order "
    "linear ODE, solvable by quadrature; no special-function solution is constructed."
)


def cnum(z) -> dict:
    z = complex(z)
    return {"re": float(f"{z.real:.17g}"), "im": float(f"{z.imag:.17g}")}


def _scalar(value, name: str) -> complex:
    if isinstance(value, dict):
        if set(value) - {"re", "im"}:
            raise InvalidArgumentError(f"coefficient {name}: expected keys re/im")
        return complex(float(value.get("re", 0)), float(value.get("im", 0)))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", "").replace("i", "j"))
        except ValueError:
            raise InvalidArgumentError(f"coefficient {name}: cannot read {value!r}") from None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise InvalidArgumentError(f"coefficient {name}: unsupported value {value!r}")


def equation_from_doc(doc: dict) -> RationalAIR:
    """Build the equation from an input document with ``expr`` or ``coeffs``."""
    if not isinstance(doc, dict) or ("expr" in doc) == ("coeffs" in doc):
        raise InvalidArgumentError("input document needs exactly one of 'expr' or 'coeffs'")
    if "expr" in doc:
        if not isinstance(doc["expr"], str):
            raise InvalidArgumentError("'expr' must be a string")
        return parse_ode(doc["expr"])
    coeffs = doc["coeffs"]
    if isinstance(coeffs, list):
        if len(coeffs) != 10:
            raise InvalidArgumentError("'coeffs' list must hold a0..a3, s0..s2, r0..r2")
        coeffs = dict(zip(COEFF_NAMES, coeffs))
    if not isinstance(coeffs, dict):
        raise InvalidArgumentError("'coeffs' must be an object or a list")
    unknown = set(coeffs) - set(COEFF_NAMES)
    if unknown:
        raise InvalidArgumentError(f"unknown coefficient names: {sorted(unknown)}")
    v = [_scalar(coeffs.get(n, 0), n) for n in COEFF_NAMES]
    return RationalAIR.from_vector(v)


@dataclass
class Options:
    mode: str = "solve"
    tol: float = 1e-6
    start: Optional[tuple[float, complex]] = None
    x1: Optional[float] = None
    seed: Optional[int] = None


@dataclass
class Report:
    doc: dict = field(default_factory=dict)
    exit_code: int = EXIT_PASS


def _error_doc(err: Exception) -> dict:
    code = getattr(err, "code", "io_error" if isinstance(err, OSError) else "error")
    return {"code": code, "message": str(err)}


def run(doc: dict, opts: Options | None = None) -> Report:
    """Classify (and unless ``opts.mode == 'classify'``, solve and verify) one input."""
    opts = opts or Options()
    out: dict[str, Any] = {"status": None, "warnings": [], "notes": []}
    try:
        eq = equation_from_doc(doc)
        out["equation"] = {"text": render(eq), "coeffs": dict(zip(COEFF_NAMES, map(cnum, eq.vector())))}
        cls, chain = classify(eq)
    except AirError as err:
        out["status"] = "input_error"
        out["error"] = _error_doc(err)
        return Report(out, EXIT_INPUT)

    out["class"] = {"tag": cls.tag.value, "params": {k: cnum(v) for k, v in cls.named.items()}}
    out["chain"] = chain.describe()
    if cls.tag is ClassTag.DEGENERATE_LINEAR:
        out["status"] = "degenerate"
        out["notes"].append(DEGENERATE_NOTE)
        return Report(out, EXIT_PASS)
    if opts.mode == "classify":
        out["status"] = "classified"
        return Report(out, EXIT_PASS)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            sol = pull_back(solve_canonical(cls), chain)
            out["solution"] = sol.description
            out["verification"] = _verify(eq, sol, opts, out["warnings"])
        except AirError as err:
            out["status"] = "fail"
            out["error"] = _error_doc(err)
            out["verification"] = None
        for w in caught:
            if str(w.message) not in out["warnings"]:
                out["warnings"].append(str(w.message))
    if out["status"] is None:
        out["status"] = "pass" if out["verification"]["pass"] else "fail"
    return Report(out, EXIT_PASS if out["status"] == "pass" else EXIT_FAIL)


def _verify(eq, sol, opts: Options, warn: list) -> dict:
    if opts.start is None:
        if opts.x1 is not None:
            warn.append("--to ignored without --from; path chosen automatically")
        x0, y0, x1, res = select_start(eq, sol, seed=opts.seed)
        auto = True
    else:
        x0, y0 = opts.start
        x1 = opts.x1 if opts.x1 is not None else (x0 + 1.0 if x0 + 1.0 <= 1.0 else x0 - 1.0)
        res = verify(eq, sol, x0, y0, x1)
        auto = False
    if res.cut_crossed:
        warn.append("path crosses a branch cut of the solution; drift reflects a change of branch")
    if res.singular:
        warn.append(f"integration stopped at a singularity: {res.trajectory.message}")
    drift = res.drift
    ok = bool(math.isfinite(drift) and drift < opts.tol and not res.singular)
    return {
        "x0": float(x0),
        "y0": cnum(y0),
        "x1": float(x1),
        "x_end": float(res.trajectory.xs[-1]),
        "steps": len(res.trajectory),
        "automatic": auto,
        "drift": drift if math.isfinite(drift) else None,
        "tol": opts.tol,
        "pass": ok,
    }


# ------------------------------------------------------------------ text output


def _fmtc(z: dict) -> str:
    if z["im"] == 0:
        return f"{z['re']:.6g}"
    return f"{complex(z['re'], z['im']):.6g}"


def pretty(doc: dict) -> str:
    lines = []
    if "equation" in doc:
        lines.append(f"equation: {doc['equation']['text']}")
    if "class" in doc:
        params = ", ".join(f"{k}={_fmtc(v)}" for k, v in doc["class"]["params"].items())
        lines.append(f"class:    {doc['class']['tag']}" + (f"{{{params}}}" if params else ""))
    for i, step in enumerate(doc.get("chain", []), 1):
        lines.append(f"  step {i}: {step}")
    if doc.get("solution"):
        lines.append(f"solution: {doc['solution']}")
    ver = doc.get("verification")
    if ver:
        lines.append(
            f"verify:   x {ver['x0']:.6g} -> {ver['x1']:.6g}, y0 = {_fmtc(ver['y0'])}, "
            f"drift {ver['drift'] if ver['drift'] is not None else math.nan:.3e} (tol {ver['tol']:.1e}) {'PASS' if ver['pass'] else 'FAIL'}"
        )
    if "error" in doc:
        lines.append(f"error:    [{doc['error']['code']}] {doc['error']['message']}")
    for n in doc.get("notes", []):
        lines.append(f"note:     {n}")
    for w in doc.get("warnings", []):
        lines.append(f"warning:  {w}")
    lines.append(f"status:   {doc['status']}")
    return "\n".join(lines)


# ------------------------------------------------------------------ argparse


def _parse_start(text: str) -> tuple[float, complex]:
    try:
        xs, ys = text.split(",", 1)
        return float(xs), complex(ys.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x0,y0 (y0 may be complex, e.g. 0.1,0.3+0.1i); got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="airabel",
        description="Classify Abel equations of AIR form y' = P(y)/(S(x) y + R(x)) and verify closed-form solutions.",
    )
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("expr", nargs="?", help="equation text, e.g. \"y' = 1/(y + x^2)\"")
    src.add_argument("-f", "--file", help="UTF-8 JSON file with 'expr' or 'coeffs'; '-' reads stdin")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="JSON report (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="human-readable summary")
    common.set_defaults(pretty=False)

    sub = p.add_subparsers(dest="mode")
    sub.add_parser("classify", parents=[common], help="stop after classification")
    solve = sub.add_parser("solve", parents=[common], help="classify, solve and verify (default)")
    solve.add_argument("--tol", type=float, default=1e-6, help="drift threshold for a pass (default 1e-6)")
    solve.add_argument("--from", dest="start", type=_parse_start, metavar="X0,Y0", help="verification start")
    solve.add_argument("--to", dest="x1", type=float, metavar="X1", help="verification end point (real x)")
    solve.add_argument("--seed", type=int, help="jitter the automatic start grid")
    return p


def _load(args) -> dict:
    if args.file:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        try:
            return json.loads(text)
        except json.JSONDecodeError as err:
            raise InvalidArgumentError(f"input file is not valid JSON: {err}") from None
    if args.expr is None:
        raise InvalidArgumentError("no input: give an equation or --file")
    return {"expr": args.expr}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in ("classify", "solve", "-h", "--help"):
        argv.insert(0, "solve")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    if args.mode == "solve" and not args.tol > 0:
        parser.print_usage(sys.stderr)
        print("airabel: error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    opts = Options(
        mode=args.mode,
        tol=getattr(args, "tol", 1e-6),
        start=getattr(args, "start", None),
        x1=getattr(args, "x1", None),
        seed=getattr(args, "seed", None),
    )
    try:
        doc = _load(args)
    except (AirError, OSError) as err:
        report = Report({"status": "input_error", "error": _error_doc(err), "warnings": [], "notes": []}, EXIT_INPUT)
    else:
        report = run(doc, opts)
    print(pretty(report.doc) if args.pretty else json.dumps(report.doc, indent=2))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
