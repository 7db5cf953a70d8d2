"""Command-line interface: ``toricjac <command> [options]``.

Exit status: 0 success, 2 hypothesis violated (partial report), 3 oracle
mismatch or failed invariant, 4 input/output error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from toricjac import linalg
from toricjac.audit import builtin_corpus, scan_obstructions, stability_check, white_sweep
from toricjac.cache import ReportCache, input_hash
from toricjac.jacobian import (
    JacobianContext,
    PropositionViolation,
    graded_dims,
    hodge_report,
    nondegeneracy_certificate,
    verify_proposition,
)
from toricjac.kernel import (
    ClassificationInconsistency,
    HypothesisViolated,
    demazure_roots,
    ker_kodaira_spencer,
    ker_theorem,
    kernel_report,
)
from toricjac.lattice import LatticePolytope, NotFullDimensional, normalize_translation
from toricjac.laurent import NewtonPolytopeMismatch, PolynomialSpec, SupportOutsidePolytope, realize

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_MISMATCH = 3
EXIT_IO = 4

BUILTIN = ("octahedron", "double_octahedron", "quintic", "quartic_curve", "quartic_threefold",
           "cube", "quartic_curve_prism", "simplex3")


class ParseError(ValueError):
    pass


class Outcome(Exception):
    """Carries a finished (partial) report together with a nonzero exit status."""

    def __init__(self, report: dict, status: int):
        super().__init__(status)
        self.report = report
        self.status = status


# -- input handling ---------------------------------------------------------------------

def _read_json(text_or_path: str):
    path = Path(text_or_path)
    if path.exists():
        try:
            return json.loads(path.read_text())
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    if text_or_path.lstrip().startswith(("{", "[")):
        try:
            return json.loads(text_or_path)
        except ValueError as exc:
            raise ParseError(f"inline JSON: {exc}") from exc
    raise FileNotFoundError(text_or_path)


def load_polytope(arg: str) -> LatticePolytope:
    """A path, inline JSON, or the name of a built-in polytope."""
    if arg in BUILTIN and not Path(arg).exists():
        data = json.loads(resources.files("toricjac.data").joinpath(f"{arg}.json").read_text())
    else:
        data = _read_json(arg)
    try:
        return LatticePolytope.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, NotFullDimensional):
            raise
        raise ParseError(f"bad polytope: {exc}") from exc


def load_spec(arg: str, seed: int, bound: int | None) -> PolynomialSpec:
    if arg == "random":
        data = {"mode": "random", "seed": seed}
        if bound is not None:
            data["bound"] = bound
    else:
        data = _read_json(arg)
    try:
        return PolynomialSpec.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad polynomial spec: {exc}") from exc


def _modulus(arg: str):
    if arg == "auto":
        return "auto"
    if arg == "exact":
        return None
    return int(arg)


# -- commands ---------------------------------------------------------------------------

def _context(args, k_max=None) -> tuple[JacobianContext, dict]:
    P = load_polytope(args.polytope)
    spec = load_spec(args.poly, args.seed, args.bound)
    f = realize(spec, P)
    ctx = JacobianContext(P, f, k_max, _modulus(args.modulus))
    field = "Q" if ctx.modulus is None else f"GF({ctx.modulus})"
    return ctx, {"polytope": P.to_json(), "poly": spec.to_json(), "field": field}


def cmd_hodge(args) -> dict:
    ctx, info = _context(args, None)
    dims = {str(k): graded_dims(ctx, k).to_json() for k in range(1, ctx.n + 1)}
    hodge = hodge_report(ctx)
    cert = nondegeneracy_certificate(ctx.polytope, ctx.f, args.trials, args.seed, k_top=ctx.n, modulus=ctx.modulus)
    report = {**info, "dims": dims, "hodge": hodge.to_json(), "duality": "pass" if hodge.duality else "fail",
              "certificate": cert.verdict, "certificate_detail": cert.to_json()}
    if not hodge.duality and cert.verdict == "certified_generic":
        raise Outcome(report, EXIT_MISMATCH)
    return report


def _kernel_degrees(args, n: int) -> list[int]:
    if args.k is not None:
        if not 1 <= args.k <= n:
            raise ParseError(f"--k must lie in 1..{n}")
        return [args.k]
    return list(range(1, max(n - 1, 1) + 1))


def cmd_kernel(args) -> dict:
    P = load_polytope(args.polytope)
    degrees = _kernel_degrees(args, P.dim)
    ctx, info = _context(args, max(degrees) + 1)
    per_k = {str(k): kernel_report(ctx, k, args.reading) for k in degrees}
    report = {**info, "kernel": per_k}
    if any(r["verdict"] == "INAPPLICABLE" for r in per_k.values()):
        raise Outcome(report, EXIT_HYPOTHESIS)
    if any(not r["spans_equal"] for r in per_k.values()):
        raise Outcome(report, EXIT_MISMATCH)
    return report


def cmd_classify(args) -> dict:
    ctx, info = _context(args, 2)
    ks = ker_kodaira_spencer(ctx)
    report = {**info, "roots": [list(r.alpha) for r in demazure_roots(ctx.polytope)],
              "kodaira_spencer": ks.to_json()}
    try:
        report["theorem"] = ker_theorem(ctx, args.k or 1, args.reading).to_json()
    except HypothesisViolated as exc:
        report["theorem"] = None
        report["note"] = f"theorem formula not certified: {exc}"
        raise Outcome(report, EXIT_HYPOTHESIS)
    return report


def cmd_nondegen(args) -> dict:
    P = load_polytope(args.polytope)
    spec = load_spec(args.poly, args.seed, args.bound)
    f = realize(spec, P)
    cert = nondegeneracy_certificate(P, f, args.trials, args.seed, k_top=args.k_top, modulus=_modulus(args.modulus))
    return {"polytope": P.to_json(), "poly": spec.to_json(), "certificate": cert.to_json()}


def cmd_stable(args) -> dict:
    P = load_polytope(args.polytope)
    spec = load_spec(args.poly, args.seed, args.bound)
    shift = (0,) * P.dim
    warnings = []
    if args.normalize:
        P, shift = normalize_translation(P)
        if any(shift):
            warnings.append(f"polytope translated by {list(shift)} to make the origin interior")
    f = realize(spec, P)
    return {"polytope": P.to_json(), "poly": spec.to_json(), "normalization_shift": list(shift),
            "stability": stability_check(P, f).to_json(), "warnings": warnings}


def cmd_scan(args) -> dict:
    if args.corpus:
        data = _read_json(args.corpus)
        try:
            corpus = [(entry.get("name", f"entry{i}"), LatticePolytope.from_json(entry)) for i, entry in enumerate(data)]
        except (AttributeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad corpus: {exc}") from exc
    else:
        corpus = builtin_corpus()
    summary = scan_obstructions(corpus, args.seed, args.trials)
    report = {"scan": summary["scan"]}
    if summary["failures"] or any(r.get("spans_equal") is False for r in summary["scan"]):
        raise Outcome(report, EXIT_MISMATCH)
    return report


def cmd_verify_white(args) -> dict:
    sweep = white_sweep(args.q_max)
    report = {"white": sweep["rows"], "lambda_mu": sweep["lambda_mu"], "violations": sweep["violations"]}
    if not sweep["pass"]:
        raise Outcome(report, EXIT_MISMATCH)
    return report


def cmd_verify_prop(args) -> dict:
    ctx, info = _context(args, None)
    degrees = [args.k] if args.k is not None else list(range(2, ctx.n + 2))
    rows = [verify_proposition(ctx, k, raise_on_failure=False) for k in degrees]
    report = {**info, "proposition": [r.to_json() for r in rows]}
    if any(not r.span_equal or r.independent is False for r in rows):
        raise Outcome(report, EXIT_MISMATCH)
    return report


COMMANDS = {
    "hodge": cmd_hodge,
    "kernel": cmd_kernel,
    "classify": cmd_classify,
    "nondegen": cmd_nondegen,
    "stable": cmd_stable,
    "scan": cmd_scan,
    "verify-white": cmd_verify_white,
    "verify-prop": cmd_verify_prop,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toricjac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, polynomial=True):
        p.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
        p.add_argument("--no-cache", action="store_true", help="neither read nor write the report cache")
        p.add_argument("--seed", type=int, default=0)
        if polynomial:
            p.add_argument("--polytope", required=True, help="polytope JSON path, inline JSON or built-in name")
            p.add_argument("--poly", default="random", help="'random', a polynomial JSON path or inline JSON")
            p.add_argument("--bound", type=int, default=None, help="coefficient bound for random polynomials")
            p.add_argument("--modulus", default="auto", help="'auto', 'exact' or a prime below 2**31")

    for name in ("hodge", "kernel", "classify", "nondegen", "stable", "verify-prop"):
        p = sub.add_parser(name)
        common(p)
        if name in ("kernel", "classify", "verify-prop"):
            p.add_argument("--k", type=int, default=None)
        if name in ("kernel", "classify"):
            p.add_argument("--reading", choices=("graded", "dilated"), default="graded",
                           help="test shifted points against k P (graded) or (k+1) P (dilated)")
        if name in ("hodge", "nondegen"):
            p.add_argument("--trials", type=int, default=5)
        if name == "nondegen":
            p.add_argument("--k-top", type=int, default=None, help="highest degree compared (default n+1)")
        if name == "stable":
            p.add_argument("--normalize", action="store_true", help="translate so the origin is interior")
    p = sub.add_parser("scan")
    common(p, polynomial=False)
    p.add_argument("--corpus", help="JSON list of polytopes (default: built-in corpus)")
    p.add_argument("--trials", type=int, default=2)
    p = sub.add_parser("verify-white")
    common(p, polynomial=False)
    p.add_argument("--q-max", type=int, default=30)
    return parser


def _request_key(args) -> str:
    options = {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "no_cache")}
    for key in ("polytope", "poly", "corpus"):
        value = options.get(key)
        if value and Path(value).exists():
            options[key] = {"file": json.loads(Path(value).read_text())}
    options["schema"] = SCHEMA_VERSION
    return input_hash(options)


def run(argv=None) -> tuple[dict, int]:
    """Parse ``argv``, execute, and return ``(report, exit status)``."""
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    status = EXIT_OK
    cache = None if args.no_cache else ReportCache()
    try:
        key = _request_key(args)
    except (OSError, ValueError) as exc:
        return {"schema": SCHEMA_VERSION, "command": args.command, "error": str(exc)}, EXIT_IO
    cached = cache.get(key) if cache else None
    if cached is not None:
        body, status = cached["body"], cached["status"]
    else:
        try:
            body = COMMANDS[args.command](args)
        except Outcome as outcome:
            body, status = outcome.report, outcome.status
        except (OSError, ParseError, SupportOutsidePolytope, NewtonPolytopeMismatch, NotFullDimensional) as exc:
            return {"schema": SCHEMA_VERSION, "command": args.command, "error": f"{type(exc).__name__}: {exc}"}, EXIT_IO
        except HypothesisViolated as exc:
            body, status = {"error": f"HypothesisViolated: {exc}"}, EXIT_HYPOTHESIS
        except (PropositionViolation, ClassificationInconsistency, ArithmeticError) as exc:
            body, status = {"error": f"{type(exc).__name__}: {exc}"}, EXIT_MISMATCH
        if cache:
            try:
                cache.put(key, {"body": body, "status": status})
            except OSError:
                pass  # an unwritable cache never fails the run
    report = {
        "schema": SCHEMA_VERSION,
        "command": args.command,
        "input_hash": key,
        "status": status,
        **body,
        "timing": {"seconds": round(time.perf_counter() - started, 6), "cached": cached is not None,
                   "kernel_backend": linalg.BACKEND},
    }
    return report, status


def main(argv=None) -> int:
    report, status = run(argv)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    args = build_parser().parse_args(argv)
    if getattr(args, "output", None):
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            print(f"toricjac: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
