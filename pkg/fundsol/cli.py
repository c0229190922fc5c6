"""
fundsol command line.

Usage:
    python3 -m fundsol eval --symbol "x1^2+x2^2+x3^2" --dim 3 --test gaussian:s=1
    python3 -m fundsol eval --symbol "x1^4+x2^4" --dim 2 --test polygauss:poly=x1^2,s=2 --at 1,0
    python3 -m fundsol verify-delta                       # full suite, exit 1 on any failure
    python3 -m fundsol verify-delta --symbol "norm^1.0" --dim 2
    python3 -m fundsol laurent --symbol "x1^2+x2^2" --dim 2 --j-min -3 --j-max 4
    python3 -m fundsol poles --symbol "x1^2+x2^2" --dim 2 --j-list 1,2,3
    python3 -m fundsol convergence --case log2d
    python3 -m fundsol constants --k-max 10 --n-max 10

Test functions:
    gaussian:s=1                     exp(-s|x|^2/2)
    polygauss:poly=1+x1+x1^2,s=1     poly(xi) times the transform of gaussian(n, s)
    gaussian:s=2,shift=1,0           translated to x -> f(x0 - x)
    @path/to/test.json               TestFunction JSON

Machine output goes to stdout (JSON, or CSV with --output csv); logs go to
stderr. Exit codes: 0 success, 1 verification failure, 2 usage or
validation error.
"""

import argparse
import csv
import json
import math
import re
import sys

from . import __version__
from .config import load_run_config
from .continuation import laurent, pole_scan, verify_delta_limit
from .errors import FundsolError, ParseError, UnsupportedSymbolForm
from .log import info as _log_info, error as _log_error, set_level as _set_log_level
from .oracles import constant_c_numeric, log_regime_constant, riesz_gaussian
from .pairing import constant_c, constant_d, pair
from .runtime import resource_snapshot
from .schwartz import TestFunction, gaussian, polynomial_gaussian, translate, value_at_origin
from .symbols import apply_operator, parse_polynomial, parse_symbol


def _log(msg):
    _log_info("CLI", msg)


DELTA_SUITE = [
    ("x1^2+x2^2", 2),
    ("x1^2+x2^2+x3^2", 3),
    ("x1^2+x2^2+x3^2+x4^2", 4),
    ("(x1^2+x2^2)^2", 2),
    ("(x1^2+x2^2+x3^2)^2", 3),
    ("(x1^2+x2^2+x3^2+x4^2)^2", 4),
    ("(x1^2+x2^2+x3^2+x4^2+x5^2)^2", 5),
    ("x1^4+x2^4", 2),
    ("x1^4+x2^4+x3^4", 3),
    ("x1^6+x2^6", 2),
]

SUITE_TESTS = ["gaussian:s=1", "gaussian:s=2", "polygauss:poly=1+x1+x1^2,s=1"]

CONSTANTS_TOLERANCE = 1e-9

# sphere levels per convergence study; level 6 of the n=3 quartic takes minutes
CONVERGENCE_LEVELS = {
    "newtonian3d": range(1, 7),
    "log2d": range(1, 7),
    "aniso-quartic-3d": range(2, 6),
}

_PARAM = re.compile(r"(?:^|,)(\w+)=([^=]*?)(?=,\w+=|$)")


# ---------------------------------------------------------------------------
# Test-function specs
# ---------------------------------------------------------------------------

def _floats(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ParseError("expected comma-separated numbers, got %r" % text)


def parse_test_function(spec, n):
    """Build a TestFunction from a DSL string or an @file.json reference."""
    spec = spec.strip()
    if spec.startswith("@"):
        try:
            with open(spec[1:], "r", encoding="utf-8") as f:
                fn = TestFunction.from_dict(json.load(f))
        except (OSError, ValueError, KeyError) as e:
            raise ParseError("cannot read test function %s: %s" % (spec[1:], e))
        if fn.dimension != n:
            raise ParseError("%s has dimension %d, expected %d" % (spec[1:], fn.dimension, n))
        return fn

    kind, _, rest = spec.partition(":")
    params = {}
    consumed = 0
    for m in _PARAM.finditer(rest):
        if m.start() != consumed:
            break
        params[m.group(1)] = m.group(2)
        consumed = m.end()
    if consumed != len(rest):
        raise ParseError("malformed parameters %r in test function %r" % (rest, spec))

    allowed = {"gaussian": {"s", "shift"}, "polygauss": {"poly", "s", "shift"}}
    if kind not in allowed:
        raise ParseError("unknown test function %r (gaussian, polygauss or @file.json)" % kind)
    unknown = sorted(set(params) - allowed[kind])
    if unknown:
        raise ParseError("unknown parameter(s) for %s: %s" % (kind, ", ".join(unknown)))

    s = _floats(params.get("s", "1"))
    if len(s) != 1:
        raise ParseError("gaussian parameter s must be one number, got %r" % params["s"])
    s = s[0]
    if s <= 0.0:
        raise ParseError("gaussian parameter s must be positive, got %r" % s)
    if kind == "gaussian":
        fn = gaussian(n, s)
    else:
        if "poly" not in params:
            raise ParseError("polygauss needs poly=<expression>")
        poly = parse_polynomial(params["poly"], n)
        fn = polynomial_gaussian({e: float(c) for e, c in poly.items()}, n, s)
    if "shift" in params:
        fn = translate(fn, _floats(params["shift"]))
    return fn


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _format(value):
    if isinstance(value, float):
        return "%.17g" % value
    return value


def _json_text(value):
    """JSON with every finite float written to 17 significant digits."""
    if isinstance(value, float) and math.isfinite(value):
        return "%.17g" % value
    if isinstance(value, dict):
        return "{%s}" % ",".join("%s:%s" % (json.dumps(str(k)), _json_text(v))
                                 for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return "[%s]" % ",".join(_json_text(v) for v in value)
    return json.dumps(value)


def _emit(rows, config, columns=None):
    """Print a dict or a list of row dicts as JSON or CSV."""
    if config.output == "csv":
        rows = rows if isinstance(rows, list) else [rows]
        columns = columns or (list(rows[0]) if rows else [])
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(row.get(c)) for c in columns])
    else:
        print(_json_text(rows))
    sys.stdout.flush()


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_eval(args, config):
    s = parse_symbol(args.symbol, args.dim)
    f = parse_test_function(args.test, args.dim)
    if args.at:
        x0 = _floats(args.at)
        result = pair(s, translate(f, x0), config)
    else:
        result = pair(s, f, config)
    out = result.to_dict()
    if args.at:
        out["at"] = x0
    _emit(out, config)
    return 0


def _delta_case(s, label, f, tol, route, config):
    """(lhs, rhs) for one suite case, or None when the case does not apply."""
    if route == "laurent":
        report = verify_delta_limit(s, f, config.replace(tolerance=tol), test_fn=label)
        return report.lhs, report.rhs
    try:
        pf = apply_operator(s, f)
    except UnsupportedSymbolForm:
        # Riesz closed form on pure Gaussians instead of the delta identity.
        if len(f.terms) != 1 or any(f.terms[0].modulation) or len(f.terms[0].poly) != 1 \
                or any(f.terms[0].poly[0][0]):
            _log("skipping %s for %s: no closed form" % (label, s.describe()))
            return None
        spread = 1.0 / f.terms[0].width
        rhs = riesz_gaussian(s.dimension, s.form.exponent, s.form.scale, spread)
        return pair(s, f, config).value, rhs
    return pair(s, pf, config).value, value_at_origin(f)


def cmd_verify_delta(args, config):
    if (args.symbol is None) != (args.dim is None):
        raise ParseError("--symbol and --dim go together")
    suite = [(args.symbol, args.dim)] if args.symbol else DELTA_SUITE
    tests = [args.test] if args.test else SUITE_TESTS
    tol = args.tol if args.tol is not None else config.tolerance

    rows = []
    for text, n in suite:
        s = parse_symbol(text, n)
        for label in tests:
            case = _delta_case(s, label, parse_test_function(label, n), tol, args.route, config)
            if case is None:
                continue
            lhs, rhs = case
            err = abs(lhs - rhs)
            rows.append({"symbol": text, "dim": n, "test_fn": label, "lhs": complex(lhs).real,
                         "rhs": complex(rhs).real, "abs_err": err,
                         "pass": bool(err <= tol * (1.0 + abs(rhs)))})
    failed = sum(1 for r in rows if not r["pass"])
    _log("%d/%d delta cases passed (route %s, tol %g)"
         % (len(rows) - failed, len(rows), args.route, tol))
    _emit(rows, config)
    return 1 if failed or not rows else 0


def cmd_laurent(args, config):
    s = parse_symbol(args.symbol, args.dim)
    f = parse_test_function(args.test, args.dim)
    expansion = laurent(s, f, j_min=args.j_min, j_max=args.j_max, config=config)
    _log("pole order %d at z=0 (radius %g, %d nodes)"
         % (expansion.pole_order, expansion.contour_radius, expansion.node_count))
    _emit(expansion.to_rows(), config, ["j", "re", "im", "abs"])
    return 0


def cmd_poles(args, config):
    s = parse_symbol(args.symbol, args.dim)
    f = parse_test_function(args.test, args.dim)
    j_list = [int(j) for j in _floats(args.j_list)]
    reports = pole_scan(s, f, j_list, config)
    _emit([r.to_dict() for r in reports], config)
    return 0


def _convergence_case(name):
    """(symbol, test function, oracle value) for a named study."""
    if name == "newtonian3d":
        return parse_symbol("x1^2+x2^2+x3^2", 3), gaussian(3, 1.0), 1.0
    if name == "log2d":
        return parse_symbol("x1^2+x2^2", 2), gaussian(2, 1.0), log_regime_constant()
    s = parse_symbol("x1^4+x2^4+x3^4", 3)
    f = gaussian(3, 1.0)
    return s, apply_operator(s, f), value_at_origin(f).real


def cmd_convergence(args, config):
    s, f, oracle = _convergence_case(args.case)
    rows = []
    for level in CONVERGENCE_LEVELS[args.case]:
        value = pair(s, f, config.replace(sphere_level=level)).value
        rows.append({"level": level, "abs_err": abs(value - oracle)})
        _log("%s level %d: |error| = %.3g" % (args.case, level, rows[-1]["abs_err"]))
    _emit(rows, config.replace(output="csv") if args.output is None else config,
          ["level", "abs_err"])
    return 0


def cmd_constants(args, config):
    rows = []
    for k in range(1, args.k_max + 1):
        for n in range(1, args.n_max + 1):
            c, d = constant_c(k, n), constant_d(k, n)
            numeric = constant_c_numeric(k, n)
            err = abs(c - numeric)
            rows.append({"k": k, "n": n, "C": c, "D": d, "C_numeric": numeric,
                         "rel_err": err / abs(c) if c else err,
                         "pass": bool(err <= CONSTANTS_TOLERANCE * abs(c) or err == 0.0)})
    _emit(rows, config)
    return 0 if all(r["pass"] for r in rows) else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='YAML run configuration')
    common.add_argument('--sphere-level', type=int, default=None)
    common.add_argument('--radial-panels', type=int, default=None)
    common.add_argument('--radial-grading', type=int, default=None)
    common.add_argument('--eps-tail', type=float, default=None)
    common.add_argument('--contour-radius', type=float, default=None)
    common.add_argument('--contour-nodes', type=int, default=None)
    common.add_argument('--output', choices=('json', 'csv'), default=None)
    common.add_argument('--seed', type=int, default=None)
    common.add_argument('--workers', type=int, default=None,
                        help='Worker threads (0 = physical cores)')
    noise = common.add_mutually_exclusive_group()
    noise.add_argument('--quiet', action='store_true', help='Only warnings and errors on stderr')
    noise.add_argument('--verbose', action='store_true', help='Include debug messages')

    def symbol_args(p, required=True):
        p.add_argument('--symbol', required=required, help='Symbol expression, e.g. "x1^4+x2^4"')
        p.add_argument('--dim', type=int, required=required, help='Dimension n')
        p.add_argument('--test', default=None if not required else 'gaussian:s=1',
                       help='Test function spec (default gaussian:s=1)')

    parser = argparse.ArgumentParser(prog='fundsol',
                                     description='Fundamental solutions of homogeneous '
                                                 'elliptic operators')
    parser.add_argument('--version', action='version', version='fundsol %s' % __version__)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('eval', parents=[common], help='Pair the fundamental solution with f')
    symbol_args(p)
    p.add_argument('--at', default=None, help='Evaluate (S * f)(x0) at x0 = x1,..,xn')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser('verify-delta', parents=[common], help='Run the delta-property suite')
    symbol_args(p, required=False)
    p.add_argument('--tol', type=float, default=None)
    p.add_argument('--route', choices=('theorem', 'laurent'), default='theorem')
    p.set_defaults(func=cmd_verify_delta)

    p = sub.add_parser('laurent', parents=[common], help='Laurent coefficients at z = 0')
    symbol_args(p)
    p.add_argument('--j-min', type=int, default=-2)
    p.add_argument('--j-max', type=int, default=4)
    p.set_defaults(func=cmd_laurent)

    p = sub.add_parser('poles', parents=[common], help='Residues at candidate poles -j/k')
    symbol_args(p)
    p.add_argument('--j-list', default='1,2,3')
    p.set_defaults(func=cmd_poles)

    p = sub.add_parser('convergence', parents=[common], help='Error against sphere level')
    p.add_argument('--case', required=True, choices=sorted(CONVERGENCE_LEVELS))
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser('constants', parents=[common], help='Table of C_{k,n} and D_{k,n}')
    p.add_argument('--k-max', type=int, default=10)
    p.add_argument('--n-max', type=int, default=10)
    p.set_defaults(func=cmd_constants)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.quiet:
        _set_log_level("warn")
    elif args.verbose:
        _set_log_level("debug")

    try:
        config = load_run_config(args.config).replace(
            sphere_level=args.sphere_level, radial_panels=args.radial_panels,
            radial_grading=args.radial_grading, eps_tail=args.eps_tail,
            contour_radius=args.contour_radius, contour_nodes=args.contour_nodes,
            output=args.output, seed=args.seed, workers=args.workers)
        code = args.func(args, config)
    except (FundsolError, ValueError) as e:
        _log_error("CLI", "%s failed: %s" % (args.command, e))
        print("%s: %s" % (type(e).__name__, e), file=sys.stderr)
        return 2

    snapshot = resource_snapshot()
    if snapshot:
        _log("%s done (rss %.1f MiB)" % (args.command, snapshot['rss_mb']))
    return code


if __name__ == '__main__':
    sys.exit(main())
