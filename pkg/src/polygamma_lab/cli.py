"""Command-line front end: ``eval``, ``verify`` and ``explore``.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 evaluation error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import paperfun as pf
from .errors import EvalError
from .paperfun import OpenProblemParams, ThetaParam
from .specfun import EvalOptions, binet_oracle, digamma, polygamma
from .verify.grids import Grid
from .verify.report import scans_csv, scans_json
from .verify.suite import DEFAULT_OPEN_PARAMS, SuiteConfig, run_full_suite
from .verify.scans import scan_conjecture_gi, scan_conjecture_h, scan_open_problem

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EVAL = 0, 1, 2, 3
TOL_ENV = "POLYGAMMA_LAB_TOL"


class UsageError(Exception):
    pass


def _options() -> EvalOptions:
    raw = os.environ.get(TOL_ENV)
    if not raw:
        return EvalOptions()
    try:
        return EvalOptions(target_abs_tol=float(raw))
    except ValueError as exc:
        raise UsageError(f"{TOL_ENV}: {exc}") from exc


def _need(value, flag, fn):
    if value is None:
        raise UsageError(f"{fn} requires {flag}")
    return value


def _theta(a):
    return ThetaParam(_need(a.theta, "--theta", a.fn))


# name -> callable(x, args) returning a float
_FUNCTIONS = {
    "phi": lambda x, a: pf.phi(x),
    "phi_theta": lambda x, a: pf.phi_theta(x, _theta(a)),
    "phi_theta_d1": lambda x, a: pf.phi_theta_d1(x, _theta(a)),
    "phi_theta_d2": lambda x, a: pf.phi_theta_d2(x, _theta(a)),
    "f": lambda x, a: pf.f(x),
    "g": lambda x, a: pf.g(x),
    "h": lambda x, a: pf.h(x),
    "f_remark": lambda x, a: pf.f_remark(x),
    "g_remark": lambda x, a: pf.g_remark(x),
    "f_i": lambda x, a: pf.f_i(x, _need(a.i, "--i", a.fn)),
    "g_i": lambda x, a: pf.g_i(x, _need(a.i, "--i", a.fn)),
    "delta": lambda x, a: pf.delta_fn(x),
    "rho": lambda x, a: pf.rho_fn(x),
    "aux_h": lambda x, a: pf.aux_h(x),
    "equiv_ineq_gap": lambda x, a: pf.equiv_ineq_gap(x),
    "mu": lambda x, a: pf.mu(_need(a.k, "--k", a.fn), x),
    "binet": lambda x, a: binet_oracle(x),
}
EVAL_NAMES = ("digamma", "polygamma", *_FUNCTIONS)


def _ulp_spread(fn, x, value):
    """Rounding-sensitivity estimate from one-ulp neighbours of x."""
    spread = 0.0
    for xn in (math.nextafter(x, -math.inf), math.nextafter(x, math.inf)):
        try:
            spread = max(spread, abs(fn(xn) - value))
        except EvalError:
            pass
    return spread + 4 * sys.float_info.epsilon * abs(value)


def _eval(a) -> int:
    opts = _options()
    if a.fn == "digamma":
        r = digamma(a.x, opts)
        value, err = r.value, r.est_error
    elif a.fn == "polygamma":
        r = polygamma(_need(a.n, "--n", a.fn), a.x, opts)
        value, err = r.value, r.est_error
    else:
        fn = lambda x: _FUNCTIONS[a.fn](x, a)  # noqa: E731
        value = float(fn(a.x))
        err = _ulp_spread(fn, a.x, value)
    print(f"{value!r} {err!r}")
    return EXIT_OK


def _grid_override(a, default: Grid) -> Grid:
    if a.lo is None and a.hi is None and a.count is None and a.spacing is None:
        return default
    spacing = a.spacing or default.spacing
    return Grid(
        default.lo if a.lo is None else a.lo,
        default.hi if a.hi is None else a.hi,
        default.count if a.count is None else a.count,
        spacing,
        default.offset if spacing == "logarithmic" else 0.0,
    )


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verify(a) -> int:
    claims = None
    if a.claims is not None:
        claims = [c.strip() for c in a.claims.split(",") if c.strip()]
    cfg = SuiteConfig(
        claims=claims,
        tol=a.tol,
        main_grid=_grid_override(a, SuiteConfig().main_grid),
        extra_thetas=tuple(a.extra_theta or ()),
        include_scans=not a.no_scans,
        workers=a.workers,
    )
    try:
        report = run_full_suite(cfg)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    if a.format == "json":
        text = report.to_json(normalize_timestamp=a.normalize_timestamp)
    elif a.format == "csv":
        text = report.outcomes_csv()
    else:
        text = report.to_text()
    _write(text, a.out)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def read_params_file(path: str) -> list[OpenProblemParams]:
    """One JSON object per non-blank line."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(OpenProblemParams.from_dict(json.loads(line)))
            except (KeyError, TypeError, ValueError) as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from exc
    return out


def _explore(a) -> int:
    cfg = SuiteConfig()
    if a.target == "h":
        scans = [scan_conjecture_h(cfg.scan_inner_grid, _grid_override(a, cfg.scan_outer_grid))]
    elif a.target == "gi":
        if not 1 <= a.i_max <= 6:
            raise UsageError("--i-max must lie in 1..6")
        scans = scan_conjecture_gi(a.i_max, _grid_override(a, cfg.scan_gi_grid))
    else:
        params = read_params_file(a.params_file) if a.params_file else list(DEFAULT_OPEN_PARAMS)
        if not params:
            raise UsageError("params file holds no parameter sets")
        scans = scan_open_problem(params, _grid_override(a, cfg.scan_gi_grid))
    if a.format == "csv":
        text = scans_csv(scans)
    elif a.format == "json":
        text = scans_json(scans)
    else:
        text = "".join(f"{s.claim_id} {s.classification} witness={s.witness}\n" for s in scans)
    _write(text, a.out)
    return EXIT_OK


def _add_grid_flags(p):
    p.add_argument("--lo", type=float, help="grid lower end")
    p.add_argument("--hi", type=float, help="grid upper end")
    p.add_argument("--count", type=int, help="grid point count")
    p.add_argument("--spacing", choices=("linear", "logarithmic"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polygamma-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one function at one point")
    p.add_argument("fn", choices=EVAL_NAMES)
    p.add_argument("x", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--i", type=int)
    p.add_argument("--n", type=int, help="order for polygamma")
    p.add_argument("--k", type=float, help="k for mu")
    p.set_defaults(run=_eval)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--claims", help="comma-separated claim ids or prefixes")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--extra-theta", type=float, action="append")
    p.add_argument("--no-scans", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--normalize-timestamp", action="store_true")
    _add_grid_flags(p)
    p.set_defaults(run=_verify)

    p = sub.add_parser("explore", help="scan a conjecture or the open problem")
    p.add_argument("target", choices=("h", "gi", "open"))
    p.add_argument("--params-file")
    p.add_argument("--i-max", type=int, default=4)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    _add_grid_flags(p)
    p.set_defaults(run=_explore)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EvalError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except (OSError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
