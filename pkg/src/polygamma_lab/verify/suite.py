"""The registered claim checks and the full-suite runner."""

from __future__ import annotations

import fnmatch
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from functools import partial

import numpy as np

from .. import paperfun as pf
from ..errors import EvalError
from ..paperfun import OpenProblemParams, ThetaParam
from ..specfun import CONSTANTS, cm_check, polygamma_bounds, psi
from .checks import (
    check_convexity,
    check_counterexample,
    check_limit,
    check_monotone,
    check_sandwich,
    check_sign,
    combine,
    evaluate,
    step_comparison,
)
from .grids import Grid
from .outcome import CheckOutcome
from .report import VerificationReport
from .scans import scan_conjecture_gi, scan_conjecture_h, scan_open_problem

GAMMA = CONSTANTS.euler_gamma
G_LIMIT_AT_NEG_ONE = 1.0 + GAMMA - CONSTANTS.pi_sq_over_6

DEFAULT_OPEN_PARAMS = (
    OpenProblemParams(1, 1, 1.0, 0.0, 1.0, 0.5, 1.0, 0.5),  # f
    OpenProblemParams(1, 1, 1.0, 0.0, 1.0, 1.0, 0.5, 0.0),  # -g
    OpenProblemParams(1, 1, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0),
)


@dataclass
class SuiteConfig:
    claims: list[str] | None = None
    tol: float = 1e-12
    main_grid: Grid = field(default_factory=lambda: Grid.log(1e-3, 1e3, 2000))
    neg_grid: Grid = field(default_factory=lambda: Grid.log(-1 + 1e-6, 100, 2000, offset=-1))
    h_grid: Grid = field(default_factory=lambda: Grid.log(-1 + 1e-3, 100, 2000, offset=-1))
    sandwich_pos_grid: Grid = field(default_factory=lambda: Grid.log(1e-3, 100, 1000))
    sandwich_neg_grid: Grid = field(default_factory=lambda: Grid.linear(-0.999, -0.001, 500))
    proof_grid: Grid = field(default_factory=lambda: Grid.log(1e-3, 50, 1000))
    aux_grid: Grid = field(default_factory=lambda: Grid.log(2e-3, 100, 1000))
    gap_grid: Grid = field(default_factory=lambda: Grid.log(1e-3, 1e3, 1000))
    cm_grid: Grid = field(default_factory=lambda: Grid.log(0.1, 100, 200))
    bounds_grid: Grid = field(default_factory=lambda: Grid.log(1e-3, 100, 500))
    increasing_thetas: tuple = (0.25, 0.5, 1.0)
    decreasing_thetas: tuple = (2.0, 3.0, 5.0)
    extra_thetas: tuple = ()
    cm_max_order: int = 8
    f_i_orders: tuple = (1, 2, 3, 4)
    identity_us: tuple = (0.05, 0.5, 1.0, 2.0, 10.0, 20.0)
    # g approaches its limit like 2 zeta(3) sqrt(x+1); 1e-12 keeps the gap near 2.4e-6
    g_limit_end: float = 1e-12
    include_scans: bool = True
    gi_max: int = 4
    scan_inner_grid: Grid = field(default_factory=lambda: Grid.linear(-0.999, 0.999, 2000))
    # h'' vanishes at 1, so closer starts drown the second differences in rounding
    scan_outer_grid: Grid = field(default_factory=lambda: Grid.log(1.005, 1000, 2000, offset=1))
    scan_gi_grid: Grid = field(default_factory=lambda: Grid.log(-1 + 1e-3, 100, 1000, offset=-1))
    open_params: tuple = DEFAULT_OPEN_PARAMS
    workers: int = 1

    @classmethod
    def empty(cls) -> SuiteConfig:
        return cls(claims=[], include_scans=False)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Grid):
                v = v.to_dict()
            elif f.name == "open_params":
                v = [p.to_dict() for p in v]
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        out.pop("workers")
        return out


def _theta_label(t: float) -> str:
    return f"{t:g}"


def _h_points(cfg: SuiteConfig) -> np.ndarray:
    # dense windows straddle the removable point 0 and the sign change of x^2-1
    extra = np.concatenate([np.linspace(-0.01, 0.01, 201), np.linspace(0.99, 1.01, 201)])
    return np.unique(np.concatenate([cfg.h_grid.points(), extra]))


def _identity_points(fn_a, fn_b, xs, tol, claim_id) -> CheckOutcome:
    a = evaluate(fn_a, xs)
    b = evaluate(fn_b, xs)
    err = np.abs(a - b)
    j = int(np.argmax(err))
    margin = float(tol - err[j])
    return CheckOutcome(claim_id, margin >= 0, float(xs[j]), margin, len(xs))


def _value_check(value, target, tol, x, claim_id) -> CheckOutcome:
    margin = tol - abs(value - target)
    return CheckOutcome(claim_id, margin >= 0, float(x), float(margin), 1,
                        detail={"value": float(value), "target": float(target)})


# --- claim builders ---------------------------------------------------------


def _phi_d_scale(order):
    def scale(x):
        if order == 1:
            return abs(psi(1, x)) + abs(pf.varphi(1.0, x))
        return abs(psi(2, x)) + abs(pf.varphi_dx(1.0, x))
    return scale


def _d_scale(order, theta):
    def scale(x):
        if order == 1:
            return abs(psi(1, x)) + abs(pf.varphi(theta, x))
        return abs(psi(2, x)) + abs(pf.varphi_dx(theta, x))
    return scale


def _thm1(cfg):
    yield "thm1.monotone", lambda: check_monotone(pf.phi, cfg.main_grid, "increasing", cfg.tol, "thm1.monotone")
    yield "thm1.concave", lambda: check_convexity(pf.phi, cfg.main_grid, "concave", cfg.tol, "thm1.concave")
    yield "thm1.limit_zero", lambda: check_limit(pf.phi, -GAMMA, "zero_plus", 8, 1e-4, "thm1.limit_zero", 1e-1, 1e-6)
    yield "thm1.limit_inf", lambda: check_limit(pf.phi, 0.0, "infinity", 8, 1e-4, "thm1.limit_inf", 1e-1, 1e-6)
    one = ThetaParam(1.0)
    d1 = partial(_d1, p=one)
    d2 = partial(_d2, p=one)
    yield "lemma1.step", lambda: step_comparison(d1, cfg.main_grid, 1.0, cfg.tol, "lemma1.step")
    yield "cor1.trigamma", lambda: check_sign(d1, cfg.main_grid, "positive", cfg.tol, "cor1.trigamma", _d_scale(1, 1.0))
    yield "cor1.tetragamma", lambda: check_sign(d2, cfg.main_grid, "negative", cfg.tol, "cor1.tetragamma", _d_scale(2, 1.0))


def _d1(x, p):
    return pf.phi_theta_d1(x, p)


def _d2(x, p):
    return pf.phi_theta_d2(x, p)


def _phi_t(x, p):
    return pf.phi_theta(x, p)


def _thm2(cfg):
    for theta in tuple(cfg.increasing_thetas) + tuple(cfg.decreasing_thetas):
        inc = theta in cfg.increasing_thetas
        p = ThetaParam(theta)
        lab = _theta_label(theta)
        fn = partial(_phi_t, p=p)
        d1 = partial(_d1, p=p)
        d2 = partial(_d2, p=p)
        cid = f"thm2.monotone.theta={lab}"
        yield cid, partial(check_monotone, fn, cfg.main_grid, "increasing" if inc else "decreasing", cfg.tol, cid)
        cid = f"thm2.convexity.theta={lab}"
        yield cid, partial(check_convexity, fn, cfg.main_grid, "concave" if inc else "convex", cfg.tol, cid)
        cid = f"cor2.d1.theta={lab}"
        yield cid, partial(check_sign, d1, cfg.main_grid, "positive" if inc else "negative", cfg.tol, cid, _d_scale(1, theta))
        cid = f"cor2.d2.theta={lab}"
        yield cid, partial(check_sign, d2, cfg.main_grid, "negative" if inc else "positive", cfg.tol, cid, _d_scale(2, theta))
        cid = f"thm2.limit_inf.theta={lab}"
        yield cid, partial(check_limit, fn, math.log(theta), "infinity", 8, 1e-4, cid, 1e-1, 1e-6)
        cid = f"thm2.limit_zero.theta={lab}"
        if theta == 1.0:
            yield cid, partial(check_limit, fn, -GAMMA, "zero_plus", 8, 1e-4, cid, 1e-1, 1e-6)
        else:
            target = math.inf if theta > 1 else -math.inf
            yield cid, partial(check_limit, fn, target, "zero_plus", 9, 1e-4, cid, 1e-1, 1e-9)
    for theta in cfg.extra_thetas:
        cid = f"thm2.explore.theta={_theta_label(theta)}"
        yield cid, partial(_explore_theta, theta, cfg, cid)


def _sign_label(values, noise):
    if np.all(values > noise):
        return "positive"
    if np.all(values < -noise):
        return "negative"
    return "mixed"


def _explore_theta(theta, cfg, cid) -> CheckOutcome:
    p = ThetaParam(theta)
    xs = cfg.main_grid.points()
    v1 = evaluate(partial(_d1, p=p), xs)
    v2 = evaluate(partial(_d2, p=p), xs)
    s1 = evaluate(_d_scale(1, theta), xs)
    s2 = evaluate(_d_scale(2, theta), xs)
    detail = {"d1": _sign_label(v1, cfg.tol * s1), "d2": _sign_label(v2, cfg.tol * s2)}
    for name, v in (("d1", v1), ("d2", v2)):
        sign_change = np.nonzero(np.diff(np.sign(v)))[0]
        if len(sign_change):
            detail[f"{name}_sign_change_x"] = float(xs[sign_change[0] + 1])
    return CheckOutcome(cid, True, None, 0.0, 2 * len(xs), exploratory=True, detail=detail)


def _thm3(cfg):
    yield "thm3.sandwich.positive", lambda: check_sandwich(cfg.sandwich_pos_grid, cfg.tol, "thm3.sandwich.positive")
    yield "thm3.sandwich.negative", lambda: check_sandwich(cfg.sandwich_neg_grid, cfg.tol, "thm3.sandwich.negative")
    yield "thm3.counterexample", lambda: check_counterexample(1.0, "thm3.counterexample")


def _thm4(cfg):
    yield "thm4.f.monotone", lambda: check_monotone(pf.f, cfg.neg_grid, "increasing", cfg.tol, "thm4.f.monotone")
    yield "thm4.g.monotone", lambda: check_monotone(pf.g, cfg.neg_grid, "increasing", cfg.tol, "thm4.g.monotone")
    yield "thm4.f.limit_neg_one", lambda: check_limit(pf.f, -math.inf, "neg_one_plus", 9, 0.0, "thm4.f.limit_neg_one", 1e-1, 1e-9)
    yield "thm4.g.limit_neg_one", lambda: check_limit(
        pf.g, G_LIMIT_AT_NEG_ONE, "neg_one_plus", 12, 1e-3, "thm4.g.limit_neg_one", 1e-1, cfg.g_limit_end)
    # f grows like ln x, so no float argument reaches 1e6; a threshold of 100 is used
    yield "thm4.f.limit_inf", lambda: check_limit(
        pf.f, math.inf, "infinity", 13, 0.0, "thm4.f.limit_inf", 1e-1, 1e-60, threshold=100.0)
    yield "thm4.g.limit_inf", lambda: check_limit(pf.g, math.inf, "infinity", 15, 0.0, "thm4.g.limit_inf", 1e-1, 1e-14)
    xs = Grid.log(-0.95, 10, 50, offset=-1).points()
    yield "thm4.remark_f", lambda: _identity_points(pf.f, pf.f_remark, xs, 1e-10, "thm4.remark_f")
    yield "thm4.remark_g", lambda: _identity_points(pf.g, pf.g_remark, xs, 1e-10, "thm4.remark_g")


def _thm5(cfg):
    yield "thm5.monotone", lambda: check_monotone(pf.h, _h_points(cfg), "increasing", cfg.tol, "thm5.monotone")
    yield "thm5.value_at_one", lambda: _value_check(pf.h(1.0), GAMMA, 1e-13, 1.0, "thm5.value_at_one")
    yield "thm5.value_at_zero", lambda: _value_check(pf.h(0.0), G_LIMIT_AT_NEG_ONE, 1e-13, 0.0, "thm5.value_at_zero")
    yield "thm5.limit_neg_one", lambda: check_limit(pf.h, -math.inf, "neg_one_plus", 9, 0.0, "thm5.limit_neg_one", 1e-1, 1e-9)
    yield "thm5.limit_inf", lambda: check_limit(pf.h, math.inf, "infinity", 8, 0.0, "thm5.limit_inf", 1e-1, 1e-8)


def _fi(x, i):
    return pf.f_i(x, i)


def _thm6(cfg):
    for i in cfg.f_i_orders:
        fn = partial(_fi, i=i)
        direction = "decreasing" if i % 2 else "increasing"
        cid = f"thm6.f_i.monotone.i={i}"
        yield cid, partial(check_monotone, fn, cfg.neg_grid, direction, cfg.tol, cid)
        cid = f"thm6.f_i.limit_inf.i={i}"
        yield cid, partial(check_limit, fn, 0.0, "infinity", 5, 1e-4, cid, 1e-1, 1e-5)
        cid = f"thm6.f_i.limit_neg_one.i={i}"
        target = math.inf if i % 2 else -math.inf
        yield cid, partial(check_limit, fn, target, "neg_one_plus", 6, 0.0, cid, 1e-1, 1e-6)


def _bounds_claim(cfg) -> CheckOutcome:
    parts = []
    for k in range(1, 7):
        def lower_gap(x, k=k):
            lo, _ = polygamma_bounds(k, x)
            return (-1) ** (k + 1) * psi(k, x) - lo

        def upper_gap(x, k=k):
            _, up = polygamma_bounds(k, x)
            return up - (-1) ** (k + 1) * psi(k, x)

        def scale(x, k=k):
            return abs(psi(k, x))

        parts.append(check_sign(lower_gap, cfg.bounds_grid, "positive", cfg.tol, f"lower.k={k}", scale))
        parts.append(check_sign(upper_gap, cfg.bounds_grid, "positive", cfg.tol, f"upper.k={k}", scale))
    return combine("lemma3.bounds", parts)


def _expected_violation(inner: CheckOutcome, claim_id: str) -> CheckOutcome:
    detail = dict(inner.detail)
    detail["violation_found"] = not inner.passed
    return CheckOutcome(claim_id, not inner.passed, inner.witness_x, inner.margin,
                        inner.samples, detail=detail)


def _lemma3(cfg):
    yield "lemma3.bounds", lambda: _bounds_claim(cfg)
    n = cfg.cm_max_order
    yield "lemma3.cm.direct.alpha=1", lambda: cm_check(1.0, n, cfg.cm_grid, "direct", cfg.tol, "lemma3.cm.direct.alpha=1")
    yield "lemma3.cm.reversed.alpha=0.5", lambda: cm_check(0.5, n, cfg.cm_grid, "reversed", cfg.tol, "lemma3.cm.reversed.alpha=0.5")
    yield "lemma3.cm.necessity.direct.alpha=0.8", lambda: _expected_violation(
        cm_check(0.8, n, cfg.cm_grid, "direct", cfg.tol), "lemma3.cm.necessity.direct.alpha=0.8")
    yield "lemma3.cm.necessity.reversed.alpha=0.6", lambda: _expected_violation(
        cm_check(0.6, n, cfg.cm_grid, "reversed", cfg.tol), "lemma3.cm.necessity.reversed.alpha=0.6")


def _shifted(fn, c):
    return lambda x: fn(x) - c


def _proof(cfg):
    def delta():
        g = cfg.proof_grid
        return combine("proof.delta", [
            check_monotone(pf.delta_fn, g, "decreasing", cfg.tol, "monotone"),
            check_sign(_shifted(pf.delta_fn, 1.0), g, "positive", cfg.tol, "above_1"),
            check_sign(_shifted(pf.delta_fn, 2.0), g, "negative", cfg.tol, "below_2"),
            _value_check(pf.delta_fn(1e-4), 2.0, 1e-3, 1e-4, "limit_zero"),
        ])

    def rho():
        g = cfg.proof_grid
        return combine("proof.rho", [
            check_monotone(pf.rho_fn, g, "increasing", cfg.tol, "monotone"),
            check_sign(_shifted(pf.rho_fn, 1.0), g, "positive", cfg.tol, "above_1"),
            check_sign(_shifted(pf.rho_fn, 2.0), g, "negative", cfg.tol, "below_2"),
            _value_check(pf.rho_fn(1e-4), 1.0, 1e-3, 1e-4, "limit_zero"),
        ])

    def aux():
        g = cfg.aux_grid
        return combine("proof.aux_h", [
            check_sign(_shifted(pf.aux_h, -4.0), g, "negative", cfg.tol, "below_-4"),
            check_monotone(pf.aux_h, g, "increasing", cfg.tol, "monotone"),
            check_limit(pf.aux_h, -4.0, "infinity", 8, 1e-4, "limit_inf", 1e-1, 1e-6),
        ])

    def gap():
        return combine("proof.equiv_ineq", [
            check_sign(pf.equiv_ineq_gap, cfg.gap_grid, "positive", cfg.tol, "positive"),
            check_limit(pf.equiv_ineq_gap, 0.0, "infinity", 5, 1e-9, "limit_inf", 1e-1, 1e-5),
        ])

    def mu_claim():
        parts = []
        ks = np.arange(1, 1001, dtype=float)
        for x in (0.5, 1.0, 10.0):
            parts.append(check_monotone(lambda k, x=x: pf.mu(k, x), ks, "increasing", cfg.tol, f"monotone.x={x:g}"))
            # mu(k, x) = x/2 - x^2/(8k) + ..., so the probe runs to k = 1e8
            parts.append(check_limit(lambda d, x=x: pf.mu(1.0 / d, x) if d > 0 else x / 2, x / 2,
                                     "zero_plus", 9, 1e-5, f"limit.x={x:g}", 1.0, 1e-8))
        return combine("proof.mu", parts)

    yield "proof.delta", delta
    yield "proof.rho", rho
    yield "proof.aux_h", aux
    yield "proof.equiv_ineq", gap
    yield "proof.mu", mu_claim


def _identity(cfg):
    def run():
        parts = []
        for u in cfg.identity_us:
            direct, series, _ = pf.series_identity(u)
            parts.append(_value_check(series, direct, 1e-9, u, f"u={u:g}"))
        us = Grid.log(1e-2, 100, 400).excluding(1.0, 1e-9)
        for i in (1, 2, 5, 10, 50, 100):
            parts.append(check_sign(lambda u, i=i: pf.u2der1_term(i, u), us, "positive", 0.0, f"u2der1.i={i}"))
        return combine("identity.u2der", parts)

    yield "identity.u2der", run


_BUILDERS = (_thm1, _thm2, _thm3, _thm4, _thm5, _thm6, _lemma3, _proof, _identity)


def plan(cfg: SuiteConfig) -> list[tuple[str, object]]:
    """Ordered (claim_id, thunk) pairs selected by ``cfg.claims``."""
    items = [item for b in _BUILDERS for item in b(cfg)]
    if cfg.claims is None:
        return items
    selected = []
    for cid, thunk in items:
        if any(_matches(cid, pat) for pat in cfg.claims):
            selected.append((cid, thunk))
    unknown = [p for p in cfg.claims if not any(_matches(c, p) for c, _ in items)]
    if unknown:
        raise KeyError(f"unknown claim ids: {', '.join(unknown)}")
    return selected


def claim_ids(cfg: SuiteConfig | None = None) -> list[str]:
    return [cid for cid, _ in plan(cfg or SuiteConfig(claims=None))]


def _matches(cid: str, pattern: str) -> bool:
    return cid == pattern or cid.startswith(pattern + ".") or fnmatch.fnmatchcase(cid, pattern)


def _run_one(cid, thunk) -> CheckOutcome:
    try:
        return thunk()
    except EvalError as exc:
        return CheckOutcome(cid, False, exc.x, math.nan, 0, detail={"error": str(exc)})


def _run_by_id(cfg: SuiteConfig, cid: str) -> CheckOutcome:
    thunk = dict(plan(cfg))[cid]
    return _run_one(cid, thunk)


def run_full_suite(config: SuiteConfig | None = None) -> VerificationReport:
    """Run every selected claim check, plus the conjecture scans.

    Per-check evaluation errors become failed outcomes; nothing aborts.
    """
    cfg = config or SuiteConfig()
    items = plan(cfg)
    if cfg.workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            outcomes = list(pool.map(partial(_run_by_id, cfg), [cid for cid, _ in items]))
    else:
        outcomes = [_run_one(cid, thunk) for cid, thunk in items]
    scans = run_scans(cfg) if cfg.include_scans else []
    return VerificationReport(outcomes, cfg.to_dict(), scans=scans)


def run_scans(cfg: SuiteConfig):
    scans = [scan_conjecture_h(cfg.scan_inner_grid, cfg.scan_outer_grid)]
    if cfg.gi_max:
        scans += scan_conjecture_gi(cfg.gi_max, cfg.scan_gi_grid)
    scans += scan_open_problem(list(cfg.open_params), cfg.scan_gi_grid)
    return scans


def config_from_dict(d: dict) -> SuiteConfig:
    kwargs = {}
    defaults = SuiteConfig()
    for f in fields(SuiteConfig):
        if f.name not in d:
            continue
        v = d[f.name]
        cur = getattr(defaults, f.name)
        if isinstance(cur, Grid):
            v = Grid.from_dict(v)
        elif f.name == "open_params":
            v = tuple(OpenProblemParams.from_dict(p) for p in v)
        elif isinstance(cur, tuple):
            v = tuple(v)
        kwargs[f.name] = v
    return SuiteConfig(**kwargs)


__all__ = ["SuiteConfig", "run_full_suite", "run_scans", "plan", "claim_ids",
           "config_from_dict"]
