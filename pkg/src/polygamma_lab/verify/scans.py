"""Numerical surveys of the unproven claims.

A scan never fails anything; it reports whether the sampled signs agree
with the conjectured shape (``consistent``), contradict it beyond rounding
noise (``violated``, with a witness), or cannot decide (``inconclusive``).
"""

from __future__ import annotations

import numpy as np

from ..errors import EvalError
from ..paperfun import OpenProblemParams, g_i, h, open_problem_fn
from .checks import DEFAULT_TOL, evaluate, limit_sequence, sample_points, second_differences
from .outcome import ConjectureScan

MIN_SCAN_POINTS = 5
LIMIT_TOL = 1e-3


def _derivative_rows(xs, v):
    """(x, value, first_diff, second_diff) with divided-difference estimates."""
    d1 = np.full(len(xs), np.nan)
    d2 = np.full(len(xs), np.nan)
    if len(xs) >= 3:
        d1[1:-1] = (v[2:] - v[:-2]) / (xs[2:] - xs[:-2])
        h0 = xs[1:-1] - xs[:-2]
        h1 = xs[2:] - xs[1:-1]
        d2[1:-1] = 2.0 * ((v[2:] - v[1:-1]) / h1 - (v[1:-1] - v[:-2]) / h0) / (h0 + h1)
    return [
        (float(x), float(y), None if np.isnan(a) else float(a), None if np.isnan(b) else float(b))
        for x, y, a, b in zip(xs, v, d1, d2)
    ]


def _noise(*arrays):
    s = np.ones_like(arrays[0])
    for a in arrays:
        s = np.maximum(s, np.abs(a))
    return DEFAULT_TOL * s


def _sign_verdict(signed, noise, xs, v):
    """'consistent', 'inconclusive' or 'violated' plus optional witness index."""
    bad = np.nonzero(signed < -noise)[0]
    if len(bad):
        return "violated", int(bad[0])
    if np.any(signed <= noise):
        return "inconclusive", int(np.argmin(signed))
    return "consistent", None


def scan_conjecture_h(grid_inner, grid_outer, exclude_radius: float = 0.0) -> ConjectureScan:
    """Second-difference signs of h: concave on (-1, 1), convex on (1, inf)."""
    xi, _ = sample_points(grid_inner)
    xo, _ = sample_points(grid_outer)
    if exclude_radius > 0:
        xi = xi[np.abs(xi - 1.0) > exclude_radius]
        xo = xo[np.abs(xo - 1.0) > exclude_radius]
    if xi.size and (xi.min() <= -1 or xi.max() >= 1):
        raise ValueError("inner grid must lie inside (-1, 1)")
    if xo.size and xo.min() <= 1:
        raise ValueError("outer grid must lie inside (1, inf)")
    vi = evaluate(h, xi) if xi.size else np.empty(0)
    vo = evaluate(h, xo) if xo.size else np.empty(0)
    rows = _derivative_rows(xi, vi) + _derivative_rows(xo, vo)
    detail = {"inner_points": int(xi.size), "outer_points": int(xo.size)}
    if xi.size < MIN_SCAN_POINTS or xo.size < MIN_SCAN_POINTS:
        detail["reason"] = "insufficient resolution"
        return ConjectureScan("conj.h.shape", rows, "inconclusive", None, detail)

    verdicts = []
    for xs, v, sgn in ((xi, vi, -1.0), (xo, vo, 1.0)):
        signed = sgn * second_differences(xs, v)
        noise = _noise(v[:-2], v[1:-1], v[2:])
        cls, j = _sign_verdict(signed, noise, xs, v)
        verdicts.append((cls, None if j is None else (float(xs[j + 1]), float(v[j + 1]))))
    detail["inner"] = verdicts[0][0]
    detail["outer"] = verdicts[1][0]
    for cls in ("violated", "inconclusive"):
        for c, w in verdicts:
            if c == cls:
                return ConjectureScan("conj.h.shape", rows, cls, w, detail)
    return ConjectureScan("conj.h.shape", rows, "consistent", None, detail)


def _limit_probe(fn, approach, target, start, end, seq_len=8):
    """Deviation sequence toward a finite target or growth toward +-inf."""
    xs = limit_sequence(approach, seq_len, start, end)
    v = evaluate(fn, xs)
    if np.isinf(target):
        s = np.sign(target) * v
        ok = bool(np.all(np.diff(s) > 0) and s[-1] > 1e6)
        return ok, float(xs[-1]), float(v[-1])
    dev = np.abs(v - target)
    ok = bool(np.all(dev[1:] <= dev[:-1] + _noise(v)[1:]) and dev[-1] <= LIMIT_TOL)
    return ok, float(xs[-1]), float(v[-1])


def scan_conjecture_gi(i_max: int, grid) -> list[ConjectureScan]:
    """Direction scan of g_i by parity plus limit probes at -1+ and infinity."""
    if not 1 <= i_max <= 6:
        raise ValueError("i_max must lie in 1..6")
    xs, _ = sample_points(grid)
    out = []
    for i in range(1, i_max + 1):
        fn = lambda x, i=i: g_i(x, i)  # noqa: E731
        v = evaluate(fn, xs)
        sgn = -1.0 if i % 2 else 1.0  # odd: decreasing, even: increasing
        signed = sgn * np.diff(v)
        cls, j = _sign_verdict(signed, _noise(v[:-1], v[1:]), xs, v)
        witness = None if j is None else (float(xs[j]), float(v[j]))
        inf_target = 1.0 if i == 1 else 0.0
        ok_inf, x_inf, v_inf = _limit_probe(fn, "infinity", inf_target, 1e-2, 1e-8)
        left_target = np.inf if i % 2 else -np.inf  # (-1)^(i+1) inf
        ok_left, x_left, v_left = _limit_probe(fn, "neg_one_plus", left_target, 1e-1, 1e-6)
        detail = {
            "direction": "decreasing" if i % 2 else "increasing",
            "monotone_scan": cls,
            "limit_inf_target": inf_target,
            "limit_inf_ok": ok_inf,
            "limit_inf_last": v_inf,
            "limit_neg_one_ok": ok_left,
            "limit_neg_one_last": v_left,
        }
        if cls == "consistent" and not (ok_inf and ok_left):
            cls = "violated"
            witness = (x_inf, v_inf) if not ok_inf else (x_left, v_left)
        rows = _derivative_rows(xs, v)
        out.append(ConjectureScan(f"conj.g_i.i={i}", rows, cls, witness, detail))
    return out


def _shape_label(signed, noise, pos, neg):
    if np.all(signed > -noise):
        return pos
    if np.all(signed < noise):
        return neg
    return "mixed"


def scan_open_problem(params: list[OpenProblemParams], grid) -> list[ConjectureScan]:
    """Monotonicity/convexity labels of the two-parameter-family function.

    Grid points outside a tuple's domain are dropped for that tuple.
    """
    xs_all, _ = sample_points(grid)
    out = []
    for idx, p in enumerate(params):
        fn = lambda x, p=p: open_problem_fn(x, p)  # noqa: E731
        xs, vals = [], []
        for x in xs_all:
            try:
                vals.append(fn(float(x)))
            except EvalError:
                continue
            xs.append(float(x))
        xs = np.array(xs)
        v = np.array(vals)
        claim = f"open.phi_ik[{idx}]"
        rows = _derivative_rows(xs, v)
        if len(xs) < MIN_SCAN_POINTS or not np.all(np.isfinite(v)):
            out.append(ConjectureScan(claim, rows, "inconclusive", None,
                                      {"reason": "insufficient domain samples", **p.to_dict()}))
            continue
        d1 = np.diff(v)
        mono = _shape_label(d1, _noise(v[:-1], v[1:]), "increasing", "decreasing")
        d2 = second_differences(xs, v)
        conv = _shape_label(d2, _noise(v[:-2], v[1:-1], v[2:]), "convex", "concave")
        witness = None
        if mono == "mixed":
            k = int(np.nonzero(np.diff(np.sign(d1)))[0][0]) + 1
            witness = (float(xs[k]), float(v[k]))
        elif conv == "mixed":
            k = int(np.nonzero(np.diff(np.sign(d2)))[0][0]) + 1
            witness = (float(xs[k + 1]), float(v[k + 1]))
        cls = "consistent" if mono != "mixed" and conv != "mixed" else "inconclusive"
        detail = {"monotonicity": mono, "convexity": conv, **p.to_dict()}
        out.append(ConjectureScan(claim, rows, cls, witness, detail))
    return out
