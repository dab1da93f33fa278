"""Grid checks that turn a claimed property into a CheckOutcome.

All sign decisions compare a signed slack against ``tol`` times a local
value scale (``max(1, |values involved|)`` unless the caller supplies a
scale function).  The reported margin is the raw slack at the witness, the
point whose normalised slack is smallest.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np

from ..errors import EvalError
from ..paperfun import theorem3_bounds, uncorrected_lower
from ..specfun import psi
from .grids import Grid
from .outcome import CheckOutcome

DEFAULT_TOL = 1e-12
MIN_REL_STEP = 1e-6
DIVERGENCE_THRESHOLD = 1e6

RealFn = Callable[[float], float]


def sample_points(grid: Grid | Sequence[float] | np.ndarray) -> tuple[np.ndarray, float]:
    """Points of ``grid`` plus the anchor that step sizes are measured from."""
    if isinstance(grid, Grid):
        return grid.points(), grid.offset
    return np.asarray(sorted(set(float(v) for v in grid)), dtype=float), 0.0


def evaluate(fn: RealFn, xs, allow_inf: bool = False) -> np.ndarray:
    out = np.empty(len(xs))
    for j, x in enumerate(xs):
        x = float(x)
        try:
            v = float(fn(x))
        except EvalError as exc:
            if exc.x is None:
                exc.x = x
            raise
        except (ArithmeticError, ValueError) as exc:
            raise EvalError(f"evaluation failed at x={x!r}: {exc}", x) from exc
        if math.isnan(v) or (math.isinf(v) and not allow_inf):
            raise EvalError(f"non-finite value {v} at x={x!r}", x)
        out[j] = v
    return out


def _scale(*arrays) -> np.ndarray:
    s = np.ones_like(arrays[0])
    for a in arrays:
        s = np.maximum(s, np.abs(a))
    return s


def _verdict(claim_id, xs, raw, scale, tol, detail_fn=None) -> CheckOutcome:
    if len(raw) == 0:
        return CheckOutcome(claim_id, False, None, math.nan, 0, detail={"reason": "no samples"})
    with np.errstate(invalid="ignore"):
        rel = np.where(np.isinf(raw), np.sign(raw), raw / scale)
    j = int(np.argmin(rel))
    passed = bool(rel[j] > -tol)
    detail = detail_fn(j) if detail_fn else {}
    return CheckOutcome(claim_id, passed, float(xs[j]), float(raw[j]), len(raw), detail=detail)


def _keep_steps(xs, anchor, min_rel_step):
    dx = np.diff(xs)
    ref = np.maximum(np.abs(xs[:-1] - anchor), np.finfo(float).tiny)
    return dx >= min_rel_step * ref


def check_monotone(
    fn: RealFn,
    grid,
    direction: str = "increasing",
    tol: float = DEFAULT_TOL,
    claim_id: str = "monotone",
    min_rel_step: float = MIN_REL_STEP,
) -> CheckOutcome:
    """Sign of consecutive differences against ``direction``.

    Pairs closer than ``min_rel_step`` times their distance from the grid
    anchor are skipped.
    """
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    xs, anchor = sample_points(grid)
    v = evaluate(fn, xs)
    sgn = 1.0 if direction == "increasing" else -1.0
    keep = _keep_steps(xs, anchor, min_rel_step)
    left, right = xs[:-1][keep], xs[1:][keep]
    diff = sgn * (v[1:] - v[:-1])[keep]
    scale = _scale(v[:-1][keep], v[1:][keep])
    return _verdict(
        claim_id, left, diff, scale, tol, lambda j: {"x_next": float(right[j])}
    )


def second_differences(xs: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Non-uniform second differences in value units (f2 - 2 f1 + f0 when uniform)."""
    h0 = xs[1:-1] - xs[:-2]
    h1 = xs[2:] - xs[1:-1]
    slope0 = (v[1:-1] - v[:-2]) / h0
    slope1 = (v[2:] - v[1:-1]) / h1
    return (slope1 - slope0) * 0.5 * (h0 + h1)


def check_convexity(
    fn: RealFn,
    grid,
    sense: str = "convex",
    tol: float = DEFAULT_TOL,
    claim_id: str = "convexity",
) -> CheckOutcome:
    if sense not in ("convex", "concave"):
        raise ValueError(f"unknown sense {sense!r}")
    xs, _ = sample_points(grid)
    if len(xs) < 3:
        raise ValueError("convexity check needs at least three points")
    v = evaluate(fn, xs)
    sgn = 1.0 if sense == "convex" else -1.0
    d2 = sgn * second_differences(xs, v)
    scale = _scale(v[:-2], v[1:-1], v[2:])
    return _verdict(
        claim_id,
        xs[1:-1],
        d2,
        scale,
        tol,
        lambda j: {"x_left": float(xs[j]), "x_right": float(xs[j + 2])},
    )


def check_sign(
    fn: RealFn,
    grid,
    sign: str = "positive",
    tol: float = DEFAULT_TOL,
    claim_id: str = "sign",
    scale_fn: RealFn | None = None,
) -> CheckOutcome:
    """Pointwise strict sign; infinities of the asserted sign count as slack."""
    if sign not in ("positive", "negative"):
        raise ValueError(f"unknown sign {sign!r}")
    xs, _ = sample_points(grid)
    v = evaluate(fn, xs, allow_inf=True)
    sgn = 1.0 if sign == "positive" else -1.0
    if scale_fn is None:
        scale = _scale(np.where(np.isinf(v), 1.0, v))
    else:
        scale = np.maximum(evaluate(scale_fn, xs, allow_inf=True), np.finfo(float).tiny)
    return _verdict(claim_id, xs, sgn * v, scale, tol)


_APPROACH = {
    "zero_plus": lambda d: d,
    "infinity": lambda d: 1.0 / d,
    "neg_one_plus": lambda d: -1.0 + d,
}


def limit_sequence(approach: str, seq_len: int, start: float, end: float) -> np.ndarray:
    """Geometric probe points; ``start``/``end`` are distances to the limit
    point (reciprocals of x for ``infinity``)."""
    if approach not in _APPROACH:
        raise ValueError(f"unknown approach {approach!r}")
    if seq_len < 3:
        raise ValueError("seq_len must be >= 3")
    d = np.geomspace(start, end, seq_len)
    return np.array([_APPROACH[approach](float(t)) for t in d])


def check_limit(
    fn: RealFn,
    target: float,
    approach: str,
    seq_len: int = 8,
    tol: float = 1e-4,
    claim_id: str = "limit",
    start: float = 1e-1,
    end: float = 1e-6,
    threshold: float = DIVERGENCE_THRESHOLD,
) -> CheckOutcome:
    """Finite target: last deviation within ``tol`` and deviations never grow
    beyond noise.  Infinite target: values move monotonically toward
    ``target`` and the last one exceeds ``threshold`` in magnitude."""
    xs = limit_sequence(approach, seq_len, start, end)
    v = evaluate(fn, xs)
    if math.isinf(target):
        sgn = 1.0 if target > 0 else -1.0
        s = sgn * v
        steps = np.diff(s)
        bad = np.nonzero(steps <= 0)[0]
        if len(bad):
            j = int(bad[0]) + 1
            return CheckOutcome(claim_id, False, float(xs[j]), float(steps[j - 1]),
                                len(xs), detail={"reason": "not monotone"})
        margin = float(s[-1] - threshold)
        return CheckOutcome(claim_id, margin > 0, float(xs[-1]), margin, len(xs),
                            detail={"last_value": float(v[-1])})
    dev = np.abs(v - target)
    noise = DEFAULT_TOL * _scale(v)
    grow = np.nonzero(dev[1:] > dev[:-1] + noise[1:])[0]
    if len(grow):
        j = int(grow[0]) + 1
        return CheckOutcome(claim_id, False, float(xs[j]), float(tol - dev[j]),
                            len(xs), detail={"reason": "deviation grew"})
    margin = float(tol - dev[-1])
    return CheckOutcome(claim_id, margin >= 0, float(xs[-1]), margin, len(xs),
                        detail={"last_value": float(v[-1])})


def check_sandwich(grid, tol: float = DEFAULT_TOL, claim_id: str = "thm3.sandwich") -> CheckOutcome:
    """lower < psi(x+1) < upper on x > 0, reversed on (-1, 0)."""
    xs, _ = sample_points(grid)
    xs = xs[xs != 0]
    raw, scale = [], []
    for x in xs:
        x = float(x)
        try:
            lo, mid, up = theorem3_bounds(x)
        except EvalError as exc:
            exc.x = x
            raise
        orient = 1.0 if x > 0 else -1.0
        gap = min(orient * (mid - lo), orient * (up - mid))
        raw.append(gap)
        scale.append(max(1.0, abs(lo), abs(mid), abs(up)))
    return _verdict(claim_id, xs, np.array(raw), np.array(scale), tol)


def check_counterexample(x: float = 1.0, claim_id: str = "thm3.counterexample") -> CheckOutcome:
    """The uncorrected left inequality -gamma + x psi'(x/2) < psi(x+1) must fail.

    Passes when the violation is observed; margin is the size of the violation.
    """
    lhs = uncorrected_lower(x)
    mid = psi(0, x + 1.0)
    margin = lhs - mid
    return CheckOutcome(claim_id, margin > 0, float(x), margin, 1,
                        detail={"uncorrected_lower": lhs, "psi_x_plus_1": mid})


def step_comparison(
    fn: RealFn,
    grid,
    step: float,
    tol: float = DEFAULT_TOL,
    claim_id: str = "step_comparison",
) -> CheckOutcome:
    """fn(x) - fn(x + step) > 0 on the grid."""
    if not step > 0:
        raise ValueError("step must be positive")
    xs, _ = sample_points(grid)
    a = evaluate(fn, xs)
    b = evaluate(fn, xs + step)
    return _verdict(claim_id, xs, a - b, _scale(a, b), tol,
                    lambda j: {"step": step})


def combine(claim_id: str, parts: list[CheckOutcome]) -> CheckOutcome:
    """Fold sub-checks into one outcome; the first failure (or the smallest
    margin when all pass) supplies witness and margin."""
    failed = [p for p in parts if not p.passed]
    key = failed[0] if failed else min(parts, key=lambda p: p.margin)
    detail = {p.claim_id: p.margin for p in parts}
    detail["witness_from"] = key.claim_id
    return CheckOutcome(
        claim_id,
        not failed,
        key.witness_x,
        key.margin,
        sum(p.samples for p in parts),
        detail=detail,
    )
