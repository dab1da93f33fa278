"""Digamma and polygamma evaluation with independent oracles.

Arguments below the shift threshold are moved upward with the difference
equation psi^(n)(x+1) = psi^(n)(x) + (-1)^n n!/x^(n+1).  At the shifted
argument w the series

    psi(1+z)    = -gamma + sum_{m>=1} z / (m (m+z))
    psi^(n)(w)  = (-1)^(n+1) n! sum_{k>=0} 1 / (w+k)^(n+1)

is replaced by its integral-comparison tail (integral + half the first
term) plus Euler-Maclaurin Bernoulli corrections.  The first omitted
correction bounds the truncation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING

from scipy import integrate

from .errors import ConvergenceError, DomainError, PoleError

if TYPE_CHECKING:
    from .verify.grids import Grid
    from .verify.outcome import CheckOutcome

__all__ = [
    "EvalOptions",
    "Constants",
    "CONSTANTS",
    "EvalResult",
    "digamma",
    "polygamma",
    "psi",
    "recurrence_shift",
    "binet_oracle",
    "binet_integrand",
    "polygamma_bounds",
    "cm_derivative",
    "cm_check",
]

_EPS = 2.220446049250313e-16
_MAX_CORRECTIONS = 30


@dataclass(frozen=True)
class EvalOptions:
    target_abs_tol: float = 1e-13
    shift_threshold: float = 10.0
    max_terms: int = 10_000_000

    def __post_init__(self):
        if not self.target_abs_tol > 0:
            raise ValueError("target_abs_tol must be positive")
        if not self.shift_threshold >= 1:
            raise ValueError("shift_threshold must be >= 1")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_OPTIONS = EvalOptions()


@dataclass(frozen=True)
class Constants:
    euler_gamma: float = 0.5772156649015329
    pi_sq_over_2: float = math.pi * math.pi / 2
    pi_sq_over_6: float = math.pi * math.pi / 2 / 3


CONSTANTS = Constants()


@dataclass(frozen=True)
class EvalResult:
    value: float
    est_error: float

    def __float__(self):
        return self.value


@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> tuple[Fraction, ...]:
    """B_2, B_4, ..., B_{2*count} as exact fractions."""
    b = [Fraction(1)]
    for m in range(1, 2 * count + 1):
        acc = sum(math.comb(m + 1, k) * b[k] for k in range(m))
        b.append(-acc / (m + 1))
    return tuple(b[2 * j] for j in range(1, count + 1))


@lru_cache(maxsize=64)
def _tail_coefficients(n: int) -> tuple[float, ...]:
    # B_{2j} (n+2j-1)! / (2j)!, the coefficient of w^-(n+2j)
    out = []
    for j, b2j in enumerate(_bernoulli_even(_MAX_CORRECTIONS), start=1):
        num = math.factorial(n + 2 * j - 1)
        out.append(float(b2j * Fraction(num, math.factorial(2 * j))))
    return tuple(out)


def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _check_argument(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}", x)
    if _is_pole(x):
        raise PoleError(f"pole of the psi family at x={x:g}", x)
    return x


def _asymptotic(n: int, w: float) -> tuple[float, float, float]:
    """Tail value of psi^(n) at w >= threshold.

    Returns (value, truncation bound, sum of |terms|).
    """
    coeffs = _tail_coefficients(n)
    if n == 0:
        lead = -math.log(w)
    else:
        lead = math.factorial(n - 1) / w**n
    half = math.factorial(n) / (2.0 * w ** (n + 1))
    terms = [lead, half]
    inv_w2 = 1.0 / (w * w)
    power = w**-n * inv_w2
    prev = math.inf
    bound = math.inf
    for c in coeffs:
        t = c * power
        at = abs(t)
        if at > prev:
            # asymptotic series turned around; stop at the smallest term
            bound = prev
            break
        terms.append(t)
        prev = at
        power *= inv_w2
        if at <= 0.25 * _EPS * abs(lead + half):
            bound = at
            break
    else:
        bound = prev
    total = math.fsum(terms)
    sign = -1.0 if n % 2 == 0 else 1.0
    abs_sum = sum(abs(t) for t in terms)
    return sign * total, bound, abs_sum


def _shift_terms(n: int, x: float, steps: int) -> list[float]:
    sign = -1.0 if n % 2 else 1.0
    scale = sign * math.factorial(n)
    terms = []
    for j in range(steps):
        z = x + j
        if _is_pole(z):
            raise PoleError(f"shifted argument {z:g} is a pole", x)
        terms.append(scale / z ** (n + 1))
    return terms


def recurrence_shift(n: int, x: float, steps: int) -> float:
    """Accumulated difference-equation correction over ``steps`` unit steps.

    psi^(n)(x) = psi^(n)(x + steps) - recurrence_shift(n, x, steps)
    """
    if n < 0 or steps < 0:
        raise ValueError("n and steps must be non-negative")
    return math.fsum(_shift_terms(n, float(x), steps))


def _evaluate(n: int, x: float, opts: EvalOptions) -> EvalResult:
    x = _check_argument(x)
    w_min = max(opts.shift_threshold, float(n + 10))
    while True:
        steps = 0 if x >= w_min else math.ceil(w_min - x)
        if steps > opts.max_terms:
            raise ConvergenceError(
                f"{steps} recurrence steps exceed max_terms={opts.max_terms}", x
            )
        w = x + steps
        tail, trunc, tail_abs = _asymptotic(n, w)
        if trunc <= 0.1 * opts.target_abs_tol or w > 1e3 * (n + 10):
            break
        w_min = w + 10.0
    terms = _shift_terms(n, x, steps)
    value = tail - math.fsum(terms)
    # each term is rounded once before exact summation
    rounding = 4 * _EPS * (tail_abs + sum(map(abs, terms)) + abs(value))
    return EvalResult(value, 2.0 * (trunc + rounding))


def digamma(x: float, opts: EvalOptions | None = None) -> EvalResult:
    """psi(x) for finite x off the poles 0, -1, -2, ..."""
    return _evaluate(0, x, opts or DEFAULT_OPTIONS)


def polygamma(n: int, x: float, opts: EvalOptions | None = None) -> EvalResult:
    """psi^(n)(x) for n >= 1."""
    if int(n) != n or n < 1:
        raise DomainError(f"polygamma order must be a positive integer, got {n}")
    return _evaluate(int(n), x, opts or DEFAULT_OPTIONS)


def psi(n: int, x: float) -> float:
    """Bare value of psi^(n)(x), n = 0 being the digamma function."""
    if n == 0:
        return _evaluate(0, x, DEFAULT_OPTIONS).value
    return polygamma(n, x).value


# --- quadrature oracle -------------------------------------------------------

_SERIES_CUTOFF = 1e-4


def binet_integrand(t: float) -> float:
    """1/t - 1/(e^t - 1), series-expanded near t = 0."""
    if t < _SERIES_CUTOFF:
        t2 = t * t
        return 0.5 - t / 12.0 + t * t2 / 720.0 - t * t2 * t2 / 30240.0
    return 1.0 / t - 1.0 / math.expm1(t)


def binet_oracle(x: float) -> float:
    """ln x - 1/x + int_0^inf (1/t - 1/(e^t-1)) e^(-xt) dt.

    Quadrature route to psi(x), independent of the series evaluator.
    """
    x = float(x)
    if not x > 0:
        raise DomainError(f"binet_oracle needs x > 0, got {x}", x)
    split = 1.0
    # e^(-x T)/x < 1e-14 bounds the discarded tail (integrand factor <= 1/2)
    t_end = max((math.log(1e14) - math.log(x)) / x, 0.0)

    def f(t):
        return binet_integrand(t) * math.exp(-x * t)

    upper = min(split, t_end) if t_end > 0 else split
    head, _ = integrate.quad(f, 0.0, upper, epsabs=1e-14, epsrel=1e-13, limit=200)
    tail = 0.0
    if t_end > split:
        tail, _ = integrate.quad(
            f, split, t_end, epsabs=1e-14, epsrel=1e-13, limit=400
        )
    return math.log(x) - 1.0 / x + head + tail


# --- two-sided bounds and finite-order complete monotonicity ----------------


def polygamma_bounds(k: int, x: float) -> tuple[float, float]:
    """Lower/upper bounds for (-1)^(k+1) psi^(k)(x), x > 0."""
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    x = float(x)
    if not x > 0:
        raise DomainError(f"polygamma_bounds needs x > 0, got {x}", x)
    k = int(k)
    lead = math.factorial(k - 1) / x**k
    second = math.factorial(k) / x ** (k + 1)
    return lead + 0.5 * second, lead + second


def cm_derivative(alpha: float, n: int, x: float, reversed_sign: bool = False):
    """(-1)^n d^n/dx^n of psi(x) - ln x + alpha/x (negated when reversed).

    Returns (value, scale) where scale is the sum of the magnitudes of the
    three closed-form pieces.
    """
    if not x > 0:
        raise DomainError(f"cm_check grid points must be positive, got {x}", x)
    psi_n = psi(n, x)
    if n == 0:
        log_n = math.log(x)
    else:
        log_n = (-1) ** (n - 1) * math.factorial(n - 1) / x**n
    inv_n = (-1) ** n * math.factorial(n) / x ** (n + 1)
    deriv = psi_n - log_n + alpha * inv_n
    value = (-1) ** n * deriv
    if reversed_sign:
        value = -value
    scale = abs(psi_n) + abs(log_n) + abs(alpha * inv_n)
    return value, scale


def cm_check(
    alpha: float,
    max_order: int,
    grid: Grid,
    sign: str = "direct",
    tol: float = 1e-12,
    claim_id: str | None = None,
) -> CheckOutcome:
    """Spot-check complete monotonicity up to ``max_order`` on ``grid``.

    The first violating (order, x) in order-major sweep is the witness.
    """
    from .verify.outcome import CheckOutcome

    if sign not in ("direct", "reversed"):
        raise ValueError(f"sign must be 'direct' or 'reversed', got {sign!r}")
    if not 0 <= max_order <= 12:
        raise ValueError("max_order must lie in [0, 12]")
    xs = grid.points()
    if xs.min() <= 0:
        bad = float(xs[xs <= 0][0])
        raise DomainError(f"cm_check grid points must be positive, got {bad}", bad)
    claim_id = claim_id or f"lemma3.cm.{sign}.alpha={alpha:g}"
    rev = sign == "reversed"
    worst = None
    samples = 0
    for n in range(max_order + 1):
        for x in xs:
            x = float(x)
            value, scale = cm_derivative(alpha, n, x, rev)
            samples += 1
            rel = value / max(scale, 1e-300)
            if rel < -tol:
                return CheckOutcome(
                    claim_id, False, x, value, samples, detail={"order": n}
                )
            if worst is None or rel < worst[0]:
                worst = (rel, x, value, n)
    _, wx, wval, wn = worst
    return CheckOutcome(claim_id, True, wx, wval, samples, detail={"order": wn})
