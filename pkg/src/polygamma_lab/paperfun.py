"""Functions built on psi and its derivatives, with stable rewrites.

Every function takes plain floats and raises ``DomainError`` outside its
domain.  Forms that cancel badly near an endpoint are replaced there by an
algebraically identical expression obtained from the difference equation
psi^(n)(x+1) = psi^(n)(x) + (-1)^n n!/x^(n+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import DomainError
from .specfun import CONSTANTS, psi

GAMMA = CONSTANTS.euler_gamma
REMOVABLE_RADIUS = 1e-12


@dataclass(frozen=True)
class ThetaParam:
    theta: float

    def __post_init__(self):
        if not self.theta > 0:
            raise DomainError(f"theta must be positive, got {self.theta}")


@dataclass(frozen=True)
class OpenProblemParams:
    """Parameters of psi^(i-1)(x+alpha) - (x+beta)^k psi^(i)(lam (x+delta)^mu + tau).

    beta and tau may be zero so that f and g are members of the family.
    """

    i: int
    k: int
    alpha: float
    beta: float
    delta: float
    lam: float
    mu: float
    tau: float

    def __post_init__(self):
        if int(self.i) != self.i or self.i < 1:
            raise DomainError(f"i must be a positive integer, got {self.i}")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k}")
        for name in ("alpha", "delta", "lam", "mu"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("beta", "tau"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> OpenProblemParams:
        lam = d["lambda"] if "lambda" in d else d["lam"]
        return cls(
            int(d["i"]), int(d["k"]), float(d["alpha"]), float(d["beta"]),
            float(d["delta"]), float(lam), float(d["mu"]), float(d["tau"]),
        )

    def to_dict(self) -> dict:
        return {
            "i": self.i, "k": self.k, "alpha": self.alpha, "beta": self.beta,
            "delta": self.delta, "lambda": self.lam, "mu": self.mu, "tau": self.tau,
        }


def _positive(x, name="x"):
    x = float(x)
    if not x > 0:
        raise DomainError(f"{name} must be positive, got {x}", x)
    return x


def _above_minus_one(x):
    x = float(x)
    if not x > -1:
        raise DomainError(f"x must exceed -1, got {x}", x)
    return x


def log_expm1(t: float) -> float:
    """ln(e^t - 1) for t > 0 without overflow or cancellation."""
    if t >= 1.0:
        return t + math.log1p(-math.exp(-t))
    return math.log(math.expm1(t))


# --- phi_theta and its derivatives ----------------------------------------


def phi_theta(x: float, p: ThetaParam) -> float:
    """psi(x) + ln(e^(theta/x) - 1)."""
    x = _positive(x)
    t = p.theta / x
    if t >= 1.0:
        # psi(x) = psi(x+1) - 1/x keeps the 1/x pieces from cancelling
        return psi(0, x + 1.0) + (p.theta - 1.0) / x + math.log1p(-math.exp(-t))
    return psi(0, x) + math.log(math.expm1(t))


_THETA_ONE = ThetaParam(1.0)


def phi(x: float) -> float:
    """psi(x) + ln(e^(1/x) - 1); increasing and concave on (0, inf)."""
    return phi_theta(x, _THETA_ONE)


def varphi(theta: float, x: float) -> float:
    """theta e^(theta/x) / (x^2 (e^(theta/x) - 1))."""
    theta = _positive(theta, "theta")
    x = _positive(x)
    u = theta / x
    return theta / (x * x * -math.expm1(-u))


def varphi_dx(theta: float, x: float) -> float:
    """x-derivative of ``varphi``."""
    theta = _positive(theta, "theta")
    x = _positive(x)
    u = theta / x
    q = -math.expm1(-u)  # 1 - e^-u
    return -theta / x**4 * (2.0 * x / q - theta * math.exp(-u) / (q * q))


def phi_theta_d1(x: float, p: ThetaParam) -> float:
    x = _positive(x)
    u = p.theta / x
    if u >= 1.0:
        # psi'(x) = psi'(x+1) + 1/x^2 absorbs the 1/x^2 part of varphi
        em = math.exp(-u)
        q = -math.expm1(-u)
        return psi(1, x + 1.0) + ((1.0 - p.theta) - em) / (x * x * q)
    return psi(1, x) - varphi(p.theta, x)


def phi_theta_d2(x: float, p: ThetaParam) -> float:
    x = _positive(x)
    u = p.theta / x
    if u >= 1.0:
        # psi''(x) = psi''(x+1) - 2/x^3, same cancellation one order up
        em = math.exp(-u)
        q = -math.expm1(-u)
        t = p.theta
        return (psi(2, x + 1.0) + 2.0 * ((t - 1.0) + em) / (x**3 * q)
                - t * t * em / (x**4 * q * q))
    return psi(2, x) - varphi_dx(p.theta, x)


# --- auxiliaries from the proofs --------------------------------------------

# Taylor coefficients at u = 0 of numerator/u^2 and denominator/u^2 of delta:
# u(e^u - 1) = sum u^(m+2)/(m+1)!,  1 + (u-1)e^u = sum (m+1) u^(m+2)/(m+2)!
_DELTA_ORDER = 18
_DELTA_NUM = [1.0 / math.factorial(m + 1) for m in range(_DELTA_ORDER)]
_DELTA_DEN = [(m + 1) / math.factorial(m + 2) for m in range(_DELTA_ORDER)]

# rho(u) = 1 + u/4 - u^3/144 + u^5/4320 - ...
_RHO_TAYLOR = [
    1.0, 1 / 4, 0.0, -1 / 144, 0.0, 1 / 4320, 0.0, -1 / 134400,
    0.0, 1 / 4354560, 0.0, -691 / 100590336000, 0.0, 1 / 4981616640,
]
_SERIES_BELOW = 0.5


def _horner(coeffs, u):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


def delta_fn(u: float) -> float:
    """u(e^u - 1) / (1 + (u - 1)e^u); decreasing from 2 toward 1."""
    u = _positive(u, "u")
    if u < _SERIES_BELOW:
        return _horner(_DELTA_NUM, u) / _horner(_DELTA_DEN, u)
    em = math.exp(-u)
    return u * (1.0 - em) / (em + u - 1.0)


def rho_fn(u: float) -> float:
    """(1/u)[2u e^u (e^u - 1 - u/2)/(e^u - 1)^2 - 1]; increasing from 1 toward 2."""
    u = _positive(u, "u")
    if u < _SERIES_BELOW:
        return _horner(_RHO_TAYLOR, u)
    em = math.exp(-u)
    q = -math.expm1(-u)
    ratio = (1.0 - em * (1.0 + 0.5 * u)) / (q * q)
    return (2.0 * u * ratio - 1.0) / u


def aux_h(x: float) -> float:
    """3 + 2x - 2e^(1/(x+1)) - (2x+1)e^(1/(x+1) + 1/x), which stays below -4."""
    x = _positive(x)
    a = 1.0 / (x + 1.0)
    b = 1.0 / x
    try:
        return -2.0 * math.expm1(a) - (2.0 * x + 1.0) * math.expm1(a + b)
    except OverflowError:
        return -math.inf


def equiv_ineq_gap(x: float) -> float:
    """x^2 (e^(1/x) - 1) - (x+1)^2 (1 - e^(-1/(x+1))), positive on (0, inf)."""
    x = _positive(x)
    if x < 1.0:
        try:
            left = x * x * math.expm1(1.0 / x)
        except OverflowError:
            return math.inf
        return left + (x + 1.0) ** 2 * math.expm1(-1.0 / (x + 1.0))
    # sum_{k>=3} [a^m + (-1)^k b^m] / k!, a = 1/x, b = 1/(x+1), m = k-2;
    # odd k use a^m - b^m = (a-b) sum_j a^j b^(m-1-j) to avoid cancellation
    a, b = 1.0 / x, 1.0 / (x + 1.0)
    a_minus_b = 1.0 / (x * (x + 1.0))
    terms = []
    pa, pb = a, b  # a^m, b^m
    geo = 1.0  # sum_{j<m} a^j b^(m-1-j)
    fact = 6.0
    for k in range(3, 40):
        t = (pa + pb if k % 2 == 0 else a_minus_b * geo) / fact
        terms.append(t)
        if abs(t) < 1e-18 * abs(terms[0]):
            break
        geo = geo * b + pa
        pa *= a
        pb *= b
        fact *= k + 1
    return math.fsum(terms)


def mu(k: float, x: float) -> float:
    """sqrt(k(k+x)) - k, the mean-value point of 1/k - 1/(k+x) = x/(k+mu)^2."""
    x = _above_minus_one(x)
    if not k >= 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return k * x / (math.sqrt(k * (k + x)) + k)


# --- sandwich bounds, f, g, h and the order families ----------------------


def theorem3_bounds(x: float) -> tuple[float, float, float]:
    """(-gamma + x psi'(1 + x/2), psi(x+1), -gamma + x psi'(sqrt(x+1)))."""
    x = _above_minus_one(x)
    if x == 0:
        raise DomainError("theorem3_bounds is undefined at x = 0", x)
    lower = -GAMMA + x * psi(1, 1.0 + 0.5 * x)
    mid = psi(0, x + 1.0)
    upper = -GAMMA + x * psi(1, math.sqrt(x + 1.0))
    return lower, mid, upper


def uncorrected_lower(x: float) -> float:
    """-gamma + x psi'(x/2), the left side of the inequality before correction."""
    x = _positive(x)
    return -GAMMA + x * psi(1, 0.5 * x)


def f(x: float) -> float:
    """psi(x+1) - x psi'(1 + x/2)."""
    x = _above_minus_one(x)
    if abs(x) < REMOVABLE_RADIUS:
        return -GAMMA
    return psi(0, x + 1.0) - x * psi(1, 1.0 + 0.5 * x)


def f_remark(x: float) -> float:
    """psi(x) - x psi'(x/2) + 5/x, the same function as ``f`` for x != 0."""
    x = _above_minus_one(x)
    if x == 0:
        raise DomainError("rewritten form is singular at 0", x)
    return psi(0, x) - x * psi(1, 0.5 * x) + 5.0 / x


def g(x: float) -> float:
    """x psi'(sqrt(x+1)) - psi(x+1)."""
    x = _above_minus_one(x)
    if abs(x) < REMOVABLE_RADIUS:
        return GAMMA
    u = math.sqrt(x + 1.0)
    if x < 0:
        # both terms blow up like 1/(x+1) as x -> -1; shift them by one step
        return x * psi(1, u + 1.0) + 1.0 - psi(0, x + 2.0)
    return x * psi(1, u) - psi(0, x + 1.0)


def g_remark(x: float) -> float:
    """x psi'(sqrt(x+1)) - psi(x) - 1/x."""
    x = _above_minus_one(x)
    if x == 0:
        raise DomainError("rewritten form is singular at 0", x)
    return x * psi(1, math.sqrt(x + 1.0)) - psi(0, x) - 1.0 / x


H_AT_ZERO = 1.0 + GAMMA - CONSTANTS.pi_sq_over_6


def h(x: float) -> float:
    """(x^2 - 1) psi'(x) - psi(x^2), extended by 1 + gamma - pi^2/6 at 0."""
    x = _above_minus_one(x)
    if abs(x) < REMOVABLE_RADIUS:
        return H_AT_ZERO
    x2 = x * x
    factor = (x - 1.0) * (x + 1.0)
    if abs(x) < 1.0:
        # psi'(x) and psi(x^2) both carry a 1/x^2 pole that cancels
        return factor * psi(1, x + 1.0) + 1.0 - psi(0, x2 + 1.0)
    return factor * psi(1, x) - psi(0, x2)


def _check_order(i):
    if int(i) != i or i < 1:
        raise DomainError(f"order i must be a positive integer, got {i}")
    return int(i)


def f_i(x: float, i: int) -> float:
    """psi^(i)(x+1) - x psi^(i+1)(1 + x/2)."""
    x = _above_minus_one(x)
    i = _check_order(i)
    return psi(i, x + 1.0) - x * psi(i + 1, 1.0 + 0.5 * x)


def g_i(x: float, i: int) -> float:
    """psi^(i)(x+1) - x psi^(i+1)(sqrt(x+1))."""
    x = _above_minus_one(x)
    i = _check_order(i)
    return psi(i, x + 1.0) - x * psi(i + 1, math.sqrt(x + 1.0))


def open_problem_fn(x: float, p: OpenProblemParams) -> float:
    x = float(x)
    if not x + p.alpha > 0 or not x + p.delta >= 0:
        raise DomainError(f"x={x} outside the domain for {p}", x)
    arg = p.lam * (x + p.delta) ** p.mu + p.tau
    if not arg > 0:
        raise DomainError(f"x={x} outside the domain for {p}", x)
    return psi(p.i - 1, x + p.alpha) - (x + p.beta) ** p.k * psi(p.i, arg)


# --- series identity --------------------------------------------------------


def u2der_term(i, u):
    """i (u^2-1)(u-1)^2 / ((i+1)(u+i)^2 (u^2+i)); works on numpy arrays."""
    return i * (u * u - 1) * (u - 1) ** 2 / ((i + 1) * (u + i) ** 2 * (u * u + i))


def u2der1_term(i, u):
    """Summand of the u-derivative of the identity series."""
    return (
        2 * i * (u - 1) ** 2 * (u**3 + 2 * u * u + 2 * i * u + i)
        / ((i + u) ** 3 * (u * u + i) ** 2)
    )


def series_identity(u: float, terms: int = 10_000_000, rel_stop: float = 1e-14):
    """Both sides of (u^2-1) psi'(u) - psi(u^2) = gamma + sum_i u2der_term(i, u).

    The sum runs in blocks until the last term drops below
    ``rel_stop * |partial sum|`` or ``terms`` is reached; the remainder is
    replaced by the integral of the summand from N + 1/2 to infinity.
    Returns (direct, series, tail_bound).
    """
    import numpy as np

    u = _positive(u, "u")
    direct = h(u)
    if u == 1.0:
        return direct, GAMMA, 0.0
    acc = []
    n = 0
    block = 1024
    while n < terms:
        m = min(block, terms - n)
        i = np.arange(n + 1, n + m + 1, dtype=float)
        t = u2der_term(i, u)
        acc.append(math.fsum(t))
        n += m
        if abs(t[-1]) < rel_stop * abs(GAMMA + math.fsum(acc)):
            break
        block = min(block * 2, 1 << 20)
    partial = math.fsum(acc)
    start = n + 0.5
    # s = start / v maps [start, inf) onto (0, 1]; the summand decays like s^-3
    tail, quad_err = integrate.quad(
        lambda v: u2der_term(start / v, u) * start / (v * v) if v > 0 else 0.0,
        0.0, 1.0, epsabs=1e-17, epsrel=1e-13, limit=200,
    )
    # midpoint rule remainder: |T''| / 24 per term, summed ~ |T'(start)| / 24
    eps = 1e-3 * start
    d1 = (u2der_term(start + eps, u) - u2der_term(start - eps, u)) / (2 * eps)
    bound = abs(d1) / 24.0 + quad_err
    return direct, GAMMA + partial + tail, bound
