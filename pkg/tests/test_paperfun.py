import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polygamma_lab import DomainError
from polygamma_lab import paperfun as pf
from polygamma_lab.paperfun import OpenProblemParams, ThetaParam

mp = mpmath.mpf
EG = float(mpmath.euler)


def mp_phi_theta(x, theta):
    x, theta = mp(x), mp(theta)
    return mpmath.psi(0, x) + mpmath.log(mpmath.expm1(theta / x))


def mp_f(x):
    x = mp(x)
    return mpmath.psi(0, x + 1) - x * mpmath.psi(1, 1 + x / 2)


def mp_g(x):
    x = mp(x)
    return x * mpmath.psi(1, mpmath.sqrt(x + 1)) - mpmath.psi(0, x + 1)


def mp_h(x):
    x = mp(x)
    return (x * x - 1) * mpmath.psi(1, x) - mpmath.psi(0, x * x)


def close(a, b, rel=1e-13, abs_=1e-14):
    return abs(a - float(b)) <= max(abs_, rel * abs(float(b)))


class TestParams:
    def test_theta_positive(self):
        with pytest.raises(DomainError):
            ThetaParam(0.0)

    def test_open_params_roundtrip(self):
        p = OpenProblemParams(2, 3, 1.0, 0.5, 1.0, 2.0, 0.5, 0.25)
        assert OpenProblemParams.from_dict(p.to_dict()) == p

    def test_open_params_lambda_alias(self):
        d = {"i": 1, "k": 1, "alpha": 1, "beta": 0, "delta": 1, "lam": 0.5, "mu": 1, "tau": 0.5}
        assert OpenProblemParams.from_dict(d).lam == 0.5

    @pytest.mark.parametrize("field,value", [("alpha", 0.0), ("mu", -1.0), ("beta", -0.1), ("i", 0)])
    def test_open_params_invalid(self, field, value):
        d = OpenProblemParams(1, 1, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0).to_dict()
        d[field] = value
        with pytest.raises(DomainError):
            OpenProblemParams.from_dict(d)


class TestPhi:
    @pytest.mark.parametrize("x", [1e-6, 1e-3, 0.05, 0.5, 1.0, 3.0, 100.0, 1e6])
    @pytest.mark.parametrize("theta", [0.25, 0.5, 1.0, 1.5, 2.0, 5.0])
    def test_phi_theta_against_mpmath(self, x, theta):
        ref = mp_phi_theta(x, theta)
        assert close(pf.phi_theta(x, ThetaParam(theta)), ref, rel=1e-12, abs_=1e-13)

    def test_phi_is_theta_one(self):
        assert pf.phi(0.7) == pf.phi_theta(0.7, ThetaParam(1.0))

    def test_limits(self):
        assert abs(pf.phi(1e-6) + EG) < 1e-4
        assert abs(pf.phi(1e6)) < 1e-4
        assert abs(pf.phi_theta(1e6, ThetaParam(2.0)) - math.log(2)) < 1e-4

    @pytest.mark.parametrize("t", [1e-12, 1e-3, 0.999, 1.0, 30.0, 800.0])
    def test_log_expm1(self, t):
        assert close(pf.log_expm1(t), mpmath.log(mpmath.expm1(mp(t))), rel=1e-14)

    @pytest.mark.parametrize("x", [1e-6, 1e-3, 0.3, 2.0, 40.0, 900.0])
    @pytest.mark.parametrize("theta", [0.25, 0.5, 1.0, 3.0])
    def test_derivatives_against_mpmath(self, x, theta):
        p = ThetaParam(theta)
        d1 = mpmath.diff(lambda t: mp_phi_theta(t, theta), mp(x), 1)
        d2 = mpmath.diff(lambda t: mp_phi_theta(t, theta), mp(x), 2)
        assert close(pf.phi_theta_d1(x, p), d1, rel=1e-10, abs_=1e-15)
        assert close(pf.phi_theta_d2(x, p), d2, rel=1e-9, abs_=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            pf.phi(-1.0)
        with pytest.raises(DomainError):
            pf.phi(0.0)


class TestProofAuxiliaries:
    @pytest.mark.parametrize("u", [1e-8, 1e-4, 1e-2, 0.3, 0.49, 0.5, 1.0, 10.0, 50.0])
    def test_delta_against_mpmath(self, u):
        U = mp(u)
        ref = U * mpmath.expm1(U) / (1 + (U - 1) * mpmath.exp(U))
        assert close(pf.delta_fn(u), ref, rel=1e-14)

    @pytest.mark.parametrize("u", [1e-8, 1e-4, 1e-2, 0.3, 0.49, 0.5, 1.0, 10.0, 50.0])
    def test_rho_against_mpmath(self, u):
        U = mp(u)
        e = mpmath.exp(U)
        ref = (2 * U * e * (e - 1 - U / 2) / (e - 1) ** 2 - 1) / U
        assert close(pf.rho_fn(u), ref, rel=1e-14)

    def test_delta_rho_limits_at_zero(self):
        assert abs(pf.delta_fn(1e-4) - 2) < 1e-3
        assert abs(pf.rho_fn(1e-4) - 1) < 1e-3

    @pytest.mark.parametrize("x", [2e-3, 0.1, 1.0, 7.0, 1e3, 1e6])
    def test_aux_h_against_mpmath(self, x):
        X = mp(x)
        ref = 3 + 2 * X - 2 * mpmath.exp(1 / (X + 1)) - (2 * X + 1) * mpmath.exp(1 / (X + 1) + 1 / X)
        assert close(pf.aux_h(x), ref, rel=1e-12)

    def test_aux_h_limit(self):
        assert abs(pf.aux_h(1e6) + 4) < 1e-4

    @pytest.mark.parametrize("x", [1e-3, 0.2, 0.999, 1.0, 3.0, 1e3, 1e6])
    def test_equiv_gap_against_mpmath(self, x):
        X = mp(x)
        ref = X**2 * mpmath.expm1(1 / X) - (X + 1) ** 2 * (1 - mpmath.exp(-1 / (X + 1)))
        if ref > np.finfo(float).max:
            assert pf.equiv_ineq_gap(x) == math.inf
        else:
            assert close(pf.equiv_ineq_gap(x), ref, rel=1e-12, abs_=0)

    def test_mu_examples(self):
        assert pf.mu(1, 3.0) == 1.0
        assert abs(pf.mu(1e6, 1.0) - 0.5) < 1e-6

    @given(k=st.integers(1, 10**6), x=st.floats(min_value=-0.999, max_value=100))
    @settings(max_examples=200, deadline=None)
    def test_mu_mean_value_identity(self, k, x):
        m = pf.mu(k, x)
        with mpmath.workdps(700):
            K, X = mp(k), mp(x)
            ref = mpmath.sqrt(K * (K + X)) - K
        assert close(m, ref, rel=1e-13, abs_=1e-300)

    def test_mu_domain(self):
        with pytest.raises(DomainError):
            pf.mu(2, -1.0)


class TestTheorem3:
    @pytest.mark.parametrize("x", [-0.9, -0.2, 0.5, 4.0, 80.0])
    def test_bounds_against_mpmath(self, x):
        X = mp(x)
        lo, mid, up = pf.theorem3_bounds(x)
        assert close(lo, -mpmath.euler + X * mpmath.psi(1, 1 + X / 2))
        assert close(mid, mpmath.psi(0, X + 1))
        assert close(up, -mpmath.euler + X * mpmath.psi(1, mpmath.sqrt(X + 1)))

    def test_counterexample_value(self):
        # -gamma + psi'(1/2) - psi(2) = pi^2/2 - 1
        ref = float(mpmath.pi**2 / 2 - 1)
        assert pf.uncorrected_lower(1.0) - pf.theorem3_bounds(1.0)[1] == pytest.approx(ref, rel=1e-14)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            pf.theorem3_bounds(0.0)


class TestFGH:
    @pytest.mark.parametrize("x", [-1 + 1e-9, -0.999, -0.5, -1e-3, 1e-3, 0.5, 3.0, 100.0, 1e8])
    def test_f_against_mpmath(self, x):
        assert close(pf.f(x), mp_f(x), rel=1e-12, abs_=1e-13)

    @pytest.mark.parametrize("x", [-1 + 1e-9, -0.999, -0.5, -1e-3, 1e-3, 0.5, 3.0, 100.0, 1e8])
    def test_g_against_mpmath(self, x):
        assert close(pf.g(x), mp_g(x), rel=1e-12, abs_=1e-13)

    @pytest.mark.parametrize("x", [-0.999, -0.5, -1e-3, 1e-3, 0.5, 0.999, 1.0, 1.001, 3.0, 100.0])
    def test_h_against_mpmath(self, x):
        assert close(pf.h(x), mp_h(x), rel=1e-12, abs_=1e-13)

    def test_removable_values(self):
        assert pf.f(0.0) == -EG
        assert pf.g(0.0) == EG
        assert pf.h(0.0) == pytest.approx(float(1 + mpmath.euler - mpmath.pi**2 / 6), abs=1e-15)
        # continuity across the removable point
        assert pf.h(1e-6) == pytest.approx(pf.h(0.0), abs=1e-5)

    def test_h_at_one(self):
        assert abs(pf.h(1.0) - EG) <= 1e-13

    @pytest.mark.parametrize("x", np.linspace(-0.95, 10, 13))
    def test_remark_forms(self, x):
        if x == 0:
            return
        assert abs(pf.f(x) - pf.f_remark(x)) <= 1e-10
        assert abs(pf.g(x) - pf.g_remark(x)) <= 1e-10

    @pytest.mark.parametrize("fn", [pf.f, pf.g, pf.h])
    def test_domain(self, fn):
        with pytest.raises(DomainError):
            fn(-1.0)


class TestOrderFamilies:
    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    @pytest.mark.parametrize("x", [-0.9, -0.3, 0.7, 12.0])
    def test_f_i_against_mpmath(self, i, x):
        X = mp(x)
        ref = mpmath.psi(i, X + 1) - X * mpmath.psi(i + 1, 1 + X / 2)
        assert close(pf.f_i(x, i), ref, rel=1e-11, abs_=1e-14)

    @pytest.mark.parametrize("i", [1, 2, 3])
    @pytest.mark.parametrize("x", [-0.9, 0.7, 12.0])
    def test_g_i_against_mpmath(self, i, x):
        X = mp(x)
        ref = mpmath.psi(i, X + 1) - X * mpmath.psi(i + 1, mpmath.sqrt(X + 1))
        assert close(pf.g_i(x, i), ref, rel=1e-11, abs_=1e-14)

    def test_f_i_at_large_x(self):
        for i in range(1, 5):
            assert abs(pf.f_i(1e5, i)) <= 1e-4

    def test_bad_order(self):
        with pytest.raises(DomainError):
            pf.f_i(1.0, 0)

    def test_open_problem_reduces_to_f(self):
        p = OpenProblemParams(1, 1, 1.0, 0.0, 1.0, 0.5, 1.0, 0.5)
        for x in (-0.5, 0.3, 4.0):
            assert pf.open_problem_fn(x, p) == pytest.approx(pf.f(x), rel=1e-14, abs=1e-15)

    def test_open_problem_reduces_to_minus_g(self):
        p = OpenProblemParams(1, 1, 1.0, 0.0, 1.0, 1.0, 0.5, 0.0)
        for x in (-0.5, 0.3, 4.0):
            assert pf.open_problem_fn(x, p) == pytest.approx(-pf.g(x), rel=1e-14, abs=1e-15)

    def test_open_problem_domain(self):
        p = OpenProblemParams(1, 1, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0)
        with pytest.raises(DomainError):
            pf.open_problem_fn(-2.0, p)


class TestSeriesIdentity:
    @pytest.mark.parametrize("u", [0.05, 0.5, 1.0, 2.0, 10.0, 20.0])
    def test_both_sides_agree(self, u):
        direct, series, bound = pf.series_identity(u)
        U = mp(u)
        ref = (U * U - 1) * mpmath.psi(1, U) - mpmath.psi(0, U * U)
        assert close(direct, ref, rel=1e-13)
        assert abs(direct - series) <= 1e-9

    def test_series_against_mpmath_sum(self):
        u = 2.0
        ref = mpmath.euler + mpmath.nsum(lambda i: i * (u * u - 1) * (u - 1) ** 2 /
                                          ((i + 1) * (u + i) ** 2 * (u * u + i)), [1, mpmath.inf])
        assert close(pf.series_identity(u)[1], ref, rel=1e-12)

    @given(i=st.integers(1, 100), u=st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=300, deadline=None)
    def test_derivative_terms_positive(self, i, u):
        if u == 1.0:
            return
        assert pf.u2der1_term(i, u) > 0

    def test_derivative_term_matches_mpmath(self):
        i, u = 3, 1.7
        ref = mpmath.diff(lambda t: i * (t * t - 1) * (t - 1) ** 2 / ((i + 1) * (t + i) ** 2 * (t * t + i)), u)
        assert close(pf.u2der1_term(i, u), ref, rel=1e-10)
