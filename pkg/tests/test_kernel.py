"""Tests for the four kernel evaluation routes and their dispatch."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from jpkernel.basis import theta_quad_rule
from jpkernel.errors import SlowConvergenceError, TruncationError, UnsupportedOrderError
from jpkernel.kernel import (
    KernelQuery,
    closed_form_chebyshev,
    h_script_f4,
    h_script_general,
    h_script_integral,
    h_script_integral_parts,
    jph_correction,
    kernel_eval,
    kernel_series,
    series_H,
)
from jpkernel.params import JacobiParams

from _oracles import chebyshev_H

CHEB = JacobiParams(-0.5, -0.5)


class TestClosedForm:
    def test_large_t_limit(self):
        assert_allclose(closed_form_chebyshev(60.0, 1.0, 2.0), 1 / math.pi, rtol=1e-12)

    def test_antipodal_simplification(self):
        t = 0.8
        r = math.exp(-t)
        assert_allclose(
            closed_form_chebyshev(t, 0.0, math.pi), (1 / math.pi) * (1 - r) / (1 + r),
            rtol=1e-13,
        )

    def test_matches_independent_writeup(self):
        for t, th, ph in [(0.3, 0.7, 2.1), (1.5, 3.0, 0.2)]:
            assert_allclose(closed_form_chebyshev(t, th, ph), chebyshev_H(t, th, ph), rtol=1e-14)


class TestSeries:
    def test_chebyshev_point(self):
        got = series_H(CHEB, 1.0, math.pi / 2, math.pi / 2)
        assert_allclose(got, closed_form_chebyshev(1.0, math.pi / 2, math.pi / 2), rtol=1e-12)

    def test_mass_identity(self, acceptance_params):
        p = acceptance_params
        rule = theta_quad_rule(p, 256)
        vals = series_H(p, 1.0, 1.1, rule.nodes)
        assert_allclose(np.sum(rule.weights * vals), math.exp(-0.5 * abs(p.lam)), atol=1e-10)

    def test_long_time_leading_term(self):
        p = JacobiParams(0.0, 0.0)
        t = 30.0
        got = math.exp(0.5 * t * abs(p.lam)) * series_H(p, t, 0.9, 2.0)
        assert_allclose(got, 2.0**p.lam * p.c_ab, rtol=1e-10)

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            series_H(JacobiParams(0, 0), 1e-6, 1.0, 2.0)

    def test_kernel_series_accepts_query(self):
        q = KernelQuery(t=0.7, theta=2.0, phi=2.2, method="series")
        assert_allclose(kernel_series(CHEB, q), closed_form_chebyshev(0.7, 2.0, 2.2), rtol=1e-12)


class TestF4:
    def test_zero_argument_case(self):
        # theta = 0, phi = pi kills both series variables
        for a, b in [(-0.5, -0.5), (0.5, -0.75), (-0.75, -0.8)]:
            p = JacobiParams(a, b)
            t = 0.7
            got = h_script_f4(p, t, 0.0, math.pi)
            ref = p.c_ab * math.sinh(0.5 * t) / math.cosh(0.5 * t) ** p.sigma
            assert_allclose(got, ref, rtol=1e-12)

    def test_cross_method_chebyshev(self):
        got = h_script_f4(CHEB, 1.0, math.pi / 3, 2 * math.pi / 3)
        ref = series_H(CHEB, 1.0, math.pi / 3, 2 * math.pi / 3) - jph_correction(CHEB, 1.0)
        assert_allclose(got, ref, rtol=1e-9)

    def test_cross_method_profile_regime(self):
        p = JacobiParams(-0.75, -0.8)
        got = h_script_f4(p, 0.5, math.pi / 2, math.pi / 2)
        ref = float(h_script_integral(p, 0.5, math.pi / 2, math.pi / 2))
        assert got > 0
        assert_allclose(got, ref, rtol=1e-7)

    def test_slow_convergence_guard(self):
        with pytest.raises(SlowConvergenceError):
            h_script_f4(JacobiParams(0, 0), 1e-4, 1.0, 1.0)


class TestIntegral:
    def test_cross_method_all_cases(self, acceptance_params):
        p = acceptance_params
        for (t, th, ph) in [(1.0, 1.0, 2.0), (0.5, 0.01, math.pi / 2), (0.1, 1.2, 1.2)]:
            ref = series_H(p, t, th, ph) - float(jph_correction(p, t))
            got = float(h_script_integral(p, t, th, ph))
            assert_allclose(got, ref, rtol=1e-7)

    def test_component_integrals_nonnegative(self):
        # every double integral of the case split is individually >= 0
        for a, b in [(0.5, 0.5), (-0.75, 0.5), (0.5, -0.75), (-0.75, -0.75)]:
            p = JacobiParams(a, b)
            parts = h_script_integral_parts(p, 0.5, math.pi / 2, math.pi / 2)
            assert all(x >= 0 for x in parts)
            assert_allclose(sum(parts), float(h_script_integral(p, 0.5, math.pi / 2, math.pi / 2)),
                            rtol=1e-9)

    def test_derivative_against_series(self):
        p = JacobiParams(0.5, -0.75)
        for deriv in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 2, 1)]:
            M, N, L = deriv
            got = float(h_script_integral(p, 0.6, 1.0, 2.2, deriv=deriv))
            if N == 0 and L == 0:
                got += float(jph_correction(p, 0.6, M=M))
            ref = series_H(p, 0.6, 1.0, 2.2, M=M, N=N, L=L)
            assert_allclose(got, ref, rtol=1e-6)

    def test_order_cap(self):
        with pytest.raises(UnsupportedOrderError):
            h_script_integral(JacobiParams(0, 0), 0.5, 1.0, 2.0, deriv=(0, 0, 2))


class TestGeneral:
    def test_matches_integral_density_case(self):
        p = JacobiParams(0.5, 0.5)
        got = h_script_general(p, 1.0, 1.0, 2.0)
        assert_allclose(got, float(h_script_integral(p, 1.0, 1.0, 2.0)), rtol=1e-8)

    def test_matches_integral_deep_profile(self):
        p = JacobiParams(-0.9, -0.6)
        got = h_script_general(p, 1.0, 0.5, 2.5)
        assert_allclose(got, float(h_script_integral(p, 1.0, 0.5, 2.5)), rtol=1e-6)

    def test_antipodal_reduces_to_zero_argument_value(self):
        p = JacobiParams(-0.75, 0.5)
        t = 0.9
        got = h_script_general(p, t, 0.0, math.pi)
        ref = p.c_ab * math.sinh(0.5 * t) / math.cosh(0.5 * t) ** p.sigma
        assert_allclose(got, ref, rtol=1e-10)


class TestKernelEval:
    def test_correction_indicator(self):
        # above the threshold the companion kernel needs no correction
        p = JacobiParams(0.5, 0.5)
        assert jph_correction(p, 1.0) == 0.0
        q = KernelQuery(t=1.0, theta=1.0, phi=2.0, method="integral")
        assert kernel_eval(p, q) == float(h_script_integral(p, 1.0, 1.0, 2.0))

    def test_correction_applied_below_threshold(self):
        p = JacobiParams(-0.75, -0.75)
        assert jph_correction(p, 2.0) < 0.0
        got = kernel_eval(p, KernelQuery(t=2.0, theta=1.0, phi=1.0, method="integral"))
        ref = series_H(p, 2.0, 1.0, 1.0)
        assert_allclose(got, ref, rtol=1e-7)

    def test_chebyshev_oracle(self):
        got = kernel_eval(CHEB, KernelQuery(t=0.7, theta=2.0, phi=2.2))
        assert_allclose(got, closed_form_chebyshev(0.7, 2.0, 2.2), rtol=1e-10)

    def test_auto_dispatch(self):
        p = JacobiParams(0.0, 0.0)
        small = kernel_eval(p, KernelQuery(t=0.1, theta=1.0, phi=1.5))
        assert_allclose(small, float(h_script_integral(p, 0.1, 1.0, 1.5)), rtol=1e-12)
        large = kernel_eval(p, KernelQuery(t=1.0, theta=1.0, phi=1.5))
        assert_allclose(large, series_H(p, 1.0, 1.0, 1.5), rtol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(
        t=st.floats(0.25, 5.0),
        theta=st.floats(0.01, math.pi - 0.01),
        phi=st.floats(0.01, math.pi - 0.01),
    )
    def test_symmetry(self, t, theta, phi):
        p = JacobiParams(-0.75, 0.5)
        a = kernel_eval(p, KernelQuery(t=t, theta=theta, phi=phi))
        b = kernel_eval(p, KernelQuery(t=t, theta=phi, phi=theta))
        assert_allclose(a, b, rtol=1e-12, atol=1e-300)

    def test_positivity(self, acceptance_params, rng):
        p = acceptance_params
        for _ in range(10):
            t = float(rng.uniform(0.05, 3.0))
            th = float(rng.uniform(0, math.pi))
            ph = float(rng.uniform(0, math.pi))
            h = kernel_eval(p, KernelQuery(t=t, theta=th, phi=ph))
            assert h > 0
            assert h - float(jph_correction(p, t)) > 0

    def test_semigroup_identity(self):
        p = JacobiParams(0.5, -0.75)
        rule = theta_quad_rule(p, 256)
        s, t = 0.4, 0.9
        th, ph = 0.8, 2.3
        left = series_H(p, s, th, rule.nodes)
        right = series_H(p, t, ph, rule.nodes)
        composed = float(np.sum(rule.weights * left * right))
        assert_allclose(composed, series_H(p, s + t, th, ph), rtol=1e-8)

    def test_query_validation(self):
        with pytest.raises(ValueError):
            KernelQuery(t=-1.0, theta=1.0, phi=1.0)
        with pytest.raises(ValueError):
            KernelQuery(t=1.0, theta=4.0, phi=1.0)
        with pytest.raises(UnsupportedOrderError):
            KernelQuery(t=1.0, theta=1.0, phi=1.0, deriv=(2, 2, 0))
        with pytest.raises(UnsupportedOrderError):
            KernelQuery(t=1.0, theta=1.0, phi=1.0, deriv=(1, 0, 0), method="f4")
