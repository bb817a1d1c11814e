"""Tests for the operator kernels and their estimate scans."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from jpkernel.basis import OrthonormalBasis, mu_total, theta_quad_rule, trig_poly_deriv, trig_poly_table
from jpkernel.czkernels import (
    LaplaceKernel,
    MaximalKernel,
    RieszKernel,
    SquareFunctionKernel,
    StieltjesAtoms,
    StieltjesKernel,
    _golden_max,
    _maximal_t_grid,
    constant_profile,
    gradient_check,
    growth_check,
    imaginary_power_profile,
    make_kernel,
    maximal_kernel_norm,
    riesz_kernel,
    smoothness_check,
    square_fn_kernel_norm,
    stieltjes_multiplier_kernel,
)
from jpkernel.errors import TailError
from jpkernel.kernel import closed_form_chebyshev
from jpkernel.params import JacobiParams

CHEB = JacobiParams(-0.5, -0.5)


def _cheb_dt(t, theta, phi, h=1e-6):
    return (closed_form_chebyshev(t + h, theta, phi)
            - closed_form_chebyshev(t - h, theta, phi)) / (2 * h)


def _cheb_dth(t, theta, phi, h=1e-6):
    return (closed_form_chebyshev(t, theta + h, phi)
            - closed_form_chebyshev(t, theta - h, phi)) / (2 * h)


class TestMaximal:
    def test_matches_closed_form_pipeline(self):
        grid_max, refined = maximal_kernel_norm(CHEB, 1.0, 2.0)
        preset_grid = _maximal_t_grid(1e-4, 64)
        vals = closed_form_chebyshev(preset_grid, 1.0, 2.0)
        i = int(np.argmax(vals))
        ref = max(
            float(vals[i]),
            _golden_max(
                lambda lt: closed_form_chebyshev(math.exp(lt), 1.0, 2.0),
                math.log(preset_grid[max(i - 1, 0)]), math.log(preset_grid[i + 1]),
            ),
        )
        ref = max(ref, 1.0 / mu_total(CHEB))
        assert grid_max <= refined + 1e-15
        assert_allclose(refined, ref, rtol=1e-8)

    def test_far_pair_is_finite_and_small(self):
        p = JacobiParams(0.5, -0.75)
        _, refined = maximal_kernel_norm(p, 0.1, 3.0)
        assert 0 < refined < 10.0

    def test_lam_zero_limit_candidate(self):
        # the t -> infinity limit 1/mu_total is part of the sup
        _, refined = maximal_kernel_norm(CHEB, 1.0, 1.2)
        assert refined >= 1.0 / mu_total(CHEB) - 1e-14

    def test_diagonal_rejected(self):
        with pytest.raises(ValueError):
            maximal_kernel_norm(CHEB, 1.0, 1.0)


class TestRiesz:
    def test_order_one_mpmath_style_oracle(self):
        # adaptive quadrature of the closed-form t-integrand
        got = riesz_kernel(CHEB, 1, 1.0, 2.3)
        ref, _ = integrate.quad(lambda t: _cheb_dth(t, 1.0, 2.3), 0, 60, limit=300)
        assert_allclose(got, ref, rtol=1e-7)

    def test_order_two_oracle(self):
        h = 1e-4
        got = riesz_kernel(CHEB, 2, 1.2, 2.4)

        def d2(t):
            return (closed_form_chebyshev(t, 1.2 + h, 2.4)
                    - 2 * closed_form_chebyshev(t, 1.2, 2.4)
                    + closed_form_chebyshev(t, 1.2 - h, 2.4)) / h**2

        ref, _ = integrate.quad(lambda t: d2(t) * t, 0, 60, limit=300)
        assert_allclose(got, ref, rtol=1e-5)

    def test_no_symmetry_but_finite(self):
        p = JacobiParams(0.5, -0.75)
        a = riesz_kernel(p, 1, 0.9, 2.0)
        b = riesz_kernel(p, 1, 2.0, 0.9)
        assert math.isfinite(a) and math.isfinite(b)

    def test_spectral_consistency_five_points(self):
        # action on basis functions reproduces the inverse-rate symbol
        import sys
        sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))
        from _dualroute import RieszKernelRoute

        p = JacobiParams(0.5, -0.75)
        basis = OrthonormalBasis(p, 8)
        for theta in (0.4, 1.0, 1.7, 2.3, 2.9):
            route = RieszKernelRoute(p, 1, theta)
            table = trig_poly_table(p, 8, route.rule.nodes)
            for n in range(1, 7):
                got = route.apply(table[n])
                a_n = abs(n + 0.5 * p.lam)
                ref = a_n ** (-1.0) * trig_poly_deriv(basis, n, theta, 1)
                assert_allclose(got, ref, rtol=1e-5)


class TestSquareFunction:
    def test_order_10_oracle(self):
        got = square_fn_kernel_norm(CHEB, 1, 0, 1.0, 2.5)
        ref, _ = integrate.quad(lambda t: _cheb_dt(t, 1.0, 2.5) ** 2 * t, 0, 80, limit=300)
        assert_allclose(got, math.sqrt(ref), rtol=1e-6)

    def test_order_01_positive_finite(self):
        p = JacobiParams(-0.75, 0.5)
        val = square_fn_kernel_norm(p, 0, 1, 1.0, 2.0)
        assert 0 < val < 1e3

    def test_order_validation(self):
        with pytest.raises(ValueError):
            SquareFunctionKernel(CHEB, 0, 0)
        with pytest.raises(ValueError):
            SquareFunctionKernel(CHEB, 2, 1)


class TestLaplace:
    def test_constant_profile_telescopes(self):
        # -int d_t H dt = H(0+) - H(inf); off-diagonal the first term is 0
        # and for zero spectral shift the second is 1/mu_total
        lk = LaplaceKernel(CHEB, constant_profile())
        assert_allclose(lk._value(1.0, 2.0), -1.0 / mu_total(CHEB), rtol=5e-9)

    def test_constant_profile_positive_shift(self):
        # both limits vanish off-diagonal, so the kernel is tiny
        p = JacobiParams(0.5, 0.5)
        lk = LaplaceKernel(p, constant_profile())
        assert abs(lk._value(1.0, 2.0)) < 1e-6

    def test_imaginary_profile_complex_value(self):
        p = JacobiParams(0.5, -0.75)
        lk = LaplaceKernel(p, imaginary_power_profile(0.5))
        val = lk._value(1.0, 2.2)
        assert isinstance(val, complex)
        assert math.isfinite(abs(val))

    def test_tiny_spectral_gap_tail_error(self):
        with pytest.raises(TailError):
            LaplaceKernel(JacobiParams(-0.5, -0.5 + 1e-5), constant_profile())


class TestStieltjes:
    def test_single_atom(self):
        got = stieltjes_multiplier_kernel(CHEB, StieltjesAtoms((0.9,), (1.0,)), 0.7, 2.1)
        assert_allclose(got, closed_form_chebyshev(0.9, 0.7, 2.1), rtol=1e-10)

    def test_difference_of_atoms(self):
        got = stieltjes_multiplier_kernel(CHEB, StieltjesAtoms((1.0, 2.0), (1.0, -1.0)), 0.7, 2.1)
        ref = closed_form_chebyshev(1.0, 0.7, 2.1) - closed_form_chebyshev(2.0, 0.7, 2.1)
        assert_allclose(got, ref, rtol=1e-10)

    def test_mass_identity_per_atom(self):
        p = JacobiParams(0.5, -0.75)
        atoms = StieltjesAtoms((1.0, 2.0, 3.0), (1.0, 1.0, 1.0))
        rule = theta_quad_rule(p, 256)
        theta = 1.1
        kernel = StieltjesKernel(p, atoms)
        vals = np.array([kernel._value(theta, float(ph)) for ph in rule.nodes])
        mass = float(np.sum(rule.weights * vals))
        ref = sum(math.exp(-j * abs(p.lam) / 2) for j in (1.0, 2.0, 3.0))
        assert_allclose(mass, ref, atol=1e-8)

    def test_atom_validation(self):
        with pytest.raises(ValueError):
            StieltjesAtoms((), ())
        with pytest.raises(ValueError):
            StieltjesAtoms((-1.0,), (1.0,))


class TestChecks:
    def test_growth_rows_and_full_ball(self):
        p = JacobiParams(0.5, -0.75)
        report = growth_check(p, "stieltjes", [0.0, 1.0], [math.pi, 2.0],
                              options={"atoms": StieltjesAtoms((5.0,), (1.0,))})
        assert report.passed
        row = next(r for r in report.rows if r[0] == 0.0 and r[1] == math.pi)
        assert_allclose(row[3], 1.0 / mu_total(p), rtol=1e-10)  # full-ball bound

    def test_laplace_const_coarse_grid(self):
        # degenerate identity-multiplier profile: finite (noise-level) ratios
        grid = np.linspace(0.3, math.pi - 0.3, 5)
        report = growth_check(CHEB, "laplace", grid, grid)
        assert report.passed
        assert all(math.isfinite(r) for r in report.ratios)

    def test_gradient_check_riesz_chebyshev(self):
        grid = np.linspace(0.4, math.pi - 0.4, 4)
        report = gradient_check(CHEB, "riesz", grid, grid, options={"N": 1})
        assert report.passed
        assert report.meta["stabilized"] in (True, None)

    def test_gradient_report_symmetric_scan_layout(self):
        # scan rows come in both orders of each pair
        grid = np.array([0.5, 1.5, 2.5])
        report = growth_check(JacobiParams(0.0, 0.0), "maximal", grid, grid)
        pairs = {(r[0], r[1]) for r in report.rows}
        assert (0.5, 1.5) in pairs and (1.5, 0.5) in pairs

    def test_smoothness_sampling(self):
        report = smoothness_check(JacobiParams(0.5, 0.5), "riesz", n_samples=20,
                                  options={"N": 1})
        assert len(report.rows) == 20
        assert report.passed

    def test_make_kernel_registry(self):
        p = JacobiParams(0.0, 0.0)
        assert isinstance(make_kernel(p, "maximal"), MaximalKernel)
        assert isinstance(make_kernel(p, "riesz", N=2), RieszKernel)
        assert isinstance(make_kernel(p, "gfun", M=0, N=1), SquareFunctionKernel)
        assert isinstance(make_kernel(p, "laplace"), LaplaceKernel)
        assert isinstance(make_kernel(p, "stieltjes"), StieltjesKernel)
        with pytest.raises(ValueError):
            make_kernel(p, "bogus")
