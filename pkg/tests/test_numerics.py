import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonkit import numerics
from photonkit.errors import DomainError, NoSignChange


class TestFindRoot:
    def test_sqrt2(self):
        f = lambda x: x * x - 2.0
        root = numerics.find_root(f, numerics.bracket_root(f, 1.0, 2.0))
        assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_odd_function(self):
        f = lambda x: x
        root = numerics.find_root(f, numerics.bracket_root(f, -1.0, 1.0))
        assert abs(root) < 1e-12

    def test_half_pi(self):
        root = numerics.find_root(math.cos,
                                  numerics.bracket_root(math.cos, 1.0, 2.0))
        assert root == pytest.approx(math.pi / 2.0, abs=1e-12)

    def test_endpoint_roots(self):
        f = lambda x: x - 1.0
        assert numerics.find_root(f, numerics.bracket_root(f, 1.0, 2.0)) == 1.0
        assert numerics.find_root(f, numerics.bracket_root(f, 0.0, 1.0)) == 1.0

    def test_no_sign_change(self):
        with pytest.raises(NoSignChange):
            numerics.bracket_root(lambda x: x * x + 1.0, -1.0, 1.0)

    def test_inverted_interval(self):
        with pytest.raises(NoSignChange):
            numerics.RootBracket(2.0, 1.0, -1.0, 1.0)

    def test_bad_tol(self):
        f = lambda x: x
        br = numerics.bracket_root(f, -1.0, 1.0)
        with pytest.raises(DomainError):
            numerics.find_root(f, br, tol=0.0)

    def test_residual_small_on_assorted_functions(self):
        cases = [
            (lambda x: math.sin(x) - 0.3, 0.0, 1.0),
            (lambda x: math.exp(x) - 5.0, 0.0, 3.0),
            (lambda x: x**5 - x - 1.0, 1.0, 2.0),
            (lambda x: math.tan(x) - x, 4.0, 4.6),
        ]
        for f, lo, hi in cases:
            root = numerics.find_root(f, numerics.bracket_root(f, lo, hi))
            assert abs(f(root)) < 1e-10


class TestQuadrature:
    def test_order_validation(self):
        with pytest.raises(DomainError):
            numerics.gauss_legendre(1)

    def test_interval_validation(self):
        with pytest.raises(DomainError):
            numerics.integrate(lambda x: x, 1.0, 1.0)

    @pytest.mark.parametrize("order", [2, 3, 5, 8, 16, 32, 64])
    def test_polynomial_exactness(self, order):
        # exact through degree 2*order - 1; analytic moments on [0, 1]
        rng = np.random.default_rng(order)
        coeffs = rng.uniform(-1.0, 1.0, size=2 * order)
        f = lambda x: np.polynomial.polynomial.polyval(x, coeffs)
        exact = sum(c / (k + 1) for k, c in enumerate(coeffs))
        got = numerics.integrate(f, 0.0, 1.0, order=order)
        assert got == pytest.approx(exact, rel=1e-12, abs=1e-13)

    def test_degree_beyond_exactness_fails(self):
        # x^4 with a 2-point rule is outside the exactness guarantee
        got = numerics.integrate(lambda x: x**4, -1.0, 1.0, order=2)
        assert abs(got - 0.4) > 1e-3

    def test_sine(self):
        got = numerics.integrate(math.sin, 0.0, math.pi, order=24)
        assert got == pytest.approx(2.0, abs=1e-13)

    def test_scalar_function_fallback(self):
        # non-vectorized callables are evaluated pointwise
        got = numerics.integrate(lambda x: float(x) ** 2, 0.0, 1.0, order=8)
        assert got == pytest.approx(1.0 / 3.0, abs=1e-14)

    def test_weights_sum_to_interval(self):
        nodes, weights = numerics.gauss_legendre(40)
        assert weights.sum() == pytest.approx(2.0, abs=1e-13)
        assert np.all(np.diff(nodes) > 0)

    @given(st.integers(min_value=2, max_value=40))
    @settings(max_examples=20, deadline=None)
    def test_exactness_property(self, order):
        deg = 2 * order - 1
        got = numerics.integrate(lambda x: x**deg, 0.0, 1.0, order=order)
        assert got == pytest.approx(1.0 / (deg + 1), rel=1e-10, abs=1e-12)


class TestLeastSquares:
    @staticmethod
    def _gaussian(p, x):
        b, a, c, s = p
        return b + a * np.exp(-0.5 * ((x - c) / s) ** 2)

    def test_exact_recovery(self):
        x = np.linspace(-3, 3, 60)
        truth = [0.2, 1.5, 0.4, 0.7]
        y = self._gaussian(truth, x)
        res = numerics.least_squares_fit(self._gaussian, x, y,
                                         [0.0, 1.0, 0.0, 1.0])
        assert res.converged
        assert res.parameters == pytest.approx(truth, abs=1e-8)
        assert res.residual_sum_squares < 1e-16

    def test_linear_model_one_step(self):
        x = np.linspace(0, 1, 10)
        y = 2.0 * x + 1.0
        model = lambda p, xx: p[0] + p[1] * xx
        res = numerics.least_squares_fit(model, x, y, [0.0, 0.0])
        assert res.parameters == pytest.approx([1.0, 2.0], abs=1e-9)

    def test_weights_validation(self):
        model = lambda p, xx: p[0] * xx
        with pytest.raises(DomainError):
            numerics.least_squares_fit(model, [1, 2], [1, 2], [1.0],
                                       weights=[1.0, 0.0])

    def test_underdetermined(self):
        model = lambda p, xx: p[0] + p[1] * xx
        with pytest.raises(DomainError):
            numerics.least_squares_fit(model, [1.0], [1.0], [0.0, 0.0])

    def test_nan_points_masked(self):
        x = np.linspace(0.5, 2.0, 20)
        y = 3.0 * x

        def model(p, xx):
            out = p[0] * np.asarray(xx, dtype=float)
            out = np.where(np.asarray(xx) > 1.9, np.nan, out)
            return out

        res = numerics.least_squares_fit(model, x, y, [1.0])
        assert res.parameters[0] == pytest.approx(3.0, abs=1e-8)

    def test_initial_point_must_be_evaluable(self):
        model = lambda p, xx: np.full(np.shape(xx), np.nan)
        with pytest.raises(DomainError):
            numerics.least_squares_fit(model, [1, 2, 3], [1, 2, 3], [1.0])

    def test_standard_errors_scale_with_noise(self):
        rng = np.random.default_rng(7)
        x = np.linspace(0, 1, 200)
        model = lambda p, xx: p[0] + p[1] * xx
        y = 1.0 + 2.0 * x + 0.01 * rng.standard_normal(x.size)
        res = numerics.least_squares_fit(model, x, y, [0.0, 0.0])
        assert 1e-4 < res.standard_errors[1] < 1e-2


class TestBessel:
    def test_wronskian_identity(self):
        # J_{v+1}(x) Y_v(x) - J_v(x) Y_{v+1}(x) = 2 / (pi x)
        rng = np.random.default_rng(42)
        for _ in range(100):
            order = rng.uniform(0.0, 59.0)
            x = rng.uniform(0.5, 80.0)
            j0, y0 = numerics.bessel_jy(order, x)
            j1, y1 = numerics.bessel_jy(order + 1.0, x)
            left = j1 * y0 - j0 * y1
            right = 2.0 / (math.pi * x)
            assert abs(left - right) / abs(right) < 1e-9

    def test_derivative_wronskian(self):
        # J_v(x) Y'_v(x) - J'_v(x) Y_v(x) = 2 / (pi x)
        for order, x in [(0.3, 1.7), (5.5, 12.0), (21.0, 27.0)]:
            j, y = numerics.bessel_jy(order, x)
            jp, yp = numerics.bessel_jy_derivatives(order, x)
            assert j * yp - jp * y == pytest.approx(2.0 / (math.pi * x),
                                                   rel=1e-11)

    @pytest.mark.parametrize("order,x", [
        (0.0, 1.0), (1.0, 2.5), (4.2, 5.0), (13.3, 14.0), (21.0, 27.0),
        (35.7, 40.0), (59.9, 61.0),
    ])
    def test_against_mpmath(self, order, x):
        j, y = numerics.bessel_jy(order, x)
        assert j == pytest.approx(float(mpmath.besselj(order, x)), rel=1e-10,
                                  abs=1e-12)
        assert y == pytest.approx(float(mpmath.bessely(order, x)), rel=1e-10,
                                  abs=1e-12)

    def test_vectorized(self):
        j, y = numerics.bessel_jy(2.5, np.array([1.0, 2.0, 3.0]))
        assert j.shape == (3,)
        assert y.shape == (3,)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            numerics.bessel_jy(1.0, 0.0)
        with pytest.raises(DomainError):
            numerics.bessel_jy(-0.5, 1.0)
        with pytest.raises(DomainError):
            numerics.bessel_jy(numerics.MAX_BESSEL_ORDER + 1.0, 1.0)
