"""Fourier data: polynomials, convolution powers, symbols of exp(t f), localization."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from compact_clt.exact import GaussianRational
from compact_clt.fourier import (
    FourierPoly,
    LocalTestFunction,
    convolve_power,
    exp_symbol_coeffs,
    localize,
    make_poly,
    min_band,
    poly_from_json,
    tail_bound,
    variance_limit_local,
)

COS = make_poly([(1, 1), (-1, 1)])


def bessel_series(m, t, terms=40):
    """I_m(2t) = sum_j t^(m+2j) / (j! (m+j)!)."""
    m = abs(m)
    return sum(t ** (m + 2 * j) / (math.factorial(j) * math.factorial(m + j)) for j in range(terms))


def binomial_power_oracle(a):
    """Coefficients of (2 cos x)^a = (z + 1/z)^a."""
    return {2 * j - a: math.comb(a, j) for j in range(a + 1)}


def rational_polys():
    coef = st.fractions(min_value=-3, max_value=3, max_denominator=5)
    return st.lists(st.tuples(st.integers(0, 3), coef), min_size=1, max_size=3).map(
        lambda rows: FourierPoly({k: v for kk, v in rows for k in (kk, -kk)}))


class TestFourierPoly:
    def test_cosine_pair(self):
        assert COS.degree == 1 and COS.real_valued and COS.even
        assert COS(0.0) == pytest.approx(2.0)

    def test_constant(self):
        c = make_poly([(0, Fraction(3, 2))])
        assert c.degree == 0 and c.exact

    def test_sine_pair(self):
        s = make_poly([(2, 1j), (-2, -1j)])
        assert s.real_valued and not s.even
        x = np.linspace(-3, 3, 11)
        assert np.allclose(s(x), -2 * np.sin(2 * x))

    def test_duplicate_rejected(self):
        with pytest.raises(ValueError):
            make_poly([(1, 1), (1, 2)])

    def test_json_roundtrip(self):
        f = poly_from_json([[1, "1/2", 0], [-1, "1/2", 0], [2, 0, 1], [-2, 0, -1]])
        assert f.exact and f.real_valued and not f.even
        assert f.coeff(2) == GaussianRational(0, 1)
        assert poly_from_json(f.to_json()) == f
        g = poly_from_json([[1, 0.5, 0], [-1, 0.5, 0]])
        assert not g.exact and g.even
        with pytest.raises(ValueError):
            poly_from_json([[1, 0]])


class TestConvolvePower:
    @pytest.mark.parametrize("a", [0, 1, 2, 3, 5])
    def test_binomial_oracle(self, a):
        assert dict(convolve_power(COS, a).coeffs) == binomial_power_oracle(a)

    def test_square_example(self):
        assert dict(convolve_power(COS, 2).coeffs) == {-2: 1, 0: 2, 2: 1}

    def test_float_path_matches_exact(self):
        f = make_poly([(1, 1.0), (-1, 1.0), (2, 0.5), (-2, 0.5)])
        fe = make_poly([(1, 1), (-1, 1), (2, Fraction(1, 2)), (-2, Fraction(1, 2))])
        p, q = convolve_power(f, 4), convolve_power(fe, 4)
        assert p.real_valued and p.even
        assert all(abs(complex(p.coeff(k)) - float(q.coeff(k))) < 1e-12 for k in range(-8, 9))

    @settings(max_examples=25, deadline=None)
    @given(rational_polys(), st.integers(0, 3), st.integers(0, 3))
    def test_power_law(self, f, a, b):
        assert convolve_power(f, a + b) == convolve_power(f, a) * convolve_power(f, b)

    def test_negative_power(self):
        with pytest.raises(ValueError):
            convolve_power(COS, -1)


class TestExpSymbol:
    @pytest.mark.parametrize("t", [0.1, 0.5, 1.3, -0.7])
    def test_bessel_oracle(self, t):
        c = exp_symbol_coeffs(COS, t, 6)
        expected = [bessel_series(m, t) for m in range(-6, 7)]
        assert np.allclose(c, expected, rtol=1e-13, atol=1e-15)

    def test_mp_path(self):
        import mpmath as mp

        c = exp_symbol_coeffs(COS, 0.5, 3, dps=40)
        with mp.workdps(40):
            for m in range(-3, 4):
                assert abs(c[m + 3] - mp.besseli(abs(m), 1)) < mp.mpf(10) ** -35

    def test_t_zero(self):
        c = exp_symbol_coeffs(COS, 0.0, 4)
        assert list(c) == [0, 0, 0, 0, 1, 0, 0, 0, 0]

    def test_band_convergence(self):
        f = make_poly([(1, 1), (-1, 1), (2, 0.5), (-2, 0.5)])
        a, b = exp_symbol_coeffs(f, 0.8, 10), exp_symbol_coeffs(f, 0.8, 18)
        assert np.allclose(a, b[8:-8], rtol=1e-12, atol=1e-300)

    def test_hermitian_bit_exact(self):
        f = make_poly([(1, 0.3 + 0.4j), (-1, 0.3 - 0.4j), (3, 0.1j), (-3, -0.1j)])
        c = exp_symbol_coeffs(f, 0.9, 7)
        assert np.array_equal(c, np.conj(c[::-1]))

    def test_requires_real_symbol(self):
        with pytest.raises(ValueError):
            exp_symbol_coeffs(make_poly([(1, 1)]), 0.1, 2)


def circle_coeff_quadrature(g, L, k):
    """(1/2pi) int_R g(L x) cos(k x) dx for an even real g, by adaptive quadrature."""
    if k == 0:
        # period-sized chunks up to X; the dropped tail is below 4 / (sqrt(2 pi) L^2 X)
        X = 2000.0
        edges = np.arange(0.0, X + 1e-9, math.pi / L)
        val = sum(integrate.quad(lambda x: g.g(L * x), a, b)[0] for a, b in zip(edges[:-1], edges[1:]))
        tail = 0.0 if g.family == "gauss" else 4 / (math.sqrt(2 * math.pi) * L**2 * X)
        return val / math.pi, tail / math.pi + 1e-10
    val, _ = integrate.quad(lambda x: g.g(L * x), 0, np.inf, weight="cos", wvar=k, limlst=200)
    return val / math.pi, 1e-10


class TestLocalTestFunction:
    @pytest.mark.parametrize("g", [LocalTestFunction("triangle"), LocalTestFunction("gauss", {"sigma": 0.7}),
                                   LocalTestFunction("table", {"t": [-2, -1, 0, 1, 2], "ghat": [0, 1, 1.5, 1, 0]})])
    def test_inverse_transform(self, g):
        # g(x) = (1/sqrt(2pi)) int g_hat(t) e^{ixt} dt, g_hat even
        T = g.support or 12.0
        for x in (0.0, 0.37, 2.5):
            val, _ = integrate.quad(lambda t: g.ghat(t) * math.cos(x * t), -T, T, limit=200, points=[0.0])
            assert g.g(x) == pytest.approx(val / math.sqrt(2 * math.pi), abs=1e-10)

    def test_sinc2_forward_transform(self):
        g = LocalTestFunction("sinc2", {"width": 1.5})
        for t in (0.0, 0.8, 3.1):
            val, _ = integrate.quad(lambda x: g.g(x) * math.cos(x * t), -1.5, 1.5, points=[0.0])
            assert g.ghat(t) == pytest.approx(val / math.sqrt(2 * math.pi), abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            LocalTestFunction("triangle", {"width": 0})
        with pytest.raises(ValueError):
            LocalTestFunction("table", {"t": [0, 1], "ghat": [1, 0]})
        with pytest.raises(ValueError):
            LocalTestFunction("lorentz")

    def test_periodized_matches_image_sum(self):
        g = LocalTestFunction("triangle")
        L, th0 = 3.0, 0.4
        x = np.linspace(-math.pi, math.pi, 9)
        M = 400
        images = sum(g.g(L * (x - th0 + 2 * math.pi * m)) for m in range(-M, M + 1))
        # g(x) <= 4 / (sqrt(2 pi) x^2) and the dropped images sit at |x| >= L (2 pi m - pi)
        tail = 2 * 4 / math.sqrt(2 * math.pi) / L**2 / (2 * math.pi) ** 2 / (M - 0.5)
        diff = g.periodized(x, L, th0) - images
        assert np.all(diff >= -1e-14) and np.all(diff <= tail)


class TestLocalize:
    def test_triangle_against_quadrature(self):
        g = LocalTestFunction("triangle")
        c = localize(g, 4.0, 0.0, 6)
        assert c.real_valued and c.even
        assert min_band(g, 4.0) == 3
        assert all(c.coeff(k) == 0 for k in (4, 5, 6))
        for k in range(0, 4):
            ref, tol = circle_coeff_quadrature(g, 4.0, k)
            assert abs(complex(c.coeff(k)).real - ref) <= tol

    def test_gauss_against_quadrature(self):
        g = LocalTestFunction("gauss", {"sigma": 1.0})
        c = localize(g, 2.0, 0.0, min_band(g, 2.0))
        for k in range(0, 5):
            ref, tol = circle_coeff_quadrature(g, 2.0, k)
            assert abs(complex(c.coeff(k)).real - ref) <= tol

    def test_shift_phase(self):
        g = LocalTestFunction("triangle")
        c0, c1 = localize(g, 4.0, 0.0, 3), localize(g, 4.0, 1.1, 3)
        for k in range(-3, 4):
            assert complex(c1.coeff(k)) == pytest.approx(complex(c0.coeff(k)) * np.exp(-1.1j * k), abs=1e-15)

    def test_synthesis_matches_periodization(self):
        g = LocalTestFunction("gauss", {"sigma": 0.5})
        c = localize(g, 1.5, 0.3, min_band(g, 1.5) + 4)
        x = np.linspace(-3, 3, 13)
        assert np.allclose(c(x), g.periodized(x, 1.5, 0.3), atol=1e-12)

    def test_zero_table(self):
        g = LocalTestFunction("table", {"t": [-1, 1], "ghat": [0, 0]})
        assert localize(g, 2.0, 0.0, 3).is_zero

    def test_band_too_small(self):
        with pytest.raises(ValueError):
            localize(LocalTestFunction("triangle"), 8.0, 0.0, 3)

    def test_tail_bound(self):
        g = LocalTestFunction("sinc2")
        L, band = 2.0, 40
        ks = np.arange(band + 1, 200000)
        tail = 2 * np.sum(np.abs(g.circle_coeff(ks, L)))
        assert tail <= tail_bound(g, L, band)
        assert tail_bound(LocalTestFunction("triangle"), 2.0, 1) == 0.0


class TestVarianceLimit:
    @pytest.mark.parametrize("w", [1.0, 2.5])
    def test_triangle(self, w):
        assert variance_limit_local(LocalTestFunction("triangle", {"width": w})) == pytest.approx(
            w * w / (12 * math.pi), rel=1e-10)

    def test_gauss(self):
        assert variance_limit_local(LocalTestFunction("gauss", {"sigma": 0.8})) == pytest.approx(
            1 / (2 * math.pi * 0.64), rel=1e-10)

    def test_sinc2(self):
        assert variance_limit_local(LocalTestFunction("sinc2", {"width": 2.0})) == pytest.approx(
            4 * math.log(2) / (math.pi * 4.0), rel=1e-6)

    def test_indicator(self):
        eps = 1e-9
        g = LocalTestFunction("table", {"t": [-1 - eps, -1, 1, 1 + eps], "ghat": [0, 1, 1, 0]})
        assert variance_limit_local(g) == pytest.approx(1 / (2 * math.pi), rel=1e-8)

    def test_zero(self):
        assert variance_limit_local(LocalTestFunction("table", {"t": [-1, 1], "ghat": [0, 0]})) == 0.0
