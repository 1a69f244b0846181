"""Finite-n and limiting cumulants against moment-based and closed-form oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest

from compact_clt.combinatorics import ResourceError
from compact_clt.cumulants import (
    Caps,
    CumulantReport,
    cumulant_direct_unitary,
    cumulant_trace,
    limit_cumulant,
    limit_shift,
    local_cumulant,
    localized_symbol,
)
from compact_clt.ensembles import KINDS, Ensemble, weyl_density
from compact_clt.fourier import LocalTestFunction, make_poly, variance_limit_local

COS = make_poly([(1, 1), (-1, 1)])
F2 = make_poly([(1, 1), (-1, 1), (2, Fraction(1, 2)), (-2, Fraction(1, 2))])
COS2 = make_poly([(2, 1), (-2, 1)])
ZERO = make_poly([])


def moment_cumulants(ens, f, pts=64):
    """Cumulants 1..4 of S(f) from moments against the Weyl density (n = 2 grid, exact rule)."""
    lo, hi = ens.domain
    if ens.unitary:
        x = lo + (hi - lo) * np.arange(pts) / pts
        w = np.full(pts, (hi - lo) / pts)
    else:
        x = np.linspace(lo, hi, pts + 1)
        w = np.full(pts + 1, (hi - lo) / pts)
        w[[0, -1]] *= 0.5
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = weyl_density(ens, np.stack([X, Y], axis=-1)) * np.outer(w, w)
    S = np.real(f(X)) + np.real(f(Y))
    m = [float(np.sum(W * S**p)) for p in range(1, 5)]
    k1 = m[0]
    k2 = m[1] - m[0] ** 2
    k3 = m[2] - 3 * m[1] * m[0] + 2 * m[0] ** 3
    k4 = m[3] - 4 * m[2] * m[0] - 3 * m[1] ** 2 + 12 * m[1] * m[0] ** 2 - 6 * m[0] ** 4
    return k1, k2, k3, k4


class TestDirectPath:
    def test_mean(self):
        f = make_poly([(0, Fraction(3, 4)), (1, 1), (-1, 1)])
        for n in (1, 3, 7):
            assert cumulant_direct_unitary(f, n, 1) == Fraction(3, 4) * n

    @pytest.mark.parametrize("n", [2, 3, 5, 9])
    def test_cosine_values(self, n):
        assert cumulant_direct_unitary(COS, n, 2) == 2
        if n >= 3:
            assert cumulant_direct_unitary(COS, n, 3) == 0
        if n >= 4:
            assert cumulant_direct_unitary(COS, n, 4) == 0

    def test_small_n_is_not_gaussian(self):
        # U(1): S = 2 cos theta, fourth cumulant 6 - 3*2^2 = -6
        assert cumulant_direct_unitary(COS, 1, 4) == -6

    def test_caps(self):
        with pytest.raises(ResourceError):
            cumulant_direct_unitary(COS, 4, 5)
        with pytest.raises(ResourceError):
            cumulant_direct_unitary(make_poly([(9, 1), (-9, 1)]), 4, 2)
        with pytest.raises(ResourceError):
            cumulant_direct_unitary(make_poly([(8, 1), (-8, 1)]), 4, 4, caps=Caps(max_direct_span=16))


class TestTracePath:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    @pytest.mark.parametrize("ell", [1, 2, 3, 4])
    def test_equals_direct_exactly(self, n, ell):
        for f in (COS, F2, make_poly([(1, Fraction(1, 3)), (-1, Fraction(1, 3)), (3, 1), (-3, 1)])):
            assert cumulant_trace("u", f, n, ell) == cumulant_direct_unitary(f, n, ell)

    def test_complex_coefficients(self):
        f = make_poly([(1, 1 + 2j), (-1, 1 - 2j), (2, 0.5j), (-2, -0.5j)])
        for ell in (2, 3, 4):
            assert cumulant_trace("u", f, 5, ell) == pytest.approx(cumulant_direct_unitary(f, 5, ell), abs=1e-9)

    @pytest.mark.parametrize("kind", KINDS)
    def test_matches_weyl_moments(self, kind):
        ens = Ensemble(kind, 2)
        ref = moment_cumulants(ens, F2)
        for ell in range(1, 5):
            assert float(cumulant_trace(ens, F2, None, ell)) == pytest.approx(ref[ell - 1], abs=1e-10)

    @pytest.mark.parametrize("kind", ["so-even", "so-odd", "sp"])
    def test_higher_cumulants_vanish_in_band(self, kind):
        for ell in (3, 4):
            assert cumulant_trace(kind, F2, 2 * ell, ell) == 0

    def test_exact_and_float_agree(self):
        for kind in KINDS:
            for ell in (1, 2, 3, 4):
                e = cumulant_trace(kind, F2, 3, ell)
                assert isinstance(e, Fraction)
                assert cumulant_trace(kind, F2, 3, ell, exact=False) == pytest.approx(float(e), abs=1e-12)

    def test_zero_symbol(self):
        assert all(cumulant_trace(k, ZERO, 4, ell) == 0 for k in KINDS for ell in (1, 2, 3))

    def test_validation(self):
        with pytest.raises(ValueError):
            cumulant_trace("sp", make_poly([(1, 1j), (-1, -1j)]), 3, 2)
        with pytest.raises(ValueError):
            cumulant_trace("u", make_poly([(1, 1)]), 3, 2)
        with pytest.raises(ValueError):
            cumulant_trace("u", COS, None, 2)
        with pytest.raises(ResourceError):
            cumulant_trace("u", COS, 129, 2)


class TestLimits:
    def test_unitary(self):
        assert limit_cumulant("u", COS, 2) == 2
        assert limit_cumulant("u", F2, 2) == Fraction(3)
        assert limit_cumulant("u", F2, 3) == 0
        assert limit_cumulant("u", make_poly([(0, 2)]), 1, n=5) == 10
        with pytest.raises(ValueError):
            limit_cumulant("u", COS, 1)

    def test_shifts(self):
        assert limit_shift("so-even", COS) == 0
        assert limit_shift("so-even", COS2) == 1
        assert limit_shift("so-odd", COS) == -1
        assert limit_shift("sp", COS2) == -1
        assert limit_shift("sp", F2) == Fraction(-1, 2)
        assert limit_shift("so-even", F2) == Fraction(1, 2)

    @pytest.mark.parametrize("kind", ["so-even", "so-odd", "sp"])
    def test_finite_n_reaches_limit(self, kind):
        # means are exact once n exceeds the degree; variance once n >= 2 deg
        for n in (4, 9):
            assert cumulant_trace(kind, F2, n, 1) == limit_cumulant(kind, F2, 1, n=n)
            assert cumulant_trace(kind, F2, n, 2) == limit_cumulant(kind, F2, 2) == Fraction(3, 2)

    def test_variance_stabilizes(self):
        vals = [cumulant_trace("u", F2, n, 2) for n in range(1, 8)]
        assert vals[3:] == [3] * 4 and vals[0] != 3


class TestLocal:
    def test_unitary_mean(self):
        g = LocalTestFunction("triangle")
        n, L = 20, 4.0
        assert local_cumulant("u", g, L, n, 0.7, 1) == pytest.approx(n * g.integral() / (2 * math.pi * L), rel=1e-12)

    def test_unitary_variance(self):
        g = LocalTestFunction("triangle")
        assert local_cumulant("u", g, 8.0, 64, 0.0, 2) == pytest.approx(variance_limit_local(g), rel=0.1)

    def test_symmetrized_symbol(self):
        g = LocalTestFunction("triangle")
        h = localized_symbol("sp", g, 4.0, 1.0, n=8)
        x = np.linspace(0.1, 3.0, 7)
        assert h.even and h.real_valued
        assert np.allclose(h(x), g.periodized(x, 4.0, 1.0) + g.periodized(x, 4.0, -1.0), atol=1e-13)

    def test_zero_and_domain(self):
        z = LocalTestFunction("table", {"t": [-1, 1], "ghat": [0, 0]})
        assert local_cumulant("u", z, 4.0, 8, 0.0, 2) == 0.0
        with pytest.raises(ValueError):
            local_cumulant("so-even", LocalTestFunction("triangle"), 4.0, 8, 0.0, 2)


def test_report_discrepancy_and_json():
    r = CumulantReport("u", 4, 2, COS.to_json(), value_trace=Fraction(2), value_direct=2, value_mgf=2.0000001,
                       value_limit=2)
    assert r.max_abs_discrepancy == pytest.approx(1e-7)
    assert '"value_trace": 2.0' in r.to_json()
    with pytest.raises(ValueError):
        CumulantReport("u", 4, 2, None, value_trace=float("nan"))
