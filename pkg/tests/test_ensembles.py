"""Projection bases, kernels and Weyl densities of the four ensembles."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from compact_clt.ensembles import (
    KINDS,
    Ensemble,
    dirichlet_kernel,
    kernel_matrix,
    kernel_matrix_quadrature,
    closed_form_kernel,
    rational_trace_form,
    weyl_density,
)
from compact_clt.fourier import make_poly

COS = make_poly([(1, 1), (-1, 1)])
F2 = make_poly([(1, 1), (-1, 1), (2, Fraction(1, 2)), (-2, Fraction(1, 2))])


def gauss_gram(ens, nodes=200):
    """Gram matrix of the basis by Gauss-Legendre on the domain."""
    lo, hi = ens.domain
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * w
    Phi = ens.basis.evaluate(x)
    return (Phi.conj().T * w) @ Phi


class TestEnsemble:
    def test_labels_and_aliases(self):
        assert [Ensemble(k, 3).label for k in KINDS] == ["U(3)", "SO(6)", "SO(7)", "Sp(3)"]
        assert Ensemble("CUE", 2).kind == "u"
        with pytest.raises(ValueError):
            Ensemble("gue", 2)
        with pytest.raises(ValueError):
            Ensemble("u", 0)


@pytest.mark.parametrize("kind", KINDS)
class TestBasis:
    def test_orthonormal(self, kind):
        ens = Ensemble(kind, 5)
        assert np.allclose(gauss_gram(ens), np.eye(5), atol=1e-12)

    def test_kernel_matches_dirichlet_form(self, kind):
        ens = Ensemble(kind, 4)
        x = np.linspace(*ens.domain, 7)[:-1] + 0.01
        y = np.linspace(*ens.domain, 5) + 0.003
        assert np.allclose(ens.basis.kernel(x, y), closed_form_kernel(ens, x, y), atol=1e-12)

    def test_diag_closed_form(self, kind):
        ens = Ensemble(kind, 6)
        x = np.linspace(*ens.domain, 31)
        direct = np.real(np.einsum("ij,ij->i", ens.basis.evaluate(x), ens.basis.evaluate(x).conj()))
        assert np.allclose(ens.basis.diag(x), direct, atol=1e-12)

    def test_diag_integral(self, kind):
        ens = Ensemble(kind, 4)
        lo, hi = ens.domain
        a, b = lo + 0.3, lo + 1.7
        ref, _ = integrate.quad(lambda u: float(ens.basis.diag(u)), a, b)
        assert float(ens.basis.diag_integral(a, b)) == pytest.approx(ref, abs=1e-12)
        assert float(ens.basis.diag_integral(lo, hi)) == pytest.approx(4.0, abs=1e-12)

    def test_identity_symbol(self, kind):
        ens = Ensemble(kind, 4)
        one = make_poly([(0, 1)])
        M = np.asarray(rational_trace_form(ens, one), dtype=float)
        assert np.array_equal(M, np.eye(4))
        assert np.allclose(M @ M, M)
        assert np.trace(M) == 4

    def test_closed_form_matches_quadrature(self, kind):
        ens = Ensemble(kind, 5)
        h = F2 if kind != "u" else make_poly([(1, 1 + 0.5j), (-1, 1 - 0.5j), (3, 0.25), (-3, 0.25)])
        closed = kernel_matrix(ens, h, exact=False)
        quad = kernel_matrix_quadrature(ens, h, h.degree)
        assert np.allclose(closed, quad, atol=1e-13)


class TestKernelMatrix:
    def test_unitary_identity(self):
        M = kernel_matrix(Ensemble("u", 3), make_poly([(0, 1)]))
        assert (M == np.eye(3)).all()

    def test_so_even_example(self):
        M = kernel_matrix(Ensemble("so-even", 2), COS, exact=False)
        assert np.allclose(M, [[0, math.sqrt(2)], [math.sqrt(2), 0]], atol=1e-15)
        lo, hi = 0.0, math.pi
        phi = [lambda x: 1 / math.sqrt(math.pi), lambda x: math.sqrt(2 / math.pi) * math.cos(x)]
        for j, k in itertools.product(range(2), repeat=2):
            ref, _ = integrate.quad(lambda x: phi[j](x) * 2 * math.cos(x) * phi[k](x), lo, hi)
            assert M[j, k] == pytest.approx(ref, abs=1e-12)

    def test_exact_types(self):
        M = kernel_matrix(Ensemble("sp", 3), F2)
        assert M.dtype == object and isinstance(M[0, 0], Fraction)
        with pytest.raises(ValueError):
            kernel_matrix(Ensemble("so-even", 3), F2, exact=True)

    def test_parity_requirements(self):
        sine = make_poly([(1, 1j), (-1, -1j)])
        with pytest.raises(ValueError):
            kernel_matrix(Ensemble("sp", 2), sine)
        with pytest.raises(ValueError):
            kernel_matrix(Ensemble("u", 2), make_poly([(1, 1)]))
        kernel_matrix(Ensemble("u", 2), sine)

    def test_similarity_preserves_traces(self):
        ens = Ensemble("so-even", 5)
        M = kernel_matrix(ens, F2, exact=False)
        R = np.asarray(rational_trace_form(ens, F2), dtype=float)
        for p in range(1, 5):
            assert np.trace(np.linalg.matrix_power(R, p)) == pytest.approx(
                np.trace(np.linalg.matrix_power(M, p)), abs=1e-12)


class TestDirichlet:
    def test_removable_points(self):
        for m in (3, 4):
            for q in (0, 1, -2):
                x = 2 * math.pi * q
                near = dirichlet_kernel(m, x + 1e-7)
                assert float(dirichlet_kernel(m, x)) == pytest.approx(float(near), rel=1e-6)


@pytest.mark.parametrize("kind", KINDS)
def test_weyl_density_normalized(kind):
    ens = Ensemble(kind, 2)
    lo, hi = ens.domain
    pts = 128
    if ens.unitary:
        x = lo + (hi - lo) * np.arange(pts) / pts
        w = np.full(pts, (hi - lo) / pts)
    else:
        x = np.linspace(lo, hi, pts + 1)
        w = np.full(pts + 1, (hi - lo) / pts)
        w[[0, -1]] *= 0.5
    X, Y = np.meshgrid(x, x, indexing="ij")
    dens = weyl_density(ens, np.stack([X, Y], axis=-1))
    assert float(np.sum(dens * np.outer(w, w))) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_weyl_density_matches_kernel_determinant(kind):
    # for a projection process the joint density is det K(x_i, x_j) / n!
    ens = Ensemble(kind, 3)
    rng = np.random.default_rng(4)
    lo, hi = ens.domain
    for _ in range(5):
        th = rng.uniform(lo, hi, 3)
        K = ens.basis.kernel(th, th)
        assert float(weyl_density(ens, th)) == pytest.approx(float(np.real(np.linalg.det(K))) / 6, rel=1e-9)
