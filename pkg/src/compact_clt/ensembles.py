"""The four classical compact groups as determinantal projection processes.

Each ensemble's eigenvalue angles form a projection DPP with an explicit
orthonormal basis on the ensemble domain:

==============  ==========  =====================================  =============
ensemble        domain      basis (j = 0..n-1 unless stated)       kernel
==============  ==========  =====================================  =============
U(n)            [-pi, pi)   exp(i j x) / sqrt(2 pi)                 Q_n
SO(2n)          [0, pi]     1/sqrt(pi), sqrt(2/pi) cos(j x), j>=1   K+_{2n-1}
SO(2n+1)        [0, pi]     sqrt(2/pi) sin((j + 1/2) x)             K-_{2n}
Sp(n)           [0, pi]     sqrt(2/pi) sin(j x), j = 1..n           K-_{2n+1}
==============  ==========  =====================================  =============
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .fourier import FourierPoly

__all__ = [
    "Ensemble",
    "ProjectionBasis",
    "kernel_matrix",
    "kernel_matrix_quadrature",
    "rational_trace_form",
    "dirichlet_kernel",
    "weyl_density",
    "KINDS",
]

KINDS = ("u", "so-even", "so-odd", "sp")
_ALIASES = {
    "u": "u", "unitary": "u", "cue": "u",
    "so-even": "so-even", "so_even": "so-even", "soeven": "so-even",
    "so-odd": "so-odd", "so_odd": "so-odd", "soodd": "so-odd",
    "sp": "sp", "symplectic": "sp",
}


@dataclass(frozen=True)
class Ensemble:
    """One of U(n), SO(2n), SO(2n+1), Sp(n); ``n`` is the number of free angles."""

    kind: str
    n: int

    def __post_init__(self):
        kind = _ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise ValueError(f"unknown ensemble {self.kind!r}; expected one of {KINDS}")
        if int(self.n) < 1:
            raise ValueError("rank n must be >= 1")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "n", int(self.n))

    @property
    def unitary(self) -> bool:
        return self.kind == "u"

    @property
    def rank(self) -> int:
        return self.n

    @property
    def domain(self) -> tuple[float, float]:
        return (-math.pi, math.pi) if self.unitary else (0.0, math.pi)

    @property
    def label(self) -> str:
        return {
            "u": f"U({self.n})",
            "so-even": f"SO({2 * self.n})",
            "so-odd": f"SO({2 * self.n + 1})",
            "sp": f"Sp({self.n})",
        }[self.kind]

    def with_n(self, n: int) -> "Ensemble":
        return Ensemble(self.kind, n)

    @cached_property
    def basis(self) -> "ProjectionBasis":
        return ProjectionBasis(self)

    def __str__(self):
        return self.label


class ProjectionBasis:
    """Orthonormal functions spanning the ensemble's projection kernel."""

    def __init__(self, ensemble: Ensemble):
        self.ensemble = ensemble
        n = ensemble.n
        kind = ensemble.kind
        if kind == "u":
            self.freqs = np.arange(n, dtype=float)
        elif kind == "so-even":
            self.freqs = np.arange(n, dtype=float)
        elif kind == "so-odd":
            self.freqs = np.arange(n, dtype=float) + 0.5
        else:
            self.freqs = np.arange(1, n + 1, dtype=float)

    @property
    def n(self) -> int:
        return self.ensemble.n

    def evaluate(self, x) -> np.ndarray:
        """Matrix ``Phi[i, j] = phi_j(x_i)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        arg = np.multiply.outer(x, self.freqs)
        kind = self.ensemble.kind
        if kind == "u":
            return np.exp(1j * arg) / math.sqrt(2.0 * math.pi)
        if kind == "so-even":
            out = math.sqrt(2.0 / math.pi) * np.cos(arg)
            out[:, 0] = 1.0 / math.sqrt(math.pi)
            return out
        return math.sqrt(2.0 / math.pi) * np.sin(arg)

    def kernel(self, x, y) -> np.ndarray:
        """``K(x_i, y_j) = sum phi_k(x_i) conj(phi_k(y_j))``."""
        return self.evaluate(x) @ self.evaluate(y).conj().T

    def diag(self, x) -> np.ndarray:
        """One-point function ``K(x, x)`` in closed form."""
        x = np.asarray(x, dtype=float)
        n = self.n
        kind = self.ensemble.kind
        if kind == "u":
            return np.full(x.shape, n / (2.0 * math.pi))
        j = np.arange(1, n)
        if kind == "so-even":
            # (1/pi) (1 + 2 sum_{j=1}^{n-1} cos^2 jx) = (1/pi)(n + sum cos 2jx)
            return (n + np.cos(np.multiply.outer(x, 2 * j)).sum(axis=-1)) / math.pi
        a = self.freqs
        return (n - np.cos(np.multiply.outer(x, 2 * a)).sum(axis=-1)) / math.pi

    def diag_integral(self, a, b) -> np.ndarray:
        """``int_a^b K(x, x) dx`` in closed form (expected counts per bin)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        n = self.n
        kind = self.ensemble.kind
        if kind == "u":
            return (b - a) * n / (2.0 * math.pi)

        def prim(x):
            if kind == "so-even":
                j = np.arange(1, n)
                s = (np.sin(np.multiply.outer(x, 2 * j)) / (2 * j)).sum(axis=-1)
                return (n * x + s) / math.pi
            fr = self.freqs
            s = (np.sin(np.multiply.outer(x, 2 * fr)) / (2 * fr)).sum(axis=-1)
            return (n * x - s) / math.pi

        return prim(b) - prim(a)


def dirichlet_kernel(m: int, x) -> np.ndarray:
    """``K_m(x) = sin(m x / 2) / (2 pi sin(x / 2))`` with the removable point filled in."""
    x = np.asarray(x, dtype=float)
    s = np.sin(0.5 * x)
    small = np.abs(s) < 1e-12
    safe = np.where(small, 1.0, s)
    # limit at x = 2 pi q is m (-1)^{q (m-1)} / (2 pi)
    q = np.round(x / (2.0 * math.pi))
    lim = m * np.where((q * (m - 1)) % 2 == 0, 1.0, -1.0)
    return np.where(small, lim, np.sin(0.5 * m * x) / safe) / (2.0 * math.pi)


def closed_form_kernel(ensemble: Ensemble, x, y) -> np.ndarray:
    """Closed Dirichlet-type kernel for each ensemble (outer product in x, y)."""
    x = np.asarray(x, dtype=float)[:, None]
    y = np.asarray(y, dtype=float)[None, :]
    n = ensemble.n
    if ensemble.kind == "u":
        # Q_n(x, y) = exp(i (n-1)(x-y)/2) K_n(x - y)
        return np.exp(0.5j * (n - 1) * (x - y)) * dirichlet_kernel(n, x - y)
    if ensemble.kind == "so-even":
        return dirichlet_kernel(2 * n - 1, x - y) + dirichlet_kernel(2 * n - 1, x + y)
    if ensemble.kind == "so-odd":
        return dirichlet_kernel(2 * n, x - y) - dirichlet_kernel(2 * n, x + y)
    return dirichlet_kernel(2 * n + 1, x - y) - dirichlet_kernel(2 * n + 1, x + y)


def _check_symbol(ensemble: Ensemble, h: FourierPoly) -> None:
    if not h.real_valued:
        raise ValueError("kernel_matrix requires a real-valued h")
    if not ensemble.unitary and not h.even:
        raise ValueError(f"{ensemble.label} requires an even h")


def kernel_matrix(ensemble: Ensemble, h: FourierPoly, exact: bool | None = None) -> np.ndarray:
    """``M[j, k] = int phi_j h conj(phi_k)`` over the ensemble domain, closed form.

    Unitary ``h_hat(k - j)``; Sp(n) ``h_hat(j - k) - h_hat(j + k)`` (1-based
    sine labels); SO(2n+1) ``h_hat(j - k) - h_hat(j + k + 1)``; SO(2n)
    ``h_hat(j - k) + h_hat(j + k)`` with row/column 0 scaled by ``sqrt 2``
    (diagonal entry ``h_hat(0)``).

    ``exact=None`` returns an object array of Fractions when ``h`` is exact and
    no irrational normalization is involved (every ensemble except SO(2n)).
    """
    _check_symbol(ensemble, h)
    n = ensemble.n
    use_exact = h.exact if exact is None else exact
    if use_exact and ensemble.kind == "so-even":
        raise ValueError("SO(2n) kernel matrix has sqrt(2) entries; use rational_trace_form")
    if use_exact and not h.exact:
        raise ValueError("exact matrix requested for an inexact h")
    return _closed_form(ensemble, h, use_exact)


def rational_trace_form(ensemble: Ensemble, h: FourierPoly, exact: bool | None = None) -> np.ndarray:
    """A diagonal similarity transform of :func:`kernel_matrix` with rational entries.

    For SO(2n) row 0 is multiplied by sqrt 2 and column 0 divided by it, so
    ``M'[0, k] = 2 h_hat(k)`` and ``M'[k, 0] = h_hat(k)``.  Traces of products
    are unchanged; other ensembles return the kernel matrix itself.
    """
    _check_symbol(ensemble, h)
    use_exact = h.exact if exact is None else exact
    if ensemble.kind != "so-even":
        return _closed_form(ensemble, h, use_exact)
    n = ensemble.n
    hh = _coeff_getter(h, use_exact)
    M = _empty(n, use_exact)
    for j in range(n):
        for k in range(n):
            if j == 0 and k == 0:
                M[j, k] = hh(0)
            elif j == 0:
                M[j, k] = 2 * hh(k)
            elif k == 0:
                M[j, k] = hh(j)
            else:
                M[j, k] = hh(j - k) + hh(j + k)
    return M


def _coeff_getter(h: FourierPoly, exact: bool):
    if exact:
        return lambda k: h.coeff(k)
    if h.real_valued and h.even:
        return lambda k: complex(h.coeff(k)).real
    return lambda k: complex(h.coeff(k))


def _empty(n: int, exact: bool, dtype=float):
    if exact:
        return np.full((n, n), Fraction(0), dtype=object)
    return np.zeros((n, n), dtype=dtype)


def _closed_form(ensemble: Ensemble, h: FourierPoly, exact: bool) -> np.ndarray:
    n = ensemble.n
    kind = ensemble.kind
    hh = _coeff_getter(h, exact)
    if kind == "u":
        if exact:
            M = _empty(n, True)
            for j in range(n):
                for k in range(n):
                    M[j, k] = h.coeff(k - j)
            return M
        arr = h.to_array(max(h.degree, n))
        band = max(h.degree, n)
        j = np.arange(n)
        M = arr[(j[None, :] - j[:, None]) + band]
        return M.real.copy() if h.even else M
    M = _empty(n, exact)
    for j in range(n):
        for k in range(n):
            if kind == "sp":
                M[j, k] = hh((j + 1) - (k + 1)) - hh((j + 1) + (k + 1))
            elif kind == "so-odd":
                M[j, k] = hh(j - k) - hh(j + k + 1)
            elif j == 0 and k == 0:
                M[j, k] = hh(0)
            elif j == 0 or k == 0:
                M[j, k] = math.sqrt(2.0) * hh(j + k)
            else:
                M[j, k] = hh(j - k) + hh(j + k)
    return M


def kernel_matrix_quadrature(ensemble: Ensemble, h, degree: int, points: int | None = None) -> np.ndarray:
    """Kernel matrix by equispaced quadrature of ``phi_j h conj(phi_k)``.

    ``h`` is any callable on angles; ``degree`` bounds its frequency content so
    the rule is exact (or spectrally accurate for entire symbols when
    ``points`` is chosen larger).
    """
    n = ensemble.n
    npts = points or 4 * (2 * n + degree + 2)
    x = -math.pi + 2.0 * math.pi * np.arange(npts) / npts
    Phi = ensemble.basis.evaluate(x)
    w = np.asarray(h(x))
    if ensemble.unitary:
        M = (Phi * w[:, None]).T @ Phi.conj() * (2.0 * math.pi / npts)
    else:
        # integrand is even and 2pi-periodic: int_0^pi = 1/2 int_{-pi}^{pi}
        M = (Phi * w[:, None]).T @ Phi.conj() * (math.pi / npts)
    if np.isrealobj(w) and not ensemble.unitary:
        return M.real
    return M


def weyl_density(ensemble: Ensemble, thetas) -> np.ndarray:
    """Explicit joint density of the unordered angles (last axis = angle index).

    Normalized so that it integrates to 1 over ``domain^n``:
    U(n): ``prod |e^{i a} - e^{i b}|^2 / ((2 pi)^n n!)``;
    SO(2n): ``2 prod (2cos a - 2cos b)^2 / ((2 pi)^n n!)``;
    SO(2n+1): ``(2/pi)^n prod sin^2(t/2) prod (2cos a - 2cos b)^2 / n!``;
    Sp(n): ``(2/pi)^n prod sin^2 t prod (2cos a - 2cos b)^2 / n!``.
    """
    th = np.asarray(thetas, dtype=float)
    n = th.shape[-1]
    if n != ensemble.n:
        raise ValueError("last axis must hold n angles")
    vand = np.ones(th.shape[:-1])
    for a in range(n):
        for b in range(a + 1, n):
            if ensemble.unitary:
                vand = vand * np.abs(np.exp(1j * th[..., a]) - np.exp(1j * th[..., b])) ** 2
            else:
                vand = vand * (2.0 * np.cos(th[..., a]) - 2.0 * np.cos(th[..., b])) ** 2
    nf = math.factorial(n)
    if ensemble.kind == "u":
        return vand / ((2.0 * math.pi) ** n * nf)
    if ensemble.kind == "so-even":
        return 2.0 * vand / ((2.0 * math.pi) ** n * nf)
    if ensemble.kind == "so-odd":
        w = np.prod(np.sin(0.5 * th) ** 2, axis=-1)
    else:
        w = np.prod(np.sin(th) ** 2, axis=-1)
    return (2.0 / math.pi) ** n * w * vand / nf
