"""Moment-generating-function oracles built from determinants.

* :func:`toeplitz_mgf`: ``det(c_{j-k}(e^{tf}))_{j,k<n}``, the unitary MGF;
* :func:`fredholm_mgf`: ``det(I + M)`` with ``M`` the projection-basis matrix
  of ``e^{tf} - 1`` computed by quadrature (any ensemble);
* :func:`weyl_quadrature_mgf`: brute-force tensor quadrature against the
  explicit joint density, ``n <= 3``.

Cumulants are read off ``log MGF`` by :func:`cumulants_from_mgf`.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import linalg

from .combinatorics import ResourceError
from .cumulants import as_ensemble
from .ensembles import Ensemble, kernel_matrix_quadrature, weyl_density
from .fourier import FourierPoly, _quadrature_points, exp_symbol_coeffs

__all__ = [
    "NumericalError",
    "MgfEvaluation",
    "MgfCumulants",
    "lu_det",
    "toeplitz_mgf",
    "fredholm_mgf",
    "weyl_quadrature_mgf",
    "cumulants_from_mgf",
    "szego_residual",
    "szego_limit",
    "mgf_sweep",
    "sweep_to_csv",
]

MAX_WEYL_N = 3
SWEEP_COLUMNS = ("ensemble", "n", "t", "method", "value", "log_value", "szego_residual")


class NumericalError(ArithmeticError):
    """Raised when a computation loses working precision."""

    def __init__(self, message: str, pivot: Optional[float] = None):
        super().__init__(message)
        self.pivot = pivot


def lu_det(A, rel_pivot_tol: float = 1e-14):
    """Determinant by LU with partial pivoting.

    Float/complex arrays go through :func:`scipy.linalg.lu_factor`; lists of
    mpmath numbers or ``mpmath.matrix`` use mpmath's own LU at the current
    precision.

    Raises
    ------
    NumericalError
        If the smallest pivot is zero or below ``rel_pivot_tol`` times the
        largest entry (float path only).  ``.pivot`` holds its magnitude.
    """
    if not isinstance(A, np.ndarray) or A.dtype == object:
        import mpmath as mp

        M = A if isinstance(A, mp.matrix) else mp.matrix(np.asarray(A, dtype=object).tolist())
        d = mp.det(M)
        if d == 0:
            raise NumericalError("matrix is singular", pivot=0.0)
        return d
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    if A.size == 0:
        return 1.0
    scale = float(np.max(np.abs(A)))
    with warnings.catch_warnings():
        # singularity is reported below with the pivot attached
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(A, check_finite=True)
    diag = np.diag(lu)
    pmin = float(np.min(np.abs(diag)))
    if pmin == 0.0 or pmin < rel_pivot_tol * scale:
        raise NumericalError(f"matrix singular to working precision (pivot {pmin:.3e})", pivot=pmin)
    sign = -1.0 if np.count_nonzero(piv != np.arange(len(piv))) % 2 else 1.0
    return sign * np.prod(diag)


def _real_det(d, what: str):
    """Real part of a determinant, checking the imaginary residue."""
    if hasattr(d, "imag") and abs(d.imag) > 1e-9 * abs(d):
        raise NumericalError(f"{what}: imaginary residue {float(abs(d.imag)):.3e}")
    return d.real if hasattr(d, "real") else d


def toeplitz_mgf(f: FourierPoly, t: float, n: int, dps: Optional[int] = None):
    """``E exp(t S_n(f))`` over U(n) as the Toeplitz determinant of ``exp(t f)``.

    With ``dps`` the symbol and the determinant are computed in mpmath and an
    ``mpf`` is returned; otherwise a float.
    """
    if not f.real_valued:
        raise ValueError("toeplitz_mgf requires a real-valued f")
    if n < 1:
        raise ValueError("n must be >= 1")
    c = exp_symbol_coeffs(f, t, n - 1, dps=dps)
    if dps is not None:
        import mpmath as mp

        with mp.workdps(dps):
            T = mp.matrix(n, n)
            for j in range(n):
                for k in range(n):
                    T[j, k] = c[j - k + n - 1]
            return _real_det(lu_det(T), "toeplitz_mgf")
    j = np.arange(n)
    T = c[(j[:, None] - j[None, :]) + n - 1]
    if f.even:
        T = T.real
    return float(_real_det(lu_det(T), "toeplitz_mgf"))


def fredholm_mgf(ensemble, f: FourierPoly, t: float, n: Optional[int] = None) -> float:
    """``det(I + M)``, ``M[j,k] = int phi_j (e^{tf} - 1) conj(phi_k)`` over the domain.

    ``M`` comes from equispaced quadrature of the projection basis, with a
    node count that resolves the entire symbol to roundoff; this route never
    touches the Fourier coefficients of ``e^{tf}``.
    """
    ens = as_ensemble(ensemble, n)
    if not f.real_valued:
        raise ValueError("fredholm_mgf requires a real-valued f")
    if not ens.unitary and not f.even:
        raise ValueError(f"{ens.label} requires an even f")
    npts = 2 * _quadrature_points(f, t, 2 * ens.n + 2)
    M = kernel_matrix_quadrature(ens, lambda x: np.expm1(t * f(x)), f.degree, points=npts)
    A = np.eye(ens.n) + M
    return float(_real_det(lu_det(A), "fredholm_mgf"))


def weyl_quadrature_mgf(ensemble, f: FourierPoly, t: float, n: Optional[int] = None,
                        points: int = 256, check_norm: bool = True) -> float:
    """``E exp(t S_n(f))`` by tensor trapezoid quadrature against the joint density.

    The integrand is smooth and periodic (for SO/Sp, even and periodic), so
    the trapezoid rule converges spectrally.  The density's normalization is
    verified on the same grid.

    Raises
    ------
    ResourceError
        For ``n > 3``.
    """
    ens = as_ensemble(ensemble, n)
    if ens.n > MAX_WEYL_N:
        raise ResourceError(f"weyl quadrature limited to n <= {MAX_WEYL_N}")
    if points < 256:
        raise ValueError("at least 256 points per axis")
    if not ens.unitary and not f.even:
        raise ValueError(f"{ens.label} requires an even f")
    if ens.unitary:
        x = -math.pi + 2.0 * math.pi * np.arange(points) / points
        w = np.full(points, 2.0 * math.pi / points)
    else:
        x = np.linspace(0.0, math.pi, points + 1)
        w = np.full(points + 1, math.pi / points)
        w[0] = w[-1] = 0.5 * math.pi / points
    fx = np.asarray(f(x), dtype=float)
    k = ens.n
    total = 0.0
    norm = 0.0
    # slice over the first angle to bound memory
    rest = np.meshgrid(*([x] * (k - 1)), indexing="ij") if k > 1 else []
    rest_w = np.ones(()) if k == 1 else np.prod(np.meshgrid(*([w] * (k - 1)), indexing="ij"), axis=0)
    rest_f = np.zeros(()) if k == 1 else np.sum(np.meshgrid(*([fx] * (k - 1)), indexing="ij"), axis=0)
    for i in range(len(x)):
        th = np.stack([np.full(rest_w.shape, x[i])] + list(rest), axis=-1)
        dens = weyl_density(ens, th) * rest_w * w[i]
        norm += float(np.sum(dens))
        total += float(np.sum(dens * np.exp(t * (fx[i] + rest_f))))
    if check_norm and abs(norm - 1.0) > 1e-10:
        raise NumericalError(f"density normalization {norm!r} differs from 1")
    return total


@dataclass
class MgfEvaluation:
    """One MGF value with its provenance."""

    ensemble: str
    f: object
    n: int
    t: float
    value: float
    method: str

    def __post_init__(self):
        if not self.value > 0:
            raise NumericalError(f"MGF value {self.value!r} is not positive")
        if self.t == 0 and abs(self.value - 1.0) > 1e-12:
            raise NumericalError(f"MGF at t=0 is {self.value!r}")

    @property
    def log_value(self) -> float:
        return math.log(self.value)


@dataclass
class MgfCumulants:
    """Cumulants from log-MGF interpolation.

    ``coarse`` and ``fine`` are the stencil estimates at steps ``h`` and
    ``h/2``; ``values`` is their Richardson extrapolation.  ``flagged`` is set
    when ``coarse`` and ``fine`` disagree beyond tolerance.
    """

    values: list
    coarse: list
    fine: list
    h: float
    flagged: bool

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)


def _stencil_cumulants(logm: Callable, ell_max: int, h: float) -> list:
    import mpmath as mp

    js = list(range(-ell_max, ell_max + 1))
    ys = [logm(j * h) for j in js]
    if any(isinstance(y, (mp.mpf, mp.mpc)) for y in ys):
        # exact interpolation at the working precision
        V = mp.matrix([[mp.mpf(j) ** p for p in range(len(js))] for j in js])
        coef = mp.lu_solve(V, mp.matrix(ys))
        return [float(coef[l] * mp.factorial(l) / mp.mpf(h) ** l) for l in range(1, ell_max + 1)]
    V = np.vander(np.array(js, dtype=float), len(js), increasing=True)
    coef = np.linalg.solve(V, np.array(ys, dtype=float))
    return [float(coef[l] * math.factorial(l) / h**l) for l in range(1, ell_max + 1)]


def cumulants_from_mgf(mgf: Callable, ell_max: int, h: float = 0.05,
                       rtol: float = 1e-6, atol: float = 1e-8) -> MgfCumulants:
    """Cumulants ``1..ell_max`` from ``log mgf`` on the symmetric stencil ``j h``.

    The degree ``2 ell_max`` interpolant is taken in the scaled variable
    ``t / h``; the ``ell``-th cumulant is ``ell!`` times its ``t^ell``
    coefficient.  The stencil is repeated at ``h / 2``; the result is flagged
    unless every order agrees within ``rtol`` relative or ``atol`` absolute,
    and the returned values eliminate the leading ``h`` power between the two.
    ``mgf`` may return floats or mpmath numbers (then the fit runs in mpmath).
    """
    if not 1 <= ell_max <= 4:
        raise ValueError("ell_max must be in 1..4")
    if h <= 0:
        raise ValueError("h must be positive")
    m0 = mgf(0.0)
    if abs(float(m0) - 1.0) > 1e-12:
        raise NumericalError(f"mgf(0) = {float(m0)!r}, expected 1")

    def logm(t):
        v = mgf(t)
        if not v > 0:
            raise NumericalError(f"mgf({t}) = {v!r} is not positive")
        if isinstance(v, float) or isinstance(v, int):
            return math.log(v)
        import mpmath as mp

        return mp.log(v)

    coarse = _stencil_cumulants(logm, ell_max, h)
    fine = _stencil_cumulants(logm, ell_max, h / 2)
    flagged = any(abs(a - b) > max(atol, rtol * max(abs(a), abs(b))) for a, b in zip(coarse, fine))
    values = []
    for ell, (a, b) in enumerate(zip(coarse, fine), start=1):
        p = _leading_error_power(ell, ell_max)
        values.append((2**p * b - a) / (2**p - 1))
    return MgfCumulants(values=values, coarse=coarse, fine=fine, h=h, flagged=flagged)


def _leading_error_power(ell: int, ell_max: int) -> int:
    # symmetric stencil: the t^ell estimate is polluted first by the t^m term
    # with m > 2 ell_max and m = ell (mod 2), scaled by h^(m - ell)
    m = 2 * ell_max + 1
    if (m - ell) % 2:
        m += 1
    return m - ell


def szego_limit(f: FourierPoly, t: float, n: int) -> float:
    """``t n f_hat(0) + t^2/2 sum_k |k| |f_hat(k)|^2``."""
    c0 = complex(f.coeff(0)).real
    s = sum(abs(k) * abs(complex(v)) ** 2 for k, v in f.coeffs.items())
    return t * n * c0 + 0.5 * t * t * s


def szego_residual(f: FourierPoly, t: float, n: int, dps: Optional[int] = None) -> float:
    """``log toeplitz_mgf(f, t, n) - szego_limit(f, t, n)``.

    ``dps`` evaluates the determinant in mpmath so residuals below double
    roundoff stay resolved.
    """
    v = toeplitz_mgf(f, t, n, dps=dps)
    if dps is not None:
        import mpmath as mp

        with mp.workdps(dps):
            c0 = mp.mpf(complex(f.coeff(0)).real) if not f.exact else _mpq(f.coeff(0), mp)
            s = mp.fsum(abs(k) * _abs2(v_, mp) for k, v_ in f.coeffs.items())
            tt = mp.mpf(t)
            return float(mp.log(v) - (tt * n * c0 + tt * tt * s / 2))
    if not v > 0:
        raise NumericalError(f"non-positive determinant {v!r}")
    return math.log(v) - szego_limit(f, t, n)


def _mpq(q, mp):
    from fractions import Fraction

    q = Fraction(q.real) if not isinstance(q, Fraction) else q
    return mp.mpf(q.numerator) / q.denominator


def _abs2(v, mp):
    from .exact import GaussianRational

    if isinstance(v, GaussianRational):
        return _mpq(v.real, mp) ** 2 + _mpq(v.imag, mp) ** 2
    if f_is_fraction(v):
        return _mpq(v, mp) ** 2
    return mp.mpf(abs(complex(v))) ** 2


def f_is_fraction(v) -> bool:
    from fractions import Fraction

    return isinstance(v, (Fraction, int))


def mgf_sweep(ensembles: Iterable, f: FourierPoly, ns: Sequence[int], ts: Sequence[float],
              methods: Sequence[str] = ("toeplitz",), dps: Optional[int] = None) -> list:
    """Evaluate the MGF over a grid; rows in input order.

    Each row is a dict with :data:`SWEEP_COLUMNS`; ``szego_residual`` is
    filled for unitary rows and left empty otherwise.
    """
    rows = []
    for ens_kind in ensembles:
        for n in ns:
            ens = as_ensemble(ens_kind, n)
            for t in ts:
                for method in methods:
                    if method == "toeplitz":
                        if not ens.unitary:
                            continue
                        v = float(toeplitz_mgf(f, t, n, dps=dps))
                    elif method == "fredholm":
                        v = fredholm_mgf(ens, f, t)
                    elif method == "weyl-quadrature":
                        if n > MAX_WEYL_N:
                            continue
                        v = weyl_quadrature_mgf(ens, f, t)
                    else:
                        raise ValueError(f"unknown method {method!r}")
                    ev = MgfEvaluation(ens.kind, f.to_json(), n, float(t), v, method)
                    resid = ev.log_value - szego_limit(f, t, n) if ens.unitary else None
                    rows.append({
                        "ensemble": ens.kind, "n": n, "t": float(t), "method": method,
                        "value": v, "log_value": ev.log_value, "szego_residual": resid,
                    })
    return rows


def sweep_to_csv(rows: Sequence[dict], stream: Optional[io.TextIOBase] = None) -> str:
    """Write sweep rows as CSV (``repr`` floats, so the text is byte-stable)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow(["" if r[c] is None else (repr(r[c]) if isinstance(r[c], float) else r[c])
                    for c in SWEEP_COLUMNS])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
