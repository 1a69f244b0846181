"""Fourier data of test functions on the circle.

A global test function is a finitely supported map ``k -> f_hat(k)`` with
``f(theta) = sum_k f_hat(k) exp(i k theta)``.  Coefficients entered as
integers / fractions stay exact through :func:`convolve_power`; anything else
is carried as ``complex``.

Local test functions are given on the Fourier side by ``g_hat`` with the
unitary convention ``g(x) = (2 pi)^(-1/2) int g_hat(t) exp(i t x) dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np
from scipy import integrate

from .exact import GaussianRational, as_exact, conj, is_exact

__all__ = [
    "FourierPoly",
    "LocalTestFunction",
    "make_poly",
    "poly_from_json",
    "convolve_power",
    "exp_symbol_coeffs",
    "localize",
    "variance_limit_local",
    "local_from_json",
]

SQRT2PI = math.sqrt(2.0 * math.pi)
TAIL_TOL = 1e-12


def _parse_scalar(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    return x


def _coerce_coeffs(raw: Mapping[int, object]) -> tuple[dict, bool]:
    vals = list(raw.values())
    if all(is_exact(v) for v in vals):
        out = {int(k): as_exact(v) for k, v in raw.items()}
        return {k: v for k, v in out.items() if v != 0}, True
    out = {int(k): complex(v) for k, v in raw.items()}
    return {k: v for k, v in out.items() if v != 0}, False


@dataclass(frozen=True)
class FourierPoly:
    """Trigonometric polynomial stored by its nonzero Fourier coefficients."""

    coeffs: Mapping[int, object]
    exact: bool = field(default=False, compare=False)

    def __post_init__(self):
        c, exact = _coerce_coeffs(dict(self.coeffs))
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(c.items()))))
        object.__setattr__(self, "exact", exact)

    @property
    def degree(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def coeff(self, k: int):
        return self.coeffs.get(k, Fraction(0) if self.exact else 0j)

    @property
    def real_valued(self) -> bool:
        return all(self.coeff(-k) == conj(v) for k, v in self.coeffs.items())

    @property
    def even(self) -> bool:
        return all(self.coeff(-k) == v for k, v in self.coeffs.items())

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def l1_norm(self) -> float:
        return float(sum(abs(complex(v)) for v in self.coeffs.values()))

    def to_array(self, band: int | None = None) -> np.ndarray:
        """Complex coefficient vector for frequencies ``-band..band``."""
        band = self.degree if band is None else band
        out = np.zeros(2 * band + 1, dtype=complex)
        for k, v in self.coeffs.items():
            if abs(k) <= band:
                out[k + band] = complex(v)
        return out

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for k, v in self.coeffs.items():
            out += complex(v) * np.exp(1j * k * theta)
        if self.real_valued:
            return out.real
        return out

    def __mul__(self, other: "FourierPoly") -> "FourierPoly":
        if not isinstance(other, FourierPoly):
            return FourierPoly({k: v * other for k, v in self.coeffs.items()})
        out: dict = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        return FourierPoly(out)

    __rmul__ = __mul__

    def __add__(self, other: "FourierPoly") -> "FourierPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return FourierPoly(out)

    def to_json(self) -> list:
        rows = []
        for k, v in self.coeffs.items():
            if isinstance(v, Fraction):
                rows.append([k, _json_num(v), 0])
            elif isinstance(v, GaussianRational):
                rows.append([k, _json_num(v.real), _json_num(v.imag)])
            else:
                rows.append([k, v.real, v.imag])
        return rows

    def describe(self) -> str:
        terms = [f"({v})" if k == 0 else f"({v}) e^{{{k}ix}}" for k, v in self.coeffs.items()]
        return " + ".join(terms) or "0"


def _json_num(q: Fraction):
    return int(q) if q.denominator == 1 else str(q)


def make_poly(pairs: Iterable[tuple[int, object]]) -> FourierPoly:
    """Build a :class:`FourierPoly` from ``(frequency, coefficient)`` pairs.

    Raises
    ------
    ValueError
        If a frequency appears twice.
    """
    raw: dict = {}
    for k, v in pairs:
        if int(k) in raw:
            raise ValueError(f"duplicate frequency {k}")
        raw[int(k)] = _parse_scalar(v)
    return FourierPoly(raw)


def poly_from_json(rows) -> FourierPoly:
    """Parse the ``[[k, re, im], ...]`` mini-format.

    ``re``/``im`` may be ints, floats or ``"p/q"`` strings; all-rational input
    produces an exact polynomial.
    """
    pairs = []
    for row in rows:
        if len(row) != 3:
            raise ValueError(f"expected [k, re, im], got {row!r}")
        k, re, im = row
        re, im = _parse_scalar(re), _parse_scalar(im)
        if is_exact(re) and is_exact(im):
            v = as_exact(GaussianRational(re, im))
        else:
            v = complex(float(re), float(im))
        pairs.append((k, v))
    return make_poly(pairs)


def convolve_power(f: FourierPoly, a: int) -> FourierPoly:
    """Fourier coefficients of ``f**a``; ``a == 0`` gives the constant 1."""
    if a < 0:
        raise ValueError("power must be non-negative")
    if not f.exact:
        return _convolve_power_float(f, a)
    result = FourierPoly({0: 1})
    base = f
    while a:
        if a & 1:
            result = result * base
        a >>= 1
        if a:
            base = base * base
    return result


def _convolve_power_float(f: FourierPoly, a: int) -> FourierPoly:
    # array convolution; hermitian/even symmetry restored against roundoff
    arr = np.ones(1, dtype=complex)
    base = f.to_array()
    for _ in range(a):
        arr = np.convolve(arr, base)
    if f.real_valued:
        arr = 0.5 * (arr + arr[::-1].conj())
    if f.even:
        arr = 0.5 * (arr + arr[::-1])
    band = (len(arr) - 1) // 2
    return FourierPoly({k - band: v for k, v in enumerate(arr)})


def _quadrature_points(f: FourierPoly, t: float, band: int) -> int:
    d = f.degree
    n = 8 * (band + d * max(1, math.ceil(abs(t) * d)))
    # aliasing guard for symbols with large coefficients
    n = max(n, 2 * band + d * (math.ceil(math.e * abs(t) * f.l1_norm) + 40) + 1, 16)
    return int(n)


def exp_symbol_coeffs(f: FourierPoly, t: float, band: int, dps: int | None = None):
    """Fourier coefficients ``m = -band..band`` of ``exp(t f)``.

    Uses the equispaced trapezoid rule (an FFT), which is spectrally accurate
    for the entire symbol.  With ``dps`` set the computation is done in
    mpmath at that many decimal digits and a list of ``mpc`` is returned.
    """
    if not f.real_valued:
        raise ValueError("symbol requires a real-valued f")
    if band < 0:
        raise ValueError("band must be >= 0")
    if t == 0:
        if dps is not None:
            import mpmath as mp

            return [mp.mpc(1 if m == 0 else 0) for m in range(-band, band + 1)]
        out = np.zeros(2 * band + 1, dtype=complex)
        out[band] = 1.0
        return out
    npts = _quadrature_points(f, t, band)
    if dps is not None:
        return _exp_symbol_coeffs_mp(f, t, band, npts, dps)
    theta = 2.0 * np.pi * np.arange(npts) / npts
    vals = np.exp(t * f(theta))
    c = np.fft.fft(vals) / npts
    m = np.arange(-band, band + 1)
    out = c[m % npts]
    sym = 0.5 * (out + np.conj(out[::-1]))
    sym[band] = sym[band].real
    return sym


def _exp_symbol_coeffs_mp(f, t, band, npts, dps):
    import mpmath as mp

    with mp.workdps(dps + 10):
        cs = {k: _mp_scalar(v, mp) for k, v in f.coeffs.items()}
        tt = _mp_scalar(t, mp).real
        thetas = [2 * mp.pi * j / npts for j in range(npts)]
        vals = []
        for th in thetas:
            s = mp.fsum(v * mp.expj(k * th) for k, v in cs.items())
            vals.append(mp.exp(tt * s.real))
        out = []
        for m in range(-band, band + 1):
            out.append(mp.fsum(v * mp.expj(-m * th) for th, v in zip(thetas, vals)) / npts)
        sym = [(out[i] + mp.conj(out[2 * band - i])) / 2 for i in range(2 * band + 1)]
        sym[band] = mp.mpc(sym[band].real, 0)
    return sym


def _mp_scalar(v, mp):
    if isinstance(v, GaussianRational):
        return mp.mpc(mp.mpf(v.real.numerator) / v.real.denominator,
                      mp.mpf(v.imag.numerator) / v.imag.denominator)
    if isinstance(v, Fraction) or isinstance(v, int):
        q = Fraction(v)
        return mp.mpc(mp.mpf(q.numerator) / q.denominator, 0)
    v = complex(v)
    return mp.mpc(v.real, v.imag)


# ---------------------------------------------------------------------------
# local test functions


def _sinc(u):
    return np.sinc(np.asarray(u, dtype=float) / np.pi)


@dataclass(frozen=True)
class LocalTestFunction:
    """A real test function on the line, specified by its Fourier transform.

    Families (``params`` in parentheses, defaults in brackets):

    ``triangle`` (width [1])
        ``g_hat(t) = max(0, 1 - |t|/width)``; compact spectral support.
    ``gauss`` (sigma [1])
        ``g_hat(t) = exp(-sigma^2 t^2 / 2)``; ``g(x) = exp(-x^2/2sigma^2)/sigma``.
    ``sinc2`` (width [1])
        ``g_hat(t) = sinc(width t / 2)^2``; ``g`` is a tent of half-width ``width``.
    ``table`` (t, ghat)
        piecewise-linear even ``g_hat`` sampled on a symmetric grid, zero outside.
    """

    family: str
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        fam = self.family
        p = dict(self.params)
        if fam in ("triangle", "sinc2"):
            p.setdefault("width", 1.0)
            if not p["width"] > 0:
                raise ValueError("width must be positive")
        elif fam == "gauss":
            p.setdefault("sigma", 1.0)
            if not p["sigma"] > 0:
                raise ValueError("sigma must be positive")
        elif fam == "table":
            t = np.asarray(p.get("t", []), dtype=float)
            v = np.asarray(p.get("ghat", []), dtype=float)
            if t.shape != v.shape or t.ndim != 1 or t.size < 2:
                raise ValueError("table needs matching 't' and 'ghat' arrays of length >= 2")
            if np.any(np.diff(t) <= 0):
                raise ValueError("table 't' must be strictly increasing")
            if not (np.allclose(t, -t[::-1], atol=1e-14) and np.allclose(v, v[::-1], atol=1e-14)):
                raise ValueError("table g_hat must be even on a symmetric grid (g real)")
            p["t"], p["ghat"] = tuple(t.tolist()), tuple(v.tolist())
        else:
            raise ValueError(f"unknown family {fam!r}")
        object.__setattr__(self, "params", MappingProxyType(p))

    # Fourier side -----------------------------------------------------
    def ghat(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.family == "triangle":
            return np.maximum(0.0, 1.0 - np.abs(t) / p["width"])
        if self.family == "gauss":
            return np.exp(-0.5 * (p["sigma"] * t) ** 2)
        if self.family == "sinc2":
            return _sinc(0.5 * p["width"] * t) ** 2
        return np.interp(t, p["t"], p["ghat"], left=0.0, right=0.0)

    @property
    def support(self) -> float | None:
        """Bound ``T`` with ``g_hat = 0`` for ``|t| >= T``, or None."""
        if self.family == "triangle":
            return float(self.params["width"])
        if self.family == "table":
            return float(self.params["t"][-1])
        return None

    @property
    def effective_support(self) -> float | None:
        """Where ``|g_hat|`` drops below ``TAIL_TOL`` times its peak; None if only a decay bound exists."""
        if self.support is not None:
            return self.support
        if self.family == "gauss":
            return math.sqrt(2.0 * math.log(1.0 / TAIL_TOL)) / self.params["sigma"]
        return None

    def decay_bound(self, t):
        """Upper bound for ``|g_hat(t)|``."""
        t = np.abs(np.asarray(t, dtype=float))
        if self.family == "sinc2":
            w = self.params["width"]
            with np.errstate(divide="ignore"):
                return np.minimum(1.0, 4.0 / (w * t) ** 2)
        return np.abs(self.ghat(t)) if self.family == "gauss" else (t < self.support).astype(float)

    # physical side ------------------------------------------------------
    def g(self, x):
        """Closed-form inverse transform."""
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.family == "triangle":
            w = p["width"]
            return w / SQRT2PI * _sinc(0.5 * w * x) ** 2
        if self.family == "gauss":
            s = p["sigma"]
            return np.exp(-0.5 * (x / s) ** 2) / s
        if self.family == "sinc2":
            w = p["width"]
            return SQRT2PI / w * np.maximum(0.0, 1.0 - np.abs(x) / w)
        return _table_inverse(np.asarray(p["t"]), np.asarray(p["ghat"]), x)

    def integral(self) -> float:
        """``int g(x) dx = sqrt(2 pi) g_hat(0)``."""
        return SQRT2PI * float(self.ghat(0.0))

    @property
    def is_zero(self) -> bool:
        return self.family == "table" and not any(self.params["ghat"])

    def circle_coeff(self, k, L: float, theta0: float = 0.0):
        """Fourier coefficient of the 2pi-periodisation of ``g(L (theta - theta0))``."""
        k = np.asarray(k, dtype=float)
        return self.ghat(k / L) * np.exp(-1j * k * theta0) / (L * SQRT2PI)

    def periodized(self, theta, L: float, theta0: float = 0.0):
        """Evaluate ``sum_m g(L (theta - theta0 + 2 pi m))``.

        Compactly supported ``g_hat`` -> finite Fourier synthesis; otherwise an
        image sum over the closed-form ``g`` (compact or Gaussian tails).
        """
        theta = np.asarray(theta, dtype=float)
        if self.support is not None:
            kmax = max(0, math.ceil(L * self.support) - 1)
            k = np.arange(1, kmax + 1)
            c = self.circle_coeff(k, L, theta0)
            c0 = float(self.ghat(0.0)) / (L * SQRT2PI)
            phase = np.exp(1j * np.multiply.outer(theta, k))
            return c0 + 2.0 * np.real(phase @ c)
        if self.family == "sinc2":
            reach = self.params["width"]
        else:
            reach = 9.0 * self.params["sigma"]
        mmax = math.ceil(reach / (2.0 * math.pi * L)) + 1
        d = np.mod(theta - theta0 + np.pi, 2.0 * np.pi) - np.pi
        out = np.zeros_like(d)
        for m in range(-mmax, mmax + 1):
            out += self.g(L * (d + 2.0 * np.pi * m))
        return out

    def to_json(self) -> dict:
        return {"family": self.family, "params": {k: (list(v) if isinstance(v, tuple) else v)
                                                  for k, v in self.params.items()}}


def _table_inverse(t, v, x):
    """Exact inverse transform of a piecewise-linear even g_hat."""
    # g(x) = (2/sqrt(2pi)) int_0^T ghat(t) cos(t x) dt for even ghat
    pos = t >= 0
    tp, vp = t[pos], v[pos]
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    small = np.abs(x) < 1e-8
    xs = np.where(small, 1.0, x)
    for a, b, fa, fb in zip(tp[:-1], tp[1:], vp[:-1], vp[1:]):
        s = (fb - fa) / (b - a)
        # int_a^b (fa + s (u - a)) cos(u x) du
        big = (fb * np.sin(b * xs) - fa * np.sin(a * xs)) / xs + s * (np.cos(b * xs) - np.cos(a * xs)) / xs**2
        tiny = 0.5 * (fa + fb) * (b - a)
        out += np.where(small, tiny, big)
    return 2.0 * out / SQRT2PI


def local_from_json(obj) -> LocalTestFunction:
    if not isinstance(obj, Mapping) or "family" not in obj:
        raise ValueError('expected {"family": ..., "params": {...}}')
    return LocalTestFunction(obj["family"], dict(obj.get("params", {})))


def localize(g: LocalTestFunction, L: float, theta0: float, band: int,
             strict: bool = True) -> FourierPoly:
    """Circle Fourier coefficients of ``theta -> g(L (theta - theta0))``.

    The localized function is taken 2pi-periodic (sum over images), so its
    coefficients are ``g_hat(k/L) exp(-i k theta0) / (L sqrt(2 pi))``.
    For families with a (effective) spectral support the band must cover it
    when ``strict``.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if band < 0:
        raise ValueError("band must be >= 0")
    need = min_band(g, L)
    if strict and need is not None and band < need:
        raise ValueError(f"band {band} below the effective circle support {need}")
    k = np.arange(0, band + 1)
    c = g.circle_coeff(k, L, theta0)
    coeffs = {0: complex(c[0].real, 0.0)}
    for kk in range(1, band + 1):
        coeffs[kk] = complex(c[kk])
        coeffs[-kk] = complex(c[kk]).conjugate()
    return FourierPoly(coeffs)


def min_band(g: LocalTestFunction, L: float) -> int | None:
    """Smallest band holding every circle coefficient above the tail tolerance."""
    T = g.effective_support
    if T is None:
        return None
    if g.support is not None:
        return max(0, math.ceil(L * T) - 1)
    return int(math.floor(L * T))


def tail_bound(g: LocalTestFunction, L: float, band: int) -> float:
    """Bound for ``sum_{|k| > band} |c_k|`` of the localized function."""
    if g.support is not None:
        return 0.0 if band >= min_band(g, L) else math.inf
    if g.family == "gauss":
        # monotone integrand: sum over |k|>band <= 2 L int_{band/L}^inf g_hat
        s = g.params["sigma"]
        return 2.0 * L * math.sqrt(math.pi / 2) / s * math.erfc(s * band / L / math.sqrt(2)) / (L * SQRT2PI)
    w = g.params["width"]
    # sum_{k>band} 4 L^2/(w k)^2 <= 4 L^2 / (w^2 band)
    return 2.0 * 4.0 * L**2 / (w**2 * max(band, 1)) / (L * SQRT2PI)


def variance_limit_local(g: LocalTestFunction) -> float:
    """``(1/2pi) int |g_hat(t)|^2 |t| dt`` to ~1e-10 absolute."""
    if g.is_zero:
        return 0.0

    def integrand(t):
        return np.abs(g.ghat(t)) ** 2 * t

    if g.support is not None:
        if g.family == "table":
            pts = [u for u in g.params["t"] if u > 0]
        else:
            pts = [g.support]
        total, _ = integrate.quad(integrand, 0.0, g.support, points=pts[:-1] or None,
                                  epsabs=1e-13, epsrel=1e-13, limit=500)
        return total / math.pi
    if g.family == "gauss":
        total, err = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=500)
        return total / math.pi
    # sinc2: oscillatory with t^-3 decay; composite Gauss-Legendre over periods
    w = g.params["width"]
    period = 2.0 * math.pi / w
    T = period * math.ceil((2e6 / w) / period)
    nodes, weights = np.polynomial.legendre.leggauss(16)
    edges = np.arange(0.0, T + period / 2, period)
    total = 0.0
    chunk = 20000
    for i in range(0, len(edges) - 1, chunk):
        a = edges[i:i + chunk + 1]
        lo, hi = a[:-1], a[1:]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        tt = mid[:, None] + half[:, None] * nodes[None, :]
        total += float(np.sum(half[:, None] * weights[None, :] * integrand(tt)))
    # tail: sin^4 averages to 3/8, integrand ~ 16 sin^4(wt/2) / (w^4 t^3)
    total += 16.0 * 0.375 / (w**4 * 2.0 * T**2)
    return total / math.pi
