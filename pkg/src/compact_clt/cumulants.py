"""Finite-n and limiting cumulants of linear eigenvalue statistics.

Two independent finite-n routes:

* :func:`cumulant_direct_unitary` sums over zero-sum frequency tuples with
  the lattice-point count :func:`~compact_clt.combinatorics.clamp_count`
  (unitary group only);
* :func:`cumulant_trace` evaluates
  ``sum_m sum_{l_1+..+l_m=l} (-1)^(m-1)/m * l!/prod(l_i!) * tr prod_i M(f^{l_i})``
  with the projection-basis kernel matrices of any ensemble.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .combinatorics import ResourceError, clamp_count, comp_coefficients
from .ensembles import Ensemble, rational_trace_form
from .fourier import FourierPoly, LocalTestFunction, convolve_power, localize, min_band

__all__ = [
    "Caps",
    "DEFAULT_CAPS",
    "as_ensemble",
    "CumulantReport",
    "cumulant_direct_unitary",
    "cumulant_trace",
    "limit_cumulant",
    "limit_shift",
    "localized_symbol",
    "local_cumulant",
]


@dataclass(frozen=True)
class Caps:
    """Resource bounds for the cumulant engines."""

    max_ell: int = 4
    max_n: int = 128
    max_degree: int = 8
    max_direct_span: int = 64  # degree(f) * ell for the tuple enumeration


DEFAULT_CAPS = Caps()


def _real(value):
    """Collapse an exact or float complex value to its real part, checking the residue."""
    if isinstance(value, Fraction):
        return value
    if hasattr(value, "imag") and not isinstance(value, (float, int)):
        if isinstance(value, complex):
            if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
                raise ArithmeticError(f"cumulant has imaginary residue {value.imag:g}")
            return value.real
        if value.imag != 0:
            raise ArithmeticError("exact cumulant is not real")
        return value.real
    return value


def _check(f: FourierPoly, n: int, ell: int, caps: Caps, direct: bool = False) -> None:
    if not f.real_valued:
        raise ValueError("cumulants need a real-valued f")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if ell > caps.max_ell:
        raise ResourceError(f"ell={ell} exceeds cap {caps.max_ell}")
    if n > caps.max_n:
        raise ResourceError(f"n={n} exceeds cap {caps.max_n}")
    if f.degree > caps.max_degree:
        raise ResourceError(f"degree {f.degree} exceeds cap {caps.max_degree}")
    if direct and f.degree * ell > caps.max_direct_span:
        raise ResourceError(f"degree*ell = {f.degree * ell} exceeds cap {caps.max_direct_span}")


def cumulant_direct_unitary(f: FourierPoly, n: int, ell: int, caps: Caps = DEFAULT_CAPS):
    """``ell``-th cumulant of ``S_n(f)`` under U(n) via the frequency-tuple sum.

    ``sum_{k_1+..+k_l=0} prod f_hat(k_i) sum_m (-1)^(m-1)/m sum_{compositions}
    l!/prod(l_i!) * #{u : 0 <= u, u + partial sums <= n-1}``, the partial sums
    taken at the composition cut points in the tuple's natural order.  Exact
    (a Fraction) when ``f`` has rational coefficients.
    """
    _check(f, n, ell, caps, direct=True)
    coeffs = dict(f.coeffs)
    support = sorted(coeffs)
    weights = [(list(itertools.accumulate(c))[:-1], w) for c, w in comp_coefficients(ell)]
    zero = Fraction(0) if f.exact else 0j
    total = zero
    if not support:
        return _real(total)
    lo, hi = support[0], support[-1]
    for head in itertools.product(support, repeat=ell - 1):
        last = -sum(head)
        if last not in coeffs or not lo <= last <= hi:
            continue
        ks = head + (last,)
        prefix = list(itertools.accumulate(ks))
        coef = zero
        for cuts, w in weights:
            count = clamp_count(n, [prefix[c - 1] for c in cuts])
            if count:
                coef += w * count
        if coef:
            prod = coeffs[ks[0]]
            for kk in ks[1:]:
                prod = prod * coeffs[kk]
            total += prod * coef
    return _real(total)


def as_ensemble(ensemble, n: Optional[int] = None) -> Ensemble:
    """Coerce a kind string or an :class:`Ensemble` (re-ranked to ``n`` if given)."""
    if isinstance(ensemble, Ensemble):
        return ensemble if n is None or n == ensemble.n else ensemble.with_n(n)
    if n is None:
        raise ValueError("n is required with an ensemble kind string")
    return Ensemble(ensemble, n)


def cumulant_trace(ensemble, f: FourierPoly, n: Optional[int], ell: int, exact: Optional[bool] = None,
                   caps: Caps = DEFAULT_CAPS):
    """``ell``-th cumulant of ``S_n(f)`` for any ensemble from kernel-matrix traces.

    For SO/Sp the projection form of the kernel already contains both
    reflection classes, so the trace is the full cumulant.  Exact when ``f``
    is exact (or ``exact=True``); otherwise floating point.
    """
    ensemble = as_ensemble(ensemble, n)
    n = ensemble.n
    _check(f, n, ell, caps)
    if not ensemble.unitary and not f.even:
        raise ValueError(f"{ensemble.label} requires an even f")
    use_exact = f.exact if exact is None else exact
    if use_exact and not f.exact:
        raise ValueError("exact evaluation needs rational coefficients")
    mats = {}
    for a in range(1, ell + 1):
        mats[a] = rational_trace_form(ensemble, convolve_power(f, a), exact=use_exact)
    total = Fraction(0) if use_exact else 0.0
    # the same cyclic word appears for each rotation of a composition, cache traces
    cache: dict[tuple, object] = {}
    for comp, w in comp_coefficients(ell):
        key = _canonical_rotation(comp)
        if key not in cache:
            prod = mats[comp[0]]
            for a in comp[1:]:
                prod = prod @ mats[a]
            cache[key] = np.trace(prod)
        total += w * cache[key]
    return _real(total)


def _canonical_rotation(comp: tuple) -> tuple:
    return min(comp[i:] + comp[:i] for i in range(len(comp)))


def limit_shift(ensemble, f: FourierPoly):
    """n-independent part of the mean: 0 (U), and the boundary shifts for SO/Sp."""
    ensemble = as_ensemble(ensemble, 1)
    if ensemble.unitary:
        return Fraction(0) if f.exact else 0.0
    if not f.even:
        raise ValueError(f"{ensemble.label} requires an even f")
    acc = Fraction(0) if f.exact else 0.0
    for k, v in f.coeffs.items():
        if k < 1:
            continue
        v = v if f.exact else complex(v).real
        sign = 1 if k % 2 == 0 else -1
        if ensemble.kind == "so-even":
            acc += Fraction(1 + sign, 2) * v if f.exact else 0.5 * (1 + sign) * v
        elif ensemble.kind == "so-odd":
            acc += Fraction(-1 + sign, 2) * v if f.exact else 0.5 * (-1 + sign) * v
        else:
            acc -= Fraction(1 + sign, 2) * v if f.exact else 0.5 * (1 + sign) * v
    return acc


def limit_cumulant(ensemble, f: FourierPoly, ell: int, n: Optional[int] = None):
    """Large-n cumulant.

    ``ell == 1``: ``n f_hat(0)`` plus :func:`limit_shift` (exact for U(n)).
    ``ell == 2``: ``sum_k |k| |f_hat(k)|^2`` for U(n), ``sum_{k>=1} k f_hat(k)^2``
    for SO/Sp.  ``ell >= 3``: 0.  ``n`` only enters at ``ell == 1``.
    """
    if ell == 1 and n is None and not isinstance(ensemble, Ensemble):
        raise ValueError("n is required for the mean")
    ensemble = as_ensemble(ensemble, n if n is not None or isinstance(ensemble, Ensemble) else 1)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if not ensemble.unitary and not f.even:
        raise ValueError(f"{ensemble.label} requires an even f")
    zero = Fraction(0) if f.exact else 0.0
    if ell == 1:
        c0 = f.coeff(0)
        c0 = c0 if f.exact else complex(c0).real
        return _real(ensemble.n * c0 + limit_shift(ensemble, f))
    if ell >= 3:
        return zero
    total = zero
    for k, v in f.coeffs.items():
        if ensemble.unitary:
            if f.exact:
                total += abs(k) * (v * v.conjugate() if hasattr(v, "imag") and not isinstance(v, Fraction) else v * v)
            else:
                total += abs(k) * abs(complex(v)) ** 2
        elif k >= 1:
            vv = v if f.exact else complex(v).real
            total += k * vv * vv
    return _real(total)


def localized_symbol(ensemble, g: LocalTestFunction, L: float, theta0: float,
                     band: Optional[int] = None, n: Optional[int] = None) -> FourierPoly:
    """Circle Fourier data of the local statistic's test function.

    U(n): the 2pi-periodised ``g(L (theta - theta0))``.  SO/Sp: its even
    symmetrisation ``G(theta) + G(-theta)``, which is what is summed over
    the ``n`` angles in ``[0, pi]``.  ``band`` defaults to the exact
    spectral support for compactly supported ``g_hat`` and to
    ``n + effective support`` (``4 n`` without one) otherwise.
    """
    ensemble = as_ensemble(ensemble, n)
    if not ensemble.unitary and not 0.0 < theta0 < math.pi:
        raise ValueError("theta0 must lie in (0, pi) for SO/Sp")
    need = min_band(g, L)
    if band is None:
        if g.support is not None:
            band = need
        else:
            band = ensemble.n + need if need is not None else 4 * ensemble.n
    c = localize(g, L, theta0, band, strict=need is not None)
    if ensemble.unitary:
        return c
    coeffs = {}
    for k in range(-band, band + 1):
        v = complex(c.coeff(k)) + complex(c.coeff(-k))
        coeffs[k] = complex(v.real, 0.0)
    return FourierPoly(coeffs)


def local_cumulant(ensemble, g: LocalTestFunction, L: float, n: Optional[int], theta0: float, ell: int,
                   band: Optional[int] = None) -> float:
    """Cumulant of the local statistic ``sum_j G(theta_j)`` (see :func:`localized_symbol`).

    The degree cap is lifted to the band of the localized symbol.
    """
    ensemble = as_ensemble(ensemble, n)
    h = localized_symbol(ensemble, g, L, theta0, band)
    if h.is_zero:
        return 0.0
    caps = Caps(max_degree=max(DEFAULT_CAPS.max_degree, h.degree), max_n=max(DEFAULT_CAPS.max_n, ensemble.n))
    return float(cumulant_trace(ensemble, h, None, ell, exact=False, caps=caps))


@dataclass
class CumulantReport:
    """All available routes for one (ensemble, f, n, ell) cell."""

    ensemble: str
    n: int
    ell: int
    f: object
    value_trace: Optional[float] = None
    value_direct: Optional[float] = None
    value_mgf: Optional[float] = None
    value_limit: Optional[float] = None
    error: Optional[str] = None
    max_abs_discrepancy: float = field(init=False, default=0.0)

    def __post_init__(self):
        self.refresh()

    def refresh(self) -> "CumulantReport":
        """Recompute the discrepancy among the finite-n values (limit excluded)."""
        vals = [float(v) for v in (self.value_direct, self.value_trace, self.value_mgf) if v is not None]
        for v in vals + ([float(self.value_limit)] if self.value_limit is not None else []):
            if not math.isfinite(v):
                raise ValueError("report values must be finite")
        self.max_abs_discrepancy = max((abs(a - b) for a, b in itertools.combinations(vals, 2)), default=0.0)
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("value_trace", "value_direct", "value_mgf", "value_limit"):
            if d[key] is not None:
                d[key] = float(d[key])
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
