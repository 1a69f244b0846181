"""Exact scalar helpers: rationals and Gaussian rationals.

Real exact values are plain :class:`fractions.Fraction`.  Complex exact values
use :class:`GaussianRational`, a minimal ``a + b*i`` type with rational parts
that interoperates with ``int`` and ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

__all__ = ["GaussianRational", "as_exact", "is_exact", "to_complex", "conj"]


class GaussianRational:
    """Complex number with :class:`~fractions.Fraction` real and imaginary parts."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        self.real = Fraction(real)
        self.imag = Fraction(imag)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, _RationalABC):
            return GaussianRational(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) + other
        return GaussianRational(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) - other
        return GaussianRational(self.real - o.real, self.imag - o.imag)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) * other
        return GaussianRational(
            self.real * o.real - self.imag * o.imag,
            self.real * o.imag + self.imag * o.real,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) / other
        d = o.real * o.real + o.imag * o.imag
        return GaussianRational(
            (self.real * o.real + self.imag * o.imag) / d,
            (self.imag * o.real - self.real * o.imag) / d,
        )

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __pos__(self):
        return self

    def __pow__(self, p: int):
        if not isinstance(p, int) or p < 0:
            raise TypeError("only non-negative integer powers are supported")
        out = GaussianRational(1)
        base = self
        while p:
            if p & 1:
                out = out * base
            base = base * base
            p >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.real, -self.imag)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            try:
                return complex(self) == complex(other)
            except TypeError:
                return NotImplemented
        return self.real == o.real and self.imag == o.imag

    def __hash__(self):
        if self.imag == 0:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"GaussianRational({self.real}, {self.imag})"


def is_exact(x) -> bool:
    return isinstance(x, (_RationalABC, GaussianRational)) and not isinstance(x, bool)


def as_exact(x):
    """Return the canonical exact form: ``Fraction`` if real, else ``GaussianRational``."""
    if isinstance(x, GaussianRational):
        return x.real if x.imag == 0 else x
    if isinstance(x, _RationalABC):
        return Fraction(x)
    raise TypeError(f"{x!r} is not an exact number")


def to_complex(x) -> complex:
    return complex(x)


def conj(x):
    if isinstance(x, _RationalABC):
        return x
    return x.conjugate()
