"""Exact scalars: Gaussian rationals and sums of rational multiples of square roots."""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from functools import lru_cache

from .errors import IrrationalValue


class GaussianRational:
    """A complex number whose real and imaginary parts are :class:`Fraction`."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        return to_exact(value)

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if other.im == 0:
            return GaussianRational(self.re * other.re, self.im * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by exact zero")
        if other.im == 0:
            return GaussianRational(self.re / other.re, self.im / other.re)
        d = other.abs2()
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __rtruediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def _lift(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value)
    return NotImplemented


ZERO = GaussianRational(0)
ONE = GaussianRational(1)


def to_exact(value) -> GaussianRational:
    """Convert ``value`` to a :class:`GaussianRational` without rounding.

    Accepts ints, Fractions, finite floats and complex numbers (their binary
    value is taken literally), strings such as ``"-1/2"`` or ``"0.25"``, and
    ``[re, im]`` pairs of any of those.
    """
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not amplitudes")
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value)
    if isinstance(value, str):
        return GaussianRational(Fraction(value.strip()))
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex pair must have two entries, got {value!r}")
        re, im = (to_exact(v) for v in value)
        if not (re.is_real() and im.is_real()):
            raise ValueError(f"pair entries must be real, got {value!r}")
        return GaussianRational(re.re, im.re)
    if isinstance(value, numbers.Real):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite amplitude {value!r}")
        return GaussianRational(Fraction(value))
    if isinstance(value, numbers.Complex):
        value = complex(value)
        return GaussianRational(to_exact(value.real).re, to_exact(value.imag).re)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact scalar")


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, d)`` with ``n == s*s*d`` and ``d`` squarefree."""
    if n < 0:
        raise ValueError("radicand must be nonnegative")
    if n == 0:
        return 0, 1
    s, d = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        count = 0
        while rest % p == 0:
            rest //= p
            count += 1
        s *= p ** (count // 2)
        if count % 2:
            d *= p
        p += 1
    d *= rest
    return s, d


class SurdSum:
    """Accumulates ``sum_k c_k * sqrt(d_k)`` with Gaussian-rational ``c_k``."""

    __slots__ = ("terms",)

    def __init__(self):
        self.terms: dict[int, GaussianRational] = {}

    def add(self, coefficient: GaussianRational, radicand: int = 1) -> None:
        """Add ``coefficient * sqrt(radicand)`` for any nonnegative integer radicand."""
        if radicand == 0 or coefficient.is_zero():
            return
        s, d = squarefree_split(radicand)
        term = coefficient * s if s != 1 else coefficient
        current = self.terms.get(d)
        self.terms[d] = term if current is None else current + term

    def residual_radicands(self) -> list[int]:
        return sorted(d for d, c in self.terms.items() if d != 1 and not c.is_zero())

    def value(self) -> GaussianRational:
        """The exact sum; raises :class:`IrrationalValue` if surds survive."""
        leftover = self.residual_radicands()
        if leftover:
            raise IrrationalValue(
                "moment contains surviving surds " + ", ".join(f"sqrt({d})" for d in leftover),
                radicands=leftover,
            )
        return self.terms.get(1, ZERO)

    def to_complex(self) -> complex:
        return sum((complex(c) * math.sqrt(d) for d, c in self.terms.items()), 0j)
