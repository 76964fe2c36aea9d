"""Exact Gaussian-rational scalars a + b*i with arbitrary-precision parts."""

from __future__ import annotations

from fractions import Fraction


def frac_from_str(s: str) -> Fraction:
    """Parse a decimal-free rational string, either "p" or "p/q"."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def frac_to_str(f: Fraction) -> str:
    """Canonical "p/q" form, denominator always present and positive."""
    return f"{f.numerator}/{f.denominator}"


class QQi:
    """An element of Q(i): exact real and imaginary Fraction parts.

    Instances are immutable by convention; all arithmetic returns new
    objects and is exact. Fraction keeps numerator and denominator
    coprime with a positive denominator, so equality and hashing are
    canonical.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, QQi):
            return other
        if isinstance(other, (int, Fraction)):
            return QQi(other)
        return None

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QQi(other.re - self.re, other.im - self.im)

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return QQi(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        n = c * c + d * d
        if not n:
            raise ZeroDivisionError("division by zero scalar")
        return QQi((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def inverse(self) -> "QQi":
        return QQI_ONE / self

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        """|z|^2 as an exact Fraction."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"QQi({self.re})"
        return f"QQi({self.re}, {self.im})"

    def to_str_pair(self) -> tuple[str, str]:
        return frac_to_str(self.re), frac_to_str(self.im)

    @staticmethod
    def from_str_pair(re: str, im: str) -> "QQi":
        return QQi(frac_from_str(re), frac_from_str(im))


QQI_ZERO = QQi(0)
QQI_ONE = QQi(1)
QQI_I = QQi(0, 1)
