"""Scalar arithmetic shared by all modules.

Two kinds of values flow through the library:

* extended nonnegative scalars -- exact rationals (``Fraction``/``int``),
  floats, or ``math.inf`` for an unbounded value;
* :class:`BasePower` -- an exact representation of ``base**exponent`` for a
  fixed rational base > 1, used wherever generated data consists of integer
  powers of a single base.

All values are immutable and all operations are pure.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

INF = math.inf

#: comparison tolerance used by float-mode comparisons throughout the library
DEFAULT_TOL = 1e-9

Scalar = Union[int, Fraction, float, "BasePower"]


class DomainError(ValueError):
    """An arithmetically undefined combination, e.g. 0 times infinity."""


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def is_exact(x) -> bool:
    """True when ``x`` carries no rounding error (rationals and base powers)."""
    return isinstance(x, (int, Fraction, BasePower))


def as_fraction(x) -> Fraction:
    if isinstance(x, BasePower):
        return x.value()
    return Fraction(x)


def as_float(x) -> float:
    if isinstance(x, BasePower):
        return float(x)
    return float(x)


def ext_mul(x: Scalar, y: Scalar) -> Scalar:
    """Product of extended nonnegative scalars.

    Infinity absorbs positive finite values.  The form ``0 * inf`` signals
    ill-posed input data and raises :class:`DomainError` instead of picking a
    convention.
    """
    xi, yi = is_inf(x), is_inf(y)
    if xi or yi:
        if (xi and not yi and y == 0) or (yi and not xi and x == 0):
            raise DomainError("0 * inf is undefined")
        return INF
    if isinstance(x, BasePower) or isinstance(y, BasePower):
        if isinstance(x, BasePower) and isinstance(y, BasePower) and x.base == y.base:
            return x * y
        return as_fraction(x) * as_fraction(y)
    return x * y


def ext_root(x: Scalar, k: int) -> Scalar:
    """k-th root of an extended nonnegative scalar.

    Exact when the root is rational (perfect powers, or a base power whose
    exponent is divisible by ``k``); otherwise a float.
    """
    if k < 1:
        raise ValueError("root order must be a positive integer")
    if is_inf(x):
        return INF
    if k == 1:
        return x
    if isinstance(x, BasePower):
        return x.root(k)
    if isinstance(x, (int, Fraction)):
        f = Fraction(x)
        num = _iroot_exact(f.numerator, k)
        den = _iroot_exact(f.denominator, k)
        if num is not None and den is not None:
            return Fraction(num, den)
        return float(f) ** (1.0 / k)
    return float(x) ** (1.0 / k)


def _iroot_exact(n: int, k: int):
    """Exact integer k-th root of n, or None if n is not a perfect power."""
    if n < 0:
        return None
    r = round(n ** (1.0 / k)) if n.bit_length() < 52 else _iroot_newton(n, k)
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def _iroot_newton(n: int, k: int) -> int:
    x = 1 << (n.bit_length() // k + 1)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


class BasePower:
    """Exact ``base**exponent`` with rational ``base > 1``, plus a zero element.

    Multiplication adds exponents; at equal base, comparison compares
    exponents.  The distinguished zero element absorbs products.
    """

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        base = Fraction(base)
        if base <= 1:
            raise ValueError("base must be a rational > 1")
        self.base = base
        self.exponent = exponent  # int, or None for the zero element

    @classmethod
    def zero(cls, base) -> "BasePower":
        return cls(base, None)

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return self.base**self.exponent

    def __float__(self) -> float:
        if self.is_zero:
            return 0.0
        b, e = float(self.base), self.exponent
        try:
            return b**e
        except OverflowError:
            return INF if e > 0 else 0.0

    @classmethod
    def from_float(cls, base, x: float) -> "BasePower":
        """Inverse of ``float()`` for values that are exact powers of ``base``."""
        if x == 0.0:
            return cls.zero(base)
        if x < 0 or math.isinf(x) or math.isnan(x):
            raise ValueError("not a positive finite value")
        e = round(math.log(x) / math.log(float(Fraction(base))))
        bp = cls(base, e)
        if float(bp) != x:
            raise ValueError("value is not an exact power of the base")
        return bp

    def root(self, k: int):
        """Exact k-th root when the exponent divides, else a float."""
        if self.is_zero:
            return BasePower.zero(self.base)
        if self.exponent % k == 0:
            return BasePower(self.base, self.exponent // k)
        return float(self.base) ** (self.exponent / k)

    def _cmp_key(self, other):
        if isinstance(other, BasePower):
            if other.base == self.base:
                # exponent comparison; zero is the minimum
                a = -INF if self.is_zero else self.exponent
                b = -INF if other.is_zero else other.exponent
                return a, b
            return self.value(), other.value()
        if is_inf(other):
            return 0, 1
        if isinstance(other, float):
            return float(self), other
        return self.value(), Fraction(other)

    def __mul__(self, other):
        if isinstance(other, BasePower) and other.base == self.base:
            if self.is_zero or other.is_zero:
                return BasePower.zero(self.base)
            return BasePower(self.base, self.exponent + other.exponent)
        return ext_mul(self.value(), other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, BasePower) and other.base == self.base:
            if other.is_zero:
                raise ZeroDivisionError("division by the zero base power")
            if self.is_zero:
                return BasePower.zero(self.base)
            return BasePower(self.base, self.exponent - other.exponent)
        return self.value() / as_fraction(other)

    def __rtruediv__(self, other):
        if self.is_zero:
            raise ZeroDivisionError("division by the zero base power")
        return as_fraction(other) / self.value()

    def __pow__(self, k: int):
        if self.is_zero:
            if k <= 0:
                raise ZeroDivisionError("zero to a nonpositive power")
            return BasePower.zero(self.base)
        return BasePower(self.base, self.exponent * k)

    def __eq__(self, other):
        if isinstance(other, BasePower):
            a, b = self._cmp_key(other)
            return a == b
        if isinstance(other, (int, Fraction)):
            return self.value() == other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __le__(self, other):
        a, b = self._cmp_key(other)
        return a <= b

    def __lt__(self, other):
        a, b = self._cmp_key(other)
        return a < b

    def __ge__(self, other):
        a, b = self._cmp_key(other)
        return a >= b

    def __gt__(self, other):
        a, b = self._cmp_key(other)
        return a > b

    def __hash__(self):
        return hash(self.value())

    def __repr__(self):
        if self.is_zero:
            return f"BasePower({self.base}, zero)"
        return f"BasePower({self.base}**{self.exponent})"
