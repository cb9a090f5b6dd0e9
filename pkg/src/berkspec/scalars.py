"""Exact p-adic magnitudes on the rationals.

Every norm, radius and distance in the package is a power of ``p`` with a
rational exponent, so magnitudes are stored in logarithmic form: a
:class:`LogMag` holds ``t`` with ``|x| = p**(-t)`` and ``t = None`` standing
for the magnitude ``0``.  No floating point is involved anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

import sympy

Rational = Union[int, Fraction]


class Prime(int):
    """A validated prime, used as the residual characteristic."""

    def __new__(cls, p: int) -> "Prime":
        p = int(p)
        if p < 2 or not sympy.isprime(p):
            raise ValueError(f"{p} is not a prime")
        return super().__new__(cls, p)


def as_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    if isinstance(q, str):
        return parse_rational(q)
    raise TypeError(f"cannot interpret {q!r} as a rational number")


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or ``"num"`` (decimal integers only)."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational literal: {text!r}") from None
    if d == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(n, d)


def format_rational(q: Rational) -> str:
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@total_ordering
@dataclass(frozen=True)
class LogMag:
    """The magnitude ``p**(-t)``; ``t is None`` encodes magnitude zero.

    Ordering follows the magnitudes, so it is the reverse of the order on
    ``t``.  Multiplication adds exponents and zero absorbs.
    """

    t: Fraction | None

    def __post_init__(self):
        if self.t is not None and not isinstance(self.t, Fraction):
            object.__setattr__(self, "t", as_fraction(self.t))

    @classmethod
    def zero(cls) -> "LogMag":
        return cls(None)

    @classmethod
    def one(cls) -> "LogMag":
        return cls(Fraction(0))

    @classmethod
    def p_power(cls, k: Rational) -> "LogMag":
        """The magnitude ``p**k``."""
        return cls(-as_fraction(k))

    @property
    def is_zero(self) -> bool:
        return self.t is None

    @property
    def log_p(self) -> Fraction:
        """``log_p`` of the magnitude, i.e. ``-t``."""
        if self.t is None:
            raise ValueError("log of magnitude zero")
        return -self.t

    def __mul__(self, other: "LogMag") -> "LogMag":
        if self.t is None or other.t is None:
            return LogMag.zero()
        return LogMag(self.t + other.t)

    def __truediv__(self, other: "LogMag") -> "LogMag":
        if other.t is None:
            raise ZeroDivisionError("division by magnitude zero")
        if self.t is None:
            return self
        return LogMag(self.t - other.t)

    def __pow__(self, e: Rational) -> "LogMag":
        e = as_fraction(e)
        if self.t is None:
            if e <= 0:
                raise ZeroDivisionError("non-positive power of magnitude zero")
            return self
        return LogMag(self.t * e)

    def __lt__(self, other: "LogMag") -> bool:
        if not isinstance(other, LogMag):
            return NotImplemented
        if self.t is None:
            return other.t is not None
        if other.t is None:
            return False
        return self.t > other.t

    def __hash__(self):
        return hash(("LogMag", self.t))

    def value(self, p: int) -> Fraction | None:
        """The magnitude as an exact rational, when the exponent is integral."""
        if self.t is None:
            return Fraction(0)
        if self.t.denominator != 1:
            return None
        return Fraction(p) ** (-self.t.numerator)

    def render(self, p: int) -> str:
        """Human form: ``25``, ``1/5``, ``5^(3/4)`` or ``0``."""
        if self.t is None:
            return "0"
        e = -self.t
        if e.denominator == 1:
            return format_rational(Fraction(p) ** e.numerator)
        return f"{p}^({format_rational(e)})"

    def to_json(self) -> dict:
        if self.t is None:
            return {"zero": True}
        return {"log_p": format_rational(-self.t)}

    @classmethod
    def from_json(cls, data: dict) -> "LogMag":
        if data.get("zero"):
            return cls.zero()
        return cls(-parse_rational(data["log_p"]))

    def __repr__(self):
        if self.t is None:
            return "LogMag(0)"
        return f"LogMag(t={format_rational(self.t)})"


def vp(q: Rational, p: int) -> int | float:
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    q = as_fraction(q)
    if q == 0:
        return math.inf
    v = 0
    n, d = q.numerator, q.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def absval(q: Rational, p: int) -> LogMag:
    v = vp(q, p)
    if v == math.inf:
        return LogMag.zero()
    return LogMag(Fraction(v))


def omega(p: int) -> LogMag:
    """``|p|**(1/(p-1))``, the radius of convergence of the exponential."""
    return LogMag(Fraction(1, p - 1))


def dist_zp(q: Rational, p: int) -> LogMag:
    """Distance from ``q`` to the p-adic integers (inf over n of ``|q - n|``)."""
    v = vp(q, p)
    if v >= 0:
        return LogMag.zero()
    return LogMag(Fraction(v))


def residue_digit_radius(k: int) -> LogMag:
    """The magnitude ``p**(-k)`` for an integer ``k``."""
    return LogMag(Fraction(k))
