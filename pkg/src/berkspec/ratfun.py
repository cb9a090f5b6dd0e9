"""Rational functions over Q: Gauss norms, partial fractions, Laurent splits.

Polynomials are dense tuples of :class:`fractions.Fraction` in ascending
degree.  Factoring denominators is delegated to sympy; everything else is
plain exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import sympy

from .errors import IrreducibleDenominator, PoleAtTypeOnePoint, PoleOnCircle, Unsupported
from .scalars import LogMag, absval, as_fraction, format_rational


def _trim(coeffs: Iterable) -> tuple:
    cs = [c if type(c) is Fraction else as_fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


class Poly:
    """Dense polynomial in one variable with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _trim(coeffs)

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def linear(cls, root) -> "Poly":
        """The monic polynomial ``T - root``."""
        return cls([-as_fraction(root), 1])

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        big, small = (self, other) if len(self.coeffs) >= len(other.coeffs) else (other, self)
        out = list(big.coeffs)
        for i, c in enumerate(small.coeffs):
            if c:
                out[i] += c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c if c else c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        rhs = [(j, b) for j, b in enumerate(other.coeffs) if b]
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in rhs:
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.deg == 0:
            inv = 1 / other.lead
            if inv == 1:
                return self, Poly()
            return Poly(c * inv if c else c for c in self.coeffs), Poly()
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - other.deg)
        lead = other.lead
        for i in range(len(rem) - 1, other.deg - 1, -1):
            c = rem[i] / lead
            if c == 0:
                continue
            shift = i - other.deg
            q[shift] = c
            for j, b in enumerate(other.coeffs):
                rem[shift + j] -= c * b
        return Poly(q), Poly(rem)

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.lead
        return Poly(c / lead for c in self.coeffs)

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def shift(self, c) -> "Poly":
        """Coefficients of ``f(T + c)``, i.e. the Taylor expansion at ``c``."""
        c = as_fraction(c)
        if c == 0:
            return self
        # b_j = sum_k a_k C(k, j) c^(k-j), summed over the nonzero a_k only
        out = [Fraction(0)] * len(self.coeffs)
        for k, a in enumerate(self.coeffs):
            if a == 0:
                continue
            term = a  # a_k C(k, j) c^(k-j) for j = k, k-1, ...
            out[k] += term
            for j in range(k - 1, -1, -1):
                term = term * c * (j + 1) / (k - j)
                out[j] += term
        return Poly(out)

    def compose(self, other: "Poly") -> "Poly":
        out = Poly()
        for a in reversed(self.coeffs):
            out = out * other + a
        return out

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        if (a.deg == 0 and not a.is_zero()) or (b.deg == 0 and not b.is_zero()):
            return Poly.const(1)
        while not b.is_zero():
            # monic remainders keep the rational coefficients from growing
            a, b = b, a.divmod(b)[1]
            if not b.is_zero():
                b = b.monic()
        return a.monic()

    def to_sympy(self, var):
        return sum(sympy.Rational(c.numerator, c.denominator) * var**i
                   for i, c in enumerate(self.coeffs))

    def __repr__(self):
        return f"Poly({[format_rational(c) for c in self.coeffs]})"

    def render(self, var: str = "T") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and c == 1:
                term = mono
            elif mono and c == -1:
                term = "-" + mono
            elif mono:
                term = f"({format_rational(c)})*{mono}" if c.denominator != 1 else f"{c}*{mono}"
            else:
                term = format_rational(c)
                if c.denominator != 1:
                    term = f"({term})"
            parts.append(term)
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(as_fraction(x))


class RatFun:
    """A reduced quotient ``num/den`` with ``den`` monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_poly(num)
        den = Poly.const(1) if den is None else _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly.const(1)
            return
        if den.deg == 0 and den.lead == 1:
            self.num, self.den = num, den
            return
        g = num.gcd(den)
        if g.deg > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
        lead = den.lead
        self.num = num if lead == 1 else Poly(c / lead if c else c for c in num.coeffs)
        self.den = den.monic()

    @classmethod
    def const(cls, c) -> "RatFun":
        return cls(Poly.const(c))

    @classmethod
    def T(cls) -> "RatFun":
        return cls(Poly.x())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.den.deg == 0 and self.num.deg <= 0

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError("not a constant")
        return self.num[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = RatFun(other)
        return isinstance(other, RatFun) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_rf(other)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        other = _as_rf(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        return self * _as_rf(other).inverse()

    def __rtruediv__(self, other):
        return _as_rf(other) * self.inverse()

    def __pow__(self, n: int):
        if n >= 0:
            return RatFun(self.num**n, self.den**n)
        return self.inverse() ** (-n)

    def __call__(self, x):
        x = as_fraction(x)
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {format_rational(x)}")
        return self.num(x) / d

    def derivative(self) -> "RatFun":
        return RatFun(self.num.derivative() * self.den - self.num * self.den.derivative(),
                      self.den * self.den)

    def shift(self, c) -> "RatFun":
        """``f(T + c)``."""
        return RatFun(self.num.shift(c), self.den.shift(c))

    def render(self) -> str:
        if self.den.deg == 0:
            return self.num.render()
        return f"({self.num.render()})/({self.den.render()})"

    def __repr__(self):
        return f"RatFun({self.render()})"

    def poles(self) -> list[tuple[Fraction, int]]:
        """Rational poles with multiplicity; raises if the denominator does not split."""
        return rational_roots(self.den)


def _as_rf(x) -> RatFun:
    if isinstance(x, RatFun):
        return x
    return RatFun(x)


_SYM_T = sympy.Symbol("T")


def rational_roots(f: Poly) -> list[tuple[Fraction, int]]:
    """Roots of ``f`` over Q with multiplicity, requiring ``f`` to split."""
    if f.deg <= 0:
        return []
    sp = sympy.Poly(f.to_sympy(_SYM_T), _SYM_T, domain="QQ")
    _, factors = sp.factor_list()
    roots = []
    for fac, mult in factors:
        if fac.degree() >= 2:
            raise IrreducibleDenominator(f"irreducible factor {fac.as_expr()} of degree {fac.degree()}")
        a, b = fac.all_coeffs()
        r = -sympy.Rational(b) / sympy.Rational(a)
        roots.append((Fraction(int(r.p), int(r.q)), int(mult)))
    roots.sort()
    return roots


def _shift_norm(poly: Poly, center: Fraction, radius: LogMag, p: int) -> LogMag:
    best = LogMag.zero()
    for i, a in enumerate(poly.shift(center).coeffs):
        if a == 0:
            continue
        if radius.is_zero:
            if i == 0:
                best = max(best, absval(a, p))
            continue
        best = max(best, absval(a, p) * radius ** i)
    return best


def gauss_norm(f, center, radius: LogMag, p: int) -> LogMag:
    """``|f|`` at the point ``x_{center, radius}``."""
    f = _as_rf(f)
    center = as_fraction(center)
    if radius.is_zero and f.den(center) == 0:
        raise PoleAtTypeOnePoint(f"pole of {f.render()} at {format_rational(center)}")
    if f.is_zero():
        return LogMag.zero()
    return _shift_norm(f.num, center, radius, p) / _shift_norm(f.den, center, radius, p)


@dataclass(frozen=True)
class PFDecomp:
    """``polynomial_part + sum_q sum_k coeffs[k-1] / (T - q)^k``."""

    polynomial_part: Poly
    principal_parts: tuple  # of (pole, tuple of coefficients for k = 1, 2, ...)

    def reassemble(self) -> RatFun:
        out = RatFun(self.polynomial_part)
        for q, cs in self.principal_parts:
            lin = RatFun(Poly.linear(q))
            for k, a in enumerate(cs, start=1):
                if a != 0:
                    out = out + RatFun.const(a) / lin ** k
        return out

    def poles(self) -> list[Fraction]:
        return [q for q, _ in self.principal_parts]


def _series_div(num: Sequence[Fraction], den: Sequence[Fraction], order: int) -> list[Fraction]:
    """First ``order`` coefficients of num/den as power series (den[0] != 0)."""
    out = []
    for k in range(order):
        acc = num[k] if k < len(num) else Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / den[0])
    return out


def partial_fractions(f) -> PFDecomp:
    f = _as_rf(f)
    quo, rem = f.num.divmod(f.den)
    parts = []
    roots = rational_roots(f.den)
    for q, m in roots:
        rest = f.den.divmod(Poly.linear(q) ** m)[0]
        taylor = _series_div(rem.shift(q).coeffs, rest.shift(q).coeffs, m)
        # coefficient of (T-q)^(-k) is the Taylor coefficient of order m-k
        parts.append((q, tuple(taylor[m - k] for k in range(1, m + 1))))
    return PFDecomp(quo, tuple(parts))


@dataclass(frozen=True)
class LaurentSplit:
    """Laurent expansion of ``f`` in ``u = T - center`` on the annulus just inside ``|u| = radius``.

    ``inner`` holds principal parts of poles strictly inside the circle,
    ``outer`` the rest; ``constant`` is the coefficient of ``u^0``.
    Poles on the circle are assigned according to ``on_circle``.
    """

    p: int
    center: Fraction
    radius: LogMag
    constant: Fraction
    poly_u: Poly  # polynomial part, in the variable u, without its constant term
    outer_poles: tuple  # (d = pole - center, coeffs)
    inner_poles: tuple
    on_circle: tuple  # poles found on the circle
    inner: PFDecomp = field(repr=False)
    outer: RatFun = field(repr=False)

    def remainder(self, f) -> RatFun:
        return _as_rf(f) - self.constant

    def coeff(self, k: int) -> Fraction:
        """Exact coefficient of ``u^k`` in ``f - constant``."""
        if k == 0:
            return Fraction(0)
        acc = Fraction(0)
        if k > 0:
            acc += self.poly_u[k]
            for d, cs in self.outer_poles:
                for m, a in enumerate(cs, start=1):
                    if a:
                        acc += a * (-1) ** m * math.comb(m + k - 1, k) / d ** (m + k)
        else:
            kk = -k
            for d, cs in self.inner_poles:
                for m, a in enumerate(cs, start=1):
                    if a and kk >= m:
                        if d == 0:
                            if kk == m:
                                acc += a
                        else:
                            acc += a * math.comb(kk - 1, kk - m) * d ** (kk - m)
        return acc

    def _family_range(self, bound_t: Fraction, t_B: Fraction, t_rho: Fraction) -> int:
        """Exclusive upper index beyond which every term of a geometric family is small."""
        c = bound_t - t_B
        v = 0
        while True:
            pv = self.p ** v
            if pv * t_rho >= c + v and pv * t_rho >= 1:
                return pv
            v += 1

    def significant_terms(self, bound: LogMag, limit: int = 20000) -> list[tuple[int, Fraction]]:
        """All ``(k, h_k)`` with ``|h_k| r^k / |k|_p > bound``.

        Tails of each geometric family are cut off with an exact bound, so
        the returned list is complete.
        """
        p, r = self.p, self.radius
        if r.is_zero:
            raise Unsupported("Laurent terms at a type-1 point")
        ks: set[int] = {k for k, a in enumerate(self.poly_u.coeffs) if k and a}
        bt = bound.t
        if bt is None:
            raise Unsupported("zero bound")
        for sign, poles in ((1, self.outer_poles), (-1, self.inner_poles)):
            for d, cs in poles:
                if d == 0:
                    ks.update(-m for m in range(1, len(cs) + 1))
                    continue
                ad = absval(d, p)
                if not any(cs):
                    continue
                t_B = min(absval(a, p).t - m * ad.t for m, a in enumerate(cs, start=1) if a)
                ratio = (r / ad) if sign == 1 else (ad / r)
                if ratio.t <= 0:
                    raise Unsupported("pole on the circle in a small-norm remainder")
                top = self._family_range(bt, t_B, ratio.t)
                if top > limit:
                    raise Unsupported(f"Laurent tail too long to certify ({top} terms)")
                ks.update(sign * k for k in range(1, top))
        out = []
        for k in sorted(ks):
            h = self.coeff(k)
            if h == 0:
                continue
            mu = absval(h, p) * r ** k / absval(k, p)
            if mu > bound:
                out.append((k, h))
        return out


def laurent_split(f, center, radius: LogMag, p: int, on_circle: str = "error") -> LaurentSplit:
    """Split ``f`` around the circle ``|T - center| = radius``.

    ``on_circle`` is ``"error"`` (raise :class:`PoleOnCircle`), ``"inner"``,
    ``"outer"``, or a collection of the on-circle poles to treat as inner
    (the rest go outer).  These are the classifications compared by the
    dual-evaluation protocol.
    """
    if isinstance(on_circle, str):
        if on_circle not in ("error", "inner", "outer"):
            raise ValueError(on_circle)
        inner_set = None
    else:
        inner_set = {as_fraction(q) for q in on_circle}
    f = _as_rf(f)
    center = as_fraction(center)
    pf = partial_fractions(f)
    inner, outer, circ = [], [], []
    for q, cs in pf.principal_parts:
        d = q - center
        dist = absval(d, p)
        if dist == radius and not radius.is_zero:
            circ.append(q)
            if inner_set is None and on_circle == "error":
                raise PoleOnCircle(f"pole {format_rational(q)} lies on the circle", pole=q)
            goes_in = (q in inner_set) if inner_set is not None else on_circle == "inner"
            (inner if goes_in else outer).append((d, cs))
        elif dist < radius:
            inner.append((d, cs))
        else:
            outer.append((d, cs))
    poly_u = pf.polynomial_part.shift(center)
    constant = poly_u[0]
    for d, cs in outer:
        for m, a in enumerate(cs, start=1):
            constant += a / (-d) ** m
    inner_pf = PFDecomp(Poly(), tuple((d + center, cs) for d, cs in inner))
    outer_pf = PFDecomp(pf.polynomial_part, tuple((d + center, cs) for d, cs in outer))
    return LaurentSplit(
        p=p,
        center=center,
        radius=radius,
        constant=constant,
        poly_u=Poly([0] + list(poly_u.coeffs[1:])),
        outer_poles=tuple(outer),
        inner_poles=tuple(inner),
        on_circle=tuple(circ),
        inner=inner_pf,
        outer=outer_pf.reassemble(),
    )


def pushforward_center_oracle(f, center, radius: LogMag, p: int, samples: int = 16,
                              constant=None, offsets=None) -> LogMag:
    """Minimum of ``|f - beta|`` over a deterministic grid of candidate ``beta``.

    Candidates are values ``f(center + j * tau)`` with ``|tau| <= radius``,
    ``j`` running over ``offsets`` (default ``0..samples-1``) and, if given,
    the Laurent constant.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    f = _as_rf(f)
    center = as_fraction(center)
    if radius.is_zero:
        step = Fraction(0)
    else:
        e = math.ceil(radius.t)
        step = Fraction(p) ** e
    cands = [] if constant is None else [as_fraction(constant)]
    for j in (range(samples) if offsets is None else offsets):
        tau = j * step
        try:
            cands.append(f(center + tau))
        except ZeroDivisionError:
            continue
    best = None
    for beta in cands:
        n = gauss_norm(f - beta, center, radius, p)
        if best is None or n < best:
            best = n
    return best if best is not None else gauss_norm(f, center, radius, p)


def circle_poles(f, center, radius: LogMag, p: int) -> list[Fraction]:
    """Poles of ``f`` on the circle ``|T - center| = radius``."""
    f = _as_rf(f)
    center = as_fraction(center)
    if radius.is_zero:
        return []
    return [q for q, _ in f.poles() if absval(q - center, p) == radius]
