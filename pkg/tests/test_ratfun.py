from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from berkspec.errors import IrreducibleDenominator, PoleAtTypeOnePoint, PoleOnCircle, Unsupported
from berkspec.ratfun import (
    Poly, RatFun, circle_poles, gauss_norm, laurent_split, partial_fractions,
    pushforward_center_oracle, rational_roots,
)
from berkspec.scalars import LogMag, absval

from conftest import T

X = sympy.Symbol("X")
a, c = F(1, 25), F(5)
g_outer = RatFun.const(a) / (RatFun.const(c) - T)


def sympy_gauss_norm(f: RatFun, center, t, p) -> LogMag:
    """Oracle: Taylor-shift numerator and denominator with sympy, take max |coeff| r^k."""
    def norm(poly):
        e = sympy.Poly(sympy.expand(poly.to_sympy(X).subs(X, X + sympy.Rational(center.numerator, center.denominator))), X)
        best = LogMag.zero()
        for (k,), coef in e.terms():
            best = max(best, absval(F(int(coef.p), int(coef.q)), p) * LogMag(F(t) * k))
        return best
    return norm(f.num) / norm(f.den)


def test_poly_arithmetic():
    f = Poly([1, 0, 1])
    q, r = f.divmod(Poly([0, 1]))
    assert q == Poly([0, 1]) and r == Poly([1])
    assert f.shift(2) == Poly([5, 4, 1])
    assert f.derivative() == Poly([0, 2])
    assert Poly.linear(3)(3) == 0


def test_ratfun_is_reduced_with_monic_denominator():
    f = (T * T - 1) / (RatFun.const(2) * (T - 1))
    assert f == (T + 1) / RatFun.const(2)
    assert f.den.lead == 1


def test_gauss_norm_examples():
    f = T * T + 5
    assert gauss_norm(f, 0, LogMag(F(0)), 5) == LogMag(F(0))
    assert gauss_norm(f, 0, LogMag(F(2)), 5) == LogMag(F(1))
    assert gauss_norm(RatFun.const(1), F(3, 7), LogMag(F(5)), 5) == LogMag.one()
    with pytest.raises(PoleAtTypeOnePoint):
        gauss_norm(1 / T, 0, LogMag.zero(), 5)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=4).filter(any),
       st.lists(st.integers(-30, 30), min_size=1, max_size=4).filter(any),
       st.fractions(max_denominator=30), st.fractions(-3, 3, max_denominator=4), st.sampled_from([2, 3, 5]))
def test_gauss_norm_against_sympy_shift(num, den, center, t, p):
    f = RatFun(Poly(num), Poly(den))
    assert gauss_norm(f, center, LogMag(t), p) == sympy_gauss_norm(f, center, t, p)


def test_partial_fraction_examples():
    pf = partial_fractions(1 / (T * (1 - T)))
    assert pf.polynomial_part.is_zero()
    assert dict(pf.principal_parts) == {F(0): (F(1),), F(1): (F(-1),)}  # 1/(1-T) = -1/(T-1)
    pf = partial_fractions((T * T + 1) / T)
    assert pf.polynomial_part == Poly([0, 1]) and dict(pf.principal_parts) == {F(0): (F(1),)}
    with pytest.raises(IrreducibleDenominator):
        partial_fractions(1 / (T * T + 1))


def test_partial_fractions_agree_with_sympy_apart():
    f = (T ** 3 + 2) / (T * T * (T - 1) * (T + F(1, 5)) ** 2)
    pf = partial_fractions(f)
    assert pf.reassemble() == f
    terms = sympy.Add.make_args(sympy.apart(f.num.to_sympy(X) / f.den.to_sympy(X), X))
    expect = {}
    for term in terms:
        (root, k), = sympy.roots(sympy.denom(sympy.together(term)), X).items()
        expect[(F(str(root)), k)] = F(str(sympy.simplify(term * (X - root) ** k)))
    got = {(q, k): v for q, cs in pf.principal_parts for k, v in enumerate(cs, start=1) if v}
    assert got == expect


def test_rational_roots():
    f = Poly.linear(F(1, 5)) ** 2 * Poly.linear(3)
    assert sorted(rational_roots(f)) == [(F(1, 5), 2), (F(3), 1)]
    with pytest.raises(IrreducibleDenominator):
        rational_roots(Poly([1, 0, 1]) * Poly.linear(2))


@pytest.mark.parametrize("t", [F(3, 2), F(2), F(5, 2), F(3), F(4)])
def test_laurent_inside_pole_circle(t):
    # r < |c| = 1/5: constant a/c and remainder norm |a/c^2| r = 625 r
    s = laurent_split(g_outer, 0, LogMag(t), 5)
    assert s.constant == F(1, 125)
    h = g_outer - s.constant
    assert gauss_norm(h, 0, LogMag(t), 5) == LogMag(F(-4) + t)


@pytest.mark.parametrize("t", [F(0), F(1, 2), F(1, 3), F(-1), F(1, 5)])
def test_laurent_outside_pole_circle(t):
    s = laurent_split(g_outer, 0, LogMag(t), 5)
    assert s.constant == 0
    assert gauss_norm(g_outer, 0, LogMag(t), 5) == LogMag(-(F(2) + t))  # 25/r


def test_laurent_constant_matches_sympy_series_oracle():
    # oracle: sum of the outer partial fractions and polynomial part evaluated at the center
    f = (T ** 2 + 3) / (T * (T - 1) * (T - F(1, 25)))
    for center, t in [(F(0), F(1)), (F(0), F(-1)), (F(1), F(1)), (F(0), F(3))]:
        expr = f.num.to_sympy(X) / f.den.to_sympy(X)
        total = sympy.Integer(0)
        for term in sympy.Add.make_args(sympy.apart(expr, X)):
            poles = sympy.solve(sympy.denom(sympy.factor(term)), X)
            if not poles or absval(F(str(poles[0])) - center, 5) > LogMag(t):
                total += term.subs(X, sympy.Rational(center.numerator, center.denominator))
        assert laurent_split(f, center, LogMag(t), 5).constant == F(str(total))


def test_laurent_on_circle_policy():
    f = 1 / (T - 1)
    assert circle_poles(f, 0, LogMag(F(0)), 5) == [F(1)]
    with pytest.raises(PoleOnCircle):
        laurent_split(f, 0, LogMag(F(0)), 5)
    assert laurent_split(f, 0, LogMag(F(0)), 5, on_circle="outer").constant == -1
    assert laurent_split(f, 0, LogMag(F(0)), 5, on_circle="inner").constant == 0


def test_laurent_constant_function():
    s = laurent_split(RatFun.const(7), 0, LogMag(F(1)), 5)
    assert s.constant == 7 and not s.significant_terms(LogMag(F(1, 4)))


def test_laurent_coefficients_against_series():
    # |5| = 1/5 puts the pole 5 inside the unit circle, |1/25| = 25 puts 1/25 outside
    A = 1 / (F(5) - F(1, 25))
    f = 1 / ((T - 5) * (T - F(1, 25)))
    s = laurent_split(f, 0, LogMag(F(0)), 5)
    for m in range(1, 6):
        # A/(u-5) = A sum_k 5^k u^(-k-1)
        assert s.coeff(-m) == A * F(5) ** (m - 1)
    # -A/(u-d) = A/d sum_k (u/d)^k with d = 1/25
    for k in range(1, 6):
        assert s.coeff(k) == A / F(1, 25) ** (k + 1)
    assert s.constant == A / F(1, 25)
    assert s.coeff(0) == 0  # coefficients describe f - constant


def test_significant_terms_rejects_nondecaying_tails():
    # a pole on the circle treated as outer gives a ratio-one tail
    s = laurent_split(1 / (T - 1), 0, LogMag(F(0)), 5, on_circle="outer")
    with pytest.raises(Unsupported):
        s.significant_terms(LogMag(F(1, 4)))


def test_pushforward_oracle():
    assert pushforward_center_oracle(g_outer, 0, LogMag(F(3)), 5, constant=F(1, 125)) == LogMag(F(-1))
    assert pushforward_center_oracle(g_outer, 0, LogMag(F(3)), 5) >= LogMag(F(-1))
    assert pushforward_center_oracle(RatFun.const(4), 0, LogMag(F(1)), 5).is_zero
    assert pushforward_center_oracle(T, 0, LogMag(F(0)), 5) == LogMag.one()
