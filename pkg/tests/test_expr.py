from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from berkspec.errors import NonRationalLiteral, ParseError, UnboundConstant
from berkspec.expr import parse_expr, parse_rational_literal
from berkspec.ratfun import Poly, RatFun

from conftest import T

consts = {"a": F(1, 25), "c": F(5)}


def test_example_a_expression():
    f = parse_expr("a/(T*(c−T))", consts)
    assert f == RatFun.const(F(1, 25)) / (T * (5 - T))


def test_unbound_constant_reports_position():
    with pytest.raises(UnboundConstant) as exc:
        parse_expr("a/(T*(c-T))", {"a": F(1)}, line=7, col=6)
    assert exc.value.line == 7 and exc.value.column == 13


@pytest.mark.parametrize("text", ["0.5*T", "1e3", "2.", "T + 3.25"])
def test_decimals_are_rejected(text):
    with pytest.raises(NonRationalLiteral):
        parse_expr(text, consts)


@pytest.mark.parametrize("text,col", [("(T+1", 5), ("T+*2", 3), ("T^(1/2)", 3), ("T $ 1", 3), ("", 1), ("1/(T-T)", 2)])
def test_syntax_errors(text, col):
    with pytest.raises(ParseError) as exc:
        parse_expr(text, consts)
    assert exc.value.column == col


def test_precedence_and_powers():
    assert parse_expr("-T^2") == -(T * T)
    assert parse_expr("2*T^-1") == RatFun.const(2) / T
    assert parse_expr("1/2/T") == RatFun.const(F(1, 2)) / T
    assert parse_expr("(T-1)^3 - T^3") == RatFun(Poly([-1, 3, -3]))
    assert parse_expr("- -3") == RatFun.const(3)


def test_rational_literals():
    assert parse_rational_literal(" -3/12 ") == F(-1, 4)
    assert parse_rational_literal("7") == 7
    for bad in ("1/0", "0.2", "a", "1/-2"):
        with pytest.raises(NonRationalLiteral):
            parse_rational_literal(bad)


coeffs = st.lists(st.fractions(max_denominator=50, min_value=-50, max_value=50), min_size=1, max_size=4)


@settings(max_examples=80, deadline=None)
@given(coeffs, coeffs.filter(lambda cs: any(cs)))
def test_render_parse_round_trip(num, den):
    f = RatFun(Poly(num), Poly(den))
    assert parse_expr(f.render()) == f
    assert parse_expr(f.render()).render() == f.render()
