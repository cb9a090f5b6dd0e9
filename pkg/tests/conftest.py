"""Shared builders for the worked examples."""

from fractions import Fraction as F

import pytest

from berkspec.diffmod import Derivation, DiffModule
from berkspec.ratfun import Poly, RatFun

T = RatFun.T()
P = 5


def lin(q) -> RatFun:
    """``T - q``."""
    return RatFun(Poly.linear(F(q)))


def example_a(a=F(1, 25), c=F(5)) -> DiffModule:
    """``d/dT + a/(T(c - T))``, rank one."""
    return DiffModule([[RatFun.const(a) / (T * (RatFun.const(c) - T))]], Derivation.ddT())


def rank3(a1=F(1, 5), a2=F(2, 5), a3=F(3, 5), c=F(2)) -> DiffModule:
    one, zero = RatFun.const(1), RatFun.const(0)
    rows = [
        [RatFun.const(a1) / T, one, zero],
        [zero, RatFun.const(a2) / lin(1), one],
        [zero, zero, RatFun.const(a3) / lin(c)],
    ]
    return DiffModule(rows, Derivation.ddT())


def rank2(a0=F(1, 5), a1=F(1, 25), a2=F(2, 25)) -> DiffModule:
    one, zero = RatFun.const(1), RatFun.const(0)
    rows = [
        [RatFun.const(a0) / T + RatFun.const(a1) / lin(1), one],
        [zero, RatFun.const(a0) / T + RatFun.const(a2) / lin(2)],
    ]
    return DiffModule(rows, Derivation.ddT())


@pytest.fixture
def mod_a():
    return example_a()


@pytest.fixture
def mod3():
    return rank3()


@pytest.fixture
def mod2():
    return rank2()
