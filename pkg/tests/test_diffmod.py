from fractions import Fraction as F

import pytest

from berkspec.berkline import BerkPoint
from berkspec.diffmod import (
    Derivation, DiffModule, apply_diff_polynomial, change_derivation, cyclic_vector,
    diff_polynomial, dual, newton_polygon, newton_polygon_points, twist, wronskian,
)
from berkspec.errors import NotCyclic, NotTriangular, PoleAtPoint
from berkspec.ratfun import RatFun
from berkspec.scalars import LogMag

from conftest import T, example_a, rank3

ONE, ZERO = RatFun.const(1), RatFun.const(0)
a, c = F(1, 25), F(5)


def test_change_to_centered_derivation():
    M0 = change_derivation(example_a(), Derivation.centered(0))
    assert M0.matrix[0][0] == RatFun.const(a) / (RatFun.const(c) - T)
    assert change_derivation(M0, Derivation.centered(0)) is M0
    assert change_derivation(M0, Derivation.ddT()).matrix == example_a().matrix


def test_nabla_is_leibniz_plus_matrix():
    M = rank3()
    v = [T, ONE, ZERO]
    out = M.nabla(v)
    assert out[0] == ONE + RatFun.const(F(1, 5)) + ONE  # d(T) + (a1/T) T + 1
    assert out[1] == RatFun.const(F(2, 5)) / (T - 1)


def test_twist_and_dual():
    M = DiffModule([[RatFun.const(F(1, 5))]], Derivation.ddT())
    assert twist(M, 0) == M
    assert twist(M, F(1, 5)).matrix[0][0].is_zero()
    assert twist(twist(rank3(), F(2, 3)), F(-2, 3)) == rank3()
    g = RatFun.const(3) / T
    assert dual(DiffModule([[g]], Derivation.ddT())).matrix[0][0] == -g
    assert dual(dual(rank3())) == rank3()
    D = DiffModule([[g, ZERO], [ZERO, T]], Derivation.ddT())
    assert dual(D).matrix == ((-g, ZERO), (ZERO, -T))


def test_triangular_detection():
    assert rank3().triangular_kind() == "upper"
    lower = DiffModule([[T, ZERO], [ONE, T]], Derivation.ddT())
    assert lower.triangular_kind() == "lower"
    full = DiffModule([[T, ONE], [ONE, T]], Derivation.ddT())
    with pytest.raises(NotTriangular):
        full.diagonal()


def test_cyclic_vector_nilpotent_example():
    M = DiffModule([[ZERO, ONE], [ZERO, ZERO]], Derivation.ddT())
    m = cyclic_vector(M, T)
    assert m == [ONE, T]
    assert wronskian(M, m) == 1 - T * T


def test_cyclic_vector_rank_one():
    M = DiffModule([[RatFun.const(7) / T]], Derivation.ddT())
    assert cyclic_vector(M, T) == [ONE]


def test_cyclic_vector_scalar_diagonal():
    g = RatFun.const(2) / T
    M = DiffModule([[g, ZERO], [ZERO, g]], Derivation.ddT())
    m = cyclic_vector(M, T)
    assert m == [ONE - T * g, T]  # e_1 + T(e_2 - g e_1)
    # m = (-1, T), ∇m = (-2/T, 3): determinant -3 + 2
    assert wronskian(M, m) == RatFun.const(-1)


def test_cyclic_vector_rejects_constant_f():
    M = DiffModule([[ZERO, ONE], [ZERO, ZERO]], Derivation.ddT())
    with pytest.raises(NotCyclic):
        cyclic_vector(M, RatFun.const(3))


def test_diff_polynomial_rank_one_and_nilpotent():
    g = RatFun.const(3) / (T - 1)
    M = DiffModule([[g]], Derivation.ddT())
    P = diff_polynomial(M, [ONE])
    assert P.coefficients == (-g,)  # ∇ e_1 = g e_1
    assert apply_diff_polynomial(M, P, [ONE]) == [ZERO]
    N = DiffModule([[ZERO, ONE], [ZERO, ZERO]], Derivation.ddT())
    m = cyclic_vector(N, T)
    Q = diff_polynomial(N, m)
    assert all(x.is_zero() for x in apply_diff_polynomial(N, Q, m))


def test_diff_polynomial_diagonal_residual():
    g1, g2 = RatFun.const(F(1, 5)) / T, RatFun.const(2) / (T - 3)
    M = DiffModule([[g1, ZERO], [ZERO, g2]], Derivation.ddT())
    m = cyclic_vector(M)
    P = diff_polynomial(M, m)
    assert all(x.is_zero() for x in apply_diff_polynomial(M, P, m))


def test_newton_polygon_examples():
    x = BerkPoint.at(0, 0, 5)
    segs = newton_polygon([ZERO, RatFun.const(F(-1, 25))], x)
    assert sorted((s.root_magnitude, s.multiplicity) for s in segs) == [(LogMag.zero(), 1), (LogMag(F(-2)), 1)]
    segs = newton_polygon([RatFun.const(F(-1, 25))], x)  # S - a with |a| = 25
    assert [(s.root_magnitude, s.multiplicity) for s in segs] == [(LogMag(F(-2)), 1)]
    segs = newton_polygon([ZERO, ZERO], x)
    assert [(s.root_magnitude, s.multiplicity) for s in segs] == [(LogMag.zero(), 2)]
    with pytest.raises(PoleAtPoint):
        newton_polygon([ONE / T], BerkPoint.at(0, None, 5))


def test_newton_polygon_hull():
    # valuations 0, 3, 1, 0 at i = 0..3: the middle point lies above the hull
    segs = newton_polygon_points([(0, F(0)), (1, F(3)), (2, F(1)), (3, F(0))])
    assert sum(s.multiplicity for s in segs) == 3
    assert [s.slope for s in segs] == [F(0)]
