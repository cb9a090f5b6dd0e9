import random
from fractions import Fraction as F

import pytest
import sympy

from berkspec import linalg
from berkspec.berkline import Disc, complement_disc
from berkspec.errors import EigenvalueOnBoundary, PoleOnBoundary
from berkspec.funcalc import (
    cauchy_idempotent, char_poly, lagrange_idempotent, matrix_spectrum, res_disc,
    res_intersection, resolvent,
)
from berkspec.ratfun import Poly, RatFun
from berkspec.scalars import LogMag

from conftest import P, T, lin

UNIT = Disc(0, LogMag(0))
S = sympy.Symbol("S")


def _sym(f: RatFun):
    return f.num.to_sympy(S) / f.den.to_sympy(S)


def _sympy_projector(A, cluster):
    """``V diag(1_cluster) V^-1`` from a sympy diagonalization."""
    M = sympy.Matrix(A)
    V, D = M.diagonalize()
    mask = sympy.diag(*[1 if D[i, i] in cluster else 0 for i in range(D.rows)])
    E = V * mask * V.inv()
    return [[F(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in E.row(i)]
            for i in range(E.rows)]


def test_resolvent_of_zero_and_identity():
    assert resolvent([[0]]).at(0, 0) == RatFun.const(-1) / T
    R = resolvent([[1, 0], [0, 1]])
    assert R.at(0, 0) == RatFun.const(-1) / lin(1)
    assert R.at(0, 1) == RatFun.const(0)


def test_resolvent_against_sympy_inverse():
    A = [[F(1, 5), 2], [0, 3]]
    R = resolvent(A)
    ref = (sympy.Matrix(A) - S * sympy.eye(2)).inv()
    for i in range(2):
        for j in range(2):
            assert sympy.simplify(_sym(R.at(i, j)) - ref[i, j]) == 0


def test_char_poly_monic():
    cp = char_poly([[0, -1], [1, 0]])
    assert cp == Poly([1, 0, 1])


def test_res_disc_affine_disc_is_zero():
    assert res_disc(RatFun.const(1) / lin(F(1, 5)), UNIT, P) == 0


def test_res_disc_complement_collects_hole_poles():
    hole = Disc(0, LogMag(0), closed=True, contains_infinity=True)
    f = RatFun.const(1) / lin(5) + RatFun.const(3) / lin(25) ** 2 + RatFun.const(F(2, 7)) / lin(0)
    oracle = sum(sympy.residue(_sym(f), S, q) for q in (5, 25, 0))
    assert res_disc(f, hole, P) == F(str(oracle))


def test_res_disc_boundary_pole_rejected():
    with pytest.raises(PoleOnBoundary):
        res_disc(RatFun.const(1) / lin(1), UNIT, P)


def test_res_intersection_splits_poles():
    Dp = complement_disc(UNIT, 1)
    f = RatFun.const(2) / lin(25) + RatFun.const(7) / lin(F(1, 25)) + T
    assert res_intersection(f, UNIT, Dp, P) == 2
    assert res_intersection(f, Dp, UNIT, P) == 2


def test_res_intersection_annulus_pole():
    Dp = complement_disc(UNIT, 1)
    with pytest.raises(PoleOnBoundary):
        res_intersection(RatFun.const(1) / lin(1), UNIT, Dp, P)


def test_cauchy_idempotent_upper_triangular():
    e = cauchy_idempotent([[0, 1], [0, F(1, 5)]], UNIT, P)
    assert [list(r) for r in e.e] == [[1, -5], [0, 0]]
    assert e.cluster == (0,)
    assert e.trace == 1


def test_cauchy_idempotent_whole_cluster_rejected():
    with pytest.raises(ValueError):
        cauchy_idempotent([[1, 0], [0, 1]], Disc(1, LogMag(1)), P)


def test_boundary_eigenvalue_rejected():
    with pytest.raises(EigenvalueOnBoundary):
        cauchy_idempotent([[1, 0], [0, F(1, 5)]], UNIT, P)


def test_lagrange_idempotent_non_separable_cluster():
    # 1/5 and 1/25 cannot be cut off from 0 by a single disc, only the polynomial route applies
    A = [[0, 0, 0], [0, F(1, 5), 0], [0, 0, F(1, 25)]]
    assert lagrange_idempotent(A, [F(1, 5), F(1, 25)]) == [[0, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_lagrange_full_cluster_is_identity():
    assert lagrange_idempotent([[1, 0], [0, 1]], [1]) == [[1, 0], [0, 1]]


def test_cauchy_idempotent_matches_sympy_on_conjugates():
    rng = random.Random(7)
    done = 0
    while done < 10:
        ev = [F(rng.choice([-4, -3, -2, -1, 1, 2, 3, 4]) * 25), F(rng.randint(1, 4)), F(rng.randint(1, 4), 5)]
        if len(set(ev)) < 3:
            continue
        Q = [[F(rng.randint(-2, 2)) for _ in range(3)] for _ in range(3)]
        if linalg.det(Q, F(1), F(0)) == 0:
            continue
        Qi = linalg.inverse(Q, F(1), F(0))
        D = [[ev[i] if i == j else F(0) for j in range(3)] for i in range(3)]
        A = linalg.mat_mul(linalg.mat_mul(Q, D, F(0)), Qi, F(0))
        # |25k| < 5^-1 < |k|, |k/5|: D(0, 5^-1) isolates the multiple of 25
        e = cauchy_idempotent(A, Disc(0, LogMag(1)), P)
        assert [list(r) for r in e.e] == _sympy_projector(A, {sympy.Integer(ev[0])})
        done += 1


def test_matrix_spectrum_split_cases():
    ms = matrix_spectrum([[1, 0], [0, F(1, 5)]], P)
    assert not ms.partial
    assert {o.center for o in ms.points.orbits} == {1, F(1, 5)}
    assert sorted(ms.magnitudes) == [LogMag(0), LogMag(-1)]
    nil = matrix_spectrum([[0, 1], [0, 0]], P)
    assert [o.center for o in nil.points.orbits] == [0]
    assert nil.magnitudes == (LogMag.zero(), LogMag.zero())


def test_matrix_spectrum_partial_for_irrational_roots():
    ms = matrix_spectrum([[0, -1], [1, 0]], P)
    assert ms.partial and ms.points is None
    assert ms.magnitudes == (LogMag(0), LogMag(0))
    comp = matrix_spectrum([[0, -5], [1, 0]], P)
    assert comp.partial
    assert comp.magnitudes == (LogMag(F(1, 2)), LogMag(F(1, 2)))
