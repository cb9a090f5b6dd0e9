from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from berkspec.errors import BasisNotNeighborhood
from berkspec.kompakt import (
    CompactSet, OpenRegion, Orbit, Piece, converges, in_neighborhood, orbit_disjoint, orbit_eq,
    orbit_inside_region, point_neighborhood, zp_neighborhood,
)
from berkspec.scalars import LogMag

P = 5
ZERO = LogMag.zero()


def orb(c, mag_t):
    return Orbit(F(c), ZERO if mag_t is None else LogMag(F(mag_t)), P)


def test_orbit_equality_examples():
    assert orbit_eq(orb(0, None), orb(1, None))
    assert not orbit_eq(orb(F(1, 5), None), orb(0, None))
    assert orbit_eq(orb(F(1, 5), -2), orb(0, -2))


def test_orbit_disjointness_examples():
    assert orbit_disjoint(orb(0, -1), orb(0, -2))
    assert orbit_disjoint(orb(0, None), orb(F(1, 5), None))
    assert not orbit_disjoint(orb(0, 1), orb(2, 1))


def test_orbits_above_one_are_points():
    assert orb(F(1, 5), -2).is_point
    assert not orb(0, 1).is_point
    assert orb(F(1, 5), None).render() == "{1/5}+ℤ_p"
    assert orb(0, -1).render() == "{x_{0,5}}"


def test_compact_set_equality_ignores_labels():
    assert CompactSet.of(orb(F(1, 125), -3)) == CompactSet.of(orb(0, -3))
    assert CompactSet.of(orb(0, None), orb(3, None)) == CompactSet.of(orb(0, None))
    K = CompactSet.of(orb(F(1, 5), None), orb(0, -1))
    assert K.render() == "{1/5}+ℤ_p ∪ {x_{0,5}}"
    assert CompactSet.of(orb(F(1, 5), None)) | CompactSet.of(orb(0, -1)) == K


def test_literal_five_disc_union_does_not_cover_zp():
    # 5 lies in Z_5 but in none of the discs D^-(i, 1/5), i = 0..4
    five = OpenRegion(tuple(Piece.disc(i, LogMag(F(1))) for i in range(5)))
    assert not orbit_inside_region(orb(0, None), five)
    U, ws = zp_neighborhood(0, 1, P)
    assert in_neighborhood(CompactSet.of(orb(0, None)), U, ws)


def test_neighborhood_examples():
    x = CompactSet.of(orb(0, 1))
    disc = OpenRegion.of(Piece.disc(0, LogMag(F(1))))
    assert not in_neighborhood(x, disc, [disc])
    ring = OpenRegion.of(Piece.annulus(0, LogMag(F(-1)), LogMag(F(-3))))
    assert in_neighborhood(CompactSet.of(orb(0, -2)), ring, [ring])


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_shrinking_orbits_converge_to_zp(n):
    U, ws = zp_neighborhood(0, n, P)
    limit = CompactSet.of(orb(0, None))
    rep = converges(lambda l: CompactSet.of(orb(0, l)), limit, [(U, ws)], 8)
    assert rep.l0 == [n + 1]


def test_constant_sequences():
    limit = CompactSet.of(orb(0, None))
    basis = [zp_neighborhood(0, n, P) for n in range(3)]
    assert converges(lambda l: limit, limit, basis, 4).l0 == [0, 0, 0]
    pt_limit = CompactSet.of(orb(0, -2))
    ring = OpenRegion.of(Piece.annulus(0, LogMag(F(-1)), LogMag(F(-3))))
    rep = converges(lambda l: CompactSet.of(orb(F(1, 5), -2)), pt_limit, [(ring, [ring])], 3)
    assert rep.l0 == [0]


def test_basis_must_be_a_neighborhood():
    limit = CompactSet.of(orb(0, None))
    far = OpenRegion.of(Piece.disc(F(1, 5), LogMag(F(1))))
    with pytest.raises(BasisNotNeighborhood):
        converges(lambda l: limit, limit, [(far, [far])], 2)


@settings(max_examples=60, deadline=None)
@given(st.fractions(max_denominator=200), st.fractions(max_denominator=200),
       st.fractions(-3, 3, max_denominator=4))
def test_orbit_eq_is_symmetric_and_exclusive_with_disjoint(c1, c2, t):
    a, b = Orbit(c1, LogMag(t), P), Orbit(c2, LogMag(t), P)
    assert orbit_eq(a, b) == orbit_eq(b, a)
    assert orbit_eq(a, b) != orbit_disjoint(a, b)


def test_point_neighborhood_for_plain_points():
    K = CompactSet((Orbit(0, ZERO, P, plain=True), Orbit(F(1, 5), ZERO, P, plain=True)), P)
    U, ws = point_neighborhood([0, F(1, 5)], LogMag(F(1)))
    assert in_neighborhood(K, U, ws)
    moved = CompactSet((Orbit(F(25), ZERO, P, plain=True), Orbit(F(1, 5), ZERO, P, plain=True)), P)
    assert in_neighborhood(moved, U, ws)
    far = CompactSet((Orbit(F(1, 5), ZERO, P, plain=True),), P)
    assert not in_neighborhood(far, U, ws)
