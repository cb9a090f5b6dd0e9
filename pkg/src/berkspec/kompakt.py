"""Compact sets made of Z_p-orbits of points, and the exponential topology.

An orbit ``Orbit(c, s)`` is ``{x_{c+g, s} : g in Z_p}``.  A ``plain`` orbit
is the single point ``x_{c, s}`` without the Z_p closure; matrix spectra
use those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import BasisNotNeighborhood
from .scalars import LogMag, absval, as_fraction, dist_zp, format_rational, parse_rational


@dataclass(frozen=True, eq=False)
class Orbit:
    center: Fraction
    radius: LogMag
    p: int
    plain: bool = False

    def __post_init__(self):
        object.__setattr__(self, "center", as_fraction(self.center))

    @property
    def is_point(self) -> bool:
        return self.plain or self.radius >= LogMag.one()

    def __eq__(self, other):
        if not isinstance(other, Orbit):
            return NotImplemented
        return orbit_eq(self, other)

    def __hash__(self):
        return hash((self.p, self.radius, self.plain))

    def render(self) -> str:
        c = format_rational(self.center)
        if self.radius.is_zero:
            pt = c
        else:
            pt = f"x_{{{c},{self.radius.render(self.p)}}}"
        if self.is_point:
            return "{" + pt + "}"
        return "{" + pt + "}+ℤ_p"

    def to_json(self) -> dict:
        t = self.radius.t
        return {"center": format_rational(self.center),
                "t": "infinity" if t is None else format_rational(t),
                "plain": self.plain}

    @classmethod
    def from_json(cls, data: dict, p: int) -> "Orbit":
        lr = data["t"]
        rad = LogMag(None if lr == "infinity" else parse_rational(lr))
        return cls(parse_rational(data["center"]), rad, p, bool(data.get("plain", False)))


def orbit_eq(o1: Orbit, o2: Orbit) -> bool:
    if o1.p != o2.p or o1.radius != o2.radius:
        return False
    d = o1.center - o2.center
    if o1.plain or o2.plain:
        if o1.is_point and o2.is_point:
            return absval(d, o1.p) <= o1.radius
        return False
    return dist_zp(d, o1.p) <= o1.radius


def orbit_disjoint(o1: Orbit, o2: Orbit) -> bool:
    if o1.radius != o2.radius:
        return True
    d = o1.center - o2.center
    if o1.plain and o2.plain:
        return absval(d, o1.p) > o1.radius
    return dist_zp(d, o1.p) > o1.radius


@dataclass(frozen=True, eq=False)
class CompactSet:
    orbits: tuple
    p: int

    def __post_init__(self):
        out: list[Orbit] = []
        for o in self.orbits:
            if not any(orbit_eq(o, q) for q in out):
                out.append(o)
        object.__setattr__(self, "orbits", tuple(out))

    @classmethod
    def of(cls, *orbits: Orbit) -> "CompactSet":
        if not orbits:
            raise ValueError("empty compact set")
        return cls(tuple(orbits), orbits[0].p)

    def union(self, other: "CompactSet") -> "CompactSet":
        return CompactSet(self.orbits + other.orbits, self.p)

    def __or__(self, other):
        return self.union(other)

    def __eq__(self, other):
        if not isinstance(other, CompactSet):
            return NotImplemented
        return (all(any(orbit_eq(a, b) for b in other.orbits) for a in self.orbits)
                and all(any(orbit_eq(a, b) for b in self.orbits) for a in other.orbits))

    def __hash__(self):
        return hash((self.p, len(self.orbits)))

    def __len__(self):
        return len(self.orbits)

    def render(self) -> str:
        return " ∪ ".join(o.render() for o in self.orbits)

    def to_json(self) -> list:
        return [o.to_json() for o in self.orbits]


# -- open regions ------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """``{lo < |T - center| < hi}``; ``None`` for either bound means none.

    A point ``x_{e, r}`` lies in the piece iff ``max(|e - center|, r)`` does.
    """

    center: Fraction
    lo: LogMag | None
    hi: LogMag | None

    @classmethod
    def disc(cls, b, s: LogMag) -> "Piece":
        return cls(as_fraction(b), None, s)

    @classmethod
    def annulus(cls, b, lo: LogMag, hi: LogMag) -> "Piece":
        return cls(as_fraction(b), lo, hi)

    @classmethod
    def outside(cls, b, s: LogMag) -> "Piece":
        """``P^1`` minus the closed disc ``D(b, s)``."""
        return cls(as_fraction(b), s, None)

    def admits(self, value: LogMag) -> bool:
        if self.lo is not None and not self.lo < value:
            return False
        if self.hi is not None and not value < self.hi:
            return False
        return True

    def render(self, p: int) -> str:
        c = format_rational(self.center)
        if self.lo is None:
            return f"D^-({c},{self.hi.render(p)})"
        if self.hi is None:
            return f"{{|T-{c}| > {self.lo.render(p)}}}"
        return f"{{{self.lo.render(p)} < |T-{c}| < {self.hi.render(p)}}}"


@dataclass(frozen=True)
class OpenRegion:
    pieces: tuple

    @classmethod
    def of(cls, *pieces: Piece) -> "OpenRegion":
        return cls(tuple(pieces))

    def render(self, p: int) -> str:
        return " ∪ ".join(q.render(p) for q in self.pieces)


def _value_span(center, radius: LogMag, m: int, plain: bool, b, p: int):
    """Values of ``max(|c + p^m g - b|, radius)`` over ``g`` in Z_p.

    Returns ``("one", v)`` for a single value, or ``("range", sigma, m)``
    meaning ``{sigma} ∪ {p^-k : k >= m, p^-k >= sigma}``.
    """
    e = as_fraction(center) - as_fraction(b)
    ae = absval(e, p)
    scale = LogMag(Fraction(m))
    if plain or ae > scale or radius >= scale:
        return ("one", max(ae, radius))
    return ("range", radius, m)


def _span_inside(span, piece: Piece) -> bool:
    if span[0] == "one":
        return piece.admits(span[1])
    _, sigma, m = span
    top = LogMag(Fraction(m))
    return piece.admits(sigma) and piece.admits(top)


def _span_meets(span, piece: Piece) -> bool:
    if span[0] == "one":
        return piece.admits(span[1])
    _, sigma, m = span
    if piece.admits(sigma):
        return True
    # look for an integer k >= m with p^-k in (lo, hi) and p^-k >= sigma
    k_lo = m
    if piece.hi is not None:
        k_lo = max(k_lo, math.floor(piece.hi.t) + 1)
    bounds = []
    if sigma.t is not None:
        bounds.append(math.floor(sigma.t))
    if piece.lo is not None and piece.lo.t is not None:
        bounds.append(math.ceil(piece.lo.t) - 1)
    if not bounds:
        return True
    return k_lo <= min(bounds)


def orbit_inside_piece(o: Orbit, piece: Piece, m: int = 0, center=None) -> bool:
    c = o.center if center is None else center
    return _span_inside(_value_span(c, o.radius, m, o.plain, piece.center, o.p), piece)


def orbit_meets_piece(o: Orbit, piece: Piece) -> bool:
    return _span_meets(_value_span(o.center, o.radius, 0, o.plain, piece.center, o.p), piece)


def orbit_inside_region(o: Orbit, U: OpenRegion, max_depth: int = 12) -> bool:
    """Exact ``o ⊂ U`` by splitting the orbit into residue classes."""

    def rec(c: Fraction, m: int, pieces) -> bool:
        spans = [(q, _value_span(c, o.radius, m, o.plain, q.center, o.p)) for q in pieces]
        if any(_span_inside(sp, q) for q, sp in spans):
            return True
        if o.is_point or o.radius >= LogMag(Fraction(m)):
            return False  # a single point, already tested against every piece
        if m >= max_depth:
            return False
        # pieces missing this residue class cannot contain any part of it
        live = [q for q, sp in spans if _span_meets(sp, q)]
        if not live:
            return False
        step = Fraction(o.p) ** m
        return all(rec(c + j * step, m + 1, live) for j in range(o.p))

    return rec(o.center, 0, U.pieces)


def orbit_meets_region(o: Orbit, W: OpenRegion) -> bool:
    return any(orbit_meets_piece(o, q) for q in W.pieces)


def in_neighborhood(K: CompactSet, U: OpenRegion, witnesses: Sequence[OpenRegion]) -> bool:
    """``K ⊂ U`` and ``K`` meets every witness; witnesses are trusted to cover ``U``."""
    if not all(orbit_inside_region(o, U) for o in K.orbits):
        return False
    return all(any(orbit_meets_region(o, W) for o in K.orbits) for W in witnesses)


@dataclass
class ConvergenceReport:
    l0: list  # per basis element: least l0 or None
    l_max: int
    cover_assumed: bool = True
    membership: list = field(default_factory=list)  # per basis: list of booleans over l

    @property
    def converged(self) -> bool:
        return all(v is not None for v in self.l0)


def converges(seq: Callable[[int], CompactSet], limit: CompactSet,
              basis: Sequence[tuple[OpenRegion, Sequence[OpenRegion]]], l_max: int) -> ConvergenceReport:
    """Least ``l0`` per basis neighbourhood with ``seq(l)`` inside it for ``l0 <= l <= l_max``."""
    for i, (U, ws) in enumerate(basis):
        if not in_neighborhood(limit, U, ws):
            raise BasisNotNeighborhood(f"basis element {i} is not a neighbourhood of the limit")
    sets = [seq(l) for l in range(l_max + 1)]
    l0s, table = [], []
    for U, ws in basis:
        flags = [in_neighborhood(K, U, ws) for K in sets]
        table.append(flags)
        l0 = None
        for l in range(l_max, -1, -1):
            if not flags[l]:
                break
            l0 = l
        l0s.append(l0)
    return ConvergenceReport(l0s, l_max, True, table)


def zp_neighborhood(a, n: int, p: int, plain_points: bool = False) -> tuple[OpenRegion, list[OpenRegion]]:
    """The basic neighbourhood of ``a + Z_p`` by open discs of radius ``p^-n``.

    The discs are centred at ``a + i`` for the ``p^(n+1)`` residues mod
    ``p^(n+1)``; fewer centres would not cover ``Z_p``.
    """
    s = LogMag(Fraction(n))
    a = as_fraction(a)
    discs = [OpenRegion.of(Piece.disc(a + i, s)) for i in range(p ** (n + 1))]
    U = OpenRegion(tuple(d.pieces[0] for d in discs))
    return U, discs


def point_neighborhood(points: Iterable, s: LogMag) -> tuple[OpenRegion, list[OpenRegion]]:
    """Open discs of radius ``s`` around finitely many scalars."""
    discs = [OpenRegion.of(Piece.disc(q, s)) for q in points]
    return OpenRegion(tuple(d.pieces[0] for d in discs)), discs
