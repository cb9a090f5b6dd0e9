"""Points, discs and affinoid domains of the Berkovich projective line.

Only type-1 and type-2 points with rational centers and radii in ``p^Q``
are representable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidInterval, MarginTooLarge, NoComplement
from .scalars import LogMag, absval, as_fraction, format_rational, parse_rational


@dataclass(frozen=True, eq=False)
class BerkPoint:
    """The point ``x_{center, radius}``."""

    center: Fraction
    radius: LogMag
    p: int

    def __post_init__(self):
        object.__setattr__(self, "center", as_fraction(self.center))

    @classmethod
    def at(cls, center, t, p: int) -> "BerkPoint":
        """Point with radius ``p^(-t)``; ``t=None`` gives the type-1 point."""
        return cls(center, LogMag(None if t is None else as_fraction(t)), p)

    def __eq__(self, other):
        if not isinstance(other, BerkPoint):
            return NotImplemented
        return (self.p == other.p and self.radius == other.radius
                and absval(self.center - other.center, self.p) <= self.radius)

    def __hash__(self):
        # points equal under the disc rule share radius, which is all we can hash
        return hash((self.p, self.radius))

    @property
    def t(self) -> Fraction | None:
        return self.radius.t

    def render(self) -> str:
        return f"x_{{{format_rational(self.center)},{self.radius.render(self.p)}}}"

    def to_json(self) -> dict:
        t = self.radius.t
        return {"center": format_rational(self.center),
                "t": "infinity" if t is None else format_rational(t)}

    @classmethod
    def from_json(cls, data: dict, p: int) -> "BerkPoint":
        lr = data["t"]
        t = None if lr == "infinity" else parse_rational(lr)
        return cls.at(parse_rational(data["center"]), t, p)


def point_type(x: BerkPoint) -> int:
    return 1 if x.radius.is_zero else 2


def annulus_invariants(r1: LogMag, r2: LogMag) -> tuple[LogMag, Fraction]:
    """Modulus ``r1/r2`` and length ``-log_p`` of it for the annulus ``r1 <= |T-c| <= r2``."""
    if r1.is_zero or r1 > r2:
        raise InvalidInterval(f"need 0 < r1 <= r2, got {r1!r}, {r2!r}")
    mod = r1 / r2
    return mod, mod.t


@dataclass(frozen=True)
class Disc:
    """``D(center, radius)`` (closed) or ``D^-(center, radius)`` (open).

    With ``contains_infinity`` the object is the complement ``P^1 \\ D``, so a
    closed complement is ``P^1`` minus an open disc.
    """

    center: Fraction
    radius: LogMag
    closed: bool = True
    contains_infinity: bool = False

    def __post_init__(self):
        object.__setattr__(self, "center", as_fraction(self.center))
        if self.radius.is_zero and not (self.closed ^ self.contains_infinity):
            raise ValueError("open disc of radius 0")

    @property
    def is_closed_set(self) -> bool:
        """True for closed discs and for complements of open discs."""
        return self.closed

    def _inner_closed(self) -> bool:
        # closedness of the underlying disc |T-c| <= r vs < r
        return self.closed if not self.contains_infinity else not self.closed

    def contains_point(self, x: BerkPoint) -> bool:
        d = max(absval(x.center - self.center, x.p), x.radius)
        inside = d <= self.radius if self._inner_closed() else d < self.radius
        return inside ^ self.contains_infinity

    def contains_scalar(self, q, p: int) -> bool:
        return self.contains_point(BerkPoint(q, LogMag.zero(), p))

    def render(self, p: int) -> str:
        base = f"D{'' if self._inner_closed() else '^-'}({format_rational(self.center)},{self.radius.render(p)})"
        return f"P1\\{base}" if self.contains_infinity else base


def _underlying_subset(a: Disc, b: Disc, p: int) -> bool:
    """Is the underlying disc of ``a`` contained in that of ``b`` (both finite)."""
    d = absval(a.center - b.center, p)
    ac, bc = a._inner_closed(), b._inner_closed()
    if bc:
        return d <= b.radius and a.radius <= b.radius
    # b open: a must sit strictly inside
    if ac:
        return d < b.radius and a.radius < b.radius
    return d < b.radius and a.radius <= b.radius


def _underlying_meet(a: Disc, b: Disc, p: int) -> bool:
    """Do the underlying finite discs intersect.

    Ultrametric discs meet only when one contains the other.
    """
    return _underlying_subset(a, b, p) or _underlying_subset(b, a, p)


def discs_intersect(a: Disc, b: Disc, p: int) -> bool:
    if a.contains_infinity and b.contains_infinity:
        return True
    if a.contains_infinity:
        a, b = b, a
    if not b.contains_infinity:
        return _underlying_meet(a, b, p)
    # a finite, b = P1 minus B: they meet unless a is inside B
    return not _underlying_subset(a, Disc(b.center, b.radius, b._inner_closed()), p)


def disc_subset(a: Disc, b: Disc, p: int) -> bool:
    if not a.contains_infinity and not b.contains_infinity:
        return _underlying_subset(a, b, p)
    if a.contains_infinity and not b.contains_infinity:
        return False
    if not a.contains_infinity and b.contains_infinity:
        return not _underlying_meet(a, Disc(b.center, b.radius, b._inner_closed()), p)
    # complements: P1\A subset P1\B iff B subset A
    return _underlying_subset(Disc(b.center, b.radius, b._inner_closed()),
                              Disc(a.center, a.radius, a._inner_closed()), p)


def complement_disc(d: Disc, margin: Fraction) -> Disc:
    """The partner ``D'`` with ``D ∪ D' = P^1`` and ``D ∩ D'`` an annulus of length ``margin``."""
    margin = as_fraction(margin)
    if margin <= 0:
        raise NoComplement("margin must be positive")
    if not d.closed:
        raise NoComplement("only closed discs and complements of open discs have partners")
    if d.contains_infinity:
        return Disc(d.center, d.radius * LogMag(-margin), closed=True)
    if d.radius.is_zero:
        raise NoComplement("a type-1 point has no complementary disc")
    return Disc(d.center, d.radius * LogMag(margin), closed=True, contains_infinity=True)


@dataclass(frozen=True)
class Affinoid:
    """Finite disjoint union of connected pieces, each an intersection of closed discs."""

    components: tuple  # tuple of tuple[Disc, ...]
    p: int
    partner: tuple = field(default=(), compare=False)  # disc bijection, when built by complementary()

    def __post_init__(self):
        comps = tuple(tuple(c) for c in self.components)
        object.__setattr__(self, "components", comps)

    def boundary_set(self, i: int) -> tuple:
        """The irredundant list of discs cutting out component ``i``."""
        comp = self.components[i]
        keep = []
        for j, d in enumerate(comp):
            redundant = any(k != j and disc_subset(e, d, self.p) and not (disc_subset(d, e, self.p) and k > j)
                            for k, e in enumerate(comp))
            if not redundant:
                keep.append(d)
        return tuple(keep)

    def contains_point(self, x: BerkPoint) -> bool:
        return any(all(d.contains_point(x) for d in comp) for comp in self.components)

    def render(self) -> str:
        pieces = [" ∩ ".join(d.render(self.p) for d in comp) for comp in self.components]
        return " ⊔ ".join(f"[{s}]" for s in pieces)


@dataclass(frozen=True)
class Complementary:
    """A complementary set ``V'`` given as an intersection over components of unions of discs."""

    unions: tuple  # tuple over components of tuple[Disc, ...]
    pairs: tuple  # (D, D') pairs
    p: int

    def contains_point(self, x: BerkPoint) -> bool:
        return all(any(d.contains_point(x) for d in u) for u in self.unions)

    def annuli(self) -> list[tuple[Fraction, LogMag, LogMag]]:
        """``D ∩ D'`` for each pair as ``(center, r_inner, r_outer)``."""
        out = []
        for d, dd in self.pairs:
            lo, hi = (dd.radius, d.radius) if not d.contains_infinity else (d.radius, dd.radius)
            out.append((d.center, lo, hi))
        return out


def complementary(V: Affinoid, margins) -> Complementary:
    """Build ``V' = ∩_i ∪_{D in E(V_i)} D'`` with per-disc margins in t-units.

    ``margins`` is a single rational or a list parallel to the flattened
    boundary sets.
    """
    p = V.p
    flat = [d for i in range(len(V.components)) for d in V.boundary_set(i)]
    if isinstance(margins, (list, tuple)):
        if len(margins) != len(flat):
            raise ValueError("one margin per boundary disc is required")
        ms = [as_fraction(m) for m in margins]
    else:
        ms = [as_fraction(margins)] * len(flat)
    unions, pairs = [], []
    k = 0
    for i in range(len(V.components)):
        u = []
        for d in V.boundary_set(i):
            dd = complement_disc(d, ms[k])
            k += 1
            pairs.append((d, dd))
            u.append(dd)
        # the partners of one component must not overlap, otherwise V' swallows V
        for a in range(len(u)):
            for b in range(a + 1, len(u)):
                if discs_intersect(u[a], u[b], p):
                    raise NoComplement(
                        f"complementary discs {u[a].render(p)} and {u[b].render(p)} overlap")
        unions.append(tuple(u))
    return Complementary(tuple(unions), tuple(pairs), p)


@dataclass(frozen=True)
class Contour:
    U: Affinoid
    V: Complementary
    annuli: tuple


def contour(K, inner_margin, outer_margin) -> Contour:
    """A contour ``(U, V)`` around the compact set ``K``.

    ``U`` is a union of closed discs of radius ``p^(-inner_margin)`` around
    ``K``; ``V`` is its complementary set with margin ``outer_margin``.
    """
    inner_margin = as_fraction(inner_margin)
    outer_margin = as_fraction(outer_margin)
    if outer_margin <= 0:
        raise ValueError("margins must be positive")
    p = K.p
    rho = LogMag(inner_margin)
    hole = rho * LogMag(outer_margin)
    discs: list[tuple[int, Disc]] = []
    for idx, orb in enumerate(K.orbits):
        if not orb.radius < hole:
            raise MarginTooLarge(
                f"orbit {orb.render()} is not inside the removed discs of radius {hole.render(p)}")
        if orb.plain or inner_margin <= 0:
            centers = [orb.center]
        else:
            n = int(inner_margin) if inner_margin.denominator == 1 else int(inner_margin) + 1
            centers = [orb.center + i for i in range(p ** n)]
        for c in centers:
            d = Disc(c, rho, closed=True)
            dup = False
            for j, e in discs:
                if discs_intersect(d, e, p):
                    if j != idx:
                        raise MarginTooLarge("fattened discs of distinct orbits touch")
                    dup = True  # same radius, so the discs coincide
            if not dup:
                discs.append((idx, d))
    U = Affinoid(tuple((d,) for _, d in discs), p)
    V = complementary(U, outer_margin)
    return Contour(U, V, tuple(V.annuli()))


@dataclass(frozen=True)
class Segment:
    """Points ``x_{center, p^(-t)}`` for ``t`` between ``t_start`` and ``t_end``."""

    center: Fraction
    t_start: Fraction
    t_end: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", as_fraction(self.center))
        object.__setattr__(self, "t_start", as_fraction(self.t_start))
        object.__setattr__(self, "t_end", as_fraction(self.t_end))

    def ts(self, steps: int) -> list[Fraction]:
        if steps < 2:
            raise ValueError("steps must be at least 2")
        h = (self.t_end - self.t_start) / (steps - 1)
        return [self.t_start + i * h for i in range(steps)]


def segment_points(s: Segment, steps: int, p: int) -> list[BerkPoint]:
    return [BerkPoint.at(s.center, t, p) for t in s.ts(steps)]
