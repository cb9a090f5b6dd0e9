"""Spectra and spectral radii of differential modules at type-2 points.

The dictionary between the three quantities used throughout:

* ``delta``: the distance ``max(dist(center - a, Z_p), radius)`` of an orbit
  to a twist ``a``;
* ``R``: the normalized spectral radius of convergence, in ``(0, 1]``;
* ``sigma``: the radius of the orbit making up the spectrum.

``radius_from_delta`` and ``sigma_from_radius`` are exact inverses.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .berkline import BerkPoint
from .diffmod import DiffModule, Derivation, change_derivation
from .errors import NotSeparated, OutOfRange, PoleOnCircle, Unsupported
from .kompakt import CompactSet, Orbit, orbit_disjoint, orbit_eq
from .ratfun import RatFun, circle_poles, gauss_norm, laurent_split
from .scalars import LogMag, absval, as_fraction, dist_zp, format_rational, omega, vp


def delta_of(z: Orbit, a) -> LogMag:
    return max(dist_zp(z.center - as_fraction(a), z.p), z.radius)


def radius_from_delta(d: LogMag, p: int) -> LogMag:
    """``(|p|^l ω / δ)^(1/p^l)`` with ``l = max(0, floor(t_δ) + 1)``; ``δ = 0`` gives 1."""
    if d.is_zero:
        return LogMag.one()
    w = Fraction(1, p - 1)
    l = max(0, math.floor(d.t) + 1)
    return LogMag((l + w - d.t) / Fraction(p) ** l)


def sigma_from_radius(R: LogMag, p: int) -> LogMag:
    """Inverse of :func:`radius_from_delta` on ``(0, 1]``."""
    if R.is_zero or R > LogMag.one():
        raise OutOfRange(f"radius {R!r} outside (0, 1]")
    if R == LogMag.one():
        return LogMag.zero()
    w = Fraction(1, p - 1)
    t = R.t
    if t >= w:
        return LogMag(w - t)
    # band l: t in (w/p^l, w/p^(l-1)]
    l = 1
    while not t > w / Fraction(p) ** l:
        l += 1
    return LogMag(l + w - Fraction(p) ** l * t)


def monomial_radius(mu: LogMag, v: int, p: int) -> LogMag:
    """Normalized radius for a remainder dominated by one monomial.

    ``mu = |h_k| r^k / |k|`` and ``v = v_p(k)``.  Start from ``ω/mu`` (or 1
    when ``mu <= ω``) and apply ``v`` Frobenius descent steps: below
    ``ω^p`` the radius scales by ``p``, above it the ``p``-th root is taken.
    """
    w = omega(p)
    R = LogMag.one() if mu <= w else w / mu
    wp = w ** p
    for _ in range(v):
        if R == LogMag.one():
            break
        if R <= wp:
            R = R * LogMag(Fraction(-1))
        else:
            R = R ** Fraction(1, p)
    return min(R, LogMag.one())


@dataclass
class RadiusDetail:
    R: LogMag
    rule: str  # "zero", "large", "monomial", "trivial"
    terms: list = field(default_factory=list)


def radius_rank1_detail(split, p: int) -> RadiusDetail:
    """Radius for ``h = f - constant`` described by a Laurent split."""
    r = split.radius
    h_norm = _remainder_norm(split, p)
    if h_norm.is_zero:
        return RadiusDetail(LogMag.one(), "zero")
    if h_norm > LogMag.one():
        return RadiusDetail(omega(p) / h_norm, "large")
    terms = split.significant_terms(omega(p))
    if not terms:
        return RadiusDetail(LogMag.one(), "trivial")
    cands = []
    for k, h in terms:
        mu = absval(h, p) * r ** k / absval(k, p)
        cands.append((monomial_radius(mu, vp(abs(k), p), p), k))
    best = min(R for R, _ in cands)
    owners = [k for R, k in cands if R == best]
    if best < LogMag.one() and len(owners) > 1:
        raise Unsupported(f"several Laurent monomials {owners} share the smallest radius")
    return RadiusDetail(best, "monomial", terms)


def _remainder_norm(split, p: int) -> LogMag:
    h = split.inner.reassemble() + split.outer - split.constant
    return gauss_norm(h, split.center, split.radius, p)


def radius_rank1(h: RatFun, x: BerkPoint, c) -> LogMag:
    """Spectral radius of ``(T - c) d/dT + h`` at ``x`` for a remainder ``h``.

    ``h`` must have zero Laurent constant around ``c`` at the radius of ``x``.
    """
    split = laurent_split(h, c, x.radius, x.p)
    if split.constant != 0:
        raise ValueError("remainder has a nonzero Laurent constant")
    return radius_rank1_detail(split, x.p).R


def _check_branch(x: BerkPoint, c: Fraction):
    if x.radius.is_zero:
        raise Unsupported("spectra are computed at type-2 points only")
    if absval(x.center - c, x.p) > x.radius:
        raise ValueError(f"{x.render()} does not lie on the branch from {format_rational(c)}")


def _orbit_for_split(split, p: int) -> Orbit:
    R = radius_rank1_detail(split, p).R
    return Orbit(split.constant, sigma_from_radius(R, p), p)


def spectrum_rank1(g: RatFun, x: BerkPoint, c) -> Orbit:
    """Spectrum of ``(T - c) d/dT + g`` at ``x``: ``Orbit(β, σ)``.

    Poles on the circle through ``x`` are classified every possible way and
    all classifications must yield the same orbit.
    """
    c = as_fraction(c)
    _check_branch(x, c)
    p = x.p
    circ = circle_poles(g, c, x.radius, p)
    if not circ:
        return _orbit_for_split(laurent_split(g, c, x.radius, p), p)
    if len(circ) > 8:
        raise Unsupported("too many poles on the circle")
    results = []
    for mask in itertools.product((False, True), repeat=len(circ)):
        inner = [q for q, m in zip(circ, mask) if m]
        results.append(_orbit_for_split(laurent_split(g, c, x.radius, p, on_circle=inner), p))
    first = results[0]
    for o in results[1:]:
        if not orbit_eq(first, o):
            raise PoleOnCircle(
                f"on-circle classifications disagree: {first.render()} vs {o.render()}", pole=circ[0])
    return first


@dataclass
class SpectrumResult:
    orbits: CompactSet
    blocks: list  # list of (tuple of 1-based indices, Orbit)
    separation_certified: bool
    entry_orbits: list
    n: int
    point: BerkPoint | None = None
    center: Fraction | None = None

    def render(self) -> str:
        return self.orbits.render()

    def to_json(self) -> dict:
        return {
            "orbits": self.orbits.to_json(),
            "blocks": [{"indices": list(ix), "orbit": o.to_json()} for ix, o in self.blocks],
            "separation_certified": self.separation_certified,
            "rendered": self.render(),
        }


def group_orbits(entry: Sequence[Orbit]) -> SpectrumResult:
    blocks: list[tuple[list[int], Orbit]] = []
    for i, o in enumerate(entry, start=1):
        for ix, bo in blocks:
            if orbit_eq(o, bo):
                ix.append(i)
                break
        else:
            blocks.append(([i], o))
    certified = all(orbit_disjoint(a, b) for (_, a), (_, b) in itertools.combinations(blocks, 2))
    p = entry[0].p
    return SpectrumResult(
        orbits=CompactSet(tuple(o for _, o in blocks), p),
        blocks=[(tuple(ix), o) for ix, o in blocks],
        separation_certified=certified,
        entry_orbits=list(entry),
        n=len(entry),
    )


def spectrum_triangular(M: DiffModule, x: BerkPoint, c) -> SpectrumResult:
    """Union of the rank-one spectra of the diagonal after switching to ``(T - c) d/dT``."""
    c = as_fraction(c)
    Mc = change_derivation(M, Derivation.centered(c))
    entry = [spectrum_rank1(g, x, c) for g in Mc.diagonal()]
    res = group_orbits(entry)
    res.point, res.center = x, c
    return res


def robba_decompose(S: SpectrumResult) -> list[tuple[tuple, Orbit, int]]:
    if not S.separation_certified:
        raise NotSeparated("block orbits overlap; no canonical decomposition")
    out = [(ix, o, len(ix)) for ix, o in S.blocks]
    assert sum(r for _, _, r in out) == S.n
    for (_, a, _), (_, b, _) in itertools.combinations(out, 2):
        assert orbit_disjoint(a, b)
    return out


@dataclass(frozen=True)
class RadiusProfile:
    radii: tuple  # ascending LogMag values in (0, 1]
    p: int

    def render(self) -> list[str]:
        return [R.render(self.p) for R in self.radii]


def multiradius(S: SpectrumResult, a=0) -> RadiusProfile:
    radii = []
    for ix, o in S.blocks:
        R = radius_from_delta(delta_of(o, a), o.p)
        radii.extend([R] * len(ix))
    p = S.orbits.p
    return RadiusProfile(tuple(sorted(radii)), p)


def is_refined(S: SpectrumResult) -> list[bool]:
    """Per block: orbit radius above 1 and the center closer to Z_p than that radius."""
    out = []
    for _, o in S.blocks:
        out.append(o.radius > LogMag.one() and dist_zp(o.center, o.p) < o.radius)
    return out
