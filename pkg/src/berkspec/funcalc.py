"""Residues, Cauchy integrals and spectral idempotents for rational matrices.

The idempotent of an eigenvalue cluster is obtained as minus the residue of
the resolvent over a separating annulus.  The same projector is recomputed
independently as a polynomial in the matrix (Chinese remainders on the
characteristic polynomial) and the two must agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .berkline import Disc, complement_disc
from .errors import EigenvalueOnBoundary, IrreducibleDenominator, NonSplitCharPoly, PoleOnBoundary
from .kompakt import CompactSet, Orbit
from .ratfun import Poly, RatFun, partial_fractions, rational_roots
from .scalars import LogMag, absval, as_fraction

_ZERO = RatFun.const(0)
_ONE = RatFun.const(1)


def _frac_matrix(A) -> list[list[Fraction]]:
    return [[as_fraction(a) for a in row] for row in A]


@dataclass(frozen=True)
class ResolventMatrix:
    entries: tuple  # rows of RatFun in the spectral variable
    source: tuple

    def at(self, i: int, j: int) -> RatFun:
        return self.entries[i][j]


def resolvent(A) -> ResolventMatrix:
    """``R(S) = (A - S I)^-1`` with the defining identity checked."""
    A = _frac_matrix(A)
    n = len(A)
    S = RatFun.T()
    M = [[RatFun.const(A[i][j]) - (S if i == j else _ZERO) for j in range(n)] for i in range(n)]
    R = linalg.inverse(M, _ONE, _ZERO)
    prod = linalg.mat_mul(M, R, _ZERO)
    assert all(prod[i][j] == (_ONE if i == j else _ZERO) for i in range(n) for j in range(n))
    return ResolventMatrix(tuple(tuple(r) for r in R), tuple(tuple(r) for r in A))


def char_poly(A) -> Poly:
    """``det(S I - A)``, monic."""
    A = _frac_matrix(A)
    n = len(A)
    S = RatFun.T()
    M = [[(S if i == j else _ZERO) - RatFun.const(A[i][j]) for j in range(n)] for i in range(n)]
    d = linalg.det(M, _ONE, _ZERO)
    assert d.den.deg == 0
    return d.num


def _pole_location(d: Disc, q: Fraction, p: int) -> str:
    """``"inside"``, ``"boundary"`` or ``"outside"`` relative to the finite disc of ``d``."""
    dist = absval(q - d.center, p)
    if dist == d.radius:
        return "boundary"
    return "inside" if dist < d.radius else "outside"


def res_disc(f, D: Disc, p: int) -> Fraction:
    """``Res_D(f)``: zero on discs of the affine line, the ``1/(T-a)`` coefficient on complements."""
    f = f if isinstance(f, RatFun) else RatFun.const(as_fraction(f))
    pf = partial_fractions(f)
    for q, _ in pf.principal_parts:
        loc = _pole_location(D, q, p)
        if loc == "boundary":
            raise PoleOnBoundary(f"pole {q} on the boundary of the disc")
        if D.contains_infinity and loc == "outside":
            raise ValueError(f"pole {q} lies in the complement disc")
        if not D.contains_infinity and loc == "inside":
            raise ValueError(f"pole {q} lies in the disc")
    if not D.contains_infinity:
        return Fraction(0)
    if not pf.polynomial_part.is_zero():
        raise ValueError("f must vanish at infinity on a disc containing infinity")
    return sum((cs[0] for _, cs in pf.principal_parts), Fraction(0))


def res_intersection(f, D: Disc, Dp: Disc, p: int) -> Fraction:
    """``Res_{D∩D'}(f) = Res_D(f_D) + Res_{D'}(f_{D'})`` for complementary discs."""
    if D.contains_infinity == Dp.contains_infinity:
        raise ValueError("complementary discs: exactly one must contain infinity")
    fin, inf = (D, Dp) if not D.contains_infinity else (Dp, D)
    f = f if isinstance(f, RatFun) else RatFun.const(as_fraction(f))
    pf = partial_fractions(f)
    f_fin = RatFun(pf.polynomial_part)
    f_inf = _ZERO
    for q, cs in pf.principal_parts:
        part = _ZERO
        lin = RatFun(Poly.linear(q))
        for k, a in enumerate(cs, start=1):
            part = part + RatFun.const(a) / lin ** k
        in_hole = _pole_location(inf, q, p) == "inside"
        out_fin = _pole_location(fin, q, p) == "outside"
        if in_hole:
            f_inf = f_inf + part
        elif out_fin:
            f_fin = f_fin + part
        else:
            raise PoleOnBoundary(f"pole {q} lies on the annulus D∩D'")
    return res_disc(f_fin, fin, p) + res_disc(f_inf, inf, p)


@dataclass(frozen=True)
class Idempotent:
    e: tuple
    cluster: tuple  # eigenvalues with multiplicity
    complement: tuple  # the complementary idempotent

    @property
    def trace(self) -> Fraction:
        return sum((self.e[i][i] for i in range(len(self.e))), Fraction(0))


def eigenvalues(A) -> list[tuple[Fraction, int]]:
    try:
        return rational_roots(char_poly(A))
    except IrreducibleDenominator as exc:
        raise NonSplitCharPoly(str(exc)) from None


def _hole_margin(disc: Disc, cluster: Sequence[Fraction], p: int) -> Fraction:
    """A margin putting every cluster eigenvalue strictly inside the partner's hole."""
    gaps = [absval(q - disc.center, p) for q in cluster]
    worst = max(gaps)
    if worst.is_zero:
        return Fraction(1)
    return (worst.t - disc.radius.t) / 2


def residue_idempotent(A, cluster_disc: Disc, p: int) -> list[list[Fraction]]:
    """``-Res`` of the resolvent over the annulus ``D ∩ D'`` around the cluster."""
    A = _frac_matrix(A)
    eig = eigenvalues(A)
    inside = [q for q, _ in eig if _pole_location(cluster_disc, q, p) == "inside"]
    if any(_pole_location(cluster_disc, q, p) == "boundary" for q, _ in eig):
        raise EigenvalueOnBoundary("an eigenvalue lies on the boundary circle of the cluster disc")
    if not inside or len(inside) == len(eig):
        raise ValueError("the disc must separate a nonempty proper cluster")
    Dp = complement_disc(cluster_disc, _hole_margin(cluster_disc, inside, p))
    R = resolvent(A)
    n = len(A)
    return [[-res_intersection(R.at(i, j), cluster_disc, Dp, p) for j in range(n)] for i in range(n)]


def _ext_gcd(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """``u, v`` with ``u a + v b = 1`` for coprime ``a, b``."""
    r0, r1 = a, b
    s0, s1 = Poly.const(1), Poly()
    t0, t1 = Poly(), Poly.const(1)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    c = r0.lead
    inv = Fraction(1) / c
    return s0 * inv, t0 * inv


def _poly_at_matrix(f: Poly, A) -> list[list[Fraction]]:
    n = len(A)
    out = [[Fraction(0)] * n for _ in range(n)]
    for c in reversed(f.coeffs):
        out = linalg.mat_mul(out, A, Fraction(0))
        for i in range(n):
            out[i][i] += c
    return out


def lagrange_idempotent(A, cluster: Sequence[Fraction]) -> list[list[Fraction]]:
    """Projector onto the generalized eigenspaces of ``cluster`` as a polynomial in ``A``."""
    A = _frac_matrix(A)
    eig = eigenvalues(A)
    cl = {as_fraction(q) for q in cluster}
    p_in, p_out = Poly.const(1), Poly.const(1)
    for q, m in eig:
        if q in cl:
            p_in = p_in * Poly.linear(q) ** m
        else:
            p_out = p_out * Poly.linear(q) ** m
    _, v = _ext_gcd(p_in, p_out)
    return _poly_at_matrix(v * p_out, A)


def cauchy_idempotent(A, cluster_disc: Disc, p: int) -> Idempotent:
    """Spectral idempotent of the eigenvalues inside ``cluster_disc``, fully certified."""
    A = _frac_matrix(A)
    n = len(A)
    e = residue_idempotent(A, cluster_disc, p)
    eig = eigenvalues(A)
    cluster = [q for q, m in eig if _pole_location(cluster_disc, q, p) == "inside" for _ in range(m)]
    others = [q for q, m in eig if _pole_location(cluster_disc, q, p) != "inside"]
    e_l = lagrange_idempotent(A, cluster)
    e_c = lagrange_idempotent(A, others)
    zero = Fraction(0)
    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    checks = {
        "residue route equals polynomial route": e == e_l,
        "e^2 = e": linalg.mat_mul(e, e, zero) == e,
        "Ae = eA": linalg.mat_mul(A, e, zero) == linalg.mat_mul(e, A, zero),
        "trace = cluster size": sum(e[i][i] for i in range(n)) == len(cluster),
        "e + e' = I": linalg.mat_add(e, e_c) == eye,
        "e e' = 0": linalg.mat_mul(e, e_c, zero) == [[zero] * n for _ in range(n)],
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise AssertionError(f"idempotent certification failed: {failed}")
    return Idempotent(tuple(tuple(r) for r in e), tuple(cluster), tuple(tuple(r) for r in e_c))


@dataclass(frozen=True)
class MatrixSpectrum:
    points: CompactSet | None
    partial: bool
    magnitudes: tuple  # root magnitudes with multiplicity, always available


def matrix_spectrum(A, p: int) -> MatrixSpectrum:
    """Eigenvalues as plain type-1 points; Newton-polygon magnitudes when they are not rational."""
    from .diffmod import newton_polygon_points

    cp = char_poly(A)
    pts = [(i, None if c == 0 else absval(c, p).t) for i, c in enumerate(cp.coeffs)]
    mags = []
    for seg in newton_polygon_points(pts):
        mags.extend([seg.root_magnitude] * seg.multiplicity)
    try:
        roots = rational_roots(cp)
    except IrreducibleDenominator:
        return MatrixSpectrum(None, True, tuple(mags))
    orbs = tuple(Orbit(q, LogMag.zero(), p, plain=True) for q, _ in roots)
    return MatrixSpectrum(CompactSet(orbs, p), False, tuple(mags))
