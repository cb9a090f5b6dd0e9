"""Differential modules ``(M, ∇)`` given by a matrix of rational functions.

Vectors are columns and ``∇ v = δ(v) + G v`` where ``δ`` is either
``d/dT`` or ``(T - c) d/dT`` applied entrywise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .berkline import BerkPoint
from .errors import NotCyclic, NotTriangular, PoleAtPoint, PoleAtTypeOnePoint
from .ratfun import Poly, RatFun, gauss_norm
from .scalars import LogMag, as_fraction, format_rational

_ZERO = RatFun.const(0)
_ONE = RatFun.const(1)


@dataclass(frozen=True)
class Derivation:
    kind: str  # "ddT" or "centered"
    center: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("ddT", "centered"):
            raise ValueError(f"unknown derivation kind {self.kind!r}")
        object.__setattr__(self, "center", as_fraction(self.center))

    @classmethod
    def ddT(cls) -> "Derivation":
        return cls("ddT")

    @classmethod
    def centered(cls, c) -> "Derivation":
        return cls("centered", as_fraction(c))

    def factor(self) -> RatFun:
        """``f`` with ``self = f * d/dT``."""
        if self.kind == "ddT":
            return _ONE
        return RatFun(Poly.linear(self.center))

    def apply(self, g: RatFun) -> RatFun:
        d = g.derivative()
        return d if self.kind == "ddT" else self.factor() * d

    def render(self) -> str:
        if self.kind == "ddT":
            return "d/dT"
        return f"(T-{format_rational(self.center)})d/dT"


def _as_matrix(rows) -> tuple:
    return tuple(tuple(x if isinstance(x, RatFun) else RatFun.const(as_fraction(x)) for x in r)
                 for r in rows)


@dataclass(frozen=True)
class DiffModule:
    matrix: tuple
    derivation: Derivation

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        if not m or any(len(r) != len(m) for r in m):
            raise ValueError("connection matrix must be square and nonempty")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def rows(self) -> list[list[RatFun]]:
        return [list(r) for r in self.matrix]

    def nabla(self, v: Sequence[RatFun]) -> list[RatFun]:
        gv = linalg.mat_vec(self.rows(), list(v), _ZERO)
        return [self.derivation.apply(a) + b for a, b in zip(v, gv)]

    def nabla_power(self, v, k: int) -> list[RatFun]:
        for _ in range(k):
            v = self.nabla(v)
        return list(v)

    def triangular_kind(self) -> str | None:
        """``"upper"``, ``"lower"`` or ``None``; diagonal counts as upper."""
        n = self.n
        if all(self.matrix[i][j].is_zero() for i in range(n) for j in range(i)):
            return "upper"
        if all(self.matrix[i][j].is_zero() for i in range(n) for j in range(i + 1, n)):
            return "lower"
        return None

    def diagonal(self) -> list[RatFun]:
        if self.triangular_kind() is None:
            raise NotTriangular("connection matrix is not triangular")
        return [self.matrix[i][i] for i in range(self.n)]

    def poles(self) -> list[Fraction]:
        out = set()
        for r in self.matrix:
            for g in r:
                out.update(q for q, _ in g.poles())
        return sorted(out)

    def render(self) -> str:
        rows = ["[" + ", ".join(g.render() for g in r) + "]" for r in self.matrix]
        return f"{self.derivation.render()} + [{'; '.join(rows)}]"


def change_derivation(M: DiffModule, target: Derivation) -> DiffModule:
    """Rewrite ``∇`` with respect to ``target``: ``∇_{f d/dT} = f ∇_{d/dT}``."""
    if target == M.derivation:
        return M
    scale = target.factor() / M.derivation.factor()
    return DiffModule(tuple(tuple(scale * g for g in r) for r in M.matrix), target)


def twist(M: DiffModule, a) -> DiffModule:
    a = as_fraction(a)
    rows = [[g - a if i == j else g for j, g in enumerate(r)] for i, r in enumerate(M.matrix)]
    return DiffModule(rows, M.derivation)


def dual(M: DiffModule) -> DiffModule:
    return DiffModule(tuple(tuple(-g for g in r) for r in linalg.transpose(M.rows())), M.derivation)


def default_f(M: DiffModule) -> RatFun:
    return M.derivation.factor() if M.derivation.kind == "centered" else RatFun.T()


def wronskian(M: DiffModule, m: Sequence[RatFun]) -> RatFun:
    """``det[m, ∇m, ..., ∇^{n-1} m]`` with the vectors as columns."""
    cols, v = [], list(m)
    for _ in range(M.n):
        cols.append(v)
        v = M.nabla(v)
    return linalg.det(linalg.transpose(cols), _ONE, _ZERO)


def cyclic_vector(M: DiffModule, f: RatFun | None = None) -> list[RatFun]:
    """The explicit cyclic vector ``sum_j f^j/j! sum_k (-1)^k C(j,k) ∇^k e_{j+1-k}``.

    Raises :class:`NotCyclic` if the resulting vector is not cyclic.
    """
    f = default_f(M) if f is None else f
    if M.derivation.apply(f).is_zero():
        raise NotCyclic("the derivation kills f")
    n = M.n
    basis = [[_ONE if i == j else _ZERO for i in range(n)] for j in range(n)]
    # powers[i][k] = ∇^k e_i
    powers = []
    for e in basis:
        row, v = [], e
        for _ in range(n):
            row.append(v)
            v = M.nabla(v)
        powers.append(row)
    m = [_ZERO] * n
    fj = _ONE
    for j in range(n):
        coef = fj * Fraction(1, math.factorial(j))
        for k in range(j + 1):
            w = powers[j - k][k]
            c = coef * ((-1) ** k * math.comb(j, k))
            m = [a + c * b for a, b in zip(m, w)]
        fj = fj * f
    if wronskian(M, m).is_zero():
        raise NotCyclic("det[m, ∇m, ...] vanishes identically")
    return m


@dataclass(frozen=True)
class DiffPoly:
    """The monic operator ``d^n + sum_i coefficients[i] d^i``."""

    coefficients: tuple
    derivation: Derivation

    @property
    def n(self) -> int:
        return len(self.coefficients)


def diff_polynomial(M: DiffModule, m: Sequence[RatFun]) -> DiffPoly:
    n = M.n
    vecs, v = [], list(m)
    for _ in range(n + 1):
        vecs.append(v)
        v = M.nabla(v)
    A = linalg.transpose(vecs[:n])
    rhs = [-x for x in vecs[n]]
    g = linalg.solve(A, rhs, _ONE, _ZERO)
    return DiffPoly(tuple(g), M.derivation)


def apply_diff_polynomial(M: DiffModule, P: DiffPoly, m: Sequence[RatFun]) -> list[RatFun]:
    """``∇^n m + sum_i g_i ∇^i m``; zero when ``P`` annihilates ``m``."""
    out, v = [_ZERO] * M.n, list(m)
    for i in range(M.n):
        out = [a + P.coefficients[i] * b for a, b in zip(out, v)]
        v = M.nabla(v)
    return [a + b for a, b in zip(out, v)]


@dataclass(frozen=True)
class NewtonSegment:
    slope: Fraction | None  # None marks the roots equal to zero
    multiplicity: int

    @property
    def root_magnitude(self) -> LogMag:
        """``|root| = p^slope`` in the (index, -log|coefficient|) picture."""
        if self.slope is None:
            return LogMag.zero()
        return LogMag(-self.slope)


def newton_polygon_points(points: Sequence[tuple[int, Fraction | None]]) -> list[NewtonSegment]:
    """Lower convex hull of ``(i, t_i)``; ``t_i = None`` for vanishing coefficients."""
    pts = [(i, t) for i, t in points if t is not None]
    if not pts:
        raise ValueError("zero polynomial")
    segs = []
    lowest = pts[0][0]
    if lowest > 0:
        segs.append(NewtonSegment(None, lowest))
    hull: list[tuple[int, Fraction]] = []
    for q in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or above the chord
            if (y2 - y1) * (q[0] - x1) >= (q[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(q)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append(NewtonSegment(Fraction(y2 - y1) / (x2 - x1), x2 - x1))
    return segs


def newton_polygon(P, x: BerkPoint) -> list[NewtonSegment]:
    """Newton polygon at ``x`` of ``S^n + sum g_i S^i`` viewed as a commutative polynomial.

    ``P`` is a :class:`DiffPoly` or a plain coefficient list ``g_0..g_{n-1}``.
    """
    coeffs = list(P.coefficients if isinstance(P, DiffPoly) else P)
    pts = []
    for i, g in enumerate(coeffs):
        g = g if isinstance(g, RatFun) else RatFun.const(as_fraction(g))
        try:
            nm = gauss_norm(g, x.center, x.radius, x.p)
        except PoleAtTypeOnePoint as exc:
            raise PoleAtPoint(str(exc)) from None
        pts.append((i, nm.t))
    pts.append((len(coeffs), Fraction(0)))
    return newton_polygon_points(pts)
