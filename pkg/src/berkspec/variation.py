"""How spectra and radii move along segments of the Berkovich line."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .berkline import BerkPoint, Segment
from .diffmod import Derivation, DiffModule
from .errors import BerkspecError, DiscontinuityDetected, NeverStabilized, NotPiecewiseAffine
from .kompakt import CompactSet, OpenRegion, Orbit, Piece, orbit_eq, orbit_inside_region
from .ratfun import RatFun
from .scalars import LogMag, absval, as_fraction, format_rational
from .spectra import (
    SpectrumResult,
    multiradius,
    sigma_from_radius,
    spectrum_triangular,
)


@dataclass
class VariationTable:
    segment: Segment
    rows: list  # (t, SpectrumResult), sorted by t
    p: int

    def family(self, i: int) -> list[tuple[Fraction, Orbit]]:
        return [(t, S.entry_orbits[i]) for t, S in self.rows]

    @property
    def n(self) -> int:
        return self.rows[0][1].n

    def csv_rows(self) -> list[list[str]]:
        head = ["t"]
        for i in range(self.n):
            head += [f"center_{i + 1}", f"log_sigma_{i + 1}"]
        out = [head]
        for t, S in self.rows:
            row = [format_rational(t)]
            for o in S.entry_orbits:
                row.append(format_rational(o.center))
                row.append("-inf" if o.radius.is_zero else format_rational(o.radius.log_p))
            out.append(row)
        return out


def vary_spectrum(M: DiffModule, c, t_a, t_b, steps: int, p: int) -> VariationTable:
    seg = Segment(c, t_a, t_b)
    rows = []
    for t in seg.ts(steps):
        x = BerkPoint.at(c, t, p)
        try:
            rows.append((t, spectrum_triangular(M, x, c)))
        except BerkspecError as exc:
            raise type(exc)(f"at t={format_rational(t)}: {exc}") from exc
    rows.sort(key=lambda r: r[0])
    return VariationTable(seg, rows, p)


@dataclass(frozen=True)
class AffinePiece:
    t_lo: Fraction
    t_hi: Fraction
    slope: Fraction | None  # None: the quantity vanishes on the piece
    intercept: Fraction | None

    def at(self, t: Fraction) -> Fraction | None:
        if self.slope is None:
            return None
        return self.slope * t + self.intercept


@dataclass
class PiecewiseLogAffine:
    pieces: list

    @property
    def breakpoints(self) -> list[Fraction]:
        out = []
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.slope != b.slope or a.intercept != b.intercept:
                out.append(a.t_hi)
        return out

    @property
    def slopes(self) -> list[Fraction]:
        return [q.slope for q in self.pieces if q.slope is not None]

    def at(self, t: Fraction) -> Fraction | None:
        for q in self.pieces:
            if q.t_lo <= t <= q.t_hi:
                return q.at(t)
        raise ValueError("t outside the fitted range")


def _line(a, b):
    (t1, y1), (t2, y2) = a, b
    s = (y2 - y1) / (t2 - t1)
    return s, y1 - s * t1


def _collinear(a, b, c) -> bool:
    return (b[1] - a[1]) * (c[0] - a[0]) == (c[1] - a[1]) * (b[0] - a[0])


def fit_points(samples: Sequence[tuple[Fraction, Fraction | None]],
               breakpoints: Sequence[Fraction] | None = None) -> PiecewiseLogAffine:
    """Exact piecewise-affine fit of ``(t, y)`` samples, ``y = None`` meaning ``-inf``.

    Without ``breakpoints`` the pieces are the greedy maximal collinear runs;
    a two-point run squeezed between two longer runs is read as a kink
    between samples and replaced by the intersection of its neighbours.
    With ``breakpoints`` every interval is checked for collinearity.
    """
    pts = sorted(samples)
    if len(pts) < 2:
        raise ValueError("need at least two samples")
    if breakpoints is not None:
        return _fit_given(pts, sorted(breakpoints))
    # split into runs of finite values and runs of None
    runs: list[list] = []
    for q in pts:
        if runs and (runs[-1][0][1] is None) == (q[1] is None):
            runs[-1].append(q)
        else:
            runs.append([q])
    pieces: list[AffinePiece] = []
    for run in runs:
        if run[0][1] is None:
            pieces.append(AffinePiece(run[0][0], run[-1][0], None, None))
            continue
        pieces.extend(_fit_finite(run))
    return PiecewiseLogAffine(_merge(pieces))


def _fit_finite(run) -> list[AffinePiece]:
    if len(run) == 1:
        return [AffinePiece(run[0][0], run[0][0], Fraction(0), run[0][1])]
    segs: list[list] = []  # index ranges [i, j] of maximal collinear runs
    i = 0
    while i < len(run) - 1:
        j = i + 1
        while j + 1 < len(run) and _collinear(run[i], run[i + 1], run[j + 1]):
            j += 1
        segs.append([i, j])
        i = j
    pieces = []
    k = 0
    while k < len(segs):
        i, j = segs[k]
        if (j - i == 1 and 0 < k < len(segs) - 1 and segs[k - 1][1] - segs[k - 1][0] >= 1
                and segs[k + 1][1] - segs[k + 1][0] >= 2):
            # a kink between run[i] and run[j]: intersect the neighbouring lines
            s1, b1 = _line(run[segs[k - 1][0]], run[segs[k - 1][1]])
            s2, b2 = _line(run[segs[k + 1][0]], run[segs[k + 1][1]])
            if s1 != s2:
                tk = (b2 - b1) / (s1 - s2)
                if run[i][0] < tk < run[j][0]:
                    prev = pieces.pop()
                    pieces.append(AffinePiece(prev.t_lo, tk, s1, b1))
                    ni, nj = segs[k + 1]
                    pieces.append(AffinePiece(tk, run[nj][0], s2, b2))
                    k += 2
                    continue
            # otherwise both ends of the short run are genuine kinks
        s, b = _line(run[i], run[j])
        pieces.append(AffinePiece(run[i][0], run[j][0], s, b))
        k += 1
    return pieces


def _fit_given(pts, bps) -> PiecewiseLogAffine:
    edges = [pts[0][0]] + [b for b in bps if pts[0][0] < b < pts[-1][0]] + [pts[-1][0]]
    pieces = []
    for lo, hi in zip(edges, edges[1:]):
        sub = [q for q in pts if lo <= q[0] <= hi]
        if any(q[1] is None for q in sub):
            if all(q[1] is None for q in sub):
                pieces.append(AffinePiece(lo, hi, None, None))
                continue
            raise NotPiecewiseAffine("mixed vanishing and finite values", triple=tuple(sub[:3]))
        for a, b, c in zip(sub, sub[1:], sub[2:]):
            if not _collinear(a, b, c):
                raise NotPiecewiseAffine("non-collinear samples inside one interval", triple=(a, b, c))
        if len(sub) >= 2:
            s, b0 = _line(sub[0], sub[-1])
        else:
            s, b0 = Fraction(0), sub[0][1]
        pieces.append(AffinePiece(lo, hi, s, b0))
    return PiecewiseLogAffine(pieces)


def _merge(pieces: list[AffinePiece]) -> list[AffinePiece]:
    out: list[AffinePiece] = []
    for q in pieces:
        if out and out[-1].slope == q.slope and out[-1].intercept == q.intercept:
            out[-1] = AffinePiece(out[-1].t_lo, q.t_hi, q.slope, q.intercept)
        else:
            out.append(q)
    return out


def fit_log_affine(tbl: VariationTable, family_index: int,
                   breakpoints: Sequence[Fraction] | None = None) -> PiecewiseLogAffine:
    """Fit ``t ↦ t_σ`` (``σ = p^-t_σ``) for one diagonal family of the table."""
    samples = [(t, None if o.radius.is_zero else o.radius.t) for t, o in tbl.family(family_index)]
    return fit_points(samples, breakpoints)


@dataclass
class JunctionReport:
    t0: Fraction
    left: CompactSet
    right: CompactSet
    left_labels: list
    right_labels: list
    equal: bool

    @property
    def labels_differ(self) -> bool:
        return self.left_labels != self.right_labels


def _one_sided(tbl: VariationTable, t0: Fraction, side: int):
    rows = [r for r in tbl.rows if (r[0] - t0) * side > 0]
    rows.sort(key=lambda r: abs(r[0] - t0))
    if len(rows) < 2:
        raise ValueError("need two samples on each side of the junction")
    (ta, Sa), (tb, Sb) = rows[0], rows[1]
    orbits, labels = [], []
    for oa, ob in zip(Sa.entry_orbits, Sb.entry_orbits):
        if oa.radius.is_zero and ob.radius.is_zero:
            rad = LogMag.zero()
        elif oa.radius.is_zero or ob.radius.is_zero:
            raise DiscontinuityDetected(f"family vanishes on one sample only near t={t0}")
        else:
            s = (oa.radius.t - ob.radius.t) / (ta - tb)
            rad = LogMag(oa.radius.t + s * (t0 - ta))
        orbits.append(Orbit(oa.center, rad, tbl.p))
        labels.append(oa.center)
    return CompactSet(tuple(orbits), tbl.p), orbits, labels


def junction_check(tbl: VariationTable, t0) -> JunctionReport:
    """Compare the limits from both sides at ``t0`` as compact sets.

    Each side extrapolates every family affinely from its two nearest
    samples, keeping that side's center label.
    """
    t0 = as_fraction(t0)
    left, lo, ll = _one_sided(tbl, t0, -1)
    right, ro, rl = _one_sided(tbl, t0, 1)
    ok = all(orbit_eq(a, b) for a, b in zip(lo, ro)) and left == right
    at = [S for t, S in tbl.rows if t == t0]
    if at:
        ok = ok and at[0].orbits == left
    if not ok:
        raise DiscontinuityDetected(
            f"one-sided limits at t={format_rational(t0)} differ: {left.render()} vs {right.render()}")
    return JunctionReport(t0, left, right, ll, rl, True)


# -- controlling graphs ------------------------------------------------------


@dataclass
class GraphEdge:
    center: Fraction
    t_start: Fraction  # near the puncture
    t_end: Fraction  # attachment point
    spectrum_breakpoints: list
    radii_breakpoints: list
    slopes: list


@dataclass
class ControlGraph:
    edges: list
    root_t: Fraction
    punctures: list
    equal_breakpoints: bool
    offgraph_checked: int = 0
    offgraph_failures: list = field(default_factory=list)


def radii_fit(tbl: VariationTable, twist=0) -> list[PiecewiseLogAffine]:
    prof = [(t, multiradius(S, twist).radii) for t, S in tbl.rows]
    n = len(prof[0][1])
    return [fit_points([(t, R[i].t) for t, R in prof]) for i in range(n)]


def puncture_tree(punctures: Sequence, root_t: Fraction, p: int, hole_t: Fraction) -> list[tuple]:
    """Edges ``(center, hole_t, t_join)`` joining each puncture to the tree built so far.

    The first puncture joins the boundary point at ``root_t``; later ones
    join where their distance to an earlier puncture is reached.
    """
    edges = []
    for i, q in enumerate(punctures):
        if i == 0:
            t_end = root_t
        else:
            t_end = min(absval(q - punctures[j], p).t for j in range(i))
            t_end = max(t_end, root_t)
        edges.append((as_fraction(q), hole_t, t_end))
    return edges


def _sorted_sigmas(S: SpectrumResult) -> list:
    return sorted((o.radius for o in S.entry_orbits))


def controlling_graph(M: DiffModule, punctures: Sequence, p: int, root_t=0, hole_t=4,
                      steps: int = 21, offgraph: bool = True) -> ControlGraph:
    """Candidate controlling graph of ``{|T| <= p^-root_t}`` minus the open discs
    ``|T - q| < p^-hole_t`` around the punctures.

    Spectrum breakpoints (fitted ``t_σ``) and radii breakpoints (multiradius
    at twist 0) are compared edge by edge, and off-graph samples are checked
    against the constant-radius rule.
    """
    root_t, hole_t = as_fraction(root_t), as_fraction(hole_t)
    edges = []
    equal = True
    for q, ts, te in puncture_tree(punctures, root_t, p, hole_t):
        tbl = vary_spectrum(M, q, te, ts, steps, p)
        sb, slopes = set(), []
        for i in range(tbl.n):
            fit = fit_log_affine(tbl, i)
            sb.update(fit.breakpoints)
            slopes.extend(fit.slopes)
        rb = set()
        for fit in radii_fit(tbl):
            rb.update(fit.breakpoints)
        equal = equal and sb == rb
        edges.append(GraphEdge(q, ts, te, sorted(sb), sorted(rb), slopes))
    g = ControlGraph(edges, root_t, [as_fraction(q) for q in punctures], equal)
    if offgraph:
        for e in edges:
            _check_offgraph(M, e, p, g)
    return g


def _check_offgraph(M: DiffModule, e: GraphEdge, p: int, g: ControlGraph):
    """Check the constant-radius rule on discs hanging off integer points of an edge."""
    lo, hi = sorted((e.t_start, e.t_end))
    t = math.ceil(lo)
    while t <= hi:
        if t == e.t_end and e.t_end == g.root_t:
            t += 1
            continue
        u = e.center + Fraction(p) ** t  # |u - center| = p^-t: a sibling residue disc
        if any(absval(u - q, p) < LogMag(Fraction(t)) for q in g.punctures):
            t += 1
            continue
        x = BerkPoint.at(u, t, p)
        Sx = spectrum_triangular(M, x, u)
        for dt in (Fraction(1, 2), Fraction(1), Fraction(2)):
            y = BerkPoint.at(u, t + dt, p)
            Sy = spectrum_triangular(M, y, u)
            pred = predicted_sigmas(Sx, x, y)
            g.offgraph_checked += 1
            if sorted(pred) != _sorted_sigmas(Sy):
                g.offgraph_failures.append((u, t, t + dt))
        t += 1


def predicted_sigmas(Sx: SpectrumResult, x: BerkPoint, y: BerkPoint) -> list[LogMag]:
    """Orbit radii at ``y`` inside a pole-free disc below ``x``.

    The radii of convergence stay constant in absolute terms, so the
    normalized radius at ``y`` is ``min(1, R(x) r(x) / r(y))``; each block is
    twisted by its own center.
    """
    out = []
    for ix, o in Sx.blocks:
        R = multiradius_block(o, o.center)
        Ry = min(LogMag.one(), R * x.radius / y.radius)
        out.extend([sigma_from_radius(Ry, x.p)] * len(ix))
    return sorted(out)


def multiradius_block(o: Orbit, a) -> LogMag:
    from .spectra import delta_of, radius_from_delta
    return radius_from_delta(delta_of(o, a), o.p)


# -- approximation -------------------------------------------------------------


@dataclass
class ApproxReport:
    l0: int | None
    per_l: list  # (l, ok, SpectrumResult)
    radii_equal_from: list  # per radius index: least l with eventual equality, or None
    base: SpectrumResult
    base_radii: tuple
    radii: list  # per l: tuple of radii


def _eps_region(a: Fraction, eps: LogMag, p: int) -> OpenRegion:
    k = math.floor(eps.t) + 1 if eps.t is not None else 0
    k = max(k, 0)
    return OpenRegion(tuple(Piece.disc(a + j, eps) for j in range(p ** k)))


def perturbed(M: DiffModule, dG) -> DiffModule:
    rows = [[g + (d if isinstance(d, RatFun) else RatFun.const(as_fraction(d))) for g, d in zip(r, dr)]
            for r, dr in zip(M.matrix, dG)]
    return DiffModule(rows, M.derivation)


def approx_check(M: DiffModule, schedule: Callable[[int], list], x: BerkPoint, c,
                 eps: LogMag, l_max: int, twist=0) -> ApproxReport:
    """Least ``l0`` after which the perturbed spectra match the limit."""
    base = spectrum_triangular(M, x, c)
    base_radii = multiradius(base, twist).radii
    rows, radii = [], []
    for l in range(l_max + 1):
        Sl = spectrum_triangular(perturbed(M, schedule(l)), x, c)
        rows.append((l, _matches(base, Sl, eps), Sl))
        radii.append(multiradius(Sl, twist).radii)
    l0 = None
    for l in range(l_max, -1, -1):
        if not rows[l][1]:
            break
        l0 = l
    eq_from = []
    for i, R in enumerate(base_radii):
        first = None
        for l in range(l_max, -1, -1):
            if radii[l][i] != R:
                break
            first = l
        eq_from.append(first)
    rep = ApproxReport(l0, rows, eq_from, base, base_radii, radii)
    if l0 is None:
        raise NeverStabilized(f"perturbed spectra never stabilize up to l={l_max}")
    return rep


def _matches(base: SpectrumResult, Sl: SpectrumResult, eps: LogMag) -> bool:
    if sorted(len(ix) for ix, _ in base.blocks) != sorted(len(ix) for ix, _ in Sl.blocks):
        return False
    for ix, o in base.blocks:
        # entries of a limit block must form one perturbed block
        match = [bo for jx, bo in Sl.blocks if set(ix) == set(jx)]
        if not match:
            return False
        q = match[0]
        if o.radius.is_zero:
            if not orbit_inside_region(q, _eps_region(o.center, eps, o.p)):
                return False
        elif not orbit_eq(o, q):
            return False
    return True


def counterexample_module(p: int, l: int) -> DiffModule:
    """``∇_l = T d/dT + p^(l-1) T^(p^l)`` on the trivial rank-one module."""
    T = RatFun.T()
    return DiffModule([[RatFun.const(Fraction(p) ** (l - 1)) * T ** (p ** l)]], Derivation.centered(0))
