"""Command-line front end: problem files, command dispatch and reports.

Problem files are plain text with four sections.  Blank lines and text
after ``#`` are ignored; every other line is ``key = value``::

    [field]
    p = 5               # a prime
    a = 1/25            # named constants, rational literals only
    c = 5

    [domain]
    root_t = 0          # the disc |T| <= p^-root_t
    hole_t = 4          # open discs |T - q| < p^-hole_t are removed
    punctures = 0, c

    [module]
    rank = 1
    derivation = d/dT   # or (T - c)d/dT, or T d/dT
    row = a/(T*(c - T)) # one line per matrix row, entries separated by commas

    [task]
    point = 0, 1        # center, t of the point x_{center, p^-t}
    branch = 0          # center of the derivation (T - branch)d/dT; defaults to the point center
    twist = 0
    segment = 1/2, 2    # t range for vary
    steps = 16
    epsilon = 1/5       # a power of p
    lmax = 10
    perturb = 0, 1, 1   # rows of ΔG for approx, scaled by p^l (one line per row)
    matrix = 0, 1       # rows of A for project and topology-check
    matrix_b = 1, 0     # rows of B for topology-check (A + p^l B)
    cluster = 0, 0      # center, t of the closed disc selecting a cluster
    neighborhoods = 3

Expressions follow the grammar of :mod:`berkspec.expr`: integers, named
constants, ``T``, ``+ - * / ^`` with integer exponents and parentheses.

CSV columns per command:

* ``spectrum``: block, indices, center, log_sigma
* ``radii``: index, log_radius, radius
* ``decompose``: block, indices, rank, center, log_sigma
* ``vary``: t, then center_i, log_sigma_i per diagonal entry
* ``graph``: center, t_start, t_end, spectrum_breakpoints, radii_breakpoints
* ``project``: the rows of the idempotent
* ``approx``: l, matches, spectrum, radii
* ``topology-check``: n, l0

``log_sigma`` and ``log_radius`` are base-``p`` logarithms.  In JSON reports
points and orbits carry ``t`` with radius ``p^-t`` (``"infinity"`` for
radius 0), matching the ``t`` of ``--point``.  Exit status is 0 on success,
2 on a certified negative answer, 1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .berkline import BerkPoint, Disc
from .diffmod import Derivation, DiffModule, change_derivation
from .errors import (
    BerkspecError,
    DiscontinuityDetected,
    NeverStabilized,
    NotPiecewiseAffine,
    NotSeparated,
    ParseError,
)
from .expr import parse_expr, parse_rational_literal
from .funcalc import cauchy_idempotent, matrix_spectrum
from .kompakt import converges, point_neighborhood
from .ratfun import RatFun, laurent_split, pushforward_center_oracle
from .scalars import LogMag, Prime, format_rational, vp
from .spectra import is_refined, multiradius, robba_decompose, spectrum_triangular
from .variation import (
    controlling_graph,
    fit_log_affine,
    junction_check,
    vary_spectrum,
    approx_check,
)

COMMANDS = ("spectrum", "radii", "decompose", "vary", "graph", "project", "approx", "topology-check")
DEFAULT_SEED = 20240101

_SECTIONS = ("field", "domain", "module", "task")
_LIST_KEYS = {("module", "row"), ("task", "perturb"), ("task", "matrix"), ("task", "matrix_b")}


class CertifiedFailure(Exception):
    """A computation finished and certified a negative answer."""


@dataclass
class _Entry:
    value: str
    line: int
    col: int  # 0-based column where the value starts


@dataclass
class ProblemFile:
    p: int
    constants: dict
    root_t: Fraction = Fraction(0)
    hole_t: Fraction = Fraction(4)
    punctures: list = field(default_factory=list)
    module: DiffModule | None = None
    task: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.module.n if self.module else 0


def _split_lines(text: str) -> dict:
    sections: dict = {s: {} for s in _SECTIONS}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = re.match(r"^\s*\[\s*([A-Za-z]+)\s*\]\s*$", line)
        if m:
            current = m.group(1).lower()
            if current not in sections:
                raise ParseError(f"unknown section [{current}]", lineno, line.index("[") + 1)
            continue
        if current is None:
            raise ParseError("entry outside of any section", lineno, 1)
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1)
        key, value = line.split("=", 1)
        k = key.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", k):
            raise ParseError(f"bad key {k!r}", lineno, len(key) - len(key.lstrip()) + 1)
        entry = _Entry(value, lineno, len(key) + 1)
        if (current, k) in _LIST_KEYS:
            sections[current].setdefault(k, []).append(entry)
        elif k in sections[current]:
            raise ParseError(f"duplicate key {k!r}", lineno, len(key) - len(key.lstrip()) + 1)
        else:
            sections[current][k] = entry
    return sections


def _parts(e: _Entry) -> list[_Entry]:
    out, col = [], e.col
    for piece in e.value.split(","):
        out.append(_Entry(piece, e.line, col))
        col += len(piece) + 1
    return out


def _expr(e: _Entry, consts) -> RatFun:
    return parse_expr(e.value, consts, e.line, e.col)


def _const(e: _Entry, consts) -> Fraction:
    f = _expr(e, consts)
    if not f.is_const():
        raise ParseError("expected a constant, found an expression in T", e.line, e.col + 1)
    return f.const_value()


def _int(e: _Entry) -> int:
    s = e.value.strip()
    if not re.fullmatch(r"\d+", s):
        raise ParseError(f"expected a nonnegative integer, found {s!r}", e.line, e.col + 1)
    return int(s)


def _pair(e: _Entry, consts) -> tuple[Fraction, Fraction]:
    ps = _parts(e)
    if len(ps) != 2:
        raise ParseError("expected two comma-separated values", e.line, e.col + 1)
    return _const(ps[0], consts), _const(ps[1], consts)


def _derivation(e: _Entry, consts) -> Derivation:
    s = e.value.strip().replace(" ", "")
    if s == "d/dT":
        return Derivation.ddT()
    if s in ("Td/dT", "T*d/dT"):
        return Derivation.centered(0)
    m = re.fullmatch(r"\(T([-+].+)\)\*?d/dT", s)
    if m:
        shift = parse_expr(m.group(1), consts, e.line, e.col)
        if not shift.is_const():
            raise ParseError("derivation center must be a constant", e.line, e.col + 1)
        return Derivation.centered(-shift.const_value())
    raise ParseError(f"unknown derivation {e.value.strip()!r}", e.line, e.col + 1)


def _matrix(entries: list[_Entry], consts, n: int | None, what: str) -> list[list[RatFun]]:
    rows = [[_expr(x, consts) for x in _parts(e)] for e in entries]
    n = len(rows) if n is None else n
    if len(rows) != n:
        line = entries[-1].line if entries else None
        raise ParseError(f"{what}: expected {n} rows, found {len(rows)}", line, 1)
    for e, r in zip(entries, rows):
        if len(r) != n:
            raise ParseError(f"{what}: expected {n} entries, found {len(r)}", e.line, e.col + 1)
    return rows


def _const_matrix(entries, consts, what) -> list[list[Fraction]]:
    rows = _matrix(entries, consts, None, what)
    for e, r in zip(entries, rows):
        if not all(g.is_const() for g in r):
            raise ParseError(f"{what}: entries must be constants", e.line, e.col + 1)
    return [[g.const_value() for g in r] for r in rows]


def parse_problem(text: str) -> ProblemFile:
    sec = _split_lines(text)
    fld = dict(sec["field"])
    if "p" not in fld:
        raise ParseError("[field] must define p", None)
    pe = fld.pop("p")
    try:
        p = Prime(_int(pe))
    except ValueError as exc:
        raise ParseError(str(exc), pe.line, pe.col + 1) from None
    consts: dict = {}
    for name, e in fld.items():
        if name == "T":
            raise ParseError("T is reserved for the variable", e.line, 1)
        consts[name] = parse_rational_literal(e.value, e.line, e.col + len(e.value) - len(e.value.lstrip()))
    prob = ProblemFile(int(p), consts)

    dom = sec["domain"]
    if "root_t" in dom:
        prob.root_t = _const(dom["root_t"], consts)
    if "hole_t" in dom:
        prob.hole_t = _const(dom["hole_t"], consts)
    if "punctures" in dom:
        prob.punctures = [_const(x, consts) for x in _parts(dom["punctures"])]

    mod = sec["module"]
    if mod:
        if "rank" not in mod:
            raise ParseError("[module] must define rank", None)
        n = _int(mod["rank"])
        der = _derivation(mod["derivation"], consts) if "derivation" in mod else Derivation.ddT()
        rows = _matrix(mod.get("row", []), consts, n, "module")
        prob.module = DiffModule(rows, der)

    task = sec["task"]
    t: dict = {}
    for key in ("point", "segment", "cluster"):
        if key in task:
            t[key] = _pair(task[key], consts)
    for key in ("branch", "twist"):
        if key in task:
            t[key] = _const(task[key], consts)
    for key in ("steps", "lmax", "neighborhoods"):
        if key in task:
            t[key] = _int(task[key])
    if "epsilon" in task:
        e = task["epsilon"]
        t["epsilon"] = _p_power(_const(e, consts), p, e)
    if "perturb" in task:
        n = prob.n
        t["perturb"] = _matrix(task["perturb"], consts, n or None, "perturb")
    for key in ("matrix", "matrix_b"):
        if key in task:
            t[key] = _const_matrix(task[key], consts, key)
    prob.task = t
    return prob


def _p_power(q: Fraction, p: int, e: _Entry | None = None) -> LogMag:
    if q <= 0:
        raise ParseError("epsilon must be positive", e.line if e else None)
    k = vp(q, p)
    if Fraction(p) ** k != q:
        raise ParseError(f"epsilon must be a power of {p}, got {format_rational(q)}",
                         e.line if e else None)
    return LogMag(Fraction(-k))


# -- reports -----------------------------------------------------------------


@dataclass
class Report:
    command: str
    text: list
    rows: list  # CSV rows, header first
    data: dict
    figure: object = None  # callable(path) drawing the figure
    failure: str | None = None

    def emit(self, fmt: str) -> str:
        if fmt == "json":
            payload = {"command": self.command, **self.data}
            if self.failure:
                payload["failure"] = self.failure
            return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            csv.writer(buf, lineterminator="\n").writerows(self.rows)
            return buf.getvalue()
        lines = list(self.text)
        if self.failure:
            lines.append(f"FAILED: {self.failure}")
        return "\n".join(lines) + "\n"


def _fmt_t(t: LogMag) -> str:
    return "-inf" if t.is_zero else format_rational(t.log_p)


def _point_and_branch(prob: ProblemFile) -> tuple[BerkPoint, Fraction]:
    if "point" not in prob.task:
        raise ValueError("this command needs a point (task 'point' or --point)")
    c, t = prob.task["point"]
    x = BerkPoint.at(c, t, prob.p)
    return x, prob.task.get("branch", c)


def _need_module(prob: ProblemFile) -> DiffModule:
    if prob.module is None:
        raise ValueError("this command needs a [module] section")
    return prob.module


def _oracle_check(M: DiffModule, x: BerkPoint, c: Fraction, seed: int) -> list[dict]:
    """Compare each Laurent constant with a seeded grid of pushforward candidates."""
    rng = random.Random(seed)
    Mc = change_derivation(M, Derivation.centered(c))
    out = []
    for g in Mc.diagonal():
        split = laurent_split(g, c, x.radius, x.p, on_circle="outer")
        offsets = sorted(rng.sample(range(x.p ** 3), 16))
        exact = pushforward_center_oracle(g, c, x.radius, x.p, constant=split.constant, offsets=[])
        grid = pushforward_center_oracle(g, c, x.radius, x.p, offsets=offsets)
        out.append({"constant": format_rational(split.constant), "remainder_log_norm": _fmt_t(exact),
                    "grid_log_norm": _fmt_t(grid), "consistent": not grid < exact})
    return out


def cmd_spectrum(prob: ProblemFile, seed: int) -> Report:
    M = _need_module(prob)
    x, c = _point_and_branch(prob)
    S = spectrum_triangular(M, x, c)
    refined = is_refined(S)
    text = [f"point: {x.render()}  branch: {format_rational(c)}  p = {prob.p}",
            f"spectrum: {S.render()}"]
    rows = [["block", "indices", "center", "log_sigma"]]
    for k, ((ix, o), ref) in enumerate(zip(S.blocks, refined), start=1):
        ids = " ".join(map(str, ix))
        text.append(f"  block {k}: entries {ids}  {o.render()}  refined={ref}")
        rows.append([k, ids, format_rational(o.center), _fmt_t(o.radius)])
    text.append(f"separation certified: {S.separation_certified}")
    try:
        oracle = _oracle_check(M, x, c, seed)
    except BerkspecError as exc:
        oracle = [{"skipped": str(exc)}]
    data = {"point": x.to_json(), "branch": format_rational(c), **S.to_json(),
            "refined": refined, "oracle": oracle}
    return Report("spectrum", text, rows, data)


def cmd_radii(prob: ProblemFile, seed: int) -> Report:
    M = _need_module(prob)
    x, c = _point_and_branch(prob)
    a = prob.task.get("twist", Fraction(0))
    prof = multiradius(spectrum_triangular(M, x, c), a)
    text = [f"point: {x.render()}  twist: {format_rational(a)}"]
    rows = [["index", "log_radius", "radius"]]
    for i, R in enumerate(prof.radii, start=1):
        text.append(f"  R_{i} = {R.render(prob.p)}")
        rows.append([i, _fmt_t(R), R.render(prob.p)])
    data = {"point": x.to_json(), "twist": format_rational(a),
            "radii": [R.to_json() for R in prof.radii], "rendered": prof.render()}
    return Report("radii", text, rows, data)


def cmd_decompose(prob: ProblemFile, seed: int) -> Report:
    M = _need_module(prob)
    x, c = _point_and_branch(prob)
    S = spectrum_triangular(M, x, c)
    rows = [["block", "indices", "rank", "center", "log_sigma"]]
    try:
        parts = robba_decompose(S)
    except NotSeparated as exc:
        rep = Report("decompose", [f"spectrum: {S.render()}"], rows, S.to_json())
        rep.failure = str(exc)
        return rep
    text = [f"point: {x.render()}", "decomposition: " + " ⊕ ".join(f"M_{k}" for k in range(1, len(parts) + 1))]
    blocks = []
    for k, (ix, o, r) in enumerate(parts, start=1):
        ids = " ".join(map(str, ix))
        text.append(f"  M_{k}: rank {r}, entries {ids}, spectrum {o.render()}")
        rows.append([k, ids, r, format_rational(o.center), _fmt_t(o.radius)])
        blocks.append({"indices": list(ix), "rank": r, "orbit": o.to_json()})
    return Report("decompose", text, rows, {"point": x.to_json(), "blocks": blocks})


def _segment(prob: ProblemFile) -> tuple[Fraction, Fraction, Fraction]:
    if "segment" not in prob.task:
        raise ValueError("vary needs a segment (task 'segment = t_a, t_b')")
    ta, tb = prob.task["segment"]
    c = prob.task.get("branch", prob.task["point"][0] if "point" in prob.task else Fraction(0))
    return c, ta, tb


def _plot_variation(tbl, fits, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for i in range(tbl.n):
        pts = [(float(t), -float(o.radius.t)) for t, o in tbl.family(i) if not o.radius.is_zero]
        if pts:
            ax.plot(*zip(*pts), marker="o", ms=3, label=f"entry {i + 1}")
        for b in fits[i].breakpoints:
            ax.axvline(float(b), color="grey", lw=0.5, ls=":")
    ax.set_xlabel("t  (radius p^-t)")
    ax.set_ylabel("log_p sigma")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_vary(prob: ProblemFile, seed: int) -> Report:
    M = _need_module(prob)
    c, ta, tb = _segment(prob)
    steps = prob.task.get("steps", 16)
    tbl = vary_spectrum(M, c, ta, tb, steps, prob.p)
    fits = [fit_log_affine(tbl, i) for i in range(tbl.n)]
    text = [f"branch {format_rational(c)}, t from {format_rational(ta)} to {format_rational(tb)}, {steps} steps"]
    fit_json = []
    for i, fit in enumerate(fits, start=1):
        desc = []
        for q in fit.pieces:
            if q.slope is None:
                desc.append(f"[{format_rational(q.t_lo)}, {format_rational(q.t_hi)}]: sigma = 0")
            else:
                desc.append(f"[{format_rational(q.t_lo)}, {format_rational(q.t_hi)}]: "
                            f"t_sigma = {format_rational(q.slope)} t + {format_rational(q.intercept)}")
        text.append(f"  entry {i}: " + "; ".join(desc))
        fit_json.append([{"t_lo": format_rational(q.t_lo), "t_hi": format_rational(q.t_hi),
                          "slope": None if q.slope is None else format_rational(q.slope),
                          "intercept": None if q.intercept is None else format_rational(q.intercept)}
                         for q in fit.pieces])
    junctions, failure = [], None
    bps = sorted({b for f in fits for b in f.breakpoints})
    for b in bps:
        try:
            jr = junction_check(tbl, b)
        except DiscontinuityDetected as exc:
            failure = str(exc)
            continue
        except ValueError:
            continue
        text.append(f"  junction t={format_rational(b)}: {jr.left.render()} = {jr.right.render()}"
                    f" (labels {[format_rational(q) for q in jr.left_labels]} vs "
                    f"{[format_rational(q) for q in jr.right_labels]})")
        junctions.append({"t": format_rational(b), "left": jr.left.to_json(), "right": jr.right.to_json(),
                          "labels_differ": jr.labels_differ})
    data = {"branch": format_rational(c), "rows": [{"t": format_rational(t), **S.to_json()} for t, S in tbl.rows],
            "fits": fit_json, "junctions": junctions}
    rep = Report("vary", text, tbl.csv_rows(), data, figure=lambda path: _plot_variation(tbl, fits, path))
    rep.failure = failure
    return rep


def _plot_graph(g, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3))
    for k, e in enumerate(g.edges):
        ax.plot([float(e.t_end), float(e.t_start)], [k, k], color="black")
        ax.scatter([float(b) for b in e.spectrum_breakpoints], [k] * len(e.spectrum_breakpoints),
                   marker="o", label="spectrum" if k == 0 else None)
        ax.scatter([float(b) for b in e.radii_breakpoints], [k + 0.1] * len(e.radii_breakpoints),
                   marker="x", label="radii" if k == 0 else None)
    ax.set_yticks(range(len(g.edges)), [f"q={format_rational(e.center)}" for e in g.edges])
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_graph(prob: ProblemFile, seed: int) -> Report:
    M = _need_module(prob)
    if not prob.punctures:
        raise ValueError("graph needs punctures in [domain]")
    steps = prob.task.get("steps", 21)
    g = controlling_graph(M, prob.punctures, prob.p, prob.root_t, prob.hole_t, steps)
    fr = lambda xs: " ".join(format_rational(b) for b in xs)
    text = [f"root t={format_rational(g.root_t)}, hole t={format_rational(prob.hole_t)}, {steps} steps per edge"]
    rows = [["center", "t_start", "t_end", "spectrum_breakpoints", "radii_breakpoints"]]
    edges = []
    for e in g.edges:
        text.append(f"  edge from {format_rational(e.center)}: t in [{format_rational(e.t_end)}, "
                    f"{format_rational(e.t_start)}], spectrum breaks {{{fr(e.spectrum_breakpoints)}}}, "
                    f"radii breaks {{{fr(e.radii_breakpoints)}}}")
        rows.append([format_rational(e.center), format_rational(e.t_start), format_rational(e.t_end),
                     fr(e.spectrum_breakpoints), fr(e.radii_breakpoints)])
        edges.append({"center": format_rational(e.center), "t_start": format_rational(e.t_start),
                      "t_end": format_rational(e.t_end),
                      "spectrum_breakpoints": [format_rational(b) for b in e.spectrum_breakpoints],
                      "radii_breakpoints": [format_rational(b) for b in e.radii_breakpoints]})
    text.append(f"breakpoint sets equal: {g.equal_breakpoints}")
    text.append(f"off-graph checks: {g.offgraph_checked}, failures: {len(g.offgraph_failures)}")
    data = {"edges": edges, "equal_breakpoints": g.equal_breakpoints,
            "offgraph_checked": g.offgraph_checked, "offgraph_failures": len(g.offgraph_failures)}
    rep = Report("graph", text, rows, data, figure=lambda path: _plot_graph(g, path))
    if not g.equal_breakpoints:
        rep.failure = "spectrum and radii breakpoints differ"
    elif g.offgraph_failures:
        rep.failure = f"{len(g.offgraph_failures)} off-graph checks failed"
    return rep


def cmd_project(prob: ProblemFile, seed: int) -> Report:
    if "matrix" not in prob.task or "cluster" not in prob.task:
        raise ValueError("project needs task 'matrix' rows and 'cluster = center, t'")
    A = prob.task["matrix"]
    a, t = prob.task["cluster"]
    D = Disc(a, LogMag(t), closed=True)
    idem = cauchy_idempotent(A, D, prob.p)
    fm = [[format_rational(v) for v in r] for r in idem.e]
    text = [f"cluster disc {D.render(prob.p)}: eigenvalues {[format_rational(q) for q in idem.cluster]}",
            "idempotent e:"] + ["  [" + ", ".join(r) + "]" for r in fm]
    text.append(f"trace(e) = {format_rational(idem.trace)}; e^2 = e, Ae = eA, e + e' = I certified")
    data = {"cluster": [format_rational(q) for q in idem.cluster], "e": fm,
            "complement": [[format_rational(v) for v in r] for r in idem.complement]}
    return Report("project", text, fm, data)


def cmd_approx(prob: ProblemFile, seed: int) -> Report:
    M = _need_module(prob)
    x, c = _point_and_branch(prob)
    if "perturb" not in prob.task:
        raise ValueError("approx needs task 'perturb' rows")
    dG = prob.task["perturb"]
    p = prob.p
    eps = prob.task.get("epsilon", LogMag(Fraction(1)))
    lmax = prob.task.get("lmax", 10)
    a = prob.task.get("twist", Fraction(0))

    def schedule(l):
        s = Fraction(p) ** l
        return [[g * s for g in r] for r in dG]

    rows = [["l", "matches", "spectrum", "radii"]]
    try:
        rep = approx_check(M, schedule, x, c, eps, lmax, a)
    except NeverStabilized as exc:
        return Report("approx", [], rows, {}, failure=str(exc))
    text = [f"limit spectrum: {rep.base.render()}", f"l0 = {rep.l0} (checked up to l = {lmax})"]
    per = []
    for (l, ok, S), radii in zip(rep.per_l, rep.radii):
        rr = " ".join(R.render(p) for R in radii)
        text.append(f"  l={l}: {'ok' if ok else '--'}  {S.render()}  radii {rr}")
        rows.append([l, ok, S.render(), rr])
        per.append({"l": l, "matches": ok, "spectrum": S.to_json(), "radii": [R.to_json() for R in radii]})
    text.append(f"radii eventually equal from l = {rep.radii_equal_from}")
    return Report("approx", text, rows, {"l0": rep.l0, "per_l": per, "radii_equal_from": rep.radii_equal_from})


def cmd_topology_check(prob: ProblemFile, seed: int) -> Report:
    if "matrix" not in prob.task or "matrix_b" not in prob.task:
        raise ValueError("topology-check needs task 'matrix' and 'matrix_b' rows")
    A, B = prob.task["matrix"], prob.task["matrix_b"]
    p = prob.p
    lmax = prob.task.get("lmax", 6)
    count = prob.task.get("neighborhoods", 3)
    base = matrix_spectrum(A, p)
    if base.partial:
        raise ValueError("the characteristic polynomial of A does not split over Q")
    eigs = [o.center for o in base.points.orbits]

    def seq(l):
        s = Fraction(p) ** l
        Al = [[a + s * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]
        ms = matrix_spectrum(Al, p)
        if ms.partial:
            raise ValueError(f"A + p^{l} B has a non-split characteristic polynomial")
        return ms.points

    basis = [point_neighborhood(eigs, LogMag(Fraction(n))) for n in range(1, count + 1)]
    rep = converges(seq, base.points, basis, lmax)
    text = [f"spectrum of A: {base.points.render()}"]
    rows = [["n", "l0"]]
    for n, l0 in enumerate(rep.l0, start=1):
        text.append(f"  neighbourhood radius p^-{n}: l0 = {l0}")
        rows.append([n, "" if l0 is None else l0])
    out = Report("topology-check", text, rows, {"l0": rep.l0, "l_max": lmax})
    if any(l0 is None for l0 in rep.l0):
        out.failure = "spectra of A + p^l B not inside every neighbourhood by l_max"
    return out


_DISPATCH = {
    "spectrum": cmd_spectrum,
    "radii": cmd_radii,
    "decompose": cmd_decompose,
    "vary": cmd_vary,
    "graph": cmd_graph,
    "project": cmd_project,
    "approx": cmd_approx,
    "topology-check": cmd_topology_check,
}


def run(command: str, prob: ProblemFile, seed: int = DEFAULT_SEED) -> Report:
    if command not in _DISPATCH:
        raise ValueError(f"unknown command {command!r}")
    return _DISPATCH[command](prob, seed)


def _apply_overrides(prob: ProblemFile, args) -> None:
    consts = prob.constants
    flag = lambda s: _Entry(s, None, 0)
    if args.point is not None:
        prob.task["point"] = _pair(flag(args.point), consts)
        prob.task.pop("branch", None)
    if args.branch is not None:
        prob.task["branch"] = _const(flag(args.branch), consts)
    if args.twist is not None:
        prob.task["twist"] = _const(flag(args.twist), consts)
    if args.epsilon is not None:
        prob.task["epsilon"] = _p_power(parse_rational_literal(args.epsilon), prob.p)
    if args.lmax is not None:
        prob.task["lmax"] = args.lmax
    if args.steps is not None:
        prob.task["steps"] = args.steps


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="berkspec", description="Berkovich spectra of p-adic differential modules.")
    ap.add_argument("--input", required=True, help="problem file")
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--point", help='"c,t": the point x_{c, p^-t}')
    ap.add_argument("--branch", help="center c of (T - c)d/dT; defaults to the point center")
    ap.add_argument("--twist", help="twist a for radii")
    ap.add_argument("--epsilon", help="num/den, a power of p")
    ap.add_argument("--lmax", type=int)
    ap.add_argument("--steps", type=int)
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("text", "csv", "json"), default="text")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for oracle grids")
    ap.add_argument("--figure", help="also render a figure (vary, graph); needs matplotlib")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.input, encoding="utf-8") as fh:
            prob = parse_problem(fh.read())
        _apply_overrides(prob, args)
        rep = run(args.command, prob, args.seed)
        out = rep.emit(args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
        if args.figure:
            if rep.figure is None:
                raise ValueError(f"{args.command} has no figure")
            rep.figure(args.figure)
    except (NotSeparated, DiscontinuityDetected, NeverStabilized, NotPiecewiseAffine, CertifiedFailure) as exc:
        print(f"certified failure: {exc}", file=sys.stderr)
        return 2
    except (BerkspecError, ValueError, OSError, ImportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2 if rep.failure else 0


if __name__ == "__main__":
    sys.exit(main())
