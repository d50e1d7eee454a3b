"""Trace propagation on the Farey tree and the numerical verifiers built on it.

Everything here is deterministic: enumeration follows the cyclic slope order
(infinity, positive slopes decreasing, then 0 toward -infinity), and ties are
broken by that order.
"""

from __future__ import annotations

import cmath
import csv
import enum
import io
import math
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import farey
from .farey import FareyEdge, Slope, christoffel, cyclic_key, fibonacci, level, slopes_up_to
from .geometry import (
    ORIGIN,
    GeometryError,
    H3Point,
    Kind,
    Mat2,
    TAU_CLS,
    theta_from_traces,
    axis,
    classify,
    coxeter_extension,
    hyperbolic_distance,
    is_non_loxodromic_trace,
    line_meet,
    parallel_angle,
    translation_length,
)

DEFAULT_MARGIN = 1e-3
OVER_EXPLORE = 4


# -- trace tree ---------------------------------------------------------------


@dataclass(frozen=True)
class TraceEdge:
    """A directed Farey edge with the traces of its quadrilateral ``[w; x, y; z]``."""

    edge: FareyEdge
    tx: complex
    ty: complex
    tz: complex
    tw: complex
    depth: int

    def residual(self):
        return abs(self.tw + self.tz - self.tx * self.ty) / max(1.0, abs(self.tx * self.ty))

    def escaping(self, margin):
        """Conservative escape certificate for the subtree beyond this edge."""
        ax, ay, az = abs(self.tx), abs(self.ty), abs(self.tz)
        if min(ax, ay) <= 2 + margin or az <= max(ax, ay):
            return False
        return (self.tz / (self.tx * self.ty)).real >= 0.5

    def split(self):
        """The two edges born with the mediant, each carrying its own quadrilateral."""
        x, y = self.edge.frm_vec, self.edge.to_vec
        z = (x[0] + y[0], x[1] + y[1])
        left = TraceEdge(FareyEdge(x, z), self.tx, self.tz, self.tx * self.tz - self.ty, self.ty, self.depth + 1)
        right = TraceEdge(FareyEdge(z, y), self.tz, self.ty, self.tz * self.ty - self.tx, self.tx, self.depth + 1)
        return left, right

    @property
    def mediant(self):
        x, y = self.edge.frm_vec, self.edge.to_vec
        return Slope(x[0] + y[0], x[1] + y[1])


def root_edges(rep):
    """The two directed edges leaving [a, b]: toward the positive and the negative slopes."""
    ta, tb, tab = rep.traces()
    taib = ta * tb - tab
    pos = TraceEdge(farey.BASE_EDGE, ta, tb, tab, taib, 0)
    neg = TraceEdge(farey.BASE_EDGE_RIGHT, ta, tb, taib, tab, 0)
    return pos, neg


def trace_tree(rep, max_level):
    """``tr rho(Ch[s])`` for every slope of level <= max_level, via ``w + z = xy``.

    Returned dict is ordered cyclically.
    """
    ta, tb, _ = rep.traces()
    out = {farey.INFINITY: ta, farey.ZERO: tb}
    stack = list(root_edges(rep))
    while stack:
        e = stack.pop()
        if e.depth + 1 > max_level:
            continue
        out[e.mediant] = e.tz
        stack.extend(e.split())
    return {s: out[s] for s in sorted(out, key=cyclic_key)}


# -- Bowditch Q-conditions ------------------------------------------------------


class Verdict(enum.Enum):
    YES = "Yes"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class BqVerdict:
    kind: Verdict
    max_level: int = 0
    frontier: int = 0
    small_traces: list = field(default_factory=list)  # [(Slope, trace)] with |tr| <= 2
    witness: tuple | None = None  # (Slope, trace)
    depth: int = 0
    explored: int = 0
    note: str = ""

    def to_json(self):
        out = {"kind": self.kind.value}
        census = [{"slope": str(s), "trace": [t.real, t.imag]} for s, t in self.small_traces]
        if self.kind is Verdict.YES:
            out["certificate"] = {"max_level": self.max_level, "frontier": self.frontier, "small_traces": census}
        elif self.kind is Verdict.NO:
            s, t = self.witness
            out["witness"] = {"slope": str(s), "trace": [t.real, t.imag]}
        else:
            out["depth"] = self.depth
            out["small_traces"] = census
            if self.note:
                out["note"] = self.note
        return out

    def __bool__(self):
        return self.kind is Verdict.YES


def _check_vertex(s, t, tol, small):
    if is_non_loxodromic_trace(t, tol):
        return (s, t)
    if abs(t) <= 2:
        small.append((s, t))
    return None


def _over_explore(e, extra, tol):
    """Walk ``extra`` levels past a certified edge; return the first offending
    vertex ``(slope, trace, non_loxodromic)`` or ``None``."""
    layer = [e]
    for _ in range(extra):
        nxt = []
        for f in layer:
            if is_non_loxodromic_trace(f.tz, tol):
                return f.mediant, f.tz, True
            if abs(f.tz) <= 2:
                return f.mediant, f.tz, False
            nxt.extend(f.split())
        layer = nxt
    return None


def bq_decide(rep, max_level, margin=DEFAULT_MARGIN, tol=TAU_CLS, over_explore=OVER_EXPLORE):
    """Semi-decide the Bowditch Q-conditions by a breadth-first search on the Farey tree.

    Yes: every branch ends in a certified escaping edge within ``max_level``
    and no vertex inside is non-loxodromic.  No: some reached vertex has a
    real trace in [-2, 2] (the witness).  Inconclusive otherwise.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    if max_level < 1:
        raise ValueError("max_level must be at least 1")
    ta, tb, tab = rep.traces()
    taib = ta * tb - tab
    small = []
    for s, t in ((farey.INFINITY, ta), (farey.ZERO, tb), (Slope(1, 1), tab), (Slope(-1, 1), taib)):
        hit = _check_vertex(s, t, tol, small)
        if hit:
            return BqVerdict(Verdict.NO, witness=hit, depth=1)

    queue = deque(root_edges(rep))
    certified = []
    open_edges = []
    deepest = 1
    explored = 0
    while queue:
        e = queue.popleft()
        explored += 1
        if e.escaping(margin):
            certified.append(e)
            deepest = max(deepest, e.depth + 1)
            continue
        if e.depth + 1 >= max_level:
            open_edges.append(e)
            continue
        for child in e.split():
            hit = _check_vertex(child.mediant, child.tz, tol, small)
            if hit:
                return BqVerdict(Verdict.NO, witness=hit, depth=child.depth + 1, explored=explored)
            queue.append(child)
        deepest = max(deepest, e.depth + 2)

    small.sort(key=lambda st: cyclic_key(st[0]))
    if open_edges:
        return BqVerdict(
            Verdict.INCONCLUSIVE, depth=max_level, small_traces=small, explored=explored, frontier=len(certified)
        )
    for e in certified:
        bad = _over_explore(e, over_explore, tol)
        if bad is None:
            continue
        s, t, nonlox = bad
        if nonlox:
            return BqVerdict(Verdict.NO, witness=(s, t), depth=level(s), explored=explored)
        return BqVerdict(
            Verdict.INCONCLUSIVE,
            depth=max_level,
            small_traces=small,
            explored=explored,
            note=f"over-exploration found |tr| <= 2 at {s}",
        )
    return BqVerdict(Verdict.YES, max_level=deepest, frontier=len(certified), small_traces=small, explored=explored)


# -- growth of traces ------------------------------------------------------------


@dataclass(frozen=True)
class GrowthFit:
    m: float
    c: float
    min_residual: float
    excluded: tuple = ()
    degenerate: bool = False


def growth_fit(rep, max_level):
    """Least-squares line ``log|tr| ~ m * Fib + b`` over all slopes of level <= max_level.

    ``c`` is chosen so that ``log|tr| >= m * Fib - c`` holds on every sample;
    ``min_residual`` is the most negative residual of the fitted line.
    """
    xs, ys, excluded = [], [], []
    for s, t in trace_tree(rep, max_level).items():
        if abs(t) == 0:
            excluded.append(s)
            continue
        xs.append(fibonacci(s))
        ys.append(math.log(abs(t)))
    if len(xs) < 3:
        raise ValueError("growth fit needs at least 3 slopes with nonzero trace")
    x, y = np.array(xs, float), np.array(ys, float)
    m, b = np.polyfit(x, y, 1)
    res = y - (m * x + b)
    r = float(res.min())
    degenerate = abs(m) < 1e-3
    if degenerate:
        warnings.warn("growth fit is degenerate (slope ~ 0)", RuntimeWarning, stacklevel=2)
    return GrowthFit(float(m), float(-(b + r)), r, tuple(excluded), degenerate)


# -- angle decay and separation ---------------------------------------------------


@dataclass
class ThetaLevel:
    level: int
    max_theta: float
    edges: int
    failures: int
    argmax: FareyEdge | None

    @property
    def flagged(self):
        return self.edges == 0 or self.failures > 0


def trace_edges(rep, max_level):
    """Co-directed edges of level <= max_level with their quadrilateral traces,
    level by level (base edges first, then positive before negative side)."""
    layer = list(root_edges(rep))
    for _ in range(max_level + 1):
        yield from layer
        layer = [c for e in layer for c in e.split()]


def edge_traces(rep, edge):
    """``TraceEdge`` for a co-directed Christoffel edge, by direct evaluation."""
    side = -1 if min(edge.frm_vec[0], edge.to_vec[0]) < 0 else 1
    x, y = christoffel(edge.frm, side), christoffel(edge.to, side)
    tx, ty = rep.trace(x), rep.trace(y)
    tz = rep.trace(x * y)
    tw = rep.trace(~x * y)
    return TraceEdge(edge, tx, ty, tz, tw, edge.level)


def edge_theta(rep, te, kappa=None, tol=TAU_CLS):
    """Angle of the hexagon of a Christoffel basis, from the traces of its quadrilateral.

    The closed form stays accurate deep in the tree, where the axes of the two
    generators nearly coincide and the geometric normalization loses all digits.
    """
    if kappa is None:
        kappa = rep.kappa
    for t in (te.tx, te.ty):
        if is_non_loxodromic_trace(t, tol):
            raise GeometryError("basis element is not loxodromic")
    return theta_from_traces(te.tx, te.ty, te.tz, kappa, te.tw)


def theta_scan(rep, max_level):
    """Per level, the largest angle over co-directed Christoffel edges of that level."""
    kappa = rep.kappa
    rows = [ThetaLevel(k, float("nan"), 0, 0, None) for k in range(max_level + 1)]
    for te in trace_edges(rep, max_level):
        row = rows[te.depth]
        try:
            th = edge_theta(rep, te, kappa)
        except GeometryError:
            row.failures += 1
            continue
        row.edges += 1
        if not row.max_theta >= th:  # also replaces the initial nan
            row.max_theta, row.argmax = th, te.edge
    return rows


def separation_certificate(rep, edge, kappa=None):
    """Both sufficient conditions for the separating planes of a Christoffel basis:
    angle below pi/4 and parallel angle of half the higher generator's length below pi/4.

    ``edge`` is a ``FareyEdge`` or an already computed ``TraceEdge``.
    """
    te = edge if isinstance(edge, TraceEdge) else edge_traces(rep, edge)
    theta = edge_theta(rep, te, kappa)
    if not theta < math.pi / 4:
        return False
    e = te.edge
    t_hi = te.ty if level(e.to) >= level(e.frm) else te.tx
    ell = 2 * cmath.acosh(t_hi / 2).real
    if ell <= 0:
        return False
    return parallel_angle(ell / 2) < math.pi / 4


@dataclass
class SeparationScan:
    per_level: list  # (level, all_true, edges, failures)
    n_star: int | None


def separation_scan(rep, max_level):
    """First level ``N*`` from which every Christoffel edge up to ``max_level`` is certified."""
    kappa = rep.kappa
    stats = {k: [True, 0, 0] for k in range(max_level + 1)}
    for te in trace_edges(rep, max_level):
        try:
            ok = separation_certificate(rep, te, kappa)
        except GeometryError:
            ok = False
        st = stats[te.depth]
        st[1] += 1
        if not ok:
            st[0] = False
            st[2] += 1
    per_level = [(k, *stats[k]) for k in range(max_level + 1)]
    n_star = None
    for k in range(max_level, -1, -1):
        if not stats[k][0]:
            break
        n_star = k
    return SeparationScan(per_level, n_star)


# -- primitive stability margin ------------------------------------------------------


C_CAP = 50.0
M_STEP = 0.01


@dataclass(frozen=True)
class PsEstimate:
    base_point: H3Point
    m: float
    c: float
    samples: int
    stable_cap: float = math.inf


def _conjugator_to(base):
    """det-1 map sending (0, 1) to ``base``."""
    s = math.sqrt(base.t)
    return Mat2(s, base.z / s, 0, 1 / s)


def _orbit_distance(M):
    """``d_H(o, M o)`` for o = (0, 1): ``cosh d = |M|_F^2 / 2`` (det 1)."""
    n = np.sqrt((np.abs(M) ** 2).sum(axis=(-2, -1)))
    out = np.empty_like(n)
    big = n > 1e4
    out[big] = 2 * np.log(n[big])
    x = n[~big] ** 2 / 2
    out[~big] = np.arccosh(np.maximum(x, 1.0))
    return out


def _min_dist_by_gap(letters, gens, max_gap):
    """For the bi-infinite periodic word, ``min_i d(o, g_i^-1 g_{i+k} o)`` for k = 1..max_gap."""
    n = len(letters)
    stack = np.stack([gens[x] for x in letters])  # (n, 2, 2)
    acc = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    out = np.empty(max_gap)
    for k in range(max_gap):
        step = stack[(np.arange(n) + k) % n]
        acc = acc @ step
        out[k] = _orbit_distance(acc).min()
    return out


def ps_margin(rep, base=ORIGIN, max_level=6, power_window=4, m_step=M_STEP, c_cap=C_CAP):
    """Empirical primitive-stability constants ``(m, c)`` on Christoffel axes.

    For each Christoffel word ``w`` of level <= max_level, the window of radius
    ``power_window * |w|`` on its axis is sampled and every pair ``(u, v)``
    contributes ``m * d_e(u, v) - d_H(u o, v o) <= c``.  The largest grid value
    ``m`` whose worst-case ``c`` stays below ``c_cap`` is returned, further
    capped by the smallest stable length ``l_H(w) / |w|`` seen (a non-loxodromic
    primitive forces ``m = 0``).
    """
    T = _conjugator_to(base)
    Ti = T.inv()
    gens = {}
    for x, M in ((1, rep.A), (-1, rep.A.inv()), (2, rep.B), (-2, rep.B.inv())):
        gens[x] = (Ti @ M @ T).to_array()
    min_d = {}
    samples = 0
    stable = math.inf
    for s in slopes_up_to(max_level):
        w = christoffel(s)
        n = len(w)
        r = power_window * n
        gaps = 2 * r
        if gaps == 0:
            continue
        d = _min_dist_by_gap(w.letters, gens, gaps)
        for k in range(gaps):
            min_d[k + 1] = min(min_d.get(k + 1, math.inf), float(d[k]))
        samples += (2 * r + 1) * (2 * r) // 2
        W = rep.evaluate(w)
        if classify(W) is not Kind.LOXODROMIC:
            stable = 0.0
        else:
            stable = min(stable, translation_length(W) / n)
    ks = np.array(sorted(min_d), float)
    ds = np.array([min_d[int(k)] for k in ks])

    def worst(m):
        return max(0.0, float((m * ks - ds).max()))

    best = 0
    k = 1
    while True:
        m = k * m_step
        if m > stable or worst(m) > c_cap:
            break
        best = k
        k += 1
    m = best * m_step
    return PsEstimate(base, m, worst(m), samples, stable)


# -- bounded intersection -------------------------------------------------------------


@dataclass
class BiReport:
    diamP: float
    diamQ: float
    diamR: float
    countP: int
    countQ: int
    countR: int
    max_dist_residual: float
    max_angle_residual: float
    skipped: list = field(default_factory=list)  # (Slope, basis, word) of non-loxodromic palindromes
    points: dict = field(default_factory=dict)

    def diameters(self):
        return {"P": self.diamP, "Q": self.diamQ, "R": self.diamR}


# basis of the palindrome -> the half-turn whose axis it meets
_BI_TARGET = {"ab": "R", "bc": "P", "ca": "Q"}
BI_DIST_TOL = 1e-6
BI_ANGLE_TOL = 1e-4


def bi_half_turns(rep):
    """Half-turns ``P, Q, R`` with ``rho(a) = QR`` and ``rho(b) = RP`` (in PSL)."""
    P0, Q0, R0 = coxeter_extension(rep, (rep.A, rep.B))
    return {"P": R0, "Q": P0, "R": Q0}


def _diameter(points):
    best = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            best = max(best, hyperbolic_distance(points[i], points[j]))
    return best


def bi_scan(rep, max_level):
    """Intersections of palindromic primitive axes with the half-turn axes P, Q, R."""
    turns = bi_half_turns(rep)
    pts = {"P": [], "Q": [], "R": []}
    seen = {"P": set(), "Q": set(), "R": set()}
    skipped = []
    dmax = amax = 0.0
    for s in slopes_up_to(max_level):
        for basis, w in farey.tilde_palindromes(s).items():
            key = _BI_TARGET[basis]
            if w in seen[key]:
                continue
            seen[key].add(w)
            W = rep.evaluate(w)
            if classify(W) is not Kind.LOXODROMIC:
                skipped.append((s, basis, w))
                continue
            meet = line_meet(axis(W), turns[key])
            ares = abs(meet.angle - math.pi / 2)
            if meet.dist > BI_DIST_TOL or ares > BI_ANGLE_TOL:
                raise GeometryError(
                    f"axis of {w} misses the {key} axis (dist {meet.dist:.3g}, angle residual {ares:.3g})"
                )
            dmax, amax = max(dmax, meet.dist), max(amax, ares)
            pts[key].append(meet.p2)
    return BiReport(
        _diameter(pts["P"]),
        _diameter(pts["Q"]),
        _diameter(pts["R"]),
        len(pts["P"]),
        len(pts["Q"]),
        len(pts["R"]),
        dmax,
        amax,
        skipped,
        pts,
    )


# -- CSV output ------------------------------------------------------------------------


def _fmt(x):
    if isinstance(x, complex):
        return f"{x.real:.17g}", f"{x.imag:.17g}"
    if isinstance(x, float):
        return (f"{x:.17g}",)
    return (str(x),)


def to_csv(header, rows):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        flat = []
        for x in row:
            flat.extend(_fmt(x))
        wr.writerow(flat)
    return buf.getvalue()


def trace_tree_csv(rep, max_level):
    rows = [(str(s), level(s), t) for s, t in trace_tree(rep, max_level).items()]
    return to_csv(("slope", "level", "trace_re", "trace_im"), rows)


def theta_scan_csv(scan):
    rows = [
        (str(r.argmax) if r.argmax else "", r.level, r.max_theta, r.edges, r.failures) for r in scan
    ]
    return to_csv(("slope", "level", "max_theta", "edges", "failures"), rows)
