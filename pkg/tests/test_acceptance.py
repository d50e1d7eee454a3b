"""Acceptance suite: one test per criterion, summarized as PASS/FAIL lines at the end
of the run (see conftest.py)."""

import math
import time

import numpy as np
import pytest

from farey_bq import cli
from farey_bq.analysis import (
    Verdict,
    bi_half_turns,
    bi_scan,
    bq_decide,
    growth_fit,
    ps_margin,
    separation_scan,
    theta_scan,
    trace_tree,
)
from farey_bq.farey import (
    Color,
    Slope,
    christoffel,
    christoffel_from_cf,
    codirected_edges,
    fibonacci,
    level_partition,
    palindrome_in_basis,
    palindrome_rep,
    slopes_up_to,
    tilde_palindromes,
    tricolor,
)
from farey_bq.freegroup import (
    Word,
    abelianize,
    are_conjugate,
    factor_positive,
    is_cyclically_reduced,
    is_palindrome,
)
from farey_bq.geometry import (
    Kind,
    Mat2,
    Representation,
    angle_theta,
    angle_theta_arccosh,
    axis,
    classify,
    fricke_kappa,
    hexagon,
    line_meet,
    representation_from_traces,
)

from oracles import is_rotation, sturmian_word

rng = np.random.default_rng(2024)
criterion = pytest.mark.criterion
AB = (Word("a"), Word("b"))


def rc(scale=2.0):
    return complex(rng.normal(0, scale), rng.normal(0, scale))


def rand_sl2():
    a, b, c = rc(), rc(), rc()
    return Mat2(a, b, c, (1 + b * c) / a)


def hexagon_rep():
    while True:
        rep = representation_from_traces(rc(1.5) + 2, rc(1.5) + 2, rc(1.5) + 2)
        if rep.is_irreducible() and all(
            classify(M) is Kind.LOXODROMIC for M in (rep.A, rep.B, rep.A @ rep.B)
        ):
            return rep


def yes_reps(n, scale=0.3):
    out = []
    while len(out) < n:
        x, y, z = (3 + complex(*rng.normal(0, scale, 2)) for _ in range(3))
        rep = representation_from_traces(x, y, z)
        v = bq_decide(rep, 10)
        if v.kind is Verdict.YES:
            out.append((rep, v))
    return out


@criterion(1, "Christoffel golden values")
def test_c01_christoffel_golden():
    assert str(christoffel(Slope(5, 3))) == "aabaabab"
    assert christoffel(Slope(5, 3)) == Word.parse("(a^2b)^2ab")
    assert christoffel(Slope(17, 10)) == Word.parse("a^2b((a^2b)^2ab)^3")
    assert christoffel_from_cf([1, 1, 2, 2, 1])[1] == christoffel(Slope(17, 10))


PALINDROME_TABLE = {
    "1/0": "a", "0/1": "b", "1/1": "ba", "-1/1": "bA",
    "2/1": "aba", "1/2": "bab", "-2/1": "AbA", "-1/2": "bAb",
    "3/1": "aba^2", "3/2": "a(ba)^2", "2/3": "(ba)^2b", "1/3": "b^2ab",
    "4/1": "a^2ba^2", "5/2": "aba^3ba", "5/3": "a(ba)^2aba", "4/3": "a(ba)^3",
    "3/4": "(ba)^3b", "3/5": "bab(ba)^2b", "2/5": "bab^3ab", "1/4": "b^2ab^2",
}


@criterion(2, "palindrome table")
def test_c02_palindrome_table():
    bad = [s for s, w in PALINDROME_TABLE.items() if palindrome_rep(Slope.parse(s)) != Word.parse(w)]
    assert bad == []


@criterion(3, "combinatorial invariants to level 8")
def test_c03_combinatorial_invariants():
    slopes = slopes_up_to(8)
    assert len(slopes) == 512
    violations = []
    for s in slopes:
        side = -1 if s.p < 0 else 1
        w = christoffel(s, side)
        if len(w) != fibonacci(s):
            violations.append(("fib length", s))
        if not is_cyclically_reduced(w):
            violations.append(("cyclically reduced", s))
        if not w.is_positive_in({side, 2}):
            violations.append(("positive", s))
        if abelianize(w) not in ((s.p, s.q), (-s.p, -s.q)):
            violations.append(("abelianization", s))
        if s.p > 0 and s.q > 0 and not is_rotation(str(w), sturmian_word(s.p, s.q)):
            violations.append(("cutting sequence", s))
        pal = palindrome_rep(s)
        if is_palindrome(pal) != (tricolor(s) is not Color.GRAY):
            violations.append(("color law", s))
        if not (are_conjugate(pal, w) or are_conjugate(pal, ~w)):
            violations.append(("palindrome class", s))
        for basis in tilde_palindromes(s):
            if not is_palindrome(palindrome_in_basis(s, basis)[0]):
                violations.append(("tilde palindrome", s))
    # mediant addition of lengths on every co-directed edge
    for e, _ in codirected_edges(7):
        z = Slope(e.frm_vec[0] + e.to_vec[0], e.frm_vec[1] + e.to_vec[1])
        if fibonacci(z) != fibonacci(e.frm) + fibonacci(e.to):
            violations.append(("fib addition", z))
    # positive factorization in the basis of the partition interval containing each slope
    part = level_partition(3)
    for s in slopes:
        j = part.locate(s)
        if j is None:
            continue
        e = part.intervals[j]
        side = -1 if min(e.frm_vec[0], e.to_vec[0]) < 0 else 1
        x, y = christoffel(e.frm, side), christoffel(e.to, side)
        if factor_positive(christoffel(s, -1 if s.p < 0 else 1), x, y) is None:
            violations.append(("positive factorization", s))
    assert violations == []


@criterion(4, "trace identity and Fricke polynomial")
def test_c04_trace_identity_fricke():
    worst = 0.0
    for _ in range(1000):
        X, Y = rand_sl2(), rand_sl2()
        lhs = X.tr() * Y.tr()
        worst = max(worst, abs(lhs - (X @ Y).tr() - (X.inv() @ Y).tr()) / max(1.0, abs(lhs)))
    assert worst < 1e-9
    worst = 0.0
    for _ in range(1000):
        x, y, z = rc(), rc(), rc()
        rep = representation_from_traces(x, y, z)
        direct = (rep.A @ rep.B @ rep.A.inv() @ rep.B.inv()).tr()
        worst = max(worst, abs(direct - fricke_kappa(x, y, z)) / max(1.0, abs(x * y * z)))
    assert worst < 1e-8


@criterion(5, "hexagon suite")
def test_c05_hexagon_suite():
    bases = [AB, (Word("b"), Word("a")), (Word("ab"), Word("b")), (Word("a"), Word("ab")), (Word("aab"), Word("ab"))]
    for _ in range(100):
        rep = hexagon_rep()
        h = hexagon(rep, AB)
        assert h.cosine_law_residual() < 1e-8
        assert h.amplitude_residual() < 1e-8
        assert h.kappa_residual(rep.kappa) < 1e-8
        mods = [abs(hexagon(rep, b).amplitude) for b in bases if all(
            classify(rep.evaluate(w)) is Kind.LOXODROMIC for w in b
        )]
        assert max(mods) - min(mods) < 1e-8


@criterion(6, "theta oracle agreement")
def test_c06_theta_oracles():
    for _ in range(100):
        rep = hexagon_rep()
        t1, t2 = angle_theta(rep, AB), angle_theta_arccosh(rep, AB)
        d = min(abs(t1 - t2), abs(t1 - (math.pi - t2)))
        assert d < 1e-6
    for _ in range(50):
        x, y, z = rng.uniform(2.2, 6, 3)
        rep = representation_from_traces(x, y, z)
        if not rep.is_irreducible():
            continue
        assert abs(angle_theta(rep, AB) - angle_theta_arccosh(rep, AB)) < 1e-6


@criterion(7, "Q-condition decision")
def test_c07_bq_decide():
    v = bq_decide(representation_from_traces(3, 3, 3), 10)
    assert v.kind is Verdict.YES and v.max_level <= 8
    for traces in [(1.5, 3, 3), (3, -2, 3), (3, 3, 0.5), (4, 4, 15), (0, 0, 0)]:
        v = bq_decide(representation_from_traces(*traces), 10)
        assert v.kind is Verdict.NO and v.witness is not None
        assert abs(v.witness[1].imag) < 1e-9 and -2 <= v.witness[1].real <= 2
    # independent over-exploration: every trace of modulus <= 2 four levels past
    # the certificate must already be in the certificate's census
    for rep, v in yes_reps(20):
        census = {s for s, _ in v.small_traces}
        for s, t in trace_tree(rep, v.max_level + 4).items():
            if abs(t) <= 2:
                assert s in census, s


@criterion(8, "trace growth on (3,3,3)")
def test_c08_growth():
    rep = representation_from_traces(3, 3, 3)
    fit = growth_fit(rep, 10)
    assert fit.m > 0
    for s, t in trace_tree(rep, 10).items():
        assert math.log(abs(t)) >= fit.m * fibonacci(s) - fit.c - 1e-9


N_STAR_333 = 2


@criterion(9, "angle decay and separation on (3,3,3)")
def test_c09_theta_separation():
    rep = representation_from_traces(3, 3, 3)
    scan = theta_scan(rep, 10)
    assert scan[10].max_theta < scan[2].max_theta
    sep = separation_scan(rep, 10)
    assert sep.n_star is not None and sep.n_star <= 10
    assert sep.n_star == N_STAR_333


@criterion(10, "primitive stability margin")
def test_c10_ps_margin():
    for rep, _ in yes_reps(20):
        assert ps_margin(rep, max_level=6, power_window=4).m > 0
    rep = representation_from_traces(1, 3, 3)
    assert classify(rep.A) is Kind.ELLIPTIC
    assert ps_margin(rep, max_level=6, power_window=4).m <= 0


@criterion(11, "bounded intersection on (3,3,3)")
def test_c11_bounded_intersection():
    rep = representation_from_traces(3, 3, 3)
    b6, b8 = bi_scan(rep, 6), bi_scan(rep, 8)
    assert b8.max_dist_residual < 1e-6 and b8.max_angle_residual < 1e-6
    for k, d in b8.diameters().items():
        assert math.isfinite(d)
        assert abs(d - b6.diameters()[k]) < 1e-3


@criterion(12, "non-palindromic orthogonal axis")
def test_c12_counterexample():
    ell = math.acosh((1 + math.sqrt(3)) / 2)
    c, s = math.cosh(ell / 2), math.sinh(ell / 2)
    A = Mat2(c, s, s, c)  # axis (-1, 1)
    B = Mat2(math.exp(ell / 2), 0, 0, math.exp(-ell / 2))  # axis (0, inf)
    rep = Representation(A, B)
    R = bi_half_turns(rep)["R"]
    U = rep.evaluate(Word.parse("a^2ba^-1b^-2"))
    assert classify(U) is Kind.ELLIPTIC
    g = axis(U)
    m = line_meet(g, R)
    assert m.dist < 1e-8
    e1 = sorted((g.u, g.u2), key=lambda z: (z.imag, z.real))
    e2 = sorted((R.u, R.u2), key=lambda z: (z.imag, z.real))
    assert all(abs(p - q) < 1e-6 for p, q in zip(e1, e2))


@criterion(13, "scan determinism")
def test_c13_scan_determinism(tmp_path, capsys):
    argv = ["scan", "--x", "3,0", "--y", "3,0", "--re-range", "2.5,6", "--im-range=-1,1",
            "--size", "64x64", "--depth", "8", "--format", "csv"]
    texts = []
    t0 = time.perf_counter()
    for i in range(2):
        out = tmp_path / f"scan{i}.csv"
        assert cli.main(argv + ["--out", str(out)]) == 0
        texts.append(out.read_bytes())
    elapsed = (time.perf_counter() - t0) / 2
    assert texts[0] == texts[1]
    assert elapsed < 60
    # z = 3 sits on the boundary between rows 31 and 32, column 9
    rows = [ln.split(",") for ln in texts[0].decode().splitlines()[1:]]
    hit = [r for r in rows if r[1] == "9" and r[0] in ("31", "32")]
    assert len(hit) == 2 and all(r[4] == "Yes" for r in hit)
