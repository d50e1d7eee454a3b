"""Farey-triangulation combinatorics relative to the base edge [a, b].

Slopes ``p/q`` index the unoriented primitive classes of F(a, b).  Functions
on slopes (level, Fibonacci, Christoffel, palindrome) are built by the usual
inductive scheme: a vertex ``z`` born on a co-directed edge ``[x, y]`` gets
``f(z) = op(f(x), f(y))``.  On the right-hand side of [a, b] (negative
slopes) the seed for ``a`` is ``a^-1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd

from .freegroup import Word, is_palindrome


class Slope:
    """A point ``p/q`` of P^1(Q) with ``q >= 0`` and ``gcd(|p|, q) = 1``.

    Infinity may be written ``1/0`` or ``-1/0``; the two compare equal, but
    the sign is kept because it selects ``a`` or ``a^-1`` as Christoffel
    word.
    """

    __slots__ = ("p", "q")

    def __init__(self, p, q=1):
        p, q = int(p), int(q)
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a slope")
        if q < 0:
            p, q = -p, -q
        g = gcd(abs(p), q)
        p, q = p // g, q // g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def __setattr__(self, name, value):
        raise AttributeError("Slope is immutable")

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if "/" in text:
            p, q = text.split("/")
            return cls(int(p), int(q))
        return cls(int(text), 1)

    @property
    def is_infinity(self):
        return self.q == 0

    @property
    def side(self):
        """+1 on the left of [a, b] (positive slopes), -1 on the right, 0 for 0/1."""
        return (self.p > 0) - (self.p < 0)

    def vector(self):
        return (self.p, self.q)

    def _key(self):
        return (1, 0) if self.q == 0 else (self.p, self.q)

    def __eq__(self, other):
        if not isinstance(other, Slope):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        return f"{self.p}/{self.q}"

    def __repr__(self):
        return f"Slope({self.p}, {self.q})"

    def __float__(self):
        return float("inf") if self.q == 0 else self.p / self.q


INFINITY = Slope(1, 0)
ZERO = Slope(0, 1)


def _det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _slope_of(vec):
    p, q = vec
    if q < 0:
        p, q = -p, -q
    return Slope(p, q)


class Color(enum.Enum):
    """Reduction mod 2: black = 1/0, white = 0/1, gray = 1/1."""

    BLACK = (1, 0)
    WHITE = (0, 1)
    GRAY = (1, 1)

    def __str__(self):
        return f"{self.value[0]}/{self.value[1]}"


def tricolor(s):
    return Color((s.p % 2, s.q % 2))


def edge_color(x, y):
    """Color of a Farey edge: the color absent from its endpoints."""
    (missing,) = set(Color) - {tricolor(x), tricolor(y)}
    return missing


@dataclass(frozen=True)
class FareyEdge:
    """Directed Farey edge ``[frm, to]``.

    Endpoints are kept as integer vectors (``frm_vec``, ``to_vec``) so that
    the mediant ``frm + to`` lands on the far side of the edge as seen from
    [a, b].  For edges co-directed with [a, b] the first endpoint is the one
    nearer ``a``.
    """

    frm_vec: tuple
    to_vec: tuple

    def __post_init__(self):
        if abs(_det(self.frm_vec, self.to_vec)) != 1:
            raise ValueError(f"{self.frm_vec}, {self.to_vec} are not Farey neighbours")

    @classmethod
    def of(cls, x, y):
        return cls(x.vector(), y.vector())

    @property
    def frm(self):
        return _slope_of(self.frm_vec)

    @property
    def to(self):
        return _slope_of(self.to_vec)

    @property
    def codirected(self):
        """Whether the edge runs in the direction induced by [a, b].

        Left of [a, b] that means ``det = +1`` with nonnegative vectors, on
        the right it means ``det = -1`` with ``p <= 0``.
        """
        (p1, q1), (p2, q2) = self.frm_vec, self.to_vec
        d = _det(self.frm_vec, self.to_vec)
        if min(q1, q2) < 0:
            return False
        if p1 >= 0 and p2 >= 0:
            return d == 1
        if p1 <= 0 and p2 <= 0:
            return d == -1
        return False

    @property
    def level(self):
        return max(level(self.frm), level(self.to))

    @property
    def color(self):
        return edge_color(self.frm, self.to)

    def contains(self, s):
        """Whether ``s`` lies in the open arc beyond the edge (the side of the mediant)."""
        v = s.vector()
        x, y = self.frm_vec, self.to_vec
        return _det(v, y) * _det(x, v) > 0

    def __str__(self):
        return f"[{self.frm}, {self.to}]"


BASE_EDGE = FareyEdge((1, 0), (0, 1))
BASE_EDGE_RIGHT = FareyEdge((-1, 0), (0, 1))


def children(e):
    """``(w, z)`` for the quadrilateral ``[w; x, y; z]`` of ``e = [x, y]``.

    ``z`` is the mediant on the far side, ``w`` the opposite vertex.
    """
    x, y = e.frm_vec, e.to_vec
    z = (x[0] + y[0], x[1] + y[1])
    w = (x[0] - y[0], x[1] - y[1])
    return _slope_of(w), _slope_of(z)


def continued_fraction(p, q):
    """Partial quotients of ``p/q`` for ``p >= 0, q > 0``."""
    if p < 0 or q <= 0:
        raise ValueError("continued_fraction expects 0 <= p, q > 0")
    out = []
    while q:
        n, r = divmod(p, q)
        out.append(n)
        p, q = q, r
    return out


def level(s):
    """e-level: length of the shortest gallery joining ``s`` to [a, b].

    Equal to the Stern-Brocot depth of ``|p|/q``, i.e. the sum of partial
    quotients of its continued fraction.
    """
    if s.q == 0 or s.p == 0:
        return 0
    return sum(continued_fraction(abs(s.p), s.q))


def _descend(s, seed_a, seed_b, op):
    """Evaluate an inductively defined function at ``s`` along its descent path.

    ``op(fx, fy, x, y)`` receives the values and the (signed) slope vectors
    of the co-directed parent edge.
    """
    if s.q == 0:
        return seed_a
    if s.p == 0:
        return seed_b
    sign = 1 if s.p > 0 else -1
    target = (abs(s.p), s.q)
    x, y = (1, 0), (0, 1)
    fx, fy = seed_a, seed_b
    while True:
        z = (x[0] + y[0], x[1] + y[1])
        fz = op(fx, fy, (sign * x[0], x[1]), (sign * y[0], y[1]))
        if z == target:
            return fz
        if _det(target, z) > 0:  # target lies between x and z
            y, fy = z, fz
        else:
            x, fx = z, fz


def fibonacci(s):
    return _descend(s, 1, 1, lambda u, v, x, y: u + v)


_A = Word("a")
_AINV = Word("A")
_B = Word("b")


def _christoffel_seed(s, side):
    if side is None:
        side = -1 if s.p < 0 else 1
    return _A if side > 0 else _AINV


def christoffel(s, side=None):
    """The e-Christoffel word of ``s``.

    ``side`` (+1/-1) only matters for infinity, where it picks ``a`` or
    ``a^-1``; by default it is read off the sign of ``s.p``.
    """
    seed = _christoffel_seed(s, side)
    if s.q == 0:
        return seed
    return _descend(s, seed, _B, lambda u, v, x, y: u * v)


def _pal_op(u, v, x, y):
    if edge_color(_slope_of(x), _slope_of(y)) is Color.GRAY:
        return v * u
    return u * v


def palindrome_rep(s, side=None):
    """The e-palindrome function: a representative of ``s`` that is palindromic
    unless ``s`` is gray (then it is a product of two palindromes)."""
    seed = _christoffel_seed(s, side)
    if s.q == 0:
        return seed
    return _descend(s, seed, _B, _pal_op)


# Bases of the basic triple (a, b, c) with abc = 1, i.e. c = b^-1 a^-1.
C_WORD = Word("BA")
BASES = {
    "ab": (Word("a"), Word("b")),
    "bc": (Word("b"), C_WORD),
    "ca": (C_WORD, Word("a")),
}


def slope_in_basis(s, basis):
    """Coordinates of the class ``s`` relative to one of the bases in ``BASES``."""
    p, q = s.p, s.q
    if basis == "ab":
        vec = (p, q)
    elif basis == "bc":
        # p*a + q*b = m*b + n*c with c = -(a + b)
        vec = (q - p, -p)
    elif basis == "ca":
        vec = (-q, p - q)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return _slope_of(vec)


def palindrome_in_basis(s, basis):
    """Run the palindrome function relative to ``basis``.

    Returns ``(local, word)``: ``local`` is written in the basis letters
    (``a`` for the first element, ``b`` for the second) and ``word`` is its
    expansion in (a, b).
    """
    t = slope_in_basis(s, basis)
    local = palindrome_rep(t)
    return local, local.substitute(BASES[basis])


def tilde_palindromes(s):
    """All representatives of ``s`` palindromic in one of (a,b), (b,c), (c,a).

    Maps basis name to the (a, b)-word for the bases where the palindrome
    function returns a palindrome.
    """
    out = {}
    for basis in BASES:
        local, word = palindrome_in_basis(s, basis)
        if is_palindrome(local):
            out[basis] = word
    return out


def christoffel_from_cf(cf):
    """Christoffel basis and word of ``[n0; n1, ..., nk]`` by concatenation.

    Applies ``L(x, y) = (x, xy)`` ``n0`` times, then ``R(x, y) = (xy, y)``
    ``n1`` times, alternating, with the last exponent reduced by one.  The
    word is the product of the final pair.  ``[0]`` gives ``b``.
    """
    cf = list(cf)
    if not cf:
        raise ValueError("empty continued fraction")
    if any(not isinstance(n, int) for n in cf):
        raise ValueError("partial quotients must be integers")
    if cf[0] < 0 or any(n < 1 for n in cf[1:]):
        raise ValueError(f"malformed continued fraction {cf}")
    x, y = _A, _B
    if cf == [0]:
        return (x, y), y
    exps = cf[:-1] + [cf[-1] - 1]
    for i, n in enumerate(exps):
        for _ in range(n):
            if i % 2 == 0:
                x, y = x, x * y
            else:
                x, y = x * y, y
    return (x, y), x * y


def cf_value(cf):
    """``p/q`` of a continued fraction, as a Slope."""
    p, q = 1, 0
    for n in reversed(cf):
        p, q = n * p + q, p
    return Slope(p, q)


# -- enumeration --------------------------------------------------------------


def codirected_edges(max_level, side=None):
    """Co-directed edges of level 1..max_level, in the cyclic order of Fig-style
    partitions: left side first (decreasing slope), then the right side from
    0 toward infinity.

    Yields ``(edge, level)``.
    """
    sides = (1, -1) if side is None else (side,)
    for sd in sides:
        per_level = {k: [] for k in range(1, max_level + 1)}

        def rec(x, y, k):
            if k > max_level:
                return
            z = (x[0] + y[0], x[1] + y[1])
            # the two edges born with z have level k
            left, right = FareyEdge(x, z), FareyEdge(z, y)
            per_level[k].extend([left, right])
            rec(x, z, k + 1)
            rec(z, y, k + 1)

        # recursion order gives each level's edges sorted from the a-end
        rec((sd, 0), (0, 1), 1)
        for k in range(1, max_level + 1):
            edges = per_level[k]
            if sd < 0:
                edges = edges[::-1]
            for e in edges:
                yield e, k


def cyclic_key(s):
    """Sort key walking P^1(R) from infinity through decreasing values."""
    if s.q == 0:
        return (0, 0.0)
    return (1, -s.p / s.q)


def slopes_up_to(max_level):
    """All slopes of level <= max_level in cyclic order starting at 1/0."""
    out = {INFINITY, ZERO}

    def rec(x, y, k):
        if k > max_level:
            return
        z = (x[0] + y[0], x[1] + y[1])
        out.add(_slope_of(z))
        rec(x, z, k + 1)
        rec(z, y, k + 1)

    rec((1, 0), (0, 1), 1)
    rec((-1, 0), (0, 1), 1)
    return sorted(out, key=cyclic_key)


def unfold(seed_a, seed_b, op, max_level, side=1):
    """Tabulate an inductive function on one side up to ``max_level``.

    Returns a dict Slope -> value (the seeds included; the infinity key holds
    the seed used on this side).
    """
    table = {_slope_of((side, 0)): seed_a, ZERO: seed_b}

    def rec(x, y, fx, fy, k):
        if k > max_level:
            return
        z = (x[0] + y[0], x[1] + y[1])
        fz = op(fx, fy, x, y)
        table[_slope_of(z)] = fz
        rec(x, z, fx, fz, k + 1)
        rec(z, y, fz, fy, k + 1)

    rec((side, 0), (0, 1), seed_a, seed_b, 1)
    return table


# -- level-n partition --------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Level-n partition: the kept slopes of level <= n and 2^(n+1) intervals.

    Interval ``j`` (0-based) is the set of slopes beyond the bounding edge
    ``intervals[j]``; indices run cyclically from infinity through the
    positive slopes, then from 0 through the negative ones.
    """

    n: int
    kept: tuple
    intervals: tuple

    def locate(self, s):
        """Index of the interval containing ``s``, or ``None`` if ``s`` is kept."""
        if s in self.kept:
            return None
        for j, e in enumerate(self.intervals):
            if e.contains(s):
                return j
        raise AssertionError(f"{s} not covered by the level-{self.n} partition")


def level_partition(n):
    if n < 0:
        raise ValueError("level must be nonnegative")
    if n == 0:
        intervals = (BASE_EDGE, BASE_EDGE_RIGHT)
    else:
        intervals = tuple(e for e, k in codirected_edges(n) if k == n)
    return Partition(n, tuple(slopes_up_to(n)), intervals)


def word_table(max_level):
    """Rows ``(slope, level, color, christoffel, palindrome, fibonacci)``."""
    rows = []
    for s in slopes_up_to(max_level):
        rows.append(
            (str(s), level(s), str(tricolor(s)), str(christoffel(s)), str(palindrome_rep(s)), fibonacci(s))
        )
    return rows


WORD_TABLE_HEADER = ("slope", "level", "color", "christoffel", "palindrome", "fibonacci")

__all__ = [
    "BASES",
    "BASE_EDGE",
    "Color",
    "FareyEdge",
    "INFINITY",
    "Partition",
    "Slope",
    "ZERO",
    "children",
    "christoffel",
    "christoffel_from_cf",
    "codirected_edges",
    "continued_fraction",
    "edge_color",
    "fibonacci",
    "level",
    "level_partition",
    "palindrome_in_basis",
    "palindrome_rep",
    "slope_in_basis",
    "slopes_up_to",
    "tilde_palindromes",
    "tricolor",
    "word_table",
]
