"""Reduced words in the free group F(a, b).

Letters are stored as small integers with involutive negation::

    a = 1, a^-1 = -1, b = 2, b^-1 = -2

and serialize as ASCII over ``a A b B`` (capital = inverse).  The identity
word is the empty string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

A, B = 1, 2
_TO_CHAR = {1: "a", -1: "A", 2: "b", -2: "B"}
_FROM_CHAR = {v: k for k, v in _TO_CHAR.items()}


def _reduce_letters(letters):
    out = []
    for x in letters:
        if x not in _TO_CHAR:
            raise ValueError(f"bad letter {x!r}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class Word:
    """A freely reduced word over {a, a^-1, b, b^-1}.

    The constructor reduces its input, so every instance is reduced.
    Words are immutable and hashable; ``*`` concatenates (with cancellation
    at the junction), ``**`` takes integer powers, ``~w`` is the inverse.
    """

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        if isinstance(letters, str):
            letters = [_FROM_CHAR[c] for c in letters]
        object.__setattr__(self, "letters", _reduce_letters(letters))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def _trusted(cls, letters):
        w = object.__new__(cls)
        object.__setattr__(w, "letters", tuple(letters))
        return w

    @classmethod
    def parse(cls, text):
        """Parse either plain ASCII (``"aabAB"``) or power notation.

        Power notation accepts parentheses and integer exponents after ``^``,
        e.g. ``"(a^2b)^2ab"`` or ``"a^2ba^-1b^-2"``.  Whitespace and ``*`` are
        ignored.
        """
        return _Parser(text).parse()

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word._trusted(self.letters[item])
        return self.letters[item]

    def __eq__(self, other):
        if isinstance(other, Word):
            return self.letters == other.letters
        if isinstance(other, str):
            return str(self) == other
        return NotImplemented

    def __hash__(self):
        return hash(self.letters)

    def __str__(self):
        return "".join(_TO_CHAR[x] for x in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"

    def __bool__(self):
        return bool(self.letters)

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        left, right = self.letters, other.letters
        k = 0
        n = min(len(left), len(right))
        while k < n and left[-1 - k] == -right[k]:
            k += 1
        return Word._trusted(left[: len(left) - k] + right[k:])

    def __invert__(self):
        return Word._trusted(tuple(-x for x in reversed(self.letters)))

    inverse = __invert__

    def __pow__(self, n):
        if n < 0:
            return (~self) ** (-n)
        result = Word()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_identity(self):
        return not self.letters

    def substitute(self, images):
        """Apply the endomorphism sending ``a -> images[0]``, ``b -> images[1]``."""
        ia, ib = images
        table = {1: ia, -1: ~ia, 2: ib, -2: ~ib}
        out = Word()
        for x in self.letters:
            out = out * table[x]
        return out

    def is_positive_in(self, alphabet):
        return all(x in alphabet for x in self.letters)


IDENTITY = Word()
a = Word._trusted((A,))
b = Word._trusted((B,))


def reduce(raw):
    """Freely reduce a sequence of letters (ints or ``aAbB`` characters)."""
    if isinstance(raw, Word):
        return raw
    return Word(raw)


def cyclic_reduce(w):
    """Return ``(core, conjugator)`` with ``w == conjugator * core * ~conjugator``.

    ``core`` is cyclically reduced, so ``len(core)`` is the translation length
    of ``w`` acting on its Cayley graph.
    """
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return Word._trusted(letters[i : j + 1]), Word._trusted(letters[:i])


def cyclic_length(w):
    return len(cyclic_reduce(w)[0])


def is_cyclically_reduced(w):
    return len(w) < 2 or w.letters[0] != -w.letters[-1]


def is_palindrome(w):
    """True iff the letter sequence of ``w`` equals its reverse."""
    return w.letters == w.letters[::-1]


def abelianize(w):
    """Exponent sums ``(p, q)`` of ``a`` and ``b``."""
    p = q = 0
    for x in w.letters:
        if x == 1:
            p += 1
        elif x == -1:
            p -= 1
        elif x == 2:
            q += 1
        else:
            q -= 1
    return p, q


def are_conjugate(u, v):
    """Conjugacy test: cyclic reductions must be cyclic rotations of each other."""
    cu, cv = cyclic_reduce(u)[0].letters, cyclic_reduce(v)[0].letters
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    doubled = cu + cu
    n = len(cv)
    return any(doubled[k : k + n] == cv for k in range(len(cu)))


def commutator(x, y):
    return x * y * ~x * ~y


def factor_positive(w, x, y):
    """Write ``w`` as a positive word in ``{x, y}``.

    Returns the factor sequence as a string over ``"xy"`` or ``None`` when no
    such factorization exists.  Both ``x`` and ``y`` must be nonempty.
    """
    if not x or not y:
        raise ValueError("factors must be nonempty")
    letters = w.letters
    xs, ys = x.letters, y.letters
    n = len(letters)

    @lru_cache(maxsize=None)
    def go(pos):
        if pos == n:
            return ""
        if letters[pos : pos + len(xs)] == xs:
            rest = go(pos + len(xs))
            if rest is not None:
                return "x" + rest
        if letters[pos : pos + len(ys)] == ys:
            rest = go(pos + len(ys))
            if rest is not None:
                return "y" + rest
        return None

    # iterative warm-up keeps the recursion shallow for long words
    for pos in range(n, -1, -1):
        go(pos)
    return go(0)


@dataclass(frozen=True)
class AxisPath:
    """A finite window ``g_{-r}, ..., g_r`` of the axis of a cyclically reduced word.

    ``elements[radius]`` is the identity and consecutive quotients
    ``g_i^-1 g_{i+1}`` are the letters of ``base`` read cyclically.
    """

    base: Word
    radius: int
    elements: tuple

    def steps(self):
        """Letters ``g_i^-1 g_{i+1}`` for ``i = -radius .. radius-1``."""
        n = len(self.base)
        r = self.radius
        return [self.base.letters[i % n] for i in range(-r, r)]

    def __getitem__(self, i):
        return self.elements[i + self.radius]


def axis_window(base, radius):
    if not base:
        raise ValueError("the identity has no axis")
    if not is_cyclically_reduced(base):
        raise ValueError(f"{base} is not cyclically reduced")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    n = len(base)
    forward = [IDENTITY]
    for i in range(radius):
        forward.append(forward[-1] * Word._trusted((base.letters[i % n],)))
    backward = []
    g = IDENTITY
    for i in range(1, radius + 1):
        g = g * Word._trusted((-base.letters[-i % n],))
        backward.append(g)
    return AxisPath(base, radius, tuple(reversed(backward)) + tuple(forward))


_TOKEN = re.compile(r"\s*(?:([aAbB])|(\()|(\))|\^\s*(-?\d+)|\*)")


class _Parser:
    def __init__(self, text):
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse word {text!r} at {pos}")
            pos = m.end()
            if m.group(1):
                self.tokens.append(("L", m.group(1)))
            elif m.group(2):
                self.tokens.append(("(", None))
            elif m.group(3):
                self.tokens.append((")", None))
            elif m.group(4) is not None:
                self.tokens.append(("^", int(m.group(4))))
        self.i = 0

    def parse(self):
        w = self._sequence()
        if self.i != len(self.tokens):
            raise ValueError("unbalanced parentheses")
        return w

    def _sequence(self):
        w = IDENTITY
        while self.i < len(self.tokens) and self.tokens[self.i][0] != ")":
            w = w * self._factor()
        return w

    def _factor(self):
        kind, val = self.tokens[self.i]
        self.i += 1
        if kind == "L":
            atom = Word(val)
        elif kind == "(":
            atom = self._sequence()
            if self.i >= len(self.tokens) or self.tokens[self.i][0] != ")":
                raise ValueError("unbalanced parentheses")
            self.i += 1
        else:
            raise ValueError("exponent without base")
        if self.i < len(self.tokens) and self.tokens[self.i][0] == "^":
            atom = atom ** self.tokens[self.i][1]
            self.i += 1
        return atom
