import pytest
from hypothesis import given
from hypothesis import strategies as st

from farey_bq.freegroup import (
    IDENTITY,
    Word,
    a,
    abelianize,
    are_conjugate,
    axis_window,
    b,
    commutator,
    cyclic_reduce,
    factor_positive,
    is_cyclically_reduced,
    is_palindrome,
    reduce,
)

from oracles import naive_inverse, naive_reduce

raw_words = st.text(alphabet="aAbB", max_size=30)


def test_reduce_examples():
    assert reduce("aAb") == "b"
    assert reduce("") == IDENTITY
    assert reduce([1, 2, -2, 1]) == "aa"
    assert str(Word()) == ""


def test_bad_letter():
    with pytest.raises((KeyError, ValueError)):
        Word("abc")
    with pytest.raises(ValueError):
        Word([3])


@given(raw_words)
def test_reduce_matches_naive(s):
    w = Word(s)
    assert str(w) == naive_reduce(s)
    assert len(w) <= len(s)
    assert reduce(w) == w


@given(raw_words, raw_words)
def test_product_and_inverse(s, t):
    u, v = Word(s), Word(t)
    assert str(u * v) == naive_reduce(s + t)
    assert str(~u) == naive_reduce(naive_inverse(s))
    assert (u * ~u).is_identity()


@given(raw_words, raw_words)
def test_abelianize_homomorphism(s, t):
    u, v = Word(s), Word(t)
    pu, pv = abelianize(u), abelianize(v)
    assert abelianize(u * v) == (pu[0] + pv[0], pu[1] + pv[1])


def test_abelianize_examples():
    assert abelianize(a) == (1, 0)
    assert abelianize(Word("abAB")) == (0, 0)
    assert abelianize(Word.parse("a^2b(ab)^2")) == (4, 3)


def test_cyclic_reduce_examples():
    assert cyclic_reduce(Word("abA")) == (Word("b"), Word("a"))
    w = Word.parse("a^2b((a^2b)^2ab)^3")
    assert cyclic_reduce(w) == (w, IDENTITY)
    assert cyclic_reduce(IDENTITY) == (IDENTITY, IDENTITY)


@given(raw_words)
def test_cyclic_reduce_identity(s):
    w = Word(s)
    core, g = cyclic_reduce(w)
    assert g * core * ~g == w
    assert is_cyclically_reduced(core)
    assert len(core) <= len(w)


def test_palindromes():
    assert is_palindrome(Word("aba"))
    assert not is_palindrome(Word("ab"))
    assert is_palindrome(IDENTITY)


def test_parse_power_notation():
    assert Word.parse("(a^2b)^2ab") == "aabaabab"
    assert Word.parse("a^-1b^-2") == "ABB"
    assert Word.parse("aabAB") == "aabAB"
    assert Word.parse("(ab)^0") == ""
    for bad in ("(ab", "ab)", "^2"):
        with pytest.raises(ValueError):
            Word.parse(bad)


def test_powers_and_hash():
    w = Word("ab")
    assert w**3 == "ababab"
    assert w**-2 == "BABA"
    assert len({Word("ab"), Word("abBb"), Word("ba")}) == 2


def test_conjugacy():
    assert are_conjugate(Word("ab"), Word("ba"))
    assert are_conjugate(Word("aab"), Word("Baabb"))
    assert not are_conjugate(Word("ab"), Word("aB"))
    g = Word("bba")
    assert are_conjugate(commutator(a, b), g * commutator(a, b) * ~g)
    assert not are_conjugate(commutator(a, b), commutator(b, a))


def test_factor_positive():
    x, y = Word("aab"), Word("ab")
    assert factor_positive(Word.parse("(a^2b)^2ab"), x, y) == "xxy"
    assert factor_positive(Word("ba"), x, y) is None
    with pytest.raises(ValueError):
        factor_positive(Word("a"), IDENTITY, a)


def test_axis_window():
    p = axis_window(Word("ab"), 2)
    assert [str(g) for g in p.elements] == ["BA", "B", "", "a", "ab"]
    assert p[0] == IDENTITY
    p = axis_window(a, 3)
    assert len(p.elements) == 7 and p[-3] == "AAA" and p[3] == "aaa"
    p = axis_window(Word("aab"), 3)
    assert [str(p[i]) for i in range(4)] == ["", "a", "aa", "aab"]


@given(st.text(alphabet="aAbB", min_size=1, max_size=12), st.integers(0, 20))
def test_axis_window_quotients(s, r):
    w = cyclic_reduce(Word(s))[0]
    if not w:
        return
    p = axis_window(w, r)
    assert len(p.elements) == 2 * r + 1
    steps = p.steps()
    for i in range(-r, r):
        q = ~p[i] * p[i + 1]
        assert len(q) == 1 and q[0] == steps[i + r]
    # discrete geodesic: word distance equals index distance
    assert len(~p[-r] * p[r]) == 2 * r


def test_axis_window_errors():
    with pytest.raises(ValueError):
        axis_window(IDENTITY, 1)
    with pytest.raises(ValueError):
        axis_window(Word("abA"), 1)
    with pytest.raises(ValueError):
        axis_window(a, -1)


def test_substitute():
    w = Word("abAB")
    assert w.substitute((Word("b"), Word("a"))) == "baBA"
    assert Word("aB").substitute((Word("ab"), Word("b"))) == "a"
