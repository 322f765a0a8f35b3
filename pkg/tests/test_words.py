import pytest

from qtreekit.words import Word, commutator, enumerate_ball, random_word


def test_reduction():
    assert Word((1, -1)).letters == ()
    assert Word((1, 2, -2, -1, 1)).letters == (1,)
    assert len(Word((1, 2, 1))) == 3


def test_identity_and_mul():
    e = Word.identity()
    g = Word.from_str("ab")
    assert e * g == g
    assert g * g.inverse() == e
    assert (g * g).letters == (1, 2, 1, 2)


def test_from_str_roundtrip():
    for text in ("e", "a", "ab", "aBa", "abAB"):
        w = Word.from_str(text)
        assert str(w) == text or (text == "e" and w.is_identity())
    with pytest.raises(ValueError):
        Word.from_str("a!b")


def test_power():
    g = Word.from_str("ab")
    assert g.power(3).letters == (1, 2) * 3
    assert g.power(-2) == (g.inverse() * g.inverse())
    assert g.power(0).is_identity()
    # conjugates collapse under powers: |(aba^-1)^n| = n + 2
    c = Word.from_str("abA")
    assert len(c.power(4)) == 6
    assert len(c.power(3)) == 5


def test_exponent_sum():
    w = Word.from_str("abAab")
    assert w.exponent_sum(1) == 1
    assert w.exponent_sum(2) == 2


def test_commutator():
    a, b = Word.from_str("a"), Word.from_str("b")
    assert commutator(a, b).letters == (1, 2, -1, -2)
    assert commutator(a, a).is_identity()


def test_ball_sizes():
    # free group ball sizes: 1 + 2k * ((2k-1)^r - 1) / (2k - 2)
    assert len(enumerate_ball(2, 0)) == 1
    assert len(enumerate_ball(2, 1)) == 5
    assert len(enumerate_ball(2, 2)) == 17
    assert len(enumerate_ball(2, 3)) == 53
    ball = enumerate_ball(2, 3)
    assert len(set(ball)) == len(ball)
    assert all(len(w) <= 3 for w in ball)
    # BFS order: lengths non-decreasing
    lengths = [len(w) for w in ball]
    assert lengths == sorted(lengths)


def test_random_word_reduced(rng):
    for _ in range(50):
        w = random_word(rng, 2, 6)
        assert len(w) == 6
