"""Reduced words over a symmetric generator alphabet.

A word is a tuple of nonzero integers: letter ``i`` (1-based) is the i-th
generator, ``-i`` its inverse.  Words are always stored reduced, so word
length is the word metric in the free group on the alphabet.
"""
from __future__ import annotations

_ALPHA = "abcdefghijklmnopqrstuvwxyz"


def reduce_letters(letters) -> tuple:
    out = []
    for s in letters:
        if s == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


class Word:
    """A reduced word; the empty word is the group identity."""

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        self.letters = reduce_letters(letters)

    @classmethod
    def identity(cls) -> "Word":
        return cls()

    @classmethod
    def from_str(cls, text: str) -> "Word":
        """Parse "abA" style words: a..z are generators 1..26, A..Z their inverses."""
        text = text.strip()
        if text in ("", "e", "1"):
            return cls()
        letters = []
        for ch in text:
            if ch in _ALPHA:
                letters.append(_ALPHA.index(ch) + 1)
            elif ch.lower() in _ALPHA:
                letters.append(-(_ALPHA.index(ch.lower()) + 1))
            else:
                raise ValueError(f"bad word character {ch!r}")
        return cls(letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        out = []
        for s in self.letters:
            ch = _ALPHA[abs(s) - 1]
            out.append(ch if s > 0 else ch.upper())
        return "".join(out)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-s for s in reversed(self.letters)))

    def power(self, n: int) -> "Word":
        if n == 0:
            return Word()
        base = self if n > 0 else self.inverse()
        out = Word()
        for _ in range(abs(n)):
            out = out * base
        return out

    def exponent_sum(self, gen: int) -> int:
        """Net signed count of generator ``gen`` (1-based)."""
        return sum(1 if s == gen else -1 if s == -gen else 0 for s in self.letters)

    def is_identity(self) -> bool:
        return not self.letters


def commutator(g: Word, h: Word) -> Word:
    return g * h * g.inverse() * h.inverse()


def letter_order(alphabet_size: int):
    """Deterministic letter enumeration: 1, -1, 2, -2, ..."""
    out = []
    for i in range(1, alphabet_size + 1):
        out.extend((i, -i))
    return out


def enumerate_ball(alphabet_size: int, radius: int) -> list:
    """All reduced words of length <= radius, BFS order (by length, then lexicographic)."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    letters = letter_order(alphabet_size)
    words = [Word()]
    layer = [()]
    for _ in range(radius):
        nxt = []
        for w in layer:
            for s in letters:
                if w and w[-1] == -s:
                    continue
                nxt.append(w + (s,))
        for t in nxt:
            wd = Word.__new__(Word)
            wd.letters = t
            words.append(wd)
        layer = nxt
    return words


def enumerate_sphere(alphabet_size: int, radius: int) -> list:
    return [w for w in enumerate_ball(alphabet_size, radius) if len(w) == radius]


def random_word(rng, alphabet_size: int, length: int) -> Word:
    """Uniform-ish random reduced word of exactly the given length."""
    letters = letter_order(alphabet_size)
    out = []
    for _ in range(length):
        choices = [s for s in letters if not out or out[-1] != -s]
        out.append(rng.choice(choices))
    return Word(out)
