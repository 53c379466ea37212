"""Letters with involution, signed words and noncommutative polynomials.

Letters are numbered ``1..n``.  A word is a tuple of letter indices; the empty
tuple is the monoid identity.  Signed letters (the images of generalized
permutations) are negated indices, so every object handled by the enumeration
code is a tuple of plain Python integers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

Word = Tuple[int, ...]


@dataclass(frozen=True)
class Letter:
    """A letter descriptor: family name plus integer parameters."""

    family: str
    indices: Tuple[int, ...] = ()
    dagger: bool = False

    @property
    def name(self) -> str:
        if not self.indices:
            base = self.family
        elif len(self.indices) == 1:
            base = f"{self.family}{self.indices[0]}"
        else:
            base = self.family + "_".join(str(i) for i in self.indices)
        return base + ("'" if self.dagger else "")


class Alphabet:
    """An ordered set of letters together with the adjoint table.

    Parameters
    ----------
    letters : sequence of Letter
        Letter ``k`` (1-based) is ``letters[k - 1]``.
    adjoint : sequence of int, optional
        ``adjoint[k - 1]`` is the index of the adjoint of letter ``k``.  By
        default every letter is Hermitian.
    """

    def __init__(self, letters: Sequence[Letter], adjoint: Optional[Sequence[int]] = None):
        self.letters: Tuple[Letter, ...] = tuple(letters)
        n = len(self.letters)
        if adjoint is None:
            adjoint = range(1, n + 1)
        table = tuple(int(a) for a in adjoint)
        if len(table) != n:
            raise ValueError("adjoint table has wrong length")
        for i, a in enumerate(table, start=1):
            if not 1 <= a <= n:
                raise ValueError(f"adjoint of letter {i} out of range")
            if table[a - 1] != i:
                raise ValueError("adjoint table is not an involution")
        # index 0 is a placeholder so that lookups use the letter index directly
        self._adj = (0,) + table
        self._by_name = {letter.name: i for i, letter in enumerate(self.letters, start=1)}

    @classmethod
    def hermitian(cls, names: Iterable[str]) -> "Alphabet":
        return cls([Letter(n) for n in names])

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Alphabet) and self.letters == other.letters
                and self._adj == other._adj)

    def __hash__(self) -> int:
        return hash((self.letters, self._adj))

    def __repr__(self) -> str:
        return f"Alphabet({', '.join(self.names)})"

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(letter.name for letter in self.letters)

    @property
    def adjoint_table(self) -> Tuple[int, ...]:
        return self._adj[1:]

    def adjoint_letter(self, i: int) -> int:
        """Adjoint of a (possibly negated) letter index."""
        if i < 0:
            return -self._adj[-i]
        return self._adj[i]

    def is_hermitian(self, i: int) -> bool:
        return self._adj[i] == i

    def index(self, name: str) -> int:
        return self._by_name[name]

    def word(self, *names: str) -> Word:
        return tuple(self._by_name[n] for n in names)

    def adjoint_word(self, w: Word) -> Word:
        adj = self._adj
        return tuple(adj[i] for i in reversed(w))

    def format_word(self, w: Word, sep: str = "*") -> str:
        if not w:
            return "1"
        return sep.join(self.letters[i - 1].name for i in w)


def grlex_key(w: Word) -> Tuple[int, Word]:
    """Sort key of the graded lexicographic order on unsigned words."""
    return (len(w), w)


@dataclass(frozen=True)
class SignedWord:
    """A word preceded by a sign, or the distinguished zero.

    All zero instances compare equal, whatever their ``sign`` and ``letters``.
    """

    sign: int = 1
    letters: Word = ()
    is_zero: bool = False

    def __post_init__(self):
        if self.is_zero:
            object.__setattr__(self, "sign", 1)
            object.__setattr__(self, "letters", ())
        elif self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        else:
            object.__setattr__(self, "letters", tuple(self.letters))

    @classmethod
    def zero(cls) -> "SignedWord":
        return cls(is_zero=True)

    @classmethod
    def one(cls) -> "SignedWord":
        return cls(1, ())

    def __len__(self) -> int:
        if self.is_zero:
            raise ValueError("the zero word has length -infinity")
        return len(self.letters)

    def __neg__(self) -> "SignedWord":
        if self.is_zero:
            return self
        return SignedWord(-self.sign, self.letters)

    def __mul__(self, other: "SignedWord") -> "SignedWord":
        return concat(self, other)

    def format(self, alphabet: Alphabet) -> str:
        if self.is_zero:
            return "0"
        return ("-" if self.sign < 0 else "") + alphabet.format_word(self.letters)


def concat(v: SignedWord, w: SignedWord) -> SignedWord:
    if v.is_zero or w.is_zero:
        return SignedWord.zero()
    return SignedWord(v.sign * w.sign, v.letters + w.letters)


def adjoint(w: SignedWord, alphabet: Alphabet) -> SignedWord:
    if w.is_zero:
        return w
    return SignedWord(w.sign, alphabet.adjoint_word(w.letters))


def grlex_compare(v: SignedWord, w: SignedWord) -> int:
    """Three-way comparison in graded lexicographic order.

    Degree dominates, then letter indices left to right.  The sign is only
    used as a final tie-breaker (``+`` before ``-``) so that the order is total.
    """
    if v.is_zero or w.is_zero:
        raise ValueError("grlex_compare is undefined on the zero word")
    kv = (len(v.letters), v.letters, v.sign < 0)
    kw = (len(w.letters), w.letters, w.sign < 0)
    return (kv > kw) - (kv < kw)


def _poly_order(w: Word):
    # graded, then lexicographic on the reversed word
    return (len(w), tuple(reversed(w)))


@dataclass(frozen=True)
class Polynomial:
    """Finite sum of unsigned normal-form words with exact rational coefficients.

    Instances are normally produced by :meth:`RewriteSystem.polynomial`, which
    folds signs into the coefficients and drops zero words.  ``terms`` is kept
    sorted in graded reverse lexicographic order (degree first, then words
    compared from their last letter).
    """

    terms: Tuple[Tuple[Word, Fraction], ...] = ()
    _index: Dict[Word, Fraction] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        merged: Dict[Word, Fraction] = {}
        for w, c in self.terms:
            merged[tuple(w)] = merged.get(tuple(w), Fraction(0)) + Fraction(c)
        index = {w: c for w, c in merged.items() if c != 0}
        object.__setattr__(self, "terms", tuple(sorted(index.items(), key=lambda t: _poly_order(t[0]))))
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Word, Fraction]) -> "Polynomial":
        return cls(tuple(mapping.items()))

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((((), Fraction(c)),))

    def __iter__(self) -> Iterator[Tuple[Word, Fraction]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, w: Word) -> Fraction:
        return self._index.get(tuple(w), Fraction(0))

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(len(w) for w, _ in self.terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(self.terms + other.terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple((w, -c) for w, c in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, k) -> "Polynomial":
        k = Fraction(k)
        return Polynomial(tuple((w, k * c) for w, c in self.terms))

    def mul(self, other: "Polynomial", rewrite) -> "Polynomial":
        """Product in the quotient algebra defined by ``rewrite``."""
        out = []
        for v, a in self.terms:
            for w, b in other.terms:
                nf = rewrite.reduce(v + w)
                if nf is not None:
                    out.append((nf, a * b))
        return Polynomial(tuple(out))

    def format(self, alphabet: Alphabet) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not w:
                body = str(mag)
            elif mag == 1:
                body = alphabet.format_word(w)
            else:
                body = f"{mag}*{alphabet.format_word(w)}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s
