"""Degree-two rewriting systems presenting the quotient monoid.

A system is an ``n x n`` table of action codes indexed by pairs of adjacent
letters, plus a dictionary of custom replacements.  Normal forms are computed
by a single left-to-right scan that backs up one position after every
substitution, which is enough because replacements never exceed two letters.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .algebra import Alphabet, Polynomial, SignedWord, Word


class RuleCode(IntEnum):
    SET_ZERO = 0
    PRESERVE = 1
    REMOVE_BOTH = 2
    SWAP = 3
    KEEP_FIRST = 4
    CUSTOM = 5


class RewriteError(ValueError):
    pass


def _classify(i: int, j: int, rhs: Optional[Word]) -> RuleCode:
    if rhs is None:
        return RuleCode.SET_ZERO
    rhs = tuple(rhs)
    if rhs == (i, j):
        return RuleCode.PRESERVE
    if rhs == ():
        return RuleCode.REMOVE_BOTH
    if rhs == (j, i):
        return RuleCode.SWAP
    if rhs == (i,):
        return RuleCode.KEEP_FIRST
    return RuleCode.CUSTOM


class RewriteSystem:
    """Quotient of the free monoid by degree-two rules.

    Parameters
    ----------
    alphabet : Alphabet
    rules : mapping (i, j) -> replacement
        Replacement is a word of length at most two, or ``None`` for the zero
        element.  Pairs not listed are irreducible.
    """

    def __init__(self, alphabet: Alphabet, rules: Mapping[Tuple[int, int], Optional[Word]] = None):
        self.alphabet = alphabet
        n = len(alphabet)
        self.n = n
        code = [[int(RuleCode.PRESERVE)] * (n + 1) for _ in range(n + 1)]
        custom: Dict[Tuple[int, int], Word] = {}
        for (i, j), rhs in (rules or {}).items():
            if not (1 <= i <= n and 1 <= j <= n):
                raise RewriteError(f"rule on letters ({i}, {j}) outside the alphabet")
            if rhs is not None:
                rhs = tuple(rhs)
                if len(rhs) > 2:
                    raise RewriteError("replacement longer than two letters")
                if any(not 1 <= k <= n for k in rhs):
                    raise RewriteError("replacement uses a letter outside the alphabet")
            c = _classify(i, j, rhs)
            code[i][j] = int(c)
            if c == RuleCode.CUSTOM:
                custom[(i, j)] = rhs
        self._code = code
        self.custom_rules: Dict[Tuple[int, int], Word] = custom
        self._cache: Dict[Word, Optional[Word]] = {}
        for (i, j), rhs in self.rules():
            if rhs is not None and len(rhs) == 2 and code[rhs[0]][rhs[1]] != RuleCode.PRESERVE:
                raise RewriteError(
                    f"replacement {alphabet.format_word(rhs)} of "
                    f"{alphabet.format_word((i, j))} is not in normal form")

    @classmethod
    def free(cls, alphabet: Alphabet) -> "RewriteSystem":
        return cls(alphabet, {})

    def code(self, i: int, j: int) -> RuleCode:
        return RuleCode(self._code[i][j])

    @property
    def rule_code(self) -> List[List[int]]:
        """The table as nested lists, row/column 0 unused."""
        return [row[:] for row in self._code]

    def rules(self) -> Iterator[Tuple[Tuple[int, int], Optional[Word]]]:
        """All non-trivial rules ``(i, j) -> rhs`` expanded from the table."""
        for i in range(1, self.n + 1):
            row = self._code[i]
            for j in range(1, self.n + 1):
                c = row[j]
                if c == RuleCode.PRESERVE:
                    continue
                yield (i, j), self._replacement(i, j, c)

    def _replacement(self, i: int, j: int, c: int) -> Optional[Word]:
        if c == RuleCode.SET_ZERO:
            return None
        if c == RuleCode.REMOVE_BOTH:
            return ()
        if c == RuleCode.SWAP:
            return (j, i)
        if c == RuleCode.KEEP_FIRST:
            return (i,)
        if c == RuleCode.PRESERVE:
            return (i, j)
        return self.custom_rules[(i, j)]

    def __len__(self) -> int:
        return sum(1 for _ in self.rules())

    def reduce(self, w: Word) -> Optional[Word]:
        """Normal form of an unsigned word; ``None`` stands for zero."""
        try:
            return self._cache[w]
        except KeyError:
            pass
        out = self._reduce(w)
        if len(self._cache) > 1 << 20:
            self._cache.clear()
        self._cache[w] = out
        return out

    def _reduce(self, w: Word) -> Optional[Word]:
        code = self._code
        m = list(w)
        i = 0
        budget = 4 * (len(m) + 2) ** 2
        while i < len(m) - 1:
            c = code[m[i]][m[i + 1]]
            if c == 1:
                i += 1
                continue
            if c == 0:
                return None
            if c == 2:
                del m[i:i + 2]
            elif c == 3:
                m[i], m[i + 1] = m[i + 1], m[i]
            elif c == 4:
                del m[i + 1]
            else:
                m[i:i + 2] = self.custom_rules[(m[i], m[i + 1])]
            if i > 0:
                i -= 1
            budget -= 1
            if budget < 0:
                raise RewriteError(
                    f"rewriting of {self.alphabet.format_word(w)} does not terminate")
        return tuple(m)

    def normal_form(self, w: SignedWord) -> SignedWord:
        if w.is_zero:
            return w
        nf = self.reduce(w.letters)
        if nf is None:
            return SignedWord.zero()
        return SignedWord(w.sign, nf)

    def is_reduced(self, w: Word) -> bool:
        code = self._code
        return all(code[a][b] == RuleCode.PRESERVE for a, b in zip(w, w[1:]))

    def polynomial(self, terms: Iterable[Tuple[object, object]]) -> Polynomial:
        """Build a polynomial from ``(word, coefficient)`` pairs.

        Words may be tuples or :class:`SignedWord`; they are reduced, signs are
        folded into coefficients and zero words dropped.
        """
        out = []
        for w, c in terms:
            c = Fraction(c)
            if isinstance(w, SignedWord):
                if w.is_zero:
                    continue
                c *= w.sign
                w = w.letters
            nf = self.reduce(tuple(w))
            if nf is not None:
                out.append((nf, c))
        return Polynomial(tuple(out))

    def random_reduce(self, w: Word, rng: random.Random) -> Optional[Word]:
        """Reduce by applying rules at randomly chosen positions."""
        code = self._code
        m = list(w)
        budget = 4 * (len(m) + 2) ** 2
        while True:
            spots = [k for k in range(len(m) - 1) if code[m[k]][m[k + 1]] != RuleCode.PRESERVE]
            if not spots:
                return tuple(m)
            k = rng.choice(spots)
            c = code[m[k]][m[k + 1]]
            rhs = self._replacement(m[k], m[k + 1], c)
            if rhs is None:
                return None
            m[k:k + 2] = rhs
            budget -= 1
            if budget < 0:
                raise RewriteError("random rewriting does not terminate")

    def rightmost_reduce(self, w: Word) -> Optional[Word]:
        code = self._code
        m = list(w)
        budget = 4 * (len(m) + 2) ** 2
        while True:
            k = next((k for k in range(len(m) - 2, -1, -1)
                      if code[m[k]][m[k + 1]] != RuleCode.PRESERVE), None)
            if k is None:
                return tuple(m)
            rhs = self._replacement(m[k], m[k + 1], code[m[k]][m[k + 1]])
            if rhs is None:
                return None
            m[k:k + 2] = rhs
            budget -= 1
            if budget < 0:
                raise RewriteError("rewriting does not terminate")


@dataclass
class ConfluenceReport:
    """Counterexamples found by :func:`check_confluence`.

    Each entry is ``(word, nf1, nf2)`` with ``None`` standing for zero.
    """

    max_len: int
    words_checked: int = 0
    counterexamples: List[Tuple[Word, Optional[Word], Optional[Word]]] = field(default_factory=list)

    def __bool__(self) -> bool:
        # truthy when something was found, like a non-empty list
        return bool(self.counterexamples)

    @property
    def confluent(self) -> bool:
        return not self.counterexamples


def check_confluence(rs: RewriteSystem, max_len: int, orders: int = 3,
                     seed: int = 0, limit: int = 20) -> ConfluenceReport:
    """Look for words whose normal form depends on the rule application order.

    Every word up to ``max_len`` letters is reduced left-to-right, right-to-left
    and in ``orders`` random orders.  This is a bounded empirical check; an
    empty report is not a proof of confluence.
    """
    if max_len < 3:
        raise ValueError("max_len must be at least 3")
    rng = random.Random(seed)
    report = ConfluenceReport(max_len)
    letters = range(1, rs.n + 1)
    for length in range(max_len + 1):
        for w in itertools.product(letters, repeat=length):
            report.words_checked += 1
            ref = rs._reduce(w)
            results = [rs.rightmost_reduce(w)]
            results += [rs.random_reduce(w, rng) for _ in range(orders)]
            for other in results:
                if other != ref:
                    report.counterexamples.append((w, ref, other))
                    break
            if len(report.counterexamples) >= limit:
                return report
    return report


def check_compatibility(pi, rs: RewriteSystem) -> bool:
    """Whether a generalized permutation preserves the congruence of ``rs``.

    Checks ``N(pi(v)) == N(pi(w))``, signs included, for every rule ``v -> w``.
    """
    def image(word: Word) -> SignedWord:
        sign = 1
        out = []
        for k in word:
            t = pi.image(k)
            if t < 0:
                sign = -sign
            out.append(abs(t))
        return rs.normal_form(SignedWord(sign, tuple(out)))

    for (i, j), rhs in rs.rules():
        lhs_img = image((i, j))
        rhs_img = SignedWord.zero() if rhs is None else image(rhs)
        if lhs_img != rhs_img:
            return False
    return True
