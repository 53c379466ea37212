"""Moment identifications and canonical representatives of monomials.

Two monomials share a moment when one is reached from the other by the
adjoint (real moments), a symmetry, a partial transposition or a cyclic shift.
The canonical representative is the graded-lexicographic minimum of that
class, carrying its sign; a class containing both ``m`` and ``-m`` has
vanishing moment and is represented by zero.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Tuple

from .algebra import Alphabet, SignedWord, Word
from .rewrite import RewriteSystem

DEFAULT_CLOSURE_CAP = 10 ** 6


class ClosureError(RuntimeError):
    pass


@dataclass(frozen=True)
class EvaluationRules:
    """Equivalences imposed by the linear functional.

    Predicates are given as the set of letter indices for which they hold.
    """

    real_adjoint: bool = True
    transpose_predicates: Tuple[FrozenSet[int], ...] = ()
    cyclic_predicates: Tuple[FrozenSet[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "transpose_predicates",
                           tuple(frozenset(p) for p in self.transpose_predicates))
        object.__setattr__(self, "cyclic_predicates",
                           tuple(frozenset(p) for p in self.cyclic_predicates))


def _transpose(w: Word, pred: FrozenSet[int], alphabet: Alphabet) -> Word:
    pos = [k for k, a in enumerate(w) if a in pred]
    if not pos:
        return w
    out = list(w)
    for k, src in zip(pos, reversed(pos)):
        out[k] = alphabet.adjoint_letter(w[src])
    return tuple(out)


def _cycle(w: Word, pred: FrozenSet[int]) -> Word:
    pos = [k for k, a in enumerate(w) if a in pred]
    if len(pos) < 2:
        return w
    out = list(w)
    for k, src in zip(pos, pos[1:] + pos[:1]):
        out[k] = w[src]
    return tuple(out)


def apply_transpose(w: SignedWord, pred: Iterable[int], alphabet: Alphabet) -> SignedWord:
    """Reverse and adjoint, in place, the letters satisfying the predicate."""
    if w.is_zero:
        raise ValueError("apply_transpose is undefined on zero")
    return SignedWord(w.sign, _transpose(w.letters, frozenset(pred), alphabet))


def apply_cyclic(w: SignedWord, pred: Iterable[int]) -> SignedWord:
    """Shift the letters satisfying the predicate by one place, in place."""
    if w.is_zero:
        raise ValueError("apply_cyclic is undefined on zero")
    return SignedWord(w.sign, _cycle(w.letters, frozenset(pred)))


class Canonicalizer:
    """Computes canonical representatives under a group and evaluation rules.

    Results are cached per unsigned word, so one instance should be reused
    for all cells of a moment matrix.
    """

    def __init__(self, group, evaluation: EvaluationRules, rewrite: RewriteSystem,
                 cap: int = DEFAULT_CLOSURE_CAP):
        self.group = group
        self.evaluation = evaluation
        self.rewrite = rewrite
        self.alphabet = rewrite.alphabet
        self.cap = cap
        moves = [g for g in (group.generators or group.elements) if not g.is_identity()]
        self._perms = tuple(moves)
        self._cache: Dict[Word, SignedWord] = {}
        self.closure_sizes: Dict[int, int] = {}

    def canonical(self, w: SignedWord) -> SignedWord:
        if w.is_zero:
            return w
        nf = self.rewrite.reduce(w.letters)
        if nf is None:
            return SignedWord.zero()
        c = self.canonical_word(nf)
        return c if w.sign > 0 else -c

    def canonical_word(self, w: Word) -> SignedWord:
        """Canonical form of ``+w`` for a word ``w`` in normal form."""
        try:
            return self._cache[w]
        except KeyError:
            pass
        res, members = self._close(w)
        if res.is_zero:
            self._cache[w] = res
        else:
            for v, s in members.items():
                self._cache[v] = res if s == 1 else -res
        return res

    def _close(self, start: Word):
        reduce = self.rewrite.reduce
        alphabet = self.alphabet
        ev = self.evaluation
        seen: Dict[Word, int] = {start: 1}
        queue = deque([(1, start)])
        zero = SignedWord.zero()
        while queue:
            sign, w = queue.popleft()
            nexts = []
            if ev.real_adjoint:
                nexts.append((sign, alphabet.adjoint_word(w)))
            for g in self._perms:
                s, img = g.apply(w)
                nexts.append((sign * s, img))
            for pred in ev.transpose_predicates:
                nexts.append((sign, _transpose(w, pred, alphabet)))
            for pred in ev.cyclic_predicates:
                nexts.append((sign, _cycle(w, pred)))
            for s, v in nexts:
                v = reduce(v)
                if v is None:
                    return zero, {}
                prev = seen.get(v)
                if prev is None:
                    seen[v] = s
                    if len(seen) > self.cap:
                        raise ClosureError(f"closure of a monomial exceeds {self.cap} words")
                    queue.append((s, v))
                elif prev != s:
                    return zero, {}
        self.closure_sizes[len(seen)] = self.closure_sizes.get(len(seen), 0) + 1
        best = min(seen, key=lambda v: (len(v), v))
        # +start ~ seen[v] * v, so canonical(+v) = seen[v] * canonical(+start)
        return SignedWord(seen[best], best), seen


def canonical(w: SignedWord, group, evaluation: EvaluationRules, rewrite: RewriteSystem,
              cap: int = DEFAULT_CLOSURE_CAP) -> SignedWord:
    """One-shot canonical representative; prefer :class:`Canonicalizer` in loops."""
    return Canonicalizer(group, evaluation, rewrite, cap).canonical(w)
