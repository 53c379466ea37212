"""Generalized (signed) permutations of letters and the groups they generate."""
from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .algebra import Alphabet, Polynomial, SignedWord, Word
from .rewrite import RewriteSystem, check_compatibility

DEFAULT_GROUP_CAP = 10 ** 6


class GroupError(ValueError):
    pass


class GeneralizedPermutation:
    """Signed permutation ``i -> images[i - 1]`` of letters ``1..n``.

    Acts on signed indices by ``pi(-i) = -pi(i)``.
    """

    __slots__ = ("images", "_hash")

    def __init__(self, images: Sequence[int]):
        images = tuple(int(t) for t in images)
        n = len(images)
        if sorted(abs(t) for t in images) != list(range(1, n + 1)):
            raise GroupError(f"{images} is not a signed permutation")
        self.images = images
        self._hash = hash(images)

    @classmethod
    def identity(cls, n: int) -> "GeneralizedPermutation":
        return cls(range(1, n + 1))

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[int, int]) -> "GeneralizedPermutation":
        """Build from a partial map; unmapped letters are fixed."""
        return cls([mapping.get(i, i) for i in range(1, n + 1)])

    def __len__(self) -> int:
        return len(self.images)

    def __eq__(self, other) -> bool:
        return isinstance(other, GeneralizedPermutation) and self.images == other.images

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"GeneralizedPermutation({self.images})"

    def __mul__(self, other: "GeneralizedPermutation") -> "GeneralizedPermutation":
        return compose(self, other)

    def image(self, i: int) -> int:
        if i < 0:
            return -self.images[-i - 1]
        return self.images[i - 1]

    def inverse(self) -> "GeneralizedPermutation":
        inv = [0] * len(self.images)
        for i, t in enumerate(self.images, start=1):
            inv[abs(t) - 1] = i if t > 0 else -i
        return GeneralizedPermutation(inv)

    def is_identity(self) -> bool:
        return all(t == i for i, t in enumerate(self.images, start=1))

    def order(self) -> int:
        k, g = 1, self
        while not g.is_identity():
            g = compose(g, self)
            k += 1
        return k

    def apply(self, w: Word) -> Tuple[int, Word]:
        """Letterwise image of an unsigned word: ``(sign, word)``, not reduced."""
        images = self.images
        sign = 1
        out = []
        for k in w:
            t = images[k - 1]
            if t < 0:
                sign = -sign
                t = -t
            out.append(t)
        return sign, tuple(out)

    def commutes_with_adjoint(self, alphabet: Alphabet) -> bool:
        return all(self.image(alphabet.adjoint_letter(i)) == alphabet.adjoint_letter(self.image(i))
                   for i in range(1, len(self.images) + 1))

    def format(self, alphabet: Alphabet) -> str:
        parts = []
        for t in self.images:
            parts.append(("-" if t < 0 else "") + alphabet.letters[abs(t) - 1].name)
        return "(" + ", ".join(parts) + ")"


def compose(a: GeneralizedPermutation, b: GeneralizedPermutation) -> GeneralizedPermutation:
    """``(a o b)(i) = a(b(i))``."""
    if len(a) != len(b):
        raise GroupError("permutations act on different alphabets")
    ai = a.images
    out = []
    for t in b.images:
        out.append(ai[t - 1] if t > 0 else -ai[-t - 1])
    return GeneralizedPermutation(out)


class PermGroup:
    """A finite group of generalized permutations, stored by full enumeration."""

    def __init__(self, generators: Sequence[GeneralizedPermutation],
                 elements: Sequence[GeneralizedPermutation], n: int):
        self.n = n
        self.generators: Tuple[GeneralizedPermutation, ...] = tuple(generators)
        self.elements: Tuple[GeneralizedPermutation, ...] = tuple(elements)
        self._set = frozenset(self.elements)

    @classmethod
    def trivial(cls, n: int) -> "PermGroup":
        return cls((), (GeneralizedPermutation.identity(n),), n)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return g in self._set

    def __repr__(self) -> str:
        return f"PermGroup(order={self.order}, generators={len(self.generators)})"

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(compose(a, b) == compose(b, a) for a in gens for b in gens)

    def element_orders(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for g in self.elements:
            k = g.order()
            counts[k] = counts.get(k, 0) + 1
        return dict(sorted(counts.items()))

    def is_closed(self) -> bool:
        s = self._set
        return all(compose(a, b) in s for a in self.elements for b in self.elements)


def _closure(gens: Sequence[GeneralizedPermutation], n: int, cap: int) -> List[GeneralizedPermutation]:
    identity = GeneralizedPermutation.identity(n)
    seen = {identity}
    order = [identity]
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = compose(g, s)
            if h not in seen:
                seen.add(h)
                order.append(h)
                if len(order) > cap:
                    raise GroupError(f"group order exceeds the cap of {cap} elements")
                queue.append(h)
    return order


def enumerate_group(gens: Sequence[GeneralizedPermutation], cap: int = DEFAULT_GROUP_CAP,
                    n: Optional[int] = None, rewrite: Optional[RewriteSystem] = None) -> PermGroup:
    """Breadth-first closure of ``gens`` under composition.

    When ``rewrite`` is given, each generator must be compatible with it.
    """
    gens = tuple(gens)
    if n is None:
        if not gens:
            raise GroupError("cannot infer the alphabet size of an empty generator list")
        n = len(gens[0])
    for g in gens:
        if len(g) != n:
            raise GroupError("generator acts on the wrong number of letters")
        if rewrite is not None and not check_compatibility(g, rewrite):
            raise GroupError(f"generator {g.format(rewrite.alphabet)} is not compatible with the rewriting rules")
    elements = _closure(gens, n, cap)
    found = set(elements)
    for g in elements:
        if g.inverse() not in found:
            raise GroupError("enumeration is not closed under inverses")
    return PermGroup(gens, elements, n)


def subgroup_from_elements(elements: Iterable[GeneralizedPermutation], n: int) -> PermGroup:
    """Wrap a set known to be a subgroup, choosing a small generating set greedily."""
    elements = list(elements)
    members = set(elements)
    gens: List[GeneralizedPermutation] = []
    generated = {GeneralizedPermutation.identity(n)}
    for g in elements:
        if g not in generated:
            gens.append(g)
            generated = set(_closure(gens, n, len(members) + 1))
    if generated != members:
        raise GroupError("element set is not a subgroup")
    return PermGroup(gens, elements, n)


def signed_word_action(pi: GeneralizedPermutation, w: SignedWord, rewrite: RewriteSystem) -> SignedWord:
    if w.is_zero:
        return w
    sign, img = pi.apply(w.letters)
    return rewrite.normal_form(SignedWord(sign * w.sign, img))


def act(pi: GeneralizedPermutation, p: Polynomial, rewrite: RewriteSystem) -> Polynomial:
    """Image of a polynomial: each word mapped, reduced, signs folded in."""
    out = []
    for w, c in p:
        sign, img = pi.apply(w)
        out.append((img, sign * c))
    return rewrite.polynomial(out)


def invariant_monomials(group: PermGroup, p: Polynomial, rewrite: RewriteSystem,
                        cap: int = DEFAULT_GROUP_CAP) -> Set[Word]:
    """Smallest set of unsigned monomials containing those of ``p`` and stable under ``group``."""
    gens = group.generators or group.elements
    found: Set[Word] = set()
    queue = deque()
    for w, _ in p:
        if w not in found:
            found.add(w)
            queue.append(w)
    while queue:
        w = queue.popleft()
        for g in gens:
            _, img = g.apply(w)
            nf = rewrite.reduce(img)
            if nf is not None and nf not in found:
                found.add(nf)
                if len(found) > cap:
                    raise GroupError(f"orbit of the objective monomials exceeds {cap}")
                queue.append(nf)
    return found


def evaluated_form(p: Polynomial, canon) -> Dict[Tuple[int, Word], Fraction]:
    """Coefficients of ``p`` after merging monomials with equal evaluation.

    ``canon`` maps an unsigned word to a signed canonical word.  Terms whose
    evaluation vanishes are dropped.
    """
    out: Dict[Word, Fraction] = {}
    for w, c in p:
        cw = canon(w)
        if cw.is_zero:
            continue
        out[cw.letters] = out.get(cw.letters, Fraction(0)) + cw.sign * c
    return {w: c for w, c in out.items() if c != 0}


def symmetry_subgroup(group: PermGroup, p: Polynomial, evaluation, rewrite: RewriteSystem,
                      cap: int = DEFAULT_GROUP_CAP) -> PermGroup:
    """Elements of ``group`` leaving the evaluated objective unchanged.

    The orbit of the objective monomials is materialized first; it bounds the
    work and guards against runaway inputs.  Evaluation equivalences (adjoint,
    partial transposition, cyclic) are applied before comparing.
    """
    from .evaluation import Canonicalizer

    invariant_monomials(group, p, rewrite, cap)
    canon = Canonicalizer(PermGroup.trivial(group.n), evaluation, rewrite, cap=cap).canonical_word
    # invariance is scale free, so compare integer multiples of the coefficients
    den = math.lcm(*(c.denominator for _, c in p)) if len(p) else 1
    terms = [(w, int(c * den)) for w, c in p]
    target = {w: int(c * den) for w, c in evaluated_form(p, canon).items()}
    reduce = rewrite.reduce
    kept = []
    for g in group.elements:
        image: Dict[Word, int] = {}
        for w, c in terms:
            sign, img = g.apply(w)
            nf = reduce(img)
            if nf is None:
                continue
            cw = canon(nf)
            if cw.is_zero:
                continue
            image[cw.letters] = image.get(cw.letters, 0) + sign * cw.sign * c
        if {w: c for w, c in image.items() if c} == target:
            kept.append(g)
    sub = subgroup_from_elements(kept, group.n)
    if group.order % sub.order:
        raise GroupError("symmetry subgroup order does not divide the group order")
    return sub
