"""Symmetrized moment matrices and their semidefinite program data.

Conventions: basis positions are 1-based in the API but ``J`` is a 0-based
numpy array, so ``J[0, 0]`` is the cell of the empty word with itself.
Entries of ``J`` are signed moment indices.  Moment index 1 is the constant
moment, index 0 a vanishing moment; moment ``k >= 2`` is SDP variable
``k - 1``.  The moment matrix reads ``C + sum_i y_i A_i`` and the program
maximizes ``b . y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .algebra import Polynomial, SignedWord, Word
from .evaluation import Canonicalizer, EvaluationRules
from .rewrite import RewriteSystem
from .symmetry import GeneralizedPermutation, GroupError, PermGroup, evaluated_form

TOKEN = 2 ** 31 - 1
DEFAULT_BASIS_CAP = 10 ** 5


class RelaxationError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratingBasis:
    level: int
    monomials: Tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {w: k for k, w in enumerate(self.monomials, start=1)})

    def __len__(self) -> int:
        return len(self.monomials)

    def index(self, w: Word) -> int:
        """1-based position of a normal-form word, or 0 if absent."""
        return self._index.get(w, 0)


def generating_monomials(rewrite: RewriteSystem, level: int,
                         cap: int = DEFAULT_BASIS_CAP) -> GeneratingBasis:
    """Normal forms of all words of length at most ``level``, grlex sorted.

    With degree-two left-hand sides a word is in normal form exactly when no
    adjacent pair is reducible, so normal forms are grown one letter at a time.
    """
    if level < 1:
        raise RelaxationError("relaxation level must be at least 1")
    code = rewrite.rule_code
    n = rewrite.n
    layer: List[Word] = [()]
    out: List[Word] = [()]
    for _ in range(level):
        nxt = []
        for w in layer:
            for a in range(1, n + 1):
                if not w or code[w[-1]][a] == 1:
                    nxt.append(w + (a,))
        out.extend(nxt)
        if len(out) > cap:
            raise RelaxationError(f"generating basis exceeds the cap of {cap} monomials")
        layer = nxt
    out.sort(key=lambda w: (len(w), w))
    return GeneratingBasis(level, tuple(out))


@dataclass
class MomentRelaxation:
    """Output of the symmetrized moment-matrix construction.

    ``b[k - 1]`` is the objective coefficient of moment ``k``; ``b[0]`` stays 0
    and the constant part of the objective lives in ``offset``.
    """

    basis: GeneratingBasis
    J: np.ndarray
    moments: Dict[Word, int]
    words: List[Word]
    b: List[Fraction]
    offset: Fraction
    group_order: int = 1

    @property
    def N_M(self) -> int:
        return len(self.words) + 1

    @property
    def num_variables(self) -> int:
        return len(self.words)

    def word_of(self, k: int) -> Word:
        return self.words[k - 2]


def _basis_action(group: PermGroup, basis: GeneratingBasis,
                  rewrite: RewriteSystem) -> List[List[int]]:
    """For every element, the signed image index of each basis monomial."""
    tables = []
    for g in group.elements:
        row = [0] * (len(basis) + 1)
        for k, w in enumerate(basis.monomials, start=1):
            s, img = g.apply(w)
            nf = rewrite.reduce(img)
            t = basis.index(nf) if nf is not None else 0
            if t == 0:
                raise GroupError("generating basis is not closed under the symmetry group")
            row[k] = s * t
        tables.append(row)
    return tables


def build_relaxation(basis: GeneratingBasis, group: PermGroup, evaluation: EvaluationRules,
                     rewrite: RewriteSystem, objective: Polynomial,
                     canonicalizer: Optional[Canonicalizer] = None) -> MomentRelaxation:
    """Fill the signed moment-index matrix, one group orbit of cells at a time.

    Cells are visited in upper-triangular row-major order; fresh moment
    indices are handed out in that order, which makes the output deterministic.
    """
    if objective.degree > 2 * basis.level:
        raise RelaxationError(
            f"objective degree {objective.degree} exceeds twice the level {basis.level}")
    canon = canonicalizer or Canonicalizer(group, evaluation, rewrite)
    alphabet = rewrite.alphabet
    n = len(basis)
    actions = _basis_action(group, basis, rewrite)
    J = [[TOKEN] * (n + 1) for _ in range(n + 1)]
    moments: Dict[Word, int] = {}
    words: List[Word] = []
    mons = basis.monomials
    for i in range(1, n + 1):
        row = J[i]
        left = alphabet.adjoint_word(mons[i - 1])
        for j in range(i, n + 1):
            if row[j] != TOKEN:
                continue
            c = canon.canonical(SignedWord(1, left + mons[j - 1]))
            if c.is_zero:
                k = 0
            elif not c.letters:
                k = c.sign
            else:
                idx = moments.get(c.letters)
                if idx is None:
                    words.append(c.letters)
                    idx = len(words) + 1
                    moments[c.letters] = idx
                k = c.sign * idx
            for act in actions:
                r, s = act[i], act[j]
                v = k if (r > 0) == (s > 0) else -k
                r, s = abs(r), abs(s)
                J[r][s] = v
                J[s][r] = v
    Jarr = np.array([r[1:] for r in J[1:]], dtype=np.int64)
    if np.any(Jarr == TOKEN):
        raise RelaxationError("unassigned cells remain in the moment matrix")

    b = [Fraction(0)] * (len(words) + 1)
    offset = Fraction(0)
    trivial = Canonicalizer(PermGroup.trivial(group.n), evaluation, rewrite)
    for w, coef in evaluated_form(objective, trivial.canonical_word).items():
        c = canon.canonical_word(w)
        if c.is_zero:
            raise RelaxationError(
                f"objective term {alphabet.format_word(w)} has a vanishing moment under the "
                "symmetry group; the group does not preserve the objective")
        if not c.letters:
            offset += c.sign * coef
            continue
        idx = moments.get(c.letters)
        if idx is None:
            raise RelaxationError(
                f"objective moment {alphabet.format_word(c.letters)} does not appear in the "
                "moment matrix")
        b[idx - 1] += c.sign * coef
    return MomentRelaxation(basis, Jarr, moments, words, b, offset, group.order)


@dataclass
class Block:
    """One diagonal block: dense ``C`` and sparse ``A[i]`` for every variable."""

    C: np.ndarray
    A: List[sp.csr_matrix]

    @property
    def size(self) -> int:
        return self.C.shape[0]

    def matrix(self, y: np.ndarray) -> np.ndarray:
        out = self.C.copy()
        for yi, Ai in zip(y, self.A):
            if yi != 0 and Ai.nnz:
                out += yi * Ai.toarray()
        return out


@dataclass
class BlockSDP:
    """``max b . y + offset`` subject to ``C_k + sum_i y_i A_{k,i} >= 0`` for all blocks."""

    blocks: List[Block]
    b: np.ndarray
    offset: float = 0.0

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def block_sizes(self) -> List[int]:
        return [blk.size for blk in self.blocks]

    def matrices(self, y) -> List[np.ndarray]:
        y = np.asarray(y, dtype=float)
        return [blk.matrix(y) for blk in self.blocks]


def assemble_sdp(relax: MomentRelaxation) -> BlockSDP:
    """Split the signed index matrix into constant and per-variable parts."""
    J = relax.J
    n = J.shape[0]
    absJ = np.abs(J)
    sign = np.sign(J).astype(float)
    C = np.where(absJ == 1, sign, 0.0)
    m = relax.num_variables
    rows, cols = np.nonzero(absJ >= 2)
    var = absJ[rows, cols] - 2
    vals = sign[rows, cols]
    order = np.argsort(var, kind="stable")
    rows, cols, var, vals = rows[order], cols[order], var[order], vals[order]
    bounds = np.searchsorted(var, np.arange(m + 1))
    A = []
    for i in range(m):
        lo, hi = bounds[i], bounds[i + 1]
        A.append(sp.csr_matrix((vals[lo:hi], (rows[lo:hi], cols[lo:hi])), shape=(n, n)))
    b = np.array([float(x) for x in relax.b[1:]], dtype=float)
    return BlockSDP([Block(C, A)], b, float(relax.offset))


def _split_basis(g: GeneralizedPermutation, basis: GeneratingBasis,
                 rewrite: RewriteSystem) -> Tuple[sp.csr_matrix, int]:
    """Orthonormal eigenbasis of the signed permutation induced on the basis.

    Returns ``U`` (columns: +1 eigenvectors first) and the number of +1 columns.
    """
    n = len(basis)
    image = [0] * (n + 1)
    for k, w in enumerate(basis.monomials, start=1):
        s, img = g.apply(w)
        nf = rewrite.reduce(img)
        t = basis.index(nf) if nf is not None else 0
        if t == 0:
            raise RelaxationError("split generator does not map the basis to itself")
        image[k] = s * t
    sym, anti = [], []
    h = 1 / math.sqrt(2)
    for i in range(1, n + 1):
        t = image[i]
        j, s = abs(t), (1 if t > 0 else -1)
        if j == i:
            (sym if s > 0 else anti).append(((i, 1.0),))
        elif i < j:
            if image[j] != s * i:
                raise RelaxationError("split generator is not an involution on the basis")
            sym.append(((i, h), (j, s * h)))
            anti.append(((i, h), (j, -s * h)))
    rows, cols, vals = [], [], []
    for c, vec in enumerate(sym + anti):
        for i, v in vec:
            rows.append(i - 1)
            cols.append(c)
            vals.append(v)
    U = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return U, len(sym)


def _clean(M: sp.spmatrix, eps: float = 1e-14) -> sp.csr_matrix:
    M = sp.csr_matrix(M)
    M.data[np.abs(M.data) < eps] = 0.0
    M.eliminate_zeros()
    return M


def split_order2(sdp: BlockSDP, g: GeneralizedPermutation, basis: GeneratingBasis,
                 rewrite: RewriteSystem, tol: float = 1e-12) -> BlockSDP:
    """Block-diagonalize along the +1/-1 eigenspaces of an order-two symmetry."""
    if g.order() != 2:
        raise RelaxationError("split generator must have order two")
    if len(sdp.blocks) != 1 or sdp.blocks[0].size != len(basis):
        raise RelaxationError("split expects the single moment-matrix block")
    U, k = _split_basis(g, basis, rewrite)
    Ud = U.toarray()
    blk = sdp.blocks[0]
    Cc = Ud.T @ blk.C @ Ud
    Cc = (Cc + Cc.T) / 2
    Cc[np.abs(Cc) < 1e-14] = 0.0
    parts = [slice(0, k), slice(k, len(basis))]

    def coupling(M):
        return M[parts[0], parts[1]]

    worst = np.abs(coupling(Cc)).max(initial=0.0)
    Ut = U.T.tocsr()
    new_A = []
    for Ai in blk.A:
        Bi = _clean(Ut @ Ai @ U)
        Bi = _clean((Bi + Bi.T) * 0.5)
        off = Bi[parts[0], parts[1]]
        if off.nnz:
            worst = max(worst, np.abs(off.data).max())
        new_A.append(Bi)
    if worst > tol:
        raise RelaxationError(
            f"residual coupling {worst:.3g} between symmetric and antisymmetric blocks; "
            "the split generator is not a symmetry of the program")
    blocks = []
    for part in parts:
        if part.stop - part.start == 0:
            continue
        blocks.append(Block(Cc[part, part].copy(), [Ai[part, part].tocsr() for Ai in new_A]))
    return BlockSDP(blocks, sdp.b.copy(), sdp.offset)
