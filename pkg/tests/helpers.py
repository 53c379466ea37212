"""Test oracles that do not share code with the package."""
import itertools

import numpy as np

from momentforge.algebra import Alphabet
from momentforge.rewrite import RewriteSystem


def binary_scenario(m):
    """Hermitian letters A0..A(m-1), B0..B(m-1) with +-1 outcome rules."""
    al = Alphabet.hermitian([f"A{i}" for i in range(m)] + [f"B{i}" for i in range(m)])
    rules = {}
    for i in range(1, m + 1):
        rules[(i, i)] = ()
        rules[(m + i, m + i)] = ()
        for j in range(1, m + 1):
            rules[(m + j, i)] = (i, m + j)
    return al, RewriteSystem(al, rules)


def brute_force_basis(rewrite, level):
    """Enumerate every word up to ``level``, reduce, dedupe, sort grlex."""
    out = set()
    n = rewrite.n
    for length in range(level + 1):
        for w in itertools.product(range(1, n + 1), repeat=length):
            nf = rewrite.reduce(w)
            if nf is not None:
                out.add(nf)
    return sorted(out, key=lambda w: (len(w), w))


def read_sdpa(text):
    """Minimal SDPA sparse reader.

    Returns ``(c, F)`` where ``F[k][blk]`` is the dense symmetric matrix ``F_k``
    of block ``blk`` (``k = 0`` is the constant matrix).
    """
    lines = []
    for raw in text.splitlines():
        raw = raw.strip()
        if not raw or raw[0] in "\"*":
            continue
        for ch in ",{}()":
            raw = raw.replace(ch, " ")
        lines.append(raw.split())
    m = int(lines[0][0])
    nblocks = int(lines[1][0])
    sizes = [abs(int(s)) for s in lines[2][:nblocks]]
    c = np.array([float(v) for v in lines[3][:m]]) if m else np.zeros(0)
    F = [[np.zeros((s, s)) for s in sizes] for _ in range(m + 1)]
    for row in lines[4:]:
        k, blk, i, j = (int(v) for v in row[:4])
        val = float(row[4])
        F[k][blk - 1][i - 1, j - 1] = val
        F[k][blk - 1][j - 1, i - 1] = val
    return c, F


def random_word(rng, n, max_len):
    return tuple(rng.randint(1, n) for _ in range(rng.randint(0, max_len)))
