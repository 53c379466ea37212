"""Writers for the SDPA sparse format and the structured ``.relax`` document."""
from __future__ import annotations

import io
import json
from fractions import Fraction
from typing import IO, List, Optional

import numpy as np
import scipy.sparse as sp

from .relaxation import BlockSDP, MomentRelaxation


def _emit(sink: IO, text: str) -> None:
    if isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("utf-8"))


def _num(x: float) -> str:
    s = "%.17g" % x
    return "0" if s == "-0" else s


def _frac(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def sdpa_text(sdp: BlockSDP) -> str:
    """SDPA sparse text for ``max b.y + offset, C + sum y_i A_i >= 0``.

    SDPA minimizes ``c.x`` subject to ``sum F_i x_i - F_0 >= 0``; we write
    ``x = y``, ``c = -b``, ``F_0 = -C`` and ``F_i = A_i``.
    """
    lines = [
        '"momentforge relaxation in SDPA sparse format',
        '"source problem: maximize b.y + offset subject to C + sum_i y_i A_i >= 0',
        '"written as: minimize c.x with c = -b, F0 = -C, Fi = Ai',
        '"SDPA reports -(b.y); the relaxation bound is offset minus the SDPA objective',
        f'"offset = {_num(sdp.offset)}',
        str(sdp.m),
        str(len(sdp.blocks)),
        " ".join(str(s) for s in sdp.block_sizes),
        " ".join(_num(-v) for v in sdp.b) if sdp.m else "",
    ]
    for k, blk in enumerate(sdp.blocks, start=1):
        C = np.triu(-np.asarray(blk.C, dtype=float))
        for i, j in zip(*np.nonzero(C)):
            lines.append(f"0 {k} {i + 1} {j + 1} {_num(C[i, j])}")
    for var in range(sdp.m):
        for k, blk in enumerate(sdp.blocks, start=1):
            A = sp.triu(blk.A[var]).tocoo()
            entries = sorted(zip(A.row, A.col, A.data))
            for i, j, v in entries:
                if v != 0:
                    lines.append(f"{var + 1} {k} {i + 1} {j + 1} {_num(v)}")
    return "\n".join(lines) + "\n"


def write_sdpa_sparse(sdp: BlockSDP, sink: IO) -> None:
    _emit(sink, sdpa_text(sdp))


def structured_document(sdp: BlockSDP, relax: MomentRelaxation, alphabet,
                        group_order: Optional[int] = None) -> dict:
    J = relax.J
    n = J.shape[0]
    entries: List[List[int]] = []
    for i in range(n):
        for j in range(i, n):
            if J[i, j]:
                entries.append([i + 1, j + 1, int(J[i, j])])
    return {
        "format": "momentforge-relax",
        "version": 1,
        "level": relax.basis.level,
        "group_order": relax.group_order if group_order is None else group_order,
        "variables": sdp.m,
        "blocks": sdp.block_sizes,
        "basis": [alphabet.format_word(w) for w in relax.basis.monomials],
        "moments": {alphabet.format_word(w): k for k, w in enumerate(relax.words, start=2)},
        "J": {"size": n, "entries": entries},
        "b": [_frac(v) for v in relax.b[1:]],
        "offset": _frac(relax.offset),
    }


def structured_text(sdp: BlockSDP, relax: MomentRelaxation, alphabet) -> str:
    doc = structured_document(sdp, relax, alphabet)
    return json.dumps(doc, indent=1, ensure_ascii=True) + "\n"


def write_structured(sdp: BlockSDP, relax: MomentRelaxation, alphabet, sink: IO) -> None:
    """Deterministic JSON description of the relaxation (exact rationals as strings)."""
    _emit(sink, structured_text(sdp, relax, alphabet))
