from fractions import Fraction

import numpy as np
import pytest

from momentforge.evaluation import EvaluationRules
from momentforge.relaxation import (TOKEN, RelaxationError, build_relaxation,
                                    generating_monomials, split_order2)
from momentforge.symmetry import GeneralizedPermutation as GP, PermGroup, enumerate_group
from momentforge.pipeline import build

from helpers import binary_scenario, brute_force_basis


def test_basis_sizes_match_brute_force():
    al, rs = binary_scenario(3)
    for level, size in ((1, 7), (2, 28), (3, 88)):
        basis = generating_monomials(rs, level)
        assert len(basis) == size
        assert list(basis.monomials) == brute_force_basis(rs, level)
    assert len(generating_monomials(rs, 4)) == 244


def test_chsh_basis_and_errors():
    al, rs = binary_scenario(2)
    basis = generating_monomials(rs, 1)
    assert [al.format_word(w) for w in basis.monomials] == ["1", "A0", "A1", "B0", "B1"]
    assert basis.index(()) == 1 and basis.index((9,)) == 0
    with pytest.raises(RelaxationError):
        generating_monomials(rs, 0)
    with pytest.raises(RelaxationError):
        generating_monomials(rs, 3, cap=10)


def test_chsh_relaxation(chsh, chsh_groups):
    _, g = chsh_groups
    b = build(chsh, 1, "full", group=g, ambient=chsh_groups[0])
    J = b.relaxation.J
    expected = np.eye(5, dtype=np.int64)
    for (i, j), v in {(2, 4): 2, (2, 5): 2, (3, 4): 2, (3, 5): -2}.items():
        expected[i - 1, j - 1] = expected[j - 1, i - 1] = v
    assert (J == expected).all()
    assert b.relaxation.N_M == 2
    assert b.relaxation.b[1] == 4
    assert b.relaxation.offset == 0
    assert chsh.alphabet.format_word(b.relaxation.word_of(2)) == "A0*B0"


def test_unsymmetrized_chsh(chsh):
    b = build(chsh, 1, "none")
    assert b.relaxation.N_M == 11
    J = b.relaxation.J
    assert (J == J.T).all() and J[0, 0] == 1 and not (J == TOKEN).any()
    assert b.relaxation.b[0] == 0
    assert sorted(x for x in b.relaxation.b if x) == [-1, 1, 1, 1]


def test_objective_degree_overflow():
    al, rs = binary_scenario(2)
    p = rs.polynomial([(al.word("A0", "B0", "A1"), 1)])
    basis = generating_monomials(rs, 1)
    with pytest.raises(RelaxationError):
        build_relaxation(basis, PermGroup.trivial(4), EvaluationRules(), rs, p)


def test_non_symmetric_objective_is_rejected():
    al, rs = binary_scenario(2)
    # p = A0 is not invariant under A0 -> -A0; its moment vanishes
    p = rs.polynomial([(al.word("A0"), 1)])
    g = enumerate_group([GP([-1, 2, 3, 4])], rewrite=rs)
    with pytest.raises(RelaxationError):
        build_relaxation(generating_monomials(rs, 1), g, EvaluationRules(), rs, p)


def test_constant_objective_goes_to_offset():
    al, rs = binary_scenario(2)
    p = rs.polynomial([((), Fraction(3, 2)), (al.word("A0", "A0"), 1)])
    r = build_relaxation(generating_monomials(rs, 1), PermGroup.trivial(4), EvaluationRules(), rs, p)
    assert r.offset == Fraction(5, 2)
    assert not any(r.b)


def test_sdp_assembly_reconstructs_moment_matrix(i3322_level3):
    relax, sdp = i3322_level3.relaxation, i3322_level3.sdp
    assert sdp.m == relax.N_M - 1 == 124
    y = np.random.default_rng(0).normal(size=sdp.m)
    yy = np.concatenate([[0.0, 1.0], y])
    J = relax.J
    expected = np.sign(J) * yy[np.abs(J)]
    assert np.allclose(sdp.matrices(y)[0], expected)
    for A in sdp.blocks[0].A:
        assert abs(A - A.T).max() == 0


def test_split_blocks(i3322, i3322_level3):
    b = i3322_level3
    split = split_order2(b.sdp, i3322.split_perm, b.basis, i3322.rewrite)
    assert split.block_sizes == [44, 44]
    party = GP([4, 5, 6, 1, 2, 3])
    assert party in b.group
    assert split_order2(b.sdp, party, b.basis, i3322.rewrite).block_sizes == [46, 42]
    with pytest.raises(RelaxationError):
        split_order2(b.sdp, GP([2, 3, 1, 4, 5, 6]), b.basis, i3322.rewrite)


def test_split_rejects_non_symmetry(i3322, i3322_level3):
    b = i3322_level3
    flip = GP([-1, 2, 3, 4, 5, 6])
    with pytest.raises(RelaxationError):
        split_order2(b.sdp, flip, b.basis, i3322.rewrite)
