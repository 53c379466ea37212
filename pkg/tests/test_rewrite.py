import random

import pytest

from momentforge.algebra import Alphabet, SignedWord
from momentforge.rewrite import (RewriteError, RewriteSystem, RuleCode, check_compatibility,
                                 check_confluence)
from momentforge.symmetry import GeneralizedPermutation

from helpers import binary_scenario, random_word


@pytest.fixture(scope="module")
def chsh_rs():
    return binary_scenario(2)


def nf(rs, al, *names):
    return rs.normal_form(SignedWord(1, al.word(*names)))


def test_normal_form_examples(chsh_rs, projectors):
    al, rs = chsh_rs
    assert nf(rs, al, "A0", "A0") == SignedWord.one()
    assert nf(rs, al, "B0", "A1", "B1") == SignedWord(1, al.word("A1", "B0", "B1"))
    assert nf(rs, al, "A0", "B0", "A0", "B0") == SignedWord.one()
    assert rs.normal_form(SignedWord(-1, al.word("B1", "A0"))) == SignedWord(-1, al.word("A0", "B1"))
    pal, prs = projectors.alphabet, projectors.rewrite
    assert prs.normal_form(SignedWord(1, pal.word("A0_0", "A1_0"))).is_zero
    assert prs.normal_form(SignedWord(1, pal.word("A0_0", "A0_0"))) == SignedWord(1, pal.word("A0_0"))


def test_rule_codes(chsh_rs):
    al, rs = chsh_rs
    a0, b0 = al.index("A0"), al.index("B0")
    assert rs.code(a0, a0) == RuleCode.REMOVE_BOTH
    assert rs.code(b0, a0) == RuleCode.SWAP
    assert rs.code(a0, b0) == RuleCode.PRESERVE
    al2 = Alphabet.hermitian(["x", "y", "z"])
    rs2 = RewriteSystem(al2, {(1, 1): (1,), (1, 2): None, (3, 3): (2, 1), (2, 3): (1,)})
    assert rs2.code(1, 1) == RuleCode.KEEP_FIRST
    assert rs2.code(1, 2) == RuleCode.SET_ZERO
    assert rs2.code(3, 3) == RuleCode.CUSTOM
    assert rs2.code(2, 3) == RuleCode.CUSTOM
    assert set(rs2.custom_rules) == {(3, 3), (2, 3)}


def test_replacement_must_be_reduced():
    al = Alphabet.hermitian(["x", "y"])
    with pytest.raises(RewriteError):
        RewriteSystem(al, {(1, 1): (), (2, 2): (1, 1)})


def test_nontermination_is_reported():
    al = Alphabet.hermitian(["x", "y"])
    # x*y -> y*x and y*x -> x*y would cycle; the second rhs is not reduced
    with pytest.raises(RewriteError):
        RewriteSystem(al, {(1, 2): (2, 1), (2, 1): (1, 2)})


def test_normal_form_properties(chsh_rs):
    al, rs = chsh_rs
    rng = random.Random(1)
    for _ in range(2000):
        u, v = random_word(rng, 4, 6), random_word(rng, 4, 6)
        w = rs.reduce(u + v)
        assert rs.reduce(w) == w
        assert len(w) <= len(u + v)
        assert rs.is_reduced(w)
        assert w == rs.reduce(rs.reduce(u) + rs.reduce(v))


def test_confluence_examples(chsh_rs, projectors):
    _, rs = chsh_rs
    assert check_confluence(rs, 6).confluent
    assert check_confluence(projectors.rewrite, 5).confluent
    al = Alphabet.hermitian(["x", "y"])
    bad = RewriteSystem(al, {(1, 2): (), (2, 1): (), (1, 1): (1,)})
    report = check_confluence(bad, 3)
    assert not report.confluent
    word, a, b = report.counterexamples[0]
    assert a != b
    with pytest.raises(ValueError):
        check_confluence(rs, 2)


def test_compatibility_examples(chsh_rs):
    al, rs = chsh_rs
    assert check_compatibility(GeneralizedPermutation([1, -2, 3, 4]), rs)
    assert check_compatibility(GeneralizedPermutation.identity(4), rs)
    assert check_compatibility(GeneralizedPermutation([3, 4, 1, 2]), rs)
    # a swap mixing the parties breaks B*A -> A*B
    assert not check_compatibility(GeneralizedPermutation([3, 2, 1, 4]), rs)
    al1 = Alphabet.hermitian(["x"])
    idem = RewriteSystem(al1, {(1, 1): (1,)})
    assert not check_compatibility(GeneralizedPermutation([-1]), idem)


def test_compatible_maps_preserve_congruence(chsh_rs):
    al, rs = chsh_rs
    pi = GeneralizedPermutation([-3, 4, 1, -2])
    assert check_compatibility(pi, rs)
    rng = random.Random(2)
    for _ in range(500):
        w = random_word(rng, 4, 7)
        s1, img1 = pi.apply(w)
        s2, img2 = pi.apply(rs.reduce(w))
        assert rs.normal_form(SignedWord(s1, img1)) == rs.normal_form(SignedWord(s2, img2))
