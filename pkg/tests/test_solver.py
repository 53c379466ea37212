import math

import numpy as np
import pytest
import scipy.linalg as la
import scipy.sparse as sp

from momentforge.pipeline import build
from momentforge.relaxation import Block, BlockSDP
from momentforge.solver import (INFEASIBLE, OPTIMAL, SolverOptions, check_psd, solve)


def test_check_psd_examples():
    assert check_psd(np.eye(3))
    assert not check_psd(np.diag([1.0, -1.0]))
    x = 1 / math.sqrt(2)
    xi = np.eye(5)
    for (i, j), s in {(1, 3): 1, (1, 4): 1, (2, 3): 1, (2, 4): -1}.items():
        xi[i, j] = xi[j, i] = s * x
    assert check_psd(xi, 1e-12)
    assert abs(np.linalg.eigvalsh(xi)[0]) < 1e-12
    with pytest.raises(ValueError):
        check_psd(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(tolerance=0)
    with pytest.raises(ValueError):
        SolverOptions(max_iterations=0)


def test_trivial_problem():
    sdp = BlockSDP([Block(np.eye(3), [sp.csr_matrix(np.diag([1.0, 0, 0]))])], np.zeros(1))
    sol = solve(sdp)
    assert sol.status == OPTIMAL
    assert abs(sol.objective_value) < 1e-9


def test_unbounded_is_flagged():
    sdp = BlockSDP([Block(np.eye(2), [sp.csr_matrix(np.eye(2))])], np.ones(1))
    sol = solve(sdp)
    assert sol.status == INFEASIBLE


def test_max_iterations_status(chsh):
    sdp = build(chsh, 1, "none").sdp
    sol = solve(sdp, SolverOptions(max_iterations=2))
    assert sol.status == "max_iter" and sol.iterations == 2


def _random_sdp(rng, sizes, m):
    blocks = []
    X0 = []
    for n in sizes:
        A = []
        for _ in range(m):
            M = rng.normal(size=(n, n))
            A.append(sp.csr_matrix(M + M.T))
        blocks.append(Block(np.eye(n), A))
        G = rng.normal(size=(n, n))
        X0.append(G @ G.T + np.eye(n))
    # b chosen so that X0 is dual feasible, which makes the program bounded
    b = -np.array([sum(float(np.vdot(blk.A[i].toarray(), X)) for blk, X in zip(blocks, X0))
                   for i in range(m)])
    return BlockSDP(blocks, b)


def test_against_independent_solver():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(7)
    for trial in range(4):
        sdp = _random_sdp(rng, [4, 3], 5)
        sol = solve(sdp)
        assert sol.status == OPTIMAL
        y = cp.Variable(sdp.m)
        cons = []
        for blk in sdp.blocks:
            expr = blk.C + sum(y[i] * blk.A[i].toarray() for i in range(sdp.m))
            cons.append((expr + expr.T) / 2 >> 0)
        prob = cp.Problem(cp.Maximize(sdp.b @ y), cons)
        prob.solve(solver=cp.CLARABEL)
        assert abs(sol.objective_value - prob.value) < 1e-6 * (1 + abs(prob.value))


@pytest.fixture(scope="module")
def i3322_split2(i3322):
    return build(i3322, 2, "split").sdp


def test_duality_and_certificate(chsh, i3322_split2):
    for sdp in (build(chsh, 1, "full").sdp, build(chsh, 1, "none").sdp, i3322_split2):
        sol = solve(sdp)
        assert sol.status == OPTIMAL
        assert sol.duality_gap <= 1e-9
        lo, hi = sorted((sol.primal_objective, sol.dual_objective))
        assert lo - 1e-12 <= sol.objective_value <= hi + 1e-12
        assert sol.primal_objective <= sol.dual_objective + 1e-9
        tail = sol.gap_history[-5:]
        assert all(a > b for a, b in zip(tail, tail[1:]))
        for M in sdp.matrices(sol.y):
            assert check_psd(M, tol=10 * sol.duality_gap)


def test_block_independence(i3322_split2):
    sdp = i3322_split2
    assert len(sdp.blocks) == 2
    C = la.block_diag(*(blk.C for blk in sdp.blocks))
    A = [sp.block_diag([blk.A[i] for blk in sdp.blocks]).tocsr() for i in range(sdp.m)]
    merged = BlockSDP([Block(C, A)], sdp.b, sdp.offset)
    a, b = solve(sdp), solve(merged)
    assert abs(a.objective_value - b.objective_value) < 1e-8


def test_determinism(chsh):
    sdp = build(chsh, 1, "none").sdp
    a, b = solve(sdp), solve(sdp)
    assert a.objective_value == b.objective_value
    assert np.array_equal(a.y, b.y)
