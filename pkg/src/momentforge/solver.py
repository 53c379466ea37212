"""Dense primal-dual interior-point solver for small block SDPs.

Solves ``max b.y  s.t.  S = C + sum_i y_i A_i >= 0`` together with its dual
``min C.X  s.t.  A_i.X = -b_i, X >= 0``.  Uses the HKM search direction with
Mehrotra predictor-corrector steps and an infeasible start.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg as la

from .relaxation import BlockSDP

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
MAX_ITER = "max_iter"
INFEASIBLE = "infeasible_suspected"

_DIVERGENCE = 1e12


@dataclass
class SolverOptions:
    tolerance: float = 1e-9
    max_iterations: int = 200
    initial_radius: float = 1.0
    step_fraction: float = 0.98

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.initial_radius > 0:
            raise ValueError("initial_radius must be positive")


@dataclass
class Solution:
    status: str
    objective_value: float
    y: np.ndarray
    duality_gap: float
    iterations: int
    primal_objective: float = float("nan")
    dual_objective: float = float("nan")
    primal_infeasibility: float = float("nan")
    dual_infeasibility: float = float("nan")
    gap_history: List[float] = field(default_factory=list)
    X: List[np.ndarray] = field(default_factory=list, repr=False)


def check_psd(matrix, tol: float = 1e-9) -> bool:
    """True iff the symmetric matrix has smallest eigenvalue >= -tol."""
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("check_psd expects a square matrix")
    if M.size and np.abs(M - M.T).max() > tol:
        raise ValueError("matrix is not symmetric within tolerance")
    if not M.size:
        return True
    return bool(np.linalg.eigvalsh((M + M.T) / 2)[0] >= -tol)


class _Block:
    def __init__(self, blk, m):
        self.n = blk.size
        self.C = np.asarray(blk.C, dtype=float)
        A = np.zeros((m, self.n, self.n))
        for i, Ai in enumerate(blk.A):
            if Ai.nnz:
                A[i] = Ai.toarray()
        self.A = A
        self.Aflat = A.reshape(m, -1)

    def op(self, X):
        # (A_i . X)_i
        return self.Aflat @ X.ravel()

    def adj(self, y):
        return np.tensordot(y, self.A, axes=1)


def _max_step(M, dM):
    """Largest alpha with M + alpha dM >= 0, for M positive definite."""
    L = np.linalg.cholesky(M)
    Li = la.solve_triangular(L, np.eye(len(M)), lower=True)
    ev = np.linalg.eigvalsh(Li @ dM @ Li.T)[0]
    return np.inf if ev >= 0 else -1.0 / ev


def _sym(M):
    return (M + M.T) / 2


def solve(sdp: BlockSDP, opts: SolverOptions = None) -> Solution:
    """Maximize ``b.y`` subject to every block matrix being PSD.

    The reported objective includes ``sdp.offset`` and lies between the
    lower bound ``b.y`` and the upper bound ``C.X`` of the final iterate.
    """
    opts = opts or SolverOptions()
    m = sdp.m
    if max(sdp.block_sizes, default=0) > 200 or m > 1000:
        warnings.warn("problem exceeds the built-in solver's intended size; expect it to be slow",
                      RuntimeWarning)
    blocks = [_Block(blk, m) for blk in sdp.blocks]
    b = np.asarray(sdp.b, dtype=float)
    ntot = sum(B.n for B in blocks)
    r = opts.initial_radius
    scale = max(1.0, max((np.abs(B.C).max(initial=0.0) for B in blocks), default=1.0))
    y = np.zeros(m)
    X = [r * scale * np.eye(B.n) for B in blocks]
    S = []
    for B in blocks:
        # slack C is kept when it is strictly feasible, otherwise shifted
        try:
            np.linalg.cholesky(B.C)
            S.append(B.C.copy())
        except np.linalg.LinAlgError:
            S.append(B.C + r * scale * (1 + np.abs(np.linalg.eigvalsh(B.C)[0])) * np.eye(B.n))
    nb = 1 + np.linalg.norm(b)
    nc = 1 + max((np.linalg.norm(B.C) for B in blocks), default=0.0)
    history: List[float] = []
    status = MAX_ITER
    it = 0
    pobj = dobj = gap = pinf = dinf = float("nan")
    for it in range(1, opts.max_iterations + 1):
        Rp = -b - sum(B.op(Xk) for B, Xk in zip(blocks, X))
        Rd = [B.C + B.adj(y) - Sk for B, Sk in zip(blocks, S)]
        pobj = sum(float(np.vdot(B.C, Xk)) for B, Xk in zip(blocks, X))
        dobj = float(b @ y)
        mu = sum(float(np.vdot(Xk, Sk)) for Xk, Sk in zip(X, S)) / ntot
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(Rp) / nb
        dinf = max((np.linalg.norm(R) for R in Rd), default=0.0) / nc
        history.append(gap)
        log.debug("iter %d: dobj %.12g pobj %.12g gap %.3g pinf %.3g dinf %.3g",
                  it, dobj, pobj, gap, pinf, dinf)
        if gap <= opts.tolerance and pinf <= opts.tolerance and dinf <= opts.tolerance:
            status = OPTIMAL
            break
        if (max(np.abs(Xk).max() for Xk in X) > _DIVERGENCE
                or np.abs(y).max(initial=0.0) > _DIVERGENCE):
            status = INFEASIBLE
            break

        Sinv = [np.linalg.inv(Sk) for Sk in S]
        Sinv = [_sym(Si) for Si in Sinv]
        M = np.zeros((m, m))
        for B, Xk, Si in zip(blocks, X, Sinv):
            G = np.matmul(np.matmul(Xk, B.A), Si)
            M += B.Aflat @ G.reshape(m, -1).T
        M = _sym(M)
        try:
            factor = la.cho_factor(M)

            def schur(rhs):
                return la.cho_solve(factor, rhs)
        except la.LinAlgError:
            def schur(rhs):
                return np.linalg.lstsq(M, rhs, rcond=None)[0]

        def direction(T):
            rhs = -Rp + sum(B.op(Tk - Xk @ Rk @ Si)
                            for B, Tk, Xk, Rk, Si in zip(blocks, T, X, Rd, Sinv))
            dy = schur(rhs)
            dS = [Rk + B.adj(dy) for B, Rk in zip(blocks, Rd)]
            dX = [_sym(Tk - Xk @ dSk @ Si) for Tk, Xk, dSk, Si in zip(T, X, dS, Sinv)]
            return dX, dy, dS

        def steps(dX, dS):
            ap = min(min((_max_step(Xk, d) for Xk, d in zip(X, dX)), default=np.inf), 1 / opts.step_fraction)
            ad = min(min((_max_step(Sk, d) for Sk, d in zip(S, dS)), default=np.inf), 1 / opts.step_fraction)
            return min(1.0, opts.step_fraction * ap), min(1.0, opts.step_fraction * ad)

        try:
            # predictor
            T = [-Xk for Xk in X]
            dXa, dya, dSa = direction(T)
            ap, ad = steps(dXa, dSa)
            mu_aff = sum(float(np.vdot(Xk + ap * a, Sk + ad * c))
                         for Xk, a, Sk, c in zip(X, dXa, S, dSa)) / ntot
            sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0
            # corrector
            T = [sigma * mu * Si - Xk - a @ c @ Si for Si, Xk, a, c in zip(Sinv, X, dXa, dSa)]
            dX, dy, dS = direction(T)
            ap, ad = steps(dX, dS)
        except np.linalg.LinAlgError:
            log.debug("iterate lost positive definiteness at iteration %d", it)
            break
        X = [Xk + ap * d for Xk, d in zip(X, dX)]
        y = y + ad * dy
        S = [Sk + ad * d for Sk, d in zip(S, dS)]

    value = 0.5 * (pobj + dobj) + sdp.offset
    return Solution(status=status, objective_value=value, y=y, duality_gap=gap, iterations=it,
                    primal_objective=dobj + sdp.offset, dual_objective=pobj + sdp.offset,
                    primal_infeasibility=pinf, dual_infeasibility=dinf,
                    gap_history=history, X=X)
