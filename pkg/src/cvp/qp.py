"""Primal active-set method for small dense convex quadratic programs

    minimize 1/2 x^T H x + g^T x   subject to  A x <= b,  E x = e

with H positive semidefinite and a feasible starting point supplied.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import null_space


class QPError(RuntimeError):
    pass


def _independent(rows: np.ndarray, cand: np.ndarray, tol: float = 1e-9) -> bool:
    if rows.shape[0] == 0:
        return np.linalg.norm(cand) > tol
    r = np.linalg.matrix_rank(np.vstack([rows, cand]), tol=tol)
    return r > np.linalg.matrix_rank(rows, tol=tol)


def solve_qp(H, g, A, b, E=None, e=None, x0=None, tol: float = 1e-10, max_iter: int = 1000):
    H = np.asarray(H, dtype=float)
    g = np.asarray(g, dtype=float)
    n = H.shape[0]
    A = np.zeros((0, n)) if A is None else np.atleast_2d(np.asarray(A, dtype=float))
    b = np.zeros(0) if b is None else np.asarray(b, dtype=float)
    E = np.zeros((0, n)) if E is None else np.atleast_2d(np.asarray(E, dtype=float))
    x = np.array(x0, dtype=float)
    scale = 1.0 + float(np.max(np.abs(H), initial=0.0))

    W: list[int] = []
    for i in np.flatnonzero(np.abs(A @ x - b) <= 1e-9):
        if _independent(np.vstack([E, A[W]]), A[i]):
            W.append(int(i))

    for _ in range(max_iter):
        grad = H @ x + g
        C = np.vstack([E, A[W]])
        Z = null_space(C) if C.shape[0] else np.eye(n)
        p = np.zeros(n)
        ray = False
        if Z.shape[1]:
            Hz = Z.T @ H @ Z
            rz = Z.T @ grad
            w, U = np.linalg.eigh(Hz)
            pos = w > 1e-12 * scale
            ur = U.T @ rz
            if np.any(np.abs(ur[~pos]) > tol * scale):
                # flat descent direction: follow it to the first blocking constraint
                p = -Z @ (U[:, ~pos] @ ur[~pos])
                ray = True
            else:
                p = -Z @ (U[:, pos] @ (ur[pos] / w[pos]))
        if np.linalg.norm(p) <= tol * (1.0 + np.linalg.norm(x)):
            if not W:
                return x
            mu = np.linalg.lstsq(C.T, -grad, rcond=None)[0][E.shape[0]:]
            j = int(np.argmin(mu))
            if mu[j] >= -tol * scale:
                return x
            W.pop(j)
            continue
        Ap = A @ p
        alpha = np.inf if ray else 1.0
        block = None
        for i in range(A.shape[0]):
            if i in W or Ap[i] <= 1e-14:
                continue
            a = (b[i] - A[i] @ x) / Ap[i]
            if a < alpha:
                alpha, block = max(a, 0.0), i
        if not np.isfinite(alpha):
            raise QPError("problem is unbounded below")
        x = x + alpha * p
        if block is not None:
            W.append(block)
    raise QPError("active-set iteration limit reached")
