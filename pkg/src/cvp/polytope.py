"""Bounded polytopes {x : A x <= b, E x = e}: vertex enumeration by the
double description method, plus small LP-based utilities."""
from __future__ import annotations

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

ZERO_TOL = 1e-9


class UnboundedPolytope(ValueError):
    pass


def _rank(M: np.ndarray, tol: float = 1e-9) -> int:
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > tol * max(1.0, sv[0])))


def affine_dimension(points, tol: float = 1e-9) -> int:
    """Dimension of the affine hull of a finite point set (-1 if empty)."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] == 0:
        return -1
    D = P[1:] - P[0]
    if D.shape[0] == 0:
        return 0
    sv = np.linalg.svd(D, compute_uv=False)
    scale = max(1.0, float(np.max(np.abs(P))))
    return int(np.sum(sv > tol * scale))


def affine_basis(points, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (as columns) of the direction space of the affine hull."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    d = P.shape[1]
    if P.shape[0] < 2:
        return np.zeros((d, 0))
    D = P[1:] - P[0]
    U, sv, Vt = np.linalg.svd(D, full_matrices=False)
    scale = max(1.0, float(np.max(np.abs(P))))
    k = int(np.sum(sv > tol * scale))
    B = Vt[:k].T
    # fix signs so the output is deterministic
    for j in range(B.shape[1]):
        piv = int(np.argmax(np.abs(B[:, j]) > 1e-12))
        if B[piv, j] < 0:
            B[:, j] = -B[:, j]
    return B


def _initial_rows(M: np.ndarray, tol: float) -> list[int]:
    """Greedy choice of linearly independent rows spanning the row space."""
    chosen: list[int] = []
    basis = np.zeros((0, M.shape[1]))
    for i, row in enumerate(M):
        r = row - basis.T @ (basis @ row) if len(basis) else row.copy()
        nr = np.linalg.norm(r)
        if nr > tol:
            chosen.append(i)
            basis = np.vstack([basis, r / nr])
            if len(chosen) == M.shape[1]:
                break
    return chosen


def _double_description(M: np.ndarray, tol: float) -> np.ndarray:
    """Extreme rays of the pointed cone {y : M y <= 0}; rows of M normalized."""
    d = M.shape[1]
    K = _initial_rows(M, 1e-7)
    if len(K) < d:
        raise UnboundedPolytope("cone is not pointed")
    inv = np.linalg.inv(M[K])
    rays = [-inv[:, j] / np.linalg.norm(inv[:, j]) for j in range(d)]
    processed = list(K)
    # zero sets as python sets of processed row indices
    zsets = [set(k for k in K if abs(M[k] @ r) <= tol) for r in rays]
    for i in range(M.shape[0]):
        if i in K:
            continue
        a = M[i]
        vals = [float(a @ r) for r in rays]
        pos = [j for j, v in enumerate(vals) if v > tol]
        neg = [j for j, v in enumerate(vals) if v < -tol]
        zer = [j for j, v in enumerate(vals) if abs(v) <= tol]
        new_rays, new_z = [], []
        for p in pos:
            for q in neg:
                common = zsets[p] & zsets[q]
                if len(common) < d - 2:
                    continue
                adjacent = True
                for j in range(len(rays)):
                    if j != p and j != q and common <= zsets[j]:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                r = vals[p] * rays[q] - vals[q] * rays[p]
                r = r / np.linalg.norm(r)
                new_rays.append(r)
                new_z.append(common | {i})
        keep = neg + zer
        rays = [rays[j] for j in keep] + new_rays
        zsets = [zsets[j] | ({i} if j in zer else set()) for j in keep] + new_z
        processed.append(i)
    return np.array(rays) if rays else np.zeros((0, d))


def _normalize(A, b):
    norms = np.linalg.norm(A, axis=1)
    keep = norms > 1e-14
    if np.any(~keep) and np.any(b[~keep] < -ZERO_TOL):
        return None
    A, b, norms = A[keep], b[keep], norms[keep]
    return A / norms[:, None], b / norms


def _is_empty(A, b) -> bool:
    res = linprog(np.zeros(A.shape[1]), A_ub=A, b_ub=b, bounds=[(None, None)] * A.shape[1], method="highs")
    return res.status == 2


def enumerate_vertices(A, b, A_eq=None, b_eq=None, tol: float = ZERO_TOL) -> np.ndarray:
    """Vertices of the bounded polytope {x : A x <= b, A_eq x = b_eq}.

    Rows of the result are sorted lexicographically. Raises
    UnboundedPolytope if the set is nonempty and unbounded.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    n = A.shape[1]
    x0 = np.zeros(n)
    N = np.eye(n)
    if A_eq is not None and len(A_eq):
        E = np.atleast_2d(np.asarray(A_eq, dtype=float))
        e = np.asarray(b_eq, dtype=float).ravel()
        x0 = np.linalg.lstsq(E, e, rcond=None)[0]
        if np.max(np.abs(E @ x0 - e), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(e), initial=0.0)):
            return np.zeros((0, n))
        N = null_space(E)
    Ar = A @ N
    br = b - A @ x0
    d = N.shape[1]
    if d == 0:
        pts = x0[None, :] if np.all(br >= -tol) else np.zeros((0, n))
        return pts
    norm = _normalize(Ar, br)
    if norm is None:
        return np.zeros((0, n))
    Ar, br = norm
    M = np.hstack([Ar, -br[:, None]])
    M = np.vstack([M, np.r_[np.zeros(d), -1.0]])
    try:
        rays = _double_description(M, tol)
    except UnboundedPolytope:
        if _is_empty(Ar, br):
            return np.zeros((0, n))
        raise
    verts = []
    for r in rays:
        if r[-1] > tol:
            verts.append(r[:d] / r[-1])
        elif np.linalg.norm(r[:d]) > tol:
            raise UnboundedPolytope("polytope has a recession direction")
    out = []
    for y in verts:
        y = _polish(Ar, br, y, tol)
        if np.all(Ar @ y <= br + 1e-7):
            out.append(x0 + N @ y)
    return _unique_rows(np.array(out) if out else np.zeros((0, n)))


def _polish(A, b, y, tol):
    """Re-solve the active constraints to clean up accumulated roundoff."""
    act = np.abs(A @ y - b) <= 1e-7
    if np.sum(act) >= len(y) and _rank(A[act]) == len(y):
        z = np.linalg.lstsq(A[act], b[act], rcond=None)[0]
        if np.all(np.abs(z - y) <= 1e-6 * max(1.0, np.max(np.abs(y)))):
            return z
    return y


def _unique_rows(P: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if len(P) == 0:
        return P
    P = P[np.lexsort(np.round(P, 9).T[::-1])]
    keep = [P[0]]
    for row in P[1:]:
        if not any(np.max(np.abs(row - k)) <= tol * max(1.0, np.max(np.abs(k))) for k in keep):
            keep.append(row)
    P = np.array(keep)
    # snap tiny values so output is deterministic
    P[np.abs(P) < 1e-15] = 0.0
    return P


def vertices_bruteforce(A, b, tol: float = 1e-9) -> np.ndarray:
    """Reference enumeration: solve every square subsystem of active rows."""
    from itertools import combinations

    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    n = A.shape[1]
    out = []
    for rows in combinations(range(A.shape[0]), n):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ x <= b + tol):
            out.append(x)
    return _unique_rows(np.array(out) if out else np.zeros((0, n)))


def max_min_slack(G, h, bound: float = 1e6):
    """Maximize t subject to G c + t <= h, t <= 1. Returns (t, c) or (None, None)."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float)
    k = G.shape[1]
    A = np.hstack([G, np.ones((G.shape[0], 1))])
    c = np.zeros(k + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=A, b_ub=h, bounds=[(-bound, bound)] * k + [(None, 1.0)], method="highs")
    if res.status != 0:
        return None, None
    return float(res.x[-1]), res.x[:k]


def implicit_equalities(G, h, tol: float = 1e-9, bound: float = 1e6) -> np.ndarray:
    """Boolean mask of rows of G c <= h that hold with equality on the whole
    (nonempty) feasible set."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float)
    m, k = G.shape
    undecided = np.ones(m, dtype=bool)
    while undecided.any():
        idx = np.flatnonzero(undecided)
        # variables: c (k), y (len(idx)); G c + y_sel <= h; maximize sum y
        Y = np.zeros((m, len(idx)))
        Y[idx, np.arange(len(idx))] = 1.0
        A = np.hstack([G, Y])
        cost = np.r_[np.zeros(k), -np.ones(len(idx))]
        res = linprog(cost, A_ub=A, b_ub=h, bounds=[(-bound, bound)] * k + [(0.0, 1.0)] * len(idx), method="highs")
        if res.status != 0:
            break
        y = res.x[k:]
        slack = h - G @ res.x[:k]
        positive = idx[(y > tol) | (slack[idx] > tol)]
        if len(positive) == 0:
            break
        undecided[positive] = False
    return undecided
