"""Minimization of the inner action over nonnegative measures.

Exact route: enumerate supports, solve the stationarity system on each one
and keep the feasible candidates of least action. Iterative route: projected
gradient descent from several starting points.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import pmap
from .errors import DimensionMismatch, NotConverged, NuNotInK, NuZero, TooManyPoints
from .model import (
    ACTION_TIE_TOL,
    EL_TOL_EXACT,
    EL_TOL_ITERATIVE,
    EXACT_MAX_N,
    SUPPORT_EPS,
    ProblemInstance,
    SolutionRecord,
    action_value,
    as_potential,
    el_residuals,
    min_eig_on,
    support,
)
from .polytope import implicit_equalities, max_min_slack

FEAS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SupportSolution:
    support: tuple[int, ...]
    rho: np.ndarray
    family_dim: int
    feasible: bool
    consistent: bool = True
    family_basis: np.ndarray | None = None

    @property
    def rho_on_support(self) -> np.ndarray:
        return self.rho[list(self.support)]


def resolve_potential(instance: ProblemInstance, phi=None) -> np.ndarray:
    if phi is None:
        phi = instance.potential if instance.potential is not None else np.zeros(instance.n)
    return as_potential(phi, instance.n)


def _el_tol(instance, exact=True) -> float:
    return (EL_TOL_EXACT if exact else EL_TOL_ITERATIVE) * max(1.0, instance.s)


def _solve_support(instance, phi, S, eig=None) -> SupportSolution:
    L, s, n = instance.lagrangian, instance.s, instance.n
    S = list(S)
    LS = L[np.ix_(S, S)]
    b = s - phi[S]
    w, V = eig if eig is not None else np.linalg.eigh(LS)
    rtol = instance.psd_tol
    keep = np.abs(w) > rtol
    Vr = V[:, keep]
    rs = Vr @ ((Vr.T @ b) / w[keep])
    N = V[:, ~keep]
    tol = _el_tol(instance)
    consistent = bool(np.max(np.abs(LS @ rs - b)) <= tol)
    off = [j for j in range(n) if j not in set(S)]
    rho = np.zeros(n)

    def assemble(x):
        r = np.zeros(n)
        r[S] = np.where(x > 0, x, 0.0)
        return r

    if not consistent:
        rho[S] = rs
        return SupportSolution(tuple(S), rho, 0, False, False)

    # constraints G c <= h on null-space coordinates c
    Loff = L[np.ix_(off, S)]
    G = np.vstack([-N, -(Loff @ N)])
    h = np.r_[rs, Loff @ rs + phi[off] - s]
    slack = h  # at c = 0
    k = N.shape[1]
    part_ok = bool(np.all(rs >= -FEAS_TOL) and np.all(slack[len(S):] >= -tol))
    if k == 0:
        return SupportSolution(tuple(S), assemble(rs), 0, part_ok)

    if part_ok:
        x = rs
    else:
        t, c = max_min_slack(G, h)
        if t is None or t < -FEAS_TOL:
            rho[S] = rs
            return SupportSolution(tuple(S), rho, 0, False)
        x = rs + N @ c
    t, _ = max_min_slack(G, h)
    if t is not None and t > 1e-9:
        dim, basis = k, N
    else:
        eq = implicit_equalities(G, h)
        Ge = G[eq]
        if Ge.shape[0] == 0:
            dim, basis = k, N
        else:
            _, sv, Vt = np.linalg.svd(Ge)
            r = int(np.sum(sv > 1e-9 * max(1.0, sv[0])))
            dim = k - r
            basis = N @ Vt[r:].T
    full_basis = np.zeros((n, dim))
    full_basis[S, :] = basis
    return SupportSolution(tuple(S), assemble(x), dim, True, True, full_basis)


def solve_on_support(instance: ProblemInstance, phi, support_idx) -> SupportSolution:
    """Solve L_S rho_S = s - phi_S and test feasibility of the assembled measure.

    For singular L_S the minimum-norm particular solution is used (or any
    feasible member of the solution family) and the dimension of the feasible
    family is reported.
    """
    phi = resolve_potential(instance, phi)
    S = sorted(set(int(i) for i in support_idx))
    if not S or S[0] < 0 or S[-1] >= instance.n:
        raise DimensionMismatch("support must be a nonempty subset of the point indices")
    return _solve_support(instance, phi, S)


def canonicalize_potential(rho, phi, instance: ProblemInstance) -> np.ndarray:
    """Keep phi on supp rho and set it to 2s elsewhere."""
    phi = np.array(phi, dtype=float)
    out = np.full(instance.n, 2.0 * instance.s)
    supp = list(support(rho))
    out[supp] = phi[supp]
    return out


def verify_global_minimizer(rho, phi, instance: ProblemInstance, tol: float | None = None) -> bool:
    """Sufficient test: EL residual small, L PSD on the support, and the
    support equals {phi <= s}."""
    tol = _el_tol(instance) if tol is None else tol
    _, sup, lam = el_residuals(rho, phi, instance)
    if sup > tol or lam < -instance.psd_tol:
        return False
    level = set(int(i) for i in np.flatnonzero(np.asarray(phi) <= instance.s))
    return level == set(support(rho))


def make_record(rho, phi, instance: ProblemInstance, *, exact: bool = True, family_dim: int = 0,
                family_basis=None, converged: bool = True, certify: bool | None = None, notes=()) -> SolutionRecord:
    rho = np.asarray(rho, dtype=float).copy()
    rho[rho <= SUPPORT_EPS] = 0.0
    phi = np.asarray(phi, dtype=float).copy()
    _, sup, lam = el_residuals(rho, phi, instance)
    tol = _el_tol(instance, exact)
    if certify is None:
        certify = verify_global_minimizer(rho, canonicalize_potential(rho, phi, instance), instance, tol)
    certified = bool(certify and sup <= tol and lam >= -instance.psd_tol)
    return SolutionRecord(
        rho=rho,
        phi=phi,
        action=action_value(rho, phi, instance),
        el_sup_residual=sup,
        psd_min_eigenvalue=lam,
        degeneracy_dim=int(family_dim),
        certified_global=certified,
        family_basis=family_basis,
        converged=converged,
        notes=tuple(notes),
    )


def sort_key(rec: SolutionRecord):
    supp = rec.support
    return (len(supp), supp, tuple(np.round(rec.rho, 12)))


def dedupe(records, tol: float = 1e-9):
    out = []
    for r in records:
        if not any(np.max(np.abs(r.rho - q.rho)) <= tol * max(1.0, np.max(np.abs(q.rho))) for q in out):
            out.append(r)
    return out


def _candidate(instance, phi, mask_bits):
    S = mask_bits
    LS = instance.lagrangian[np.ix_(S, S)]
    w, V = np.linalg.eigh(LS)
    if w[0] < -instance.psd_tol:
        return None
    sol = _solve_support(instance, phi, S, (w, V))
    if not sol.feasible:
        return None
    return sol


def minimize_exact(instance: ProblemInstance, phi=None, *, max_n: int = EXACT_MAX_N) -> list[SolutionRecord]:
    """All global minimizers, by enumeration of the 2^n - 1 supports plus rho = 0.

    Supports on which L is not positive semidefinite are skipped: a global
    minimizer always has a PSD restriction. Records are sorted by support and
    then by weights.
    """
    n = instance.n
    if n > max_n:
        raise TooManyPoints(n, max_n)
    phi = resolve_potential(instance, phi)
    subsets = [[i for i in range(n) if m >> i & 1] for m in range(1, 1 << n)]
    subsets.sort(key=lambda S: (len(S), S))
    sols = [x for x in pmap(lambda S: _candidate(instance, phi, S), subsets) if x is not None]
    cands = [(0.0, SupportSolution((), np.zeros(n), 0, bool(np.all(phi >= instance.s - _el_tol(instance)))))]
    cands += [(action_value(x.rho, phi, instance), x) for x in sols]
    cands = [(a, x) for a, x in cands if x.feasible]
    best = min(a for a, _ in cands)
    chosen = [x for a, x in cands if a <= best + ACTION_TIE_TOL]
    recs = [make_record(x.rho, phi, instance, family_dim=x.family_dim, family_basis=x.family_basis) for x in chosen]
    return sorted(dedupe(recs), key=sort_key)


@dataclass(frozen=True)
class IterativeConfig:
    restarts: int = 8
    max_iters: int = 100_000
    tol: float = 1e-10
    seed: int = 0


def minimize_iterative(instance: ProblemInstance, phi=None, config: IterativeConfig = IterativeConfig(),
                       *, strict: bool = False) -> SolutionRecord:
    """Projected gradient descent on the nonnegative orthant.

    Starts from rho = 0, the uniform vector and ``config.restarts`` random
    vectors, all iterated together. A later start replaces the incumbent only
    if it lowers the action by more than the tie tolerance.
    """
    L, s, n = instance.lagrangian, instance.s, instance.n
    phi = resolve_potential(instance, phi)
    eigs = np.linalg.eigvalsh(L)
    norm = float(max(abs(eigs[0]), abs(eigs[-1])))
    step = 1.0 / (2.0 * norm)
    rng = np.random.default_rng(config.seed)

    def scaled(u):
        m = float(np.max(L @ u))
        return u * (s / m) if m > 0 else u

    starts = [np.zeros(n), scaled(np.ones(n))] + [scaled(rng.random(n)) for _ in range(config.restarts)]
    R = np.array(starts).T
    c = (phi - s)[:, None]
    active = np.ones(R.shape[1], dtype=bool)
    done = np.zeros(R.shape[1], dtype=bool)
    for _ in range(config.max_iters):
        idx = np.flatnonzero(active)
        if len(idx) == 0:
            break
        X = R[:, idx]
        G = 2.0 * (L @ X + c)
        Xn = np.maximum(X - step * G, 0.0)
        pg = np.linalg.norm((X - Xn) / step, axis=0)
        conv = pg <= config.tol
        R[:, idx] = np.where(conv, X, Xn)
        done[idx[conv]] = True
        active[idx[conv]] = False
    best = 0
    acts = [action_value(R[:, j], phi, instance) for j in range(R.shape[1])]
    for j in range(1, R.shape[1]):
        if acts[j] < acts[best] - ACTION_TIE_TOL:
            best = j
    rho = R[:, best]
    convex = eigs[0] >= -instance.psd_tol
    _, sup, _ = el_residuals(np.where(rho > SUPPORT_EPS, rho, 0.0), phi, instance)
    rec = make_record(rho, phi, instance, exact=False, converged=bool(done[best]),
                      certify=bool(convex and sup <= _el_tol(instance, False)))
    if strict and not rec.converged:
        raise NotConverged("projected gradient did not reach the stopping tolerance", rec)
    return rec


def localize(rho, phi, subset, instance: ProblemInstance):
    """Restrict rho to ``subset`` and fold the removed mass into the potential."""
    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    mask = np.zeros(instance.n, dtype=bool)
    mask[list(subset)] = True
    inside = np.where(mask, rho, 0.0)
    outside = rho - inside
    return inside, phi + instance.lagrangian @ outside


def extended_positivity_check(rho, phi, nu, instance: ProblemInstance, tol: float | None = None):
    """Nonnegativity of the quadratic form on L^2(rho) extended by one
    direction carried by nu. Returns (nonnegative, min_eigenvalue)."""
    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (instance.n,):
        raise DimensionMismatch("nu must match the point space")
    mass = float(np.sum(nu))
    if not np.any(nu > 0) or mass <= 0:
        raise NuZero("nu must be a nonzero measure")
    tol = _el_tol(instance) if tol is None else tol
    L = instance.lagrangian
    resid = L @ rho + phi - instance.s
    K = set(np.flatnonzero(np.abs(resid) <= tol).tolist())
    supp = list(support(rho))
    allowed = K - set(supp)
    if not set(support(nu)) <= allowed:
        raise NuNotInK("supp nu must lie in K minus supp rho")
    cols = [rho[i] * np.eye(instance.n)[i] for i in supp] + [nu]
    B = np.array(cols).T
    g = np.array([rho[i] for i in supp] + [mass])
    Q = B.T @ L @ B / np.sqrt(np.outer(g, g))
    lam = float(np.linalg.eigvalsh(Q)[0])
    return bool(lam >= -instance.psd_tol), lam
