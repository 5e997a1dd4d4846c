"""Dependent and definite sets, solution germs and the maximal optimal solution."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import null_space

from ._parallel import pmap
from .errors import DoesNotEncloseInitialData, NoDependentSet, NoGerms, TooManyPoints
from .ivp import _initial
from .model import EL_TOL_EXACT, EXACT_MAX_N, InitialData, ProblemInstance, min_eig_on, unit_scale
from .optimizer import candidate_polytopes, optimize

SUBSET_ENUM_MAX_N = EXACT_MAX_N


@dataclass(frozen=True)
class DependenceCertificate:
    subset: frozenset
    constrained_min_eig: float
    certified_dependent: bool


@dataclass(frozen=True)
class DefiniteCertificate:
    subset: frozenset
    min_eig: float
    lrho_max: float
    vertices_checked: int
    definite: bool
    scope: str = "all solution polytope vertices on the subset"


@dataclass(frozen=True, eq=False)
class SolutionGerm:
    subset: frozenset
    rho: np.ndarray
    volume: float


def constrained_quadratic_min(subset, anchor, instance: ProblemInstance) -> float:
    """Least eigenvalue of mu -> mu^T L mu on unit mu supported on ``subset``
    with (L mu)_i = 0 for i in ``anchor``; +inf when only mu = 0 qualifies."""
    S = sorted(set(subset))
    A = sorted(set(anchor))
    L = instance.lagrangian
    if not S:
        return float("inf")
    if A:
        rows = L[np.ix_(A, S)]
        Z = null_space(rows, rcond=1e-12)
    else:
        Z = np.eye(len(S))
    if Z.shape[1] == 0:
        return float("inf")
    Q = Z.T @ L[np.ix_(S, S)] @ Z
    return float(np.linalg.eigvalsh((Q + Q.T) / 2)[0])


def _check_encloses(subset, init: InitialData):
    if not init.core <= frozenset(subset):
        raise DoesNotEncloseInitialData("subset must contain supp rho0 and I0")


def certify_dependent(subset, initial: InitialData | None, instance: ProblemInstance) -> DependenceCertificate:
    """Sufficient criterion: the quadratic form is positive on the anchored subspace."""
    init = _initial(instance, initial)
    _check_encloses(subset, init)
    lam = constrained_quadratic_min(subset, init.core, instance)
    return DependenceCertificate(frozenset(subset), lam, bool(lam > instance.psd_tol))


def _enclosing_subsets(n, core):
    free = [i for i in range(n) if i not in core]
    for k in range(len(free), -1, -1):
        for extra in combinations(free, k):
            yield frozenset(core) | frozenset(extra)


def maximal_dependent_sets(initial: InitialData | None, instance: ProblemInstance,
                           *, max_n: int = SUBSET_ENUM_MAX_N) -> list[frozenset]:
    """Inclusion-maximal certified dependent sets, sorted by size then content.

    Certification is inherited by enclosing subsets, so sets below a known
    maximal one need not be evaluated.
    """
    if instance.n > max_n:
        raise TooManyPoints(instance.n, max_n)
    init = _initial(instance, initial)
    core = init.core
    found: list[frozenset] = []
    by_size: dict[int, list[frozenset]] = {}
    for S in _enclosing_subsets(instance.n, core):
        by_size.setdefault(len(S), []).append(S)
    for size in sorted(by_size, reverse=True):
        todo = [S for S in by_size[size] if not any(S <= M for M in found)]
        certs = pmap(lambda S: certify_dependent(S, init, instance).certified_dependent, todo)
        found.extend(S for S, ok in zip(todo, certs) if ok)
    return sorted(found, key=lambda S: (-len(S), sorted(S)))


def domain_of_dependence(initial: InitialData | None, instance: ProblemInstance,
                         *, max_n: int = SUBSET_ENUM_MAX_N) -> frozenset:
    sets = maximal_dependent_sets(initial, instance, max_n=max_n)
    if not sets:
        raise NoDependentSet("no enclosing subset is certified dependent")
    out = sets[0]
    for S in sets[1:]:
        out = out & S
    return frozenset(out)


def definite_certificate(subset, initial: InitialData | None, instance: ProblemInstance) -> DefiniteCertificate:
    """Definiteness: L positive definite on the subset, and L rho <= s there for
    every solution of the initial value problem inside the subset.

    When L_J is positive definite every solution measure lies in one of the
    finitely many solution polytopes, and (L rho)_x is affine on each, so
    checking the vertices covers all solutions.
    """
    init = _initial(instance, initial)
    _check_encloses(subset, init)
    J = sorted(set(subset))
    lam = min_eig_on(instance.lagrangian, J)
    if not J:
        return DefiniteCertificate(frozenset(), lam, 0.0, 0, True)
    if not lam > instance.psd_tol:
        return DefiniteCertificate(frozenset(J), lam, float("nan"), 0, False)
    sub = unit_scale(instance.restrict(J).with_initial(None))
    pos = {g: k for k, g in enumerate(J)}
    sub_init = InitialData(init.rho0[J] / instance.s, frozenset(pos[i] for i in init.I0))
    worst = -np.inf
    count = 0
    for P in candidate_polytopes(sub, sub_init):
        off = [k for k in range(len(J)) if k not in set(P.support)]
        for v in P.vertices:
            rho = np.zeros(len(J))
            rho[list(P.support)] = v
            count += 1
            if off:
                worst = max(worst, float(np.max(sub.lagrangian[off] @ rho)))
            else:
                worst = max(worst, float(np.max(sub.lagrangian @ rho)))
    ok = count > 0 and worst <= 1.0 + EL_TOL_EXACT
    return DefiniteCertificate(frozenset(J), lam, worst, count, bool(ok))


def certify_definite(subset, initial: InitialData | None, instance: ProblemInstance) -> bool:
    return definite_certificate(subset, initial, instance).definite


def _d_optimum(J, init, instance):
    sub = instance.restrict(J).with_initial(None)
    pos = {g: k for k, g in enumerate(J)}
    sub_init = InitialData(init.rho0[J], frozenset(pos[i] for i in init.I0))
    res = optimize("D", sub_init, sub)
    rho = np.zeros(instance.n)
    rho[J] = res.solutions[0].rho
    return rho


def solution_germs(initial: InitialData | None, instance: ProblemInstance,
                   *, max_n: int = SUBSET_ENUM_MAX_N) -> list[SolutionGerm]:
    """Definite sets with their (D)-optimal measures, kept when every other
    candidate of at least the same volume dominates the measure pointwise."""
    if instance.n > max_n:
        raise TooManyPoints(instance.n, max_n)
    init = _initial(instance, initial)
    cands = []
    for S in _enclosing_subsets(instance.n, init.core):
        J = sorted(S)
        if not certify_definite(S, init, instance):
            continue
        rho = _d_optimum(J, init, instance) if J else np.zeros(instance.n)
        cands.append(SolutionGerm(frozenset(J), rho, float(rho.sum())))
    tol = 1e-9
    germs = []
    for g in cands:
        ok = all(
            np.all(h.rho >= g.rho - tol)
            for h in cands
            if h is not g and h.volume >= g.volume - tol
        )
        if ok:
            germs.append(g)
    return sorted(germs, key=lambda g: (g.volume, len(g.subset), sorted(g.subset)))


def maximal_optimal_solution(initial: InitialData | None, instance: ProblemInstance) -> np.ndarray:
    germs = solution_germs(initial, instance)
    if not germs:
        raise NoGerms("no solution germs")
    return germs[-1].rho
