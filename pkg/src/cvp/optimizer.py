"""Optimal-potential problems over the solution set of the initial value problem.

Solutions are parametrized by their measure. For a candidate support S
(containing supp rho0 and I0, with L_S positive semidefinite) the admissible
measures form the polytope

    P_S = { rho_S : rho_S >= rho0_S,  L_S rho_S <= 1 },

with potential phi_S = 1 - L_S rho_S on S and a fixed off-support value.
Every point of P_S is a global minimizer for its potential, and every
solution arises this way, so each problem reduces to optimizing over a
finite union of polytopes:

  A  minimize the action -rho^T L rho      (concave: attained at vertices)
  B  minimize max phi                       (linear after an epigraph lift)
  C  maximize the volume 1^T rho            (linear: attained at vertices)
  D  on the optimal faces of C, maximize the action (convex QP)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import (
    DoesNotEncloseInitialData,
    IndefiniteSupportMatrix,
    NotAdmissible,
    SingularSupportMatrix,
    TooManyPoints,
    ValidationError,
)
from .inner import make_record
from .ivp import _initial, check_admissible
from .model import ACTION_TIE_TOL, EXACT_MAX_N, InitialData, ProblemInstance, SolutionRecord, unit_scale
from .polytope import affine_basis, affine_dimension, enumerate_vertices
from .qp import solve_qp

PROBLEMS = ("A", "B", "C", "D")
OFF_SUPPORT = 2.0


@dataclass(frozen=True, eq=False)
class SolutionPolytope:
    """Measures on ``support`` that solve the initial value problem (s = 1)."""

    support: tuple[int, ...]
    lagrangian: np.ndarray
    rho0: np.ndarray

    @property
    def A(self) -> np.ndarray:
        k = len(self.support)
        return np.vstack([-np.eye(k), self.lagrangian])

    @property
    def b(self) -> np.ndarray:
        return np.r_[-self.rho0, np.ones(len(self.support))]

    @cached_property
    def vertices(self) -> np.ndarray:
        if not self.support:
            return np.zeros((1, 0))
        return enumerate_vertices(self.A, self.b)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def potential(self, rho_s) -> np.ndarray:
        return 1.0 - self.lagrangian @ np.asarray(rho_s, dtype=float)

    def measure(self, phi_s) -> np.ndarray:
        """Inverse map phi_S -> rho_S (needs L_S invertible)."""
        return np.linalg.solve(self.lagrangian, 1.0 - np.asarray(phi_s, dtype=float))

    @property
    def potential_vertices(self) -> np.ndarray:
        return np.array([self.potential(v) for v in self.vertices])

    def potential_constraints(self):
        """(G, h) with G phi_S <= h describing the polytope in potential space."""
        Linv = np.linalg.inv(self.lagrangian)
        k = len(self.support)
        G = np.vstack([Linv, -np.eye(k)])
        h = np.r_[Linv @ np.ones(k) - self.rho0, np.zeros(k)]
        return G, h

    def contains(self, rho_s, tol: float = 1e-9) -> bool:
        return bool(np.all(self.A @ np.asarray(rho_s, dtype=float) <= self.b + tol))


def _core(init: InitialData) -> list[int]:
    return sorted(init.core)


def feasible_region(support, initial: InitialData | None, instance: ProblemInstance,
                    *, require_invertible: bool = True) -> SolutionPolytope:
    """Polytope of IVP solutions with the given support (after rescaling to s = 1)."""
    inst = unit_scale(instance.with_initial(_initial(instance, initial)))
    init = inst.initial
    S = tuple(sorted(set(int(i) for i in support)))
    if not set(_core(init)) <= set(S):
        raise DoesNotEncloseInitialData("support must contain supp rho0 and I0")
    LS = inst.lagrangian[np.ix_(S, S)]
    if S:
        w = np.linalg.eigvalsh(LS)
        if w[0] < -inst.psd_tol:
            raise IndefiniteSupportMatrix(f"L is not PSD on {S}")
        if require_invertible and w[0] <= inst.psd_tol:
            raise SingularSupportMatrix(f"L is singular on {S}")
    return SolutionPolytope(S, LS, init.rho0[list(S)])


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    problem: str
    optimum: float
    solutions: list[SolutionRecord]
    family_dim: int
    unique: bool
    family_vertices: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    family_basis: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    notes: tuple[str, ...] = ()


def candidate_polytopes(inst: ProblemInstance, init: InitialData) -> list[SolutionPolytope]:
    """All nonempty solution polytopes, for supports in a fixed order."""
    core = _core(init)
    free = [i for i in range(inst.n) if i not in set(core)]
    out = []
    for k in range(len(free) + 1):
        for extra in combinations(free, k):
            S = tuple(sorted(core + list(extra)))
            LS = inst.lagrangian[np.ix_(S, S)]
            if S and np.linalg.eigvalsh(LS)[0] < -inst.psd_tol:
                continue
            P = SolutionPolytope(S, LS, init.rho0[list(S)])
            if not P.is_empty:
                out.append(P)
    return out


def _embed(n, S, x):
    r = np.zeros(n)
    r[list(S)] = x
    return r


def _canonical_phi(inst, S, rho, off_value=OFF_SUPPORT):
    phi = np.full(inst.n, off_value)
    S = list(S)
    phi[S] = np.maximum(1.0 - (inst.lagrangian @ rho)[S], 0.0)
    return phi


def _null_clusters(P: SolutionPolytope, V: np.ndarray) -> int:
    """Largest affine dimension of a set of optimal vertices whose pairwise
    differences lie in the kernel of L_S (where the quadratic is constant)."""
    best = 0
    used = np.zeros(len(V), dtype=bool)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(P.lagrangian))))
    for i in range(len(V)):
        if used[i]:
            continue
        members = [j for j in range(len(V)) if np.max(np.abs(P.lagrangian @ (V[j] - V[i])), initial=0.0) <= tol]
        used[members] = True
        best = max(best, affine_dimension(V[members]))
    return best


def _epigraph_vertices(P: SolutionPolytope, objective_rows, zero_rows=()):
    """Vertices of {(rho, t) : rho in P, rho_Z = 0, t >= 1 - (L rho)_i (i in rows), 0 <= t <= 1}."""
    k = len(P.support)
    A = np.hstack([P.A, np.zeros((2 * k, 1))])
    rows = [A]
    b = [P.b]
    if objective_rows:
        rows.append(np.hstack([-P.lagrangian[list(objective_rows)], -np.ones((len(objective_rows), 1))]))
        b.append(-np.ones(len(objective_rows)))
    rows.append(np.r_[np.zeros(k), 1.0][None, :])
    b.append([1.0])
    rows.append(np.r_[np.zeros(k), -1.0][None, :])
    b.append([0.0])
    for z in zero_rows:
        e = np.zeros(k + 1)
        e[z] = 1.0
        rows.append(e[None, :])
        b.append([0.0])
    return enumerate_vertices(np.vstack(rows), np.concatenate([np.asarray(x, dtype=float) for x in b]))


def _candidates_B(inst, init, polys, scope, reverse):
    """(value, polytope, optimal-vertex array, off-support value) per candidate."""
    out = []
    full = tuple(range(inst.n))
    core0 = set(np.flatnonzero(init.rho0 > 0).tolist())
    for P in polys:
        if scope == "space":
            if P.support != full:
                # every point off S may carry potential 1, which bounds phi on S
                out.append((1.0, P, P.vertices, 1.0))
                continue
            zsets = [()]
        else:
            cand = [j for j, i in enumerate(P.support) if i in init.I0 and i not in core0]
            zsets = [z for k in range(len(cand) + 1) for z in combinations(cand, k)]
        for Z in zsets:
            obj = [j for j in range(len(P.support)) if j not in set(Z)]
            if reverse:
                V = P.vertices
                if Z:
                    V = V[np.all(np.abs(V[:, list(Z)]) <= 1e-12, axis=1)]
                if len(V) == 0:
                    continue
                vals = np.array([max((P.potential(v)[obj]).max(initial=0.0), 0.0) for v in V])
                out.append((-float(vals.max()), P, V[vals >= vals.max() - ACTION_TIE_TOL], OFF_SUPPORT))
                continue
            W = _epigraph_vertices(P, obj, Z)
            if len(W) == 0:
                continue
            t = W[:, -1]
            tmin = float(t.min())
            out.append((tmin, P, W[t <= tmin + ACTION_TIE_TOL, :-1], OFF_SUPPORT if scope == "support" else 1.0))
    return out


def optimize(problem: str, initial: InitialData | None, instance: ProblemInstance, *,
             b_scope: str = "space", reverse: bool = False, max_n: int = EXACT_MAX_N) -> OptimizationResult:
    """Solve one of the problems A-D by enumerating candidate supports.

    ``b_scope`` selects the points over which problem B takes the maximum of
    the potential: "space" (every point; off-support values may be lowered to
    1) or "support" (supp rho only). ``reverse`` flips the optimization
    direction of A, B and C.
    """
    problem = problem.upper()
    if problem not in PROBLEMS:
        raise ValidationError(f"unknown problem {problem!r}")
    if reverse and problem == "D":
        raise ValidationError("problem D has no reversed form")
    if reverse and problem == "B" and b_scope == "space":
        raise ValidationError("reversed B is unbounded when off-support potential is free")
    if b_scope not in ("space", "support"):
        raise ValidationError(f"unknown B scope {b_scope!r}")
    if instance.n > max_n:
        raise TooManyPoints(instance.n, max_n)
    s = instance.s
    init0 = _initial(instance, initial)
    rep = check_admissible(init0, instance)
    if not rep.admissible:
        raise NotAdmissible(rep)
    inst = unit_scale(instance.with_initial(init0))
    init = inst.initial
    n = inst.n
    polys = candidate_polytopes(inst, init)
    notes: list[str] = []

    # (value to minimize, polytope, optimal vertices in local coordinates, off-support potential)
    cands = []
    if problem in ("A", "C", "D"):
        for P in polys:
            V = P.vertices
            if problem == "A":
                if reverse:
                    # maximize the action: a convex QP over the polytope
                    x = V[0]
                    if P.support:
                        x = solve_qp(2 * P.lagrangian, np.zeros(len(P.support)), P.A, P.b, x0=x)
                    vals, V = np.array([x @ P.lagrangian @ x]), x[None, :]
                else:
                    vals = -np.einsum("ij,jk,ik->i", V, P.lagrangian, V)
            else:
                vals = V.sum(axis=1) if reverse else -V.sum(axis=1)
            m = float(vals.min())
            cands.append((m, P, V[vals <= m + ACTION_TIE_TOL], OFF_SUPPORT))
    else:
        cands = _candidates_B(inst, init, polys, b_scope, reverse)
        if b_scope == "space":
            notes.append("B takes the maximum of phi over all points; off-support potential is reported as 1")
        else:
            notes.append("B takes the maximum of phi over supp rho; off-support potential is canonicalized to 2")

    best = min(c[0] for c in cands)
    winners = [c for c in cands if c[0] <= best + ACTION_TIE_TOL]

    if problem == "D":
        volume = -best
        dcands = []
        for _, P, V, off in winners:
            k = len(P.support)
            if k == 0:
                dcands.append((0.0, P, V, off))
                continue
            x = solve_qp(2 * P.lagrangian, np.zeros(k), P.A, P.b, np.ones((1, k)), [volume], x0=V[0])
            val = float(x @ P.lagrangian @ x)
            E = np.vstack([np.ones((1, k)), P.lagrangian])
            face = enumerate_vertices(P.A, P.b, E, np.r_[volume, P.lagrangian @ x])
            if len(face) == 0:
                face = x[None, :]
            dcands.append((val, P, face, off))
        best_d = min(c[0] for c in dcands)
        winners = [c for c in dcands if c[0] <= best_d + ACTION_TIE_TOL]
        optimum = -best_d * s * s
        notes.append(f"maximal volume {volume * s!r}")
    elif problem == "A":
        optimum = (-best if reverse else best) * s * s
    elif problem == "C":
        optimum = (best if reverse else -best) * s
    else:
        optimum = (-best if reverse else best) * s

    # family description
    family_dim = 0
    for _, P, V, _off in winners:
        d = _null_clusters(P, V) if problem == "A" else affine_dimension(V)
        family_dim = max(family_dim, d)
    verts, recs = [], []
    for _, P, V, off in winners:
        for v in V:
            rho = _embed(n, P.support, v)
            if any(np.max(np.abs(rho - r), initial=0.0) <= 1e-9 for r in verts):
                continue
            verts.append(rho)
            phi = _canonical_phi(inst, P.support, rho, off)
            recs.append(make_record(rho * s, phi * s, instance, family_dim=family_dim))
    order = sorted(range(len(recs)), key=lambda i: (recs[i].support, tuple(np.round(recs[i].rho, 12))))
    recs = [recs[i] for i in order]
    verts = np.array([verts[i] for i in order]) * s
    basis = affine_basis(verts) if family_dim > 0 else np.zeros((n, 0))
    if family_dim > 0 and problem == "B":
        phis = np.array([r.phi for r in recs])
        for i in range(n):
            lo, hi = float(phis[:, i].min()), float(phis[:, i].max())
            if hi - lo > 1e-12:
                notes.append(f"potential at {inst.space.labels[i]} ranges over [{lo!r}, {hi!r}] on the optimal face")
    unique = len(recs) == 1 and family_dim == 0
    return OptimizationResult(problem, float(optimum), recs, int(family_dim), bool(unique), verts, basis, tuple(notes))
