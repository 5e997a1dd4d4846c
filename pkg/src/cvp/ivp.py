"""Admissibility of initial data and the initial value problem for a given
external potential."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotAdmissible
from .inner import make_record, minimize_exact, resolve_potential
from .model import (
    EL_TOL_EXACT,
    EXACT_MAX_N,
    SUPPORT_EPS,
    InitialData,
    ProblemInstance,
    SolutionRecord,
    min_eig_on,
    support,
)
from .polytope import max_min_slack


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    lrho0_max: float
    psd_min_eig: float
    violating_index: int | None = None


def _initial(instance: ProblemInstance, initial: InitialData | None) -> InitialData:
    init = initial if initial is not None else instance.initial
    if init is None:
        return InitialData.empty(instance.n)
    if init.rho0.shape != (instance.n,) or any(i >= instance.n for i in init.I0):
        raise DimensionMismatch("initial data does not match the point space")
    return init


def check_admissible(initial: InitialData | None, instance: ProblemInstance) -> AdmissibilityReport:
    """L rho0 <= s on supp rho0 and I0, and L PSD there."""
    init = _initial(instance, initial)
    core = sorted(init.core)
    lr = instance.lagrangian @ init.rho0
    s = instance.s
    lmax = float(np.max(lr[core])) if core else 0.0
    lam = min_eig_on(instance.lagrangian, core)
    tol = EL_TOL_EXACT * max(1.0, s)
    bad = [i for i in core if lr[i] > s + tol]
    ok = lmax <= s + tol and lam >= -instance.psd_tol
    return AdmissibilityReport(bool(ok), lmax / s, lam, bad[0] if bad else None)


def is_totally_spacelike(subset, instance: ProblemInstance, eps: float = 0.0) -> bool:
    idx = sorted(set(subset))
    L = instance.lagrangian
    return all(L[i, j] <= eps for i in idx for j in idx if i != j)


def canonical_initial_potential(initial: InitialData | None, instance: ProblemInstance) -> np.ndarray:
    """s - L rho0 on supp rho0 and I0, 2s elsewhere."""
    init = _initial(instance, initial)
    rep = check_admissible(init, instance)
    if not rep.admissible:
        raise NotAdmissible(rep)
    s = instance.s
    phi = np.full(instance.n, 2.0 * s)
    core = sorted(init.core)
    phi[core] = np.maximum(s - (instance.lagrangian @ init.rho0)[core], 0.0)
    return phi


def ivp_conditions(rec_rho, phi, init: InitialData, instance: ProblemInstance) -> bool:
    """Direct check of rho >= rho0, the equation on I0, and PSD on I0 and supp rho."""
    rho = np.asarray(rec_rho, dtype=float)
    tol = EL_TOL_EXACT * max(1.0, instance.s)
    if np.any(rho < init.rho0 - SUPPORT_EPS):
        return False
    r = instance.lagrangian @ rho + np.asarray(phi) - instance.s
    if init.I0 and np.max(np.abs(r[sorted(init.I0)])) > tol:
        return False
    idx = sorted(set(support(rho)) | init.I0)
    return min_eig_on(instance.lagrangian, idx) >= -instance.psd_tol


def _family_member_above(rec: SolutionRecord, phi, init: InitialData, instance: ProblemInstance):
    """A member of the record's degenerate family with rho >= rho0, if any."""
    B = rec.family_basis
    if B is None or B.shape[1] == 0:
        return None
    S = sorted(set(rec.support) | set(np.flatnonzero(np.any(np.abs(B) > 0, axis=1)).tolist()))
    off = [j for j in range(instance.n) if j not in set(S)]
    L = instance.lagrangian
    rho0 = init.rho0
    G = np.vstack([-B[S], -(L[off] @ B)])
    h = np.r_[rec.rho[S] - rho0[S], (L @ rec.rho + phi - instance.s)[off]]
    t, c = max_min_slack(G, h)
    if t is None or t < -1e-10:
        return None
    return np.maximum(rec.rho + B @ c, 0.0)


def solve_ivp(initial: InitialData | None, phi, instance: ProblemInstance,
              *, max_n: int = EXACT_MAX_N) -> list[SolutionRecord]:
    """Global minimizers for phi that satisfy the initial value conditions."""
    init = _initial(instance, initial)
    phi = resolve_potential(instance, phi)
    out = []
    for rec in minimize_exact(instance, phi, max_n=max_n):
        if ivp_conditions(rec.rho, phi, init, instance):
            out.append(rec)
            continue
        rho = _family_member_above(rec, phi, init, instance)
        if rho is not None and ivp_conditions(rho, phi, init, instance):
            out.append(make_record(rho, phi, instance, family_dim=rec.degeneracy_dim,
                                   family_basis=rec.family_basis))
    return out
