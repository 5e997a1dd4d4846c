"""Point spaces, Lagrangians, measures and potentials, plus the inner action.

Measures and potentials are plain float vectors of length ``n``; the helpers
here validate them and evaluate the action and its Euler-Lagrange residuals.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    NonpositiveDiagonal,
    NonpositiveLambda,
    NotSymmetric,
    ValidationError,
)

SUPPORT_EPS = 1e-12
EL_TOL_EXACT = 1e-9
EL_TOL_ITERATIVE = 1e-6
PSD_REL_TOL = 1e-10
ACTION_TIE_TOL = 1e-9
EXACT_MAX_N = 16


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PointSpace:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValidationError("a point space needs at least one point")
        if len(set(labels)) != len(labels):
            raise ValidationError("point labels must be distinct")

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def of_size(cls, n: int, prefix: str = "p") -> "PointSpace":
        return cls(tuple(f"{prefix}{i}" for i in range(n)))

    def index(self, label: str) -> int:
        return self.labels.index(label)


def validate_lagrangian(entries) -> np.ndarray:
    """Check symmetry (exact), nonnegativity and a positive diagonal.

    Returns a read-only float copy of the matrix.
    """
    L = np.array(entries, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] == 0:
        raise DimensionMismatch(f"lagrangian must be a nonempty square matrix, got shape {L.shape}")
    if not np.all(np.isfinite(L)):
        raise ValidationError("lagrangian entries must be finite")
    n = L.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if L[i, j] != L[j, i]:
                raise NotSymmetric(i, j)
    neg = np.argwhere(L < 0)
    if len(neg):
        i, j = sorted(tuple(int(v) for v in p) for p in neg)[0]
        raise NegativeEntry(i, j)
    for i in range(n):
        if not L[i, i] > 0:
            raise NonpositiveDiagonal(i)
    return _frozen(L)


def as_measure(weights, n: int | None = None) -> np.ndarray:
    rho = np.asarray(weights, dtype=float)
    if rho.ndim != 1 or (n is not None and rho.shape[0] != n):
        raise DimensionMismatch(f"measure has shape {rho.shape}, expected ({n},)")
    if not np.all(np.isfinite(rho)):
        raise ValidationError("measure weights must be finite")
    if np.any(rho < 0):
        raise ValidationError("measure weights must be nonnegative")
    return rho


def as_potential(values, n: int | None = None) -> np.ndarray:
    phi = np.asarray(values, dtype=float)
    if phi.ndim != 1 or (n is not None and phi.shape[0] != n):
        raise DimensionMismatch(f"potential has shape {phi.shape}, expected ({n},)")
    if not np.all(np.isfinite(phi)):
        raise ValidationError("potential values must be finite")
    if np.any(phi < 0):
        raise ValidationError("potential values must be nonnegative")
    return phi


def support(rho, eps: float = SUPPORT_EPS) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(np.asarray(rho) > eps))


@dataclass(frozen=True)
class InitialData:
    rho0: np.ndarray
    I0: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "rho0", _frozen(as_measure(self.rho0)))
        object.__setattr__(self, "I0", frozenset(int(i) for i in self.I0))

    @property
    def core(self) -> frozenset:
        """supp rho0 together with I0."""
        return frozenset(support(self.rho0)) | self.I0

    @classmethod
    def empty(cls, n: int) -> "InitialData":
        return cls(np.zeros(n))


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    space: PointSpace
    lagrangian: np.ndarray
    s: float = 1.0
    potential: np.ndarray | None = None
    initial: InitialData | None = None

    def __post_init__(self):
        L = validate_lagrangian(self.lagrangian)
        n = self.space.n
        if L.shape[0] != n:
            raise DimensionMismatch(f"lagrangian is {L.shape[0]}x{L.shape[0]} but the space has {n} points")
        object.__setattr__(self, "lagrangian", L)
        s = float(self.s)
        if not np.isfinite(s) or s <= 0:
            raise ValidationError(f"s must be positive, got {self.s}")
        object.__setattr__(self, "s", s)
        if self.potential is not None:
            object.__setattr__(self, "potential", _frozen(as_potential(self.potential, n)))
        if self.initial is not None:
            if self.initial.rho0.shape[0] != n:
                raise DimensionMismatch("initial measure does not match the point space")
            if any(i < 0 or i >= n for i in self.initial.I0):
                raise DimensionMismatch("initial set refers to a point outside the space")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def norm(self) -> float:
        """Spectral norm of L."""
        return float(np.linalg.norm(self.lagrangian, 2))

    @property
    def psd_tol(self) -> float:
        return PSD_REL_TOL * self.norm

    def with_potential(self, phi) -> "ProblemInstance":
        return replace(self, potential=phi)

    def with_initial(self, initial: InitialData | None) -> "ProblemInstance":
        return replace(self, initial=initial)

    def restrict(self, indices) -> "ProblemInstance":
        """Sub-instance on the given points (in the given order)."""
        idx = list(indices)
        sub = self.lagrangian[np.ix_(idx, idx)]
        space = PointSpace(tuple(self.space.labels[i] for i in idx))
        phi = None if self.potential is None else self.potential[idx]
        init = None
        if self.initial is not None:
            pos = {g: k for k, g in enumerate(idx)}
            init = InitialData(self.initial.rho0[idx], frozenset(pos[i] for i in self.initial.I0 if i in pos))
        return ProblemInstance(space, sub, self.s, phi, init)

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return np.array_equal(a, b)

        ia, ib = self.initial, other.initial
        init_eq = (ia is None and ib is None) or (
            ia is not None and ib is not None and np.array_equal(ia.rho0, ib.rho0) and ia.I0 == ib.I0
        )
        return (
            self.space == other.space
            and np.array_equal(self.lagrangian, other.lagrangian)
            and self.s == other.s
            and same(self.potential, other.potential)
            and init_eq
        )


@dataclass(frozen=True, eq=False)
class SolutionRecord:
    rho: np.ndarray
    phi: np.ndarray
    action: float
    el_sup_residual: float
    psd_min_eigenvalue: float
    degeneracy_dim: int = 0
    certified_global: bool = False
    family_basis: np.ndarray | None = None
    converged: bool = True
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def support(self) -> tuple[int, ...]:
        return support(self.rho)

    @property
    def volume(self) -> float:
        return float(np.sum(self.rho))


def _check_dims(rho, phi, instance):
    n = instance.n
    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if rho.shape != (n,) or phi.shape != (n,):
        raise DimensionMismatch(f"expected vectors of length {n}, got {rho.shape} and {phi.shape}")
    return rho, phi


def action_value(rho, phi, instance: ProblemInstance) -> float:
    """rho^T L rho + 2 sum (phi - s) rho."""
    rho, phi = _check_dims(rho, phi, instance)
    return float(rho @ instance.lagrangian @ rho + 2.0 * np.dot(phi - instance.s, rho))


def min_eig_on(L: np.ndarray, idx) -> float:
    """Smallest eigenvalue of the principal submatrix on ``idx`` (+inf if empty)."""
    idx = list(idx)
    if not idx:
        return float("inf")
    return float(np.linalg.eigvalsh(L[np.ix_(idx, idx)])[0])


def el_residuals(rho, phi, instance: ProblemInstance):
    """Per-point residual (L rho + phi - s), its sup violation, and the
    smallest eigenvalue of L on supp rho."""
    rho, phi = _check_dims(rho, phi, instance)
    r = instance.lagrangian @ rho + phi - instance.s
    supp = list(support(rho))
    on = float(np.max(np.abs(r[supp]))) if supp else 0.0
    off = float(np.max(np.maximum(0.0, -r)))
    return r, max(on, off), min_eig_on(instance.lagrangian, supp)


def rescale(rho, phi, s: float, lam: float):
    """The scaling symmetry (rho, phi, s) -> lam * (rho, phi, s)."""
    if not lam > 0:
        raise NonpositiveLambda(f"lambda must be positive, got {lam}")
    return lam * np.asarray(rho, dtype=float), lam * np.asarray(phi, dtype=float), lam * s


def apriori_volume_bound(instance: ProblemInstance) -> float:
    """Total-volume bound 2n/delta with delta = min L(i,i) / 2.

    Any measure with nonpositive action has at most this mass. The bound is
    stated for s = 1 and scales linearly with s.
    """
    delta = 0.5 * float(np.min(np.diag(instance.lagrangian)))
    return 2.0 * instance.n * instance.s / delta


def unit_scale(instance: ProblemInstance) -> ProblemInstance:
    """Rescale potential and initial measure so that s = 1."""
    s = instance.s
    if s == 1.0:
        return instance
    phi = None if instance.potential is None else instance.potential / s
    init = None
    if instance.initial is not None:
        init = InitialData(instance.initial.rho0 / s, instance.initial.I0)
    return ProblemInstance(instance.space, instance.lagrangian, 1.0, phi, init)
