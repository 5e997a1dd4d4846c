"""Uniform discretizations of the heat kernel on the unit circle.

Matrix entries are kernel values K(x_i - x_j); a discrete measure stores the
mass of each sample point, so a density f is represented by f(x_k) * 2pi/n.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import COutOfRange, ValidationError
from .model import PointSpace, ProblemInstance, validate_lagrangian

KERNEL_TERMS = 27
CLAMP = 1e-14


@dataclass(frozen=True)
class CircleDiscretization:
    n: int
    kernel_terms: int = KERNEL_TERMS

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValidationError("circle discretization needs n >= 3 points")

    @property
    def points(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @property
    def quadrature_weight(self) -> float:
        return 2.0 * np.pi / self.n

    def labels(self) -> tuple[str, ...]:
        return tuple(f"x{k}" for k in range(self.n))


def _coefficients(disc: CircleDiscretization, modified: bool) -> dict[int, float]:
    """Fourier coefficients c_k (kernel = (1/2pi) sum c_k e^{ik(x-y)})."""
    K = disc.kernel_terms
    c = {k: float(np.exp(-k * k)) for k in range(-K, K + 1)}
    if modified:
        c[1] = c[-1] = 0.0
    return c


def _kernel_row(disc: CircleDiscretization, modified: bool) -> np.ndarray:
    n = disc.n
    d = np.minimum(np.arange(n), n - np.arange(n))  # symmetric separations
    theta = 2.0 * np.pi * d / n
    k = np.arange(1, disc.kernel_terms + 1)
    vals = 1.0 / (2.0 * np.pi) + np.cos(np.outer(theta, k)) @ np.exp(-k.astype(float) ** 2) / np.pi
    if modified:
        vals = vals - np.cos(theta) / (np.pi * np.e)
    return vals


def _circulant(row: np.ndarray) -> np.ndarray:
    n = len(row)
    i = np.arange(n)
    return row[(i[None, :] - i[:, None]) % n]


def heat_kernel_circle(disc: CircleDiscretization) -> np.ndarray:
    """Circulant matrix of heat-kernel values at the sample points."""
    return validate_lagrangian(_circulant(_kernel_row(disc, False)))


def modified_heat_kernel_circle(disc: CircleDiscretization) -> np.ndarray:
    """Heat kernel with the frequency-one modes removed."""
    if disc.n < 5:
        raise ValidationError("the modified kernel needs n >= 5")
    row = _kernel_row(disc, True)
    row[np.abs(row) < CLAMP] = 0.0
    if np.any(row < 0):
        raise ValidationError("modified kernel has a materially negative entry")
    return validate_lagrangian(_circulant(row))


def circulant_eigenvalues(disc: CircleDiscretization, modified: bool = False) -> np.ndarray:
    """Exact eigenvalues of the (untruncated-alias) circulant matrix, by frequency.

    lambda_m = (n / 2pi) * sum of c_k over k = m mod n, evaluated term by term so
    tiny aliased contributions are not lost to cancellation.
    """
    n = disc.n
    c = _coefficients(disc, modified)
    lam = np.zeros(n)
    for k, ck in c.items():
        lam[k % n] += ck
    return lam * n / (2.0 * np.pi)


def circulant_log_eigenvalues(disc: CircleDiscretization, modified: bool = False) -> np.ndarray:
    """Natural logs of the eigenvalues of the exact (untruncated) kernel
    matrix. Finite entries certify strict positivity even where the values
    underflow double precision; -inf marks an exactly vanishing mode."""
    n = disc.n
    out = np.empty(n)
    for m in range(n):
        ks = np.arange(m - 4 * n, m + 4 * n + 1, n)
        if modified:
            ks = ks[np.abs(ks) != 1]
        out[m] = np.logaddexp.reduce(-(ks.astype(float) ** 2)) if len(ks) else -np.inf
    return out + np.log(n / (2.0 * np.pi))


def aliasing_bound(disc: CircleDiscretization) -> float:
    """Upper bound for the frequency-one eigenvalues of the modified matrix."""
    n = disc.n
    return 2.0 * float(np.exp(-((n - 1) ** 2))) * n / (2.0 * np.pi)


@dataclass(frozen=True)
class CircleFamily:
    base: np.ndarray        # uniform measure
    directions: np.ndarray  # columns: cos and sin modes times the weight
    family_dim: int
    null_eigenvalues: np.ndarray

    def member(self, alpha: float, beta: float) -> np.ndarray:
        return self.base + self.directions @ np.array([alpha, beta])


def modified_solution_family(disc: CircleDiscretization) -> CircleFamily:
    """Minimizer family of the modified kernel with zero potential.

    The dimension is the number of circulant eigenvalues below the aliasing
    bound, computed from the exact spectrum rather than from a numerical
    eigensolver (whose noise floor hides the gap between e^{-m^2} modes).
    """
    lam = circulant_eigenvalues(disc, modified=True)
    null = np.abs(lam) <= aliasing_bound(disc)
    w = disc.quadrature_weight
    x = disc.points
    dirs = np.column_stack([np.cos(x), np.sin(x)]) * w
    return CircleFamily(np.full(disc.n, w), dirs, int(np.sum(null)), lam[null])


def uniform_solution_reference(disc: CircleDiscretization, C: float) -> np.ndarray:
    """Uniform minimizer for the unmodified kernel and constant potential C."""
    if not 0.0 <= C < 1.0:
        raise COutOfRange(f"C must lie in [0, 1), got {C}")
    return np.full(disc.n, (1.0 - C) * disc.quadrature_weight)


def circle_instance(n: int, modified: bool = False, phi_const: float | None = None) -> ProblemInstance:
    disc = CircleDiscretization(n)
    L = modified_heat_kernel_circle(disc) if modified else heat_kernel_circle(disc)
    phi = None if phi_const is None else np.full(n, float(phi_const))
    return ProblemInstance(PointSpace(disc.labels()), L, 1.0, phi)
