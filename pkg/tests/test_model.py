from fractions import Fraction as F

import numpy as np
import pytest
from conftest import LMAT, WEDGE, make
from oracles import WEDGE as WEDGE_Q
from oracles import exact_action, exact_residual, grid_min_action

from cvp.errors import (
    DimensionMismatch,
    NegativeEntry,
    NonpositiveDiagonal,
    NonpositiveLambda,
    NotSymmetric,
    ValidationError,
)
from cvp.model import (
    InitialData,
    PointSpace,
    ProblemInstance,
    action_value,
    apriori_volume_bound,
    el_residuals,
    rescale,
    support,
    unit_scale,
    validate_lagrangian,
)


def test_validate_accepts_wedge_and_identity():
    assert np.array_equal(validate_lagrangian(WEDGE), WEDGE)
    for n in (1, 3, 7):
        validate_lagrangian(np.eye(n))


def test_validated_matrix_is_read_only():
    L = validate_lagrangian(WEDGE)
    with pytest.raises(ValueError):
        L[0, 0] = 5


def test_validate_negative_entry_names_pair():
    with pytest.raises(NegativeEntry) as exc:
        validate_lagrangian([[1, -0.1], [-0.1, 1]])
    assert exc.value.index == (0, 1)


def test_validate_asymmetry_is_exact():
    with pytest.raises(NotSymmetric) as exc:
        validate_lagrangian([[1, 0.5], [0.5 + 1e-16 * 4, 1]])
    assert exc.value.index == (0, 1)


def test_validate_diagonal():
    with pytest.raises(NonpositiveDiagonal) as exc:
        validate_lagrangian([[1, 0], [0, 0]])
    assert exc.value.index == (1, 1)


def test_validate_shape():
    with pytest.raises(DimensionMismatch):
        validate_lagrangian([[1, 0, 0], [0, 1, 0]])


def test_point_space_labels_distinct():
    with pytest.raises(ValidationError):
        PointSpace(("a", "a"))


def test_instance_rejects_nonpositive_s():
    with pytest.raises(ValidationError):
        make(WEDGE, s=0.0)
    with pytest.raises(ValidationError):
        make(WEDGE, s=-1.0)


def test_instance_dimension_checks():
    with pytest.raises(DimensionMismatch):
        ProblemInstance(PointSpace.of_size(2), WEDGE)
    with pytest.raises(DimensionMismatch):
        make(WEDGE, phi=[0, 0])
    with pytest.raises(DimensionMismatch):
        ProblemInstance(PointSpace.of_size(3), WEDGE, initial=InitialData(np.zeros(3), frozenset({5})))


def test_action_wedge_a_solution():
    inst = make(WEDGE)
    assert action_value([0.25, 0.5, 0.75], [0.5, 0, 0], inst) == pytest.approx(-11 / 8, abs=1e-15)
    # rational cross-check
    q = exact_action(WEDGE_Q, [F(1, 4), F(1, 2), F(3, 4)], [F(1, 2), 0, 0])
    assert q == F(-11, 8)


def test_action_zero_measure():
    assert action_value(np.zeros(3), [0.3, 5, 0], make(WEDGE)) == 0.0


def test_action_lmat():
    assert action_value([1, 0, 0], [0, 0, 0], make(LMAT)) == -1.0


def test_action_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        action_value([1, 0], [0, 0, 0], make(WEDGE))


@pytest.mark.parametrize(
    "rho,phi",
    [
        ([F(1, 2)] * 3, [F(1, 4), F(0), F(1, 4)]),
        ([F(0), F(1, 2), F(0)], [F(3, 4), F(1, 2), F(3, 4)]),
    ],
)
def test_el_residuals_paper_points(rho, phi):
    assert exact_residual(WEDGE_Q, rho, phi) == [0, 0, 0]
    r, sup, lam = el_residuals([float(x) for x in rho], [float(x) for x in phi], make(WEDGE))
    assert np.all(r == 0) and sup == 0.0
    assert lam > 0


def test_el_residuals_zero_measure():
    r, sup, lam = el_residuals(np.zeros(3), np.zeros(3), make(WEDGE))
    assert np.array_equal(r, [-1, -1, -1]) and sup == 1.0 and lam == float("inf")


def test_el_residual_psd_on_support():
    _, _, lam = el_residuals([0.5, 0.5, 0], [0, 0, 0], make(LMAT))
    assert lam == pytest.approx(0.0, abs=1e-15)


def test_rescale_examples():
    rho, phi, s = rescale([1, 2], [0.5, 0.25], 2.0, 0.5)
    assert s == 1.0 and np.array_equal(rho, [0.5, 1]) and np.array_equal(phi, [0.25, 0.125])
    r2, p2, s2 = rescale([1, 2], [3, 4], 1.0, 1.0)
    assert np.array_equal(r2, [1, 2]) and np.array_equal(p2, [3, 4]) and s2 == 1.0
    with pytest.raises(NonpositiveLambda):
        rescale([1], [1], 1.0, 0.0)


def test_rescale_wedge_d_solution_action():
    inst = make(WEDGE)
    rho, phi, s = rescale([0.5] * 3, [0.25, 0, 0.25], 1.0, 3.0)
    assert action_value(rho, phi, make(WEDGE, s=s)) == pytest.approx(-45 / 4, abs=1e-12)
    assert action_value([0.5] * 3, [0.25, 0, 0.25], inst) == pytest.approx(-5 / 4, abs=1e-15)


def test_apriori_bound_examples():
    assert apriori_volume_bound(make(WEDGE)) == 12.0
    assert apriori_volume_bound(make([[2.0]])) == 2.0
    assert apriori_volume_bound(make(np.ones((4, 4)))) == 16.0


def test_apriori_bound_wedge_grid():
    # no grid measure with nonpositive action exceeds the bound
    inst = make(WEDGE)
    g = np.arange(0, 4.01, 0.25)
    P = np.stack(np.meshgrid(g, g, g, indexing="ij"), -1).reshape(-1, 3)
    for phi in ([0, 0, 0], [0.5, 0, 0]):
        act = np.einsum("ij,jk,ik->i", P, WEDGE, P) + 2 * P @ (np.array(phi) - 1)
        assert P[act <= 0].sum(axis=1).max() <= apriori_volume_bound(inst)
    assert grid_min_action(WEDGE, [0, 0, 0]) == pytest.approx(-2.0)


def test_support_threshold():
    assert support([0, 1e-13, 2e-12, 1]) == (2, 3)


def test_unit_scale():
    inst = make(WEDGE, phi=[1, 0, 1], rho0=[0, 1, 0], s=2.0)
    u = unit_scale(inst)
    assert u.s == 1.0 and np.array_equal(u.potential, [0.5, 0, 0.5]) and np.array_equal(u.initial.rho0, [0, 0.5, 0])


def test_restrict():
    inst = make(WEDGE, rho0=[0, 0.5, 0], I0={2})
    sub = inst.restrict([1, 2])
    assert np.array_equal(sub.lagrangian, [[1, 0.5], [0.5, 1]])
    assert sub.initial.I0 == frozenset({1}) and np.array_equal(sub.initial.rho0, [0.5, 0])
