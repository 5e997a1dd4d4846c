import numpy as np
import pytest
from conftest import WEDGE, lagrangians, make
from hypothesis import given, settings
from hypothesis import strategies as st

from cvp.continuum import circle_instance
from cvp.dependence import (
    certify_definite,
    certify_dependent,
    constrained_quadratic_min,
    definite_certificate,
    domain_of_dependence,
    maximal_dependent_sets,
    maximal_optimal_solution,
    solution_germs,
)
from cvp.errors import DoesNotEncloseInitialData, NoDependentSet, TooManyPoints
from cvp.inner import minimize_exact
from cvp.model import InitialData
from cvp.optimizer import optimize


def test_constrained_min_examples(wedge):
    assert constrained_quadratic_min({0, 1, 2}, {1}, wedge) > 0
    inst = circle_instance(16, modified=True)
    assert abs(constrained_quadratic_min(range(16), (), inst)) <= 1e-12
    assert constrained_quadratic_min({2}, (), make(WEDGE)) == 1.0
    # anchor kills every direction: only mu = 0 remains
    assert constrained_quadratic_min({0}, {0}, make(WEDGE)) == float("inf")


def test_certify_dependent_examples(wedge):
    assert certify_dependent({0, 1, 2}, None, wedge).certified_dependent
    circ = circle_instance(8, modified=True)
    assert not certify_dependent(set(range(8)), None, circ).certified_dependent
    with pytest.raises(DoesNotEncloseInitialData):
        certify_dependent({0, 2}, None, wedge)


def test_circle_omitting_one_point_not_certified():
    # sin(x - x_p) vanishes at p, so it stays a null direction on the complement
    circ = circle_instance(8, modified=True)
    x = 2 * np.pi * np.arange(8) / 8
    for p in range(8):
        v = np.sin(x - x[p])
        assert abs(v[p]) < 1e-15
        assert np.linalg.norm(circ.lagrangian @ v) < 1e-12
        assert not certify_dependent(set(range(8)) - {p}, None, circ).certified_dependent


def test_circle_maximal_sets_omit_non_antipodal_pairs():
    circ = circle_instance(8, modified=True)
    sets = maximal_dependent_sets(None, circ)
    omitted = sorted(tuple(sorted(set(range(8)) - S)) for S in sets)
    expected = sorted((i, j) for i in range(8) for j in range(i + 1, 8) if j - i != 4)
    assert omitted == expected
    assert domain_of_dependence(None, circ) == frozenset()


def test_wedge_dependence(wedge):
    assert maximal_dependent_sets(None, wedge) == [frozenset({0, 1, 2})]
    assert domain_of_dependence(None, wedge) == frozenset({0, 1, 2})


def test_one_point_space():
    inst = make([[1.0]])
    assert maximal_dependent_sets(None, inst) == [frozenset({0})]


def test_full_support_initial_data():
    inst = make(WEDGE, rho0=[0.1, 0.1, 0.1])
    assert domain_of_dependence(None, inst) == frozenset({0, 1, 2})


def test_no_dependent_set():
    # the core itself carries a null direction
    inst = make(np.ones((2, 2)), rho0=[0.1, 0.1])
    with pytest.raises(NoDependentSet):
        domain_of_dependence(None, inst)


def test_size_cap():
    with pytest.raises(TooManyPoints):
        maximal_dependent_sets(None, make(np.eye(17)))


def test_definite_examples(wedge):
    assert certify_definite({0, 1, 2}, None, wedge)
    assert certify_definite({1}, None, wedge)
    circ = circle_instance(8, modified=True)
    cert = definite_certificate(set(range(8)), None, circ)
    assert not cert.definite and cert.min_eig <= circ.psd_tol


def test_definite_condition_ii_fails():
    # two points, weak coupling: a solution on one point can push L rho above 1 on the other
    L = np.array([[1.0, 0.9], [0.9, 1.0]])
    inst = make(L, rho0=[0.5, 0])
    cert = definite_certificate({0, 1}, None, inst)
    assert cert.min_eig > 0
    # rho = (1, 0) solves on support {0}; (L rho)_1 = 0.9 <= 1, so still definite
    assert cert.definite
    L2 = np.array([[0.5, 0.75], [0.75, 2.0]])
    inst2 = make(L2, rho0=[0.5, 0])
    cert2 = definite_certificate({0, 1}, None, inst2)
    assert cert2.min_eig > 0 and not cert2.definite and cert2.lrho_max > 1


def test_wedge_germs(wedge):
    germs = solution_germs(None, wedge)
    assert len(germs) == 1
    assert germs[0].subset == frozenset({0, 1, 2})
    assert np.allclose(germs[0].rho, 0.5, atol=1e-9)
    assert np.allclose(maximal_optimal_solution(None, wedge), 0.5, atol=1e-9)


def test_germ_on_initial_support_is_its_d_optimum(wedge):
    # on {1} the (D)-optimal measure has mass 1, not rho0
    sub = wedge.restrict([1])
    res = optimize("D", None, sub)
    assert np.allclose(res.solutions[0].rho, [1.0])


def test_single_germ_when_initial_data_saturates():
    # L rho0 = 1 on the support: rho0 is the only solution there
    inst = make(WEDGE, rho0=[0, 1.0, 0])
    germs = solution_germs(None, inst)
    assert any(g.subset == frozenset({1}) and np.allclose(g.rho, [0, 1, 0]) for g in germs)


def test_empty_initial_data_zero_germ():
    germs = solution_germs(InitialData(np.zeros(3)), make(WEDGE))
    assert germs[0].subset == frozenset() and germs[0].volume == 0.0


@st.composite
def anchored(draw):
    L = draw(lagrangians(2, 4))
    n = len(L)
    rho0 = np.zeros(n)
    rho0[draw(st.integers(0, n - 1))] = 0.25
    return make(L, rho0=rho0)


@settings(max_examples=50)
@given(anchored())
def test_dependence_monotone(inst):
    core = inst.initial.core
    full = frozenset(range(inst.n))
    if not certify_dependent(full, None, inst).certified_dependent:
        return
    free = sorted(full - core)
    for m in range(1 << len(free)):
        S = core | {free[i] for i in range(len(free)) if m >> i & 1}
        assert certify_dependent(S, None, inst).certified_dependent


@settings(max_examples=50)
@given(anchored())
def test_dod_contains_core(inst):
    sets = maximal_dependent_sets(None, inst)
    if sets:
        assert inst.initial.core <= domain_of_dependence(None, inst)


@settings(max_examples=30)
@given(lagrangians(2, 4), st.data())
def test_pd_lagrangian_unique_minimizer(L, data):
    if np.linalg.eigvalsh(L)[0] <= 1e-6:
        return
    phi = np.array([data.draw(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0, 1.5])) for _ in range(len(L))])
    assert len(minimize_exact(make(L), phi)) == 1


@settings(max_examples=30)
@given(anchored())
def test_germs_totally_ordered(inst):
    germs = solution_germs(None, inst)
    for a, b in zip(germs, germs[1:]):
        assert np.all(b.rho >= a.rho - 1e-9)
