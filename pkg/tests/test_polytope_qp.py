import numpy as np
import pytest
from oracles import qp_reference, same_point_sets, vertices_by_bases

from cvp.polytope import UnboundedPolytope, affine_dimension, enumerate_vertices, implicit_equalities
from cvp.qp import solve_qp


def _random_polytope(rng, d, m, integer):
    A = rng.normal(size=(m, d))
    b = rng.random(m)
    if integer:
        A, b = np.round(A), np.round(2 * b) / 2
    return np.vstack([A, np.eye(d), -np.eye(d)]), np.r_[b, np.ones(d), np.ones(d)]


@pytest.mark.parametrize("seed", range(60))
def test_double_description_matches_basis_enumeration(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    A, b = _random_polytope(rng, d, int(rng.integers(1, 7)), integer=seed % 2 == 0)
    assert same_point_sets(enumerate_vertices(A, b), vertices_by_bases(A, b))


def test_empty_and_point_polytopes():
    A = np.array([[1.0], [-1.0]])
    assert len(enumerate_vertices(A, [-1.0, 0.0])) == 0
    V = enumerate_vertices(A, [0.5, -0.5])
    assert np.allclose(V, [[0.5]])


def test_equality_constraints():
    # simplex face x + y + z = 1 inside the unit cube
    A = np.vstack([-np.eye(3), np.eye(3)])
    b = np.r_[np.zeros(3), np.ones(3)]
    V = enumerate_vertices(A, b, np.ones((1, 3)), [1.0])
    assert same_point_sets(V, np.eye(3))
    assert affine_dimension(V) == 2


def test_unbounded_raises():
    with pytest.raises(UnboundedPolytope):
        enumerate_vertices(np.array([[-1.0, 0.0], [0.0, -1.0]]), [0.0, 0.0])


def test_implicit_equalities():
    # x <= 0, -x <= 0, y <= 1, -y <= 0 : first two are implicit equalities
    G = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    assert implicit_equalities(G, [0, 0, 1, 0]).tolist() == [True, True, False, False]


@pytest.mark.parametrize("seed", range(40))
def test_active_set_qp_matches_slsqp(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(2, 6))
    M = rng.normal(size=(n, n - (seed % 2)))
    H = M @ M.T
    g = rng.normal(size=n)
    A = np.vstack([rng.normal(size=(3, n)), np.eye(n), -np.eye(n)])
    b = np.r_[rng.random(3), np.ones(n), np.ones(n)]
    x = solve_qp(H, g, A, b, x0=np.zeros(n))
    _, fref = qp_reference(H, g, A, b)
    f = 0.5 * x @ H @ x + g @ x
    assert np.all(A @ x <= b + 1e-9)
    assert f <= fref + 1e-9


def test_qp_with_equality():
    H = 2 * np.array([[1.0, 0.5, 0], [0.5, 1, 0.5], [0, 0.5, 1]])
    A = np.vstack([-np.eye(3), H / 2])
    b = np.r_[-np.array([0, 0.5, 0]), np.ones(3)]
    x = solve_qp(H, np.zeros(3), A, b, np.ones((1, 3)), [1.5], x0=np.array([0.25, 0.5, 0.75]))
    assert np.allclose(x, [0.5, 0.5, 0.5], atol=1e-12)
