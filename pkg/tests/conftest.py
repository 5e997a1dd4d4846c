import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from cvp.model import InitialData, PointSpace, ProblemInstance  # noqa: E402

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=100)
settings.load_profile("repro")

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"

WEDGE = np.array([[1.0, 0.5, 0.0], [0.5, 1.0, 0.5], [0.0, 0.5, 1.0]])
LMAT = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 2.0], [1.0, 2.0, 1.0]])


def make(L, phi=None, rho0=None, I0=(), s=1.0):
    L = np.asarray(L, dtype=float)
    init = None if rho0 is None and not I0 else InitialData(np.zeros(len(L)) if rho0 is None else rho0, frozenset(I0))
    return ProblemInstance(PointSpace.of_size(len(L)), L, s, None if phi is None else np.asarray(phi, dtype=float), init)


@pytest.fixture
def wedge():
    return make(WEDGE, rho0=[0, 0.5, 0])


@pytest.fixture
def wedge4():
    L = np.zeros((4, 4))
    L[:3, :3] = WEDGE
    L[3, 3] = 1.0
    return make(L, rho0=[0, 0.5, 0, 0])


@pytest.fixture
def lmat():
    return make(LMAT)


GRID = [0.0, 0.25, 0.5, 0.75, 1.0]


@st.composite
def lagrangians(draw, min_n=1, max_n=4):
    n = draw(st.integers(min_n, max_n))
    L = np.zeros((n, n))
    for i in range(n):
        L[i, i] = draw(st.sampled_from([0.5, 1.0, 1.5, 2.0]))
        for j in range(i + 1, n):
            L[i, j] = L[j, i] = draw(st.sampled_from(GRID))
    return L


@st.composite
def potentials(draw, n, hi=2.0, step=0.05):
    k = int(round(hi / step))
    return np.array([draw(st.integers(0, k)) * step for _ in range(n)])


@st.composite
def instances(draw, min_n=1, max_n=4):
    L = draw(lagrangians(min_n, max_n))
    phi = draw(potentials(len(L)))
    return make(L, phi)


ACCEPTANCE = {}


@pytest.fixture
def report():
    """Record an acceptance outcome, then assert it."""

    def _report(k, ok, detail=""):
        ACCEPTANCE[k] = (bool(ok), detail)
        assert ok, f"acceptance {k}: {detail}"

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        line = f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
