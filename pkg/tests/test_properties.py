import numpy as np
from conftest import instances
from hypothesis import given, settings
from hypothesis import strategies as st
from props import (
    check_apriori,
    check_constant_lagrangian,
    check_localization,
    check_minimal_action,
    check_replacement,
    check_rescaling,
    check_support_bound,
)

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=100)
@given(instances(), st.sampled_from([0.1, 0.5, 2.0, 3.0, 7.5]))
def test_rescaling_equivariance(inst, lam):
    assert check_rescaling(inst, lam) is None


@settings(max_examples=100)
@given(instances())
def test_minimal_action_identity(inst):
    assert check_minimal_action(inst) is None


@settings(max_examples=100)
@given(instances())
def test_support_bound(inst):
    assert check_support_bound(inst) is None


@settings(max_examples=100)
@given(instances(), seeds)
def test_localization(inst, seed):
    assert check_localization(inst, np.random.default_rng(seed)) is None


@settings(max_examples=100)
@given(instances(), seeds)
def test_potential_replacement(inst, seed):
    assert check_replacement(inst, np.random.default_rng(seed)) is None


@settings(max_examples=100)
@given(instances(), seeds)
def test_apriori_bound(inst, seed):
    assert check_apriori(inst, np.random.default_rng(seed)) is None


@settings(max_examples=100)
@given(seeds)
def test_constant_lagrangian(seed):
    assert check_constant_lagrangian(np.random.default_rng(seed)) is None
