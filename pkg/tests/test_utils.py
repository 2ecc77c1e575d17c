import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from delaybounds.errors import DimensionMismatch, NotSquare
from delaybounds.utils import (
    he,
    relative_gap,
    require_shape,
    require_square,
    scale_of,
    sym_sqrt,
    trial_rng,
    weight_block,
)

square = st.integers(min_value=1, max_value=5).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False))
)


@settings(max_examples=50, deadline=None)
@given(A=square)
def test_he_is_symmetric(A):
    assert_allclose(he(A), he(A).T)
    assert_allclose(he(A) - he(A.T), 0.0)


@settings(max_examples=50, deadline=None)
@given(A=square)
def test_square_roots_of_gram_matrices(A):
    P = A.T @ A + np.eye(A.shape[0])
    root = sym_sqrt(P)
    assert_allclose(root @ root, P, rtol=1e-9, atol=1e-9)
    assert_allclose(root, root.T, atol=1e-12)


def test_weight_block_layout():
    W = np.array([[2.0, 1.0], [1.0, 3.0]])
    block = weight_block([1.0, 1.0 / 3.0], W)
    assert_allclose(block[:2, :2], W)
    assert_allclose(block[2:, 2:], 3.0 * W)
    assert_allclose(block[:2, 2:], 0.0)


def test_shape_guards():
    with pytest.raises(NotSquare):
        require_square(np.ones((2, 3)))
    with pytest.raises(DimensionMismatch):
        require_shape(np.ones((2, 3)), (3, 2), "N")
    assert isinstance(NotSquare("x"), DimensionMismatch)


def test_relative_comparisons_use_unit_floor():
    assert scale_of(0.5, -0.25) == 1.0
    assert scale_of([3.0, -7.0]) == 7.0
    assert relative_gap(1e-9, 0.0) == pytest.approx(1e-9)
    assert relative_gap(100.0, 101.0) == pytest.approx(1.0 / 101.0)


def test_trial_streams_are_independent_and_reproducible():
    first = trial_rng(7, 3).normal(size=4)
    assert_allclose(trial_rng(7, 3).normal(size=4), first)
    assert not np.allclose(trial_rng(7, 4).normal(size=4), first)
