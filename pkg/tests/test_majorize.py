import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from binpower.majorize import epsilon_transfer, is_permutation, majorizes
from binpower.ratecore import sum_rate_received

vectors = arrays(np.float64, st.integers(1, 8), elements=st.floats(0, 10))


def test_canonical_pair():
    v = majorizes([2, 0], [1, 1])
    assert v.majorizes and not v.equal_up_to_permutation
    assert not majorizes([1, 1], [2, 0]).majorizes


def test_permutation():
    v = majorizes([1, 1], [1, 1][::-1])
    assert v.majorizes and v.equal_up_to_permutation
    assert majorizes([3, 1, 2], [2, 3, 1]).equal_up_to_permutation


def test_three_vector():
    # prefix sums 2 >= 1, 3 >= 2, totals 3 = 3
    assert majorizes([2, 0, 1], [1, 1, 1]).majorizes


def test_unequal_totals():
    assert not majorizes([3, 0], [1, 1]).majorizes


def test_length_mismatch():
    with pytest.raises(ValueError):
        majorizes([1, 2], [1, 2, 3])


def test_transfer_examples():
    np.testing.assert_array_equal(epsilon_transfer([1, 1], 0, 1, 0.5), [1.5, 0.5])
    y = epsilon_transfer([3, 1], 0, 1, 1.0)
    np.testing.assert_array_equal(y, [4, 0])
    assert majorizes(y, [3, 1]).majorizes
    z = epsilon_transfer([3, 1], 0, 1, 0.0)
    np.testing.assert_array_equal(z, [3, 1])
    assert majorizes(z, [3, 1]).equal_up_to_permutation


@pytest.mark.parametrize("args", [([1, 2], 0, 1, 0.5), ([2, 1], 0, 1, 1.5),
                                  ([2, 1], 0, 0, 0.1), ([2, 1], 0, 1, -0.1)])
def test_transfer_preconditions(args):
    with pytest.raises(ValueError):
        epsilon_transfer(*args)


@given(vectors)
def test_reflexive(x):
    v = majorizes(x, x)
    assert v.majorizes and v.equal_up_to_permutation


@given(vectors, vectors)
def test_antisymmetric_up_to_permutation(x, y):
    if x.size != y.size:
        return
    if majorizes(x, y, tol=0).majorizes and majorizes(y, x, tol=0).majorizes:
        assert is_permutation(x, y, tol=1e-9 * (1 + x.sum()))


@given(arrays(np.float64, st.integers(2, 8), elements=st.floats(0.01, 10)),
       st.data(), st.floats(1e-2, 1e2))
def test_transfer_increases_rate(x, data, noise):
    i, j = data.draw(st.lists(st.integers(0, x.size - 1), min_size=2, max_size=2, unique=True))
    if x[i] < x[j]:
        i, j = j, i
    eps = data.draw(st.floats(0.05, 1.0)) * x[j]
    y = epsilon_transfer(x, i, j, eps)
    assert majorizes(y, x).majorizes
    assert not is_permutation(y, x)
    assert sum_rate_received(y, noise) > sum_rate_received(x, noise)
