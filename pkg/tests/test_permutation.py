import numpy as np
import pytest

from agentic_deflation.matrix import DimensionError, frobenius_norm
from agentic_deflation.permutation import (
    PermutationPair,
    apply_permutation,
    block_permutation,
    identity_permutation,
    invert_permutation,
    permutation_for,
    sort_permutation,
)
from oracles import hamming_transitions


def test_sort_example():
    p = sort_permutation([[0, 5], [9, 1]])
    assert p.row_order.tolist() == [1, 0]
    assert p.col_order.tolist() == [0, 1]


def test_sort_constant_is_identity():
    p = sort_permutation(np.full((4, 3), 7.0))
    assert p == identity_permutation(4, 3)


def test_sort_monotone(rng):
    m = rng.uniform(0, 255, size=(16, 16))
    out = apply_permutation(m, sort_permutation(m))
    rs, cs = out.sum(axis=1), out.sum(axis=0)
    for i in range(15):
        assert rs[i] >= rs[i + 1]
        assert cs[i] >= cs[i + 1]


def test_block_example():
    p = block_permutation([[9, 9, 0], [0, 0, 9], [9, 9, 0]])
    assert p.row_order.tolist() == [0, 2, 1]
    # column patterns 101, 101, 010
    assert p.col_order.tolist() == [0, 1, 2]


def test_block_zero_is_identity():
    assert block_permutation(np.zeros((5, 4))) == identity_permutation(5, 4)


def test_block_groups_shuffled_blocks(rng):
    m = np.zeros((12, 12))
    m[:4, :5] = 200
    m[4:9, 5:9] = 150
    m[9:, 9:] = 220
    shuffle = PermutationPair(rng.permutation(12), rng.permutation(12))
    shuffled = apply_permutation(m, shuffle)
    grouped = apply_permutation(shuffled, block_permutation(shuffled))
    before = hamming_transitions((shuffled >= shuffled.mean()).tolist())
    after = hamming_transitions((grouped >= grouped.mean()).tolist())
    assert after < before
    # three blocks -> exactly two row-pattern changes
    assert sum(any(a != b) for a, b in zip(grouped >= grouped.mean(),
                                           (grouped >= grouped.mean())[1:])) == 2


def test_apply_examples():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(apply_permutation(m, identity_permutation(2, 2)), m)
    np.testing.assert_array_equal(
        apply_permutation(m, PermutationPair([1, 0], [0, 1])), [[3, 4], [1, 2]])


def test_apply_dimension_error():
    with pytest.raises(DimensionError):
        apply_permutation(np.ones((2, 3)), identity_permutation(3, 2))


def test_norm_invariant(rng):
    m = rng.standard_normal((7, 5))
    p = PermutationPair(rng.permutation(7), rng.permutation(5))
    assert frobenius_norm(apply_permutation(m, p)) == pytest.approx(frobenius_norm(m), rel=1e-14)


def test_invert_examples():
    assert invert_permutation(identity_permutation(3, 2)) == identity_permutation(3, 2)
    assert invert_permutation(PermutationPair([2, 0, 1], [0])).row_order.tolist() == [1, 2, 0]


def test_round_trip_size_32(rng):
    m = rng.standard_normal((32, 32))
    p = PermutationPair(rng.permutation(32), rng.permutation(32))
    np.testing.assert_array_equal(apply_permutation(apply_permutation(m, p), invert_permutation(p)), m)


@pytest.mark.parametrize("order", [[0, 0, 1], [0, 1, 3], [1]])
def test_invalid_orders(order):
    with pytest.raises(ValueError):
        PermutationPair(order, [0, 1, 2])


def test_strategy_selector(rng):
    m = rng.uniform(0, 1, size=(4, 4))
    assert permutation_for(m, "none") == identity_permutation(4, 4)
    assert permutation_for(m, "sort") == sort_permutation(m)
    assert permutation_for(m, "block") == block_permutation(m)
    with pytest.raises(ValueError):
        permutation_for(m, "spectral")
