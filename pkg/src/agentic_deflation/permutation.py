"""Row/column reorderings that make block structure visible before solving."""
from dataclasses import dataclass

import numpy as np

from .matrix import DimensionError, as_matrix

__all__ = [
    "STRATEGIES",
    "PermutationPair",
    "identity_permutation",
    "sort_permutation",
    "block_permutation",
    "permutation_for",
    "apply_permutation",
    "invert_permutation",
    "permute_update",
]

STRATEGIES = ("none", "sort", "block")


def _check_order(order, n, name):
    order = np.asarray(order, dtype=np.intp).ravel()
    if order.size != n or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValueError(f"{name} is not a permutation of 0..{n - 1}")
    return order


@dataclass(frozen=True, eq=False)
class PermutationPair:
    row_order: np.ndarray
    col_order: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.row_order, dtype=np.intp).ravel()
        c = np.asarray(self.col_order, dtype=np.intp).ravel()
        object.__setattr__(self, "row_order", _check_order(r, r.size, "row_order"))
        object.__setattr__(self, "col_order", _check_order(c, c.size, "col_order"))

    def __eq__(self, other):
        return (isinstance(other, PermutationPair)
                and np.array_equal(self.row_order, other.row_order)
                and np.array_equal(self.col_order, other.col_order))

    @property
    def shape(self):
        return (self.row_order.size, self.col_order.size)

    def to_dict(self):
        return {"row_order": self.row_order.tolist(), "col_order": self.col_order.tolist()}


def identity_permutation(rows, cols):
    return PermutationPair(np.arange(rows), np.arange(cols))


def _descending_stable(keys):
    # ties keep ascending original index
    return np.array(sorted(range(len(keys)), key=lambda i: (-keys[i], i)), dtype=np.intp)


def sort_permutation(m):
    """Rows by descending row sum, columns by descending column sum."""
    m = as_matrix(m)
    return PermutationPair(_descending_stable(m.sum(axis=1).tolist()),
                           _descending_stable(m.sum(axis=0).tolist()))


def _pattern_keys(bits):
    # each row of ``bits`` read as a big-endian unsigned integer
    return [int("".join("1" if b else "0" for b in row), 2) for row in bits]


def block_permutation(m):
    """Group rows (and columns) that share the same above-mean activity pattern.

    The matrix is binarised at its global mean (``entry >= mean``). Rows are
    ordered by their binary pattern read as a big-endian integer, descending,
    with ties by ascending index; columns likewise on the transposed pattern.
    Identical patterns therefore end up in contiguous blocks.
    """
    m = as_matrix(m)
    bits = m >= m.mean()
    return PermutationPair(_descending_stable(_pattern_keys(bits)),
                           _descending_stable(_pattern_keys(bits.T)))


def permutation_for(m, strategy):
    """Look up a strategy by its selector token (``none``/``sort``/``block``)."""
    m = as_matrix(m)
    if strategy == "none":
        return identity_permutation(*m.shape)
    if strategy == "sort":
        return sort_permutation(m)
    if strategy == "block":
        return block_permutation(m)
    raise ValueError(f"unknown permutation strategy {strategy!r}; expected one of {STRATEGIES}")


def apply_permutation(m, p):
    """``out[i, j] = m[row_order[i], col_order[j]]``."""
    m = as_matrix(m)
    if m.shape != p.shape:
        raise DimensionError(f"permutation of shape {p.shape} applied to matrix {m.shape}")
    return m[np.ix_(p.row_order, p.col_order)]


def invert_permutation(p):
    return PermutationPair(np.argsort(p.row_order), np.argsort(p.col_order))


def permute_update(upd, p):
    """Express a triplet of ``m`` in the coordinates of ``apply_permutation(m, p)``.

    The sign convention is re-applied, since the leading entry of ``u`` can
    move under the permutation.
    """
    from .rank1 import Rank1Update, apply_sign_convention

    u, v = apply_sign_convention(upd.u[p.row_order], upd.v[p.col_order])
    return Rank1Update(upd.s, u, v, converged=upd.converged)
