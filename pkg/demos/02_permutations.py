"""
Reordering rows and columns
===========================

Sorting by sums or grouping by binarized patterns makes block structure easy
to see. Every ordering is undone exactly by its inverse, and none of them
change the singular values.
"""
import sys
import tempfile
from pathlib import Path

import numpy as np

from agentic_deflation import apply_permutation, invert_permutation, top_singular_triplet
from agentic_deflation.matrix import quantize_u8, render_pgm, upscale
from agentic_deflation.permutation import permutation_for

rng = np.random.default_rng(3)

# two hidden blocks, shuffled
a = np.zeros((8, 8))
a[:4, :3] = 200
a[4:, 3:] = 120
a += rng.integers(0, 20, size=a.shape)
a = a[rng.permutation(8)][:, rng.permutation(8)]

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
for strategy in ("none", "sort", "block"):
    p = permutation_for(a, strategy)
    pa = apply_permutation(a, p)
    print(strategy, "rows", p.row_order, "cols", p.col_order)
    print((pa > a.mean()).astype(int))

    # round trip and invariance
    assert np.array_equal(apply_permutation(pa, invert_permutation(p)), a)
    assert np.isclose(top_singular_triplet(pa).s, top_singular_triplet(a).s)

    (out / f"{strategy}.pgm").write_bytes(render_pgm(upscale(quantize_u8(pa), 16)))

print("images written to", out)
