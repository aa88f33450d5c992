import numpy as np
import pytest

from agentic_deflation.agents import (
    Verdict,
    oracle_evaluate_rank1,
    oracle_solve,
    oracle_stop,
)
from agentic_deflation.matrix import frobenius_norm
from agentic_deflation.permutation import PermutationPair, apply_permutation, permute_update
from agentic_deflation.rank1 import Rank1Update, deflate_step, reconstruct


def test_solve_diagonal():
    t = oracle_solve(np.diag([3.0, 1.0]))
    assert t.s == pytest.approx(3.0)


def test_solve_equivariant(rng):
    for _ in range(20):
        m = np.floor(rng.uniform(0, 256, size=(10, 8)))
        p = PermutationPair(rng.permutation(10), rng.permutation(8))
        tp = oracle_solve(apply_permutation(m, p))
        expected = permute_update(oracle_solve(m), p)
        assert abs(tp.s - expected.s) <= 1e-9 * expected.s
        np.testing.assert_allclose(tp.u, expected.u, atol=1e-9)
        np.testing.assert_allclose(tp.v, expected.v, atol=1e-9)


def test_solve_rank1_deflates_to_zero():
    a = np.outer([3.0, 1.0, 2.0], [1.0, 4.0])
    assert frobenius_norm(deflate_step(a, oracle_solve(a))) < 1e-9


def test_rank1_gate_accepts_best(rng):
    a = rng.uniform(0, 255, size=(6, 6))
    assert oracle_evaluate_rank1(a, oracle_solve(a)).kind is Verdict.ACCEPT


def test_rank1_gate_rejects_zero_update(rng):
    a = rng.uniform(0, 255, size=(6, 6))
    best = oracle_solve(a)
    assert frobenius_norm(a - reconstruct(best)) < frobenius_norm(a) / 1.05
    zero = Rank1Update(0.0, best.u, best.v)
    assert oracle_evaluate_rank1(a, zero).kind is Verdict.REJECT


def test_rank1_gate_boundary(rng):
    a = rng.uniform(0, 255, size=(6, 5))
    best = oracle_solve(a)
    opt = frobenius_norm(a - reconstruct(best))
    target = 1.05 * opt

    def err(s):
        return frobenius_norm(a - reconstruct(Rank1Update(s, best.u, best.v)))

    # residual grows monotonically as s shrinks below the optimum
    lo, hi = 0.0, best.s
    for _ in range(200):
        mid = (lo + hi) / 2
        if err(mid) > target:
            lo = mid
        else:
            hi = mid
    at_boundary = Rank1Update(hi, best.u, best.v)
    assert err(hi) <= target
    assert oracle_evaluate_rank1(a, at_boundary, 0.05).kind is Verdict.ACCEPT
    # nudge the residual up by > 1e-6
    s_out = hi
    while err(s_out) <= target + 1e-6:
        s_out -= 1e-6
    assert oracle_evaluate_rank1(a, Rank1Update(s_out, best.u, best.v), 0.05).kind is Verdict.REJECT


def test_stop_rule(rng):
    a = rng.uniform(0, 255, size=(5, 5))
    assert oracle_stop(a, a).kind is Verdict.CONTINUE
    assert oracle_stop(a, a, 0.99).kind is Verdict.CONTINUE
    assert oracle_stop(a, np.zeros_like(a)).kind is Verdict.STOP
    assert oracle_stop(np.zeros((2, 2)), np.zeros((2, 2))).kind is Verdict.STOP
    assert oracle_stop(a, 0.1 * a).kind is Verdict.STOP
    assert oracle_stop(a, 0.1001 * a).kind is Verdict.CONTINUE
