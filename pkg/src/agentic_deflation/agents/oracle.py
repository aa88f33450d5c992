"""Deterministic numerical stand-ins for the three agent roles."""
from ..matrix import as_matrix, frobenius_norm
from ..rank1 import reconstruct, top_singular_triplet
from .parsing import AgentVerdict, Verdict

__all__ = [
    "ORACLE_SEED",
    "oracle_solve",
    "oracle_evaluate_rank1",
    "oracle_stop",
    "OracleSolver",
    "OracleRank1Evaluator",
    "OracleStopEvaluator",
]

ORACLE_SEED = 0


def oracle_solve(m):
    return top_singular_triplet(m, seed=ORACLE_SEED)


def oracle_evaluate_rank1(a, proposal, epsilon=0.05, best=None):
    """Accept iff the proposal's residual is within ``1 + epsilon`` of the
    optimal rank-1 residual (Frobenius norm)."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    a = as_matrix(a)
    if best is None:
        best = oracle_solve(a)
    err = frobenius_norm(a - reconstruct(proposal, *a.shape))
    opt = frobenius_norm(a - reconstruct(best, *a.shape))
    ok = err <= (1.0 + epsilon) * opt
    return AgentVerdict(Verdict.ACCEPT if ok else Verdict.REJECT,
                        f"residual {err:.6g} vs optimal {opt:.6g}")


def oracle_stop(original, current, fraction=0.1):
    """Stop once ``||current||_F <= fraction * ||original||_F``."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    f0 = frobenius_norm(original)
    fc = frobenius_norm(current)
    stop = f0 == 0 or fc <= fraction * f0
    return AgentVerdict(Verdict.STOP if stop else Verdict.CONTINUE,
                        f"residual norm {fc:.6g} of original {f0:.6g}")


class OracleSolver:
    def propose(self, m):
        return oracle_solve(m)


class OracleRank1Evaluator:
    def __init__(self, epsilon=0.05):
        self.epsilon = epsilon

    def evaluate(self, m, proposal):
        return oracle_evaluate_rank1(m, proposal, self.epsilon)


class OracleStopEvaluator:
    def __init__(self, fraction=0.1):
        self.fraction = fraction

    def evaluate(self, original, current):
        return oracle_stop(original, current, self.fraction)
