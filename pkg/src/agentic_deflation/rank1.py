"""Top singular triplet by power iteration, the clamped deflation step, and
the two numerical baselines (Frobenius-fraction stopping and fixed k steps).
"""
import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .matrix import DimensionError, as_matrix, clamp_nonneg, frobenius_norm

__all__ = [
    "ConvergenceWarning",
    "DegenerateInputError",
    "Rank1Update",
    "StopReason",
    "DeflationStep",
    "DeflationTrace",
    "apply_sign_convention",
    "top_singular_triplet",
    "reconstruct",
    "deflate_step",
    "baseline_deflate",
    "baseline_deflate_k",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


class ConvergenceWarning(UserWarning):
    pass


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class Rank1Update:
    """Singular triplet ``(s, u, v)`` standing for ``s * outer(u, v)``."""

    s: float
    u: np.ndarray
    v: np.ndarray
    converged: bool = True

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64).ravel()
        v = np.asarray(self.v, dtype=np.float64).ravel()
        if not (np.isfinite(self.s) and np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise ValueError("triplet components must be finite")
        if self.s < 0:
            raise ValueError(f"singular value must be nonnegative, got {self.s}")
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def shape(self):
        return (self.u.size, self.v.size)

    def to_dict(self):
        return {"s": self.s, "u": self.u.tolist(), "v": self.v.tolist()}

    @classmethod
    def zero(cls, rows, cols):
        u = np.zeros(rows)
        v = np.zeros(cols)
        u[0] = v[0] = 1.0
        return cls(0.0, u, v)


class StopReason(str, enum.Enum):
    THRESHOLD_REACHED = "ThresholdReached"
    FIXED_STEPS_DONE = "FixedStepsDone"
    EVALUATOR_STOP = "EvaluatorStop"
    MAX_STEPS_CAP = "MaxStepsCap"
    ABORTED = "Aborted"


@dataclass
class DeflationStep:
    update: Rank1Update
    residual: np.ndarray
    residual_fnorm: float
    rejections: int = 0
    # one dict per solver attempt: proposal, verdict or error
    attempts: list = field(default_factory=list)
    stop_verdict: str = None


@dataclass
class DeflationTrace:
    original: np.ndarray
    steps: list = field(default_factory=list)
    stop_reason: StopReason = StopReason.THRESHOLD_REACHED
    residual: np.ndarray = None
    initial_fnorm: float = 0.0
    failure: str = None
    permutation: object = None
    metadata: dict = field(default_factory=dict)

    @property
    def n_steps(self):
        return len(self.steps)

    @property
    def aborted(self):
        return self.stop_reason is StopReason.ABORTED

    @property
    def fnorms(self):
        return [self.initial_fnorm] + [st.residual_fnorm for st in self.steps]


def apply_sign_convention(u, v):
    """Flip ``(u, v)`` together so the largest-magnitude entry of ``u`` is
    positive (first index wins ties)."""
    i = int(np.argmax(np.abs(u)))
    if u[i] < 0:
        return -u, -v
    return u, v


def top_singular_triplet(m, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=0):
    """Dominant singular triplet of ``m`` by power iteration on the smaller
    Gram matrix.

    The start vector is the normalised row/column sum of ``m``, which makes
    the iteration equivariant under row and column permutations. If that
    start is (nearly) orthogonal to the dominant subspace, a seeded Gaussian
    start is used instead.

    Iteration stops once successive eigenvalue estimates agree to a relative
    ``tol`` and the Gram eigen-residual ``||G x - lam x||`` is below
    ``tol * lam``. On hitting ``max_iter`` the best estimate is
    returned with ``converged=False`` and a :class:`ConvergenceWarning`.
    """
    m = as_matrix(m)
    if tol <= 0:
        raise ValueError("tol must be positive")
    rows, cols = m.shape
    if not np.any(m):
        raise DegenerateInputError("top singular triplet of a zero matrix is undefined")

    # Power-iterate on the Gram matrix of the smaller side.
    right = cols <= rows
    gram = m.T @ m if right else m @ m.T
    lam_max = float(np.max(np.abs(np.diag(gram))))

    x = m.sum(axis=0) if right else m.sum(axis=1)
    gx = gram @ x
    nx = np.linalg.norm(x)
    if nx == 0 or np.linalg.norm(gx) <= 1e-12 * lam_max * nx:
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(gram.shape[0])
        gx = gram @ x
        if np.linalg.norm(gx) == 0:
            x = np.ones(gram.shape[0])
            gx = gram @ x
    scale = np.linalg.norm(x)
    x = x / scale
    gx = gx / scale

    lam = float(x @ gx)
    converged = False
    for _ in range(max_iter):
        x_new = gx / np.linalg.norm(gx)
        gx = gram @ x_new
        lam_new = float(x_new @ gx)
        resid = np.linalg.norm(gx - lam_new * x_new)
        done = abs(lam_new - lam) <= tol * abs(lam_new) and resid <= tol * abs(lam_new)
        x, lam = x_new, lam_new
        if done:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"power iteration did not converge in {max_iter} iterations",
            ConvergenceWarning,
            stacklevel=2,
        )

    if right:
        v = x
        mu = m @ v
        s = float(np.linalg.norm(mu))
        u = mu / s
    else:
        u = x
        mv = m.T @ u
        s = float(np.linalg.norm(mv))
        v = mv / s
    u, v = apply_sign_convention(u, v)
    return Rank1Update(s, u, v, converged=converged)


def reconstruct(upd, rows=None, cols=None):
    """Dense ``s * outer(u, v)``."""
    if rows is not None and upd.u.size != rows or cols is not None and upd.v.size != cols:
        raise DimensionError(
            f"triplet has shape {upd.shape}, expected ({rows}, {cols})"
        )
    return upd.s * np.outer(upd.u, upd.v)


def deflate_step(a, upd, clamp=True):
    """``max(0, a - s u v^T)``; pass ``clamp=False`` for plain subtraction."""
    a = as_matrix(a)
    out = a - reconstruct(upd, *a.shape)
    return clamp_nonneg(out) if clamp else out


def _record(trace, work, upd):
    fn = frobenius_norm(work)
    trace.steps.append(DeflationStep(upd, work, fn))
    return fn


def baseline_deflate(a, stop_fraction=0.1, max_steps=32, clamp=True,
                     tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=0):
    """Deflate with exact top triplets until the residual Frobenius norm is at
    most ``stop_fraction`` of the original, or ``max_steps`` is reached."""
    if not 0 < stop_fraction < 1:
        raise ValueError("stop_fraction must lie in (0, 1)")
    a = as_matrix(a)
    f0 = frobenius_norm(a)
    trace = DeflationTrace(original=a, initial_fnorm=f0)
    work, fn = a, f0
    while True:
        if fn <= stop_fraction * f0:
            trace.stop_reason = StopReason.THRESHOLD_REACHED
            break
        if trace.n_steps >= max_steps:
            trace.stop_reason = StopReason.MAX_STEPS_CAP
            break
        upd = top_singular_triplet(work, tol, max_iter, seed)
        work = deflate_step(work, upd, clamp)
        fn = _record(trace, work, upd)
    trace.residual = work
    return trace


def baseline_deflate_k(a, k, clamp=True, tol=DEFAULT_TOL,
                       max_iter=DEFAULT_MAX_ITER, seed=0):
    """Exactly ``k`` top-triplet deflation steps. Once the residual is exactly
    zero the remaining steps are recorded as ``s = 0`` no-ops."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a = as_matrix(a)
    trace = DeflationTrace(original=a, initial_fnorm=frobenius_norm(a),
                           stop_reason=StopReason.FIXED_STEPS_DONE)
    work = a
    for _ in range(k):
        if np.any(work):
            upd = top_singular_triplet(work, tol, max_iter, seed)
            work = deflate_step(work, upd, clamp)
        else:
            upd = Rank1Update.zero(*a.shape)
        _record(trace, work, upd)
    trace.residual = work
    return trace
