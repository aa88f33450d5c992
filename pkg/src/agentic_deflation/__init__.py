"""Agentic matrix deflation: rank-1 proposals gated by evaluator agents, with
deterministic numerical oracles and a remote chat-endpoint protocol."""
__version__ = "0.1.0"

from .matrix import (
    DimensionError,
    clamp_nonneg,
    frobenius_norm,
    quantize_u8,
    render_pgm,
    render_png,
    rmse_between,
    rmse_to_zero,
)
from .rank1 import (
    DeflationTrace,
    Rank1Update,
    StopReason,
    baseline_deflate,
    baseline_deflate_k,
    deflate_step,
    reconstruct,
    top_singular_triplet,
)
from .permutation import (
    PermutationPair,
    apply_permutation,
    block_permutation,
    invert_permutation,
    sort_permutation,
)
from .synthetic import SyntheticSpec, generate
from .orchestrator import RunConfig, build_agents, run_deflation
from .evaluation import rmse_gap, summarize
