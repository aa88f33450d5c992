"""Prompt templates for the solver and the two image-based evaluators.

Templates are versioned; any wording change must bump the version and
regenerate the golden prompt in the test data.
"""
from dataclasses import dataclass

from ..matrix import as_matrix, round_half_away
from ..rank1 import top_singular_triplet
from ..synthetic import SyntheticSpec, generate
from .parsing import serialize_triplet

__all__ = [
    "TEMPLATE_VERSION",
    "ICL_PRECISION",
    "IclExample",
    "matrix_to_text",
    "build_icl_examples",
    "build_solver_prompt",
    "RANK1_INSTRUCTION",
    "STOP_INSTRUCTION",
]

TEMPLATE_VERSION = "solver-v1"
ICL_PRECISION = 10

_TASK = (
    "You are a numerical linear algebra solver. Find the dominant rank-1 "
    "component of a nonnegative integer matrix: its largest singular value s, "
    "the left singular vector u (one entry per row, unit length) and the right "
    "singular vector v (one entry per column, unit length), so that s * u * v^T "
    "is the best rank-1 approximation of the matrix."
)

RANK1_INSTRUCTION = (
    "Image 1 is a matrix rendered as a grayscale image (brighter = larger). "
    "Image 2 is a proposed rank-1 approximation of it. Decide whether image 2 "
    "captures the dominant structure of image 1. Reply with ACCEPT or REJECT, "
    "then a one-sentence reason."
)

STOP_INSTRUCTION = (
    "Image 1 is the original matrix rendered as a grayscale image (brighter = "
    "larger). Image 2 is what remains after subtracting rank-1 components. "
    "If image 2 still contains meaningful structure, reply CONTINUE; if only "
    "noise or nothing is left, reply STOP. Then give a one-sentence reason."
)


@dataclass(frozen=True)
class IclExample:
    matrix_text: str
    triplet_text: str


def matrix_to_text(m):
    """Rows of space-separated integers, one row per line."""
    m = round_half_away(as_matrix(m)).astype(int)
    return "\n".join(" ".join(str(x) for x in row) for row in m)


def build_icl_examples(count, dims, seed=0):
    """``count`` worked examples on seeded synthetic matrices of shape ``dims``,
    each paired with its numerically computed top triplet."""
    rows, cols = dims
    spec = SyntheticSpec(rows=rows, cols=cols, k_max=min(10, rows, cols), seed=seed)
    examples = []
    for i in range(count):
        m = generate(spec, i).matrix
        upd = top_singular_triplet(m)
        examples.append(IclExample(matrix_to_text(m), serialize_triplet(upd, ICL_PRECISION)))
    return examples


def build_solver_prompt(m_permuted, icl=()):
    m = as_matrix(m_permuted)
    rows, cols = m.shape
    parts = [_TASK, ""]
    for i, ex in enumerate(icl, start=1):
        n_rows = ex.matrix_text.count("\n") + 1
        n_cols = len(ex.matrix_text.split("\n", 1)[0].split())
        parts += [
            f"Example {i}:",
            f"Matrix ({n_rows}x{n_cols}):",
            ex.matrix_text,
            "Answer:",
            ex.triplet_text,
            "",
        ]
    parts += [
        f"Target matrix ({rows}x{cols}):",
        matrix_to_text(m),
        "",
        'Output format: reply with a single JSON object {"s": number, '
        f'"u": [{rows} numbers], "v": [{cols} numbers]}} and nothing else.',
    ]
    return "\n".join(parts) + "\n"
