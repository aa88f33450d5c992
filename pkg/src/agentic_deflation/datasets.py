"""Loaders for the Digits (8x8, 4-bit CSV) and CIFAR-10 (binary batch) data.

Both loaders return integer-valued float matrices in [0, 255]. No network
fetching happens here; callers supply file paths.
"""
import gzip
import os
from pathlib import Path

import numpy as np

from .matrix import round_half_away

__all__ = [
    "DatasetFormatError",
    "DatasetRangeError",
    "CIFAR_RECORD_SIZE",
    "load_digits_csv",
    "load_cifar10_bin",
    "bundled_digits_path",
    "sample_indices",
]

CIFAR_RECORD_SIZE = 1 + 3 * 1024
LUMA = (0.299, 0.587, 0.114)


class DatasetFormatError(ValueError):
    pass


class DatasetRangeError(DatasetFormatError):
    pass


def _open_text(path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt")
    return open(path)


def load_digits_csv(path, return_labels=False):
    """Parse a Digits CSV: 64 integers in [0, 16] per line, optionally
    followed by a class label. Values are rescaled by 255/16 and rounded."""
    matrices, labels = [], []
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                fields = [float(tok) for tok in line.split(",")]
            except ValueError as err:
                raise DatasetFormatError(f"{path}:{lineno}: {err}") from None
            if len(fields) not in (64, 65) or not all(f.is_integer() for f in fields):
                raise DatasetFormatError(
                    f"{path}:{lineno}: expected 64 integer pixels (+ optional label), "
                    f"got {line[:40]!r}..."
                )
            values = [int(f) for f in fields]
            px = np.array(values[:64], dtype=np.float64)
            if px.min() < 0 or px.max() > 16:
                raise DatasetRangeError(f"{path}:{lineno}: pixel value outside [0, 16]")
            matrices.append(round_half_away(px * 255.0 / 16.0).reshape(8, 8))
            labels.append(values[64] if len(values) == 65 else None)
    if return_labels:
        return matrices, labels
    return matrices


def load_cifar10_bin(path, limit=None):
    """Read a CIFAR-10 binary batch and convert each record to a 32x32
    grayscale matrix with Rec.601 luma weights."""
    raw = Path(path).read_bytes()
    if len(raw) % CIFAR_RECORD_SIZE:
        raise DatasetFormatError(
            f"{path}: size {len(raw)} is not a multiple of the "
            f"{CIFAR_RECORD_SIZE}-byte record size"
        )
    recs = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR_RECORD_SIZE)
    if limit is not None:
        recs = recs[:limit]
    rgb = recs[:, 1:].reshape(-1, 3, 32, 32).astype(np.float64)
    gray = LUMA[0] * rgb[:, 0] + LUMA[1] * rgb[:, 1] + LUMA[2] * rgb[:, 2]
    gray = np.clip(round_half_away(gray), 0, 255)
    return [g for g in gray]


def bundled_digits_path():
    """Path of the Digits CSV shipped with scikit-learn, or None."""
    try:
        from importlib.util import find_spec

        spec = find_spec("sklearn")
    except ImportError:
        return None
    if spec is None or spec.origin is None:
        return None
    p = Path(spec.origin).parent / "datasets" / "data" / "digits.csv.gz"
    return p if p.exists() else None


def default_cifar_path():
    p = os.environ.get("DEFLATE_CIFAR_PATH")
    return Path(p) if p else None


def sample_indices(total, n, seed):
    """Deterministic sorted subset of ``range(total)`` of size ``min(n, total)``."""
    rng = np.random.default_rng(seed)
    n = min(n, total)
    return np.sort(rng.choice(total, size=n, replace=False)).tolist()
