"""Dense matrix helpers: norms, error metrics, clamping, 8-bit quantization
and grayscale rendering.

Matrices are plain 2-D ``float64`` numpy arrays stored row-major. Quantized
data is still held as floats; quantization is a transformation, not a dtype.
"""
import io

import numpy as np

__all__ = [
    "DimensionError",
    "as_matrix",
    "frobenius_norm",
    "rmse_to_zero",
    "rmse_between",
    "clamp_nonneg",
    "round_half_away",
    "quantize_u8",
    "render_pgm",
    "render_png",
    "read_pgm",
    "upscale",
]


class DimensionError(ValueError):
    """Shapes of the operands do not agree."""


def as_matrix(m):
    """Validate ``m`` and return it as a C-contiguous float64 2-D array."""
    a = np.ascontiguousarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def frobenius_norm(m):
    m = as_matrix(m)
    return float(np.sqrt(np.sum(m * m)))


def rmse_to_zero(m):
    """Root-mean-square magnitude of the entries of ``m``."""
    m = as_matrix(m)
    return frobenius_norm(m) / np.sqrt(m.size)


def rmse_between(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return rmse_to_zero(a - b)


def clamp_nonneg(m):
    return np.maximum(as_matrix(m), 0.0)


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize_u8(m):
    """Round half away from zero, then clip to [0, 255]."""
    return np.clip(round_half_away(as_matrix(m)), 0.0, 255.0)


def upscale(m, scale):
    """Nearest-neighbour upscaling by an integer factor."""
    if int(scale) != scale or scale < 1:
        raise ValueError(f"scale must be a positive integer, got {scale!r}")
    scale = int(scale)
    return np.repeat(np.repeat(as_matrix(m), scale, axis=0), scale, axis=1)


def _pixels(m, scale):
    m = as_matrix(m)
    if m.min() < 0 or m.max() > 255:
        raise ValueError(
            f"entries must lie in [0, 255] (got [{m.min()}, {m.max()}]); quantize first"
        )
    return upscale(np.rint(m), scale).astype(np.uint8)


def render_pgm(m, scale=1):
    """Encode ``m`` as a binary (P5) PGM image, maxval 255."""
    px = _pixels(m, scale)
    h, w = px.shape
    return b"P5\n%d %d\n255\n" % (w, h) + px.tobytes()


def render_png(m, scale=1):
    """Same pixel grid as :func:`render_pgm`, encoded as 8-bit grayscale PNG."""
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(_pixels(m, scale), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def read_pgm(data):
    """Decode a P5 PGM byte string (maxval <= 255) into a float matrix."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos)
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise ValueError(f"not a binary PGM (magic {tokens[0]!r})")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval > 255:
        raise ValueError("16-bit PGM is not supported")
    body = data[pos + 1 : pos + 1 + w * h]
    if len(body) != w * h:
        raise ValueError(f"expected {w * h} pixel bytes, got {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w).astype(np.float64)
