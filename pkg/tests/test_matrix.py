import numpy as np
import pytest

from agentic_deflation.matrix import (
    DimensionError,
    as_matrix,
    clamp_nonneg,
    frobenius_norm,
    quantize_u8,
    read_pgm,
    render_pgm,
    render_png,
    rmse_between,
    rmse_to_zero,
)
from oracles import loop_frobenius, loop_rmse


def test_frobenius_zero_and_identity():
    assert frobenius_norm(np.zeros((3, 3))) == 0
    assert frobenius_norm(np.eye(2)) == pytest.approx(1.41421356, abs=1e-8)


def test_frobenius_matches_loop_oracle(rng):
    m = rng.standard_normal((4, 4))
    assert abs(frobenius_norm(m) - loop_frobenius(m.tolist())) < 1e-12


def test_rmse_to_zero():
    assert rmse_to_zero(np.zeros((3, 5))) == 0
    assert rmse_to_zero(np.full((2, 2), 5.0)) == 5.0


def test_rmse_to_zero_matches_oracle(rng):
    m = rng.standard_normal((8, 8))
    assert abs(rmse_to_zero(m) - loop_rmse(m.tolist())) < 1e-12


def test_rmse_between(rng):
    a = rng.standard_normal((3, 7))
    assert rmse_between(a, a) == 0
    assert rmse_between(np.ones((2, 2)), np.zeros((2, 2))) == 1
    b = rng.standard_normal((3, 7))
    assert abs(rmse_between(a, b) - loop_rmse((a - b).tolist())) < 1e-12


def test_rmse_between_shape_mismatch():
    with pytest.raises(DimensionError):
        rmse_between(np.zeros((2, 2)), np.zeros((2, 3)))


def test_clamp():
    out = clamp_nonneg([[-1, 2], [0, -0.5]])
    np.testing.assert_array_equal(out, [[0, 2], [0, 0]])
    pos = np.array([[1.0, 0.0], [3.5, 2.0]])
    np.testing.assert_array_equal(clamp_nonneg(pos), pos)


def test_clamp_mixed_signs(rng):
    m = rng.standard_normal((6, 6))
    out = clamp_nonneg(m)
    assert out.min() == 0
    np.testing.assert_array_equal(out[m > 0], m[m > 0])


def test_quantize_examples():
    np.testing.assert_array_equal(quantize_u8([[255.7, -3.2, 127.5]]), [[255, 0, 128]])
    np.testing.assert_array_equal(quantize_u8([[0.5, 1.49, 254.5]]), [[1, 1, 255]])


def test_quantize_random(rng):
    m = rng.uniform(-50, 300, size=(10, 10))
    q = quantize_u8(m)
    assert np.all(q == np.round(q))
    assert q.min() >= 0 and q.max() <= 255
    assert np.all(np.abs(q - np.clip(m, 0, 255)) <= 0.5)


@pytest.mark.parametrize("bad", [np.zeros(3), np.zeros((0, 2)), [[np.nan, 1.0]], [[np.inf]]])
def test_as_matrix_rejects(bad):
    with pytest.raises(ValueError):
        as_matrix(bad)


def _header_tokens(data):
    return data.split(maxsplit=4)[:4]


def test_pgm_single_pixel():
    data = render_pgm([[0]], 1)
    assert _header_tokens(data) == [b"P5", b"1", b"1", b"255"]
    assert data == b"P5\n1 1\n255\n\x00"


def test_pgm_nearest_neighbour():
    data = render_pgm([[0, 255]], 2)
    assert _header_tokens(data) == [b"P5", b"4", b"2", b"255"]
    assert data.endswith(bytes([0, 0, 255, 255, 0, 0, 255, 255]))


def test_pgm_index_mapping(data_dir):
    from agentic_deflation.datasets import load_digits_csv

    m = load_digits_csv(data_dir / "digits_10.csv")[0]
    px = read_pgm(render_pgm(m, 8))
    assert px.shape == (64, 64)
    for r in range(64):
        for c in range(64):
            assert px[r, c] == m[r // 8, c // 8]


def test_pgm_range_error():
    with pytest.raises(ValueError, match="quantize"):
        render_pgm([[256.0]])
    with pytest.raises(ValueError):
        render_pgm([[-1.0]])


def test_png_same_pixels(rng):
    from PIL import Image
    import io

    m = quantize_u8(rng.uniform(0, 255, size=(5, 3)))
    img = Image.open(io.BytesIO(render_png(m, 3)))
    assert img.mode == "L" and img.size == (9, 15)
    np.testing.assert_array_equal(np.asarray(img), read_pgm(render_pgm(m, 3)))
