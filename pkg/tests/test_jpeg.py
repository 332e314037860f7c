import numpy as np
import pytest

from fadewm.errors import InvalidQuality
from fadewm.jpeg import LUMINANCE_QTABLE, dct_matrix, jpeg_like_roundtrip, roundtrip_plane, scaled_qtable
from fadewm.metrics import mse
from fadewm.raster import Precision, RasterImage, round_half_away
from fadewm.samples import COVER_NAMES, make_cover

from conftest import random_image


def test_dct_is_orthonormal_and_matches_definition():
    c = dct_matrix()
    assert np.allclose(c @ c.T, np.eye(8), atol=1e-14)
    x = np.arange(8.0)
    direct = [
        (np.sqrt(1 / 8) if k == 0 else np.sqrt(2 / 8)) * sum(x[i] * np.cos(np.pi * (2 * i + 1) * k / 16) for i in range(8))
        for k in range(8)
    ]
    assert np.allclose(c @ x, direct)


def test_qtable_scaling():
    assert np.all(scaled_qtable(100) == 1)
    assert np.array_equal(scaled_qtable(50), LUMINANCE_QTABLE)
    assert scaled_qtable(10)[0, 0] == 80  # S = 500
    assert scaled_qtable(1).max() == 255
    for bad in (0, 101, 50.5, True):
        with pytest.raises(InvalidQuality):
            scaled_qtable(bad)


def test_quality_100_error_at_most_one(rng):
    q = scaled_qtable(100)
    worst = 0
    for _ in range(1000):
        block = rng.integers(0, 256, (8, 8)).astype(float)
        out = np.clip(round_half_away(roundtrip_plane(block, q)), 0, 255)
        worst = max(worst, np.abs(out - block).max())
    assert worst <= 1


@pytest.mark.parametrize("quality", [50, 75, 90, 100])
def test_constant_blocks(quality):
    for v in range(256):
        img = RasterImage(np.full((1, 8, 8), float(v)))
        out = jpeg_like_roundtrip(img, quality)
        assert np.abs(out.data - v).max() <= 1


def test_padding_and_precision(rng):
    img = random_image(rng, 13, 10, 3)
    out = jpeg_like_roundtrip(img, 80)
    assert out.dims == (13, 10) and out.channels == 3
    assert out.precision is Precision.CARRIER8
    real = jpeg_like_roundtrip(RasterImage(img.data, Precision.REAL), 80)
    assert real.precision is Precision.REAL


@pytest.mark.parametrize("name", COVER_NAMES)
def test_mse_non_increasing_in_quality(name):
    img = make_cover(name, 128)
    errs = [mse(img, jpeg_like_roundtrip(img, q)) for q in (10, 30, 50, 70, 90)]
    assert all(b <= a for a, b in zip(errs, errs[1:])), errs


@pytest.mark.parametrize("name", COVER_NAMES)
def test_near_idempotent(name):
    img = make_cover(name, 128)
    once = jpeg_like_roundtrip(img, 50)
    twice = jpeg_like_roundtrip(once, 50)
    assert np.sqrt(mse(once, twice)) < 0.5
