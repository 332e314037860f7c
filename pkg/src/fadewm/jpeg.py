"""Baseline-JPEG style lossy round trip: 8x8 DCT, quantize, dequantize, IDCT.

No entropy coding is performed; only the reconstruction matters here.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidQuality
from .raster import Precision, RasterImage, round_half_away

BLOCK = 8

# ITU-T T.81 Annex K, table K.1
LUMINANCE_QTABLE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.float64)


def dct_matrix(n: int = BLOCK) -> np.ndarray:
    """Orthonormal DCT-II matrix ``C`` so that ``C @ x`` transforms columns."""
    c = np.empty((n, n))
    for k in range(n):
        scale = math.sqrt(1.0 / n) if k == 0 else math.sqrt(2.0 / n)
        for i in range(n):
            c[k, i] = scale * math.cos(math.pi * (2 * i + 1) * k / (2 * n))
    return c


_C = dct_matrix()


def scaled_qtable(quality: int) -> np.ndarray:
    """IJG quality scaling of the luminance table."""
    if isinstance(quality, bool) or int(quality) != quality or not 1 <= quality <= 100:
        raise InvalidQuality(f"quality must be an integer in 1..100, got {quality!r}")
    quality = int(quality)
    s = 5000 // quality if quality < 50 else 200 - 2 * quality
    return np.clip(np.floor((LUMINANCE_QTABLE * s + 50) / 100), 1, 255)


def _blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK).swapaxes(1, 2)


def _unblocks(blocks: np.ndarray) -> np.ndarray:
    bh, bw = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(bh * BLOCK, bw * BLOCK)


def roundtrip_plane(plane: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Compress and reconstruct one plane whose sides are multiples of 8."""
    blocks = _blocks(plane - 128.0)
    coeffs = _C @ blocks @ _C.T
    coeffs = round_half_away(coeffs / q) * q
    return _unblocks(_C.T @ coeffs @ _C) + 128.0


def jpeg_like_roundtrip(img: RasterImage, quality: int) -> RasterImage:
    """Per-plane DCT quantization round trip; keeps the input precision."""
    q = scaled_qtable(quality)
    h, w = img.height, img.width
    ph = -h % BLOCK
    pw = -w % BLOCK
    out = np.empty_like(img.data)
    for i, plane in enumerate(img.data):
        padded = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
        out[i] = roundtrip_plane(padded, q)[:h, :w]
    out = np.clip(out, 0.0, 255.0)
    if img.precision is Precision.CARRIER8:
        out = np.clip(round_half_away(out), 0.0, 255.0)
    return img.with_data(out)
