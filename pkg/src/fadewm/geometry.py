"""Resampling: resize and rotate.

Both use pixel-center alignment.  For resize the source coordinate of a
destination index ``d`` is ``(d + 0.5) * scale - 0.5`` with ``scale = src/dst``,
clamped to the image edge.  Rotations by multiples of 90 degrees are exact
index permutations; positive angles turn the picture counterclockwise.
"""
from __future__ import annotations

import enum
import math

import numpy as np

from .errors import ParameterError
from .raster import Precision, RasterImage

_EDGE_EPS = 1e-9


class Interp(enum.Enum):
    NEAREST = "nearest"
    BILINEAR = "bilinear"


class Canvas(enum.Enum):
    KEEP_SIZE = "keep"
    EXPAND = "expand"


def _source_coords(n_dst: int, n_src: int) -> np.ndarray:
    scale = n_src / n_dst
    coords = (np.arange(n_dst) + 0.5) * scale - 0.5
    return np.clip(coords, 0.0, n_src - 1)


def _nearest_index(coords: np.ndarray) -> np.ndarray:
    return np.floor(coords + 0.5).astype(np.intp)


def resize(img: RasterImage, new_w: int, new_h: int, interp: Interp = Interp.BILINEAR) -> RasterImage:
    """Resample to ``new_w`` x ``new_h``; returns a real-valued image."""
    if new_w < 1 or new_h < 1:
        raise ParameterError(f"target size must be at least 1x1, got {new_w}x{new_h}")
    interp = Interp(interp)
    xs = _source_coords(new_w, img.width)
    ys = _source_coords(new_h, img.height)
    data = img.data
    if interp is Interp.NEAREST:
        xi = np.minimum(_nearest_index(xs), img.width - 1)
        yi = np.minimum(_nearest_index(ys), img.height - 1)
        out = data[:, yi][:, :, xi]
    else:
        x0 = np.floor(xs).astype(np.intp)
        y0 = np.floor(ys).astype(np.intp)
        x1 = np.minimum(x0 + 1, img.width - 1)
        y1 = np.minimum(y0 + 1, img.height - 1)
        tx = xs - x0
        ty = (ys - y0)[:, np.newaxis]
        rows0 = data[:, y0]
        rows1 = data[:, y1]
        top = rows0[:, :, x0] * (1 - tx) + rows0[:, :, x1] * tx
        bottom = rows1[:, :, x0] * (1 - tx) + rows1[:, :, x1] * tx
        out = top * (1 - ty) + bottom * ty
    return RasterImage(out, Precision.REAL)


def rotate(
    img: RasterImage,
    degrees: float,
    interp: Interp = Interp.BILINEAR,
    canvas: Canvas = Canvas.KEEP_SIZE,
) -> RasterImage:
    """Rotate counterclockwise about the image center.

    Multiples of 90 degrees are lossless permutations (width and height swap
    for 90/270) and keep the input precision.  Any other angle resamples with
    ``interp`` and returns a real-valued image, filling uncovered pixels with 0.
    """
    interp, canvas = Interp(interp), Canvas(canvas)
    degrees = math.fmod(float(degrees), 360.0)
    if degrees < 0:
        degrees += 360.0
    quarter = degrees / 90.0
    if quarter == math.floor(quarter):
        k = int(quarter) % 4
        return img.with_data(np.rot90(img.data, k, axes=(1, 2)))

    theta = math.radians(degrees)
    c, s = math.cos(theta), math.sin(theta)
    h, w = img.height, img.width
    if canvas is Canvas.EXPAND:
        out_w = max(1, math.ceil(abs(w * c) + abs(h * s) - 1e-6))
        out_h = max(1, math.ceil(abs(w * s) + abs(h * c) - 1e-6))
    else:
        out_w, out_h = w, h

    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    ox, oy = (out_w - 1) / 2.0, (out_h - 1) / 2.0
    dx = np.arange(out_w)[np.newaxis, :] - ox
    dy = np.arange(out_h)[:, np.newaxis] - oy
    # inverse map: destination offset rotated by -theta (y axis points down)
    u = c * dx - s * dy + cx
    v = s * dx + c * dy + cy

    inside = (u >= -_EDGE_EPS) & (u <= w - 1 + _EDGE_EPS) & (v >= -_EDGE_EPS) & (v <= h - 1 + _EDGE_EPS)
    u = np.clip(u, 0.0, w - 1)
    v = np.clip(v, 0.0, h - 1)
    data = img.data
    if interp is Interp.NEAREST:
        ui = np.minimum(_nearest_index(u), w - 1)
        vi = np.minimum(_nearest_index(v), h - 1)
        out = data[:, vi, ui]
    else:
        u0 = np.floor(u).astype(np.intp)
        v0 = np.floor(v).astype(np.intp)
        u1 = np.minimum(u0 + 1, w - 1)
        v1 = np.minimum(v0 + 1, h - 1)
        tu = u - u0
        tv = v - v0
        top = data[:, v0, u0] * (1 - tu) + data[:, v0, u1] * tu
        bottom = data[:, v1, u0] * (1 - tu) + data[:, v1, u1] * tu
        out = top * (1 - tv) + bottom * tv
    out = np.where(inside[np.newaxis], out, 0.0)
    return RasterImage(out, Precision.REAL)


def center_fit(img: RasterImage, width: int, height: int) -> RasterImage:
    """Center-crop or zero-pad to exactly ``width`` x ``height``."""
    out = np.zeros((img.channels, height, width))
    src_x = max(0, (img.width - width) // 2)
    src_y = max(0, (img.height - height) // 2)
    dst_x = max(0, (width - img.width) // 2)
    dst_y = max(0, (height - img.height) // 2)
    cw = min(width, img.width)
    ch = min(height, img.height)
    out[:, dst_y:dst_y + ch, dst_x:dst_x + cw] = img.data[:, src_y:src_y + ch, src_x:src_x + cw]
    return img.with_data(out)
