"""Procedurally generated stand-ins for the classic test images and logos.

The canonical photographs are not redistributable, so these synthetic
images imitate their broad character (smooth portrait-like shading, dense
texture, large blobs, fine stripes).  Drop real BMP files into the harness
instead when they are available.
"""
from __future__ import annotations

import numpy as np

from . import prng
from .raster import Precision, RasterImage, round_clamp

COVER_NAMES = ("lena", "baboon", "peppers", "barbara")
LOGO_NAMES = ("logo1", "logow")


def _grid(size):
    y, x = np.mgrid[0:size, 0:size] / (size - 1.0)
    return x, y


def _smooth_noise(seed, size, passes=3):
    u = prng.uniforms(prng.stream_states(seed, size * size))[1].reshape(size, size)
    for _ in range(passes):
        u = (u + np.roll(u, 1, 0) + np.roll(u, -1, 0) + np.roll(u, 1, 1) + np.roll(u, -1, 1)) / 5.0
    u -= u.min()
    return u / max(u.max(), 1e-12)


def _cover_plane(name, size, shift):
    x, y = _grid(size)
    if name == "lena":
        r2 = (x - 0.55) ** 2 + (y - 0.45) ** 2
        v = 60 + 140 * np.exp(-r2 / 0.08) + 40 * np.sin(6 * x + shift) * y
        v += 20 * _smooth_noise(11 + shift, size, 6)
    elif name == "baboon":
        v = 50 + 150 * _smooth_noise(23 + shift, size, 1) + 30 * np.cos(9 * y)
    elif name == "peppers":
        v = np.full_like(x, 40.0)
        for cx, cy, rad, amp in ((0.3, 0.3, 0.04, 170), (0.7, 0.4, 0.06, 140), (0.5, 0.75, 0.05, 190)):
            v += amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / rad)
        v += 15 * np.sin(3 * x + shift)
    elif name == "barbara":
        stripes = 0.5 + 0.5 * np.sin(2 * np.pi * (18 * x + 11 * y) + shift)
        v = 70 + 110 * stripes * (y > 0.4) + 90 * x * (y <= 0.4) + 20 * _smooth_noise(37 + shift, size, 4)
    else:
        raise ValueError(f"unknown cover {name!r}; choose from {COVER_NAMES}")
    return v


def make_cover(name: str, size: int = 256, rgb: bool = False) -> RasterImage:
    shifts = (0, 1, 2) if rgb else (0,)
    planes = [round_clamp(_cover_plane(name, size, s)) for s in shifts]
    return RasterImage(np.stack(planes), Precision.CARRIER8)


def make_logo(name: str, size: int = 256) -> RasterImage:
    x, y = _grid(size)
    if name == "logow":
        # black "W" strokes on white
        v = np.full_like(x, 255.0)
        for x0, x1 in ((0.15, 0.32), (0.32, 0.5), (0.5, 0.68), (0.68, 0.85)):
            rising = x1 in (0.5, 0.85)
            t = (x - x0) / (x1 - x0)
            line_y = 0.2 + 0.6 * (1 - t if rising else t)
            mask = (t >= 0) & (t <= 1) & (np.abs(y - line_y) < 0.05)
            v[mask] = 0.0
    elif name == "logo1":
        # gray ring and bar with soft edges
        r = np.hypot(x - 0.5, y - 0.5)
        ring = np.exp(-((r - 0.3) ** 2) / 0.002)
        bar = np.exp(-((x - 0.5) ** 2) / 0.003) * (np.abs(y - 0.5) < 0.25)
        v = 230 - 180 * np.maximum(ring, bar)
    else:
        raise ValueError(f"unknown logo {name!r}; choose from {LOGO_NAMES}")
    return RasterImage(round_clamp(v)[np.newaxis], Precision.CARRIER8)
