"""Exhaustive error model for 8-bit carriers.

For every (cover value, logo value) pair the embed/extract round trip is
simulated with plain scalar arithmetic, independently of the array code in
``fading``.  The resulting 256x256 table predicts the extraction error at any
pixel exactly.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyHistogram
from .fading import FadeParams
from .raster import RasterImage, round_clamp, round_half_away

LEVELS = 256


@dataclass(frozen=True)
class ErrorTable:
    params: FadeParams
    e: np.ndarray  # int64, e[f, g] = extracted - g

    def __getitem__(self, fg):
        return int(self.e[fg])


def build_error_table(params: FadeParams) -> ErrorTable:
    a1, a2 = params.alpha1, params.alpha2
    e = np.zeros((LEVELS, LEVELS), dtype=np.int64)
    for f in range(LEVELS):
        cover_term = a1 * f
        rounded_cover = round_half_away(cover_term)
        row = e[f]
        for g in range(LEVELS):
            h = round_clamp(cover_term + a2 * g)
            row[g] = int(round_clamp((h - rounded_cover) / a2)) - g
    e.flags.writeable = False
    return ErrorTable(params, e)


def joint_histogram(cover: RasterImage, logo: RasterImage) -> np.ndarray:
    """256x256 counts of (cover sample, logo sample) pairs.

    A 1-plane logo is paired with every plane of a 3-plane cover, mirroring
    the embedding broadcast.
    """
    if cover.dims != logo.dims:
        raise DimensionMismatch("cover and logo dimensions differ")
    f = cover.to_uint8()
    g = logo.to_uint8()
    if g.shape[0] != f.shape[0]:
        g = np.broadcast_to(g, f.shape)
    idx = f.astype(np.int64).ravel() * LEVELS + g.astype(np.int64).ravel()
    return np.bincount(idx, minlength=LEVELS * LEVELS).reshape(LEVELS, LEVELS)


def predict_mse(table: ErrorTable, joint_hist: np.ndarray, total: int | None = None) -> float:
    joint_hist = np.asarray(joint_hist)
    if total is None:
        total = int(joint_hist.sum())
    if total <= 0:
        raise EmptyHistogram("joint histogram has no mass")
    if int(joint_hist.sum()) != total:
        raise ValueError(f"total {total} does not match histogram mass {int(joint_hist.sum())}")
    sq = table.e.astype(np.float64) ** 2
    return float((joint_hist * sq).sum() / total)


def predicted_error_map(table: ErrorTable, cover: RasterImage, logo: RasterImage) -> np.ndarray:
    """Per-sample extraction error looked up from the table."""
    f = cover.to_uint8().astype(np.intp)
    g = logo.to_uint8().astype(np.intp)
    if g.shape[0] != f.shape[0]:
        g = np.broadcast_to(g, f.shape)
    return table.e[f, g]


def exactness_fraction(table: ErrorTable) -> float:
    return float(np.count_nonzero(table.e == 0)) / table.e.size


def table_to_csv(table: ErrorTable) -> str:
    """Header ``f\\g,0..255`` then one row per cover value."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["f\\g"] + list(range(LEVELS)))
    for f in range(LEVELS):
        writer.writerow([f] + table.e[f].tolist())
    return buf.getvalue()
