"""Fade-blend watermark embedding and non-blind logo extraction.

The watermarked image is the convex blend ``h = a1*f + a2*g`` of cover ``f``
and logo ``g``.  Extraction needs the cover and inverts the blend:

* 8-bit carrier:  ``g' = Round((h - Round(a1*f)) / a2)``
* real carrier:   ``g' = Round((h - a1*f) / a2)``

Both are clamped to [0, 255].  The real-carrier variant subtracts the exact
cover term; rounding that term first would shift the result by up to
``0.5 / a2`` gray levels (50 at a1 = 0.99) even though ``h`` is lossless.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange, Alpha2TooSmall, IncompatibleChannels, PrecisionMismatch
from .raster import Precision, RasterImage, RoundingMode, round_clamp, round_half_away, require_same_dims

MIN_ALPHA2 = 0.001
# cover weights used by fade sweeps, weakest to strongest
ALPHA_LADDER = (0.5, 0.6, 0.75, 0.8, 0.9, 0.95, 0.97, 0.99)


class CarrierMode(enum.Enum):
    EXACT = "exact"
    QUANTIZED8 = "q8"


@dataclass(frozen=True)
class FadeParams:
    alpha1: float
    alpha2: float
    rounding: RoundingMode = RoundingMode.HALF_AWAY_FROM_ZERO

    def __post_init__(self):
        if not (0.0 < self.alpha1 < 1.0) or not (0.0 < self.alpha2 < 1.0):
            raise AlphaOutOfRange(f"fading ratios must lie in (0, 1), got {self.alpha1}, {self.alpha2}")
        if abs(self.alpha1 + self.alpha2 - 1.0) > 1e-12:
            raise AlphaOutOfRange(f"alpha1 + alpha2 must equal 1, got {self.alpha1 + self.alpha2!r}")
        if self.alpha2 < MIN_ALPHA2:
            raise Alpha2TooSmall(f"alpha2={self.alpha2} is below the minimum {MIN_ALPHA2}")


def validate_params(alpha1: float) -> FadeParams:
    """Build FadeParams from the cover weight, with ``alpha2 = 1 - alpha1``."""
    alpha1 = float(alpha1)
    if not math.isfinite(alpha1) or not (0.0 < alpha1 < 1.0):
        raise AlphaOutOfRange(f"alpha1 must lie in the open interval (0, 1), got {alpha1}")
    return FadeParams(alpha1, 1.0 - alpha1)


def _broadcast_logo(cover: RasterImage, logo: RasterImage) -> np.ndarray:
    require_same_dims(cover, logo, "cover and logo")
    if logo.channels == cover.channels:
        return logo.data
    if logo.channels == 1:
        return np.broadcast_to(logo.data, cover.data.shape)
    raise IncompatibleChannels(
        f"cannot embed a {logo.channels}-plane logo into a {cover.channels}-plane cover"
    )


def blend(cover: np.ndarray, logo: np.ndarray, params: FadeParams) -> np.ndarray:
    return params.alpha1 * cover + params.alpha2 * logo


def embed(
    cover: RasterImage,
    logo: RasterImage,
    params: FadeParams,
    mode: CarrierMode = CarrierMode.EXACT,
) -> RasterImage:
    """Fade ``logo`` into ``cover``.

    A 1-plane logo is applied to every plane of a 3-plane cover.  ``EXACT``
    keeps the blend at full precision; ``QUANTIZED8`` rounds it to 8 bits.
    """
    if cover.precision is not Precision.CARRIER8 or logo.precision is not Precision.CARRIER8:
        raise PrecisionMismatch("embed expects 8-bit cover and logo images")
    mode = CarrierMode(mode)
    h = blend(cover.data, _broadcast_logo(cover, logo), params)
    if mode is CarrierMode.QUANTIZED8:
        return RasterImage(round_clamp(h), Precision.CARRIER8)
    return RasterImage(np.clip(h, 0.0, 255.0), Precision.REAL)


def extract(watermarked: RasterImage, cover: RasterImage, params: FadeParams) -> RasterImage:
    """Recover the logo from a watermarked image and its original cover.

    Returns an 8-bit image with one extracted plane per watermarked plane.
    """
    require_same_dims(watermarked, cover, "watermarked and cover")
    if cover.precision is not Precision.CARRIER8:
        raise PrecisionMismatch("the cover must be an 8-bit image")
    h = watermarked.data
    f = cover.data
    if f.shape[0] != h.shape[0]:
        if f.shape[0] == 1:
            f = np.broadcast_to(f, h.shape)
        else:
            raise IncompatibleChannels(
                f"{watermarked.channels}-plane watermarked image vs {cover.channels}-plane cover"
            )
    cover_term = params.alpha1 * f
    if watermarked.precision is Precision.CARRIER8:
        cover_term = round_half_away(cover_term)
    return RasterImage(round_clamp((h - cover_term) / params.alpha2), Precision.CARRIER8)


def collapse_logo(extracted: RasterImage, how: str = "first") -> RasterImage:
    """Reduce a multi-plane extraction of a broadcast gray logo to one plane.

    ``"first"`` reads plane 0; ``"mean"`` averages the planes, which damps
    independent per-plane quantization noise.
    """
    if extracted.channels == 1:
        return extracted
    if how == "first":
        return RasterImage(extracted.data[:1], extracted.precision)
    if how == "mean":
        return RasterImage(round_clamp(extracted.data.mean(axis=0, keepdims=True)), Precision.CARRIER8)
    raise ValueError(f"unknown collapse rule {how!r}")
