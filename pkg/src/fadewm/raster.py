"""Raster image container and deterministic sample arithmetic.

Samples are always held as float64 arrays of shape (channels, height, width).
The precision tag only records whether the samples are known to be 8-bit
integers (``CARRIER8``) or arbitrary reals (``REAL``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, PrecisionMismatch


class Precision(enum.Enum):
    CARRIER8 = "carrier8"
    REAL = "real"


class RoundingMode(enum.Enum):
    HALF_AWAY_FROM_ZERO = "half_away_from_zero"


LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def round_half_away(x):
    """Round half away from zero; works on scalars and arrays.

    >>> round_half_away(2.5), round_half_away(-0.5)
    (3.0, -1.0)
    """
    if isinstance(x, np.ndarray):
        return np.sign(x) * np.floor(np.abs(x) + 0.5)
    return math.copysign(math.floor(abs(x) + 0.5), x)


def round_clamp(x):
    """Round half away from zero, then clamp to [0, 255]."""
    if isinstance(x, np.ndarray):
        return np.clip(round_half_away(x), 0.0, 255.0)
    return min(255.0, max(0.0, round_half_away(x)))


@dataclass(frozen=True, eq=False)
class RasterImage:
    """A 1-plane (gray) or 3-plane (RGB) image.

    ``data`` is a read-only float64 array of shape (planes, height, width).
    """

    data: np.ndarray
    precision: Precision = Precision.CARRIER8

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim == 2:
            arr = arr[np.newaxis]
        if arr.ndim != 3 or arr.shape[0] not in (1, 3):
            raise DimensionMismatch(f"expected 1 or 3 planes, got array of shape {arr.shape}")
        if arr.shape[1] < 1 or arr.shape[2] < 1:
            raise DimensionMismatch("image dimensions must be positive")
        if self.precision is Precision.CARRIER8:
            if not np.all((arr >= 0) & (arr <= 255) & (arr == np.floor(arr))):
                raise PrecisionMismatch("8-bit carrier requires integer samples in [0, 255]")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_planes(cls, planes, precision=Precision.CARRIER8):
        return cls(np.stack([np.asarray(p, dtype=np.float64) for p in planes]), precision)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def dims(self) -> tuple[int, int]:
        """(width, height)"""
        return self.width, self.height

    def plane(self, i: int) -> np.ndarray:
        return self.data[i]

    def with_data(self, data, precision=None) -> "RasterImage":
        return RasterImage(data, self.precision if precision is None else precision)

    def to_uint8(self) -> np.ndarray:
        if self.precision is not Precision.CARRIER8:
            raise PrecisionMismatch("quantize the image before converting to uint8")
        return self.data.astype(np.uint8)

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return (
            self.precision is other.precision
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"RasterImage({self.width}x{self.height}x{self.channels}, "
            f"{self.precision.value})"
        )


def quantize(img: RasterImage, mode: RoundingMode = RoundingMode.HALF_AWAY_FROM_ZERO) -> RasterImage:
    if mode is not RoundingMode.HALF_AWAY_FROM_ZERO:
        raise ValueError(f"unsupported rounding mode {mode!r}")
    return RasterImage(round_clamp(img.data), Precision.CARRIER8)


def luma(data: np.ndarray) -> np.ndarray:
    """Unrounded luma plane of a (3, H, W) or (1, H, W) sample array."""
    if data.shape[0] == 1:
        return data[0]
    r, g, b = LUMA_WEIGHTS
    return r * data[0] + g * data[1] + b * data[2]


def to_gray(img: RasterImage) -> RasterImage:
    if img.channels == 1:
        return img
    y = luma(img.data)[np.newaxis]
    if img.precision is Precision.CARRIER8:
        return RasterImage(round_clamp(y), Precision.CARRIER8)
    return RasterImage(y, Precision.REAL)


def require_same_dims(a: RasterImage, b: RasterImage, what="images"):
    if a.dims != b.dims:
        raise DimensionMismatch(
            f"dimension mismatch: {what} are {a.width}x{a.height} and {b.width}x{b.height}"
        )
