"""Deterministic image attacks and geometric realignment.

Each attack is a small frozen dataclass; ``apply_attack`` dispatches on its
type.  Attacks keep the carrier precision of their input: an 8-bit image
comes back rounded to 8 bits, a real-valued carrier comes back unrounded
(clamped to [0, 255]).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from typing import ClassVar

import numpy as np
from scipy import ndimage

from . import prng
from .errors import DimensionUnderflow, InvalidSpec
from .geometry import Canvas, Interp, center_fit, resize, rotate
from .jpeg import jpeg_like_roundtrip, scaled_qtable
from .metrics import gaussian_window
from .raster import Precision, RasterImage, round_clamp, round_half_away


def _odd_k(k, minimum=3):
    if isinstance(k, bool) or int(k) != k or k < minimum or k % 2 == 0:
        raise InvalidSpec(f"window size must be an odd integer >= {minimum}, got {k!r}")


def _seed(seed):
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2 ** 64:
        raise InvalidSpec(f"seed must be an unsigned 64-bit integer, got {seed!r}")


@dataclass(frozen=True)
class GaussianNoise:
    kind: ClassVar[str] = "gaussian_noise"
    mean: float = 0.0
    variance: float = 0.001
    scale: str = "unit"  # "unit": variance on [0, 1] intensities; "intensity": on [0, 255]
    seed: int = 0

    def __post_init__(self):
        if not self.variance >= 0:
            raise InvalidSpec(f"variance must be non-negative, got {self.variance}")
        if self.scale not in ("unit", "intensity"):
            raise InvalidSpec(f"scale must be 'unit' or 'intensity', got {self.scale!r}")
        _seed(self.seed)


@dataclass(frozen=True)
class SaltPepper:
    kind: ClassVar[str] = "salt_pepper"
    density: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise InvalidSpec(f"density must lie in [0, 1], got {self.density}")
        _seed(self.seed)


@dataclass(frozen=True)
class MedianFilter:
    kind: ClassVar[str] = "median"
    k: int = 3

    def __post_init__(self):
        _odd_k(self.k)


@dataclass(frozen=True)
class MeanBlur:
    kind: ClassVar[str] = "mean_blur"
    k: int = 3

    def __post_init__(self):
        _odd_k(self.k)


@dataclass(frozen=True)
class GaussianBlur:
    kind: ClassVar[str] = "gaussian_blur"
    sigma: float = 1.0
    k: int = 5

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidSpec(f"sigma must be positive, got {self.sigma}")
        _odd_k(self.k, minimum=1)


@dataclass(frozen=True)
class HighPass:
    kind: ClassVar[str] = "high_pass"
    k: int = 3

    def __post_init__(self):
        if self.k != 3:
            raise InvalidSpec("high-pass filtering is defined for a 3x3 window only")


@dataclass(frozen=True)
class WienerFilter:
    kind: ClassVar[str] = "wiener"
    k: int = 3

    def __post_init__(self):
        _odd_k(self.k)


@dataclass(frozen=True)
class JpegLike:
    kind: ClassVar[str] = "jpeg"
    quality: int = 75

    def __post_init__(self):
        scaled_qtable(self.quality)


@dataclass(frozen=True)
class Rotate:
    kind: ClassVar[str] = "rotate"
    degrees: float = 90.0
    interp: str = "bilinear"

    def __post_init__(self):
        if not math.isfinite(self.degrees):
            raise InvalidSpec("rotation angle must be finite")
        _interp(self.interp)


@dataclass(frozen=True)
class Scale:
    kind: ClassVar[str] = "scale"
    factor: float = 2.0
    interp: str = "bilinear"

    def __post_init__(self):
        if not (math.isfinite(self.factor) and self.factor > 0):
            raise InvalidSpec(f"scale factor must be positive, got {self.factor}")
        _interp(self.interp)


def _interp(name) -> Interp:
    try:
        return Interp(name)
    except ValueError:
        raise InvalidSpec(f"interpolation must be 'nearest' or 'bilinear', got {name!r}") from None


ATTACK_TYPES = {
    cls.kind: cls
    for cls in (GaussianNoise, SaltPepper, MedianFilter, MeanBlur, GaussianBlur,
                HighPass, WienerFilter, JpegLike, Rotate, Scale)
}
STOCHASTIC = (GaussianNoise, SaltPepper)
GEOMETRIC = (Rotate, Scale)


def spec_from_dict(d: dict):
    """Build an attack from ``{"type": ..., **params}``."""
    d = dict(d)
    kind = d.pop("type", None)
    d.pop("id", None)
    try:
        cls = ATTACK_TYPES[kind]
    except KeyError:
        raise InvalidSpec(f"unknown attack type {kind!r}; expected one of {sorted(ATTACK_TYPES)}") from None
    allowed = {f.name for f in fields(cls)}
    unknown = set(d) - allowed
    if unknown:
        raise InvalidSpec(f"unknown parameters for {kind}: {sorted(unknown)}")
    return cls(**d)


def spec_to_dict(spec) -> dict:
    return {"type": spec.kind, **asdict(spec)}


def with_seed(spec, seed: int):
    """Return ``spec`` carrying ``seed`` if it is stochastic, else unchanged."""
    if isinstance(spec, STOCHASTIC):
        return replace(spec, seed=seed)
    return spec


# -- helpers --------------------------------------------------------------------

def _finish(img: RasterImage, data: np.ndarray) -> RasterImage:
    if img.precision is Precision.CARRIER8:
        return RasterImage(round_clamp(data), Precision.CARRIER8)
    return RasterImage(np.clip(data, 0.0, 255.0), Precision.REAL)


def _per_plane(data: np.ndarray, fn) -> np.ndarray:
    return np.stack([fn(p) for p in data])


def _box_mean(plane: np.ndarray, k: int) -> np.ndarray:
    return ndimage.correlate(plane, np.full((k, k), 1.0 / (k * k)), mode="nearest")


def _wiener_plane(plane: np.ndarray, k: int) -> np.ndarray:
    mu = _box_mean(plane, k)
    var = np.maximum(_box_mean(plane * plane, k) - mu * mu, 0.0)
    noise = var.mean()
    denom = np.maximum(var, noise)
    gain = np.divide(np.maximum(var - noise, 0.0), denom, out=np.zeros_like(var), where=denom > 0)
    return mu + gain * (plane - mu)


def _salt_pepper(data: np.ndarray, spec: SaltPepper) -> np.ndarray:
    c, h, w = data.shape
    n = h * w
    count = int(math.floor(spec.density * n + 0.5))
    out = data.copy()
    if count == 0:
        return out
    order_keys, coin = prng.raw64(spec.seed, n, draws=2)
    chosen = np.argsort(order_keys, kind="stable")[:count]
    values = np.where((coin[chosen] >> np.uint64(63)) == 1, 255.0, 0.0)
    ys, xs = np.divmod(chosen, w)
    out[:, ys, xs] = values
    return out


def _gaussian_noise(data: np.ndarray, spec: GaussianNoise) -> np.ndarray:
    factor = 255.0 if spec.scale == "unit" else 1.0
    n = prng.normals(spec.seed, data.size, spec.mean, math.sqrt(spec.variance))
    return data + factor * n.reshape(data.shape)


def scaled_dims(width: int, height: int, factor: float) -> tuple[int, int]:
    return (max(1, int(round_half_away(width * factor))),
            max(1, int(round_half_away(height * factor))))


# -- public API -----------------------------------------------------------------

def apply_attack(img: RasterImage, spec) -> RasterImage:
    data = img.data
    if isinstance(spec, GaussianNoise):
        return _finish(img, _gaussian_noise(data, spec))
    if isinstance(spec, SaltPepper):
        return _finish(img, _salt_pepper(data, spec))
    if isinstance(spec, MedianFilter):
        return _finish(img, _per_plane(data, lambda p: ndimage.median_filter(p, size=spec.k, mode="nearest")))
    if isinstance(spec, MeanBlur):
        return _finish(img, _per_plane(data, lambda p: _box_mean(p, spec.k)))
    if isinstance(spec, GaussianBlur):
        taps = gaussian_window(spec.k, spec.sigma)
        kernel = np.outer(taps, taps)
        return _finish(img, _per_plane(data, lambda p: ndimage.correlate(p, kernel, mode="nearest")))
    if isinstance(spec, HighPass):
        return _finish(img, _per_plane(data, lambda p: p - _box_mean(p, 3) + 128.0))
    if isinstance(spec, WienerFilter):
        return _finish(img, _per_plane(data, lambda p: _wiener_plane(p, spec.k)))
    if isinstance(spec, JpegLike):
        return jpeg_like_roundtrip(img, spec.quality)
    if isinstance(spec, Rotate):
        out = rotate(img, spec.degrees, _interp(spec.interp), Canvas.KEEP_SIZE)
        return _finish(img, out.data)
    if isinstance(spec, Scale):
        w, h = scaled_dims(img.width, img.height, spec.factor)
        return _finish(img, resize(img, w, h, _interp(spec.interp)).data)
    raise InvalidSpec(f"not an attack spec: {spec!r}")


def realign(attacked: RasterImage, spec, original_dims: tuple[int, int]) -> RasterImage:
    """Undo a geometric attack so pixels line up with the cover again.

    ``original_dims`` is (width, height).  Non-geometric attacks pass through.
    """
    width, height = original_dims
    if isinstance(spec, Rotate):
        back = rotate(attacked, -spec.degrees, _interp(spec.interp), Canvas.KEEP_SIZE)
        if back.width < width or back.height < height:
            raise DimensionUnderflow(
                f"realigned image is {back.width}x{back.height}, smaller than {width}x{height}"
            )
        return _finish(attacked, center_fit(back, width, height).data)
    if isinstance(spec, Scale):
        return _finish(attacked, resize(attacked, width, height, _interp(spec.interp)).data)
    return attacked


def standard_suite() -> list[tuple[str, object]]:
    """The fifteen standard robustness attacks, with ids.

    Stochastic entries carry seed 0; batch runs substitute per-cell seeds.
    """
    return [
        ("gauss_v0.001", GaussianNoise(0.0, 0.001)),
        ("median3", MedianFilter(3)),
        ("median5", MedianFilter(5)),
        ("median7", MedianFilter(7)),
        ("saltpepper2", SaltPepper(0.02)),
        ("saltpepper20", SaltPepper(0.20)),
        ("saltpepper50", SaltPepper(0.50)),
        ("jpeg75", JpegLike(75)),
        ("rotate45", Rotate(45.0)),
        ("rotate90", Rotate(90.0)),
        ("rotate180", Rotate(180.0)),
        ("blur", GaussianBlur(1.0, 5)),
        ("scale3x", Scale(3.0)),
        ("scale0.5x", Scale(0.5)),
        ("wiener3", WienerFilter(3)),
    ]
