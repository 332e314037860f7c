"""MSE, PSNR and Gaussian-window SSIM."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ImageSmallerThanWindow, NegativeMse, ParameterError
from .raster import RasterImage, luma

PEAK = 255.0


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr_db: float
    ssim: float

    def to_json_dict(self) -> dict:
        return {"mse": self.mse, "psnr_db": format_psnr(self.psnr_db), "ssim": self.ssim}


def format_psnr(value: float):
    """JSON/CSV friendly PSNR: infinity becomes the string ``"inf"``."""
    return "inf" if math.isinf(value) else value


def gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    """Separable 1-D Gaussian taps normalized to sum to one."""
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


@dataclass(frozen=True)
class SsimParams:
    window_size: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0
    taps: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ParameterError(f"window_size must be a positive odd integer, got {self.window_size}")
        if self.sigma <= 0:
            raise ParameterError("sigma must be positive")
        object.__setattr__(self, "taps", gaussian_window(self.window_size, self.sigma))

    @property
    def window(self) -> np.ndarray:
        return np.outer(self.taps, self.taps)

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


@dataclass(frozen=True)
class WindowStats:
    """Per-window weighted moments, one entry per fully interior window."""

    mu_x: np.ndarray
    mu_y: np.ndarray
    var_x: np.ndarray
    var_y: np.ndarray
    cov_xy: np.ndarray


def _check_pair(a: RasterImage, b: RasterImage):
    if a.data.shape != b.data.shape:
        raise DimensionMismatch(
            f"dimension mismatch: {a.width}x{a.height}x{a.channels} vs {b.width}x{b.height}x{b.channels}"
        )


def mse(a: RasterImage, b: RasterImage) -> float:
    """Mean squared error over every sample of every plane."""
    _check_pair(a, b)
    diff = a.data - b.data
    return float(np.mean(diff * diff))


def psnr(mse_value: float) -> float:
    # 10*log10(peak^2 / MSE); the printed sqrt(MSE) variant disagrees with every tabulated row
    if mse_value < 0 or math.isnan(mse_value):
        raise NegativeMse(f"MSE must be non-negative, got {mse_value}")
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse_value)


def _valid_filter(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    k = len(taps)
    rows = x.shape[0] - k + 1
    cols = x.shape[1] - k + 1
    tmp = np.zeros((x.shape[0], cols))
    for i, t in enumerate(taps):
        tmp += t * x[:, i:i + cols]
    out = np.zeros((rows, cols))
    for i, t in enumerate(taps):
        out += t * tmp[i:i + rows]
    return out


def window_stats(x: np.ndarray, y: np.ndarray, params: SsimParams) -> WindowStats:
    taps = params.taps
    mu_x = _valid_filter(x, taps)
    mu_y = _valid_filter(y, taps)
    # left unfloored: rounding residue is ~1e-12 and flooring would break SSIM(x, x) == 1
    var_x = _valid_filter(x * x, taps) - mu_x * mu_x
    var_y = _valid_filter(y * y, taps) - mu_y * mu_y
    cov = _valid_filter(x * y, taps) - mu_x * mu_y
    return WindowStats(mu_x, mu_y, var_x, var_y, cov)


def ssim_map(a: RasterImage, b: RasterImage, params: SsimParams | None = None) -> np.ndarray:
    params = params or SsimParams()
    _check_pair(a, b)
    k = params.window_size
    if a.width < k or a.height < k:
        raise ImageSmallerThanWindow(f"{a.width}x{a.height} image is smaller than the {k}x{k} window")
    st = window_stats(luma(a.data), luma(b.data), params)
    c1, c2 = params.c1, params.c2
    num = (2 * st.mu_x * st.mu_y + c1) * (2 * st.cov_xy + c2)
    den = (st.mu_x * st.mu_x + st.mu_y * st.mu_y + c1) * (st.var_x + st.var_y + c2)
    return num / den


def ssim(a: RasterImage, b: RasterImage, params: SsimParams | None = None) -> float:
    """Mean SSIM over all fully interior windows, computed on luma."""
    return float(np.mean(ssim_map(a, b, params)))


def report(reference: RasterImage, test: RasterImage, params: SsimParams | None = None) -> MetricsReport:
    m = mse(reference, test)
    return MetricsReport(m, psnr(m), ssim(reference, test, params))
