"""Fade-blend invisible watermarking with exact quantization analysis."""
from .fading import CarrierMode, FadeParams, embed, extract, validate_params
from .raster import Precision, RasterImage, RoundingMode, quantize, to_gray

__all__ = [
    "CarrierMode",
    "FadeParams",
    "Precision",
    "RasterImage",
    "RoundingMode",
    "embed",
    "extract",
    "quantize",
    "to_gray",
    "validate_params",
]
__version__ = "0.1.0"
