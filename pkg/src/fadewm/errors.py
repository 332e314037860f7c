"""Exception hierarchy shared by all fadewm modules."""


class WatermarkError(Exception):
    """Base class for every error raised by fadewm."""


class ParameterError(WatermarkError, ValueError):
    pass


class AlphaOutOfRange(ParameterError):
    pass


class Alpha2TooSmall(ParameterError):
    pass


class InvalidSpec(ParameterError):
    pass


class InvalidQuality(InvalidSpec):
    pass


class NegativeMse(ParameterError):
    pass


class DimensionMismatch(WatermarkError, ValueError):
    pass


class IncompatibleChannels(DimensionMismatch):
    pass


class ImageSmallerThanWindow(WatermarkError, ValueError):
    pass


class DimensionUnderflow(WatermarkError, ValueError):
    pass


class EmptyHistogram(WatermarkError, ValueError):
    pass


class PrecisionMismatch(WatermarkError, ValueError):
    pass


class FormatError(WatermarkError):
    """Raised when image bytes cannot be decoded."""


class MalformedHeader(FormatError):
    pass


class UnsupportedBmpVariant(FormatError):
    pass


class TruncatedPixelData(FormatError):
    pass
