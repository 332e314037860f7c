"""Readers and writers for BMP, binary PGM/PPM and the FWM real-valued carrier.

Writers are canonical: loading then saving their output reproduces the same
bytes.  BMP support is limited to uncompressed 8-bit gray-palette and 24-bit
files.
"""
from __future__ import annotations

import os
import struct

import numpy as np

from .errors import (
    IncompatibleChannels,
    MalformedHeader,
    PrecisionMismatch,
    TruncatedPixelData,
    UnsupportedBmpVariant,
)
from .raster import Precision, RasterImage

FORMATS = ("bmp", "pgm", "ppm", "fwm")
FWM_MAGIC = b"FWM1"
_EXTENSIONS = {".bmp": "bmp", ".pgm": "pgm", ".ppm": "ppm", ".fwm": "fwm"}
_PELS_PER_METER = 2835  # 72 dpi


def _normalize_format(fmt: str) -> str:
    fmt = fmt.lower().lstrip(".")
    if fmt not in FORMATS:
        raise ValueError(f"unknown image format {fmt!r}; expected one of {FORMATS}")
    return fmt


def format_from_path(path) -> str:
    ext = os.path.splitext(str(path))[1].lower()
    try:
        return _EXTENSIONS[ext]
    except KeyError:
        raise ValueError(f"cannot infer image format from extension of {path!r}") from None


def sniff_format(data: bytes) -> str:
    if data[:2] == b"BM":
        return "bmp"
    if data[:2] == b"P5":
        return "pgm"
    if data[:2] == b"P6":
        return "ppm"
    if data[:4] == FWM_MAGIC:
        return "fwm"
    raise MalformedHeader("unrecognized image signature")


# -- BMP ---------------------------------------------------------------------

def _load_bmp(data: bytes) -> RasterImage:
    if len(data) < 54 or data[:2] != b"BM":
        raise MalformedHeader("missing BMP signature or header")
    (pixel_offset,) = struct.unpack_from("<I", data, 10)
    dib_size, width, height, planes, bpp, compression = struct.unpack_from("<IiiHHI", data, 14)
    if dib_size < 40:
        raise UnsupportedBmpVariant(f"unsupported DIB header size {dib_size}")
    if planes != 1 or width <= 0 or height == 0:
        raise MalformedHeader(f"bad BMP geometry: planes={planes} width={width} height={height}")
    if compression != 0:
        raise UnsupportedBmpVariant(f"compressed BMP (compression={compression}) is not supported")
    if bpp not in (8, 24):
        raise UnsupportedBmpVariant(f"{bpp}-bit BMP is not supported")

    top_down = height < 0
    height = abs(height)
    channels = 1 if bpp == 8 else 3
    stride = (width * channels + 3) & ~3

    if bpp == 8:
        (colors_used,) = struct.unpack_from("<I", data, 46)
        n_colors = colors_used or 256
        pal_start = 14 + dib_size
        pal_end = pal_start + 4 * n_colors
        if pal_end > len(data):
            raise TruncatedPixelData("palette extends past end of file")
        palette = np.frombuffer(data, np.uint8, 4 * n_colors, pal_start).reshape(n_colors, 4)
        if not (np.array_equal(palette[:, 0], palette[:, 1]) and np.array_equal(palette[:, 1], palette[:, 2])):
            raise UnsupportedBmpVariant("8-bit BMP with a non-gray palette is not supported")
        lut = palette[:, 0].astype(np.float64)

    end = pixel_offset + stride * height
    if pixel_offset > len(data) or end > len(data):
        raise TruncatedPixelData(f"expected {stride * height} pixel bytes at offset {pixel_offset}")
    rows = np.frombuffer(data, np.uint8, stride * height, pixel_offset).reshape(height, stride)
    rows = rows[:, : width * channels]
    if not top_down:
        rows = rows[::-1]

    if bpp == 8:
        if rows.max(initial=0) >= len(lut):
            raise MalformedHeader("palette index out of range")
        return RasterImage(lut[rows][np.newaxis], Precision.CARRIER8)
    bgr = rows.reshape(height, width, 3)
    return RasterImage(bgr[:, :, ::-1].transpose(2, 0, 1), Precision.CARRIER8)


def _save_bmp(img: RasterImage) -> bytes:
    pix = img.to_uint8()
    channels, height, width = pix.shape
    stride = (width * channels + 3) & ~3
    if channels == 1:
        rows = pix[0]
        palette = np.repeat(np.arange(256, dtype=np.uint8), 4).reshape(256, 4)
        palette[:, 3] = 0
        palette_bytes = palette.tobytes()
        n_colors = 256
    else:
        rows = pix[::-1].transpose(1, 2, 0).reshape(height, width * 3)  # RGB -> BGR
        palette_bytes = b""
        n_colors = 0
    body = np.zeros((height, stride), np.uint8)
    body[:, : rows.shape[1]] = rows[::-1]
    offset = 14 + 40 + len(palette_bytes)
    file_size = offset + body.size
    header = struct.pack("<2sIHHI", b"BM", file_size, 0, 0, offset)
    dib = struct.pack(
        "<IiiHHIIiiII",
        40, width, height, 1, 8 * channels, 0, body.size,
        _PELS_PER_METER, _PELS_PER_METER, n_colors, 0,
    )
    return header + dib + palette_bytes + body.tobytes()


# -- PGM / PPM -----------------------------------------------------------------

def _read_netpbm_header(data: bytes):
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < 4:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise MalformedHeader("truncated PGM/PPM header")
        tokens.append(data[start:pos])
    if pos >= n or not data[pos:pos + 1].isspace():
        raise MalformedHeader("PGM/PPM header must end with a single whitespace byte")
    return tokens, pos + 1


def _load_netpbm(data: bytes, channels: int) -> RasterImage:
    magic = b"P5" if channels == 1 else b"P6"
    tokens, start = _read_netpbm_header(data)
    if tokens[0] != magic:
        raise MalformedHeader(f"expected magic {magic!r}, found {tokens[0]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise MalformedHeader("non-integer PGM/PPM header field") from None
    if width <= 0 or height <= 0:
        raise MalformedHeader("PGM/PPM dimensions must be positive")
    if maxval != 255:
        raise MalformedHeader(f"only maxval 255 is supported, got {maxval}")
    count = width * height * channels
    if len(data) - start < count:
        raise TruncatedPixelData(f"expected {count} sample bytes, found {len(data) - start}")
    pix = np.frombuffer(data, np.uint8, count, start).reshape(height, width, channels)
    return RasterImage(pix.transpose(2, 0, 1), Precision.CARRIER8)


def _save_netpbm(img: RasterImage, channels: int) -> bytes:
    if img.channels != channels:
        kind = "PGM" if channels == 1 else "PPM"
        raise IncompatibleChannels(f"{kind} requires {channels}-plane images, got {img.channels}")
    pix = img.to_uint8()
    magic = "P5" if channels == 1 else "P6"
    header = f"{magic}\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + pix.transpose(1, 2, 0).tobytes()


# -- FWM -----------------------------------------------------------------------

def _load_fwm(data: bytes) -> RasterImage:
    if len(data) < 16 or data[:4] != FWM_MAGIC:
        raise MalformedHeader("missing FWM1 header")
    width, height, channels = struct.unpack_from("<III", data, 4)
    if width == 0 or height == 0 or channels not in (1, 3):
        raise MalformedHeader(f"bad FWM geometry {width}x{height}x{channels}")
    count = width * height * channels
    if len(data) - 16 < 8 * count:
        raise TruncatedPixelData(f"expected {8 * count} sample bytes")
    samples = np.frombuffer(data, "<f8", count, 16).reshape(channels, height, width)
    return RasterImage(samples, Precision.REAL)


def _save_fwm(img: RasterImage) -> bytes:
    header = FWM_MAGIC + struct.pack("<III", img.width, img.height, img.channels)
    return header + img.data.astype("<f8").tobytes()


# -- public API ------------------------------------------------------------------

def load_image(data: bytes, fmt: str | None = None) -> RasterImage:
    fmt = sniff_format(data) if fmt is None else _normalize_format(fmt)
    if fmt == "bmp":
        return _load_bmp(data)
    if fmt == "pgm":
        return _load_netpbm(data, 1)
    if fmt == "ppm":
        return _load_netpbm(data, 3)
    return _load_fwm(data)


def save_image(img: RasterImage, fmt: str) -> bytes:
    fmt = _normalize_format(fmt)
    if fmt == "fwm":
        if img.precision is not Precision.REAL:
            raise PrecisionMismatch("FWM stores real-valued carriers; use an 8-bit format")
        return _save_fwm(img)
    if img.precision is not Precision.CARRIER8:
        raise PrecisionMismatch(f"cannot write a real-valued image as {fmt.upper()} without quantizing")
    if fmt == "bmp":
        return _save_bmp(img)
    return _save_netpbm(img, 1 if fmt == "pgm" else 3)


def read_image(path, fmt: str | None = None) -> RasterImage:
    with open(path, "rb") as fh:
        data = fh.read()
    return load_image(data, fmt)


def write_image(path, img: RasterImage, fmt: str | None = None) -> None:
    fmt = format_from_path(path) if fmt is None else fmt
    payload = save_image(img, fmt)
    with open(path, "wb") as fh:
        fh.write(payload)
