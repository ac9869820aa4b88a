"""Raster input layer: image/heatmap loading, normalization, resampling, HSV.

Conventions used everywhere downstream: images are (height, width, 3) uint8
arrays, heatmaps are (height, width) float64 arrays with every value in
[0, 1], both row-major. Bounding boxes are (x, y, w, h) with x indexing
columns and y indexing rows; a crop covers rows [y, y+h) x cols [x, x+w).
"""

from __future__ import annotations

import colorsys
import csv
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    CorruptDataError,
    InvalidDataError,
    NonRectangularCsvError,
    UnsupportedFormatError,
)


@dataclass(frozen=True)
class ImageRGB:
    """8-bit RGB raster, immutable after construction."""

    pixels: np.ndarray  # (h, w, 3) uint8

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise InvalidDataError("image must be (h, w, 3) uint8")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise InvalidDataError("image must be at least 1x1")
        p.setflags(write=False)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class Heatmap:
    """Unit-interval intensity raster, immutable after construction."""

    values: np.ndarray  # (h, w) float64 in [0, 1]

    def __post_init__(self):
        v = self.values
        if v.ndim != 2:
            raise InvalidDataError("heatmap must be a 2-d raster")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise InvalidDataError("heatmap must be at least 1x1")
        if not np.isfinite(v).all():
            raise InvalidDataError("heatmap contains NaN or Inf")
        if v.min() < 0.0 or v.max() > 1.0:
            raise InvalidDataError("heatmap values outside [0, 1]")
        v.setflags(write=False)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


class HsvColor(NamedTuple):
    """Hue in degrees [0, 360), saturation and value in [0, 1].

    An achromatic color (s == 0) carries hue 0 by convention.
    """

    hue: float
    saturation: float
    value: float


def load_image(path: str) -> ImageRGB:
    """Decode a PNG (8-bit RGB/RGBA, alpha discarded) or portable pixmap.

    Raises FileNotFoundError, UnsupportedFormatError or CorruptDataError,
    each distinguishable by type.
    """
    with open(path, "rb") as fh:
        return load_image_bytes(fh.read(), name=path)


def load_image_bytes(data: bytes, name: str = "<bytes>") -> ImageRGB:
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except UnidentifiedImageError as e:
        raise UnsupportedFormatError(f"{name}: not a PNG or PPM image") from e
    except OSError as e:
        raise CorruptDataError(f"{name}: {e}") from e
    if img.format not in ("PNG", "PPM"):
        raise UnsupportedFormatError(f"{name}: unsupported format {img.format}")
    if img.mode == "RGBA":
        img = img.convert("RGB")
    if img.mode != "RGB":
        raise UnsupportedFormatError(
            f"{name}: mode {img.mode} not supported, need 8-bit RGB or RGBA"
        )
    return ImageRGB(np.asarray(img, dtype=np.uint8).copy())


def load_heatmap(path: str) -> Heatmap:
    """Decode an 8/16-bit grayscale PNG or a CSV of floats into a Heatmap.

    PNG intensities are divided by 255 (8-bit) or 65535 (16-bit). CSV values
    are clamped into [0, 1]; rows must all have the same length.
    """
    with open(path, "rb") as fh:
        return load_heatmap_bytes(fh.read(), name=path)


def load_heatmap_bytes(data: bytes, name: str = "<bytes>") -> Heatmap:
    if name.lower().endswith(".csv"):
        return _parse_heatmap_csv(data, name)
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except UnidentifiedImageError as e:
        raise UnsupportedFormatError(f"{name}: not a grayscale PNG") from e
    except OSError as e:
        raise CorruptDataError(f"{name}: {e}") from e
    if img.format != "PNG":
        raise UnsupportedFormatError(f"{name}: unsupported format {img.format}")
    if img.mode == "L":
        raw = np.asarray(img, dtype=np.float64) / 255.0
    elif img.mode in ("I;16", "I"):
        raw = np.asarray(img, dtype=np.float64) / 65535.0
    else:
        raise UnsupportedFormatError(
            f"{name}: mode {img.mode} not supported, need 8/16-bit grayscale"
        )
    return Heatmap(raw)


def _parse_heatmap_csv(data: bytes, name: str) -> Heatmap:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorruptDataError(f"{name}: not valid UTF-8 text") from e
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row:
            continue
        try:
            rows.append([float(cell) for cell in row])
        except ValueError as e:
            raise CorruptDataError(f"{name}:{lineno}: non-numeric cell") from e
    if not rows:
        raise CorruptDataError(f"{name}: empty CSV")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise NonRectangularCsvError(
            f"{name}: rows have differing lengths {sorted(widths)}"
        )
    raw = np.asarray(rows, dtype=np.float64)
    return normalize(raw, mode="clamp")


def normalize(raw: np.ndarray, mode: str = "minmax") -> Heatmap:
    """Map an arbitrary finite float raster into a valid Heatmap.

    minmax stretches to [0, 1] (a constant raster maps to all zeros, since a
    flat map carries no attention signal); clamp truncates into [0, 1].
    """
    raw = np.atleast_2d(np.asarray(raw, dtype=np.float64))
    if not np.isfinite(raw).all():
        raise InvalidDataError("raster contains NaN or Inf")
    if mode == "minmax":
        lo, hi = raw.min(), raw.max()
        if hi == lo:
            out = np.zeros_like(raw)
        else:
            out = (raw - lo) / (hi - lo)
    elif mode == "clamp":
        out = np.clip(raw, 0.0, 1.0)
    else:
        raise ValueError(f"unknown normalize mode {mode!r}")
    return Heatmap(out)


def resample_to(heatmap: Heatmap, width: int, height: int) -> Heatmap:
    """Bilinear resampling with pixel-center alignment.

    Each target pixel center (i + 0.5) maps to source coordinate
    (i + 0.5) * src/dst - 0.5; samples outside the source grid clamp to the
    border. Resampling to the source dimensions is the identity.
    """
    if width < 1 or height < 1:
        raise ValueError("target dimensions must be >= 1")
    src = heatmap.values
    sh, sw = src.shape
    if (sw, sh) == (width, height):
        return Heatmap(src.copy())
    xs = (np.arange(width) + 0.5) * (sw / width) - 0.5
    ys = (np.arange(height) + 0.5) * (sh / height) - 0.5
    x0 = np.floor(xs)
    y0 = np.floor(ys)
    fx = xs - x0
    fy = ys - y0
    x0i = np.clip(x0.astype(int), 0, sw - 1)
    x1i = np.clip(x0.astype(int) + 1, 0, sw - 1)
    y0i = np.clip(y0.astype(int), 0, sh - 1)
    y1i = np.clip(y0.astype(int) + 1, 0, sh - 1)
    top = (1.0 - fx) * src[np.ix_(y0i, x0i)] + fx * src[np.ix_(y0i, x1i)]
    bot = (1.0 - fx) * src[np.ix_(y1i, x0i)] + fx * src[np.ix_(y1i, x1i)]
    out = (1.0 - fy)[:, None] * top + fy[:, None] * bot
    return Heatmap(out)


def rgb_to_hsv(pixel) -> HsvColor:
    """Standard hexcone RGB -> HSV for one 8-bit (r, g, b) triplet."""
    r, g, b = (int(c) / 255.0 for c in pixel)
    h, s, v = colorsys.rgb_to_hsv(r, g, b)
    return HsvColor(h * 360.0, s, v)
