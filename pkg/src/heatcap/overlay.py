"""Deterministic inspection overlay: colormapped heatmap blend + bboxes.

The colormap is a fixed blue-to-red lookup table, lut[i] = (i, 0, 255 - i)
for intensity index i = round(255 * v). Blending is integer halving,
out = (image + colormap) // 2, so identical inputs always produce identical
bytes. Bounding boxes are drawn as 2-px green outlines after blending.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from .raster import Heatmap, ImageRGB
from .segmentation import ObjectRegion

BOX_COLOR = (0, 255, 0)
BOX_THICKNESS = 2

_LUT = np.stack(
    [np.arange(256), np.zeros(256, dtype=int), 255 - np.arange(256)], axis=1
).astype(np.uint8)

OverlayImage = ImageRGB


def render_overlay(
    image: ImageRGB, heatmap: Heatmap, regions: list[ObjectRegion] | tuple = ()
) -> OverlayImage:
    """Alpha-0.5 blend of image and colormapped heatmap, with bbox outlines."""
    if (heatmap.width, heatmap.height) != (image.width, image.height):
        raise ValueError("heatmap must be resampled to the image dimensions first")
    idx = np.rint(heatmap.values * 255).astype(np.intp)
    mapped = _LUT[idx]
    out = ((image.pixels.astype(np.uint16) + mapped.astype(np.uint16)) // 2).astype(
        np.uint8
    )
    for region in regions:
        _draw_box(out, region.bbox)
    return ImageRGB(out)


def _draw_box(pixels: np.ndarray, bbox: tuple[int, int, int, int]) -> None:
    x, y, w, h = bbox
    t = BOX_THICKNESS
    x1, y1 = x + w, y + h
    pixels[y : min(y + t, y1), x:x1] = BOX_COLOR
    pixels[max(y1 - t, y) : y1, x:x1] = BOX_COLOR
    pixels[y:y1, x : min(x + t, x1)] = BOX_COLOR
    pixels[y:y1, max(x1 - t, x) : x1] = BOX_COLOR


def image_to_png_bytes(image: ImageRGB) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(image.pixels).save(buf, format="PNG")
    return buf.getvalue()
