"""Object localization under a heatmap: thresholding + connected components.

Regions are ordered by descending pixel count (ties by row-major position of
the topmost-leftmost pixel) and numbered 1..n in that order, so "Object 1"
in a caption is always the largest blob.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import Heatmap

_STRUCTURE = {
    4: np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool),
    8: np.ones((3, 3), dtype=bool),
}


@dataclass(frozen=True)
class BinaryMask:
    bits: np.ndarray  # (h, w) bool

    def __post_init__(self):
        if self.bits.ndim != 2 or self.bits.dtype != np.bool_:
            raise ValueError("mask must be a 2-d boolean raster")
        self.bits.setflags(write=False)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass(frozen=True)
class ObjectRegion:
    """One connected component with its tight bounding box.

    ``mask`` is the component's boolean footprint cropped to the bbox;
    ``pixels`` expands it to global (row, col) coordinates.
    """

    id: int
    bbox: tuple[int, int, int, int]  # x (col), y (row), w, h
    pixel_count: int
    mask: np.ndarray  # (h, w) bool, relative to bbox

    def __post_init__(self):
        self.mask.setflags(write=False)

    @property
    def pixels(self) -> set[tuple[int, int]]:
        x, y, _, _ = self.bbox
        rows, cols = np.nonzero(self.mask)
        return {(int(r) + y, int(c) + x) for r, c in zip(rows, cols)}


def threshold(h: Heatmap, tau: float) -> BinaryMask:
    """Bit set iff value > tau (strict, so an all-tau raster yields nothing)."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    return BinaryMask(h.values > tau)


def connected_components(mask: BinaryMask, connectivity: int = 8) -> list[ObjectRegion]:
    """Label maximal connected sets of true bits under 4- or 8-adjacency."""
    if connectivity not in _STRUCTURE:
        raise ValueError("connectivity must be 4 or 8")
    labels, n = ndimage.label(mask.bits, structure=_STRUCTURE[connectivity])
    if n == 0:
        return []
    w = mask.width
    counts = np.bincount(labels.ravel(), minlength=n + 1)
    slices = ndimage.find_objects(labels)
    raw = []
    for i, sl in enumerate(slices, start=1):
        ys, xs = sl
        crop = labels[sl] == i
        # row-major index of the first pixel, for deterministic tie-breaks
        first = int(np.argmax(crop.ravel()))
        anchor = (ys.start + first // crop.shape[1]) * w + (xs.start + first % crop.shape[1])
        bbox = (xs.start, ys.start, xs.stop - xs.start, ys.stop - ys.start)
        raw.append((int(counts[i]), anchor, bbox, crop))
    raw.sort(key=lambda t: (-t[0], t[1]))
    return [
        ObjectRegion(id=rank, bbox=bbox, pixel_count=count, mask=crop)
        for rank, (count, _, bbox, crop) in enumerate(raw, start=1)
    ]


def filter_regions(
    regions: list[ObjectRegion], min_area_fraction: float, image_area: int
) -> list[ObjectRegion]:
    """Drop regions covering less than min_area_fraction of the image.

    Order and ids are preserved; the boundary case (exactly equal fraction)
    is kept.
    """
    return [
        r for r in regions if r.pixel_count / image_area >= min_area_fraction
    ]
