"""Per-object attribute extraction: identity, position + size, salient
sub-regions, dominant colors.

Grid convention: the image (or a bbox) is divided into a 3x3 grid with
real-valued boundaries at thirds. A point (or pixel center) belongs to the
cell floor(3 * coord / extent), clamped to 2, so cells are half-open and no
point belongs to two cells. Cells map row-major onto the nine position
names.
"""

from __future__ import annotations

import base64
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
import requests
from PIL import Image

from .colornames import ColorTable, default_table, list_names, name_color
from .errors import (
    ClassifierUnavailableError,
    ProtocolViolationError,
    StubMissError,
)
from .raster import Heatmap, ImageRGB, rgb_to_hsv

POSITION_NAMES = (
    "top-left", "top-center", "top-right",
    "center-left", "center", "center-right",
    "bottom-left", "bottom-center", "bottom-right",
)

COLOR_FOREGROUND_TAU = 0.5  # heatmap intensity above which a pixel is foreground


def coco_labels() -> tuple[str, ...]:
    """The 80 COCO class names, the default zero-shot label set."""
    text = resources.files("heatcap.data").joinpath("coco_labels.txt").read_text()
    return tuple(line for line in text.splitlines() if line)


@dataclass(frozen=True)
class ClassifierRef:
    """Pluggable object-identity source.

    kind "remote" POSTs crops to an HTTP endpoint, "stub" answers from a
    sidecar annotation file (deterministic, offline), "constant" always
    returns fixed_label. Every answer must come from label_set.
    """

    kind: str  # remote | stub | constant
    label_set: tuple[str, ...]
    endpoint: str = ""
    sidecar: str = ""
    fixed_label: str = ""
    timeout_s: float = 30.0

    def __post_init__(self):
        if self.kind not in ("remote", "stub", "constant"):
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if not self.label_set:
            raise ValueError("label_set must be non-empty")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote classifier needs an endpoint")
        if self.kind == "stub" and not self.sidecar:
            raise ValueError("stub classifier needs a sidecar path")
        if self.kind == "constant":
            if not self.fixed_label:
                raise ValueError("constant classifier needs fixed_label")
            if self.fixed_label not in self.label_set:
                raise ValueError("fixed_label must be a member of label_set")


@dataclass(frozen=True)
class ObjectAttributes:
    """The four per-object attributes feeding the caption template."""

    object_id: int
    label: str
    score: float
    position: str
    area_fraction: float
    salient_regions: tuple[str, ...] = ()
    dominant_colors: tuple[tuple[str, float], ...] = ()

    @property
    def identity(self) -> tuple[str, float]:
        return (self.label, self.score)


def _cell(coord: float, extent: float) -> int:
    return min(2, int(math.floor(3.0 * coord / extent)))


def locate(bbox: tuple[int, int, int, int], image_w: int, image_h: int) -> str:
    """Name the nine-grid cell holding the bbox center."""
    x, y, w, h = bbox
    cx = x + w / 2.0
    cy = y + h / 2.0
    return POSITION_NAMES[_cell(cy, image_h) * 3 + _cell(cx, image_w)]


def relative_size(bbox: tuple[int, int, int, int], image_w: int, image_h: int) -> float:
    """Bounding-box area over image area (box area, not pixel-mask area)."""
    x, y, w, h = bbox
    return (w * h) / (image_w * image_h)


def salient_subregions(
    h: Heatmap, bbox: tuple[int, int, int, int], top: int = 3
) -> tuple[str, ...]:
    """Names of the up-to-``top`` bbox grid cells with highest mean intensity.

    Ties break by row-major cell order; cells left empty by very thin boxes
    are skipped, so fewer names may come back.
    """
    x, y, w, hh = bbox
    vals = h.values[y : y + hh, x : x + w]
    cols = np.minimum(2, (3 * (np.arange(w) + 0.5) / w).astype(int))
    rows = np.minimum(2, (3 * (np.arange(hh) + 0.5) / hh).astype(int))
    idx = (rows[:, None] * 3 + cols[None, :]).ravel()
    sums = np.bincount(idx, weights=vals.ravel(), minlength=9)
    counts = np.bincount(idx, minlength=9)
    cells = [
        (-(sums[i] / counts[i]), i) for i in range(9) if counts[i] > 0
    ]
    cells.sort()
    return tuple(POSITION_NAMES[i] for _, i in cells[:top])


def crop(image: ImageRGB, bbox: tuple[int, int, int, int]) -> np.ndarray:
    """The bbox rectangle of the image: rows [y, y+h) x cols [x, x+w)."""
    x, y, w, h = bbox
    return image.pixels[y : y + h, x : x + w]


def classify(
    image: ImageRGB,
    bbox: tuple[int, int, int, int],
    classifier: ClassifierRef,
    object_id: int = 1,
) -> tuple[str, float]:
    """Resolve the identity attribute for one object crop."""
    if classifier.kind == "constant":
        return classifier.fixed_label, 1.0
    if classifier.kind == "stub":
        return _classify_stub(classifier, bbox, object_id)
    return _classify_remote(image, bbox, classifier)


@lru_cache(maxsize=32)
def _load_sidecar(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _classify_stub(
    classifier: ClassifierRef, bbox: tuple[int, int, int, int], object_id: int
) -> tuple[str, float]:
    table = _load_sidecar(classifier.sidecar)
    # bbox-keyed entries ("x,y,w,h") take precedence so one sidecar can
    # disambiguate objects across several heatmaps; plain id keys otherwise
    label = table.get(",".join(str(v) for v in bbox), table.get(str(object_id)))
    if label is None:
        raise StubMissError(
            f"sidecar {classifier.sidecar} has no entry for object {object_id} "
            f"or bbox {bbox}"
        )
    if label not in classifier.label_set:
        raise ProtocolViolationError(f"sidecar label {label!r} not in label_set")
    return label, 1.0


def _classify_remote(
    image: ImageRGB, bbox: tuple[int, int, int, int], classifier: ClassifierRef
) -> tuple[str, float]:
    buf = io.BytesIO()
    Image.fromarray(crop(image, bbox)).save(buf, format="PNG")
    payload = {
        "image_png_base64": base64.b64encode(buf.getvalue()).decode("ascii"),
        "labels": list(classifier.label_set),
    }
    url = classifier.endpoint.rstrip("/") + "/classify"
    try:
        resp = requests.post(url, json=payload, timeout=classifier.timeout_s)
    except (requests.ConnectionError, requests.Timeout) as e:
        raise ClassifierUnavailableError(f"classifier at {url} unreachable: {e}") from e
    if not 200 <= resp.status_code < 300:
        raise ClassifierUnavailableError(
            f"classifier at {url} returned HTTP {resp.status_code}"
        )
    try:
        doc = resp.json()
        label, score = doc["label"], float(doc["score"])
    except (ValueError, KeyError, TypeError) as e:
        raise ProtocolViolationError(f"malformed classifier response: {e}") from e
    if label not in classifier.label_set:
        raise ProtocolViolationError(f"classifier label {label!r} not in label_set")
    if not 0.0 <= score <= 1.0:
        raise ProtocolViolationError(f"classifier score {score} outside [0, 1]")
    return label, score


def dominant_colors(
    image: ImageRGB,
    h: Heatmap,
    bbox: tuple[int, int, int, int],
    k: int = 3,
    table: ColorTable | None = None,
) -> tuple[tuple[str, float], ...]:
    """Top-k color names among foreground pixels (heatmap > 0.5) in the bbox.

    Percentages are shares of the foreground pixel count; ties break by
    canonical color-table order. Empty foreground yields an empty tuple.
    """
    if table is None:
        table = default_table()
    x, y, w, hh = bbox
    fg = h.values[y : y + hh, x : x + w] > COLOR_FOREGROUND_TAU
    rgb = crop(image, bbox)[fg]
    if rgb.size == 0:
        return ()
    uniq, counts = np.unique(rgb.reshape(-1, 3), axis=0, return_counts=True)
    by_name: dict[str, int] = {}
    for trip, n in zip(uniq, counts):
        name = name_color(rgb_to_hsv(trip), table)
        by_name[name] = by_name.get(name, 0) + int(n)
    order = {name: i for i, name in enumerate(list_names(table))}
    ranked = sorted(by_name.items(), key=lambda kv: (-kv[1], order[kv[0]]))
    total = int(fg.sum())
    return tuple((name, n / total) for name, n in ranked[:k])


def extract_attributes(
    image: ImageRGB,
    h: Heatmap,
    region,
    classifier: ClassifierRef,
    table: ColorTable | None = None,
) -> ObjectAttributes:
    """Bundle all four attributes for one segmented region."""
    label, score = classify(image, region.bbox, classifier, object_id=region.id)
    return ObjectAttributes(
        object_id=region.id,
        label=label,
        score=score,
        position=locate(region.bbox, image.width, image.height),
        area_fraction=relative_size(region.bbox, image.width, image.height),
        salient_regions=salient_subregions(h, region.bbox),
        dominant_colors=dominant_colors(image, h, region.bbox, table=table),
    )
