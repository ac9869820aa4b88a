"""Per-heatmap captioning pipeline: resample, normalize, segment, attribute,
render. Shared by the reasoning flow, the CLI and the HTTP service."""

from __future__ import annotations

from dataclasses import dataclass

from .attributes import extract_attributes
from .captioner import Caption, render_caption
from .colornames import ColorTable, default_table, load_table
from .config import PipelineConfig
from .raster import Heatmap, ImageRGB, normalize, resample_to
from .segmentation import ObjectRegion, connected_components, filter_regions, threshold


@dataclass(frozen=True)
class CaptionResult:
    caption: Caption
    regions: tuple[ObjectRegion, ...]
    heatmap: Heatmap  # resampled + normalized, as segmented


def resolve_color_table(cfg: PipelineConfig) -> ColorTable:
    if cfg.color_table in ("", "default"):
        return default_table()
    return load_table(cfg.color_table)


def caption_heatmap(image: ImageRGB, heatmap: Heatmap, cfg: PipelineConfig) -> CaptionResult:
    """Run segmentation + attribute extraction + template rendering."""
    table = resolve_color_table(cfg)
    if (heatmap.width, heatmap.height) != (image.width, image.height):
        heatmap = resample_to(heatmap, image.width, image.height)
    heatmap = normalize(heatmap.values, mode=cfg.normalize_mode)
    mask = threshold(heatmap, cfg.threshold)
    regions = connected_components(mask, cfg.connectivity)
    regions = filter_regions(regions, cfg.min_area_fraction, image.width * image.height)
    attrs = [
        extract_attributes(image, heatmap, region, cfg.classifier, table=table)
        for region in regions
    ]
    return CaptionResult(render_caption(attrs), tuple(regions), heatmap)
