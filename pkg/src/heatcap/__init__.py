"""heatcap: caption model-attention heatmaps and generate LLM-backed XAI reports."""

__version__ = "0.1.0"

from .attributes import (
    POSITION_NAMES,
    ClassifierRef,
    ObjectAttributes,
    classify,
    coco_labels,
    dominant_colors,
    extract_attributes,
    locate,
    relative_size,
    salient_subregions,
)
from .captioner import Caption, caption_from_json, caption_to_json, render_caption
from .colornames import ColorTable, default_table, list_names, load_table, name_color
from .config import LlmConfig, PipelineConfig, load_config
from .overlay import OverlayImage, render_overlay
from .pipeline import CaptionResult, caption_heatmap
from .raster import (
    Heatmap,
    HsvColor,
    ImageRGB,
    load_heatmap,
    load_image,
    normalize,
    resample_to,
    rgb_to_hsv,
)
from .reasoning import (
    ChatSession,
    PromptSpec,
    XaiReport,
    build_prompt,
    generate_report,
    report_from_json,
    report_to_json,
    save_report,
    send,
)
from .segmentation import (
    BinaryMask,
    ObjectRegion,
    connected_components,
    filter_regions,
    threshold,
)

__all__ = [
    "POSITION_NAMES",
    "BinaryMask",
    "Caption",
    "CaptionResult",
    "ChatSession",
    "ClassifierRef",
    "ColorTable",
    "Heatmap",
    "HsvColor",
    "ImageRGB",
    "LlmConfig",
    "ObjectAttributes",
    "ObjectRegion",
    "OverlayImage",
    "PipelineConfig",
    "PromptSpec",
    "XaiReport",
    "caption_from_json",
    "caption_heatmap",
    "caption_to_json",
    "classify",
    "coco_labels",
    "connected_components",
    "default_table",
    "dominant_colors",
    "extract_attributes",
    "filter_regions",
    "generate_report",
    "list_names",
    "load_config",
    "load_heatmap",
    "load_image",
    "load_table",
    "locate",
    "name_color",
    "normalize",
    "relative_size",
    "render_caption",
    "render_overlay",
    "report_from_json",
    "report_to_json",
    "resample_to",
    "rgb_to_hsv",
    "salient_subregions",
    "save_report",
    "send",
    "threshold",
]
