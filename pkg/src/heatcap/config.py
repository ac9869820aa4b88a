"""Pipeline configuration: one JSON document shared by CLI and service.

Shape (all keys optional, defaults shown):

    {
      "threshold": 0.5,
      "connectivity": 8,
      "min_area_fraction": 0.005,
      "normalize_mode": "minmax",
      "color_table": "default",
      "classifier": {
        "kind": "constant",            // constant | stub | remote
        "endpoint": "",                // remote only
        "labels_file": "",             // defaults to the bundled COCO-80 list
        "sidecar": "",                 // stub only
        "fixed_label": "object",
        "timeout_s": 30.0
      },
      "llm": {
        "base_url": "http://127.0.0.1:8080",
        "model": "local",
        "auth_env_var": "LLM_API_KEY",
        "timeout_s": 60.0,
        "max_retries": 2
      }
    }

Flag overrides (CLI) and request overrides (service) are shallow per-key
updates applied on top of the file values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .attributes import ClassifierRef, coco_labels
from .errors import ConfigError


@dataclass(frozen=True)
class LlmConfig:
    """Where and how to reach the chat-completion endpoint."""

    base_url: str
    model: str
    auth_env_var: str = "LLM_API_KEY"
    timeout_s: float = 60.0
    max_retries: int = 2

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


def _default_classifier() -> ClassifierRef:
    return ClassifierRef(kind="constant", label_set=("object",), fixed_label="object")


@dataclass(frozen=True)
class PipelineConfig:
    threshold: float = 0.5
    connectivity: int = 8
    min_area_fraction: float = 0.005
    normalize_mode: str = "minmax"
    classifier: ClassifierRef = field(default_factory=_default_classifier)
    color_table: str = "default"
    llm: LlmConfig | None = None

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")
        if not 0.0 <= self.min_area_fraction <= 1.0:
            raise ValueError("min_area_fraction must lie in [0, 1]")
        if self.normalize_mode not in ("minmax", "clamp"):
            raise ValueError("normalize_mode must be minmax or clamp")


def _build_classifier(doc: dict) -> ClassifierRef:
    labels_file = doc.get("labels_file", "")
    if labels_file:
        with open(labels_file) as fh:
            label_set = tuple(line.strip() for line in fh if line.strip())
    else:
        label_set = coco_labels()
    kind = doc.get("kind", "constant")
    if kind == "constant":
        fixed = doc.get("fixed_label", "object")
        if fixed not in label_set:
            label_set = label_set + (fixed,)
    else:
        fixed = doc.get("fixed_label", "")
    return ClassifierRef(
        kind=kind,
        label_set=label_set,
        endpoint=doc.get("endpoint", ""),
        sidecar=doc.get("sidecar", ""),
        fixed_label=fixed,
        timeout_s=float(doc.get("timeout_s", 30.0)),
    )


def config_from_dict(doc: dict) -> PipelineConfig:
    try:
        llm = None
        if "llm" in doc:
            llm_doc = dict(doc["llm"])
            llm = LlmConfig(
                base_url=llm_doc["base_url"],
                model=llm_doc.get("model", "default"),
                auth_env_var=llm_doc.get("auth_env_var", "LLM_API_KEY"),
                timeout_s=float(llm_doc.get("timeout_s", 60.0)),
                max_retries=int(llm_doc.get("max_retries", 2)),
            )
        return PipelineConfig(
            threshold=float(doc.get("threshold", 0.5)),
            connectivity=int(doc.get("connectivity", 8)),
            min_area_fraction=float(doc.get("min_area_fraction", 0.005)),
            normalize_mode=doc.get("normalize_mode", "minmax"),
            classifier=_build_classifier(doc.get("classifier", {})),
            color_table=doc.get("color_table", "default"),
            llm=llm,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def load_config(path: str | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Load config from a JSON file (or defaults) and apply overrides."""
    doc: dict = {}
    if path:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"{path}: {e}") from e
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top-level JSON value must be an object")
    cfg = config_from_dict(doc)
    if overrides:
        try:
            cfg = replace(cfg, **overrides)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid override: {e}") from e
    return cfg
