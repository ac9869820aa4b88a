#!/usr/bin/env python3
"""Generate the committed test fixtures under tests/fixtures/.

The synthetic scene is a 60x50 image with two hand-placed "animal" patches
and two heatmaps highlighting one patch each. Geometry and colors are chosen
so the pipeline output is exact and stable:

  heatmap1 -> one 20x20 object at bbox (20, 3), area 400/3000, position
  top-center, salient cells center > center-right > top-center, colors
  pale orange 50% / orange 30% / pale bright orange 20% (plus a 3-px
  speckle that the area filter must drop);

  heatmap2 (CSV) -> one 24x22 object at bbox (18, 25), position
  bottom-center, salient cells bottom-left > center-left > center-right,
  colors pale orange / orange / pale yellow.

The frozen end-to-end report is produced by actually running the pipeline
once against the echo LLM, then freezing the bytes.
"""

from __future__ import annotations

import json
import pathlib
import sys

import numpy as np
from PIL import Image

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
import mock_llm  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

# 8-bit patch colors (each names exactly one color-table entry)
PALE_ORANGE = (179, 152, 125)
ORANGE = (179, 130, 81)
PALE_BRIGHT_ORANGE = (230, 196, 161)
PALE_YELLOW = (179, 174, 125)
BACKGROUND = (210, 215, 220)

DOG_BBOX = (20, 3, 20, 20)  # x, y, w, h
CAT_BBOX = (18, 25, 24, 22)

# inputs for the frozen end-to-end report (must match test_acceptance)
REPORT_PROVENANCE = (
    "A neural network produced one heatmap per detected concept for this image."
)
REPORT_QUESTION = "Is the model focusing on the right objects?"
REPORT_CREATED_AT = "2025-01-01T00:00:00Z"
MOCK_LLM_PORT = 8799
MOCK_LLM_MODEL = "echo"


def cell_slices(extent: int) -> list[slice]:
    """Half-open third cells over pixel indices, same floor rule as locate."""
    cells = np.minimum(2, (3 * (np.arange(extent) + 0.5) / extent).astype(int))
    return [slice(int(np.argmax(cells == c)), int(np.sum(cells <= c))) for c in range(3)]


def build_image() -> np.ndarray:
    img = np.zeros((50, 60, 3), dtype=np.uint8)
    img[:, :] = BACKGROUND
    x, y, w, h = DOG_BBOX
    img[y : y + 10, x : x + w] = PALE_ORANGE  # 200 px = 50%
    img[y + 10 : y + 16, x : x + w] = ORANGE  # 120 px = 30%
    img[y + 16 : y + h, x : x + w] = PALE_BRIGHT_ORANGE  # 80 px = 20%

    x, y, w, h = CAT_BBOX
    patch = np.empty((h * w, 3), dtype=np.uint8)
    patch[:264] = PALE_ORANGE  # 50%
    patch[264 : 264 + 158] = ORANGE
    patch[264 + 158 :] = PALE_YELLOW
    img[y : y + h, x : x + w] = patch.reshape(h, w, 3)
    return img


def build_heatmap1() -> np.ndarray:
    hm = np.zeros((50, 60), dtype=np.uint8)
    x, y, w, h = DOG_BBOX
    hm[max(y - 1, 0) : y + h + 1, max(x - 1, 0) : x + w + 1] = 115  # halo, <= 0.5
    hm[y : y + h, x : x + w] = 179  # base 0.702
    rows = cell_slices(h)
    cols = cell_slices(w)

    def cell(r, c, value):
        hm[y + rows[r].start : y + rows[r].stop, x + cols[c].start : x + cols[c].stop] = value

    cell(1, 1, 255)  # center: 1.0
    cell(1, 2, 230)  # center-right: 0.902
    cell(0, 1, 204)  # top-center: 0.8
    hm[45, 2:5] = 153  # 3-px speckle, dropped by the area filter
    return hm


def build_heatmap2() -> np.ndarray:
    hm = np.zeros((50, 60), dtype=np.float64)
    x, y, w, h = CAT_BBOX
    hm[y : y + h, x : x + w] = 0.7
    rows = cell_slices(h)
    cols = cell_slices(w)
    hm[y + rows[2].start : y + rows[2].stop, x + cols[0].start : x + cols[0].stop] = 1.0
    hm[y + rows[1].start : y + rows[1].stop, x + cols[0].start : x + cols[0].stop] = 0.9
    hm[y + rows[1].start : y + rows[1].stop, x + cols[2].start : x + cols[2].stop] = 0.8
    return hm


def write_config(fixtures: pathlib.Path) -> None:
    # demo config with repo-root-relative paths; tests build their own
    config = {
        "threshold": 0.5,
        "connectivity": 8,
        "min_area_fraction": 0.005,
        "normalize_mode": "minmax",
        "classifier": {"kind": "stub", "sidecar": "tests/fixtures/sidecar.json"},
        "llm": {
            "base_url": f"http://127.0.0.1:{MOCK_LLM_PORT}",
            "model": MOCK_LLM_MODEL,
            "timeout_s": 10.0,
            "max_retries": 1,
        },
    }
    (fixtures / "config.json").write_text(json.dumps(config, indent=2) + "\n")


def report_config(fixtures: pathlib.Path):
    """The pipeline+LLM config the frozen report was generated with."""
    from heatcap import ClassifierRef, LlmConfig, PipelineConfig, coco_labels

    return PipelineConfig(
        classifier=ClassifierRef(
            kind="stub",
            label_set=coco_labels(),
            sidecar=str(fixtures / "sidecar.json"),
        ),
        llm=LlmConfig(
            base_url=f"http://127.0.0.1:{MOCK_LLM_PORT}",
            model=MOCK_LLM_MODEL,
            timeout_s=10.0,
            max_retries=1,
        ),
    )


def freeze_report(fixtures: pathlib.Path) -> None:
    from heatcap import generate_report, load_heatmap, load_image
    from heatcap.reasoning import report_to_json

    server, base_url = mock_llm.start_background(MOCK_LLM_PORT)
    try:
        cfg = report_config(fixtures)
        report = generate_report(
            load_image(str(fixtures / "image.png")),
            [
                ("Heatmap1", load_heatmap(str(fixtures / "heatmap1.png"))),
                ("Heatmap2", load_heatmap(str(fixtures / "heatmap2.csv"))),
            ],
            REPORT_PROVENANCE,
            REPORT_QUESTION,
            cfg,
            cfg.llm,
            created_at=REPORT_CREATED_AT,
        )
    finally:
        server.shutdown()
    payload = json.dumps(report_to_json(report), indent=2) + "\n"
    (fixtures / "frozen_report.json").write_text(payload)


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    Image.fromarray(build_image()).save(FIXTURES / "image.png")
    Image.fromarray(build_heatmap1(), mode="L").save(FIXTURES / "heatmap1.png")
    np.savetxt(FIXTURES / "heatmap2.csv", build_heatmap2(), delimiter=",", fmt="%.4f")
    (FIXTURES / "sidecar.json").write_text(
        json.dumps(
            {
                ",".join(map(str, DOG_BBOX)): "dog",
                ",".join(map(str, CAT_BBOX)): "cat",
            },
            indent=2,
        )
        + "\n"
    )
    write_config(FIXTURES)
    freeze_report(FIXTURES)
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
