#!/usr/bin/env python3
"""End-to-end demo on the committed fixtures, no external services needed.

Captions both fixture heatmaps, renders overlays next to this script, then
generates a full XAI report against the bundled echo LLM.
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
import make_fixtures
import mock_llm

from heatcap import caption_heatmap, generate_report, load_heatmap, load_image, render_overlay
from heatcap.overlay import image_to_png_bytes

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"


def main() -> None:
    cfg = make_fixtures.report_config(FIXTURES)
    image = load_image(str(FIXTURES / "image.png"))
    heatmaps = [
        ("Heatmap1", load_heatmap(str(FIXTURES / "heatmap1.png"))),
        ("Heatmap2", load_heatmap(str(FIXTURES / "heatmap2.csv"))),
    ]

    for label, hm in heatmaps:
        result = caption_heatmap(image, hm, cfg)
        print(f"{label}: {result.caption.text}\n")
        out = ROOT / f"overlay_{label.lower()}.png"
        out.write_bytes(
            image_to_png_bytes(render_overlay(image, result.heatmap, result.regions))
        )
        print(f"  overlay written to {out}")

    server, _ = mock_llm.start_background(make_fixtures.MOCK_LLM_PORT)
    try:
        report = generate_report(
            image,
            heatmaps,
            make_fixtures.REPORT_PROVENANCE,
            make_fixtures.REPORT_QUESTION,
            cfg,
            cfg.llm,
        )
    finally:
        server.shutdown()
    print("\nPROMPT SENT:\n" + report.prompt)
    print("\nLLM RESPONSE (echo endpoint):\n" + report.response[:200] + "...")


if __name__ == "__main__":
    main()
