"""Command-line interface: caption, report, chat and serve subcommands."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .captioner import caption_to_json
from .config import load_config
from .errors import (
    ClassifierUnavailableError,
    ColorTableError,
    ConfigError,
    CorruptDataError,
    EngineError,
    InvalidDataError,
    LlmError,
    ProtocolViolationError,
    StubMissError,
    UnsupportedFormatError,
)
from .pipeline import caption_heatmap
from .raster import load_heatmap, load_image
from .reasoning import (
    ChatSession,
    PromptSpec,
    build_prompt,
    generate_report,
    report_to_json,
    save_report,
    send,
)

EXIT_CODES = """\
exit codes:
  0  success
  1  unexpected error
  2  file not found
  3  unsupported input format
  4  corrupt input data (including non-rectangular CSV)
  5  invalid raster values (NaN/Inf)
  6  invalid configuration or color table
  7  classifier unavailable
  8  classifier protocol violation or stub miss
  9  chat endpoint failure (timeout, HTTP error, malformed reply, auth)
"""

_EXIT_BY_ERROR = (
    (FileNotFoundError, 2),
    (UnsupportedFormatError, 3),
    (CorruptDataError, 4),
    (InvalidDataError, 5),
    (ConfigError, 6),
    (ColorTableError, 6),
    (ClassifierUnavailableError, 7),
    (ProtocolViolationError, 8),
    (StubMissError, 8),
    (LlmError, 9),
)


def _exit_code(exc: BaseException) -> int:
    for etype, code in _EXIT_BY_ERROR:
        if isinstance(exc, etype):
            return code
    return 1


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="heatcap",
        description="Caption model-attention heatmaps and generate XAI reports.",
        epilog=EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--image", required=True, help="input image (PNG or PPM)")
        sp.add_argument(
            "--heatmap",
            action="append",
            required=True,
            help="heatmap raster (grayscale PNG or CSV); repeatable, "
            "labeled Heatmap1..N in argument order",
        )
        sp.add_argument("--config", help="pipeline config JSON file")
        sp.add_argument("--threshold", type=float, help="override object threshold")

    cap = sub.add_parser("caption", help="print the caption for each heatmap")
    common(cap)
    cap.add_argument("--json", help="also write the structured caption dump here")

    rep = sub.add_parser("report", help="caption, prompt an LLM, emit an XAI report")
    common(rep)
    rep.add_argument("--question", required=True, help="question for the reasoning step")
    rep.add_argument("--provenance", default="", help="how the heatmap(s) were generated")
    rep.add_argument("--json", help="write the XaiReport JSON here")

    chat = sub.add_parser("chat", help="interactive session seeded with the built prompt")
    common(chat)
    chat.add_argument("--question", help="first question (otherwise read from stdin)")
    chat.add_argument("--provenance", default="", help="how the heatmap(s) were generated")

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--bind", default="127.0.0.1:8000", help="host:port to listen on")
    srv.add_argument("--config", help="pipeline config JSON file")
    srv.add_argument("--static-dir", help="directory with the built web UI")
    return p


def _load_pipeline_inputs(args):
    overrides = {}
    if args.threshold is not None:
        overrides["threshold"] = args.threshold
    cfg = load_config(args.config, overrides)
    image = load_image(args.image)
    heatmaps = [
        (f"Heatmap{i}", load_heatmap(path))
        for i, path in enumerate(args.heatmap, start=1)
    ]
    return cfg, image, heatmaps


def _require_llm(cfg):
    if cfg.llm is None:
        raise ConfigError("this command needs an 'llm' section in the config file")
    return cfg.llm


def cmd_caption(args) -> int:
    cfg, image, heatmaps = _load_pipeline_inputs(args)
    docs = []
    for label, hm in heatmaps:
        result = caption_heatmap(image, hm, cfg)
        print(result.caption.text)
        docs.append({"label": label, **caption_to_json(result.caption)})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"captions": docs}, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_report(args) -> int:
    cfg, image, heatmaps = _load_pipeline_inputs(args)
    llm = _require_llm(cfg)
    report = generate_report(
        image, heatmaps, args.provenance, args.question, cfg, llm
    )
    if args.json:
        save_report(report, args.json)
        print(report.response)
    else:
        json.dump(report_to_json(report), sys.stdout, indent=2)
        print()
    return 0


def cmd_chat(args) -> int:
    cfg, image, heatmaps = _load_pipeline_inputs(args)
    llm = _require_llm(cfg)
    captions = [
        (label, caption_heatmap(image, hm, cfg).caption.text) for label, hm in heatmaps
    ]
    session = ChatSession()
    question = args.question
    if question is None:
        print("question> ", end="", flush=True)
        question = sys.stdin.readline().strip()
        if not question:
            print("no question given", file=sys.stderr)
            return 1
    prompt = build_prompt(
        PromptSpec(provenance=args.provenance, captions=tuple(captions), question=question)
    )
    session.add_user(prompt)
    print(send(session, llm))
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        if line in ("/quit", "/exit"):
            break
        session.add_user(line)
        print(send(session, llm))
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    from .service import create_app

    cfg = load_config(args.config)
    host, _, port = args.bind.rpartition(":")
    static_dir = args.static_dir
    if static_dir is None and os.path.isdir("frontend/dist"):
        static_dir = "frontend/dist"
    app = create_app(cfg, static_dir=static_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


_COMMANDS = {
    "caption": cmd_caption,
    "report": cmd_report,
    "chat": cmd_chat,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (EngineError, FileNotFoundError, ValueError) as e:
        print(f"heatcap {args.command}: {e}", file=sys.stderr)
        return _exit_code(e)


def entry() -> None:
    sys.exit(main())
