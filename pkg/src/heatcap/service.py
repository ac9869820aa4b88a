"""HTTP service exposing the captioning pipeline and the chat flow.

API (all JSON except the multipart uploads):

  GET  /api/health            -> {"status": "ok"}
  POST /api/caption           multipart: image, heatmap (repeatable),
                              optional overrides (JSON string), optional
                              provenance -> captions + overlays + session id
  POST /api/report            same plus provenance/question -> XaiReport
  POST /api/chat              {"session_id", "message"} -> reply + transcript
  GET  /                      built web UI static assets, when present

Errors: 400 malformed upload, 404 unknown/expired chat session, 422 pipeline
failure (body carries the failing stage), 502 upstream LLM failure.

Chat sessions are server-held and expire after an idle timeout (default 30
minutes). The first chat message of a session is treated as the question
and wrapped into the full three-part prompt built from the session's
captions; later messages are sent verbatim.
"""

from __future__ import annotations

import base64
import json
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .captioner import Caption, caption_to_json
from .config import PipelineConfig, load_config
from .errors import ConfigError, EngineError, LlmError
from .overlay import image_to_png_bytes, render_overlay
from .pipeline import caption_heatmap
from .raster import load_heatmap_bytes, load_image_bytes
from .reasoning import ChatSession, PromptSpec, build_prompt, generate_report, report_to_json, send

DEFAULT_IDLE_TIMEOUT_S = 30 * 60
SUGGESTED_QUESTION = "Is the model working properly?"

# override keys a caption/report request may adjust per call
_OVERRIDE_KEYS = {"threshold", "connectivity", "min_area_fraction", "normalize_mode", "labels"}


@dataclass
class _Session:
    captions: list[tuple[str, Caption]]
    provenance: str
    chat: ChatSession = field(default_factory=ChatSession)
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self, idle_timeout_s: float = DEFAULT_IDLE_TIMEOUT_S):
        self.idle_timeout_s = idle_timeout_s
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()

    def create(self, captions, provenance: str) -> str:
        sid = uuid.uuid4().hex
        with self._lock:
            self._sessions[sid] = _Session(list(captions), provenance)
        return sid

    def get(self, sid: str) -> _Session:
        """Fetch and touch a session; expired sessions are dropped."""
        with self._lock:
            session = self._sessions.get(sid)
            if session is None:
                raise KeyError(sid)
            now = time.monotonic()
            if now - session.last_access > self.idle_timeout_s:
                del self._sessions[sid]
                raise KeyError(sid)
            session.last_access = now
            return session


def _error_body(message: str, stage: str) -> dict:
    return {"error": message, "stage": stage}


def create_app(
    cfg: PipelineConfig | None = None,
    static_dir: str | None = None,
    idle_timeout_s: float = DEFAULT_IDLE_TIMEOUT_S,
) -> FastAPI:
    cfg = cfg or load_config()
    app = FastAPI(title="heatcap", docs_url=None, redoc_url=None)
    store = SessionStore(idle_timeout_s)
    app.state.config = cfg
    app.state.sessions = store

    @app.exception_handler(RequestValidationError)
    async def _bad_upload(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content=_error_body(str(exc.errors()), "request")
        )

    @app.exception_handler(EngineError)
    async def _pipeline_error(request: Request, exc: EngineError):
        status = 502 if isinstance(exc, LlmError) else 422
        return JSONResponse(status_code=status, content=_error_body(str(exc), exc.stage))

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    def _apply_overrides(overrides: str | None) -> PipelineConfig:
        if not overrides:
            return cfg
        try:
            doc = json.loads(overrides)
        except json.JSONDecodeError as e:
            raise ConfigError(f"overrides is not valid JSON: {e}") from e
        if not isinstance(doc, dict):
            raise ConfigError("overrides must be a JSON object")
        unknown = set(doc) - _OVERRIDE_KEYS
        if unknown:
            raise ConfigError(f"unknown override keys: {sorted(unknown)}")
        from dataclasses import replace

        labels = doc.pop("labels", None)
        try:
            out = replace(cfg, **doc)
            if labels is not None:
                if not isinstance(labels, list) or not labels or not all(
                    isinstance(x, str) and x for x in labels
                ):
                    raise ValueError("labels must be a non-empty list of strings")
                out = replace(
                    out, classifier=replace(cfg.classifier, label_set=tuple(labels))
                )
            return out
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid override: {e}") from e

    def _decode_inputs(image: UploadFile, heatmaps: list[UploadFile]):
        img = load_image_bytes(image.file.read(), name=image.filename or "image")
        hms = [
            (
                f"Heatmap{i}",
                load_heatmap_bytes(f.file.read(), name=f.filename or f"heatmap{i}"),
            )
            for i, f in enumerate(heatmaps, start=1)
        ]
        return img, hms

    @app.post("/api/caption")
    def caption(
        image: UploadFile = File(...),
        heatmap: list[UploadFile] = File(...),
        overrides: str | None = Form(None),
        provenance: str = Form(""),
    ):
        req_cfg = _apply_overrides(overrides)
        img, hms = _decode_inputs(image, heatmap)
        results = []
        captions = []
        for label, hm in hms:
            out = caption_heatmap(img, hm, req_cfg)
            png = image_to_png_bytes(render_overlay(img, out.heatmap, out.regions))
            captions.append((label, out.caption))
            results.append(
                {
                    "label": label,
                    "caption": caption_to_json(out.caption),
                    "regions": [
                        {"id": r.id, "bbox": list(r.bbox), "pixel_count": r.pixel_count}
                        for r in out.regions
                    ],
                    "overlay_png_base64": base64.b64encode(png).decode("ascii"),
                }
            )
        sid = store.create(captions, provenance)
        return {
            "session_id": sid,
            "results": results,
            "suggested_question": SUGGESTED_QUESTION,
        }

    @app.post("/api/report")
    def report(
        image: UploadFile = File(...),
        heatmap: list[UploadFile] = File(...),
        question: str = Form(...),
        provenance: str = Form(""),
        overrides: str | None = Form(None),
    ):
        req_cfg = _apply_overrides(overrides)
        if req_cfg.llm is None:
            raise ConfigError("service config has no 'llm' section")
        img, hms = _decode_inputs(image, heatmap)
        rep = generate_report(img, hms, provenance, question, req_cfg, req_cfg.llm)
        return report_to_json(rep)

    @app.post("/api/chat")
    def chat(body: dict):
        sid = body.get("session_id", "")
        message = body.get("message", "")
        if not isinstance(message, str) or not message.strip():
            return JSONResponse(
                status_code=400, content=_error_body("message must be non-empty", "request")
            )
        if cfg.llm is None:
            raise ConfigError("service config has no 'llm' section")
        try:
            session = store.get(sid)
        except KeyError:
            return JSONResponse(
                status_code=404, content=_error_body("session-unknown", "chat")
            )
        with session.lock:
            if not session.chat.messages:
                prompt = build_prompt(
                    PromptSpec(
                        provenance=session.provenance,
                        captions=tuple(
                            (label, cap.text) for label, cap in session.captions
                        ),
                        question=message,
                    )
                )
                session.chat.add_user(prompt)
            else:
                session.chat.add_user(message)
            try:
                reply = send(session.chat, cfg.llm)
            except LlmError:
                # failed turn must not leave a dangling user message
                session.chat.messages.pop()
                raise
        return {
            "reply": reply,
            "transcript": [
                {"role": r, "content": c} for r, c in session.chat.messages
            ],
        }

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
