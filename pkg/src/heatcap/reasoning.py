"""Prompt assembly and the chat-completion client producing XAI reports.

A prompt has three parts in fixed order: a provenance paragraph (how the
heatmap was generated), the caption block, and the user's question. The
chat wire format is the de-facto standard: POST {base_url}/chat/completions
with {"model", "messages"}; the reply lives at choices[0].message.content.
"""

from __future__ import annotations

import datetime
import json
import os
import time
from dataclasses import dataclass, field

import requests

from .captioner import Caption, caption_from_json, caption_to_json
from .config import LlmConfig, PipelineConfig
from .errors import (
    LlmAuthMissingError,
    LlmError,
    LlmHttpError,
    LlmTimeoutError,
    MalformedResponseError,
)
from .pipeline import caption_heatmap
from .raster import Heatmap, ImageRGB

MULTI_CAPTION_LEAD_IN = "Here are detailed information about heatmaps:"
SINGLE_CAPTION_LEAD_IN = "Here is the description of this heatmap:"

BACKOFF_BASE_S = 1.0
BACKOFF_FACTOR = 2.0


@dataclass(frozen=True)
class PromptSpec:
    provenance: str
    captions: tuple[tuple[str, str], ...]  # (label, caption text)
    question: str

    def __post_init__(self):
        if not self.captions:
            raise ValueError("at least one caption is required")
        if not self.question:
            raise ValueError("question must be non-empty")


def build_prompt(spec: PromptSpec) -> str:
    """Concatenate provenance, caption block and question with single spaces.

    With several captions each is prefixed by its label; a lone caption is
    quoted after the singular lead-in instead.
    """
    parts = []
    if spec.provenance:
        parts.append(spec.provenance)
    if len(spec.captions) == 1:
        parts.append(f'{SINGLE_CAPTION_LEAD_IN} "{spec.captions[0][1]}"')
    else:
        parts.append(MULTI_CAPTION_LEAD_IN)
        parts.extend(f"{label}: {text}" for label, text in spec.captions)
    parts.append(spec.question)
    return " ".join(parts)


@dataclass
class ChatSession:
    """Mutable turn list; roles must alternate starting with user."""

    messages: list[tuple[str, str]] = field(default_factory=list)

    def add(self, role: str, content: str) -> None:
        if role not in ("user", "assistant"):
            raise ValueError(f"unknown role {role!r}")
        expected = "user" if len(self.messages) % 2 == 0 else "assistant"
        if role != expected:
            raise ValueError(f"expected a {expected} message next, got {role}")
        self.messages.append((role, content))

    def add_user(self, content: str) -> None:
        self.add("user", content)

    def as_dicts(self) -> list[dict]:
        return [{"role": r, "content": c} for r, c in self.messages]


def send(session: ChatSession, cfg: LlmConfig) -> str:
    """POST the session to the chat endpoint and append the assistant reply.

    Connection failures and 5xx answers are retried up to max_retries with
    exponential backoff (1 s base, factor 2); other failures raise at once.
    """
    if not session.messages or session.messages[-1][0] != "user":
        raise ValueError("session must end with a user message")
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    headers = {"Content-Type": "application/json"}
    token = os.environ.get(cfg.auth_env_var, "")
    if token:
        headers["Authorization"] = f"Bearer {token}"
    payload = {"model": cfg.model, "messages": session.as_dicts()}
    attempt = 0
    while True:
        retryable = None
        try:
            resp = requests.post(url, json=payload, headers=headers, timeout=cfg.timeout_s)
        except requests.Timeout as e:
            raise LlmTimeoutError(f"chat endpoint timed out after {cfg.timeout_s}s") from e
        except requests.ConnectionError as e:
            retryable = LlmError(f"chat endpoint unreachable: {e}")
        else:
            if resp.status_code == 401:
                raise LlmAuthMissingError(
                    f"chat endpoint rejected auth (is ${cfg.auth_env_var} set?)"
                )
            if resp.status_code >= 500:
                retryable = LlmHttpError(resp.status_code)
            elif not 200 <= resp.status_code < 300:
                raise LlmHttpError(resp.status_code)
            else:
                reply = _extract_reply(resp)
                session.add("assistant", reply)
                return reply
        if attempt >= cfg.max_retries:
            raise retryable
        time.sleep(BACKOFF_BASE_S * BACKOFF_FACTOR**attempt)
        attempt += 1


def _extract_reply(resp) -> str:
    try:
        doc = resp.json()
    except ValueError as e:
        raise MalformedResponseError("chat endpoint reply is not JSON") from e
    try:
        content = doc["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as e:
        raise MalformedResponseError(
            "chat endpoint reply is missing choices[0].message.content"
        ) from e
    if not isinstance(content, str):
        raise MalformedResponseError("assistant content is not a string")
    return content


@dataclass(frozen=True)
class XaiReport:
    prompt: str
    response: str
    captions: tuple[tuple[str, Caption], ...]  # (label, caption)
    created_at: str
    llm_base_url: str
    llm_model: str


def report_to_json(report: XaiReport) -> dict:
    return {
        "prompt": report.prompt,
        "response": report.response,
        "captions": [
            {"label": label, **caption_to_json(caption)}
            for label, caption in report.captions
        ],
        "created_at": report.created_at,
        "llm": {"base_url": report.llm_base_url, "model": report.llm_model},
    }


def report_from_json(doc: dict) -> XaiReport:
    return XaiReport(
        prompt=doc["prompt"],
        response=doc["response"],
        captions=tuple(
            (c["label"], caption_from_json(c)) for c in doc["captions"]
        ),
        created_at=doc["created_at"],
        llm_base_url=doc["llm"]["base_url"],
        llm_model=doc["llm"]["model"],
    )


def save_report(report: XaiReport, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(report_to_json(report), fh, indent=2)
        fh.write("\n")


def generate_report(
    image: ImageRGB,
    heatmaps: list[tuple[str, Heatmap]],
    provenance: str,
    question: str,
    cfg: PipelineConfig,
    llm: LlmConfig,
    caption_overrides: dict[str, str] | None = None,
    created_at: str | None = None,
) -> XaiReport:
    """Caption every heatmap, build one prompt, run one chat turn.

    caption_overrides maps a heatmap label to hand-edited caption text used
    in the prompt in place of the generated one (the generated caption is
    still recorded in the report). created_at defaults to the current UTC
    time; pass a fixed value for reproducible reports.
    """
    if not heatmaps:
        raise ValueError("at least one heatmap is required")
    overrides = caption_overrides or {}
    labeled_captions = []
    prompt_captions = []
    for label, hm in heatmaps:
        caption = caption_heatmap(image, hm, cfg).caption
        labeled_captions.append((label, caption))
        prompt_captions.append((label, overrides.get(label, caption.text)))
    prompt = build_prompt(
        PromptSpec(provenance=provenance, captions=tuple(prompt_captions), question=question)
    )
    session = ChatSession()
    session.add_user(prompt)
    response = send(session, llm)
    if created_at is None:
        created_at = (
            datetime.datetime.now(datetime.timezone.utc)
            .isoformat(timespec="seconds")
            .replace("+00:00", "Z")
        )
    return XaiReport(
        prompt=prompt,
        response=response,
        captions=tuple(labeled_captions),
        created_at=created_at,
        llm_base_url=llm.base_url,
        llm_model=llm.model,
    )
