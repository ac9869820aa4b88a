// DOM wiring for the single-page UI. One App instance per tab; every
// rendered caption and transcript entry is taken verbatim from the server.

import { ApiError, postCaption, postChat } from "./api.js";
import type { CaptionResponse, ChatMessage } from "./api.js";
import {
  attributeRows,
  canSend,
  describeRegion,
  parseLabels,
  validateUpload,
} from "./state.js";

export class App {
  private doc: Document;
  private baseUrl: string;
  sessionId: string | null = null;
  private lastImage: File | null = null;
  private lastHeatmap: File | null = null;
  private pendingMessage: string | null = null;

  constructor(doc: Document, baseUrl = "") {
    this.doc = doc;
    this.baseUrl = baseUrl;
    this.el("caption-btn").addEventListener("click", () => this.onSubmitClicked());
    this.el("threshold").addEventListener("change", () => this.onThresholdChanged());
    this.el("threshold").addEventListener("input", () => {
      this.el("threshold-value").textContent = this.thresholdValue().toFixed(2);
    });
    const input = this.el("chat-input") as HTMLInputElement;
    input.addEventListener("input", () => this.refreshSendButton());
    this.el("chat-send").addEventListener("click", () => {
      void this.sendChat(input.value);
    });
    this.el("chat-retry").addEventListener("click", () => {
      if (this.pendingMessage !== null) void this.sendChat(this.pendingMessage);
    });
    this.refreshSendButton();
  }

  private el(id: string): HTMLElement {
    const node = this.doc.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node;
  }

  private thresholdValue(): number {
    return parseFloat((this.el("threshold") as HTMLInputElement).value);
  }

  private setError(text: string): void {
    this.el("upload-error").textContent = text;
  }

  private setStatus(text: string): void {
    this.el("chat-status").textContent = text;
  }

  private refreshSendButton(): void {
    const input = this.el("chat-input") as HTMLInputElement;
    const send = this.el("chat-send") as HTMLButtonElement;
    send.disabled = !canSend(input.value) || this.sessionId === null;
  }

  private onSubmitClicked(): void {
    const image = (this.el("image-file") as HTMLInputElement).files?.[0];
    const heatmap = (this.el("heatmap-file") as HTMLInputElement).files?.[0];
    if (!image || !heatmap) {
      this.setError("choose both an image and a heatmap file");
      return;
    }
    void this.submitFiles(image, heatmap);
  }

  private onThresholdChanged(): void {
    if (this.lastImage && this.lastHeatmap) {
      void this.submitFiles(this.lastImage, this.lastHeatmap);
    }
  }

  /** Upload, caption and render; rejects bad files before any request. */
  async submitFiles(image: File, heatmap: File): Promise<void> {
    for (const [file, kind] of [
      [image, "image"],
      [heatmap, "heatmap"],
    ] as const) {
      const problem = validateUpload(file, kind);
      if (problem) {
        this.setError(problem);
        return;
      }
    }
    this.setError("");
    const provenance = (this.el("provenance") as HTMLInputElement).value;
    const threshold = this.thresholdValue();
    const labels = parseLabels((this.el("labels") as HTMLInputElement).value);
    const overrides: Record<string, unknown> = {};
    if (threshold !== 0.5) overrides.threshold = threshold;
    if (labels.length > 0) overrides.labels = labels;
    let resp: CaptionResponse;
    try {
      resp = await postCaption(this.baseUrl, {
        image,
        heatmap,
        provenance,
        overrides,
      });
    } catch (err) {
      if (err instanceof ApiError) {
        this.setError(`caption failed (${err.stage}): ${err.message}`);
        return;
      }
      throw err;
    }
    this.lastImage = image;
    this.lastHeatmap = heatmap;
    this.sessionId = resp.session_id;
    this.renderResult(resp);
    this.renderTranscript([]);
    const input = this.el("chat-input") as HTMLInputElement;
    if (!input.value) input.value = resp.suggested_question;
    this.refreshSendButton();
  }

  private renderResult(resp: CaptionResponse): void {
    const result = resp.results[0];
    const overlay = this.el("overlay") as HTMLImageElement;
    overlay.src = `data:image/png;base64,${result.overlay_png_base64}`;
    this.el("caption-text").textContent = result.caption.text;

    const list = this.el("bbox-list");
    list.textContent = "";
    for (const region of result.regions) {
      const li = this.doc.createElement("li");
      li.textContent = describeRegion(region.id, region.bbox, region.pixel_count);
      list.appendChild(li);
    }

    const tbody = this.el("attr-rows");
    tbody.textContent = "";
    for (const row of attributeRows(result.caption.objects)) {
      const tr = this.doc.createElement("tr");
      for (const cell of [
        String(row.id),
        row.label,
        row.position,
        row.area,
        row.salient,
        row.colors,
      ]) {
        const td = this.doc.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      tbody.appendChild(tr);
    }
  }

  /** One chat turn; the rendered transcript always mirrors the server's. */
  async sendChat(message: string): Promise<void> {
    if (!canSend(message) || this.sessionId === null) return;
    this.setStatus("");
    this.el("chat-retry").hidden = true;
    try {
      const resp = await postChat(this.baseUrl, this.sessionId, message);
      this.pendingMessage = null;
      this.renderTranscript(resp.transcript);
      (this.el("chat-input") as HTMLInputElement).value = "";
      this.refreshSendButton();
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      if (err.status === 404 && this.lastImage && this.lastHeatmap) {
        // session expired server-side: start a fresh one and tell the user
        await this.submitFiles(this.lastImage, this.lastHeatmap);
        this.setStatus("Session expired; a new one was started. Send again.");
        return;
      }
      this.pendingMessage = message;
      this.el("chat-retry").hidden = false;
      this.setStatus(`chat failed (${err.stage}): ${err.message}`);
    }
  }

  private renderTranscript(transcript: ChatMessage[]): void {
    const list = this.el("transcript");
    list.textContent = "";
    for (const msg of transcript) {
      const li = this.doc.createElement("li");
      li.className = `turn turn-${msg.role}`;
      li.textContent = `${msg.role}: ${msg.content}`;
      list.appendChild(li);
    }
  }

  transcriptLength(): number {
    return this.el("transcript").children.length;
  }
}

export function mount(doc: Document, baseUrl = ""): App {
  return new App(doc, baseUrl);
}

declare global {
  interface Window {
    heatcapApp?: App;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.addEventListener("DOMContentLoaded", () => {
    window.heatcapApp = mount(document);
  });
}
