// Pure client-side logic, kept DOM-free so it is unit-testable.

import type { CaptionObject, ChatMessage } from "./api.js";

export const MAX_UPLOAD_BYTES = 20 * 1024 * 1024;

interface FileLike {
  name: string;
  size: number;
  type: string;
}

function hasExtension(name: string, exts: string[]): boolean {
  const lower = name.toLowerCase();
  return exts.some((ext) => lower.endsWith(ext));
}

/** Client-side pre-upload check; returns an error message or null. */
export function validateUpload(file: FileLike, kind: "image" | "heatmap"): string | null {
  if (file.size === 0) return `${kind} file is empty`;
  if (file.size > MAX_UPLOAD_BYTES) {
    return `${kind} file exceeds ${MAX_UPLOAD_BYTES / (1024 * 1024)} MB`;
  }
  const allowed = kind === "image" ? [".png", ".ppm"] : [".png", ".csv"];
  if (!hasExtension(file.name, allowed)) {
    return `${kind} must be one of: ${allowed.join(", ")}`;
  }
  return null;
}

/** Send is enabled only for non-blank messages. */
export function canSend(message: string): boolean {
  return message.trim().length > 0;
}

/** The transcript is valid iff roles alternate starting with "user". */
export function isAlternating(transcript: ChatMessage[]): boolean {
  return transcript.every(
    (msg, i) => msg.role === (i % 2 === 0 ? "user" : "assistant"),
  );
}

export interface AttributeRow {
  id: number;
  label: string;
  position: string;
  area: string;
  salient: string;
  colors: string;
}

/** Rows for the per-object attribute table, straight from the server JSON. */
export function attributeRows(objects: CaptionObject[]): AttributeRow[] {
  return objects.map((o) => ({
    id: o.id,
    label: o.label,
    position: o.position,
    area: `${(o.area_fraction * 100).toFixed(2)}%`,
    salient: o.salient_regions.join(", "),
    colors: o.dominant_colors
      .map((c) => `${c.name} (${(c.pct * 100).toFixed(0)}%)`)
      .join(", "),
  }));
}

export function describeRegion(id: number, bbox: number[], pixels: number): string {
  const [x, y, w, h] = bbox;
  return `Object ${id}: bbox x=${x} y=${y} w=${w} h=${h} (${pixels} px)`;
}

/** Comma-separated classifier labels from the override form; [] means "default". */
export function parseLabels(raw: string): string[] {
  return raw
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
}
