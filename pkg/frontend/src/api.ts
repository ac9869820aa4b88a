// Typed client for the captioning service. The UI never computes captions or
// attributes itself; everything rendered comes from these responses.

export interface DominantColor {
  name: string;
  pct: number;
}

export interface CaptionObject {
  id: number;
  label: string;
  score: number;
  position: string;
  area_fraction: number;
  salient_regions: string[];
  dominant_colors: DominantColor[];
}

export interface CaptionDoc {
  text: string;
  objects: CaptionObject[];
}

export interface RegionDoc {
  id: number;
  bbox: [number, number, number, number];
  pixel_count: number;
}

export interface CaptionResult {
  label: string;
  caption: CaptionDoc;
  regions: RegionDoc[];
  overlay_png_base64: string;
}

export interface CaptionResponse {
  session_id: string;
  results: CaptionResult[];
  suggested_question: string;
}

export interface ChatMessage {
  role: "user" | "assistant";
  content: string;
}

export interface ChatResponse {
  reply: string;
  transcript: ChatMessage[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public stage: string,
    message: string,
  ) {
    super(message);
  }
}

async function raise(resp: Response): Promise<never> {
  let stage = "unknown";
  let message = `HTTP ${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") message = body.error;
    if (body && typeof body.stage === "string") stage = body.stage;
  } catch {
    // body was not JSON; keep the generic message
  }
  throw new ApiError(resp.status, stage, message);
}

export interface CaptionRequest {
  image: File;
  heatmap: File;
  provenance?: string;
  overrides?: Record<string, unknown>;
}

export async function postCaption(
  baseUrl: string,
  req: CaptionRequest,
): Promise<CaptionResponse> {
  const form = new FormData();
  form.append("image", req.image, req.image.name);
  form.append("heatmap", req.heatmap, req.heatmap.name);
  if (req.provenance) form.append("provenance", req.provenance);
  if (req.overrides && Object.keys(req.overrides).length > 0) {
    form.append("overrides", JSON.stringify(req.overrides));
  }
  const resp = await fetch(`${baseUrl}/api/caption`, { method: "POST", body: form });
  if (!resp.ok) await raise(resp);
  return (await resp.json()) as CaptionResponse;
}

export async function postChat(
  baseUrl: string,
  sessionId: string,
  message: string,
): Promise<ChatResponse> {
  const resp = await fetch(`${baseUrl}/api/chat`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ session_id: sessionId, message }),
  });
  if (!resp.ok) await raise(resp);
  return (await resp.json()) as ChatResponse;
}
