// Thin typed client over the generation service. fetch is injectable so
// tests can run against a scripted stub server.

import {
  FillRequest,
  GenerateRequest,
  IconPaths,
  PathCommands,
  SuggestRequest,
  zFillRequest,
  zFillResponse,
  zGenerateRequest,
  zGenerateResponse,
  zHealthResponse,
  zSuggestRequest,
  zSuggestResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function errorMessage(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as Record<string, unknown>;
    if (Array.isArray(body.errors)) {
      return body.errors
        .map((e) => {
          const err = e as { field?: string; message?: string };
          return `${err.field ?? "?"}: ${err.message ?? "invalid"}`;
        })
        .join("; ");
    }
    if (typeof body.error === "string") return body.error;
  } catch {
    /* non-JSON body */
  }
  return `request failed with status ${res.status}`;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async post<T>(path: string, body: unknown, parse: (raw: unknown) => T): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw new ApiError(res.status, await errorMessage(res));
    return parse(await res.json());
  }

  async health(): Promise<{ ok: boolean; checkpointId: string | null }> {
    const res = await this.fetchFn(`${this.baseUrl}/health`);
    if (res.status === 503) return { ok: false, checkpointId: null };
    if (!res.ok) throw new ApiError(res.status, await errorMessage(res));
    const body = zHealthResponse.parse(await res.json());
    return { ok: body.status === "ok", checkpointId: body.checkpoint_id ?? null };
  }

  async generate(req: GenerateRequest): Promise<IconPaths[]> {
    const body = zGenerateRequest.parse(req); // validate before sending
    const parsed = await this.post("/generate", body, (raw) => zGenerateResponse.parse(raw));
    return parsed.icons;
  }

  async suggest(req: SuggestRequest): Promise<PathCommands | null> {
    const body = zSuggestRequest.parse(req);
    const parsed = await this.post("/suggest", body, (raw) => zSuggestResponse.parse(raw));
    return "end" in parsed ? null : parsed.path;
  }

  async fill(req: FillRequest): Promise<IconPaths> {
    const body = zFillRequest.parse(req);
    const parsed = await this.post("/fill", body, (raw) => zFillResponse.parse(raw));
    return parsed.icon;
  }
}
