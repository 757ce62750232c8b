/** Typed client for the preview service. */

import type { PreviewResponse, ProjectDocument } from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly module: string;

  constructor(status: number, message: string, module: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.module = module;
  }

  /** Module-attributed label for inline display. */
  get label(): string {
    return `[${this.module}] ${this.message}`;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function parseBody(res: Response): Promise<Record<string, unknown>> {
  try {
    return (await res.json()) as Record<string, unknown>;
  } catch {
    return {};
  }
}

export class EngineClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private previewGeneration = 0;

  constructor(baseUrl = "", fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  url(path: string): string {
    return this.baseUrl + path;
  }

  private async request(path: string, init?: RequestInit): Promise<Record<string, unknown>> {
    const res = await this.fetchImpl(this.url(path), init);
    const body = await parseBody(res);
    if (!res.ok) {
      const message = typeof body.error === "string" ? body.error : `http ${res.status}`;
      const module = typeof body.module === "string" ? body.module : "service";
      throw new ApiError(res.status, message, module);
    }
    return body;
  }

  /** Upload raw bytes, returning the "asset:<id>" ref documents expect. */
  async uploadAsset(bytes: BodyInit, contentType: string): Promise<string> {
    const body = await this.request("/assets", {
      method: "POST",
      headers: { "content-type": contentType },
      body: bytes,
    });
    return `asset:${String(body.id)}`;
  }

  async createProject(doc: ProjectDocument): Promise<string> {
    const body = await this.request("/projects", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
    return String(body.id);
  }

  async putProject(id: string, doc: ProjectDocument): Promise<void> {
    await this.request(`/projects/${id}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
  }

  async getProject(id: string): Promise<ProjectDocument> {
    return (await this.request(`/projects/${id}`)) as unknown as ProjectDocument;
  }

  /**
   * Render a preview. Latest call wins: when a newer request starts before
   * this one resolves, the stale result is dropped and null is returned.
   */
  async requestPreview(id: string): Promise<PreviewResponse | null> {
    const generation = ++this.previewGeneration;
    const res = await this.fetchImpl(this.url(`/projects/${id}/preview`), { method: "POST" });
    if (generation !== this.previewGeneration) {
      return null;
    }
    const body = await parseBody(res);
    if (!res.ok) {
      const message = typeof body.error === "string" ? body.error : `http ${res.status}`;
      const module = typeof body.module === "string" ? body.module : "service";
      throw new ApiError(res.status, message, module);
    }
    return body as unknown as PreviewResponse;
  }

  /** The colorized twin the service serves next to each .flo frame. */
  flowPngUrl(flowUrl: string): string {
    return flowUrl.replace(/\.flo$/, ".png");
  }
}

/** Trailing-edge debounce; each call restarts the countdown. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, delayMs);
  };
}
