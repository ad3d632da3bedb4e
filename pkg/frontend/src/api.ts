/**
 * Typed client for the blockshelf service.
 *
 * Every mutating call carries the caller's last-known revision in the
 * If-Match-Revision header; a stale revision surfaces as ApiError with
 * status 409 so the store can refresh and retry.
 */

import type {
  CodegenPayload,
  Envelope,
  ShelfStatus,
  WorkspacePayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function fail(response: Response): Promise<never> {
  let code = "http-error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") {
      code = body.error;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<Envelope<T>> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) await fail(response);
    return (await response.json()) as Envelope<T>;
  }

  private async post<T>(
    path: string,
    revision: number,
    body?: unknown,
    rawBody?: ArrayBuffer | string,
  ): Promise<Envelope<T>> {
    const headers: Record<string, string> = { "If-Match-Revision": String(revision) };
    let payload: string | ArrayBuffer | undefined = rawBody;
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      payload = JSON.stringify(body);
    } else if (rawBody !== undefined) {
      headers["Content-Type"] = "application/xml";
    }
    const response = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers,
      body: payload,
    });
    if (!response.ok) await fail(response);
    return (await response.json()) as Envelope<T>;
  }

  workspace(): Promise<Envelope<WorkspacePayload>> {
    return this.getJson("/workspace");
  }

  shelves(): Promise<Envelope<ShelfStatus[]>> {
    return this.getJson("/shelves");
  }

  codegen(): Promise<Envelope<CodegenPayload>> {
    return this.getJson("/codegen");
  }

  createShelf(revision: number, name: string, roots: string[]) {
    return this.post<{ shelf: string }>("/shelves", revision, { name, roots });
  }

  assignToShelf(revision: number, shelfId: string, roots: string[]) {
    return this.post<{ shelf: string }>(`/shelves/${shelfId}/assign`, revision, { roots });
  }

  setVisibility(revision: number, shelfId: string, visible: boolean) {
    return this.post(`/shelves/${shelfId}/visibility`, revision, { visible });
  }

  setCollapsed(revision: number, shelfId: string, collapsed: boolean) {
    return this.post(`/shelves/${shelfId}/collapse`, revision, { collapsed });
  }

  setEnabled(revision: number, shelfId: string, enabled: boolean) {
    return this.post(`/shelves/${shelfId}/enabled`, revision, { enabled });
  }

  duplicateShelf(revision: number, shelfId: string) {
    return this.post<{ shelf: string; name: string }>(
      `/shelves/${shelfId}/duplicate`,
      revision,
    );
  }

  async exportShelf(shelfId: string): Promise<{ bytes: ArrayBuffer; filename: string }> {
    const response = await this.fetchImpl(`${this.baseUrl}/shelves/${shelfId}/export`);
    if (!response.ok) await fail(response);
    const disposition = response.headers.get("Content-Disposition") ?? "";
    const match = /filename="([^"]+)"/.exec(disposition);
    return {
      bytes: await response.arrayBuffer(),
      filename: match ? match[1] : `shelf-${shelfId}.shelfexport.xml`,
    };
  }

  importShelf(revision: number, document: ArrayBuffer | string, namePolicy = "suffix") {
    return this.post<{ shelf: string; name: string }>(
      `/shelves/import?name_policy=${namePolicy}`,
      revision,
      undefined,
      document,
    );
  }

  setComment(revision: number, blockId: string, comment: string | null) {
    return this.post(`/blocks/${blockId}/comment`, revision, { comment });
  }

  async save(): Promise<Envelope<{ path: string; bytes: number }>> {
    const response = await this.fetchImpl(`${this.baseUrl}/save`, { method: "POST" });
    if (!response.ok) await fail(response);
    return (await response.json()) as Envelope<{ path: string; bytes: number }>;
  }
}
