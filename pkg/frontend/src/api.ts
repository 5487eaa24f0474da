/** Thin fetch client for the inpainting service. */

import type {
  ApiErrorBody,
  CreateSessionRequest,
  HistoryResponse,
  InpaintRequest,
  InpaintResponse,
  LeadSheetExport,
  PinChange,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody | null;

  constructor(status: number, body: ApiErrorBody | null) {
    super(body ? body.message : `request failed with status ${status}`);
    this.status = status;
    this.body = body;
  }

  get isInfeasible(): boolean {
    return this.status === 409;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let body: ApiErrorBody | null = null;
    try {
      // FastAPI wraps structured errors as {"detail": {code, message, detail}}
      const payload = await resp.json();
      body = typeof payload.detail === "object" ? payload.detail : { code: "error", message: String(payload.detail) };
    } catch {
      body = null;
    }
    throw new ApiError(resp.status, body);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  createSession(body: CreateSessionRequest): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getSession(id: string): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}`);
  }

  setPins(id: string, pins: PinChange[]): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}/pins`, {
      method: "PUT",
      body: JSON.stringify({ pins }),
    });
  }

  inpaint(id: string, body: InpaintRequest): Promise<InpaintResponse> {
    return request(`${this.baseUrl}/sessions/${id}/inpaint`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  accept(id: string, candidate: number): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}/accept`, {
      method: "POST",
      body: JSON.stringify({ candidate }),
    });
  }

  exportSheet(id: string): Promise<LeadSheetExport> {
    return request(`${this.baseUrl}/sessions/${id}/export`);
  }

  history(id: string): Promise<HistoryResponse> {
    return request(`${this.baseUrl}/sessions/${id}/history`);
  }
}
