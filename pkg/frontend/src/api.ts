/** Thin typed client over fetch; every UI fact comes through here. */

import type {
  MetricsDoc,
  ReportDoc,
  SessionDoc,
  SubmitDoc,
  SuggestionEdit,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    const text = await response.text();
    let doc: unknown = null;
    try {
      doc = text ? JSON.parse(text) : null;
    } catch {
      doc = null;
    }
    if (!response.ok) {
      const message =
        doc && typeof doc === "object" && "error" in doc
          ? String((doc as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return doc as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/api/health");
  }

  async createSession(): Promise<string> {
    const doc = await this.request<{ id: string }>("POST", "/api/sessions");
    return doc.id;
  }

  getSession(id: string): Promise<SessionDoc> {
    return this.request("GET", `/api/sessions/${id}`);
  }

  submitRuleset(id: string, text: string): Promise<SubmitDoc> {
    return this.request("POST", `/api/sessions/${id}/ruleset`, { text });
  }

  explain(
    id: string,
    revision: number,
    verdict: number,
    systemDescription = "",
  ): Promise<ReportDoc> {
    return this.request("POST", `/api/sessions/${id}/explain`, {
      revision,
      verdict,
      system_description: systemDescription,
    });
  }

  apply(id: string, revision: number, edit: SuggestionEdit): Promise<SubmitDoc> {
    return this.request("POST", `/api/sessions/${id}/apply`, { revision, ...edit });
  }

  metrics(id: string): Promise<MetricsDoc> {
    return this.request("GET", `/api/sessions/${id}/metrics`);
  }
}
