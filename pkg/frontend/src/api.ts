import type {
  AnnotationsResponse,
  AssignmentsResponse,
  LabelsResponse,
  ReportResponse,
  TopicsResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`HTTP ${status}: ${JSON.stringify(detail)}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client; base URL and fetch are injectable for tests. */
export class Client {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      body = null;
    }
    if (!resp.ok) {
      throw new ApiError(resp.status, body);
    }
    return body as T;
  }

  getTopics(): Promise<TopicsResponse> {
    return this.request("/api/topics");
  }

  getLabels(): Promise<LabelsResponse> {
    return this.request("/api/labels");
  }

  getAssignments(): Promise<AssignmentsResponse> {
    return this.request("/api/assignments");
  }

  getAnnotations(annotator?: string): Promise<AnnotationsResponse> {
    const query = annotator
      ? `?annotator=${encodeURIComponent(annotator)}`
      : "";
    return this.request(`/api/annotations${query}`);
  }

  getReport(): Promise<ReportResponse> {
    return this.request("/api/report");
  }

  postAnnotation(record: {
    annotator: string;
    topic_id: number;
    first: string;
    second: string | null;
  }): Promise<unknown> {
    return this.request("/api/annotations", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
  }

  postOverride(record: {
    topic_id: number;
    label: string | null;
    annotator: string;
  }): Promise<unknown> {
    return this.request("/api/overrides", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
  }
}
