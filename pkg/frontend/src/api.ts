/** Typed client for the simulator HTTP API plus a small SSE reader. */

import type { CircuitJson } from "./model.js";

export interface StateRowJson {
  s: number;
  r: number;
  i: number;
}

export interface StepJson {
  index: number;
  gate_indices: number[];
  sql: string;
  rows: StateRowJson[];
  truncated: boolean;
}

export interface SimulateOptions {
  fusion_window?: number;
  epsilon?: number;
  keep_intermediates?: boolean;
  shots?: number;
  seed?: number;
}

export interface SimulateRequest {
  circuit?: CircuitJson;
  family?: { name: string; params: Record<string, unknown> };
  backend?: string;
  options?: SimulateOptions;
}

export interface SimulateResponse {
  final_state: StateRowJson[];
  probabilities: { s: number; p: number }[];
  sql: string;
  metrics: Record<string, unknown>;
  steps?: StepJson[];
  counts?: Record<string, number>;
}

export interface TranslateResponse {
  sql: string;
  statement_count: number;
  state_tables: string[];
  gate_tables: string[];
}

export interface FamilyDescriptor {
  name: string;
  description: string;
  params: {
    name: string;
    type: string;
    required: boolean;
    default: number | null;
    min: number | null;
    max: number | null;
    description: string;
  }[];
}

export interface BackendDescriptor {
  name: string;
  version: string;
  supports_disk: boolean;
  kind: string;
}

export interface BenchRowJson {
  family: string;
  params: Record<string, unknown>;
  backend: string;
  rep: number;
  wall_ns: number | null;
  step_wall_ns: number | null;
  final_rows: number | null;
  peak_rows: number | null;
  mem_bytes: number | null;
  status: string;
  error?: string;
}

export interface ScenarioJson {
  family: string;
  params: Record<string, unknown>;
  backends: string[];
  repetitions: number;
  options?: { fusion_window?: number; epsilon?: number; mode?: string };
}

export interface ApiErrorBody {
  code: string;
  message: string;
  [key: string]: unknown;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(body.message ?? `HTTP ${status}`);
  }
}

export interface SseEvent {
  event: string;
  data: unknown;
}

/** Parse a text/event-stream body into events, chunk boundaries be damned. */
export async function* sseEvents(
  stream: ReadableStream<Uint8Array>,
): AsyncGenerator<SseEvent> {
  const decoder = new TextDecoder();
  const reader = stream.getReader();
  let buffer = "";
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) {
        break;
      }
      buffer += decoder.decode(value, { stream: true });
      for (;;) {
        const split = buffer.indexOf("\n\n");
        if (split < 0) {
          break;
        }
        const block = buffer.slice(0, split);
        buffer = buffer.slice(split + 2);
        const parsed = parseSseBlock(block);
        if (parsed) {
          yield parsed;
        }
      }
    }
  } finally {
    reader.releaseLock();
  }
}

function parseSseBlock(block: string): SseEvent | null {
  let event = "message";
  const dataLines: string[] = [];
  for (const line of block.split("\n")) {
    if (line.startsWith("event: ")) {
      event = line.slice(7).trim();
    } else if (line.startsWith("data: ")) {
      dataLines.push(line.slice(6));
    }
  }
  if (dataLines.length === 0) {
    return null;
  }
  return { event, data: JSON.parse(dataLines.join("\n")) };
}

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "http_error", message: `HTTP ${response.status}` };
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  families(): Promise<FamilyDescriptor[]> {
    return this.request("/families");
  }

  backends(): Promise<BackendDescriptor[]> {
    return this.request("/backends");
  }

  translate(body: SimulateRequest): Promise<TranslateResponse> {
    return this.post("/translate", body);
  }

  simulate(body: SimulateRequest): Promise<SimulateResponse> {
    return this.post("/simulate", body);
  }

  benchmarkStart(scenario: ScenarioJson): Promise<{ run_id: string }> {
    return this.post("/benchmark/start", scenario);
  }

  benchmarkPoll(runId: string): Promise<{
    state: string;
    completed: number;
    total: number;
    report?: BenchRowJson[];
  }> {
    return this.request(`/benchmark/runs/${runId}`);
  }

  /** Live progress events for a benchmark run. */
  async *benchmarkEvents(runId: string): AsyncGenerator<SseEvent> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/benchmark/runs/${runId}/events`,
    );
    if (!response.ok || !response.body) {
      throw new ApiError(response.status, {
        code: "stream_error",
        message: `cannot stream run ${runId}`,
      });
    }
    yield* sseEvents(response.body);
  }

  benchmarkCsvUrl(runId: string): string {
    return `${this.baseUrl}/benchmark/runs/${runId}/report.csv`;
  }
}
