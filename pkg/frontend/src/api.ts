/** Typed client for the spectrum service HTTP API.
 *
 * Every number the UI displays comes out of these responses; the client keeps
 * a request log so tests can assert that nothing was computed locally.
 */

import { baseUrl } from "./config.js";

export type ChannelStatus =
  | "available_usable"
  | "unavailable_or_unusable"
  | "unknown";

export interface AvailabilityResponse {
  queried: { lat: number; lon: number };
  matched: boolean;
  pixel: { lat: number; lon: number } | null;
  statuses: Record<string, ChannelStatus>;
  noise_dbm: Record<string, number> | null;
  totals: { scanned: number; available: number; available_usable: number };
}

export interface JobInfo {
  id: string;
  state: "pending" | "running" | "done" | "failed";
  progress: number;
  submitted_at: string;
  finished_at: string | null;
  result_path: string | null;
  error: string | null;
}

export interface LinkMetrics {
  rss_dbm: number;
  pathloss_db: number;
  snr_db: number;
  noise_power_dbm: number;
  capacity_mbps: number;
  fade_margin_db: number;
  los: boolean;
  tx_dir_gain_dbi: number;
  rx_dir_gain_dbi: number;
}

export interface RfPlanResponse {
  scenario: string;
  direction: string;
  links: LinkMetrics[];
}

export interface Orientation {
  azimuth_deg: number;
  elevation_deg: number;
}

export interface OptimizeResponse {
  target: string;
  bs: Orientation | null;
  ue: Orientation | null;
  rss_dbm: number;
}

export interface TowersResponse {
  towers: Array<{
    index: number;
    name: string;
    lat: number;
    lon: number;
    erp_kw: number;
    channel: number;
    frequency_mhz: number;
    class: string;
    height_agl_m: number;
    country: string;
  }>;
  diagnostics: Array<{ row: number; field: string; message: string; severity: string }>;
}

export interface UploadResponse {
  loaded: number;
  diagnostics: TowersResponse["diagnostics"];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

export interface RequestLogEntry {
  method: string;
  path: string;
}

const requestLogEntries: RequestLogEntry[] = [];

export function requestLog(): readonly RequestLogEntry[] {
  return requestLogEntries;
}

export function clearRequestLog(): void {
  requestLogEntries.length = 0;
}

async function request<T>(
  method: string,
  path: string,
  body?: unknown,
  contentType = "application/json",
): Promise<T> {
  requestLogEntries.push({ method, path });
  const init: RequestInit = { method };
  if (body !== undefined) {
    init.body = typeof body === "string" ? body : JSON.stringify(body);
    init.headers = { "Content-Type": contentType };
  }
  const response = await fetch(baseUrl() + path, init);
  const text = await response.text();
  if (!response.ok) {
    let code = "http_error";
    let message = text || `HTTP ${response.status}`;
    let field: string | undefined;
    try {
      const envelope = JSON.parse(text) as { error?: { code: string; message: string; field?: string } };
      if (envelope.error) {
        code = envelope.error.code;
        message = envelope.error.message;
        field = envelope.error.field;
      }
    } catch {
      // non-JSON error body; keep raw text
    }
    throw new ApiError(response.status, code, message, field);
  }
  const kind = response.headers.get("Content-Type") ?? "";
  if (kind.includes("application/json")) {
    return JSON.parse(text) as T;
  }
  return text as unknown as T;
}

export const api = {
  uploadTowers: (csv: string) => request<UploadResponse>("POST", "/api/towers", csv, "text/csv"),
  towers: () => request<TowersResponse>("GET", "/api/towers"),
  submitScan: (config: unknown) => request<JobInfo>("POST", "/api/scan", config),
  jobStatus: (id: string) => request<JobInfo>("GET", `/api/jobs/${id}`),
  resultCsv: (id: string) => request<string>("GET", `/api/results/${id}`),
  availability: (lat: number, lon: number, maxNoise?: number) => {
    const extra = maxNoise === undefined ? "" : `&max_noise=${encodeURIComponent(maxNoise)}`;
    return request<AvailabilityResponse>("GET", `/api/availability?lat=${lat}&lon=${lon}${extra}`);
  },
  rfplan: (doc: unknown) => request<RfPlanResponse>("POST", "/api/rfplan", doc),
  optimize: (doc: unknown) => request<OptimizeResponse>("POST", "/api/optimize", doc),
  coverage: (metric: string) => request<string>("GET", `/api/coverage?metric=${metric}`),
};
