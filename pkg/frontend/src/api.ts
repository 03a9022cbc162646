/** Typed client for the studio service. All numbers the UI shows come
 * through here; the client never transforms values beyond JSON parsing. */

import type {
  CalibrateResult,
  ComparePayload,
  DatasetInfo,
  EmissionsReport,
  FieldError,
  MoneyReport,
  ProjectionPayload,
  RegionInfo,
  RunStatus,
  ScenarioFormState,
  ScenarioSpecPayload,
  SessionInfo,
  SharesReport,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  fields: FieldError[];

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : `request failed (${status})`);
    this.status = status;
    this.fields = Array.isArray(detail) ? (detail as FieldError[]) : [];
  }
}

export class StudioApi {
  constructor(private base: string, private fetcher: typeof fetch = fetch) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetcher(`${this.base}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await resp.json().catch(() => null);
    if (!resp.ok) {
      throw new ApiError(resp.status, body && (body as { detail?: unknown }).detail);
    }
    return body as T;
  }

  datasets(): Promise<DatasetInfo[]> {
    return this.request("/datasets");
  }

  createSession(dataset: string, gammaInit = "dataset"): Promise<SessionInfo> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ dataset, gamma_init: gammaInit }),
    });
  }

  regions(sessionId: string): Promise<RegionInfo[]> {
    return this.request(`/sessions/${sessionId}/regions`);
  }

  projection(sessionId: string, region: string): Promise<ProjectionPayload> {
    return this.request(`/sessions/${sessionId}/projection?region=${encodeURIComponent(region)}`);
  }

  setGamma(sessionId: string, region: string, techId: string,
           valueEurPerKwh: number): Promise<ProjectionPayload> {
    return this.request(`/sessions/${sessionId}/gamma`, {
      method: "PUT",
      body: JSON.stringify({ region, tech_id: techId, value_eur_per_kwh: valueEurPerKwh }),
    });
  }

  autoCalibrate(sessionId: string, region: string): Promise<Record<string, CalibrateResult>> {
    return this.request(`/sessions/${sessionId}/calibrate/auto`, {
      method: "POST",
      body: JSON.stringify({ region }),
    });
  }

  presets(): Promise<ScenarioSpecPayload[]> {
    return this.request("/scenarios/presets");
  }

  buildScenario(form: ScenarioFormState): Promise<ScenarioSpecPayload> {
    return this.request("/scenarios/build", { method: "POST", body: JSON.stringify(form) });
  }

  startRun(sessionId: string, body: { preset?: string; scenario?: ScenarioSpecPayload;
                                      config?: Record<string, unknown> }): Promise<{ run_id: string }> {
    return this.request(`/sessions/${sessionId}/runs`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  runStatus(runId: string): Promise<RunStatus> {
    return this.request(`/runs/${runId}/status`);
  }

  async waitForRun(runId: string, pollMs = 100, timeoutMs = 120_000): Promise<RunStatus> {
    const t0 = Date.now();
    for (;;) {
      const status = await this.runStatus(runId);
      if (status.state === "done" || status.state === "error") return status;
      if (Date.now() - t0 > timeoutMs) throw new Error(`run ${runId} timed out`);
      await new Promise((r) => setTimeout(r, pollMs));
    }
  }

  sharesReport(runId: string): Promise<SharesReport> {
    return this.request(`/runs/${runId}/results?report=shares`);
  }

  emissionsReport(runId: string): Promise<EmissionsReport> {
    return this.request(`/runs/${runId}/results?report=emissions`);
  }

  moneyReport(runId: string): Promise<MoneyReport> {
    return this.request(`/runs/${runId}/results?report=money`);
  }

  compare(runId: string, referenceId: string): Promise<ComparePayload> {
    return this.request(`/compare?run=${encodeURIComponent(runId)}&reference=${encodeURIComponent(referenceId)}`);
  }
}
