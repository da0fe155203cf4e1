// Typed client for the authoring service. Every outgoing payload passes a
// schema check before the request is sent, so no sequence of UI actions can
// emit an invalid body.

import { SCAN_LOG_VERSION } from "./scan.js";
import type { JobDto, MotionDto, PlanDto, ProjectDto, ReportDto, StepDto } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public payload: unknown = null,
  ) {
    super(message);
  }
}

export class OfflineError extends Error {}

export interface GenerateOptions {
  seed: number;
  blendLen?: number;
  guidanceScale?: number;
}

// -- payload validation (client side, before any fetch) ----------------------

export function validateTaskPayload(text: unknown): { text: string } {
  if (typeof text !== "string" || text.trim().length === 0) {
    throw new Error("task text must be a non-empty string");
  }
  return { text };
}

export function validateStepPayload(text: unknown, index?: unknown): { text: string; index?: number } {
  if (typeof text !== "string" || text.trim().length === 0) {
    throw new Error("step text must be a non-empty string");
  }
  if (index === undefined || index === null) return { text };
  if (typeof index !== "number" || !Number.isInteger(index) || index < 0) {
    throw new Error("step index must be a non-negative integer");
  }
  return { text, index };
}

export function validateEditPayload(patch: { text?: unknown; scale?: unknown }): {
  text?: string;
  scale?: string;
} {
  const out: { text?: string; scale?: string } = {};
  if (patch.text !== undefined) {
    if (typeof patch.text !== "string" || patch.text.trim().length === 0) {
      throw new Error("step text must be a non-empty string");
    }
    out.text = patch.text;
  }
  if (patch.scale !== undefined) {
    if (patch.scale !== "full_body" && patch.scale !== "hands_only") {
      throw new Error("scale must be full_body or hands_only");
    }
    out.scale = patch.scale;
  }
  if (out.text === undefined && out.scale === undefined) {
    throw new Error("nothing to change");
  }
  return out;
}

export function validateGroupPayload(stepIds: unknown): { step_ids: string[] } {
  if (!Array.isArray(stepIds) || stepIds.length === 0 || !stepIds.every((s) => typeof s === "string" && s)) {
    throw new Error("select at least one step to group");
  }
  return { step_ids: stepIds };
}

export function validateGeneratePayload(options: GenerateOptions): {
  seed: number;
  blend_len?: number;
  guidance_scale?: number;
} {
  if (!Number.isInteger(options.seed)) {
    throw new Error("seed must be an integer");
  }
  const body: { seed: number; blend_len?: number; guidance_scale?: number } = { seed: options.seed };
  if (options.blendLen !== undefined) {
    if (!Number.isInteger(options.blendLen) || options.blendLen < 2) {
      throw new Error("blend length must be an integer >= 2");
    }
    body.blend_len = options.blendLen;
  }
  if (options.guidanceScale !== undefined) {
    if (typeof options.guidanceScale !== "number" || options.guidanceScale < 0) {
      throw new Error("guidance scale must be a number >= 0");
    }
    body.guidance_scale = options.guidanceScale;
  }
  return body;
}

export function validateScanLines(lines: string[]): void {
  if (lines.length === 0) throw new Error("scan log is empty");
  let sawTrajectory = 0;
  let lastT = -Infinity;
  for (const [i, line] of lines.entries()) {
    let record: { type?: string; t_s?: number; version?: number };
    try {
      record = JSON.parse(line);
    } catch {
      throw new Error(`scan line ${i + 1} is not JSON`);
    }
    if (record.type === "header") {
      if (record.version !== SCAN_LOG_VERSION) {
        throw new Error(`scan log version must be ${SCAN_LOG_VERSION}`);
      }
    } else if (record.type === "trajectory" || record.type === "snapshot") {
      if (typeof record.t_s !== "number" || record.t_s < lastT) {
        throw new Error(`scan line ${i + 1}: timestamps must be non-decreasing`);
      }
      if (record.type === "trajectory") {
        lastT = record.t_s;
        sawTrajectory += 1;
      }
    } else {
      throw new Error(`scan line ${i + 1}: unknown record type`);
    }
  }
  if (sawTrajectory < 2) {
    throw new Error("scan log needs at least 2 trajectory samples");
  }
}

// -- HTTP client --------------------------------------------------------------

export class ApiClient {
  constructor(public baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown, raw?: string): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (raw !== undefined) {
      init.body = raw;
      (init.headers as Record<string, string>)["Content-Type"] = "application/x-ndjson";
    } else if (body !== undefined) {
      init.body = JSON.stringify(body);
      (init.headers as Record<string, string>)["Content-Type"] = "application/json";
    }
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new OfflineError(`service unreachable at ${this.baseUrl}: ${err}`);
    }
    const text = await response.text();
    let parsed: unknown = text;
    try {
      parsed = JSON.parse(text);
    } catch {
      // raw text endpoints fall through
    }
    if (!response.ok) {
      const detail =
        typeof parsed === "object" && parsed !== null && "error" in parsed
          ? String((parsed as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ApiError(response.status, detail, parsed);
    }
    return parsed as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("GET", "/health");
  }

  createProject(): Promise<ProjectDto> {
    return this.request("POST", "/projects");
  }

  getProject(id: string): Promise<ProjectDto> {
    return this.request("GET", `/projects/${id}`);
  }

  setTask(projectId: string, text: string): Promise<{ task_text: string; steps: StepDto[] }> {
    return this.request("POST", `/projects/${projectId}/task`, validateTaskPayload(text));
  }

  insertStep(projectId: string, text: string, index?: number): Promise<StepDto> {
    return this.request("POST", `/projects/${projectId}/steps`, validateStepPayload(text, index));
  }

  editStep(projectId: string, stepId: string, patch: { text?: string; scale?: string }): Promise<StepDto> {
    return this.request("PATCH", `/projects/${projectId}/steps/${stepId}`, validateEditPayload(patch));
  }

  deleteStep(projectId: string, stepId: string): Promise<{ deleted: string; notices: string[] }> {
    return this.request("DELETE", `/projects/${projectId}/steps/${stepId}`);
  }

  createGroup(projectId: string, stepIds: string[]): Promise<{ id: string; step_ids: string[] }> {
    return this.request("POST", `/projects/${projectId}/groups`, validateGroupPayload(stepIds));
  }

  uploadScan(projectId: string, groupId: string, lines: string[]): Promise<{ warnings: string[] }> {
    validateScanLines(lines);
    return this.request("POST", `/projects/${projectId}/groups/${groupId}/scan`, undefined, lines.join("\n") + "\n");
  }

  getPlan(projectId: string): Promise<PlanDto> {
    return this.request("GET", `/projects/${projectId}/plan`);
  }

  generate(projectId: string, options: GenerateOptions): Promise<JobDto> {
    return this.request("POST", `/projects/${projectId}/generate`, validateGeneratePayload(options));
  }

  getJob(jobId: string): Promise<JobDto> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  getMotion(motionId: string): Promise<MotionDto> {
    return this.request("GET", `/motions/${motionId}`);
  }

  getMetrics(motionId: string): Promise<ReportDto> {
    return this.request("GET", `/motions/${motionId}/metrics`);
  }
}
