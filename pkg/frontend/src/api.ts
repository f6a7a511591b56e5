/** Thin typed client for the case service. */

import type {
  AttestBody,
  CasePayload,
  ChangeBody,
  ChangeDoc,
  EvidenceInfo,
  ImpactReport,
} from "./model.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

function baseUrl(): string {
  const override = new URLSearchParams(window.location.search).get("api");
  return override ? override.replace(/\/$/, "") : "";
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(baseUrl() + path, init);
  } catch (err) {
    throw new ApiError(0, "unreachable", `service unreachable: ${String(err)}`);
  }
  const text = await response.text();
  let payload: unknown = null;
  try {
    payload = text ? JSON.parse(text) : null;
  } catch {
    payload = null;
  }
  if (!response.ok) {
    const envelope = payload as { error?: { code?: string; message?: string } };
    throw new ApiError(
      response.status,
      envelope?.error?.code ?? "internal",
      envelope?.error?.message ?? `request failed (${response.status})`,
    );
  }
  return payload as T;
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body ?? {}),
  };
}

export const api = {
  getCase(): Promise<CasePayload> {
    return request<CasePayload>("/case");
  },
  openChange(body: ChangeBody): Promise<ChangeDoc> {
    return request<ChangeDoc>("/changes", post(body));
  },
  impact(changeId: string): Promise<ImpactReport> {
    return request<ImpactReport>(
      `/changes/${encodeURIComponent(changeId)}/impact`,
      post({}),
    );
  },
  apply(changeId: string, baseCaseDigest: string): Promise<unknown> {
    return request(
      `/changes/${encodeURIComponent(changeId)}/apply`,
      post({ base_case_digest: baseCaseDigest }),
    );
  },
  attest(evidenceId: string, body: AttestBody): Promise<EvidenceInfo> {
    return request<EvidenceInfo>(
      `/evidence/${encodeURIComponent(evidenceId)}/attest`,
      post(body),
    );
  },
};
