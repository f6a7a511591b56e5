/** Types mirroring the engine's HTTP payloads (docs/http-api.md). */

export type StatusValue = "valid" | "invalid" | "unknown";

export type NodeKind =
  | "goal"
  | "strategy"
  | "solution"
  | "assumption"
  | "context"
  | "justification";

export type EdgeKind = "supported_by" | "in_context_of";

export type ChangeSource =
  | "incident_report"
  | "context_evolution"
  | "monitoring_event";

export interface CaseNode {
  id: string;
  kind: NodeKind;
  text: string;
  tags: string[];
  binding: string | null;
  undeveloped: boolean;
}

export interface CaseEdge {
  source: string;
  target: string;
  kind: EdgeKind;
}

export interface Remediation {
  action: string;
  description: string;
}

export interface BindingDoc {
  kind: "formula" | "metric" | "manual";
  formula?: string;
  trace_ref?: string | null;
  metric?: string;
  comparator?: string;
  threshold?: number;
  report_ref?: string;
  required_role?: string;
  remediation: Remediation | null;
}

export interface EvidenceInfo {
  value: StatusValue;
  reason: string;
  inputs_hash: string;
  evaluated_at?: string;
}

export interface EnvEntry {
  value: number;
  unit: string;
  derived: string | null;
}

export interface CasePayload {
  schema_version: number;
  metadata: { name: string; version: string; description: string };
  tree: { root: string; nodes: CaseNode[]; edges: CaseEdge[] };
  env: Record<string, EnvEntry>;
  bindings: Record<string, BindingDoc>;
  artifacts: Record<
    string,
    { path: string; sha256: string; kind: string; generated_from: string | null }
  >;
  statuses: Record<string, StatusValue>;
  evidence: Record<string, EvidenceInfo>;
  leaves: string[];
  digest: string;
}

export interface ChangeBody {
  source: ChangeSource;
  payload: string;
  tags: string[];
  param_updates: Record<string, number>;
  structural: boolean;
}

export interface ChangeDoc extends ChangeBody {
  id: string;
  created_at: string;
  state: "open" | "closed";
  reports?: ImpactReport[];
}

export interface ImpactReport {
  change_id: string;
  base_case_digest: string;
  matched_nodes: string[];
  reevaluated: Record<string, { before: EvidenceInfo; after: EvidenceInfo }>;
  status_map: Record<string, StatusValue>;
  stage: 1 | 2 | 3;
  rationale: string;
}

export interface AttestBody {
  status: "valid" | "invalid";
  by: string;
  role: string;
  note: string;
}
