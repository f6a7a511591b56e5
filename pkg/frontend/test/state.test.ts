import { test } from "node:test";
import assert from "node:assert/strict";

import type {
  CasePayload,
  ChangeDoc,
  ImpactReport,
  StatusValue,
} from "../src/model.js";
import {
  applyEnabled,
  applySucceeded,
  caseLoaded,
  changeOpened,
  displayedStatuses,
  editDraft,
  emptyDraft,
  initialState,
  matchedNodes,
  nodeStatusClass,
  parseDraft,
  reportReceived,
  requestFailed,
  selectNode,
  stageBadge,
  submissionStarted,
} from "../src/state.js";

function payload(
  statuses: Record<string, StatusValue>,
  digest = "digest-1",
): CasePayload {
  return {
    schema_version: 1,
    metadata: { name: "case", version: "1", description: "" },
    tree: {
      root: "G1",
      nodes: Object.keys(statuses).map((id) => ({
        id,
        kind: id.startsWith("Sn") ? "solution" : "goal",
        text: id,
        tags: [],
        binding: null,
        undeveloped: false,
      })),
      edges: [],
    },
    env: {},
    bindings: {},
    artifacts: {},
    statuses,
    evidence: {},
    leaves: Object.keys(statuses).filter((id) => id.startsWith("Sn")),
    digest,
  };
}

function report(
  stage: 1 | 2 | 3,
  statusMap: Record<string, StatusValue>,
  digest = "digest-1",
): ImpactReport {
  return {
    change_id: "ch-1",
    base_case_digest: digest,
    matched_nodes: ["C9"],
    reevaluated: {},
    status_map: statusMap,
    stage,
    rationale: "because",
  };
}

const change: ChangeDoc = {
  id: "ch-1",
  source: "context_evolution",
  payload: "",
  tags: [],
  param_updates: {},
  structural: false,
  created_at: "",
  state: "open",
};

test("colours come from the case statuses until a report is shown", () => {
  let s = caseLoaded(initialState, payload({ G1: "valid", Sn1: "invalid" }));
  assert.equal(nodeStatusClass(s, "G1"), "status-valid");
  assert.equal(nodeStatusClass(s, "Sn1"), "status-invalid");

  s = reportReceived(
    { ...changeOpened(s, change) },
    report(2, { G1: "invalid", Sn1: "invalid" }),
  );
  assert.equal(nodeStatusClass(s, "G1"), "status-invalid");
  assert.deepEqual(displayedStatuses(s), { G1: "invalid", Sn1: "invalid" });
  assert.ok(matchedNodes(s).has("C9"));
});

test("unknown statuses grey out", () => {
  const s = caseLoaded(initialState, payload({ G1: "unknown" }));
  assert.equal(nodeStatusClass(s, "G1"), "status-unknown");
});

test("refresh reproduces the same view from responses plus drafts", () => {
  const p = payload({ G1: "valid" });
  let s = caseLoaded(initialState, p);
  s = editDraft(s, { tags: "frame rate" });
  s = changeOpened(s, change);
  s = reportReceived(s, report(1, { G1: "valid" }));
  const refreshed = caseLoaded(s, p);
  // the report belongs to the previous response set and is dropped; the
  // unsent draft survives
  assert.equal(refreshed.report, null);
  assert.equal(refreshed.change, null);
  assert.equal(refreshed.draft.tags, "frame rate");
  assert.deepEqual(caseLoaded(refreshed, p), refreshed);
});

test("apply is enabled only for a current stage-1 report", () => {
  const base = caseLoaded(initialState, payload({ G1: "valid" }));
  const withChange = changeOpened(base, change);

  const stage1 = reportReceived(withChange, report(1, { G1: "valid" }));
  assert.equal(applyEnabled(stage1), true);

  const stage2 = reportReceived(withChange, report(2, { G1: "invalid" }));
  assert.equal(applyEnabled(stage2), false);

  const stage3 = reportReceived(withChange, report(3, { G1: "valid" }));
  assert.equal(applyEnabled(stage3), false);

  const stale = reportReceived(
    withChange,
    report(1, { G1: "valid" }, "digest-from-before"),
  );
  assert.equal(applyEnabled(stale), false);

  assert.equal(applyEnabled(submissionStarted(stage1)), false);
  assert.equal(applyEnabled(initialState), false);
});

test("apply success clears any what-if view and resets the draft", () => {
  let s = caseLoaded(initialState, payload({ G1: "valid" }));
  s = editDraft(s, { paramUpdates: "frame_rate = 20" });
  s = changeOpened(s, change);
  s = reportReceived(s, report(1, { G1: "valid" }));
  s = applySucceeded(s);
  assert.equal(s.report, null);
  assert.equal(s.change, null);
  assert.deepEqual(s.draft, emptyDraft);
  assert.ok(s.notice && s.notice.includes("applied"));
});

test("conflicts prompt a reload", () => {
  const s = requestFailed(initialState, 409, "stale_report", "case changed");
  assert.ok(s.notice && s.notice.includes("refresh"));
  assert.equal(s.busy, false);
});

test("stage badges carry tone and guidance", () => {
  assert.equal(stageBadge(report(1, {})).tone, "ok");
  assert.equal(stageBadge(report(2, {})).tone, "warn");
  assert.equal(stageBadge(report(3, {})).tone, "alert");
  assert.ok(stageBadge(report(2, {})).guidance.includes("remediation"));
});

test("selection survives only while the node exists", () => {
  let s = caseLoaded(initialState, payload({ G1: "valid", Sn1: "valid" }));
  s = selectNode(s, "Sn1");
  s = caseLoaded(s, payload({ G1: "valid", Sn1: "valid" }));
  assert.equal(s.selected, "Sn1");
  s = caseLoaded(s, payload({ G1: "valid" }));
  assert.equal(s.selected, null);
});

// --- draft parsing -----------------------------------------------------------

test("parseDraft splits tags and parameter updates", () => {
  const parsed = parseDraft({
    source: "context_evolution",
    payload: "faster camera",
    tags: " frame rate , corridor ",
    paramUpdates: "frame_rate = 20\n  v_agv=4.0  \n",
    structural: false,
  });
  assert.deepEqual(parsed.problems, []);
  assert.deepEqual(parsed.body, {
    source: "context_evolution",
    payload: "faster camera",
    tags: ["frame rate", "corridor"],
    param_updates: { frame_rate: 20, v_agv: 4 },
    structural: false,
  });
});

test("parseDraft reports problems instead of guessing", () => {
  const bad = parseDraft({
    source: "incident_report",
    payload: "",
    tags: "",
    paramUpdates: "frame_rate twenty\nspeed = fast",
    structural: false,
  });
  assert.equal(bad.body, null);
  assert.equal(bad.problems.length, 2);

  const empty = parseDraft({
    source: "incident_report",
    payload: "words only",
    tags: "",
    paramUpdates: "",
    structural: false,
  });
  assert.equal(empty.body, null);
  assert.ok(empty.problems[0].includes("structural"));

  const structuralOnly = parseDraft({
    source: "incident_report",
    payload: "detector swap",
    tags: "",
    paramUpdates: "",
    structural: true,
  });
  assert.ok(structuralOnly.body);
  assert.equal(structuralOnly.body!.structural, true);
});
