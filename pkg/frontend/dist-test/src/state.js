/** Application state: pure data plus pure transitions and selectors.
 *
 * The view is a function of service responses plus the unsent draft, so
 * a refresh reproduces the same picture. No safety logic lives here:
 * node colours come only from server-computed status maps, stages only
 * from server-computed reports.
 */
export const emptyDraft = {
    source: "context_evolution",
    payload: "",
    tags: "",
    paramUpdates: "",
    structural: false,
};
export const initialState = {
    phase: "loading",
    errorMessage: null,
    casePayload: null,
    selected: null,
    draft: emptyDraft,
    change: null,
    report: null,
    notice: null,
    busy: false,
};
// --- transitions ---------------------------------------------------------
export function caseLoaded(state, payload) {
    const selected = state.selected && payload.tree.nodes.some((n) => n.id === state.selected)
        ? state.selected
        : null;
    return {
        ...state,
        phase: "ready",
        errorMessage: null,
        casePayload: payload,
        selected,
        change: null,
        report: null,
        busy: false,
    };
}
export function loadFailed(state, message) {
    return { ...state, phase: "error", errorMessage: message, busy: false };
}
export function selectNode(state, id) {
    return { ...state, selected: id };
}
export function editDraft(state, patch) {
    return { ...state, draft: { ...state.draft, ...patch }, notice: null };
}
export function submissionStarted(state) {
    return { ...state, busy: true, notice: null };
}
export function changeOpened(state, change) {
    return { ...state, change };
}
export function reportReceived(state, report) {
    return { ...state, report, busy: false };
}
export function applySucceeded(state) {
    return {
        ...state,
        busy: false,
        change: null,
        report: null,
        draft: emptyDraft,
        notice: "change applied; parameters updated and a pre-change snapshot was written",
    };
}
export function attestRecorded(state) {
    return { ...state, busy: false, notice: "attestation recorded" };
}
export function requestFailed(state, status, code, message) {
    const notice = status === 409
        ? `${message} — the case moved on; refresh and re-run the analysis`
        : `${code}: ${message}`;
    return { ...state, busy: false, notice };
}
export function dismissNotice(state) {
    return { ...state, notice: null };
}
// --- selectors -----------------------------------------------------------
/** The status map the view colours from: the displayed what-if report
 * when present, otherwise the case's own propagated statuses. Always
 * server-computed. */
export function displayedStatuses(state) {
    if (state.report)
        return state.report.status_map;
    return state.casePayload?.statuses ?? {};
}
export function nodeStatusClass(state, id) {
    const value = displayedStatuses(state)[id];
    if (value === "invalid")
        return "status-invalid";
    if (value === "unknown")
        return "status-unknown";
    return "status-valid";
}
export function matchedNodes(state) {
    return new Set(state.report?.matched_nodes ?? []);
}
/** Apply is offered only for a displayed stage-1 report that still
 * matches the loaded case content (mirrors the service's 409 guards). */
export function applyEnabled(state) {
    return (!state.busy &&
        state.report !== null &&
        state.change !== null &&
        state.report.stage === 1 &&
        state.casePayload !== null &&
        state.report.base_case_digest === state.casePayload.digest);
}
export function stageBadge(report) {
    if (report.stage === 1) {
        return {
            stage: 1,
            label: "stage 1 — parameter update",
            tone: "ok",
            guidance: "Every evidence item stays valid: apply updates the stored " +
                "parameters and closes the change.",
        };
    }
    if (report.stage === 2) {
        return {
            stage: 2,
            label: "stage 2 — improve evidence",
            tone: "warn",
            guidance: "Some evidence fails but each failing item declares a way back. " +
                "Carry out the remediations, attach the new results, then re-run " +
                "the analysis.",
        };
    }
    return {
        stage: 3,
        label: "stage 3 — rework the argument",
        tone: "alert",
        guidance: "The argument structure itself is affected (structural change or a " +
            "failing evidence without a remediation). A human needs to revise " +
            "the case; edits happen on the case files, not here.",
    };
}
export function parseDraft(draft) {
    const problems = [];
    const tags = draft.tags
        .split(",")
        .map((t) => t.trim())
        .filter((t) => t.length > 0);
    const updates = {};
    for (const rawLine of draft.paramUpdates.split("\n")) {
        const line = rawLine.trim();
        if (!line)
            continue;
        const eq = line.indexOf("=");
        if (eq < 1) {
            problems.push(`parameter update "${line}" is not name = value`);
            continue;
        }
        const name = line.slice(0, eq).trim();
        const valueText = line.slice(eq + 1).trim();
        const value = Number(valueText);
        if (!name) {
            problems.push(`parameter update "${line}" is missing a name`);
        }
        else if (!valueText || !Number.isFinite(value)) {
            problems.push(`"${name}" needs a finite number, got "${valueText}"`);
        }
        else {
            updates[name] = value;
        }
    }
    const empty = tags.length === 0 && Object.keys(updates).length === 0 && !draft.structural;
    if (empty && problems.length === 0) {
        problems.push("a change needs tags, parameter updates, or the structural flag");
    }
    if (problems.length > 0)
        return { body: null, problems };
    return {
        body: {
            source: draft.source,
            payload: draft.payload,
            tags,
            param_updates: updates,
            structural: draft.structural,
        },
        problems: [],
    };
}
