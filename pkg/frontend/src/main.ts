/** Wiring: state loop, service calls, pan/zoom. */

import { api, ApiError } from "./api.js";
import { render, type Handlers, type ViewTransform } from "./render.js";
import {
  applyEnabled,
  applySucceeded,
  attestRecorded,
  caseLoaded,
  changeOpened,
  dismissNotice,
  editDraft,
  initialState,
  loadFailed,
  parseDraft,
  reportReceived,
  requestFailed,
  selectNode,
  submissionStarted,
  type AppState,
} from "./state.js";

let state: AppState = initialState;
const view: ViewTransform = { tx: 80, ty: 70, scale: 1 };
const root = document.getElementById("app")!;

function dispatch(next: AppState): void {
  state = next;
  render(root, state, view, handlers);
}

function fail(err: unknown): void {
  if (err instanceof ApiError) {
    dispatch(requestFailed(state, err.status, err.code, err.message));
  } else {
    dispatch(requestFailed(state, 0, "internal", String(err)));
  }
}

async function loadCase(): Promise<void> {
  try {
    dispatch(caseLoaded(state, await api.getCase()));
  } catch (err) {
    dispatch(
      loadFailed(state, err instanceof Error ? err.message : String(err)),
    );
  }
}

const handlers: Handlers = {
  onSelect: (id) => dispatch(selectNode(state, id)),
  onDraftEdit: (patch) => dispatch(editDraft(state, patch)),
  onRefresh: () => {
    void loadCase();
  },
  onDismissNotice: () => dispatch(dismissNotice(state)),
  onSubmitChange: () => {
    const parsed = parseDraft(state.draft);
    if (!parsed.body) return;
    dispatch(submissionStarted(state));
    void (async () => {
      try {
        const change = await api.openChange(parsed.body!);
        dispatch(changeOpened(state, change));
        const report = await api.impact(change.id);
        dispatch(reportReceived(state, report));
      } catch (err) {
        fail(err);
      }
    })();
  },
  onApply: () => {
    if (!applyEnabled(state)) return;
    const change = state.change!;
    const digest = state.report!.base_case_digest;
    dispatch(submissionStarted(state));
    void (async () => {
      try {
        await api.apply(change.id, digest);
        dispatch(applySucceeded(state));
        await loadCase();
      } catch (err) {
        fail(err);
      }
    })();
  },
  onAttest: (evidenceId, form) => {
    const data = new FormData(form);
    dispatch(submissionStarted(state));
    void (async () => {
      try {
        await api.attest(evidenceId, {
          status: String(data.get("status")) === "invalid" ? "invalid" : "valid",
          by: String(data.get("by") ?? ""),
          role: String(data.get("role") ?? ""),
          note: String(data.get("note") ?? ""),
        });
        dispatch(attestRecorded(state));
        await loadCase();
      } catch (err) {
        fail(err);
      }
    })();
  },
};

// pan/zoom on the tree pane; the transform survives re-renders
let dragging: { x: number; y: number } | null = null;

root.addEventListener("pointerdown", (event) => {
  const target = event.target as Element;
  if (!target.closest(".tree-svg") || target.closest(".node")) return;
  dragging = { x: event.clientX - view.tx, y: event.clientY - view.ty };
});
window.addEventListener("pointermove", (event) => {
  if (!dragging) return;
  view.tx = event.clientX - dragging.x;
  view.ty = event.clientY - dragging.y;
  const viewport = document.getElementById("tree-viewport");
  viewport?.setAttribute(
    "transform",
    `translate(${view.tx} ${view.ty}) scale(${view.scale})`,
  );
});
window.addEventListener("pointerup", () => {
  dragging = null;
});
root.addEventListener(
  "wheel",
  (event) => {
    const target = event.target as Element;
    if (!target.closest(".tree-svg")) return;
    event.preventDefault();
    const factor = event.deltaY < 0 ? 1.12 : 1 / 1.12;
    const next = Math.min(3, Math.max(0.25, view.scale * factor));
    // zoom around the pointer
    view.tx = event.clientX - (event.clientX - view.tx) * (next / view.scale);
    view.ty = event.clientY - (event.clientY - view.ty) * (next / view.scale);
    view.scale = next;
    const viewport = document.getElementById("tree-viewport");
    viewport?.setAttribute(
      "transform",
      `translate(${view.tx} ${view.ty}) scale(${view.scale})`,
    );
  },
  { passive: false },
);

render(root, state, view, handlers);
void loadCase();
