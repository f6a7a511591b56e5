/** DOM/SVG rendering. The whole view re-renders from state; the pan/zoom
 * transform lives outside the state so it survives re-renders. */
import { layoutTree } from "./layout.js";
import { applyEnabled, matchedNodes, nodeStatusClass, parseDraft, stageBadge, } from "./state.js";
const SVG_NS = "http://www.w3.org/2000/svg";
const CELL_X = 168;
const CELL_Y = 128;
const NODE_W = 132;
const NODE_H = 64;
function el(tag, attrs = {}, ...children) {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        if (key === "class")
            node.className = value;
        else
            node.setAttribute(key, value);
    }
    node.append(...children);
    return node;
}
function svgEl(tag, attrs = {}) {
    const node = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, value);
    }
    return node;
}
// --- tree pane -----------------------------------------------------------
function nodeCenter(placed) {
    return { cx: placed.x * CELL_X, cy: placed.y * CELL_Y };
}
function shapeFor(node) {
    const { cx, cy } = nodeCenter(node);
    const w = NODE_W;
    const h = NODE_H;
    switch (node.kind) {
        case "solution":
            return svgEl("circle", {
                cx: String(cx),
                cy: String(cy),
                r: String(h / 2 + 6),
            });
        case "assumption":
        case "justification":
            return svgEl("ellipse", {
                cx: String(cx),
                cy: String(cy),
                rx: String(w / 2),
                ry: String(h / 2 - 4),
            });
        case "context":
            return svgEl("rect", {
                x: String(cx - w / 2),
                y: String(cy - h / 2 + 6),
                width: String(w),
                height: String(h - 12),
                rx: "16",
            });
        case "strategy": {
            const skew = 14;
            const points = [
                [cx - w / 2 + skew, cy - h / 2 + 6],
                [cx + w / 2 + skew, cy - h / 2 + 6],
                [cx + w / 2 - skew, cy + h / 2 - 6],
                [cx - w / 2 - skew, cy + h / 2 - 6],
            ];
            return svgEl("polygon", {
                points: points.map((p) => p.join(",")).join(" "),
            });
        }
        default:
            return svgEl("rect", {
                x: String(cx - w / 2),
                y: String(cy - h / 2),
                width: String(w),
                height: String(h),
                rx: "3",
            });
    }
}
function wrapLabel(text, limit = 22, lines = 3) {
    const words = text.split(/\s+/);
    const out = [];
    let current = "";
    for (const word of words) {
        if ((current + " " + word).trim().length > limit && current) {
            out.push(current);
            current = word;
        }
        else {
            current = (current + " " + word).trim();
        }
        if (out.length === lines)
            break;
    }
    if (out.length < lines && current)
        out.push(current);
    if (out.length === lines && words.join(" ").length > out.join(" ").length) {
        out[lines - 1] = out[lines - 1].slice(0, limit - 1) + "…";
    }
    return out;
}
function renderTree(state, view, handlers) {
    const payload = state.casePayload;
    const layout = layoutTree(payload.tree.nodes, payload.tree.edges, payload.tree.root);
    const highlight = matchedNodes(state);
    const svg = svgEl("svg", { class: "tree-svg" });
    const group = svgEl("g", {
        transform: `translate(${view.tx} ${view.ty}) scale(${view.scale})`,
    });
    group.id = "tree-viewport";
    svg.appendChild(group);
    for (const edge of layout.edges) {
        const a = nodeCenter(layout.nodes[edge.source]);
        const b = nodeCenter(layout.nodes[edge.target]);
        let d;
        if (edge.kind === "supported_by") {
            const midY = (a.cy + b.cy) / 2;
            d = `M ${a.cx} ${a.cy + NODE_H / 2} C ${a.cx} ${midY}, ${b.cx} ${midY}, ${b.cx} ${b.cy - NODE_H / 2}`;
        }
        else {
            d = `M ${a.cx + NODE_W / 2} ${a.cy} L ${b.cx - NODE_W / 2} ${b.cy}`;
        }
        group.appendChild(svgEl("path", { d, class: `edge edge-${edge.kind.replace("_", "-")}` }));
    }
    const nodesById = new Map(payload.tree.nodes.map((n) => [n.id, n]));
    for (const placed of Object.values(layout.nodes)) {
        const info = nodesById.get(placed.id);
        const classes = [
            "node",
            `kind-${placed.kind}`,
            nodeStatusClass(state, placed.id),
        ];
        if (highlight.has(placed.id))
            classes.push("matched");
        if (state.selected === placed.id)
            classes.push("selected");
        const nodeGroup = svgEl("g", { class: classes.join(" ") });
        nodeGroup.appendChild(shapeFor(placed));
        const { cx, cy } = nodeCenter(placed);
        const idLabel = svgEl("text", {
            x: String(cx),
            y: String(cy - NODE_H / 2 + 16),
            class: "node-id",
            "text-anchor": "middle",
        });
        idLabel.textContent = placed.id + (info.undeveloped ? " ◇" : "");
        nodeGroup.appendChild(idLabel);
        wrapLabel(info.text).forEach((line, index) => {
            const text = svgEl("text", {
                x: String(cx),
                y: String(cy - 2 + index * 13),
                class: "node-text",
                "text-anchor": "middle",
            });
            text.textContent = line;
            nodeGroup.appendChild(text);
        });
        nodeGroup.addEventListener("click", (event) => {
            event.stopPropagation();
            handlers.onSelect(placed.id);
        });
        group.appendChild(nodeGroup);
    }
    svg.addEventListener("click", () => handlers.onSelect(null));
    const pane = el("div", { class: "tree-pane" });
    pane.appendChild(svg);
    return pane;
}
// --- side panel: node detail ------------------------------------------------
function describeBinding(binding) {
    if (binding.kind === "formula") {
        return `formula over ${binding.trace_ref ? `trace '${binding.trace_ref}'` : "parameters"}: ${binding.formula}`;
    }
    if (binding.kind === "metric") {
        return `metric ${binding.metric} ${binding.comparator} ${binding.threshold} from report '${binding.report_ref}'`;
    }
    return `manual attestation by role '${binding.required_role}'`;
}
function renderDetail(state, node, handlers) {
    const payload = state.casePayload;
    const section = el("section", { class: "panel-section" });
    section.appendChild(el("h2", {}, `${node.id} — ${node.kind}${node.undeveloped ? " (undeveloped)" : ""}`));
    section.appendChild(el("p", { class: "node-claim" }, node.text));
    if (node.tags.length) {
        const tags = el("div", { class: "tag-row" });
        for (const tag of node.tags)
            tags.appendChild(el("span", { class: "tag" }, tag));
        section.appendChild(tags);
    }
    const status = state.report?.status_map[node.id] ?? payload.statuses[node.id];
    section.appendChild(el("p", { class: `status-line ${nodeStatusClass(state, node.id)}` }, `status: ${status ?? "unknown"}` + (state.report ? " (under displayed analysis)" : "")));
    const binding = payload.bindings[node.id];
    if (binding) {
        section.appendChild(el("h3", {}, "evidence"));
        section.appendChild(el("p", { class: "binding" }, describeBinding(binding)));
        if (binding.remediation) {
            section.appendChild(el("p", { class: "remediation" }, `remediation: ${binding.remediation.action} — ${binding.remediation.description}`));
        }
        const evidence = state.report?.reevaluated[node.id]?.after ?? payload.evidence[node.id];
        if (evidence) {
            section.appendChild(el("p", { class: "reason" }, evidence.reason || "(no detail)"));
        }
        if (binding.kind === "manual") {
            section.appendChild(renderAttestForm(node.id, binding, state, handlers));
        }
    }
    return section;
}
function renderAttestForm(evidenceId, binding, state, handlers) {
    const form = el("form", { class: "attest-form" });
    form.appendChild(el("h3", {}, "record attestation"));
    const statusSelect = el("select", { name: "status" });
    statusSelect.append(el("option", { value: "valid" }, "valid"));
    statusSelect.append(el("option", { value: "invalid" }, "invalid"));
    form.appendChild(el("label", {}, "finding ", statusSelect));
    form.appendChild(el("label", {}, "by ", el("input", { name: "by", required: "1" })));
    form.appendChild(el("label", {}, "role ", el("input", {
        name: "role",
        required: "1",
        value: binding.required_role ?? "",
    })));
    form.appendChild(el("label", {}, "note ", el("input", { name: "note" })));
    const submit = el("button", { type: "submit" }, "attest");
    if (state.busy)
        submit.setAttribute("disabled", "1");
    form.appendChild(submit);
    form.addEventListener("submit", (event) => {
        event.preventDefault();
        handlers.onAttest(evidenceId, form);
    });
    return form;
}
// --- side panel: change console ---------------------------------------------
function renderChangeConsole(state, handlers) {
    const section = el("section", { class: "panel-section" });
    section.appendChild(el("h2", {}, "change console"));
    const sourceSelect = el("select", {});
    for (const source of [
        "incident_report",
        "context_evolution",
        "monitoring_event",
    ]) {
        const option = el("option", { value: source }, source.replace("_", " "));
        if (state.draft.source === source)
            option.setAttribute("selected", "1");
        sourceSelect.appendChild(option);
    }
    sourceSelect.addEventListener("change", () => handlers.onDraftEdit({ source: sourceSelect.value }));
    section.appendChild(el("label", {}, "source ", sourceSelect));
    const payloadArea = el("textarea", {
        rows: "2",
        placeholder: "what changed?",
    });
    payloadArea.value = state.draft.payload;
    payloadArea.addEventListener("input", () => handlers.onDraftEdit({ payload: payloadArea.value }));
    section.appendChild(el("label", {}, "description ", payloadArea));
    const tagsInput = el("input", {
        placeholder: "tags, comma separated (e.g. frame rate)",
    });
    tagsInput.value = state.draft.tags;
    tagsInput.addEventListener("input", () => handlers.onDraftEdit({ tags: tagsInput.value }));
    section.appendChild(el("label", {}, "tags ", tagsInput));
    const updatesArea = el("textarea", {
        rows: "3",
        placeholder: "frame_rate = 20.0\none per line",
    });
    updatesArea.value = state.draft.paramUpdates;
    updatesArea.addEventListener("input", () => handlers.onDraftEdit({ paramUpdates: updatesArea.value }));
    section.appendChild(el("label", {}, "parameter updates ", updatesArea));
    const structural = el("input", { type: "checkbox" });
    structural.checked = state.draft.structural;
    structural.addEventListener("change", () => handlers.onDraftEdit({ structural: structural.checked }));
    section.appendChild(el("label", { class: "inline" }, structural, " the argument structure itself must change"));
    const parsed = parseDraft(state.draft);
    if (parsed.problems.length) {
        const list = el("ul", { class: "problems" });
        for (const problem of parsed.problems)
            list.appendChild(el("li", {}, problem));
        section.appendChild(list);
    }
    const submit = el("button", { class: "primary" }, "analyse impact");
    if (state.busy || parsed.body === null)
        submit.setAttribute("disabled", "1");
    submit.addEventListener("click", () => handlers.onSubmitChange());
    section.appendChild(submit);
    return section;
}
// --- side panel: impact report -----------------------------------------------
function renderReport(state, handlers) {
    const report = state.report;
    const badge = stageBadge(report);
    const section = el("section", { class: "panel-section" });
    section.appendChild(el("h2", {}, "impact analysis"));
    section.appendChild(el("span", { class: `stage-badge tone-${badge.tone}` }, badge.label));
    section.appendChild(el("p", { class: "guidance" }, badge.guidance));
    section.appendChild(el("p", { class: "rationale" }, report.rationale));
    if (report.matched_nodes.length) {
        section.appendChild(el("p", {}, `tag matches: ${report.matched_nodes.join(", ")}`));
    }
    const entries = Object.entries(report.reevaluated);
    if (entries.length) {
        const table = el("table", { class: "reeval" });
        table.appendChild(el("tr", {}, el("th", {}, "evidence"), el("th", {}, "before"), el("th", {}, "after")));
        for (const [nodeId, pair] of entries.sort()) {
            table.appendChild(el("tr", {}, el("td", {}, nodeId), el("td", { class: `cell-${pair.before.value}` }, pair.before.value), el("td", { class: `cell-${pair.after.value}` }, pair.after.value)));
        }
        section.appendChild(table);
    }
    else {
        section.appendChild(el("p", {}, "no evidence needed re-evaluation"));
    }
    if (report.stage === 1) {
        const apply = el("button", { class: "primary" }, "apply change");
        if (!applyEnabled(state))
            apply.setAttribute("disabled", "1");
        apply.addEventListener("click", () => handlers.onApply());
        section.appendChild(apply);
    }
    return section;
}
// --- top-level ----------------------------------------------------------------
export function render(root, state, view, handlers) {
    root.replaceChildren();
    const header = el("header", {});
    const payload = state.casePayload;
    header.appendChild(el("h1", {}, payload ? `${payload.metadata.name} ` : "safety case ", el("span", { class: "muted" }, payload ? `v${payload.metadata.version} · ${payload.digest.slice(0, 10)}` : "")));
    const refresh = el("button", {}, "refresh");
    refresh.addEventListener("click", () => handlers.onRefresh());
    header.appendChild(refresh);
    root.appendChild(header);
    if (state.notice) {
        const banner = el("div", { class: "banner" }, state.notice, " ");
        const dismiss = el("button", {}, "dismiss");
        dismiss.addEventListener("click", () => handlers.onDismissNotice());
        banner.appendChild(dismiss);
        root.appendChild(banner);
    }
    if (state.phase === "error") {
        const banner = el("div", { class: "banner error" }, `cannot reach the case service: ${state.errorMessage ?? "unknown error"} `);
        const retry = el("button", {}, "retry");
        retry.addEventListener("click", () => handlers.onRefresh());
        banner.appendChild(retry);
        root.appendChild(banner);
        return;
    }
    if (state.phase === "loading" || !payload) {
        root.appendChild(el("p", { class: "loading" }, "loading case…"));
        return;
    }
    const main = el("main", {});
    main.appendChild(renderTree(state, view, handlers));
    const panel = el("aside", { class: "side-panel" });
    const selected = state.selected
        ? payload.tree.nodes.find((n) => n.id === state.selected)
        : undefined;
    if (selected)
        panel.appendChild(renderDetail(state, selected, handlers));
    if (state.report)
        panel.appendChild(renderReport(state, handlers));
    panel.appendChild(renderChangeConsole(state, handlers));
    main.appendChild(panel);
    root.appendChild(main);
}
