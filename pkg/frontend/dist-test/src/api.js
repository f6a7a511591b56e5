/** Thin typed client for the case service. */
export class ApiError extends Error {
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
    }
}
function baseUrl() {
    const override = new URLSearchParams(window.location.search).get("api");
    return override ? override.replace(/\/$/, "") : "";
}
async function request(path, init) {
    let response;
    try {
        response = await fetch(baseUrl() + path, init);
    }
    catch (err) {
        throw new ApiError(0, "unreachable", `service unreachable: ${String(err)}`);
    }
    const text = await response.text();
    let payload = null;
    try {
        payload = text ? JSON.parse(text) : null;
    }
    catch {
        payload = null;
    }
    if (!response.ok) {
        const envelope = payload;
        throw new ApiError(response.status, envelope?.error?.code ?? "internal", envelope?.error?.message ?? `request failed (${response.status})`);
    }
    return payload;
}
function post(body) {
    return {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body ?? {}),
    };
}
export const api = {
    getCase() {
        return request("/case");
    },
    openChange(body) {
        return request("/changes", post(body));
    },
    impact(changeId) {
        return request(`/changes/${encodeURIComponent(changeId)}/impact`, post({}));
    },
    apply(changeId, baseCaseDigest) {
        return request(`/changes/${encodeURIComponent(changeId)}/apply`, post({ base_case_digest: baseCaseDigest }));
    },
    attest(evidenceId, body) {
        return request(`/evidence/${encodeURIComponent(evidenceId)}/attest`, post(body));
    },
};
