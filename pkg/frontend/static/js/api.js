/** Thin fetch client for /api/v1/. No caching, no state, no math. */
/** A domain failure the service described; code comes from the body. */
export class ApiError extends Error {
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
        this.name = "ApiError";
    }
}
/** The request never reached a verdict (connection refused, timeout). */
export class NetworkError extends Error {
    constructor(cause) {
        super(`request failed: ${String(cause)}`);
        this.name = "NetworkError";
    }
}
async function request(fetchImpl, url, token, init = {}) {
    let response;
    try {
        response = await fetchImpl(url, {
            ...init,
            headers: {
                Authorization: `Bearer ${token}`,
                ...(init.body ? { "Content-Type": "application/json" } : {}),
            },
        });
    }
    catch (cause) {
        throw new NetworkError(cause);
    }
    if (!response.ok) {
        let code = "unknown_error";
        let message = `${response.status}`;
        try {
            const body = (await response.json());
            if (typeof body.code === "string")
                code = body.code;
            if (typeof body.message === "string")
                message = body.message;
        }
        catch {
            // Non-JSON error body; keep the status text.
        }
        throw new ApiError(response.status, code, message);
    }
    return (await response.json());
}
/** Participant-side client: one assessment, one token, three endpoints. */
export class ParticipantApi {
    constructor(baseUrl, assessmentId, token, fetchImpl = (...args) => fetch(...args)) {
        this.baseUrl = baseUrl;
        this.assessmentId = assessmentId;
        this.token = token;
        this.fetchImpl = fetchImpl;
    }
    url(suffix) {
        return `${this.baseUrl}/api/v1/assessments/${encodeURIComponent(this.assessmentId)}${suffix}`;
    }
    questionnaire() {
        return request(this.fetchImpl, this.url("/questionnaire"), this.token);
    }
    submit(question, answer, process) {
        return request(this.fetchImpl, this.url("/responses"), this.token, {
            method: "POST",
            body: JSON.stringify({ question, answer, process }),
        });
    }
    completion() {
        return request(this.fetchImpl, this.url("/completion"), this.token);
    }
}
/** Facilitator-side client keyed by the shared secret. */
export class FacilitatorApi {
    constructor(baseUrl, key, fetchImpl = (...args) => fetch(...args)) {
        this.baseUrl = baseUrl;
        this.key = key;
        this.fetchImpl = fetchImpl;
    }
    url(suffix) {
        return `${this.baseUrl}/api/v1${suffix}`;
    }
    listAssessments() {
        return request(this.fetchImpl, this.url("/assessments"), this.key);
    }
    getAssessment(id) {
        return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}`), this.key);
    }
    createAssessment(payload) {
        return request(this.fetchImpl, this.url("/assessments"), this.key, {
            method: "POST",
            body: JSON.stringify(payload),
        });
    }
    register(assessmentId, payload) {
        return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(assessmentId)}/participants`), this.key, { method: "POST", body: JSON.stringify(payload) });
    }
    open(id) {
        return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/open`), this.key, {
            method: "POST",
        });
    }
    close(id) {
        return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/close`), this.key, {
            method: "POST",
        });
    }
    progress(id) {
        return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/progress`), this.key);
    }
    results(id) {
        return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/results`), this.key);
    }
    buildReport(id) {
        return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/report`), this.key, {
            method: "POST",
        });
    }
    getReport(id) {
        return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/report`), this.key);
    }
}
