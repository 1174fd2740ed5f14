/** Thin typed client over fetch; every UI fact comes through here. */
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    constructor(base = "") {
        this.base = base;
    }
    async request(method, path, body) {
        let response;
        try {
            response = await fetch(this.base + path, {
                method,
                headers: body === undefined ? {} : { "Content-Type": "application/json" },
                body: body === undefined ? undefined : JSON.stringify(body),
            });
        }
        catch (err) {
            throw new ApiError(0, `service unreachable: ${String(err)}`);
        }
        const text = await response.text();
        let doc = null;
        try {
            doc = text ? JSON.parse(text) : null;
        }
        catch {
            doc = null;
        }
        if (!response.ok) {
            const message = doc && typeof doc === "object" && "error" in doc
                ? String(doc.error)
                : `HTTP ${response.status}`;
            throw new ApiError(response.status, message);
        }
        return doc;
    }
    health() {
        return this.request("GET", "/api/health");
    }
    async createSession() {
        const doc = await this.request("POST", "/api/sessions");
        return doc.id;
    }
    getSession(id) {
        return this.request("GET", `/api/sessions/${id}`);
    }
    submitRuleset(id, text) {
        return this.request("POST", `/api/sessions/${id}/ruleset`, { text });
    }
    explain(id, revision, verdict, systemDescription = "") {
        return this.request("POST", `/api/sessions/${id}/explain`, {
            revision,
            verdict,
            system_description: systemDescription,
        });
    }
    apply(id, revision, edit) {
        return this.request("POST", `/api/sessions/${id}/apply`, { revision, ...edit });
    }
    metrics(id) {
        return this.request("GET", `/api/sessions/${id}/metrics`);
    }
}
