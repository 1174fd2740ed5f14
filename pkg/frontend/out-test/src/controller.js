/** Drives the debugging loop against the service; DOM-free and testable.
 *
 * One request is in flight per session at a time; actions during a pending
 * request are ignored (the UI disables its buttons off the same flag).
 */
import { ApiError } from "./api.js";
import { applyCheckResponse, applyExplanation, initialState, restoreFromSession, suggestionEdit, withEditorText, withFailure, withMetrics, withPending, withSession, } from "./state.js";
export class WorkbenchController {
    constructor(api, onChange = () => { }, systemDescription = "") {
        this.api = api;
        this.onChange = onChange;
        this.systemDescription = systemDescription;
        this.state = initialState();
    }
    update(state) {
        this.state = state;
        this.onChange(state);
    }
    setEditorText(text) {
        this.update(withEditorText(this.state, text));
    }
    async newSession() {
        const id = await this.api.createSession();
        this.update(withSession(this.state, id));
    }
    /** Rebuild identical state from the stored session (page reload path). */
    async restore(sessionId) {
        const session = await this.api.getSession(sessionId);
        const state = restoreFromSession(session);
        this.update(state);
        await this.refreshMetrics();
    }
    async runCheck() {
        if (this.state.pending || this.state.sessionId === null) {
            return;
        }
        this.update(withPending(this.state, true));
        try {
            const doc = await this.api.submitRuleset(this.state.sessionId, this.state.editorText);
            this.update(applyCheckResponse(this.state, doc));
            await this.refreshMetrics();
        }
        catch (err) {
            this.update(withFailure(this.state, describeError(err)));
        }
    }
    async explain(verdictIndex) {
        if (this.state.pending || this.state.sessionId === null) {
            return;
        }
        if (this.state.checkedRevision === null) {
            return;
        }
        this.update(withPending(this.state, true));
        try {
            const report = await this.api.explain(this.state.sessionId, this.state.checkedRevision, verdictIndex, this.systemDescription);
            this.update(applyExplanation(this.state, verdictIndex, report));
        }
        catch (err) {
            this.update(withFailure(this.state, describeError(err)));
        }
    }
    async applySuggestion(which) {
        if (this.state.pending || this.state.sessionId === null) {
            return;
        }
        if (this.state.explanation === null || this.state.checkedRevision === null) {
            return;
        }
        const edit = suggestionEdit(this.state.explanation, which);
        this.update(withPending(this.state, true));
        try {
            const doc = await this.api.apply(this.state.sessionId, this.state.checkedRevision, edit);
            this.update(applyCheckResponse(this.state, doc));
            await this.refreshMetrics();
        }
        catch (err) {
            this.update(withFailure(this.state, describeError(err)));
        }
    }
    async refreshMetrics() {
        if (this.state.sessionId === null) {
            return;
        }
        try {
            const metrics = await this.api.metrics(this.state.sessionId);
            this.update(withMetrics(this.state, metrics));
        }
        catch {
            // metrics are decorative; a failed refresh never clobbers results
        }
    }
}
function describeError(err) {
    if (err instanceof ApiError) {
        return err.status === 0 ? err.message : `service error (${err.status}): ${err.message}`;
    }
    return String(err);
}
