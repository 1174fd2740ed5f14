/** Pure UI state and transitions.
 *
 * The state derives solely from service responses plus the unsaved editor
 * text; there is no client-side checking logic. Reloading reconstructs the
 * same state from the stored session (see restoreFromSession).
 */
export function initialState() {
    return {
        sessionId: null,
        editorText: "",
        checkedRevision: null,
        diagnostics: [],
        verdicts: [],
        warnings: [],
        selectedVerdict: null,
        explanation: null,
        timeline: [],
        metrics: null,
        pending: false,
        banner: null,
    };
}
export function withSession(state, sessionId) {
    return { ...initialState(), editorText: state.editorText, sessionId };
}
export function withEditorText(state, editorText) {
    return { ...state, editorText };
}
export function withPending(state, pending) {
    return { ...state, pending, banner: pending ? null : state.banner };
}
export function withFailure(state, message) {
    // The editor and previous results survive a failed request.
    return { ...state, pending: false, banner: message };
}
export function applyCheckResponse(state, doc) {
    const next = {
        ...state,
        pending: false,
        banner: null,
        diagnostics: doc.diagnostics,
        warnings: doc.warnings,
    };
    if (doc.revision === null) {
        // Rejected submission: keep prior verdicts and editor text untouched.
        return { ...next, explanation: null, selectedVerdict: null };
    }
    next.verdicts = doc.verdicts;
    next.checkedRevision = doc.revision;
    next.selectedVerdict = null;
    next.explanation = null;
    next.timeline = [
        ...state.timeline,
        {
            revision: doc.revision,
            verdictCount: doc.verdicts.length,
            diagnosticCount: doc.diagnostics.length,
        },
    ];
    if (doc.text !== undefined) {
        next.editorText = doc.text;
    }
    return next;
}
export function applyExplanation(state, verdictIndex, report) {
    return {
        ...state,
        pending: false,
        banner: null,
        selectedVerdict: verdictIndex,
        explanation: report,
    };
}
export function withMetrics(state, metrics) {
    return { ...state, metrics };
}
export function restoreFromSession(session) {
    let state = { ...initialState(), sessionId: session.id };
    for (const revision of session.revisions) {
        state = applyCheckResponse(state, {
            revision: revision.revision,
            diagnostics: revision.diagnostics,
            verdicts: revision.verdicts,
            warnings: revision.warnings,
            text: revision.text,
        });
    }
    return state;
}
const IDENT = /^[A-Za-z][A-Za-z0-9_]*$/;
/** Turn one of the report's two suggestions into an applicable edit. */
export function suggestionEdit(report, which) {
    const block = report["Conflicting Rules"];
    const kind = block.Resolution.Kind;
    const text = which === 1 ? block.Resolution.Suggestion1.SLEEC : block.Resolution.Suggestion2.SLEEC;
    if (kind === "remove rule") {
        return {
            kind,
            sleec_text: "",
            target_rule_id: block.Error.Rule2 ?? block.Error.Rule1,
        };
    }
    const edit = { kind, sleec_text: text };
    if (kind === "combine rule" && block.Error.Rule2) {
        edit.target_rule_id = block.Error.Rule2;
    }
    if (kind === "modify rule") {
        const head = text.trim().split(/\s+/, 1)[0];
        if (head && IDENT.test(head)) {
            edit.target_rule_id = head;
        }
    }
    return edit;
}
export function describeMetrics(metrics) {
    if (metrics === null) {
        return "iterations: – · elapsed: – · resolved: –";
    }
    const iterations = metrics.iterations ?? "–";
    const elapsed = metrics.elapsed_secs === null ? "–" : `${Math.round(metrics.elapsed_secs)}s`;
    const resolved = metrics.resolved ? "yes" : "not yet";
    return `iterations: ${iterations} · elapsed: ${elapsed} · resolved: ${resolved}`;
}
