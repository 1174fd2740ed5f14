/** Pure UI state and transitions.
 *
 * The state derives solely from service responses plus the unsaved editor
 * text; there is no client-side checking logic. Reloading reconstructs the
 * same state from the stored session (see restoreFromSession).
 */

import type {
  DiagnosticDoc,
  MetricsDoc,
  ReportDoc,
  SessionDoc,
  SubmitDoc,
  SuggestionEdit,
  VerdictDoc,
} from "./types.js";

export interface TimelineEntry {
  revision: number;
  verdictCount: number;
  diagnosticCount: number;
}

export interface UiState {
  sessionId: string | null;
  editorText: string;
  /** Index of the revision the shown verdicts belong to. */
  checkedRevision: number | null;
  diagnostics: DiagnosticDoc[];
  verdicts: VerdictDoc[];
  warnings: string[];
  selectedVerdict: number | null;
  explanation: ReportDoc | null;
  timeline: TimelineEntry[];
  metrics: MetricsDoc | null;
  pending: boolean;
  banner: string | null;
}

export function initialState(): UiState {
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

export function withSession(state: UiState, sessionId: string): UiState {
  return { ...initialState(), editorText: state.editorText, sessionId };
}

export function withEditorText(state: UiState, editorText: string): UiState {
  return { ...state, editorText };
}

export function withPending(state: UiState, pending: boolean): UiState {
  return { ...state, pending, banner: pending ? null : state.banner };
}

export function withFailure(state: UiState, message: string): UiState {
  // The editor and previous results survive a failed request.
  return { ...state, pending: false, banner: message };
}

export function applyCheckResponse(state: UiState, doc: SubmitDoc): UiState {
  const next: UiState = {
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

export function applyExplanation(
  state: UiState,
  verdictIndex: number,
  report: ReportDoc,
): UiState {
  return {
    ...state,
    pending: false,
    banner: null,
    selectedVerdict: verdictIndex,
    explanation: report,
  };
}

export function withMetrics(state: UiState, metrics: MetricsDoc): UiState {
  return { ...state, metrics };
}

export function restoreFromSession(session: SessionDoc): UiState {
  let state: UiState = { ...initialState(), sessionId: session.id };
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
export function suggestionEdit(report: ReportDoc, which: 1 | 2): SuggestionEdit {
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
  const edit: SuggestionEdit = { kind, sleec_text: text };
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

export function describeMetrics(metrics: MetricsDoc | null): string {
  if (metrics === null) {
    return "iterations: – · elapsed: – · resolved: –";
  }
  const iterations = metrics.iterations ?? "–";
  const elapsed =
    metrics.elapsed_secs === null ? "–" : `${Math.round(metrics.elapsed_secs)}s`;
  const resolved = metrics.resolved ? "yes" : "not yet";
  return `iterations: ${iterations} · elapsed: ${elapsed} · resolved: ${resolved}`;
}
