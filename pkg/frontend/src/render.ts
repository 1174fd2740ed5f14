/** DOM rendering: one render(state) pass over stable placeholder nodes. */

import { describeMetrics, UiState } from "./state.js";
import type { DiagnosticDoc, ReportDoc, VerdictDoc } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function diagnosticLine(diag: DiagnosticDoc): string {
  const hint = diag.suggestion ? ` (did you mean '${escapeHtml(diag.suggestion)}'?)` : "";
  return (
    `<li class="diag diag-${diag.severity}">` +
    `${diag.line}:${diag.col} ${escapeHtml(diag.category)}: ${escapeHtml(diag.message)}${hint}</li>`
  );
}

function verdictCard(verdict: VerdictDoc, index: number, selected: boolean): string {
  const trace = verdict.trace
    ? `<code class="trace">${escapeHtml(verdict.trace)}</code>`
    : "";
  return (
    `<article class="verdict-card${selected ? " selected" : ""}" data-verdict="${index}">` +
    `<span class="badge badge-${verdict.kind}">${verdict.kind}</span>` +
    `<strong>${verdict.rules.map(escapeHtml).join(", ")}</strong>` +
    `<p>${escapeHtml(verdict.message)}</p>${trace}` +
    `<button class="explain-btn" data-verdict="${index}">Explain</button>` +
    `</article>`
  );
}

function suggestionCard(report: ReportDoc, which: 1 | 2): string {
  const block = report["Conflicting Rules"].Resolution;
  const suggestion = which === 1 ? block.Suggestion1 : block.Suggestion2;
  const body = suggestion.SLEEC
    ? `<code>${escapeHtml(suggestion.SLEEC)}</code>`
    : "<em>remove the rule</em>";
  return (
    `<article class="suggestion-card">` +
    `<h4>Suggestion ${which} <small>(${escapeHtml(block.Kind)})</small></h4>` +
    `${body}<p>${escapeHtml(suggestion.Justification)}</p>` +
    `<button class="apply-btn" data-which="${which}">Apply</button>` +
    `</article>`
  );
}

export function render(state: UiState, root: Document = document): void {
  const byId = (id: string) => root.getElementById(id) as HTMLElement;

  const banner = byId("banner");
  banner.textContent = state.banner ?? "";
  banner.hidden = state.banner === null;

  const editor = byId("editor") as HTMLTextAreaElement;
  if (editor.value !== state.editorText) {
    editor.value = state.editorText;
  }
  editor.disabled = state.pending;
  (byId("check-btn") as HTMLButtonElement).disabled = state.pending;

  byId("metrics-strip").textContent = describeMetrics(state.metrics);
  byId("session-label").textContent = state.sessionId
    ? `session ${state.sessionId.slice(0, 8)}`
    : "no session";

  byId("diagnostics").innerHTML = state.diagnostics.map(diagnosticLine).join("");
  byId("warnings").innerHTML = state.warnings
    .map((w) => `<li class="warning">${escapeHtml(w)}</li>`)
    .join("");

  const verdicts = byId("verdicts");
  if (state.checkedRevision === null) {
    verdicts.innerHTML = "<p class='hint'>Run a check to see results.</p>";
  } else if (state.verdicts.length === 0) {
    verdicts.innerHTML = "<p class='all-clear'>consistent: no problems found</p>";
  } else {
    verdicts.innerHTML = state.verdicts
      .map((v, i) => verdictCard(v, i, state.selectedVerdict === i))
      .join("");
  }

  const explanation = byId("explanation");
  if (state.explanation === null) {
    explanation.innerHTML = "";
  } else {
    const error = state.explanation["Conflicting Rules"].Error;
    explanation.innerHTML =
      `<h3>Explanation <span class="badge badge-${escapeHtml(error.Category)}">` +
      `${escapeHtml(error.Category)}</span></h3>` +
      `<p class="scenario">${escapeHtml(error.Scenario)}</p>` +
      `<p>${escapeHtml(error.Justification)}</p>` +
      suggestionCard(state.explanation, 1) +
      suggestionCard(state.explanation, 2);
  }
  for (const button of Array.from(root.querySelectorAll("button.apply-btn, button.explain-btn"))) {
    (button as HTMLButtonElement).disabled = state.pending;
  }

  byId("timeline").innerHTML = state.timeline
    .map(
      (entry) =>
        `<li>rev ${entry.revision}: ${entry.verdictCount} problem(s), ` +
        `${entry.diagnosticCount} diagnostic(s)</li>`,
    )
    .join("");
}
