/** Drives the debugging loop against the service; DOM-free and testable.
 *
 * One request is in flight per session at a time; actions during a pending
 * request are ignored (the UI disables its buttons off the same flag).
 */

import { ApiClient, ApiError } from "./api.js";
import {
  UiState,
  applyCheckResponse,
  applyExplanation,
  initialState,
  restoreFromSession,
  suggestionEdit,
  withEditorText,
  withFailure,
  withMetrics,
  withPending,
  withSession,
} from "./state.js";

export class WorkbenchController {
  state: UiState = initialState();

  constructor(
    private api: ApiClient,
    private onChange: (state: UiState) => void = () => {},
    private systemDescription: string = "",
  ) {}

  private update(state: UiState): void {
    this.state = state;
    this.onChange(state);
  }

  setEditorText(text: string): void {
    this.update(withEditorText(this.state, text));
  }

  async newSession(): Promise<void> {
    const id = await this.api.createSession();
    this.update(withSession(this.state, id));
  }

  /** Rebuild identical state from the stored session (page reload path). */
  async restore(sessionId: string): Promise<void> {
    const session = await this.api.getSession(sessionId);
    const state = restoreFromSession(session);
    this.update(state);
    await this.refreshMetrics();
  }

  async runCheck(): Promise<void> {
    if (this.state.pending || this.state.sessionId === null) {
      return;
    }
    this.update(withPending(this.state, true));
    try {
      const doc = await this.api.submitRuleset(this.state.sessionId, this.state.editorText);
      this.update(applyCheckResponse(this.state, doc));
      await this.refreshMetrics();
    } catch (err) {
      this.update(withFailure(this.state, describeError(err)));
    }
  }

  async explain(verdictIndex: number): Promise<void> {
    if (this.state.pending || this.state.sessionId === null) {
      return;
    }
    if (this.state.checkedRevision === null) {
      return;
    }
    this.update(withPending(this.state, true));
    try {
      const report = await this.api.explain(
        this.state.sessionId,
        this.state.checkedRevision,
        verdictIndex,
        this.systemDescription,
      );
      this.update(applyExplanation(this.state, verdictIndex, report));
    } catch (err) {
      this.update(withFailure(this.state, describeError(err)));
    }
  }

  async applySuggestion(which: 1 | 2): Promise<void> {
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
    } catch (err) {
      this.update(withFailure(this.state, describeError(err)));
    }
  }

  async refreshMetrics(): Promise<void> {
    if (this.state.sessionId === null) {
      return;
    }
    try {
      const metrics = await this.api.metrics(this.state.sessionId);
      this.update(withMetrics(this.state, metrics));
    } catch {
      // metrics are decorative; a failed refresh never clobbers results
    }
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? err.message : `service error (${err.status}): ${err.message}`;
  }
  return String(err);
}
