/** Wire types mirroring the workbench HTTP API. */

export interface DiagnosticDoc {
  severity: string;
  category: string;
  line: number;
  col: number;
  message: string;
  suggestion?: string;
}

export interface VerdictDoc {
  kind: string;
  rules: string[];
  trace: string | null;
  scenario: Record<string, unknown>;
  message: string;
}

export interface SubmitDoc {
  revision: number | null;
  diagnostics: DiagnosticDoc[];
  verdicts: VerdictDoc[];
  warnings: string[];
  partial?: boolean;
  submitted_at?: number;
  /** Present on apply responses: the rewritten ruleset text. */
  text?: string;
}

export interface RevisionDoc {
  revision: number;
  text: string;
  submitted_at: number;
  diagnostics: DiagnosticDoc[];
  verdicts: VerdictDoc[];
  warnings: string[];
  partial: boolean;
}

export interface SessionDoc {
  id: string;
  created_at: number;
  revisions: RevisionDoc[];
  explanations: Array<{ revision: number; verdict: number; requested_at: number; report: ReportDoc }>;
  resolved_at: number | null;
}

export interface MetricsDoc {
  resolved: boolean;
  iterations: number | null;
  elapsed_secs: number | null;
  resolved_rules: number;
}

export interface SuggestionBlock {
  SLEEC: string;
  Justification: string;
}

export interface ReportDoc {
  "Conflicting Rules": {
    Error: {
      Rule1: string;
      Rule2: string | null;
      Scenario: string;
      Category: string;
      Justification: string;
    };
    Resolution: {
      Kind: string;
      Suggestion1: SuggestionBlock;
      Suggestion2: SuggestionBlock;
    };
  };
}

export interface SuggestionEdit {
  kind: string;
  sleec_text: string;
  target_rule_id?: string;
}
