/** Wire types for the capassess HTTP API, field for field.
 *
 * Everything here mirrors the JSON the service emits. The UI never
 * derives numbers from these payloads; it displays them as received.
 */

export type AnswerOption = "N" | "P" | "L" | "F" | "Unable";

export type AssessmentState = "Draft" | "Open" | "Closed" | "Reported";

export interface ProcessRef {
  id: string;
  name: string;
}

export interface AssessmentSummary {
  id: string;
  org_profile: string;
  processes: ProcessRef[];
  target_level: number;
  state: AssessmentState;
  created_at: string;
  opened_at: string | null;
  closed_at: string | null;
  reported_at: string | null;
  participant_count: number;
  response_count: number;
}

export interface QuestionnaireQuestion {
  id: string;
  attribute: string;
  text: string;
}

export interface QuestionnaireSection {
  process_id: string;
  process_name: string;
  questions: QuestionnaireQuestion[];
}

export interface Questionnaire {
  assessment_id: string;
  state: AssessmentState;
  participant_id: string;
  display_name: string;
  sections: QuestionnaireSection[];
  /** Answers already on the server: process id -> question id -> answer. */
  answers: Record<string, Record<string, AnswerOption>>;
}

export interface SubmitAck {
  status: "recorded";
  question: string;
  process: string;
  answer: AnswerOption;
  submitted_at: string;
}

export interface ProcessProgress {
  process_id: string;
  allocated: number;
  answered: number;
  completion: number;
}

export interface ParticipantProgress {
  participant_id: string;
  display_name: string;
  per_process: ProcessProgress[];
  allocated: number;
  answered: number;
  completion: number;
  zero_allocation: boolean;
}

/** GET .../completion: the caller's own progress row plus survey state. */
export interface CompletionRow extends ParticipantProgress {
  state: AssessmentState;
}

export interface ProgressSnapshot {
  assessment_id: string;
  state: AssessmentState;
  participants: ParticipantProgress[];
  allocated: number;
  answered: number;
  completion: number;
}

export interface AttributeResult {
  attribute: string;
  level: number;
  mean_percent: number | null;
  rating: string;
  cv: number | null;
  low_reliability: boolean;
  response_count: number;
  unable_count: number;
}

export interface QuestionResult {
  question_id: string;
  knowledge_score: number | null;
  band: string;
  answered_count: number;
  unable_count: number;
}

export interface ProcessResult {
  process_id: string;
  process_name: string;
  capability_level: number;
  attribute_results: AttributeResult[];
  question_results: QuestionResult[];
  usable_responses: number;
  unable_responses: number;
}

export interface ResultsResponse {
  assessment_id: string;
  results: ProcessResult[];
}

export interface ReportEntry {
  question_id: string;
  process_id: string;
  knowledge_score: number;
  band: string;
  observation: string;
  recommendation: string | null;
  guidance_missing: boolean;
}

export interface ReportProcess extends ProcessResult {
  entries: ReportEntry[];
}

export interface Report {
  schema_version: number;
  assessment: {
    id: string;
    org_profile: string;
    target_level: number;
    created_at: string;
    opened_at: string | null;
    closed_at: string | null;
    reported_at: string | null;
  };
  bank_fingerprint: string;
  method: {
    scale: {
      answer_percents: Record<string, number>;
      band_upper_bounds: Record<string, number>;
    };
    cv_threshold: number;
  };
  summary: {
    capability_profile: {
      process_id: string;
      process_name: string;
      capability_level: number;
    }[];
    top_risks: Record<
      string,
      { question_id: string; knowledge_score: number; band: string }[]
    >;
    participant_count: number;
    response_count: number;
  };
  processes: ReportProcess[];
}

export interface RegisterResult {
  participant_id: string;
  display_name: string;
  assignments: { process: string; role: string }[];
  token: string;
}
