/** Wire types for the session-service HTTP API. */

export type Condition = "control" | "free_edit" | "ai_edit";

export type Stage =
  | "onboarding"
  | "screening"
  | "interviewing"
  | "editing"
  | "survey"
  | "submitted"
  | "screened_out";

export type Decision =
  | "pending"
  | "accepted_placeholder"
  | "accepted_abstraction"
  | "ignored";

export interface Finding {
  finding_id: string;
  message_id: string;
  category: string;
  original_text: string;
  placeholder: string;
  explanation: string;
  occurrence_ordinal: number;
}

export interface Suggestion {
  finding: Finding;
  replacement_text: string;
  abstraction_text: string;
  decision: Decision;
}

export interface MessageSuggestions {
  message_id: string;
  original_text: string;
  text_with_placeholders: string;
  detection_failed: boolean;
  suggestions: Suggestion[];
}

export interface TranscriptTurn {
  role: "bot" | "user";
  text: string;
  group_id: string;
  kind: string;
  followup_id: string | null;
  turn_id: string;
  ts: number;
}

export interface SessionInfo {
  session_id: string;
  condition: Condition;
}

export interface MessageResponse {
  utterance: string;
  kind: string;
  group_id: string;
  interview_complete: boolean;
  notice?: string;
  suggestions?: MessageSuggestions[];
}

export interface TranscriptResponse {
  session_id: string;
  condition: Condition;
  stage: Stage;
  turns: TranscriptTurn[];
  suggestions?: MessageSuggestions[];
  manual_finals?: Record<string, string>;
}

export interface EditResponse {
  accepted: boolean;
  final_preview: string;
  stale: boolean;
}

export interface SurveyItem {
  id: string;
  type: "likert" | "choice" | "text";
  prompt: string;
  options?: string[];
}

export interface LikertScale {
  min: number;
  max: number;
  labels: Record<string, string>;
}
