/** Thin typed client for the session-service HTTP API. */

import type {
  EditResponse,
  LikertScale,
  MessageResponse,
  SessionInfo,
  Stage,
  SurveyItem,
  TranscriptResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function request<T>(
  method: string,
  path: string,
  body?: unknown,
  baseUrl = "",
): Promise<T> {
  const response = await fetch(baseUrl + path, {
    method,
    headers: body === undefined ? {} : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const payload = (await response.json()) as { detail?: string };
      if (payload.detail) detail = payload.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class SessionApi {
  sessionId = "";

  constructor(readonly baseUrl = "") {}

  async createSession(): Promise<SessionInfo> {
    const info = await request<SessionInfo>("POST", "/sessions", {}, this.baseUrl);
    this.sessionId = info.session_id;
    return info;
  }

  private sessionPath(suffix: string): string {
    return `/sessions/${encodeURIComponent(this.sessionId)}${suffix}`;
  }

  consent(studyConsent: boolean): Promise<{ stage: Stage }> {
    return request("POST", this.sessionPath("/consent"), { study_consent: studyConsent }, this.baseUrl);
  }

  screening(answers: {
    age_18_plus: boolean;
    fluent_english: boolean;
    ai_use: string;
  }): Promise<{ qualified: boolean; stage: Stage }> {
    return request("POST", this.sessionPath("/screening"), answers, this.baseUrl);
  }

  sendMessage(text: string): Promise<MessageResponse> {
    return request("POST", this.sessionPath("/messages"), { text }, this.baseUrl);
  }

  transcript(): Promise<TranscriptResponse> {
    return request("GET", this.sessionPath("/transcript"), undefined, this.baseUrl);
  }

  decide(messageId: string, findingId: string, decision: string): Promise<EditResponse> {
    return request(
      "POST",
      this.sessionPath("/edits"),
      { message_id: messageId, decision: { finding_id: findingId, decision } },
      this.baseUrl,
    );
  }

  manualEdit(messageId: string, manualFinal: string): Promise<EditResponse> {
    return request(
      "POST",
      this.sessionPath("/edits"),
      { message_id: messageId, manual_final: manualFinal },
      this.baseUrl,
    );
  }

  survey(answers: Record<string, unknown>): Promise<{ stage: Stage }> {
    return request("POST", this.sessionPath("/survey"), { answers }, this.baseUrl);
  }

  submit(shareOriginal: boolean): Promise<{ submitted: boolean }> {
    return request("POST", this.sessionPath("/submit"), { share_original: shareOriginal }, this.baseUrl);
  }

  surveyItems(): Promise<{ items: SurveyItem[]; likert_scale: LikertScale }> {
    return request("GET", this.sessionPath("/survey-items"), undefined, this.baseUrl);
  }

  screeningItems(): Promise<{ items: SurveyItem[] }> {
    return request("GET", "/meta/screening-items", undefined, this.baseUrl);
  }
}
