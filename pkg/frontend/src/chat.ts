/** Chat view state: transcript, composer, send gating, paste suppression. */

import type { MessageResponse, TranscriptTurn } from "./types.js";

export interface ChatTransport {
  sendMessage(text: string): Promise<MessageResponse>;
}

export class ChatController {
  transcript: TranscriptTurn[] = [];
  composer = "";
  pending = false;
  interviewComplete = false;
  notice: string | null = null;
  lastError: string | null = null;

  constructor(private readonly transport: ChatTransport) {}

  get sendEnabled(): boolean {
    return !this.pending && !this.interviewComplete && this.composer.trim().length > 0;
  }

  setComposer(text: string): void {
    this.composer = text;
  }

  /** Send the composed message; the composer clears only on success. */
  async send(): Promise<MessageResponse | null> {
    if (!this.sendEnabled) return null;
    const text = this.composer;
    this.pending = true;
    this.lastError = null;
    try {
      const response = await this.transport.sendMessage(text);
      this.transcript.push({
        role: "user",
        text,
        group_id: "",
        kind: "answer",
        followup_id: null,
        turn_id: "",
        ts: Date.now() / 1000,
      });
      this.transcript.push({
        role: "bot",
        text: response.utterance,
        group_id: response.group_id,
        kind: response.kind,
        followup_id: null,
        turn_id: "",
        ts: Date.now() / 1000,
      });
      this.composer = "";
      if (response.interview_complete) {
        this.interviewComplete = true;
        this.notice = response.notice ?? null;
      }
      return response;
    } catch (error) {
      // network failure: keep the composer text so nothing is lost
      this.lastError = error instanceof Error ? error.message : String(error);
      return null;
    } finally {
      this.pending = false;
    }
  }
}

/**
 * Suppress paste into the chat composer (typing is unaffected). Scoped to the
 * element it is attached to; survey fields are never wired through this.
 */
export function blockClipboardPaste(element: HTMLElement): void {
  element.addEventListener("paste", (event) => {
    event.preventDefault();
  });
}
