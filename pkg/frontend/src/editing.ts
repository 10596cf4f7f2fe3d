/** Post-interview editing state: decisions, manual edits, issue cards. */

import {
  applyDecisions,
  highlightSpans,
  renderSegments,
  type RenderSegment,
  type SpanBinding,
} from "./binding.js";
import type { Condition, Decision, MessageSuggestions, Suggestion } from "./types.js";

export interface EditTransport {
  decide(messageId: string, findingId: string, decision: string): Promise<{ stale: boolean; final_preview: string }>;
  manualEdit(messageId: string, manualFinal: string): Promise<{ final_preview: string }>;
}

export interface EditableMessage {
  messageId: string;
  role: "bot" | "user";
  original: string;
  suggestions: Suggestion[];
  manualFinal: string | null;
  unresolvableFindingIds: string[];
  unsaved: boolean;
}

/** Placeholder/abstraction controls exist only in the AI-aided condition. */
export function suggestionControlsVisible(condition: Condition): boolean {
  return condition === "ai_edit";
}

export class EditingController {
  messages: EditableMessage[] = [];
  openCardFindingId: string | null = null;

  constructor(
    readonly condition: Condition,
    private readonly transport: EditTransport,
  ) {}

  load(
    turns: { turn_id: string; role: "bot" | "user"; text: string }[],
    suggestionSets: MessageSuggestions[],
    manualFinals: Record<string, string> = {},
  ): void {
    const byMessage = new Map(suggestionSets.map((ms) => [ms.message_id, ms]));
    this.messages = turns.map((turn) => ({
      messageId: turn.turn_id,
      role: turn.role,
      original: turn.text,
      // deep-copy so controller state never aliases the transport payload
      suggestions: suggestionControlsVisible(this.condition)
        ? structuredClone(byMessage.get(turn.turn_id)?.suggestions ?? [])
        : [],
      manualFinal: manualFinals[turn.turn_id] ?? null,
      unresolvableFindingIds: [],
      unsaved: false,
    }));
  }

  message(messageId: string): EditableMessage {
    const found = this.messages.find((m) => m.messageId === messageId);
    if (!found) throw new Error(`unknown message ${messageId}`);
    return found;
  }

  suggestion(messageId: string, findingId: string): Suggestion {
    const suggestion = this.message(messageId).suggestions.find(
      (s) => s.finding.finding_id === findingId,
    );
    if (!suggestion) throw new Error(`unknown finding ${findingId}`);
    return suggestion;
  }

  /** Exactly one issue card open at a time. */
  openCard(findingId: string | null): void {
    this.openCardFindingId = findingId;
  }

  /** The message text as currently rendered (decisions + manual edit). */
  renderedText(messageId: string): string {
    const message = this.message(messageId);
    return applyDecisions(message.original, message.suggestions, message.manualFinal).final;
  }

  /** Pending-finding spans for wavy-underline highlighting. */
  highlights(messageId: string): SpanBinding[] {
    const message = this.message(messageId);
    return highlightSpans(
      message.original,
      message.suggestions.filter((s) => s.decision === "pending"),
    );
  }

  /** Render model: decided spans substituted, pending spans highlightable. */
  segments(messageId: string): RenderSegment[] {
    const message = this.message(messageId);
    return renderSegments(message.original, message.suggestions, message.manualFinal);
  }

  /**
   * Record a decision: the span swaps locally to the chosen preview and the
   * server stores the decision. "ignore" doubles as the revert control,
   * restoring the original span text.
   */
  async decide(messageId: string, findingId: string, decision: Decision): Promise<void> {
    if (!suggestionControlsVisible(this.condition)) {
      throw new Error("suggestion decisions are not available in this condition");
    }
    const suggestion = this.suggestion(messageId, findingId);
    const previous = suggestion.decision;
    if (previous !== "pending" && decision !== "pending") {
      suggestion.decision = "pending"; // revert first, matching the server rule
    }
    suggestion.decision = decision;
    try {
      const response = await this.transport.decide(messageId, findingId, decision);
      if (response.stale) {
        const message = this.message(messageId);
        if (!message.unresolvableFindingIds.includes(findingId)) {
          message.unresolvableFindingIds.push(findingId);
        }
      }
    } catch (error) {
      suggestion.decision = previous; // reconcile on failure
      throw error;
    }
  }

  /** Free-form rewrite of a whole message (both editing conditions). */
  async editFreeform(messageId: string, newText: string): Promise<void> {
    const message = this.message(messageId);
    const previous = message.manualFinal;
    message.manualFinal = newText;
    message.unsaved = true;
    try {
      await this.transport.manualEdit(messageId, newText);
      message.unsaved = false;
    } catch (error) {
      message.manualFinal = previous;
      throw error;
    }
  }
}
