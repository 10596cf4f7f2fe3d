/** Survey form state; submission stays blocked until everything validates. */

import type { LikertScale, SurveyItem } from "./types.js";

export class SurveyController {
  answers: Record<string, unknown> = {};

  constructor(
    readonly items: SurveyItem[],
    readonly scale: LikertScale,
  ) {}

  setAnswer(itemId: string, value: unknown): void {
    this.answers[itemId] = value;
  }

  /** Item ids that still block submission. */
  missingItems(): string[] {
    const missing: string[] = [];
    for (const item of this.items) {
      const value = this.answers[item.id];
      if (item.type === "likert") {
        if (
          typeof value !== "number" ||
          !Number.isInteger(value) ||
          value < this.scale.min ||
          value > this.scale.max
        ) {
          missing.push(item.id);
        }
      } else if (item.type === "choice") {
        if (typeof value !== "string" || !(item.options ?? []).includes(value)) {
          missing.push(item.id);
        }
      } else if (typeof value !== "string") {
        // free text may be empty, but the field must exist
        missing.push(item.id);
      }
    }
    return missing;
  }

  get canSubmit(): boolean {
    return this.missingItems().length === 0;
  }

  /** Answers payload with empty strings for untouched free-text items. */
  payload(): Record<string, unknown> {
    const out: Record<string, unknown> = {};
    for (const item of this.items) {
      out[item.id] = this.answers[item.id] ?? (item.type === "text" ? "" : undefined);
    }
    return out;
  }
}
