/**
 * Span binding by (exact surface string, occurrence ordinal).
 *
 * This mirrors the server's finalize rule byte for byte: decided suggestions
 * resolve against the ORIGINAL message text, occurrences are counted
 * left-to-right, overlapping resolutions keep only the leftmost span, and a
 * manual edit always wins. Client highlights and previews therefore always
 * agree with the server's finalize result for the same decision set.
 */

import type { Suggestion } from "./types.js";

export function findOccurrence(text: string, needle: string, ordinal: number): number {
  if (!needle || ordinal < 1) return -1;
  let start = -1;
  for (let i = 0; i < ordinal; i++) {
    start = text.indexOf(needle, start + 1);
    if (start === -1) return -1;
  }
  return start;
}

export interface SpanBinding {
  findingId: string;
  start: number;
  end: number;
  replacement: string;
}

export interface ResolvedDecisions {
  bindings: SpanBinding[];
  staleFindingIds: string[];
}

function replacementFor(suggestion: Suggestion): string | null {
  switch (suggestion.decision) {
    case "accepted_placeholder":
      return suggestion.replacement_text;
    case "accepted_abstraction":
      return suggestion.abstraction_text;
    default:
      return null; // pending and ignored leave the text alone
  }
}

/** Resolve decided suggestions to concrete spans on the original text. */
export function resolveDecisions(original: string, suggestions: Suggestion[]): ResolvedDecisions {
  const located: SpanBinding[] = [];
  const stale: string[] = [];
  for (const suggestion of suggestions) {
    const replacement = replacementFor(suggestion);
    if (replacement === null) continue;
    const start = findOccurrence(
      original,
      suggestion.finding.original_text,
      suggestion.finding.occurrence_ordinal,
    );
    if (start === -1) {
      stale.push(suggestion.finding.finding_id);
      continue;
    }
    located.push({
      findingId: suggestion.finding.finding_id,
      start,
      end: start + suggestion.finding.original_text.length,
      replacement,
    });
  }
  located.sort((a, b) => a.start - b.start);
  const bindings: SpanBinding[] = [];
  let lastEnd = -1;
  for (const binding of located) {
    if (binding.start < lastEnd) {
      stale.push(binding.findingId); // overlaps an earlier span; cannot both apply
      continue;
    }
    bindings.push(binding);
    lastEnd = binding.end;
  }
  return { bindings, staleFindingIds: stale };
}

export interface FinalizeResult {
  final: string;
  staleFindingIds: string[];
}

/** Apply decided suggestions, then let any manual edit win. */
export function applyDecisions(
  original: string,
  suggestions: Suggestion[],
  manualFinal?: string | null,
): FinalizeResult {
  const { bindings, staleFindingIds } = resolveDecisions(original, suggestions);
  let text = original;
  for (let i = bindings.length - 1; i >= 0; i--) {
    const b = bindings[i]!;
    text = text.slice(0, b.start) + b.replacement + text.slice(b.end);
  }
  if (manualFinal !== undefined && manualFinal !== null) {
    text = manualFinal;
  }
  return { final: text, staleFindingIds };
}

/** Spans of every pending suggestion, for wavy-underline highlighting. */
export function highlightSpans(original: string, suggestions: Suggestion[]): SpanBinding[] {
  const spans: SpanBinding[] = [];
  for (const suggestion of suggestions) {
    const start = findOccurrence(
      original,
      suggestion.finding.original_text,
      suggestion.finding.occurrence_ordinal,
    );
    if (start === -1) continue;
    spans.push({
      findingId: suggestion.finding.finding_id,
      start,
      end: start + suggestion.finding.original_text.length,
      replacement: "",
    });
  }
  return spans.sort((a, b) => a.start - b.start);
}

export interface RenderSegment {
  text: string;
  /** Set for pending-finding spans that should carry the wavy underline. */
  pendingFindingId: string | null;
}

/**
 * One-pass render model: decided spans show their replacement text, pending
 * spans keep the original text but stay addressable for highlighting, and
 * everything else passes through. Concatenating the segments always equals
 * applyDecisions(...) for the same inputs (manual edits collapse to a single
 * plain segment, since span positions no longer apply).
 */
export function renderSegments(
  original: string,
  suggestions: Suggestion[],
  manualFinal?: string | null,
): RenderSegment[] {
  if (manualFinal !== undefined && manualFinal !== null) {
    return [{ text: manualFinal, pendingFindingId: null }];
  }
  const decided = resolveDecisions(original, suggestions).bindings;
  // decided spans win any overlap, so segment concatenation always equals
  // the applyDecisions result for the same inputs
  const pending = highlightSpans(
    original,
    suggestions.filter((s) => s.decision === "pending"),
  ).filter((p) => decided.every((d) => p.end <= d.start || p.start >= d.end));
  const spans = [
    ...decided.map((b) => ({ ...b, pending: false })),
    ...pending.map((b) => ({ ...b, pending: true })),
  ].sort((a, b) => a.start - b.start);

  const segments: RenderSegment[] = [];
  let cursor = 0;
  let lastEnd = -1;
  for (const span of spans) {
    if (span.start < lastEnd) continue; // already consumed by an earlier span
    if (span.start > cursor) {
      segments.push({ text: original.slice(cursor, span.start), pendingFindingId: null });
    }
    if (span.pending) {
      segments.push({
        text: original.slice(span.start, span.end),
        pendingFindingId: span.findingId,
      });
    } else {
      segments.push({ text: span.replacement, pendingFindingId: null });
    }
    cursor = span.end;
    lastEnd = span.end;
  }
  if (cursor < original.length) {
    segments.push({ text: original.slice(cursor), pendingFindingId: null });
  }
  return segments.filter((s) => s.text.length > 0 || s.pendingFindingId !== null);
}
