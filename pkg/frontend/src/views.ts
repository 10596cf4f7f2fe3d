/** DOM rendering for each stage of the participant flow. */

import { SessionApi } from "./api.js";
import { ChatController, blockClipboardPaste } from "./chat.js";
import { EditingController, suggestionControlsVisible } from "./editing.js";
import { SurveyController } from "./survey.js";
import type { Condition, SurveyItem } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function clear(root: HTMLElement): HTMLElement {
  root.replaceChildren();
  return root;
}

export function renderConsent(root: HTMLElement, onConsent: (agreed: boolean) => void): void {
  const page = el("section", "page consent-page");
  page.append(
    el("h1", "", "Interview study"),
    el(
      "p",
      "",
      "You are invited to a short text interview with an automated interviewer. " +
        "Depending on your assignment you may be able to review and edit your " +
        "transcript before anything is submitted. Participation is voluntary and " +
        "you can stop at any time before submission.",
    ),
  );
  const agree = el("button", "primary", "I agree, continue");
  agree.addEventListener("click", () => onConsent(true));
  const decline = el("button", "", "I do not agree");
  decline.addEventListener("click", () => onConsent(false));
  page.append(agree, decline);
  clear(root).append(page);
}

export function renderScreening(
  root: HTMLElement,
  items: SurveyItem[],
  onSubmit: (answers: { age_18_plus: boolean; fluent_english: boolean; ai_use: string }) => void,
): void {
  const page = el("section", "page screening-page");
  page.append(el("h1", "", "A few quick questions"));
  const selects: HTMLSelectElement[] = [];
  for (const item of items) {
    const field = el("div", "field");
    field.append(el("label", "", item.prompt));
    const select = el("select");
    select.append(new Option("Select...", ""));
    for (const option of item.options ?? []) select.append(new Option(option, option));
    field.append(select);
    selects.push(select);
    page.append(field);
  }
  const toAiUse = (label: string): string => {
    if (label.startsWith("I have used AI during")) return "used_during";
    if (label.startsWith("I have used AI to prepare")) return "used_to_prepare";
    if (label.startsWith("I have used AI both")) return "both";
    if (label.startsWith("I have not")) return "not_used";
    return "other";
  };
  const submit = el("button", "primary", "Continue");
  submit.addEventListener("click", () => {
    if (selects.some((s) => !s.value)) return;
    onSubmit({
      age_18_plus: selects[0]!.value === "Yes",
      fluent_english: selects[1]!.value === "Yes",
      ai_use: toAiUse(selects[2]!.value),
    });
  });
  page.append(submit);
  clear(root).append(page);
}

export function renderScreenedOut(root: HTMLElement): void {
  const page = el("section", "page");
  page.append(
    el("h1", "", "Thanks for your interest"),
    el("p", "", "You do not qualify for this study. You may close this window."),
  );
  clear(root).append(page);
}

export function renderChat(
  root: HTMLElement,
  chat: ChatController,
  onComplete: () => void,
): void {
  const page = el("section", "page chat-page");
  const log = el("div", "chat-log");
  log.setAttribute("role", "log");
  const composerRow = el("div", "composer-row");
  const composer = el("textarea", "composer");
  composer.placeholder = "Type your answer...";
  blockClipboardPaste(composer); // restriction scoped to the chat composer
  const send = el("button", "primary send-button", "Send");

  const sync = () => {
    clear(log);
    for (const turn of chat.transcript) {
      log.append(el("div", `bubble ${turn.role}`, turn.text));
    }
    if (chat.lastError) {
      const retry = el("div", "error-row", `Could not send: ${chat.lastError} `);
      const retryButton = el("button", "", "Retry");
      retryButton.addEventListener("click", () => void submit());
      retry.append(retryButton);
      log.append(retry);
    }
    send.disabled = !chat.sendEnabled;
    log.scrollTop = log.scrollHeight;
  };

  const submit = async () => {
    const response = await chat.send();
    composer.value = chat.composer;
    sync();
    if (response?.interview_complete) {
      if (chat.notice) window.alert(chat.notice); // the conspicuous hand-off notice
      onComplete();
    }
  };

  composer.addEventListener("input", () => {
    chat.setComposer(composer.value);
    send.disabled = !chat.sendEnabled;
  });
  send.addEventListener("click", () => void submit());
  composer.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      void submit();
    }
  });

  composerRow.append(composer, send);
  page.append(log, composerRow);
  clear(root).append(page);
  sync();
}

function renderMessageWithHighlights(
  container: HTMLElement,
  editing: EditingController,
  messageId: string,
  onSpanClick: (findingId: string) => void,
): void {
  clear(container);
  for (const segment of editing.segments(messageId)) {
    if (segment.pendingFindingId === null) {
      container.append(document.createTextNode(segment.text));
      continue;
    }
    const findingId = segment.pendingFindingId;
    const mark = el("mark", "pii-flag", segment.text);
    mark.dataset["findingId"] = findingId;
    mark.addEventListener("click", () => onSpanClick(findingId));
    container.append(mark);
  }
}

export function renderEditing(
  root: HTMLElement,
  editing: EditingController,
  notice: string | null,
  onDone: () => void,
): void {
  const page = el("section", "page editing-page");
  page.append(el("h1", "", "Review your transcript"));
  if (notice) {
    const banner = el("div", "notice", notice);
    const dismiss = el("button", "", "Got it");
    dismiss.addEventListener("click", () => banner.remove());
    banner.append(dismiss);
    page.append(banner);
  }

  const list = el("div", "message-list");
  const rerender = () => {
    clear(list);
    for (const message of editing.messages) {
      const row = el("div", `message-row ${message.role}`);
      const textBox = el("div", "message-text");
      renderMessageWithHighlights(textBox, editing, message.messageId, (findingId) => {
        editing.openCard(findingId);
        rerender();
        const card = list.querySelector(`[data-card="${findingId}"]`);
        card?.scrollIntoView({ block: "nearest" });
      });
      row.append(textBox);

      if (suggestionControlsVisible(editing.condition)) {
        for (const suggestion of message.suggestions) {
          const findingId = suggestion.finding.finding_id;
          if (editing.openCardFindingId === findingId) {
            const card = el("div", "issue-card");
            card.dataset["card"] = findingId;
            card.append(
              el("div", "issue-category", suggestion.finding.category),
              el("p", "issue-explanation", suggestion.finding.explanation || "Potentially identifying detail."),
              el("p", "issue-preview", `Replace: ${suggestion.replacement_text}`),
              el("p", "issue-preview", `Blur: ${suggestion.abstraction_text}`),
            );
            if (message.unresolvableFindingIds.includes(findingId)) {
              card.append(
                el("p", "issue-stale", "This span was edited away; the suggestion no longer applies."),
              );
            }
            const actions = el("div", "issue-actions");
            const mk = (label: string, decision: "accepted_placeholder" | "accepted_abstraction" | "ignored") => {
              const button = el("button", suggestion.decision === decision ? "active" : "", label);
              button.addEventListener("click", () => {
                void editing.decide(message.messageId, findingId, decision).then(rerender);
              });
              return button;
            };
            actions.append(
              mk("Accept placeholder", "accepted_placeholder"),
              mk("Accept blurred data", "accepted_abstraction"),
              mk("Ignore", "ignored"),
            );
            card.append(actions);
            row.append(card);
          } else if (suggestion.decision === "pending") {
            const jump = el("button", "warning-jump", "⚠");
            jump.title = "Open privacy issue";
            jump.addEventListener("click", () => {
              editing.openCard(findingId);
              rerender();
            });
            row.append(jump);
          }
        }
      }

      const editArea = el("textarea", "freeform-editor");
      editArea.value = editing.renderedText(message.messageId);
      const save = el("button", "", "Save edit");
      save.addEventListener("click", () => {
        void editing.editFreeform(message.messageId, editArea.value).then(rerender);
      });
      const editorRow = el("div", "freeform-row");
      editorRow.append(editArea, save);
      row.append(editorRow);
      list.append(row);
    }
  };
  rerender();

  const done = el("button", "primary", "Continue to survey");
  done.addEventListener("click", onDone);
  page.append(list, done);
  clear(root).append(page);
}

export function renderSurvey(
  root: HTMLElement,
  survey: SurveyController,
  askShareOriginal: boolean,
  onSubmit: (answers: Record<string, unknown>, shareOriginal: boolean) => void,
): void {
  const page = el("section", "page survey-page");
  page.append(el("h1", "", "A few final questions"));
  const submit = el("button", "primary", "Submit");
  const refresh = () => {
    submit.disabled = !survey.canSubmit;
  };

  for (const item of survey.items) {
    const field = el("div", "field");
    field.append(el("label", "", item.prompt));
    if (item.type === "likert") {
      const row = el("div", "likert-row");
      for (let value = survey.scale.min; value <= survey.scale.max; value++) {
        const button = el("button", "likert", String(value));
        button.title = survey.scale.labels[String(value)] ?? String(value);
        button.addEventListener("click", () => {
          survey.setAnswer(item.id, value);
          row.querySelectorAll("button").forEach((b) => b.classList.remove("active"));
          button.classList.add("active");
          refresh();
        });
        row.append(button);
      }
      field.append(row);
    } else if (item.type === "choice") {
      const select = el("select");
      select.append(new Option("Select...", ""));
      for (const option of item.options ?? []) select.append(new Option(option, option));
      select.addEventListener("change", () => {
        if (select.value) survey.setAnswer(item.id, select.value);
        refresh();
      });
      field.append(select);
    } else {
      const area = el("textarea", "survey-text"); // paste allowed here
      area.addEventListener("input", () => {
        survey.setAnswer(item.id, area.value);
        refresh();
      });
      survey.setAnswer(item.id, "");
      field.append(area);
    }
    page.append(field);
  }

  let shareOriginal = false;
  if (askShareOriginal) {
    const field = el("div", "field consent-share");
    const label = el("label");
    const checkbox = el("input");
    checkbox.type = "checkbox";
    checkbox.addEventListener("change", () => {
      shareOriginal = checkbox.checked;
    });
    label.append(
      checkbox,
      document.createTextNode(
        " I agree to share my original (pre-edit) transcript with the research team " +
          "in addition to the edited version.",
      ),
    );
    field.append(label);
    page.append(field);
  }

  submit.addEventListener("click", () => {
    if (survey.canSubmit) onSubmit(survey.payload(), shareOriginal);
  });
  refresh();
  page.append(submit);
  clear(root).append(page);
}

export function renderDone(root: HTMLElement): void {
  const page = el("section", "page");
  page.append(
    el("h1", "", "All done"),
    el("p", "", "Your responses have been submitted. Thank you for participating."),
  );
  clear(root).append(page);
}

export function conditionAllowsEditing(condition: Condition): boolean {
  return condition !== "control";
}

export { SessionApi };
