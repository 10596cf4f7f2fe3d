/** Single-page flow driven by the server-side stage. */

import { SessionApi } from "./api.js";
import { ChatController } from "./chat.js";
import { EditingController } from "./editing.js";
import { SurveyController } from "./survey.js";
import type { Condition } from "./types.js";
import {
  conditionAllowsEditing,
  renderChat,
  renderConsent,
  renderDone,
  renderEditing,
  renderScreenedOut,
  renderScreening,
  renderSurvey,
} from "./views.js";

const api = new SessionApi();
let condition: Condition = "control";
let editingNotice: string | null = null;

function root(): HTMLElement {
  const node = document.getElementById("app");
  if (!node) throw new Error("missing #app root");
  return node;
}

async function startChat(): Promise<void> {
  const chat = new ChatController(api);
  const transcript = await api.transcript();
  chat.transcript = transcript.turns;
  renderChat(root(), chat, () => {
    editingNotice = chat.notice;
    if (conditionAllowsEditing(condition)) void startEditing();
    else void startSurvey();
  });
}

async function startEditing(): Promise<void> {
  const transcript = await api.transcript();
  const editing = new EditingController(condition, api);
  editing.load(transcript.turns, transcript.suggestions ?? [], transcript.manual_finals ?? {});
  renderEditing(root(), editing, editingNotice, () => void startSurvey());
}

async function startSurvey(): Promise<void> {
  const { items, likert_scale } = await api.surveyItems();
  const survey = new SurveyController(items, likert_scale);
  renderSurvey(root(), survey, conditionAllowsEditing(condition), (answers, shareOriginal) => {
    void api
      .survey(answers)
      .then(() => api.submit(shareOriginal))
      .then(() => renderDone(root()));
  });
}

async function boot(): Promise<void> {
  const info = await api.createSession();
  condition = info.condition;
  renderConsent(root(), (agreed) => {
    if (!agreed) {
      renderScreenedOut(root());
      return;
    }
    void api.consent(true).then(async () => {
      const { items } = await api.screeningItems();
      renderScreening(root(), items, (answers) => {
        void api.screening(answers).then(({ qualified }) => {
          if (qualified) void startChat();
          else renderScreenedOut(root());
        });
      });
    });
  });
}

void boot();
