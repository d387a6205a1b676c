/** DOM wiring for the respondent survey.
 *
 * One question on screen at a time, grouped under its process and
 * attribute. Keyboard: 1/2/3/4 pick N/P/L/F, u or 0 picks Unable,
 * arrow keys move between questions. Numbers on the progress bar are
 * the server's completion row; the exact value is also kept in
 * data-completion for anything that wants the unformatted figure.
 */

import { ParticipantApi } from "./api.js";
import { SurveySession, SurveyView } from "./survey.js";
import type { AnswerOption } from "./types.js";

export const ATTRIBUTE_BLURBS: Record<string, string> = {
  "PA1.1": "Process performance: the work produces its intended outcomes.",
  "PA2.1": "Performance management: the work is planned, monitored and adjusted.",
  "PA2.2": "Work product management: outputs are defined, reviewed and kept in order.",
  "PA3.1": "Process definition: a standard way of working exists and is maintained.",
  "PA3.2": "Process deployment: the standard way of working is used, with the resources it needs.",
  "PA4.1": "Quantitative analysis: measures describe how the process actually behaves.",
  "PA4.2": "Quantitative control: measures trigger corrections before results drift.",
  "PA5.1": "Process innovation: improvement targets come from analysing how the process performs.",
  "PA5.2": "Innovation implementation: changes are rolled out and their effect is checked.",
};

const ANSWER_KEYS: Record<string, AnswerOption> = {
  "1": "N",
  "2": "P",
  "3": "L",
  "4": "F",
  "0": "Unable",
  u: "Unable",
};

export type ParticipantApiFactory = (assessmentId: string, token: string) => ParticipantApi;

export interface SurveyPageOptions {
  document: Document;
  /** Defaults to a same-origin client, the shape used when the service
   *  serves the static bundle itself. */
  apiFactory?: ParticipantApiFactory;
  retryDelayMs?: number;
}

function sameOriginFactory(assessmentId: string, token: string): ParticipantApi {
  return new ParticipantApi("", assessmentId, token);
}

export class SurveyPage {
  readonly document: Document;
  private readonly apiFactory: ParticipantApiFactory;
  private readonly retryDelayMs: number;
  session: SurveySession | null = null;
  private lastView: SurveyView | null = null;

  constructor(options: SurveyPageOptions) {
    this.document = options.document;
    this.apiFactory = options.apiFactory ?? sameOriginFactory;
    this.retryDelayMs = options.retryDelayMs ?? 2000;
  }

  mount(): void {
    const form = this.element<HTMLFormElement>("connect-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.connect();
    });
    for (const button of Array.from(
      this.document.querySelectorAll<HTMLButtonElement>("[data-answer]"),
    )) {
      button.addEventListener("click", () => {
        this.pick(button.dataset["answer"] as AnswerOption);
      });
    }
    this.element("prev-btn").addEventListener("click", () => this.session?.previous());
    this.element("next-btn").addEventListener("click", () => this.session?.next());
    this.document.addEventListener("keydown", (event) => this.onKey(event as KeyboardEvent));
  }

  async connect(): Promise<void> {
    const assessmentId = this.inputValue("assessment-id");
    const token = this.inputValue("token");
    if (!assessmentId || !token) {
      this.setText("connect-error", "enter both the assessment id and your access token");
      this.show("connect-error", true);
      return;
    }
    this.show("connect-error", false);
    const api = this.apiFactory(assessmentId, token);
    this.session = new SurveySession(api, (view) => this.render(view), this.retryDelayMs);
    await this.session.load();
  }

  pick(answer: AnswerOption): void {
    const view = this.lastView;
    if (!this.session || !view || !view.loaded) {
      return;
    }
    const row = view.questions[view.index];
    if (row) {
      this.session.answer(row.question.id, answer);
    }
  }

  private onKey(event: KeyboardEvent): void {
    if (!this.lastView?.loaded) {
      return;
    }
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) {
      return;
    }
    const answer = ANSWER_KEYS[event.key.toLowerCase()];
    if (answer) {
      this.pick(answer);
      return;
    }
    if (event.key === "ArrowRight") {
      this.session?.next();
    } else if (event.key === "ArrowLeft") {
      this.session?.previous();
    }
  }

  render(view: SurveyView): void {
    this.lastView = view;
    this.show("connect-panel", !view.loaded);
    this.show("survey-panel", view.loaded);
    this.setText("notice", view.notice ?? "");
    this.show("notice", view.notice !== null);
    if (!view.loaded) {
      if (view.notice) {
        this.setText("connect-error", view.notice);
        this.show("connect-error", true);
      }
      return;
    }
    this.setText("participant-name", view.participantName ?? "");
    this.renderProgress(view);
    this.renderQuestion(view);
  }

  private renderProgress(view: SurveyView): void {
    const bar = this.element("progress-fill");
    const label = this.element("progress-text");
    const row = view.completion;
    if (row) {
      bar.style.width = `${row.completion * 100}%`;
      label.textContent = `${row.answered} of ${row.allocated} answered`;
      label.dataset["completion"] = String(row.completion);
    } else {
      bar.style.width = "0%";
      label.textContent = "progress unavailable";
      delete label.dataset["completion"];
    }
    const pending = this.element("pending-count");
    if (view.pendingCount > 0) {
      pending.textContent = `${view.pendingCount} answer(s) waiting to sync`;
      this.show("pending-count", true);
    } else {
      this.show("pending-count", false);
    }
  }

  private renderQuestion(view: SurveyView): void {
    const row = view.questions[view.index];
    if (!row) {
      return;
    }
    this.setText("process-name", row.processName);
    this.setText("attribute-id", row.question.attribute);
    this.setText("attribute-blurb", ATTRIBUTE_BLURBS[row.question.attribute] ?? "");
    this.setText("question-text", row.question.text);
    this.setText(
      "question-position",
      `Question ${view.index + 1} of ${view.questions.length}`,
    );
    const sync = this.element("sync-state");
    sync.textContent = row.sync;
    sync.dataset["sync"] = row.sync;
    for (const button of Array.from(
      this.document.querySelectorAll<HTMLButtonElement>("[data-answer]"),
    )) {
      button.disabled = view.readOnly;
      button.classList.toggle("selected", row.answer === button.dataset["answer"]);
    }
  }

  private element<T extends HTMLElement = HTMLElement>(id: string): T {
    const node = this.document.getElementById(id);
    if (!node) {
      throw new Error(`missing #${id} in survey markup`);
    }
    return node as T;
  }

  private inputValue(id: string): string {
    return this.element<HTMLInputElement>(id).value.trim();
  }

  private setText(id: string, text: string): void {
    this.element(id).textContent = text;
  }

  private show(id: string, visible: boolean): void {
    this.element(id).hidden = !visible;
  }
}
