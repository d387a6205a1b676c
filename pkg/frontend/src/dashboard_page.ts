/** DOM wiring for the facilitator dashboard.
 *
 * Tables and the report view are rebuilt from each API payload in the
 * payload's own order. Numeric cells carry the unformatted value in a
 * data attribute (data-completion, data-value) so fidelity against the
 * API can be checked without parsing display text.
 */

import { FacilitatorApi } from "./api.js";
import { DashboardModel, DashboardView } from "./dashboard.js";
import type { ReportProcess } from "./types.js";

export type FacilitatorApiFactory = (key: string) => FacilitatorApi;

export interface DashboardPageOptions {
  document: Document;
  apiFactory?: FacilitatorApiFactory;
  /** Progress poll interval; 0 disables polling. */
  refreshMs?: number;
  setIntervalImpl?: (callback: () => void, ms: number) => unknown;
}

function sameOriginFactory(key: string): FacilitatorApi {
  return new FacilitatorApi("", key);
}

export class DashboardPage {
  readonly document: Document;
  private readonly apiFactory: FacilitatorApiFactory;
  private readonly refreshMs: number;
  private readonly setIntervalImpl: (callback: () => void, ms: number) => unknown;
  model: DashboardModel | null = null;
  private polling = false;

  constructor(options: DashboardPageOptions) {
    this.document = options.document;
    this.apiFactory = options.apiFactory ?? sameOriginFactory;
    this.refreshMs = options.refreshMs ?? 5000;
    this.setIntervalImpl =
      options.setIntervalImpl ?? ((callback, ms) => setInterval(callback, ms));
  }

  mount(): void {
    const form = this.element<HTMLFormElement>("key-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.connect();
    });
    this.element("open-btn").addEventListener("click", () => {
      void this.model?.open();
    });
    this.element("close-btn").addEventListener("click", () => {
      this.model?.requestClose();
    });
    this.element("close-confirm-btn").addEventListener("click", () => {
      void this.model?.confirmClose();
    });
    this.element("close-cancel-btn").addEventListener("click", () => {
      this.model?.cancelClose();
    });
    this.element("report-btn").addEventListener("click", () => {
      void this.model?.buildReport();
    });
    this.element("report-view-btn").addEventListener("click", () => {
      void this.model?.loadReport();
    });
  }

  async connect(): Promise<void> {
    const key = this.element<HTMLInputElement>("facilitator-key").value.trim();
    if (!key) {
      return;
    }
    this.model = new DashboardModel(this.apiFactory(key), (view) => this.render(view));
    await this.model.loadAssessments();
    this.show("key-panel", false);
    this.show("dashboard-panel", true);
    this.startPolling();
  }

  private startPolling(): void {
    if (this.polling || this.refreshMs <= 0) {
      return;
    }
    this.polling = true;
    this.setIntervalImpl(() => {
      void this.model?.refreshSelected();
    }, this.refreshMs);
  }

  render(view: DashboardView): void {
    this.setText("dashboard-error", view.error ?? "");
    this.show("dashboard-error", view.error !== null);
    this.renderList(view);
    this.renderSelected(view);
    this.renderProgress(view);
    this.renderReport(view);
  }

  private renderList(view: DashboardView): void {
    const list = this.element("assessment-list");
    list.textContent = "";
    for (const assessment of view.assessments) {
      const item = this.document.createElement("li");
      const link = this.document.createElement("a");
      link.href = "#";
      link.textContent = `${assessment.id} (${assessment.org_profile}) [${assessment.state}]`;
      link.dataset["assessmentId"] = assessment.id;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        void this.model?.select(assessment.id);
      });
      item.appendChild(link);
      list.appendChild(item);
    }
  }

  private renderSelected(view: DashboardView): void {
    const selected = view.selected;
    this.show("selected-panel", selected !== null);
    if (!selected) {
      return;
    }
    this.setText("selected-id", selected.id);
    this.setText("selected-org", selected.org_profile);
    this.setText("selected-state", selected.state);
    this.setText(
      "selected-processes",
      selected.processes.map((p) => `${p.name} (${p.id})`).join(", "),
    );
    this.setText("selected-target", String(selected.target_level));
    this.element<HTMLButtonElement>("open-btn").disabled = selected.state !== "Draft";
    this.element<HTMLButtonElement>("close-btn").disabled = selected.state !== "Open";
    this.show("close-confirm", view.confirmingClose);
    const reportable = selected.state === "Closed" || selected.state === "Reported";
    this.element<HTMLButtonElement>("report-btn").disabled = !reportable;
    this.element<HTMLButtonElement>("report-view-btn").disabled =
      selected.state !== "Reported";
  }

  private renderProgress(view: DashboardView): void {
    const snapshot = view.progress;
    this.show("progress-panel", snapshot !== null);
    if (!snapshot) {
      return;
    }
    const total = this.element("progress-total");
    total.textContent = `${snapshot.answered} of ${snapshot.allocated} answers in`;
    total.dataset["completion"] = String(snapshot.completion);
    const body = this.element("progress-rows");
    body.textContent = "";
    for (const participant of snapshot.participants) {
      const row = this.document.createElement("tr");
      row.dataset["participantId"] = participant.participant_id;
      const name = this.document.createElement("td");
      name.textContent = participant.display_name;
      row.appendChild(name);
      const perProcess = this.document.createElement("td");
      perProcess.textContent = participant.per_process
        .map((p) => `${p.process_id} ${p.answered}/${p.allocated}`)
        .join(", ");
      row.appendChild(perProcess);
      const completion = this.document.createElement("td");
      completion.textContent = `${participant.answered}/${participant.allocated}`;
      completion.dataset["completion"] = String(participant.completion);
      row.appendChild(completion);
      body.appendChild(row);
    }
  }

  private renderReport(view: DashboardView): void {
    const report = view.report;
    this.show("report-panel", report !== null);
    if (!report) {
      return;
    }
    this.setText("report-org", report.assessment.org_profile);
    this.setText("report-meta",
      `${report.summary.participant_count} participants, `
      + `${report.summary.response_count} responses`);
    const profile = this.element("capability-profile");
    profile.textContent = "";
    for (const entry of report.summary.capability_profile) {
      const row = this.document.createElement("div");
      row.className = "profile-row";
      const label = this.document.createElement("span");
      label.className = "profile-label";
      label.textContent = entry.process_name;
      const bar = this.document.createElement("div");
      bar.className = "profile-bar";
      bar.style.width = `${(entry.capability_level / 5) * 100}%`;
      const value = this.document.createElement("span");
      value.className = "profile-value";
      value.textContent = `CL${entry.capability_level}`;
      value.dataset["value"] = String(entry.capability_level);
      row.appendChild(label);
      row.appendChild(bar);
      row.appendChild(value);
      profile.appendChild(row);
    }
    const sections = this.element("report-processes");
    sections.textContent = "";
    for (const process of report.processes) {
      sections.appendChild(this.renderReportProcess(process));
    }
  }

  private renderReportProcess(process: ReportProcess): HTMLElement {
    const section = this.document.createElement("section");
    section.dataset["processId"] = process.process_id;
    const heading = this.document.createElement("h3");
    heading.textContent = `${process.process_name}: CL${process.capability_level}`;
    section.appendChild(heading);
    const table = this.document.createElement("table");
    table.className = "attribute-table";
    const head = this.document.createElement("tr");
    for (const column of ["Attribute", "Rating", "Mean", "CV", "Responses"]) {
      const cell = this.document.createElement("th");
      cell.textContent = column;
      head.appendChild(cell);
    }
    table.appendChild(head);
    for (const attr of process.attribute_results) {
      const row = this.document.createElement("tr");
      row.dataset["attribute"] = attr.attribute;
      const cells = [
        attr.attribute,
        attr.rating + (attr.low_reliability ? " (low reliability)" : ""),
        attr.mean_percent === null ? "-" : String(attr.mean_percent),
        attr.cv === null ? "-" : String(attr.cv),
        String(attr.response_count),
      ];
      for (const text of cells) {
        const cell = this.document.createElement("td");
        cell.textContent = text;
        row.appendChild(cell);
      }
      table.appendChild(row);
    }
    section.appendChild(table);
    const list = this.document.createElement("ol");
    list.className = "entry-list";
    for (const entry of process.entries) {
      const item = this.document.createElement("li");
      item.dataset["questionId"] = entry.question_id;
      const score = this.document.createElement("span");
      score.className = "entry-score";
      score.textContent = `[${entry.band}]`;
      score.dataset["value"] = String(entry.knowledge_score);
      item.appendChild(score);
      const body = this.document.createElement("span");
      let text = ` ${entry.question_id}: ${entry.observation}`;
      if (!entry.guidance_missing && entry.recommendation) {
        text += ` Recommended: ${entry.recommendation}`;
      }
      body.textContent = text;
      item.appendChild(body);
      list.appendChild(item);
    }
    section.appendChild(list);
    return section;
  }

  private element<T extends HTMLElement = HTMLElement>(id: string): T {
    const node = this.document.getElementById(id);
    if (!node) {
      throw new Error(`missing #${id} in dashboard markup`);
    }
    return node as T;
  }

  private setText(id: string, text: string): void {
    this.element(id).textContent = text;
  }

  private show(id: string, visible: boolean): void {
    this.element(id).hidden = !visible;
  }
}
