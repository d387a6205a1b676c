/** Facilitator dashboard state.
 *
 * Everything shown is a pass-through of API payloads: progress rows,
 * completion figures, and report entries keep the server's values and
 * ordering. Closing an assessment is a two-step action; the confirm
 * step cannot be skipped.
 */

import { ApiError, FacilitatorApi } from "./api.js";
import type {
  AssessmentSummary,
  ProgressSnapshot,
  Report,
} from "./types.js";

export interface DashboardView {
  assessments: AssessmentSummary[];
  selectedId: string | null;
  selected: AssessmentSummary | null;
  progress: ProgressSnapshot | null;
  report: Report | null;
  /** Set while a close is awaiting explicit confirmation. */
  confirmingClose: boolean;
  busy: boolean;
  /** Last API failure, verbatim: "<code>: <message>". */
  error: string | null;
}

const emptyView: DashboardView = {
  assessments: [],
  selectedId: null,
  selected: null,
  progress: null,
  report: null,
  confirmingClose: false,
  busy: false,
  error: null,
};

export class DashboardModel {
  private view: DashboardView = { ...emptyView };

  constructor(
    private readonly api: FacilitatorApi,
    private readonly onChange: (view: DashboardView) => void,
  ) {}

  current(): DashboardView {
    return this.view;
  }

  async loadAssessments(): Promise<void> {
    await this.guard(async () => {
      const listing = await this.api.listAssessments();
      this.patch({ assessments: listing.assessments });
      if (this.view.selectedId) {
        const still = listing.assessments.find((a) => a.id === this.view.selectedId);
        this.patch({ selected: still ?? null });
      }
    });
  }

  async select(assessmentId: string): Promise<void> {
    this.patch({
      selectedId: assessmentId,
      report: null,
      progress: null,
      confirmingClose: false,
    });
    await this.refreshSelected();
  }

  /** Re-fetch the selected assessment and its progress snapshot. */
  async refreshSelected(): Promise<void> {
    const id = this.view.selectedId;
    if (!id) {
      return;
    }
    await this.guard(async () => {
      const selected = await this.api.getAssessment(id);
      const progress = await this.api.progress(id);
      this.patch({ selected, progress });
    });
  }

  async open(): Promise<void> {
    const id = this.requireSelection();
    await this.guard(async () => {
      const selected = await this.api.open(id);
      this.patch({ selected });
      await this.refreshSelected();
    });
  }

  /** First step of closing: ask, do not act. */
  requestClose(): void {
    this.requireSelection();
    this.patch({ confirmingClose: true });
  }

  cancelClose(): void {
    this.patch({ confirmingClose: false });
  }

  /** Second step: only callable after requestClose. */
  async confirmClose(): Promise<void> {
    const id = this.requireSelection();
    if (!this.view.confirmingClose) {
      throw new Error("close must be requested before it can be confirmed");
    }
    this.patch({ confirmingClose: false });
    await this.guard(async () => {
      const selected = await this.api.close(id);
      this.patch({ selected });
      await this.refreshSelected();
    });
  }

  /** Build the report on the server, then show it as returned. */
  async buildReport(): Promise<void> {
    const id = this.requireSelection();
    await this.guard(async () => {
      const report = await this.api.buildReport(id);
      this.patch({ report });
      await this.refreshSelected();
    });
  }

  async loadReport(): Promise<void> {
    const id = this.requireSelection();
    await this.guard(async () => {
      const report = await this.api.getReport(id);
      this.patch({ report });
    });
  }

  private requireSelection(): string {
    const id = this.view.selectedId;
    if (!id) {
      throw new Error("no assessment selected");
    }
    return id;
  }

  private async guard(action: () => Promise<void>): Promise<void> {
    this.patch({ busy: true, error: null });
    try {
      await action();
    } catch (error) {
      const message =
        error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      this.patch({ error: message });
    } finally {
      this.patch({ busy: false });
    }
  }

  private patch(changes: Partial<DashboardView>): void {
    this.view = { ...this.view, ...changes };
    this.onChange(this.view);
  }
}
