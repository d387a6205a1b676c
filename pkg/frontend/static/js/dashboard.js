/** Facilitator dashboard state.
 *
 * Everything shown is a pass-through of API payloads: progress rows,
 * completion figures, and report entries keep the server's values and
 * ordering. Closing an assessment is a two-step action; the confirm
 * step cannot be skipped.
 */
import { ApiError } from "./api.js";
const emptyView = {
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
    constructor(api, onChange) {
        this.api = api;
        this.onChange = onChange;
        this.view = { ...emptyView };
    }
    current() {
        return this.view;
    }
    async loadAssessments() {
        await this.guard(async () => {
            const listing = await this.api.listAssessments();
            this.patch({ assessments: listing.assessments });
            if (this.view.selectedId) {
                const still = listing.assessments.find((a) => a.id === this.view.selectedId);
                this.patch({ selected: still ?? null });
            }
        });
    }
    async select(assessmentId) {
        this.patch({
            selectedId: assessmentId,
            report: null,
            progress: null,
            confirmingClose: false,
        });
        await this.refreshSelected();
    }
    /** Re-fetch the selected assessment and its progress snapshot. */
    async refreshSelected() {
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
    async open() {
        const id = this.requireSelection();
        await this.guard(async () => {
            const selected = await this.api.open(id);
            this.patch({ selected });
            await this.refreshSelected();
        });
    }
    /** First step of closing: ask, do not act. */
    requestClose() {
        this.requireSelection();
        this.patch({ confirmingClose: true });
    }
    cancelClose() {
        this.patch({ confirmingClose: false });
    }
    /** Second step: only callable after requestClose. */
    async confirmClose() {
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
    async buildReport() {
        const id = this.requireSelection();
        await this.guard(async () => {
            const report = await this.api.buildReport(id);
            this.patch({ report });
            await this.refreshSelected();
        });
    }
    async loadReport() {
        const id = this.requireSelection();
        await this.guard(async () => {
            const report = await this.api.getReport(id);
            this.patch({ report });
        });
    }
    requireSelection() {
        const id = this.view.selectedId;
        if (!id) {
            throw new Error("no assessment selected");
        }
        return id;
    }
    async guard(action) {
        this.patch({ busy: true, error: null });
        try {
            await action();
        }
        catch (error) {
            const message = error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
            this.patch({ error: message });
        }
        finally {
            this.patch({ busy: false });
        }
    }
    patch(changes) {
        this.view = { ...this.view, ...changes };
        this.onChange(this.view);
    }
}
