/** Respondent survey session.
 *
 * Local state is optimistic: picking an answer marks the question
 * pending and queues a submit; only a server acknowledgement marks it
 * answered. The completion figure shown to the participant is the
 * server's own number, fetched after every acknowledged sync, never
 * computed here.
 */
import { ApiError, NetworkError } from "./api.js";
const defaultScheduler = (callback, delayMs) => {
    setTimeout(callback, delayMs);
};
export class SurveySession {
    constructor(api, onChange, retryDelayMs = 2000, scheduler = defaultScheduler) {
        this.api = api;
        this.onChange = onChange;
        this.retryDelayMs = retryDelayMs;
        this.scheduler = scheduler;
        this.questions = [];
        this.byId = new Map();
        this.queue = new Map();
        this.flushing = false;
        this.retryScheduled = false;
        this.view = {
            loaded: false,
            state: null,
            readOnly: false,
            notice: null,
            participantName: null,
            questions: [],
            index: 0,
            pendingCount: 0,
            completion: null,
        };
    }
    current() {
        return this.view;
    }
    /** Fetch the allocation and any answers already on the server. */
    async load() {
        let questionnaire;
        try {
            questionnaire = await this.api.questionnaire();
        }
        catch (error) {
            this.fail(error, "could not load the questionnaire");
            return;
        }
        this.questions = [];
        this.byId.clear();
        for (const section of questionnaire.sections) {
            for (const question of section.questions) {
                const answered = questionnaire.answers[section.process_id]?.[question.id];
                const row = {
                    processId: section.process_id,
                    processName: section.process_name,
                    question,
                    answer: answered ?? null,
                    sync: answered ? "acked" : "unanswered",
                };
                this.questions.push(row);
                this.byId.set(question.id, row);
            }
        }
        const readOnly = questionnaire.state !== "Open";
        this.patch({
            loaded: true,
            state: questionnaire.state,
            readOnly,
            participantName: questionnaire.display_name,
            questions: [...this.questions],
            index: this.firstOpenIndex(),
            notice: readOnly
                ? `this survey is ${questionnaire.state.toLowerCase()}; answers are read-only`
                : null,
        });
        await this.refreshCompletion();
    }
    /** Record a local pick and queue it for the server. */
    answer(questionId, answer) {
        const row = this.byId.get(questionId);
        if (!row) {
            throw new Error(`question ${questionId} is not part of this allocation`);
        }
        if (this.view.readOnly) {
            this.patch({ notice: "the survey is no longer open; this answer was not sent" });
            return;
        }
        row.answer = answer;
        row.sync = "pending";
        this.queue.set(questionId, { answer, processId: row.processId });
        this.patch({ questions: [...this.questions], pendingCount: this.queue.size });
        void this.flush();
    }
    goTo(index) {
        if (index >= 0 && index < this.questions.length) {
            this.patch({ index });
        }
    }
    next() {
        this.goTo(this.view.index + 1);
    }
    previous() {
        this.goTo(this.view.index - 1);
    }
    /** Push queued answers until the queue drains or the server objects. */
    async flush() {
        if (this.flushing) {
            return;
        }
        this.flushing = true;
        try {
            while (this.queue.size > 0) {
                const [questionId, entry] = this.queue.entries().next().value;
                const row = this.byId.get(questionId);
                try {
                    await this.api.submit(questionId, entry.answer, entry.processId);
                }
                catch (error) {
                    if (error instanceof NetworkError) {
                        // Leave the queue untouched and retry later, visibly pending.
                        this.scheduleRetry();
                        return;
                    }
                    if (error instanceof ApiError && error.status === 409) {
                        if (row)
                            row.sync = "failed";
                        this.queue.clear();
                        this.patch({
                            readOnly: true,
                            notice: `submission rejected: ${error.message}`,
                            questions: [...this.questions],
                            pendingCount: 0,
                        });
                        await this.refreshCompletion();
                        return;
                    }
                    if (error instanceof ApiError && error.status === 401) {
                        if (row)
                            row.sync = "failed";
                        this.queue.clear();
                        this.patch({
                            readOnly: true,
                            notice: "this access token was not accepted; check your invitation",
                            questions: [...this.questions],
                            pendingCount: 0,
                        });
                        return;
                    }
                    // Some other server objection: surface it on this question only.
                    this.queue.delete(questionId);
                    if (row)
                        row.sync = "failed";
                    const message = error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
                    this.patch({
                        notice: `answer to ${questionId} rejected (${message})`,
                        questions: [...this.questions],
                        pendingCount: this.queue.size,
                    });
                    continue;
                }
                // Acknowledged. Later picks for the same question stay queued.
                const queued = this.queue.get(questionId);
                if (queued && queued.answer === entry.answer) {
                    this.queue.delete(questionId);
                }
                if (row && row.sync === "pending" && !this.queue.has(questionId)) {
                    row.sync = "acked";
                }
                this.patch({ questions: [...this.questions], pendingCount: this.queue.size });
            }
            await this.refreshCompletion();
        }
        finally {
            this.flushing = false;
        }
        // Picks made while the completion refresh was in flight bounced off
        // the flushing flag; drain them now.
        if (this.queue.size > 0 && !this.retryScheduled && !this.view.readOnly) {
            void this.flush();
        }
    }
    scheduleRetry() {
        if (this.retryScheduled) {
            return;
        }
        this.retryScheduled = true;
        this.patch({
            notice: `offline; ${this.queue.size} answer(s) queued, retrying`,
            pendingCount: this.queue.size,
        });
        this.scheduler(() => {
            this.retryScheduled = false;
            void this.flush();
        }, this.retryDelayMs);
    }
    async refreshCompletion() {
        try {
            const completion = await this.api.completion();
            this.patch({ completion });
        }
        catch {
            // Progress display is best-effort; answers are what matter.
        }
    }
    firstOpenIndex() {
        const index = this.questions.findIndex((q) => q.sync === "unanswered");
        return index === -1 ? 0 : index;
    }
    fail(error, context) {
        const message = error instanceof ApiError
            ? `${context} (${error.code}: ${error.message})`
            : `${context} (${String(error)})`;
        this.patch({ loaded: false, notice: message });
    }
    patch(changes) {
        this.view = { ...this.view, ...changes };
        this.onChange(this.view);
    }
}
