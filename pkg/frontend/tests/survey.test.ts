import { describe, expect, it, vi } from "vitest";
import { ParticipantApi, FetchLike } from "../src/api.js";
import { SurveySession, SurveyView } from "../src/survey.js";
import type {
  AnswerOption,
  AssessmentState,
  Questionnaire,
} from "../src/types.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** In-memory stand-in for the three participant endpoints. */
class FakeSurveyServer {
  state: AssessmentState = "Open";
  answers: Record<string, Record<string, AnswerOption>> = {};
  /** Completion row returned verbatim; the client must not second-guess it. */
  completionRow: Record<string, unknown> = {
    participant_id: "p01",
    display_name: "Avery",
    per_process: [],
    allocated: 9,
    answered: 0,
    completion: 0,
    zero_allocation: false,
    state: "Open",
  };
  submitAttempts = 0;
  failNextSubmits = 0;
  submitStatus: { status: number; code: string; message: string } | null = null;

  readonly fetch: FetchLike = async (url, init) => {
    if (url.endsWith("/questionnaire")) {
      return jsonResponse(this.questionnaire());
    }
    if (url.endsWith("/responses")) {
      this.submitAttempts += 1;
      if (this.failNextSubmits > 0) {
        this.failNextSubmits -= 1;
        throw new TypeError("fetch failed");
      }
      if (this.submitStatus) {
        const { status, code, message } = this.submitStatus;
        return jsonResponse({ code, message }, status);
      }
      const body = JSON.parse(String(init?.body)) as {
        question: string;
        answer: AnswerOption;
        process: string;
      };
      (this.answers[body.process] ??= {})[body.question] = body.answer;
      return jsonResponse({
        status: "recorded",
        question: body.question,
        process: body.process,
        answer: body.answer,
        submitted_at: "2026-03-01T12:00:00Z",
      });
    }
    if (url.endsWith("/completion")) {
      return jsonResponse(this.completionRow);
    }
    return jsonResponse({ code: "unknown", message: url }, 404);
  };

  questionnaire(): Questionnaire {
    return {
      assessment_id: "asm-1",
      state: this.state,
      participant_id: "p01",
      display_name: "Avery",
      sections: [
        {
          process_id: "SLM",
          process_name: "Service Level Management",
          questions: [
            { id: "SLM-Q1", attribute: "PA1.1", text: "first question" },
            { id: "SLM-Q2", attribute: "PA1.1", text: "second question" },
            { id: "SLM-Q3", attribute: "PA2.1", text: "third question" },
          ],
        },
      ],
      answers: this.answers,
    };
  }
}

interface Harness {
  server: FakeSurveyServer;
  session: SurveySession;
  view: () => SurveyView;
  retries: (() => void)[];
}

function makeSession(server = new FakeSurveyServer()): Harness {
  const api = new ParticipantApi("", "asm-1", "tok", server.fetch);
  const retries: (() => void)[] = [];
  let latest: SurveyView | null = null;
  const session = new SurveySession(
    api,
    (view) => {
      latest = view;
    },
    5,
    (callback) => {
      retries.push(callback);
    },
  );
  return {
    server,
    session,
    view: () => latest ?? session.current(),
    retries,
  };
}

describe("loading", () => {
  it("presents every allocated question and replays server answers", async () => {
    const { server, session, view } = makeSession();
    server.answers = { SLM: { "SLM-Q2": "L" } };
    await session.load();
    const v = view();
    expect(v.loaded).toBe(true);
    expect(v.readOnly).toBe(false);
    expect(v.questions.map((q) => q.question.id)).toEqual([
      "SLM-Q1",
      "SLM-Q2",
      "SLM-Q3",
    ]);
    expect(v.questions[1]!.answer).toBe("L");
    expect(v.questions[1]!.sync).toBe("acked");
    expect(v.questions[0]!.sync).toBe("unanswered");
    expect(v.index).toBe(0);
    expect(v.participantName).toBe("Avery");
  });

  it("marks a closed survey read-only before any answering", async () => {
    const { server, session, view } = makeSession();
    server.state = "Closed";
    await session.load();
    expect(view().readOnly).toBe(true);
    expect(view().notice).toContain("read-only");
    session.answer("SLM-Q1", "F");
    expect(server.submitAttempts).toBe(0);
    expect(view().questions[0]!.sync).toBe("unanswered");
  });

  it("reports a load failure with the server's code", async () => {
    const failing: FetchLike = async () =>
      jsonResponse({ code: "unauthorized", message: "bad token" }, 401);
    const api = new ParticipantApi("", "asm-1", "tok", failing);
    let latest: SurveyView | null = null;
    const session = new SurveySession(api, (v) => {
      latest = v;
    });
    await session.load();
    expect(latest!.loaded).toBe(false);
    expect(latest!.notice).toContain("unauthorized");
    expect(latest!.notice).toContain("bad token");
  });
});

describe("answer sync", () => {
  it("submits optimistically and displays the server completion verbatim", async () => {
    const { server, session, view } = makeSession();
    await session.load();
    // A figure the client could not derive from its own counts.
    server.completionRow = { ...server.completionRow, answered: 7, completion: 0.42 };
    session.answer("SLM-Q1", "F");
    expect(view().questions[0]!.sync).toBe("pending");
    await vi.waitFor(() => {
      expect(view().pendingCount).toBe(0);
      expect(view().questions[0]!.sync).toBe("acked");
    });
    expect(server.answers["SLM"]!["SLM-Q1"]).toBe("F");
    expect(view().completion!.completion).toBe(0.42);
    expect(view().completion!.answered).toBe(7);
  });

  it("re-displays what the server has after a fresh load", async () => {
    const first = makeSession();
    await first.session.load();
    first.session.answer("SLM-Q1", "P");
    first.session.answer("SLM-Q3", "N");
    await vi.waitFor(() => expect(first.view().pendingCount).toBe(0));

    const second = makeSession(first.server);
    await second.session.load();
    const v = second.view();
    expect(v.questions[0]!.answer).toBe("P");
    expect(v.questions[0]!.sync).toBe("acked");
    expect(v.questions[2]!.answer).toBe("N");
    expect(v.index).toBe(1);
  });

  it("refuses questions outside the allocation", async () => {
    const { session } = makeSession();
    await session.load();
    expect(() => session.answer("OTHER-Q9", "F")).toThrow(/not part of this allocation/);
  });

  it("keeps the latest pick when the same question changes twice", async () => {
    const { server, session, view } = makeSession();
    await session.load();
    session.answer("SLM-Q1", "N");
    session.answer("SLM-Q1", "F");
    await vi.waitFor(() => expect(view().pendingCount).toBe(0));
    expect(server.answers["SLM"]!["SLM-Q1"]).toBe("F");
    expect(view().questions[0]!.sync).toBe("acked");
  });
});

describe("failure handling", () => {
  it("keeps unsent answers visibly pending and retries on a schedule", async () => {
    const { server, session, view, retries } = makeSession();
    await session.load();
    server.failNextSubmits = 2;
    session.answer("SLM-Q1", "F");
    await vi.waitFor(() => expect(retries.length).toBe(1));
    expect(view().questions[0]!.sync).toBe("pending");
    expect(view().pendingCount).toBe(1);
    expect(view().notice).toContain("queued");
    expect(server.submitAttempts).toBe(1);

    retries[0]!();
    await vi.waitFor(() => expect(retries.length).toBe(2));
    expect(server.submitAttempts).toBe(2);
    expect(view().questions[0]!.sync).toBe("pending");

    retries[1]!();
    await vi.waitFor(() => expect(view().pendingCount).toBe(0));
    expect(view().questions[0]!.sync).toBe("acked");
    expect(server.submitAttempts).toBe(3);
    expect(server.answers["SLM"]!["SLM-Q1"]).toBe("F");
  });

  it("schedules at most one retry at a time", async () => {
    const { server, session, retries } = makeSession();
    await session.load();
    server.failNextSubmits = 10;
    session.answer("SLM-Q1", "F");
    session.answer("SLM-Q2", "F");
    session.answer("SLM-Q3", "F");
    await vi.waitFor(() => expect(retries.length).toBe(1));
    // Three queued answers, exactly one timer.
    expect(server.submitAttempts).toBe(1);
  });

  it("goes read-only with a visible rejection when the survey closed underneath", async () => {
    const { server, session, view } = makeSession();
    await session.load();
    server.submitStatus = {
      status: 409,
      code: "invalid_state",
      message: "assessment is Closed",
    };
    session.answer("SLM-Q1", "F");
    await vi.waitFor(() => expect(view().readOnly).toBe(true));
    expect(view().notice).toContain("submission rejected");
    expect(view().notice).toContain("assessment is Closed");
    expect(view().questions[0]!.sync).toBe("failed");
    expect(view().pendingCount).toBe(0);

    const attempts = server.submitAttempts;
    session.answer("SLM-Q2", "F");
    expect(server.submitAttempts).toBe(attempts);
    expect(view().notice).toContain("no longer open");
  });

  it("stops cleanly on a rejected token instead of retrying", async () => {
    const { server, session, view, retries } = makeSession();
    await session.load();
    server.submitStatus = { status: 401, code: "unauthorized", message: "unknown token" };
    session.answer("SLM-Q1", "F");
    await vi.waitFor(() => expect(view().readOnly).toBe(true));
    expect(view().notice).toContain("token");
    expect(retries.length).toBe(0);
    expect(server.submitAttempts).toBe(1);
  });

  it("surfaces a per-question rejection and keeps going", async () => {
    const { server, session, view } = makeSession();
    await session.load();
    server.submitStatus = {
      status: 422,
      code: "parse_error",
      message: "answer: unknown option",
    };
    session.answer("SLM-Q1", "F");
    await vi.waitFor(() => expect(view().questions[0]!.sync).toBe("failed"));
    expect(view().readOnly).toBe(false);
    expect(view().notice).toContain("parse_error");

    server.submitStatus = null;
    session.answer("SLM-Q2", "F");
    await vi.waitFor(() => expect(view().questions[1]!.sync).toBe("acked"));
  });
});

describe("navigation", () => {
  it("moves between questions and clamps at the edges", async () => {
    const { session, view } = makeSession();
    await session.load();
    session.next();
    expect(view().index).toBe(1);
    session.next();
    session.next();
    expect(view().index).toBe(2);
    session.previous();
    expect(view().index).toBe(1);
    session.goTo(0);
    expect(view().index).toBe(0);
    session.previous();
    expect(view().index).toBe(0);
  });
});
