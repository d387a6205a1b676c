"""HTTP front for the assessment lifecycle.

Two kinds of callers, two kinds of credentials, both sent as
``Authorization: Bearer <secret>``: the facilitator key steers
assessments and reads results; participant tokens (handed out once at
registration) may only fetch their own questionnaire, submit answers,
and check their own completion. Each side is rejected on the other's
endpoints, so a leaked participant token reads nothing but its own
survey.

Every mutation is persisted (fsynced) by the store before the response
goes out; killing the process mid-flight never loses an acknowledged
answer. Domain errors map onto 401/404/409/422 with a machine-readable
code in the body.
"""

from __future__ import annotations

import secrets
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse, Response as HTTPResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .bank import ContentBank
from .errors import (
    AuthError,
    DomainError,
    InvalidState,
    ParseError,
    UnknownAssessment,
    UnknownParticipant,
    ValidationError,
)
from .model import AnswerOption, CapabilityLevel, Role
from .reporting import render_report
from .store import Store
from .survey import (
    Assessment,
    Participant,
    allocate_questionnaire,
    progress as progress_snapshot,
    resolve_token,
)

STATUS_BY_ERROR: tuple[tuple[type[DomainError], int], ...] = (
    (AuthError, 401),
    (UnknownAssessment, 404),
    (UnknownParticipant, 404),
    (InvalidState, 409),
)


def _status_for(exc: DomainError) -> int:
    for error_type, status in STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 422


def _error_body(code: str, message: str) -> dict:
    return {"code": code, "message": message}


def _bearer_token(request: Request) -> str:
    header = request.headers.get("authorization", "")
    scheme, _, token = header.partition(" ")
    if scheme.lower() != "bearer" or not token.strip():
        raise AuthError("send 'Authorization: Bearer <secret>'")
    return token.strip()


def _assessment_body(a: Assessment, bank: ContentBank) -> dict:
    return {
        "id": a.id,
        "org_profile": a.org_profile,
        "processes": [
            {"id": pid, "name": bank.process(pid).name} for pid in a.processes
        ],
        "target_level": int(a.target_level),
        "state": a.state.value,
        "created_at": a.created_at,
        "opened_at": a.opened_at,
        "closed_at": a.closed_at,
        "reported_at": a.reported_at,
        "participant_count": len(a.participants),
        "response_count": len(a.responses),
    }


def create_app(store: Store, facilitator_key: str, webui_dir: str | None = None) -> FastAPI:
    """Wire the API over an already-open store."""
    if not facilitator_key:
        raise ValidationError("facilitator key must be non-empty")

    app = FastAPI(title="capassess", version=__version__, docs_url=None, redoc_url=None)
    bank = store.bank

    def require_facilitator(request: Request) -> None:
        token = _bearer_token(request)
        if not secrets.compare_digest(token, facilitator_key):
            raise AuthError("this endpoint needs the facilitator key")

    def require_participant(request: Request, assessment_id: str) -> Participant:
        token = _bearer_token(request)
        if secrets.compare_digest(token, facilitator_key):
            raise AuthError("participant endpoints reject the facilitator key")
        return resolve_token(store.assessment(assessment_id), token)

    @app.exception_handler(DomainError)
    async def on_domain_error(_request: Request, exc: DomainError) -> JSONResponse:
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc.code, exc.message))

    @app.get("/healthz")
    def healthz() -> dict:
        return {
            "status": "ok",
            "version": __version__,
            "bank_fingerprint": bank.fingerprint,
        }

    # -- facilitator endpoints -------------------------------------------------

    @app.post("/api/v1/assessments", status_code=201)
    def create_assessment(request: Request, payload: dict = Body(...)) -> dict:
        require_facilitator(request)
        org_profile = payload.get("org_profile")
        processes = payload.get("processes")
        if not isinstance(org_profile, str):
            raise ParseError("org_profile: expected a string")
        if not isinstance(processes, list) or not all(isinstance(p, str) for p in processes):
            raise ParseError("processes: expected a list of process ids")
        target_raw = payload.get("target_level", 5)
        if isinstance(target_raw, bool) or not isinstance(target_raw, int) \
                or not 1 <= target_raw <= 5:
            raise ParseError("target_level: expected an integer 1..5")
        assessment_id = payload.get("id")
        if assessment_id is not None and not isinstance(assessment_id, str):
            raise ParseError("id: expected a string")
        a = store.create_assessment(
            org_profile, processes, CapabilityLevel(target_raw), assessment_id
        )
        return _assessment_body(a, bank)

    @app.get("/api/v1/assessments")
    def list_assessments(request: Request) -> dict:
        require_facilitator(request)
        return {"assessments": [_assessment_body(a, bank) for a in store.list_assessments()]}

    @app.get("/api/v1/assessments/{assessment_id}")
    def get_assessment(request: Request, assessment_id: str) -> dict:
        require_facilitator(request)
        return _assessment_body(store.assessment(assessment_id), bank)

    @app.post("/api/v1/assessments/{assessment_id}/participants", status_code=201)
    def register_participant(request: Request, assessment_id: str,
                             payload: dict = Body(...)) -> dict:
        require_facilitator(request)
        display_name = payload.get("display_name")
        if not isinstance(display_name, str):
            raise ParseError("display_name: expected a string")
        raw_assignments = payload.get("assignments")
        if not isinstance(raw_assignments, list) or not raw_assignments:
            raise ParseError("assignments: expected a non-empty list")
        assignments: list[tuple[str, Role]] = []
        for i, entry in enumerate(raw_assignments):
            if not isinstance(entry, dict):
                raise ParseError(f"assignments[{i}]: expected an object")
            process = entry.get("process")
            role_raw = entry.get("role")
            if not isinstance(process, str):
                raise ParseError(f"assignments[{i}].process: expected a string")
            try:
                role = Role(role_raw)
            except ValueError:
                raise ParseError(
                    f"assignments[{i}].role: choose from {[r.value for r in Role]}"
                ) from None
            assignments.append((process, role))
        participant_id = payload.get("participant_id")
        if participant_id is not None and not isinstance(participant_id, str):
            raise ParseError("participant_id: expected a string")
        participant, token = store.register_participant(
            assessment_id, display_name, assignments, participant_id
        )
        return {
            "participant_id": participant.id,
            "display_name": participant.display_name,
            "assignments": [
                {"process": asg.process_id, "role": asg.role.value}
                for asg in participant.assignments
            ],
            "token": token,
        }

    @app.post("/api/v1/assessments/{assessment_id}/open")
    def open_assessment(request: Request, assessment_id: str) -> dict:
        require_facilitator(request)
        return _assessment_body(store.open_assessment(assessment_id), bank)

    @app.post("/api/v1/assessments/{assessment_id}/close")
    def close_assessment(request: Request, assessment_id: str) -> dict:
        require_facilitator(request)
        return _assessment_body(store.close_assessment(assessment_id), bank)

    @app.get("/api/v1/assessments/{assessment_id}/progress")
    def get_progress(request: Request, assessment_id: str) -> dict:
        require_facilitator(request)
        return store.progress(assessment_id).to_dict()

    @app.get("/api/v1/assessments/{assessment_id}/results")
    def get_results(request: Request, assessment_id: str) -> dict:
        require_facilitator(request)
        results = store.results(assessment_id)
        return {
            "assessment_id": assessment_id,
            "results": [r.to_dict() for r in results],
        }

    @app.post("/api/v1/assessments/{assessment_id}/report")
    def build_report(request: Request, assessment_id: str) -> dict:
        require_facilitator(request)
        return store.build_report(assessment_id).to_dict()

    @app.get("/api/v1/assessments/{assessment_id}/report", response_model=None)
    def get_report(request: Request, assessment_id: str):
        require_facilitator(request)
        report = store.report(assessment_id)
        if report is None:
            return JSONResponse(
                status_code=404,
                content=_error_body("report_not_built", "build the report first"),
            )
        return report.to_dict()

    @app.get("/api/v1/assessments/{assessment_id}/report.md", response_model=None)
    def get_report_markdown(request: Request, assessment_id: str):
        require_facilitator(request)
        report = store.report(assessment_id)
        if report is None:
            return JSONResponse(
                status_code=404,
                content=_error_body("report_not_built", "build the report first"),
            )
        return HTTPResponse(
            content=render_report(report, "markdown"),
            media_type="text/markdown; charset=utf-8",
        )

    # -- participant endpoints ----------------------------------------------------

    @app.get("/api/v1/assessments/{assessment_id}/questionnaire")
    def get_questionnaire(request: Request, assessment_id: str) -> dict:
        participant = require_participant(request, assessment_id)
        assessment = store.assessment(assessment_id)
        allocation = allocate_questionnaire(bank, assessment, participant.id)
        sections: list[dict] = []
        for process_id in assessment.processes:
            questions = [
                {"id": q.id, "attribute": q.attribute.id, "text": q.text}
                for proc, q in allocation if proc.id == process_id
            ]
            if questions:
                sections.append({
                    "process_id": process_id,
                    "process_name": bank.process(process_id).name,
                    "questions": questions,
                })
        answers: dict[str, dict[str, str]] = {}
        for (pid, process_id, question_id), response in assessment.responses.items():
            if pid == participant.id:
                answers.setdefault(process_id, {})[question_id] = response.answer.value
        return {
            "assessment_id": assessment.id,
            "state": assessment.state.value,
            "participant_id": participant.id,
            "display_name": participant.display_name,
            "sections": sections,
            "answers": answers,
        }

    @app.post("/api/v1/assessments/{assessment_id}/responses")
    def submit_response(request: Request, assessment_id: str,
                        payload: dict = Body(...)) -> dict:
        participant = require_participant(request, assessment_id)
        question = payload.get("question")
        answer = payload.get("answer")
        process = payload.get("process")
        if not isinstance(question, str):
            raise ParseError("question: expected a question id")
        if not isinstance(answer, str):
            raise ParseError("answer: expected one of N, P, L, F, Unable")
        if process is not None and not isinstance(process, str):
            raise ParseError("process: expected a process id")
        try:
            option = AnswerOption(answer)
        except ValueError:
            raise ParseError(f"answer: unknown option {answer!r}") from None
        response = store.record_response(
            assessment_id, participant.id, question, option, process
        )
        return {
            "status": "recorded",
            "question": response.question_id,
            "process": response.process_id,
            "answer": response.answer.value,
            "submitted_at": response.submitted_at,
        }

    @app.get("/api/v1/assessments/{assessment_id}/completion")
    def get_completion(request: Request, assessment_id: str) -> dict:
        participant = require_participant(request, assessment_id)
        snapshot = progress_snapshot(bank, store.assessment(assessment_id))
        for row in snapshot.participants:
            if row.participant_id == participant.id:
                return dict(row.to_dict(), state=snapshot.state.value)
        raise UnknownParticipant(participant.id)

    if webui_dir is not None:
        app.mount("/ui", StaticFiles(directory=webui_dir, html=True), name="webui")

    return app


def serve(
    bank: ContentBank,
    data_dir: str | Path,
    facilitator_key: str,
    host: str = "127.0.0.1",
    port: int = 8000,
    webui_dir: str | None = None,
) -> None:
    """Open the store, build the app, and block serving requests."""
    import uvicorn

    with Store(data_dir, bank) as store:
        app = create_app(store, facilitator_key, webui_dir)
        uvicorn.run(app, host=host, port=port, log_level="warning")
