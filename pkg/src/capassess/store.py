"""Durable single-writer persistence for assessments.

Layout inside the data directory:

    events.log     append-only JSON lines, one event per line, fsynced
                   before any mutation is acknowledged
    snapshot.json  atomically replaced full-state snapshot (a loading
                   shortcut; the log alone can rebuild everything)
    store.lock     advisory lock; one process owns the store at a time

Recovery replays the snapshot plus the log tail through the same domain
functions used online, so whatever survives a crash still satisfies
every invariant. A half-written trailing line (torn by a crash) is
dropped; a torn line anywhere else means real corruption and loading
refuses. Reports are not stored: the log records the parameters of each
build and the report is reproduced from them on load, which keeps the
log small and guarantees rebuilds agree with the original.

The store binds to the fingerprint of the bank it was created with and
refuses to open against any other, since stored question ids would
silently change meaning.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Iterator

from filelock import FileLock, Timeout

from . import survey
from .bank import ContentBank
from .clock import now_iso
from .errors import (
    BankMismatch,
    DomainError,
    InvalidState,
    StoreError,
    StoreLocked,
    UnknownAssessment,
    ValidationError,
)
from .measurement import (
    DEFAULT_CV_THRESHOLD,
    DEFAULT_SCALE,
    ProcessResult,
    ScaleMapping,
    assess_process,
)
from .model import AnswerOption, CapabilityLevel, Role
from .reporting import AssessmentReport, build_report
from .survey import Assessment, AssessmentState, Assignment, Participant, Response

STORE_SCHEMA_VERSION = 1

EVENTS_FILE = "events.log"
SNAPSHOT_FILE = "snapshot.json"
LOCK_FILE = "store.lock"


def _scale_to_flat(scale: ScaleMapping) -> dict:
    return {
        "n_percent": scale.n_percent,
        "p_percent": scale.p_percent,
        "l_percent": scale.l_percent,
        "f_percent": scale.f_percent,
        "n_upper": scale.n_upper,
        "p_upper": scale.p_upper,
        "l_upper": scale.l_upper,
    }


def _assessment_to_dict(a: Assessment) -> dict:
    return {
        "id": a.id,
        "org_profile": a.org_profile,
        "processes": list(a.processes),
        "target_level": int(a.target_level),
        "bank_fingerprint": a.bank_fingerprint,
        "state": a.state.value,
        "created_at": a.created_at,
        "opened_at": a.opened_at,
        "closed_at": a.closed_at,
        "reported_at": a.reported_at,
        "participants": [
            {
                "id": p.id,
                "display_name": p.display_name,
                "token_hash": p.token_hash,
                "assignments": [
                    {"process": asg.process_id, "role": asg.role.value}
                    for asg in p.assignments
                ],
            }
            for p in a.participants.values()
        ],
        "responses": [
            {
                "participant": r.participant_id,
                "process": r.process_id,
                "question": r.question_id,
                "answer": r.answer.value,
                "submitted_at": r.submitted_at,
            }
            for _key, r in sorted(a.responses.items())
        ],
    }


def _assessment_from_dict(raw: dict) -> Assessment:
    a = Assessment(
        id=raw["id"],
        org_profile=raw["org_profile"],
        processes=tuple(raw["processes"]),
        target_level=CapabilityLevel(raw["target_level"]),
        bank_fingerprint=raw["bank_fingerprint"],
        state=AssessmentState(raw["state"]),
        created_at=raw["created_at"],
        opened_at=raw["opened_at"],
        closed_at=raw["closed_at"],
        reported_at=raw["reported_at"],
    )
    for p in raw["participants"]:
        a.participants[p["id"]] = Participant(
            id=p["id"],
            display_name=p["display_name"],
            token_hash=p["token_hash"],
            assignments=tuple(
                Assignment(asg["process"], Role(asg["role"])) for asg in p["assignments"]
            ),
        )
    for r in raw["responses"]:
        response = Response(
            participant_id=r["participant"],
            process_id=r["process"],
            question_id=r["question"],
            answer=AnswerOption(r["answer"]),
            submitted_at=r["submitted_at"],
        )
        a.responses[(response.participant_id, response.process_id, response.question_id)] = response
    return a


class Store:
    """Owns the data directory and serializes every mutation.

    Thread-safe: a single re-entrant lock covers all public methods,
    which is plenty for the tens-of-participants scale this serves.
    Use as a context manager or call close() so the advisory file lock
    is released promptly.
    """

    def __init__(self, data_dir: str | Path, bank: ContentBank, lock_timeout: float = 0.0):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.bank = bank
        self.assessments: dict[str, Assessment] = {}
        self._report_params: dict[str, dict] = {}
        self._reports: dict[str, AssessmentReport] = {}
        self._seq = 0
        self._mutex = threading.RLock()

        self._flock = FileLock(str(self.data_dir / LOCK_FILE))
        try:
            self._flock.acquire(timeout=lock_timeout)
        except Timeout:
            raise StoreLocked(
                f"{self.data_dir} is in use by another process (service running?)"
            ) from None

        try:
            self._load()
            self._events_fh = open(self.data_dir / EVENTS_FILE, "a", encoding="utf-8")
            if self._seq == 0:
                self._append({
                    "type": "store_initialized",
                    "schema_version": STORE_SCHEMA_VERSION,
                    "bank_fingerprint": self.bank.fingerprint,
                    "ts": now_iso(),
                })
        except BaseException:
            self._flock.release()
            raise

    # -- lifecycle -----------------------------------------------------------

    def close(self) -> None:
        with self._mutex:
            if self._events_fh is not None:
                self.write_snapshot()
                self._events_fh.close()
                self._events_fh = None
            if self._flock.is_locked:
                self._flock.release()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    # -- loading ---------------------------------------------------------------

    def _load(self) -> None:
        snapshot_path = self.data_dir / SNAPSHOT_FILE
        if snapshot_path.exists():
            try:
                snapshot = json.loads(snapshot_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise StoreError(f"unreadable snapshot: {exc}") from None
            if snapshot.get("schema_version") != STORE_SCHEMA_VERSION:
                raise StoreError(
                    f"snapshot schema_version {snapshot.get('schema_version')!r} not supported"
                )
            if snapshot["bank_fingerprint"] != self.bank.fingerprint:
                raise BankMismatch(
                    "store was created with a different question bank; "
                    "point it at the original bank file"
                )
            self._seq = snapshot["seq"]
            for raw in snapshot["assessments"]:
                self.assessments[raw["id"]] = _assessment_from_dict(raw)
            self._report_params = dict(snapshot.get("report_params", {}))

        for event in self._read_events():
            seq = event.get("seq")
            if not isinstance(seq, int):
                raise StoreError(f"event without sequence number: {event}")
            if seq <= self._seq:
                continue
            if seq != self._seq + 1:
                raise StoreError(f"event log gap: expected {self._seq + 1}, found {seq}")
            self._apply(event)
            self._seq = seq

        for assessment_id in self._report_params:
            self._rebuild_report(assessment_id)

    def _read_events(self) -> Iterator[dict]:
        events_path = self.data_dir / EVENTS_FILE
        if not events_path.exists():
            return
        raw = events_path.read_bytes()
        offset = 0
        while offset < len(raw):
            newline = raw.find(b"\n", offset)
            if newline < 0:
                # Torn trailing line from an interrupted write: drop it so
                # the next append starts on a clean boundary.
                with open(events_path, "rb+") as fh:
                    fh.truncate(offset)
                return
            line = raw[offset:newline]
            offset = newline + 1
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError:
                if offset >= len(raw):
                    with open(events_path, "rb+") as fh:
                        fh.truncate(offset - len(line) - 1)
                    return
                raise StoreError(
                    f"corrupt event at byte {offset - len(line) - 1} of {events_path}"
                ) from None

    def _apply(self, event: dict) -> None:
        kind = event.get("type")
        try:
            if kind == "store_initialized":
                if event["bank_fingerprint"] != self.bank.fingerprint:
                    raise BankMismatch(
                        "store was created with a different question bank; "
                        "point it at the original bank file"
                    )
            elif kind == "assessment_created":
                a = survey.create_assessment(
                    self.bank,
                    event["org_profile"],
                    event["processes"],
                    CapabilityLevel(event["target_level"]),
                    assessment_id=event["id"],
                    now=event["ts"],
                )
                if a.id in self.assessments:
                    raise ValidationError(f"assessment id taken: {a.id}")
                self.assessments[a.id] = a
            elif kind == "participant_registered":
                a = self.assessment(event["assessment"])
                survey.register_participant(
                    a,
                    event["display_name"],
                    [(asg["process"], asg["role"]) for asg in event["assignments"]],
                    participant_id=event["participant"],
                    token_hash=event["token_hash"],
                )
            elif kind == "assessment_opened":
                survey.open_assessment(self.assessment(event["assessment"]), now=event["ts"])
            elif kind == "assessment_closed":
                survey.close_assessment(self.assessment(event["assessment"]), now=event["ts"])
            elif kind == "response_recorded":
                a = self.assessment(event["assessment"])
                survey.record_response(
                    self.bank,
                    a,
                    event["participant"],
                    event["question"],
                    AnswerOption(event["answer"]),
                    process_id=event["process"],
                    now=event["ts"],
                )
            elif kind == "report_built":
                assessment_id = event["assessment"]
                self.assessment(assessment_id)
                self._report_params[assessment_id] = {
                    "scale": event["scale"],
                    "cv_threshold": event["cv_threshold"],
                    "ts": event["ts"],
                }
            else:
                raise StoreError(f"unknown event type: {kind!r}")
        except BankMismatch:
            # Wrong bank is its own diagnosis, not log corruption.
            raise
        except DomainError as exc:
            raise StoreError(
                f"event {event.get('seq')} ({kind}) does not replay cleanly: {exc}"
            ) from exc

    def _rebuild_report(self, assessment_id: str) -> AssessmentReport:
        params = self._report_params[assessment_id]
        assessment = self.assessment(assessment_id)
        scale = ScaleMapping(**params["scale"])
        results = [
            assess_process(self.bank, assessment, pid, scale, params["cv_threshold"])
            for pid in assessment.processes
        ]
        report = build_report(
            assessment, results, self.bank, scale, params["cv_threshold"], now=params["ts"]
        )
        self._reports[assessment_id] = report
        return report

    # -- event writing ---------------------------------------------------------

    def _append(self, event: dict) -> None:
        if self._events_fh is None:
            raise StoreError("store is closed")
        self._seq += 1
        event = {"seq": self._seq, **event}
        line = json.dumps(event, ensure_ascii=False, separators=(",", ":"))
        self._events_fh.write(line + "\n")
        self._events_fh.flush()
        os.fsync(self._events_fh.fileno())

    def write_snapshot(self) -> None:
        """Atomically publish the current state as snapshot.json."""
        with self._mutex:
            snapshot = {
                "schema_version": STORE_SCHEMA_VERSION,
                "bank_fingerprint": self.bank.fingerprint,
                "seq": self._seq,
                "assessments": [
                    _assessment_to_dict(a) for _id, a in sorted(self.assessments.items())
                ],
                "report_params": self._report_params,
            }
            tmp_path = self.data_dir / (SNAPSHOT_FILE + ".tmp")
            with open(tmp_path, "w", encoding="utf-8") as fh:
                json.dump(snapshot, fh, ensure_ascii=False, indent=2)
                fh.write("\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp_path, self.data_dir / SNAPSHOT_FILE)

    # -- queries ---------------------------------------------------------------

    def assessment(self, assessment_id: str) -> Assessment:
        with self._mutex:
            try:
                return self.assessments[assessment_id]
            except KeyError:
                raise UnknownAssessment(assessment_id) from None

    def list_assessments(self) -> list[Assessment]:
        with self._mutex:
            return [self.assessments[k] for k in sorted(self.assessments)]

    def progress(self, assessment_id: str) -> survey.ProgressSnapshot:
        with self._mutex:
            return survey.progress(self.bank, self.assessment(assessment_id))

    def results(
        self,
        assessment_id: str,
        scale: ScaleMapping = DEFAULT_SCALE,
        cv_threshold: float = DEFAULT_CV_THRESHOLD,
    ) -> list[ProcessResult]:
        with self._mutex:
            assessment = self.assessment(assessment_id)
            return [
                assess_process(self.bank, assessment, pid, scale, cv_threshold)
                for pid in assessment.processes
            ]

    def report(self, assessment_id: str) -> AssessmentReport | None:
        with self._mutex:
            self.assessment(assessment_id)
            return self._reports.get(assessment_id)

    # -- mutations ---------------------------------------------------------------

    def create_assessment(
        self,
        org_profile: str,
        processes: list[str],
        target_level: CapabilityLevel = CapabilityLevel.CL5,
        assessment_id: str | None = None,
    ) -> Assessment:
        with self._mutex:
            ts = now_iso()
            a = survey.create_assessment(
                self.bank, org_profile, processes, target_level,
                assessment_id=assessment_id, now=ts,
            )
            if a.id in self.assessments:
                raise ValidationError(f"assessment id taken: {a.id}")
            self.assessments[a.id] = a
            self._append({
                "type": "assessment_created",
                "id": a.id,
                "org_profile": a.org_profile,
                "processes": list(a.processes),
                "target_level": int(a.target_level),
                "ts": ts,
            })
            self.write_snapshot()
            return a

    def register_participant(
        self,
        assessment_id: str,
        display_name: str,
        assignments: list[tuple[str, Role | str]],
        participant_id: str | None = None,
    ) -> tuple[Participant, str]:
        with self._mutex:
            a = self.assessment(assessment_id)
            participant, token = survey.register_participant(
                a, display_name, assignments, participant_id=participant_id
            )
            assert token is not None
            self._append({
                "type": "participant_registered",
                "assessment": assessment_id,
                "participant": participant.id,
                "display_name": participant.display_name,
                "token_hash": participant.token_hash,
                "assignments": [
                    {"process": asg.process_id, "role": asg.role.value}
                    for asg in participant.assignments
                ],
                "ts": now_iso(),
            })
            return participant, token

    def open_assessment(self, assessment_id: str) -> Assessment:
        with self._mutex:
            a = self.assessment(assessment_id)
            ts = now_iso()
            survey.open_assessment(a, now=ts)
            self._append({"type": "assessment_opened", "assessment": assessment_id, "ts": ts})
            self.write_snapshot()
            return a

    def close_assessment(self, assessment_id: str) -> Assessment:
        with self._mutex:
            a = self.assessment(assessment_id)
            ts = now_iso()
            survey.close_assessment(a, now=ts)
            self._append({"type": "assessment_closed", "assessment": assessment_id, "ts": ts})
            self.write_snapshot()
            return a

    def record_response(
        self,
        assessment_id: str,
        participant_id: str,
        question_id: str,
        answer: AnswerOption | str,
        process_id: str | None = None,
    ) -> Response:
        with self._mutex:
            a = self.assessment(assessment_id)
            ts = now_iso()
            response = survey.record_response(
                self.bank, a, participant_id, question_id, answer, process_id, now=ts
            )
            self._append({
                "type": "response_recorded",
                "assessment": assessment_id,
                "participant": response.participant_id,
                "process": response.process_id,
                "question": response.question_id,
                "answer": response.answer.value,
                "ts": ts,
            })
            return response

    def submit_response(
        self,
        assessment_id: str,
        token: str,
        question_id: str,
        answer: AnswerOption | str,
        process_id: str | None = None,
    ) -> Response:
        with self._mutex:
            a = self.assessment(assessment_id)
            if a.state is not AssessmentState.OPEN:
                raise InvalidState(f"assessment is {a.state.value}, not Open")
            participant = survey.resolve_token(a, token)
            return self.record_response(
                assessment_id, participant.id, question_id, answer, process_id
            )

    def build_report(
        self,
        assessment_id: str,
        scale: ScaleMapping = DEFAULT_SCALE,
        cv_threshold: float = DEFAULT_CV_THRESHOLD,
    ) -> AssessmentReport:
        with self._mutex:
            assessment = self.assessment(assessment_id)
            ts = (
                assessment.reported_at
                if assessment.state is AssessmentState.REPORTED
                else now_iso()
            )
            results = [
                assess_process(self.bank, assessment, pid, scale, cv_threshold)
                for pid in assessment.processes
            ]
            report = build_report(assessment, results, self.bank, scale, cv_threshold, now=ts)
            self._reports[assessment_id] = report
            self._report_params[assessment_id] = {
                "scale": _scale_to_flat(scale),
                "cv_threshold": cv_threshold,
                "ts": assessment.reported_at,
            }
            self._append({
                "type": "report_built",
                "assessment": assessment_id,
                "scale": _scale_to_flat(scale),
                "cv_threshold": cv_threshold,
                "ts": assessment.reported_at,
            })
            self.write_snapshot()
            return report


def resolve_participant(store: Store, assessment_id: str, token: str) -> Participant:
    """Token lookup for the service layer; AuthError when nothing matches."""
    return survey.resolve_token(store.assessment(assessment_id), token)
