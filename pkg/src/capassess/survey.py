"""Assessment lifecycle: registration, allocation, response capture.

An assessment walks Draft -> Open -> Closed -> Reported, each step at
most once. Participants register with one role per process; their
questionnaire is a pure function of the bank, their assignments and the
assessment's target level. Responses are upserts keyed by (participant,
process, question) until the assessment closes.

Participants authenticate with an opaque token generated at
registration. Only a hash of it is ever kept, so the token is shown
exactly once and cannot be recovered afterwards.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .bank import ContentBank, Question, questions_for
from .clock import now_iso
from .errors import (
    AuthError,
    BankMismatch,
    DuplicateRoleForProcess,
    EmptyProcessList,
    InvalidState,
    NotAllocated,
    UnknownParticipant,
    UnknownProcess,
    ValidationError,
)
from .model import AnswerOption, CapabilityLevel, ProcessRef, Role


class AssessmentState(str, Enum):
    DRAFT = "Draft"
    OPEN = "Open"
    CLOSED = "Closed"
    REPORTED = "Reported"


@dataclass(frozen=True)
class Assignment:
    """One (process, role) pair a participant answers for."""

    process_id: str
    role: Role


@dataclass(frozen=True)
class Participant:
    id: str
    display_name: str
    token_hash: str
    assignments: tuple[Assignment, ...]


@dataclass(frozen=True)
class Response:
    participant_id: str
    process_id: str
    question_id: str
    answer: AnswerOption
    submitted_at: str


@dataclass
class Assessment:
    """Mutable aggregate for one assessment run.

    Mutation happens only through the module functions below; they keep
    the state machine and the response/allocation invariants honest.
    """

    id: str
    org_profile: str
    processes: tuple[str, ...]
    target_level: CapabilityLevel
    bank_fingerprint: str
    state: AssessmentState = AssessmentState.DRAFT
    created_at: str = ""
    opened_at: str | None = None
    closed_at: str | None = None
    reported_at: str | None = None
    participants: dict[str, Participant] = field(default_factory=dict)
    responses: dict[tuple[str, str, str], Response] = field(default_factory=dict)

    def participant(self, participant_id: str) -> Participant:
        try:
            return self.participants[participant_id]
        except KeyError:
            raise UnknownParticipant(participant_id) from None


def hash_token(token: str) -> str:
    return hashlib.sha256(token.encode("utf-8")).hexdigest()


def _check_bank(assessment: Assessment, bank: ContentBank) -> None:
    if bank.fingerprint != assessment.bank_fingerprint:
        raise BankMismatch(
            "assessment was created against a different question bank "
            f"({assessment.bank_fingerprint[:12]}... vs {bank.fingerprint[:12]}...)"
        )


def create_assessment(
    bank: ContentBank,
    org_profile: str,
    processes: Sequence[str],
    target_level: CapabilityLevel = CapabilityLevel.CL5,
    assessment_id: str | None = None,
    now: str | None = None,
) -> Assessment:
    if not processes:
        raise EmptyProcessList("an assessment needs at least one process")
    seen: list[str] = []
    for pid in processes:
        if not bank.has_process(pid):
            raise UnknownProcess(pid)
        if pid in seen:
            raise ValidationError(f"process listed twice: {pid}")
        seen.append(pid)
    target_level = CapabilityLevel(target_level)
    if target_level is CapabilityLevel.CL0:
        raise ValidationError("target level must be at least 1")
    return Assessment(
        id=assessment_id or f"asm-{secrets.token_hex(4)}",
        org_profile=org_profile,
        processes=tuple(seen),
        target_level=target_level,
        bank_fingerprint=bank.fingerprint,
        created_at=now or now_iso(),
    )


def open_assessment(assessment: Assessment, now: str | None = None) -> None:
    if assessment.state is not AssessmentState.DRAFT:
        raise InvalidState(f"cannot open a {assessment.state.value} assessment")
    assessment.state = AssessmentState.OPEN
    assessment.opened_at = now or now_iso()


def close_assessment(assessment: Assessment, now: str | None = None) -> None:
    if assessment.state is not AssessmentState.OPEN:
        raise InvalidState(f"cannot close a {assessment.state.value} assessment")
    assessment.state = AssessmentState.CLOSED
    assessment.closed_at = now or now_iso()


def mark_reported(assessment: Assessment, now: str | None = None) -> None:
    """First report build moves Closed to Reported; rebuilds are no-ops."""
    if assessment.state is AssessmentState.REPORTED:
        return
    if assessment.state is not AssessmentState.CLOSED:
        raise InvalidState(f"cannot report a {assessment.state.value} assessment")
    assessment.state = AssessmentState.REPORTED
    assessment.reported_at = now or now_iso()


def register_participant(
    assessment: Assessment,
    display_name: str,
    assignments: Iterable[Assignment | tuple[str, Role | str]],
    participant_id: str | None = None,
    token_hash: str | None = None,
) -> tuple[Participant, str | None]:
    """Add a participant and hand back the one-time access token.

    Normal callers leave token_hash unset and receive the fresh token;
    it is the only moment the secret exists in plaintext. Replay from
    the event log passes the stored hash instead and gets None back.
    """
    if assessment.state not in (AssessmentState.DRAFT, AssessmentState.OPEN):
        raise InvalidState(
            f"cannot register once the assessment is {assessment.state.value}"
        )
    if not display_name.strip():
        raise ValidationError("display_name must be non-empty")

    normalized: list[Assignment] = []
    for entry in assignments:
        if not isinstance(entry, Assignment):
            process_id, role = entry
            entry = Assignment(process_id, Role(role))
        normalized.append(entry)
    if not normalized:
        raise ValidationError("a participant needs at least one assignment")

    claimed: set[str] = set()
    for assignment in normalized:
        if assignment.process_id not in assessment.processes:
            raise UnknownProcess(
                f"{assignment.process_id} is not part of this assessment"
            )
        if assignment.process_id in claimed:
            raise DuplicateRoleForProcess(
                f"participant already has a role on {assignment.process_id}"
            )
        claimed.add(assignment.process_id)

    pid = participant_id or f"p{len(assessment.participants) + 1:02d}"
    if pid in assessment.participants:
        raise ValidationError(f"participant id taken: {pid}")
    fresh: str | None = None
    if token_hash is None:
        fresh = secrets.token_urlsafe(32)
        token_hash = hash_token(fresh)
    participant = Participant(
        id=pid,
        display_name=display_name,
        token_hash=token_hash,
        assignments=tuple(normalized),
    )
    assessment.participants[pid] = participant
    return participant, fresh


def resolve_token(assessment: Assessment, token: str) -> Participant:
    digest = hash_token(token)
    for participant in assessment.participants.values():
        if secrets.compare_digest(participant.token_hash, digest):
            return participant
    raise AuthError("unknown access token")


def allocate_questionnaire(
    bank: ContentBank,
    assessment: Assessment,
    participant_id: str,
) -> tuple[tuple[ProcessRef, Question], ...]:
    """The participant's full question list, in presentation order.

    Sections follow the assessment's process order; within a section the
    order is the bank's canonical attribute-then-id order. Pure: calling
    it twice, or for two participants with equal assignments, gives
    identical sequences.
    """
    _check_bank(assessment, bank)
    participant = assessment.participant(participant_id)
    by_process = {a.process_id: a.role for a in participant.assignments}
    allocation: list[tuple[ProcessRef, Question]] = []
    for process_id in assessment.processes:
        role = by_process.get(process_id)
        if role is None:
            continue
        process = bank.process(process_id)
        for question in questions_for(bank, process_id, role, assessment.target_level):
            allocation.append((process, question))
    return tuple(allocation)


def record_response(
    bank: ContentBank,
    assessment: Assessment,
    participant_id: str,
    question_id: str,
    answer: AnswerOption | str,
    process_id: str | None = None,
    now: str | None = None,
) -> Response:
    """Store one answer on behalf of a known participant (no token check).

    This is the trusted path used by the event-log replay and the
    offline CLI; the service-facing submit_response wraps it with token
    resolution. process_id may be omitted when the question appears in
    exactly one of the participant's sections.
    """
    if assessment.state is not AssessmentState.OPEN:
        raise InvalidState(f"assessment is {assessment.state.value}, not Open")
    _check_bank(assessment, bank)
    participant = assessment.participant(participant_id)
    answer = AnswerOption(answer)

    allocation = allocate_questionnaire(bank, assessment, participant.id)
    matching = [proc.id for proc, q in allocation if q.id == question_id]
    if not matching:
        raise NotAllocated(f"{question_id} is not in this participant's questionnaire")
    if process_id is None:
        if len(matching) > 1:
            raise ValidationError(
                f"{question_id} appears in several sections ({', '.join(matching)}); "
                "say which process the answer is for"
            )
        process_id = matching[0]
    elif process_id not in matching:
        raise NotAllocated(
            f"{question_id} is not allocated to this participant for {process_id}"
        )

    response = Response(
        participant_id=participant.id,
        process_id=process_id,
        question_id=question_id,
        answer=answer,
        submitted_at=now or now_iso(),
    )
    assessment.responses[(participant.id, process_id, question_id)] = response
    return response


def submit_response(
    bank: ContentBank,
    assessment: Assessment,
    token: str,
    question_id: str,
    answer: AnswerOption | str,
    process_id: str | None = None,
    now: str | None = None,
) -> Response:
    """Token-authenticated answer submission (upsert until Close)."""
    if assessment.state is not AssessmentState.OPEN:
        raise InvalidState(f"assessment is {assessment.state.value}, not Open")
    participant = resolve_token(assessment, token)
    return record_response(
        bank, assessment, participant.id, question_id, answer, process_id, now
    )


@dataclass(frozen=True)
class ProcessProgress:
    process_id: str
    allocated: int
    answered: int

    @property
    def completion(self) -> float:
        return self.answered / self.allocated if self.allocated else 0.0

    def to_dict(self) -> dict:
        return {
            "process_id": self.process_id,
            "allocated": self.allocated,
            "answered": self.answered,
            "completion": self.completion,
        }


@dataclass(frozen=True)
class ParticipantProgress:
    participant_id: str
    display_name: str
    per_process: tuple[ProcessProgress, ...]

    @property
    def allocated(self) -> int:
        return sum(p.allocated for p in self.per_process)

    @property
    def answered(self) -> int:
        return sum(p.answered for p in self.per_process)

    @property
    def completion(self) -> float:
        return self.answered / self.allocated if self.allocated else 0.0

    @property
    def zero_allocation(self) -> bool:
        return self.allocated == 0

    def to_dict(self) -> dict:
        return {
            "participant_id": self.participant_id,
            "display_name": self.display_name,
            "per_process": [p.to_dict() for p in self.per_process],
            "allocated": self.allocated,
            "answered": self.answered,
            "completion": self.completion,
            "zero_allocation": self.zero_allocation,
        }


@dataclass(frozen=True)
class ProgressSnapshot:
    assessment_id: str
    state: AssessmentState
    participants: tuple[ParticipantProgress, ...]

    @property
    def allocated(self) -> int:
        return sum(p.allocated for p in self.participants)

    @property
    def answered(self) -> int:
        return sum(p.answered for p in self.participants)

    @property
    def completion(self) -> float:
        return self.answered / self.allocated if self.allocated else 0.0

    def to_dict(self) -> dict:
        return {
            "assessment_id": self.assessment_id,
            "state": self.state.value,
            "participants": [p.to_dict() for p in self.participants],
            "allocated": self.allocated,
            "answered": self.answered,
            "completion": self.completion,
        }


def progress(bank: ContentBank, assessment: Assessment) -> ProgressSnapshot:
    """Participation snapshot: who has answered how much, per process."""
    _check_bank(assessment, bank)
    rows: list[ParticipantProgress] = []
    for pid in sorted(assessment.participants):
        participant = assessment.participants[pid]
        allocation = allocate_questionnaire(bank, assessment, pid)
        per_process: list[ProcessProgress] = []
        for process_id in assessment.processes:
            allocated = sum(1 for proc, _q in allocation if proc.id == process_id)
            answered = sum(
                1
                for (r_pid, r_proc, _qid) in assessment.responses
                if r_pid == pid and r_proc == process_id
            )
            per_process.append(ProcessProgress(process_id, allocated, answered))
        rows.append(ParticipantProgress(pid, participant.display_name, tuple(per_process)))
    return ProgressSnapshot(assessment.id, assessment.state, tuple(rows))


def responses_for_process(
    assessment: Assessment, process_id: str
) -> list[tuple[str, AnswerOption]]:
    """(question id, answer) pairs for one process, in stable key order."""
    if process_id not in assessment.processes:
        raise UnknownProcess(f"{process_id} is not part of this assessment")
    pairs = []
    for key in sorted(assessment.responses):
        response = assessment.responses[key]
        if response.process_id == process_id:
            pairs.append((response.question_id, response.answer))
    return pairs
