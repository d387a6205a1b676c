"""Question bank and knowledge base: loading, validation, and queries.

The bank is a single UTF-8 JSON document with top-level fields
``schema_version``, ``processes``, ``questions`` and ``knowledge_items``.
A question's ``scope`` is either a declared process id (level-1 questions)
or ``null`` for generic questions that apply to every process. The formal
schema ships alongside the sample bank in ``capassess/data/bank.schema.json``.

Banks are immutable after load and safe to share across threads.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import IO, Union

from .errors import ParseError, UnknownProcess, ValidationError, VersionError
from .model import (
    ALL_ATTRIBUTES,
    CapabilityLevel,
    ProcessAttribute,
    ProcessRef,
    Role,
)

BANK_SCHEMA_VERSION = 1

BankSource = Union[str, Path, IO[str]]


@dataclass(frozen=True)
class KnowledgeItem:
    """Observation/recommendation pair attached to one question."""

    id: str
    observation: str
    recommendation: str


@dataclass(frozen=True)
class Question:
    """A close-ended assessment question tied to one process attribute.

    ``scope`` is a process id for level-1 questions and None for generic
    questions (levels 2-5, asked for every assessed process).
    """

    id: str
    attribute: ProcessAttribute
    scope: str | None
    text: str
    roles: frozenset[Role]
    knowledge_item: str | None = None


@dataclass(frozen=True)
class ContentBank:
    """Validated, immutable question bank and knowledge base."""

    schema_version: int
    processes: tuple[ProcessRef, ...]
    questions: tuple[Question, ...]
    knowledge_items: tuple[KnowledgeItem, ...]
    fingerprint: str = field(compare=False, default="")

    def __post_init__(self):
        # Lookup indexes; not dataclass fields so eq/hash stay value-based.
        object.__setattr__(self, "_questions_by_id", {q.id: q for q in self.questions})
        object.__setattr__(self, "_items_by_id", {k.id: k for k in self.knowledge_items})

    def process(self, process_id: str) -> ProcessRef:
        for proc in self.processes:
            if proc.id == process_id:
                return proc
        raise UnknownProcess(f"process {process_id!r} not declared in bank")

    def has_process(self, process_id: str) -> bool:
        return any(p.id == process_id for p in self.processes)

    def question(self, question_id: str) -> Question:
        try:
            return self._questions_by_id[question_id]
        except KeyError:
            raise ValidationError(f"question {question_id!r} not in bank") from None

    def has_question(self, question_id: str) -> bool:
        return question_id in self._questions_by_id

    def knowledge_item(self, item_id: str) -> KnowledgeItem:
        return self._items_by_id[item_id]


def sample_bank_path() -> Path:
    """Filesystem path of the bundled sample bank."""
    return Path(str(resources.files("capassess").joinpath("data/sample_bank.json")))


def load_sample_bank() -> ContentBank:
    """Load the sample bank shipped with the package."""
    return load_bank(sample_bank_path())


def load_bank(source: BankSource) -> ContentBank:
    """Parse and validate a bank document.

    Raises ParseError for malformed JSON, VersionError for an unknown
    schema_version, and ValidationError with a path-addressed message for
    any structural violation.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read bank file {source}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bank document is not valid JSON: {exc}") from exc
    return bank_from_dict(doc)


def bank_from_dict(doc: object) -> ContentBank:
    """Validate a parsed bank document and build the immutable bank."""
    if not isinstance(doc, dict):
        raise ParseError("bank document root must be an object")

    version = doc.get("schema_version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise ValidationError("schema_version: must be an integer")
    if version != BANK_SCHEMA_VERSION:
        raise VersionError(
            f"schema_version: unknown version {version} (supported: {BANK_SCHEMA_VERSION})"
        )

    processes = _parse_processes(doc.get("processes"))
    items = _parse_knowledge_items(doc.get("knowledge_items"))
    questions = _parse_questions(doc.get("questions"), processes, items)

    bank = ContentBank(
        schema_version=version,
        processes=processes,
        questions=questions,
        knowledge_items=items,
        fingerprint=_fingerprint(doc),
    )
    return bank


def bank_to_dict(bank: ContentBank) -> dict:
    """Serialize a bank back to its document form (round-trip stable)."""
    return {
        "schema_version": bank.schema_version,
        "processes": [{"id": p.id, "name": p.name} for p in bank.processes],
        "questions": [
            {
                "id": q.id,
                "attribute": q.attribute.id,
                "scope": q.scope,
                "text": q.text,
                "roles": sorted(r.value for r in q.roles),
                "knowledge_item": q.knowledge_item,
            }
            for q in bank.questions
        ],
        "knowledge_items": [
            {"id": k.id, "observation": k.observation, "recommendation": k.recommendation}
            for k in bank.knowledge_items
        ],
    }


def _fingerprint(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _parse_processes(raw: object) -> tuple[ProcessRef, ...]:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("processes: must be a non-empty array")
    processes: list[ProcessRef] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        path = f"processes[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{path}: must be an object")
        proc_id = entry.get("id")
        name = entry.get("name")
        if not isinstance(proc_id, str) or not proc_id:
            raise ValidationError(f"{path}.id: must be a non-empty string")
        if not isinstance(name, str) or not name:
            raise ValidationError(f"{path}.name: must be a non-empty string")
        if proc_id in seen:
            raise ValidationError(f"{path}.id: duplicate process id {proc_id!r}")
        seen.add(proc_id)
        processes.append(ProcessRef(id=proc_id, name=name))
    return tuple(processes)


def _parse_knowledge_items(raw: object) -> tuple[KnowledgeItem, ...]:
    if raw is None:
        raw = []
    if not isinstance(raw, list):
        raise ValidationError("knowledge_items: must be an array")
    items: list[KnowledgeItem] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        path = f"knowledge_items[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{path}: must be an object")
        item_id = entry.get("id")
        if not isinstance(item_id, str) or not item_id:
            raise ValidationError(f"{path}.id: must be a non-empty string")
        if item_id in seen:
            raise ValidationError(f"{path}.id: duplicate knowledge item id {item_id!r}")
        seen.add(item_id)
        observation = entry.get("observation")
        recommendation = entry.get("recommendation")
        if not isinstance(observation, str) or not observation:
            raise ValidationError(f"{path}.observation: must be a non-empty string")
        if not isinstance(recommendation, str) or not recommendation:
            raise ValidationError(f"{path}.recommendation: must be a non-empty string")
        items.append(
            KnowledgeItem(id=item_id, observation=observation, recommendation=recommendation)
        )
    return tuple(items)


def _parse_questions(
    raw: object,
    processes: tuple[ProcessRef, ...],
    items: tuple[KnowledgeItem, ...],
) -> tuple[Question, ...]:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("questions: must be a non-empty array")
    process_ids = {p.id for p in processes}
    item_ids = {k.id for k in items}
    questions: list[Question] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        path = f"questions[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{path}: must be an object")

        q_id = entry.get("id")
        if not isinstance(q_id, str) or not q_id:
            raise ValidationError(f"{path}.id: must be a non-empty string")
        if q_id in seen:
            raise ValidationError(f"{path}.id: duplicate question id {q_id!r}")
        seen.add(q_id)

        attr_raw = entry.get("attribute")
        if not isinstance(attr_raw, str):
            raise ValidationError(f"{path}.attribute: must be a string")
        try:
            attribute = ProcessAttribute.from_id(attr_raw)
        except ValueError:
            raise ValidationError(
                f"{path}.attribute: unknown attribute id {attr_raw!r}"
            ) from None

        scope = entry.get("scope")
        if scope is not None and not isinstance(scope, str):
            raise ValidationError(f"{path}.scope: must be a process id or null")
        if attribute is ProcessAttribute.PA1_1:
            if scope is None:
                raise ValidationError(
                    f"{path}.scope: level-1 questions must name a specific process"
                )
            if scope not in process_ids:
                raise ValidationError(
                    f"{path}.scope: references undeclared process {scope!r}"
                )
        else:
            if scope is not None:
                raise ValidationError(
                    f"{path}.scope: questions above level 1 must be generic (scope null)"
                )

        text = entry.get("text")
        if not isinstance(text, str) or not text:
            raise ValidationError(f"{path}.text: must be a non-empty string")

        roles_raw = entry.get("roles")
        if not isinstance(roles_raw, list) or not roles_raw:
            raise ValidationError(f"{path}.roles: must be a non-empty array")
        roles: set[Role] = set()
        for j, role_raw in enumerate(roles_raw):
            try:
                roles.add(Role(role_raw))
            except ValueError:
                raise ValidationError(
                    f"{path}.roles[{j}]: unknown role {role_raw!r}"
                ) from None

        item_ref = entry.get("knowledge_item")
        if item_ref is not None:
            if not isinstance(item_ref, str):
                raise ValidationError(f"{path}.knowledge_item: must be a string or null")
            if item_ref not in item_ids:
                raise ValidationError(
                    f"{path}.knowledge_item: dangling reference {item_ref!r}"
                )

        questions.append(
            Question(
                id=q_id,
                attribute=attribute,
                scope=scope,
                text=text,
                roles=frozenset(roles),
                knowledge_item=item_ref,
            )
        )
    return tuple(questions)


_ATTR_ORDER = {attr: i for i, attr in enumerate(ALL_ATTRIBUTES)}


def questions_for(
    bank: ContentBank,
    process_id: str,
    role: Role,
    target: CapabilityLevel,
) -> list[Question]:
    """Questions a participant with ``role`` answers for ``process_id``.

    Pure filter: scope matches the process (or is generic), the role is
    listed on the question, and the attribute level is within the target.
    Ordered by attribute then question id; deterministic.
    """
    if not bank.has_process(process_id):
        raise UnknownProcess(f"process {process_id!r} not declared in bank")
    selected = [
        q
        for q in bank.questions
        if (q.scope is None or q.scope == process_id)
        and role in q.roles
        and q.attribute.level <= target
    ]
    selected.sort(key=lambda q: (_ATTR_ORDER[q.attribute], q.id))
    return selected


@dataclass(frozen=True)
class BankStats:
    """Summary counts over a validated bank."""

    process_count: int
    question_count: int
    process_specific_count: int
    generic_count: int
    knowledge_item_count: int
    questions_with_items: int
    questions_without_items: tuple[str, ...]
    per_attribute: dict[str, int]
    per_role: dict[str, int]
    per_process_level1: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "process_count": self.process_count,
            "question_count": self.question_count,
            "process_specific_count": self.process_specific_count,
            "generic_count": self.generic_count,
            "knowledge_item_count": self.knowledge_item_count,
            "questions_with_items": self.questions_with_items,
            "questions_without_items": list(self.questions_without_items),
            "per_attribute": self.per_attribute,
            "per_role": self.per_role,
            "per_process_level1": self.per_process_level1,
        }


def bank_stats(bank: ContentBank) -> BankStats:
    """Counts per process, attribute and role, plus knowledge-item coverage."""
    per_attribute = {attr.id: 0 for attr in ALL_ATTRIBUTES}
    per_role = {role.value: 0 for role in Role}
    per_process_level1 = {p.id: 0 for p in bank.processes}
    uncovered: list[str] = []
    specific = 0
    for q in bank.questions:
        per_attribute[q.attribute.id] += 1
        for role in q.roles:
            per_role[role.value] += 1
        if q.scope is not None:
            specific += 1
            per_process_level1[q.scope] += 1
        if q.knowledge_item is None:
            uncovered.append(q.id)
    return BankStats(
        process_count=len(bank.processes),
        question_count=len(bank.questions),
        process_specific_count=specific,
        generic_count=len(bank.questions) - specific,
        knowledge_item_count=len(bank.knowledge_items),
        questions_with_items=len(bank.questions) - len(uncovered),
        questions_without_items=tuple(uncovered),
        per_attribute=per_attribute,
        per_role=per_role,
        per_process_level1=per_process_level1,
    )
