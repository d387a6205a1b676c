"""Shared fixtures for the capassess test suite."""

from __future__ import annotations

import random

import pytest

from capassess.bank import ContentBank, load_sample_bank
from capassess.model import AnswerOption, CapabilityLevel, Role
from capassess.survey import (
    Assessment,
    allocate_questionnaire,
    close_assessment,
    create_assessment,
    open_assessment,
    record_response,
    register_participant,
)

PINNED_CLOCK = "2026-03-01T12:00:00Z"

# One verdict line per acceptance check, printed after every run that
# included tests/test_acceptance.py (see pytest_terminal_summary below).
_acceptance_labels: dict[str, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.fspath.basename == "test_acceptance.py":
            doc = item.function.__doc__ or item.name
            _acceptance_labels[item.nodeid] = doc.strip().splitlines()[0]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_labels:
        return
    outcomes: dict[str, str] = {}
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"),
                            ("error", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", None)
            if nodeid in _acceptance_labels:
                outcomes.setdefault(nodeid, verdict)
    terminalreporter.section("acceptance checks")
    for nodeid, label in _acceptance_labels.items():
        terminalreporter.write_line(f"{outcomes.get(nodeid, 'NOT RUN')}: {label}")


@pytest.fixture(scope="session")
def bank() -> ContentBank:
    return load_sample_bank()


@pytest.fixture()
def pinned_clock(monkeypatch) -> str:
    monkeypatch.setenv("CAPASSESS_CLOCK", PINNED_CLOCK)
    return PINNED_CLOCK


def make_assessment(
    bank: ContentBank,
    processes=("SLM",),
    target_level: CapabilityLevel = CapabilityLevel.CL5,
    assessment_id: str = "asm-test",
) -> Assessment:
    return create_assessment(
        bank,
        org_profile="Test org",
        processes=list(processes),
        target_level=target_level,
        assessment_id=assessment_id,
    )


def fill_assessment(
    bank: ContentBank,
    assessment: Assessment,
    seed: int = 0,
    answers=(
        AnswerOption.N,
        AnswerOption.P,
        AnswerOption.L,
        AnswerOption.F,
        AnswerOption.UNABLE,
    ),
) -> None:
    """Answer every allocated question with a seeded random choice."""
    rng = random.Random(seed)
    for pid in sorted(assessment.participants):
        for process, question in allocate_questionnaire(bank, assessment, pid):
            record_response(
                bank,
                assessment,
                pid,
                question.id,
                rng.choice(answers),
                process_id=process.id,
            )


@pytest.fixture()
def closed_assessment(bank) -> Assessment:
    """A two-process assessment with two participants, fully answered and closed."""
    assessment = make_assessment(bank, processes=("SLM", "PRB"))
    register_participant(
        assessment,
        "Morgan",
        [("SLM", Role.PROCESS_MANAGER), ("PRB", Role.PROCESS_MANAGER)],
        participant_id="p01",
    )
    register_participant(
        assessment,
        "Riley",
        [("SLM", Role.PROCESS_PERFORMER), ("PRB", Role.PROCESS_PERFORMER)],
        participant_id="p02",
    )
    open_assessment(assessment)
    fill_assessment(bank, assessment, seed=7)
    close_assessment(assessment)
    return assessment
