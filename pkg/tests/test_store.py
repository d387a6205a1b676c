"""Tests for the append-only event log store and crash recovery."""

import copy
import json
import threading

import pytest

from capassess.bank import bank_from_dict, bank_to_dict
from capassess.errors import (
    BankMismatch,
    InvalidState,
    StoreError,
    StoreLocked,
    UnknownAssessment,
)
from capassess.model import AnswerOption, Role
from capassess.store import EVENTS_FILE, SNAPSHOT_FILE, Store, resolve_participant
from capassess.survey import AssessmentState, allocate_questionnaire

MGR = Role.PROCESS_MANAGER
PERF = Role.PROCESS_PERFORMER


def _pipeline(store: Store, assessment_id: str = "asm-x") -> str:
    """Create, staff, open, answer and close one assessment."""
    store.create_assessment("Acme", ["SLM", "PRB"], assessment_id=assessment_id)
    store.register_participant(
        assessment_id, "Morgan", [("SLM", MGR), ("PRB", MGR)], participant_id="p01"
    )
    store.register_participant(
        assessment_id, "Riley", [("SLM", PERF)], participant_id="p02"
    )
    store.open_assessment(assessment_id)
    answers = ["N", "P", "L", "F", "Unable"]
    a = store.assessment(assessment_id)
    i = 0
    for pid in ("p01", "p02"):
        for process, question in allocate_questionnaire(store.bank, a, pid):
            store.record_response(
                assessment_id, pid, question.id, answers[i % 5], process_id=process.id
            )
            i += 1
    store.close_assessment(assessment_id)
    return assessment_id


def _state_dump(store: Store) -> dict:
    from capassess.store import _assessment_to_dict

    return {aid: _assessment_to_dict(a) for aid, a in store.assessments.items()}


# ---------------------------------------------------------------------------
# Basic persistence.


def test_fresh_store_writes_init_event(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        assert store.list_assessments() == []
    first = json.loads((tmp_path / EVENTS_FILE).read_text().splitlines()[0])
    assert first["seq"] == 1
    assert first["type"] == "store_initialized"
    assert first["bank_fingerprint"] == bank.fingerprint
    assert (tmp_path / SNAPSHOT_FILE).exists()


def test_reload_restores_everything(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        aid = _pipeline(store)
        before = _state_dump(store)
        response_count = len(store.assessment(aid).responses)
    with Store(tmp_path, bank) as store:
        assert _state_dump(store) == before
        again = store.assessment(aid)
        assert again.state is AssessmentState.CLOSED
        assert len(again.responses) == response_count
        assert again.participants["p01"].display_name == "Morgan"


def test_reload_from_log_alone(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        _pipeline(store)
        before = _state_dump(store)
    (tmp_path / SNAPSHOT_FILE).unlink()
    with Store(tmp_path, bank) as store:
        assert _state_dump(store) == before


def test_acknowledged_response_is_on_disk_before_return(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        store.create_assessment("Acme", ["SLM"], assessment_id="a1")
        store.register_participant("a1", "P", [("SLM", MGR)], participant_id="p01")
        store.open_assessment("a1")
        store.record_response("a1", "p01", "SLM-1.1-01", "F")
        # Without closing (no snapshot, no flush beyond the append),
        # the event must already be durable in the log file.
        lines = (tmp_path / EVENTS_FILE).read_text().splitlines()
        last = json.loads(lines[-1])
        assert last["type"] == "response_recorded"
        assert last["question"] == "SLM-1.1-01"


def test_upsert_replays_to_the_last_answer(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        store.create_assessment("Acme", ["SLM"], assessment_id="a1")
        store.register_participant("a1", "P", [("SLM", MGR)], participant_id="p01")
        store.open_assessment("a1")
        store.record_response("a1", "p01", "SLM-1.1-01", "P")
        store.record_response("a1", "p01", "SLM-1.1-01", "F")
    with Store(tmp_path, bank) as store:
        responses = store.assessment("a1").responses
        assert len(responses) == 1
        assert responses[("p01", "SLM", "SLM-1.1-01")].answer is AnswerOption.F


def test_tokens_work_across_restarts(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        store.create_assessment("Acme", ["SLM"], assessment_id="a1")
        _, token = store.register_participant("a1", "P", [("SLM", MGR)])
    with Store(tmp_path, bank) as store:
        participant = resolve_participant(store, "a1", token)
        assert participant.display_name == "P"


def test_plaintext_token_never_hits_disk(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        store.create_assessment("Acme", ["SLM"], assessment_id="a1")
        _, token = store.register_participant("a1", "P", [("SLM", MGR)])
    for name in (EVENTS_FILE, SNAPSHOT_FILE):
        assert token not in (tmp_path / name).read_text()


# ---------------------------------------------------------------------------
# Reports survive via their parameters.


def test_report_is_rebuilt_identically_on_reload(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        aid = _pipeline(store)
        original = store.build_report(aid)
        assert store.assessment(aid).state is AssessmentState.REPORTED
    with Store(tmp_path, bank) as store:
        rebuilt = store.report(aid)
        assert rebuilt == original
        assert rebuilt.reported_at == original.reported_at


def test_report_absent_until_built(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        aid = _pipeline(store)
        assert store.report(aid) is None
        store.build_report(aid)
        assert store.report(aid) is not None


def test_rebuilding_report_does_not_move_the_timestamp(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        aid = _pipeline(store)
        first = store.build_report(aid)
        second = store.build_report(aid)
        assert second.reported_at == first.reported_at
        assert second == first


# ---------------------------------------------------------------------------
# Corruption and mismatch handling.


def test_torn_trailing_line_is_dropped(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        _pipeline(store)
        before = _state_dump(store)
    (tmp_path / SNAPSHOT_FILE).unlink()
    with open(tmp_path / EVENTS_FILE, "a", encoding="utf-8") as fh:
        fh.write('{"seq": 99999, "type": "response_reco')  # no newline: torn write
    with Store(tmp_path, bank) as store:
        assert _state_dump(store) == before
    # The torn bytes are gone; a clean reopen sees a well-formed log.
    assert not (tmp_path / EVENTS_FILE).read_bytes().endswith(b"_reco")


def test_corrupt_middle_event_refuses_to_load(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        _pipeline(store)
    (tmp_path / SNAPSHOT_FILE).unlink()
    lines = (tmp_path / EVENTS_FILE).read_text().splitlines()
    lines[len(lines) // 2] = "{broken json"
    (tmp_path / EVENTS_FILE).write_text("\n".join(lines) + "\n")
    with pytest.raises(StoreError):
        Store(tmp_path, bank)


def test_sequence_gap_refuses_to_load(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        _pipeline(store)
    (tmp_path / SNAPSHOT_FILE).unlink()
    lines = (tmp_path / EVENTS_FILE).read_text().splitlines()
    del lines[len(lines) // 2]
    (tmp_path / EVENTS_FILE).write_text("\n".join(lines) + "\n")
    with pytest.raises(StoreError) as err:
        Store(tmp_path, bank)
    assert "gap" in str(err.value)


def test_second_store_on_same_directory_is_locked_out(tmp_path, bank):
    with Store(tmp_path, bank):
        with pytest.raises(StoreLocked):
            Store(tmp_path, bank)
    # Released on close: reopening afterwards succeeds.
    with Store(tmp_path, bank):
        pass


def test_wrong_bank_is_rejected_via_snapshot_and_log(tmp_path, bank):
    doc = bank_to_dict(bank)
    changed = copy.deepcopy(doc)
    changed["questions"][0]["text"] += " (other)"
    other_bank = bank_from_dict(changed)

    with Store(tmp_path, bank) as store:
        _pipeline(store)
    with pytest.raises(BankMismatch):
        Store(tmp_path, other_bank)
    (tmp_path / SNAPSHOT_FILE).unlink()
    with pytest.raises(BankMismatch):
        Store(tmp_path, other_bank)


def test_unknown_snapshot_schema_is_rejected(tmp_path, bank):
    with Store(tmp_path, bank):
        pass
    snapshot = json.loads((tmp_path / SNAPSHOT_FILE).read_text())
    snapshot["schema_version"] = 99
    (tmp_path / SNAPSHOT_FILE).write_text(json.dumps(snapshot))
    with pytest.raises(StoreError):
        Store(tmp_path, bank)


def test_unknown_event_type_is_rejected(tmp_path, bank):
    with Store(tmp_path, bank):
        pass
    (tmp_path / SNAPSHOT_FILE).unlink()
    with open(tmp_path / EVENTS_FILE, "a", encoding="utf-8") as fh:
        fh.write('{"seq": 2, "type": "mystery"}\n')
    with pytest.raises(StoreError):
        Store(tmp_path, bank)


def test_replay_revalidates_through_domain_rules(tmp_path, bank):
    # A log claiming a response for a Draft assessment must not load.
    with Store(tmp_path, bank) as store:
        store.create_assessment("Acme", ["SLM"], assessment_id="a1")
        store.register_participant("a1", "P", [("SLM", MGR)], participant_id="p01")
    (tmp_path / SNAPSHOT_FILE).unlink()
    with open(tmp_path / EVENTS_FILE, "a", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "seq": 4,
                    "type": "response_recorded",
                    "assessment": "a1",
                    "participant": "p01",
                    "process": "SLM",
                    "question": "SLM-1.1-01",
                    "answer": "F",
                    "ts": "2026-01-01T00:00:00Z",
                }
            )
            + "\n"
        )
    with pytest.raises(StoreError) as err:
        Store(tmp_path, bank)
    assert "replay" in str(err.value)


# ---------------------------------------------------------------------------
# Guard rails.


def test_unknown_assessment(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        with pytest.raises(UnknownAssessment):
            store.assessment("ghost")
        with pytest.raises(UnknownAssessment):
            store.progress("ghost")


def test_mutations_after_close_fail_cleanly(tmp_path, bank):
    store = Store(tmp_path, bank)
    store.create_assessment("Acme", ["SLM"], assessment_id="a1")
    store.close()
    with pytest.raises(StoreError):
        store.create_assessment("Acme", ["CHG"], assessment_id="a2")


def test_failed_domain_call_appends_no_event(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        store.create_assessment("Acme", ["SLM"], assessment_id="a1")
        store.register_participant("a1", "P", [("SLM", MGR)], participant_id="p01")
        size_before = (tmp_path / EVENTS_FILE).stat().st_size
        with pytest.raises(InvalidState):
            store.record_response("a1", "p01", "SLM-1.1-01", "F")  # still Draft
        assert (tmp_path / EVENTS_FILE).stat().st_size == size_before
    with Store(tmp_path, bank) as store:
        assert store.assessment("a1").responses == {}


def test_snapshot_write_is_atomic(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        _pipeline(store)
        store.write_snapshot()
        assert not (tmp_path / (SNAPSHOT_FILE + ".tmp")).exists()
        snapshot = json.loads((tmp_path / SNAPSHOT_FILE).read_text())
        assert snapshot["seq"] == store._seq


def test_concurrent_writers_serialize(tmp_path, bank):
    with Store(tmp_path, bank) as store:
        store.create_assessment("Acme", ["SLM"], assessment_id="a1")
        store.register_participant("a1", "M", [("SLM", MGR)], participant_id="p01")
        store.register_participant("a1", "P", [("SLM", PERF)], participant_id="p02")
        store.open_assessment("a1")
        a = store.assessment("a1")
        jobs = [
            ("p01", [q.id for _p, q in allocate_questionnaire(bank, a, "p01")]),
            ("p02", [q.id for _p, q in allocate_questionnaire(bank, a, "p02")]),
        ]
        errors = []

        def worker(pid, question_ids):
            try:
                for qid in question_ids:
                    store.record_response("a1", pid, qid, "L")
            except Exception as exc:  # pragma: no cover - failure reporting
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=job) for job in jobs]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
        expected = sum(len(qids) for _pid, qids in jobs)
        assert len(store.assessment("a1").responses) == expected
    with Store(tmp_path, bank) as store:
        assert len(store.assessment("a1").responses) == expected
