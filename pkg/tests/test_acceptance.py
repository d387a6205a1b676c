"""Acceptance gate: the checks this package must pass to ship.

Each test carries a one-line docstring; after every run that includes
this file, the conftest terminal hook prints one PASS/FAIL line per
check. Tolerances are stated inline; everything numeric is compared
against the straight-line reference implementations in oracle.py.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import subprocess
import sys
import textwrap
import time
from collections import defaultdict
from pathlib import Path

from fastapi.testclient import TestClient

from capassess.measurement import determine_capability_level, score_responses
from capassess.model import ALL_ATTRIBUTES, ProcessAttribute, RatingBand
from capassess.reporting import select_knowledge_items
from capassess.service import create_app
from capassess.store import Store
from capassess.survey import allocate_questionnaire

from .conftest import PINNED_CLOCK
from .oracle import oracle_attribute, oracle_capability_level, oracle_question

FIXTURES = Path(__file__).parent / "fixtures"

TOL = 1e-9

LETTERS = ("N", "P", "L", "F")
BY_LETTER = {letter: RatingBand(letter) for letter in LETTERS}


def _close(got: float | None, want: float | None, tol: float = TOL) -> None:
    if got is None or want is None:
        assert got is None and want is None, (got, want)
    else:
        assert abs(got - want) <= tol, (got, want)


def _compare_process_to_oracle(bank, result, pairs) -> None:
    """Check one ProcessResult field by field against oracle.py."""
    answers_by_question: dict[str, list[str]] = defaultdict(list)
    for qid, answer in pairs:
        answers_by_question[qid].append(answer)

    for qr in result.question_results:
        want = oracle_question(answers_by_question[qr.question_id])
        _close(qr.knowledge_score, want["mean"])
        got_band = qr.band.value if qr.band is not None else None
        assert got_band == want["band"]
        assert qr.answered_count == want["answered"]
        assert qr.unable_count == want["unable"]
    assert sorted(q.question_id for q in result.question_results) == sorted(
        answers_by_question
    )

    for ar in result.attribute_results:
        per_attr = {
            qid: answers
            for qid, answers in answers_by_question.items()
            if bank.question(qid).attribute is ar.attribute
        }
        want = oracle_attribute(per_attr)
        _close(ar.mean_percent, want["mean"])
        got_rating = ar.rating.value if ar.rating is not None else "Unassessed"
        assert got_rating == want["rating"]
        _close(ar.cv, want["cv"])
        assert ar.low_reliability == want["low_reliability"]
        assert ar.response_count == want["response_count"]

    ladder_input = {
        ar.attribute.id: ar.rating.value if ar.rating is not None else None
        for ar in result.attribute_results
    }
    assert int(result.capability_level) == oracle_capability_level(ladder_input)


def _random_response_set(bank, rng) -> tuple[str, list[tuple[str, str]]]:
    process_id = rng.choice([p.id for p in bank.processes])
    applicable = [
        q.id for q in bank.questions if q.scope is None or q.scope == process_id
    ]
    chosen = rng.sample(applicable, k=rng.randint(1, min(len(applicable), 60)))
    pairs = []
    for qid in chosen:
        for _ in range(rng.randint(1, 4)):
            pairs.append((qid, rng.choice(("N", "P", "L", "F", "Unable"))))
    return process_id, pairs


def _cli(*args, env_extra=None, check=True):
    env = dict(os.environ)
    env.pop("DATA_DIR", None)
    env.pop("BANK_PATH", None)
    env.update(env_extra or {})
    proc = subprocess.run(
        [sys.executable, "-m", "capassess", *args],
        capture_output=True, text=True, env=env, timeout=120,
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"capassess {args} failed:\n{proc.stderr}")
    return proc


# ---------------------------------------------------------------------------


def test_ladder_oracle_equivalence(bank):
    """capability ladder equals the brute-force oracle on all 262,144 rating vectors"""
    attrs = list(ALL_ATTRIBUTES)
    ids = [a.id for a in attrs]
    started = time.perf_counter()
    checked = 0
    for combo in itertools.product(LETTERS, repeat=9):
        got = determine_capability_level(
            {attr: BY_LETTER[letter] for attr, letter in zip(attrs, combo)}
        )
        want = oracle_capability_level(dict(zip(ids, combo)))
        assert int(got) == want, (combo, int(got), want)
        checked += 1
    elapsed = time.perf_counter() - started
    assert checked == 4**9 == 262_144
    assert elapsed < 10.0, f"enumeration took {elapsed:.1f}s"


def test_level_three_rule(bank):
    """level 3 requires L or F on both its attributes atop fully achieved lower levels"""
    F, L, P, N = (RatingBand.F, RatingBand.L, RatingBand.P, RatingBand.N)

    def level(**overrides) -> int:
        ratings = {attr: F for attr in ALL_ATTRIBUTES}
        # Keep the two top levels out of reach so the result is exact.
        for attr in ALL_ATTRIBUTES:
            if int(attr.level) >= 4:
                ratings[attr] = P
        for attr_id, rating in overrides.items():
            ratings[ProcessAttribute.from_id(attr_id)] = rating
        return int(determine_capability_level(ratings))

    # Achieved with any mix of F and L on the level-3 attributes.
    for a31 in (F, L):
        for a32 in (F, L):
            assert level(**{"PA3.1": a31, "PA3.2": a32}) == 3

    # Either level-3 attribute below L blocks level 3.
    for bad in (P, N):
        assert level(**{"PA3.1": bad}) == 2
        assert level(**{"PA3.2": bad}) == 2

    # Converse: any lower attribute at merely L blocks level 3 too.
    assert level(**{"PA1.1": L}) == 1
    assert level(**{"PA2.1": L}) == 2
    assert level(**{"PA2.2": L}) == 2

    # The rule holds across the whole rating space, not just hand cases.
    for combo in itertools.product(LETTERS, repeat=9):
        ratings = dict(zip([a.id for a in ALL_ATTRIBUTES], combo))
        reached_3 = oracle_capability_level(ratings) >= 3
        should = (
            ratings["PA1.1"] == "F"
            and ratings["PA2.1"] == "F"
            and ratings["PA2.2"] == "F"
            and ratings["PA3.1"] in ("F", "L")
            and ratings["PA3.2"] in ("F", "L")
        )
        assert reached_3 == should, ratings


def test_sample_bank_counts():
    """sample bank ships 4 processes, 46+127=173 questions, 151 knowledge items"""
    proc = _cli("bank", "stats", "--output", "structured")
    stats = json.loads(proc.stdout)
    assert stats["process_count"] == 4
    assert stats["process_specific_count"] == 46
    assert stats["generic_count"] == 127
    assert stats["question_count"] == 173
    assert stats["knowledge_item_count"] == 151


def test_measurement_oracle_and_metamorphic_properties(bank):
    """scoring matches the straight-line oracle and survives metamorphic mutations"""
    rng = random.Random(19753)

    response_sets = []
    for _ in range(1000):
        process_id, pairs = _random_response_set(bank, rng)
        response_sets.append((process_id, pairs))
        result = score_responses(bank, process_id, pairs)
        _compare_process_to_oracle(bank, result, pairs)

    upgrade = {"N": "P", "P": "L", "L": "F"}

    def attribute_by_id(result, attr_id):
        return next(a for a in result.attribute_results if a.attribute.id == attr_id)

    # Monotonicity: raising one answer never lowers anything.
    done = 0
    while done < 1000:
        process_id, pairs = response_sets[rng.randrange(len(response_sets))]
        candidates = [i for i, (_q, a) in enumerate(pairs) if a in upgrade]
        if not candidates:
            continue
        i = rng.choice(candidates)
        mutated = list(pairs)
        mutated[i] = (pairs[i][0], upgrade[pairs[i][1]])
        before = score_responses(bank, process_id, pairs)
        after = score_responses(bank, process_id, mutated)
        assert int(after.capability_level) >= int(before.capability_level)
        attr_id = bank.question(pairs[i][0]).attribute.id
        assert (
            attribute_by_id(after, attr_id).mean_percent
            >= attribute_by_id(before, attr_id).mean_percent - TOL
        )
        done += 1

    # Permutation invariance: response order carries no information.
    for _ in range(1000):
        process_id, pairs = response_sets[rng.randrange(len(response_sets))]
        shuffled = list(pairs)
        rng.shuffle(shuffled)
        a = score_responses(bank, process_id, pairs)
        b = score_responses(bank, process_id, shuffled)
        assert int(a.capability_level) == int(b.capability_level)
        for x, y in zip(a.attribute_results, b.attribute_results):
            _close(x.mean_percent, y.mean_percent)
            _close(x.cv, y.cv)
            assert x.rating == y.rating
            assert x.low_reliability == y.low_reliability

    # Duplication invariance: doubling every response moves no average.
    for _ in range(1000):
        process_id, pairs = response_sets[rng.randrange(len(response_sets))]
        a = score_responses(bank, process_id, pairs)
        b = score_responses(bank, process_id, pairs + pairs)
        assert int(a.capability_level) == int(b.capability_level)
        for x, y in zip(a.attribute_results, b.attribute_results):
            _close(x.mean_percent, y.mean_percent)
            if x.response_count == 1:
                # One response has no spread to speak of; its copy pair does:
                # exactly zero.
                assert x.cv is None
                assert y.cv == 0.0
            else:
                _close(x.cv, y.cv)
            assert x.rating == y.rating
            assert y.response_count == 2 * x.response_count


def test_report_entries_track_low_bands(bank):
    """report entries appear exactly for questions banded N or P, riskiest first"""
    rng = random.Random(8642)
    total_entries = 0
    empty_rounds = 0
    for _ in range(60):
        process_id, pairs = _random_response_set(bank, rng)
        result = score_responses(bank, process_id, pairs)
        entries = select_knowledge_items([result], bank)[process_id]

        low = {
            q.question_id
            for q in result.question_results
            if q.band in (RatingBand.N, RatingBand.P)
        }
        assert {e.question_id for e in entries} == low
        scores = [e.knowledge_score for e in entries]
        assert all(a <= b + TOL for a, b in zip(scores, scores[1:]))
        total_entries += len(entries)
        empty_rounds += not entries
    assert total_entries > 100  # the randomness actually exercised the trigger

    # All-F input produces no entries at all.
    all_f = [(q.id, "F") for q in bank.questions if q.scope in (None, "SLM")]
    clean = score_responses(bank, "SLM", all_f)
    assert select_knowledge_items([clean], bank)["SLM"] == ()


def test_golden_pipeline_cli_and_api(tmp_path, bank, pinned_clock):
    """pipeline reproduces the golden outputs via CLI (bytes) and API (content)"""
    golden_responses = (FIXTURES / "golden_responses.json").read_bytes()
    golden_report = (FIXTURES / "golden_report.json").read_bytes()
    env = {"CAPASSESS_CLOCK": PINNED_CLOCK}

    # CLI route, byte for byte.
    store_dir = tmp_path / "cli-store"
    responses_out = tmp_path / "responses.json"
    report_out = tmp_path / "report.json"
    _cli("assessment", "create", "--store", str(store_dir),
         "--org", "Golden Fixtures Ltd", "--id", "asm-golden",
         "--process", "SLM", "--process", "PRB", env_extra=env)
    _cli("simulate", "--store", str(store_dir), "--id", "asm-golden",
         "--profile", str(FIXTURES / "profile.json"), "--seed", "42",
         "--out", str(responses_out), env_extra=env)
    _cli("assessment", "close", "--store", str(store_dir), "--id", "asm-golden",
         env_extra=env)
    _cli("report", "generate", "--store", str(store_dir), "--id", "asm-golden",
         "--format", "structured", "--out", str(report_out), env_extra=env)
    assert responses_out.read_bytes() == golden_responses
    assert report_out.read_bytes() == golden_report

    # API route, content-identical report from the same inputs.
    rows = json.loads(golden_responses)["responses"]
    roster = json.loads((FIXTURES / "profile.json").read_text())["roster"]
    headers = {"Authorization": "Bearer acceptance-key"}
    with Store(tmp_path / "api-store", bank) as store:
        client = TestClient(create_app(store, "acceptance-key"))
        assert client.post(
            "/api/v1/assessments",
            json={"id": "asm-golden", "org_profile": "Golden Fixtures Ltd",
                  "processes": ["SLM", "PRB"], "target_level": 5},
            headers=headers,
        ).status_code == 201
        tokens = {}
        for member in roster:
            created = client.post(
                "/api/v1/assessments/asm-golden/participants",
                json={"display_name": member["display_name"],
                      "assignments": member["assignments"],
                      "participant_id": member["id"]},
                headers=headers,
            )
            assert created.status_code == 201
            tokens[member["id"]] = created.json()["token"]
        assert client.post("/api/v1/assessments/asm-golden/open",
                           headers=headers).status_code == 200
        for row in rows:
            submitted = client.post(
                "/api/v1/assessments/asm-golden/responses",
                json={"question": row["question"], "answer": row["answer"],
                      "process": row["process"]},
                headers={"Authorization": f"Bearer {tokens[row['participant']]}"},
            )
            assert submitted.status_code == 200, submitted.text
        assert client.post("/api/v1/assessments/asm-golden/close",
                           headers=headers).status_code == 200
        built = client.post("/api/v1/assessments/asm-golden/report", headers=headers)
        assert built.status_code == 200
        fetched = client.get("/api/v1/assessments/asm-golden/report", headers=headers)
        assert fetched.status_code == 200

    want = json.loads(golden_report)
    assert built.json() == want
    assert fetched.json() == want

    # The frozen report is not just stable, it is right: recompute every
    # figure in it from the frozen responses with the oracle.
    for block in want["processes"]:
        process_id = block["process_id"]
        answers_by_question: dict[str, list[str]] = defaultdict(list)
        for row in rows:
            if row["process"] == process_id:
                answers_by_question[row["question"]].append(row["answer"])
        for qr in block["question_results"]:
            expect = oracle_question(answers_by_question[qr["question_id"]])
            _close(qr["knowledge_score"], expect["mean"])
            assert qr["band"] == (expect["band"] or "Unassessed")
        for ar in block["attribute_results"]:
            per_attr = {
                qid: answers
                for qid, answers in answers_by_question.items()
                if bank.question(qid).attribute.id == ar["attribute"]
            }
            expect = oracle_attribute(per_attr)
            _close(ar["mean_percent"], expect["mean"])
            assert ar["rating"] == expect["rating"]
            _close(ar["cv"], expect["cv"])
            assert ar["low_reliability"] == expect["low_reliability"]
        ladder_input = {
            ar["attribute"]: None if ar["rating"] == "Unassessed" else ar["rating"]
            for ar in block["attribute_results"]
        }
        assert block["capability_level"] == oracle_capability_level(ladder_input)


def test_acknowledged_responses_survive_kill(tmp_path, bank):
    """every acknowledged response survives a SIGKILL and restart"""
    started = time.perf_counter()
    store_dir = tmp_path / "store"
    script = tmp_path / "writer.py"
    script.write_text(textwrap.dedent("""
        import sys
        from capassess.bank import load_sample_bank
        from capassess.model import CapabilityLevel, Role
        from capassess.store import Store
        from capassess.survey import allocate_questionnaire

        bank = load_sample_bank()
        options = ("N", "P", "L", "F")
        with Store(sys.argv[1], bank) as store:
            store.create_assessment(
                "Durability run", ["SLM", "CHG"], CapabilityLevel.CL5, "asm-kill"
            )
            store.register_participant(
                "asm-kill", "Writer",
                [("SLM", Role.PROCESS_MANAGER), ("CHG", Role.PROCESS_MANAGER)],
                participant_id="p01",
            )
            store.open_assessment("asm-kill")
            allocation = allocate_questionnaire(
                bank, store.assessment("asm-kill"), "p01"
            )
            for i, (process, question) in enumerate(allocation):
                answer = options[i % 4]
                store.record_response(
                    "asm-kill", "p01", question.id, answer, process.id
                )
                print("ACK", process.id, question.id, answer, flush=True)
        print("DONE", flush=True)
    """), encoding="utf-8")

    proc = subprocess.Popen(
        [sys.executable, str(script), str(store_dir)],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
    )
    acked: list[list[str]] = []
    try:
        for line in proc.stdout:
            if line.startswith("ACK"):
                acked.append(line.split())
                if len(acked) >= 10:
                    proc.kill()  # SIGKILL, mid-write with more answers to go
                    break
    finally:
        proc.wait(timeout=30)
        stderr = proc.stderr.read()
        proc.stdout.close()
        proc.stderr.close()
    assert len(acked) >= 10, f"writer died early:\n{stderr}"

    with Store(store_dir, bank) as store:
        assessment = store.assessment("asm-kill")
        for _tag, process_id, question_id, answer in acked:
            response = assessment.responses[("p01", process_id, question_id)]
            assert response.answer.value == answer
        # The reopened store still accepts writes.
        remaining = [
            (process, question)
            for process, question in allocate_questionnaire(bank, assessment, "p01")
            if ("p01", process.id, question.id) not in assessment.responses
        ]
        if remaining:
            process, question = remaining[0]
            store.record_response("asm-kill", "p01", question.id, "F", process.id)

    assert time.perf_counter() - started < 60.0


def test_degenerate_inputs_stay_unassessed(bank):
    """zero-response attributes and all-Unable questions stay Unassessed"""
    # A fully achieved process, except nobody answered anything on PA2.1:
    # the hole is reported Unassessed and pins the level down to 1.
    pa21 = ProcessAttribute.from_id("PA2.1")
    pairs = [
        (q.id, "F")
        for q in bank.questions
        if q.scope in (None, "SLM") and q.attribute is not pa21
    ]
    result = score_responses(bank, "SLM", pairs)
    hole = next(a for a in result.attribute_results if a.attribute is pa21)
    assert hole.rating is None
    assert hole.mean_percent is None
    assert hole.response_count == 0
    others = [a for a in result.attribute_results if a.attribute is not pa21]
    assert all(a.rating is RatingBand.F for a in others)
    assert int(result.capability_level) == 1

    # A question answered only with Unable scores nothing and triggers
    # no report entry, while its siblings still band normally.
    siblings = [q.id for q in bank.questions if q.scope == "SLM"]
    muted, rest = siblings[0], siblings[1:]
    pairs = [(muted, "Unable")] * 3 + [(qid, "N") for qid in rest]
    result = score_responses(bank, "SLM", pairs)
    muted_result = next(
        q for q in result.question_results if q.question_id == muted
    )
    assert muted_result.band is None
    assert muted_result.knowledge_score is None
    assert muted_result.unable_count == 3
    entries = select_knowledge_items([result], bank)["SLM"]
    assert muted not in {e.question_id for e in entries}
    assert {e.question_id for e in entries} == set(rest)
