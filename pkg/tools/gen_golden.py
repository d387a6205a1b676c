"""Regenerate the golden pipeline fixtures under tests/fixtures/.

Runs the CLI end to end (create, simulate, close, report) in a scratch
store with a pinned clock and seed, then freezes the simulated responses
and the structured report. Regenerate whenever the sample bank, the
simulation profile, or response-affecting behaviour changes:

    python3 tools/gen_golden.py

The frozen values are byte-compared by the test suite, which also
recomputes the report from the frozen responses independently, so a
regeneration that encodes a scoring bug will not pass silently.
"""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

CLOCK = "2026-03-01T12:00:00Z"
SEED = 42
ASSESSMENT_ID = "asm-golden"
ORG = "Golden Fixtures Ltd"
PROCESSES = ("SLM", "PRB")


def cli(*args, env):
    subprocess.run(
        [sys.executable, "-m", "capassess", *args],
        check=True, env=env, cwd=ROOT,
    )


def main() -> None:
    env = dict(os.environ, CAPASSESS_CLOCK=CLOCK)
    env.pop("DATA_DIR", None)
    env.pop("BANK_PATH", None)
    with tempfile.TemporaryDirectory() as scratch:
        store = Path(scratch) / "store"
        responses_path = Path(scratch) / "responses.json"
        report_path = Path(scratch) / "report.json"

        create = ["assessment", "create", "--store", str(store),
                  "--org", ORG, "--id", ASSESSMENT_ID]
        for process in PROCESSES:
            create += ["--process", process]
        cli(*create, env=env)
        cli("simulate", "--store", str(store), "--id", ASSESSMENT_ID,
            "--profile", str(FIXTURES / "profile.json"),
            "--seed", str(SEED), "--out", str(responses_path), env=env)
        cli("assessment", "close", "--store", str(store),
            "--id", ASSESSMENT_ID, env=env)
        cli("report", "generate", "--store", str(store), "--id", ASSESSMENT_ID,
            "--format", "structured", "--out", str(report_path), env=env)

        responses = responses_path.read_bytes()
        report = report_path.read_bytes()

    (FIXTURES / "golden_responses.json").write_bytes(responses)
    (FIXTURES / "golden_report.json").write_bytes(report)
    fingerprint = json.loads(report)["bank_fingerprint"]
    print(f"wrote golden_responses.json ({len(responses)} bytes)")
    print(f"wrote golden_report.json ({len(report)} bytes, bank {fingerprint[:16]})")


if __name__ == "__main__":
    main()
