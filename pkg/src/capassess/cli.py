"""Administrator command line.

Every phase is drivable offline against a store directory: create an
assessment, register or simulate participants, collect responses, close,
measure, and render the report. The service exposes the same operations
over HTTP against the same store format; the two never run at once (the
store's lock sees to it).
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .bank import ContentBank, bank_stats, load_bank, load_sample_bank
from .errors import DomainError, ParseError
from .model import CapabilityLevel, Role
from .reporting import render_report
from .selection import ratings_from_dict, score_processes
from .simulate import SimulationProfile, generate_responses
from .store import Store
from .survey import AssessmentState

SAMPLE_BANK_ALIAS = "sample-bank"


def _load_bank_arg(path: str | None) -> ContentBank:
    if path is None or path == SAMPLE_BANK_ALIAS:
        return load_sample_bank()
    return load_bank(path)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None


def _echo_json(data: object) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False))


def domain_errors_exit_1(fn):
    """Print domain failures as diagnostics and exit 1 (usage errors stay 2)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DomainError as exc:
            click.echo(f"error ({exc.code}): {exc.message}", err=True)
            sys.exit(1)

    return wrapper


bank_option = click.option(
    "--bank", "-b", "bank_path", default=None, envvar="BANK_PATH",
    help=f"Question bank JSON (default: the bundled {SAMPLE_BANK_ALIAS}).",
)
store_option = click.option(
    "--store", "-s", "store_dir", required=True, envvar="DATA_DIR",
    type=click.Path(file_okay=False), help="Store data directory.",
)
assessment_option = click.option(
    "--id", "assessment_id", required=True, help="Assessment id.",
)


@click.group()
@click.version_option(package_name="capassess")
def main() -> None:
    """Survey-based process capability self-assessment."""


# -- bank ---------------------------------------------------------------------

@main.group("bank")
def bank_group() -> None:
    """Inspect and validate question banks."""


@bank_group.command("validate")
@click.argument("bank_path")
@domain_errors_exit_1
def bank_validate(bank_path: str) -> None:
    """Load BANK_PATH and report whether it is usable."""
    bank = _load_bank_arg(bank_path)
    click.echo(
        f"ok: {len(bank.questions)} questions, {len(bank.knowledge_items)} knowledge items, "
        f"fingerprint {bank.fingerprint[:16]}"
    )


@bank_group.command("stats")
@click.argument("bank_path", required=False)
@click.option("--output", type=click.Choice(["table", "structured"]), default="table")
@domain_errors_exit_1
def bank_stats_cmd(bank_path: str | None, output: str) -> None:
    """Question and knowledge-item counts for a bank."""
    bank = _load_bank_arg(bank_path)
    stats = bank_stats(bank)
    if output == "structured":
        _echo_json(dict(stats.to_dict(), fingerprint=bank.fingerprint))
        return
    click.echo(f"processes:                  {stats.process_count}")
    click.echo(f"questions:                  {stats.question_count}")
    click.echo(f"  process-specific (PA1.1): {stats.process_specific_count}")
    click.echo(f"  generic (PA2.1-PA5.2):    {stats.generic_count}")
    click.echo(f"knowledge items:            {stats.knowledge_item_count}")
    click.echo(f"questions without an item:  {len(stats.questions_without_items)}")
    click.echo("per attribute: " + ", ".join(
        f"{attr}={count}" for attr, count in stats.per_attribute.items()
    ))
    click.echo("per role: " + ", ".join(
        f"{role}={count}" for role, count in stats.per_role.items()
    ))
    click.echo("level-1 questions per process: " + ", ".join(
        f"{pid}={count}" for pid, count in stats.per_process_level1.items()
    ))
    click.echo(f"fingerprint: {bank.fingerprint}")


# -- selection ------------------------------------------------------------------

@main.command("select")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--weights", default="0.5,0.5", show_default=True,
              help="importance,gap weights summing to 1.")
@click.option("--top", "top_k", type=int, default=None, help="Only print the first K processes.")
@click.option("--output", type=click.Choice(["table", "structured"]), default="table")
@domain_errors_exit_1
def select_cmd(input_path: str, weights: str, top_k: int | None, output: str) -> None:
    """Rank candidate processes from a triage ratings file."""
    try:
        w_importance, w_gap = (float(part) for part in weights.split(","))
    except ValueError:
        raise click.UsageError("--weights must look like '0.5,0.5'") from None
    drivers, gaps = ratings_from_dict(_read_json(input_path))
    scores = score_processes(drivers, gaps, w_importance, w_gap)
    if top_k is not None:
        scores = scores[:top_k]
    if output == "structured":
        _echo_json({"scores": [s.to_dict() for s in scores]})
        return
    click.echo(f"{'rank':<6}{'process':<12}{'combined':<10}{'importance':<12}{'gap':<10}")
    for s in scores:
        click.echo(
            f"{s.rank:<6}{s.process_id:<12}{s.combined:<10.4f}"
            f"{s.importance_norm:<12.4f}{s.gap_norm:<10.4f}"
        )


# -- assessment lifecycle ---------------------------------------------------------

@main.group("assessment")
def assessment_group() -> None:
    """Create and steer assessments in a store directory."""


@assessment_group.command("create")
@store_option
@bank_option
@click.option("--org", "org_profile", required=True, help="Organisation context line.")
@click.option("--process", "processes", multiple=True, required=True,
              help="Process id to assess; repeatable.")
@click.option("--target", "target_level", type=click.IntRange(1, 5), default=5,
              show_default=True, help="Target capability level.")
@click.option("--id", "assessment_id", default=None, help="Explicit assessment id.")
@domain_errors_exit_1
def assessment_create(store_dir: str, bank_path: str | None, org_profile: str,
                      processes: tuple[str, ...], target_level: int,
                      assessment_id: str | None) -> None:
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        a = store.create_assessment(
            org_profile, list(processes), CapabilityLevel(target_level), assessment_id
        )
    click.echo(f"created {a.id} ({', '.join(a.processes)}) targeting CL{int(a.target_level)}")


@assessment_group.command("open")
@store_option
@bank_option
@assessment_option
@domain_errors_exit_1
def assessment_open(store_dir: str, bank_path: str | None, assessment_id: str) -> None:
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        a = store.open_assessment(assessment_id)
    click.echo(f"{a.id} is now {a.state.value}")


@assessment_group.command("close")
@store_option
@bank_option
@assessment_option
@domain_errors_exit_1
def assessment_close(store_dir: str, bank_path: str | None, assessment_id: str) -> None:
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        a = store.close_assessment(assessment_id)
    click.echo(f"{a.id} is now {a.state.value}")


@assessment_group.command("register")
@store_option
@bank_option
@assessment_option
@click.option("--name", "display_name", required=True)
@click.option("--assign", "assignments", multiple=True, required=True,
              metavar="PROCESS:ROLE", help="e.g. SLM:ProcessManager; repeatable.")
@click.option("--participant-id", default=None)
@domain_errors_exit_1
def assessment_register(store_dir: str, bank_path: str | None, assessment_id: str,
                        display_name: str, assignments: tuple[str, ...],
                        participant_id: str | None) -> None:
    """Register a participant; prints the access token exactly once."""
    parsed: list[tuple[str, Role]] = []
    for raw in assignments:
        process, sep, role = raw.partition(":")
        if not sep:
            raise click.UsageError(f"--assign needs PROCESS:ROLE, got {raw!r}")
        try:
            parsed.append((process, Role(role)))
        except ValueError:
            raise click.UsageError(
                f"unknown role {role!r}; choose from {[r.value for r in Role]}"
            ) from None
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        participant, token = store.register_participant(
            assessment_id, display_name, parsed, participant_id
        )
    click.echo(f"registered {participant.id} ({participant.display_name})")
    click.echo(f"token (shown once, store it now): {token}")


# -- responses ---------------------------------------------------------------------

@main.command("respond")
@store_option
@bank_option
@assessment_option
@click.option("--file", "file_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Bulk response file (see README for the format).")
@domain_errors_exit_1
def respond_cmd(store_dir: str, bank_path: str | None, assessment_id: str,
                file_path: str) -> None:
    """Record responses from a file on participants' behalf."""
    payload = _read_json(file_path)
    rows = payload.get("responses") if isinstance(payload, dict) else None
    if not isinstance(rows, list):
        raise ParseError("responses: expected a list")
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        for i, row in enumerate(rows):
            if not isinstance(row, dict):
                raise ParseError(f"responses[{i}]: expected an object")
            try:
                store.record_response(
                    assessment_id,
                    row["participant"],
                    row["question"],
                    row["answer"],
                    row.get("process"),
                )
            except KeyError as exc:
                raise ParseError(f"responses[{i}]: missing key {exc.args[0]!r}") from None
    click.echo(f"recorded {len(rows)} responses on {assessment_id}")


@main.command("simulate")
@store_option
@bank_option
@assessment_option
@click.option("--profile", "profile_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="Also write the drawn responses to this file.")
@domain_errors_exit_1
def simulate_cmd(store_dir: str, bank_path: str | None, assessment_id: str,
                 profile_path: str, seed: int, out_path: str | None) -> None:
    """Register a roster, draw seeded answers, and record them.

    Registers any roster member not yet present, opens the assessment if
    it is still Draft, then records one drawn answer per allocated
    question. Deterministic for a fixed profile, seed, and clock.
    """
    profile = SimulationProfile.from_dict(_read_json(profile_path))
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        assessment = store.assessment(assessment_id)
        for entry in profile.roster:
            if entry.participant_id not in assessment.participants:
                store.register_participant(
                    assessment_id, entry.display_name, list(entry.assignments),
                    participant_id=entry.participant_id,
                )
        if assessment.state is AssessmentState.DRAFT:
            store.open_assessment(assessment_id)
        rows = generate_responses(bank, assessment, profile, seed)
        if out_path is not None:
            document = json.dumps(
                {"assessment": assessment_id, "seed": seed, "responses": rows},
                indent=2, sort_keys=True, ensure_ascii=False,
            )
            Path(out_path).write_text(document + "\n", encoding="utf-8")
        for row in rows:
            store.record_response(
                assessment_id, row["participant"], row["question"],
                row["answer"], row["process"],
            )
    click.echo(f"simulated {len(rows)} responses on {assessment_id} (seed {seed})")


# -- measurement and reporting --------------------------------------------------------

@main.command("measure")
@store_option
@bank_option
@assessment_option
@click.option("--output", type=click.Choice(["table", "structured"]), default="table")
@domain_errors_exit_1
def measure_cmd(store_dir: str, bank_path: str | None, assessment_id: str, output: str) -> None:
    """Score a closed assessment and print per-process results."""
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        results = store.results(assessment_id)
    if output == "structured":
        _echo_json({
            "assessment_id": assessment_id,
            "results": [r.to_dict() for r in results],
        })
        return
    for result in results:
        click.echo(f"{result.process_id}  {result.process_name}: CL{int(result.capability_level)}")
        for attr in result.attribute_results:
            mean = "-" if attr.mean_percent is None else f"{attr.mean_percent:6.2f}%"
            rating = attr.rating.value if attr.rating is not None else "Unassessed"
            flag = "  (low reliability)" if attr.low_reliability else ""
            click.echo(f"  {attr.attribute.id}  {mean}  {rating}{flag}")


@main.group("report")
def report_group() -> None:
    """Build and render assessment reports."""


@report_group.command("generate")
@store_option
@bank_option
@assessment_option
@click.option("--format", "fmt", type=click.Choice(["structured", "markdown", "html"]),
              default="structured", show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="Write to a file instead of stdout.")
@domain_errors_exit_1
def report_generate(store_dir: str, bank_path: str | None, assessment_id: str,
                    fmt: str, out_path: str | None) -> None:
    """Build the report (first build marks the assessment Reported)."""
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        report = store.build_report(assessment_id)
    rendered = render_report(report, fmt)
    if out_path is not None:
        Path(out_path).write_bytes(rendered)
        click.echo(f"wrote {out_path}")
    else:
        sys.stdout.buffer.write(rendered)
        sys.stdout.buffer.flush()


@main.command("progress")
@store_option
@bank_option
@assessment_option
@click.option("--output", type=click.Choice(["table", "structured"]), default="table")
@domain_errors_exit_1
def progress_cmd(store_dir: str, bank_path: str | None, assessment_id: str, output: str) -> None:
    """Participation snapshot for an assessment."""
    bank = _load_bank_arg(bank_path)
    with Store(store_dir, bank) as store:
        snapshot = store.progress(assessment_id)
    if output == "structured":
        _echo_json(snapshot.to_dict())
        return
    click.echo(f"{assessment_id} [{snapshot.state.value}] "
               f"{snapshot.answered}/{snapshot.allocated} answered "
               f"({snapshot.completion:.0%})")
    for row in snapshot.participants:
        note = "  (nothing allocated)" if row.zero_allocation else ""
        click.echo(f"  {row.participant_id}  {row.display_name}: "
                   f"{row.answered}/{row.allocated} ({row.completion:.0%}){note}")


# -- service --------------------------------------------------------------------------

@main.command("serve")
@click.option("--port", type=int, default=8000, envvar="PORT", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", required=True, envvar="DATA_DIR",
              type=click.Path(file_okay=False))
@bank_option
@click.option("--facilitator-key", required=True, envvar="FACILITATOR_KEY",
              help="Shared secret for facilitator endpoints.")
@click.option("--webui-dir", default=None, type=click.Path(file_okay=False, exists=True),
              help="Optional static web UI to serve under /ui.")
@domain_errors_exit_1
def serve_cmd(port: int, host: str, data_dir: str, bank_path: str | None,
              facilitator_key: str, webui_dir: str | None) -> None:
    """Run the HTTP service on a store directory."""
    from .service import serve

    bank = _load_bank_arg(bank_path)
    serve(
        bank=bank,
        data_dir=data_dir,
        facilitator_key=facilitator_key,
        host=host,
        port=port,
        webui_dir=webui_dir,
    )


if __name__ == "__main__":
    main()
