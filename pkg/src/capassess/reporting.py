"""Assembling assessment results into a report.

The report leads with a one-page summary (capability profile plus the
top risks per process) because nobody reads page 30 of an assessment
document. Detail follows: per-attribute tables with reliability flags,
then per-question improvement guidance triggered wherever a question's
knowledge score banded Not or Partially, then the method parameters so
the numbers can be re-derived by hand.
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass
from typing import Iterable

from .bank import ContentBank
from .errors import (
    BankMismatch,
    IncompleteResults,
    InvalidState,
    UnsupportedFormat,
    ValidationError,
)
from .measurement import (
    DEFAULT_CV_THRESHOLD,
    DEFAULT_SCALE,
    AttributeResult,
    ProcessResult,
    QuestionResult,
    ScaleMapping,
)
from .model import CapabilityLevel, ProcessAttribute, RatingBand
from .survey import Assessment, AssessmentState, mark_reported

REPORT_SCHEMA_VERSION = 1

NO_GUIDANCE_OBSERVATION = (
    "Risk identified: responses to this question banded low, "
    "but no improvement guidance is linked to it."
)

RISK_BANDS = (RatingBand.N, RatingBand.P)

TOP_RISKS_PER_PROCESS = 5


@dataclass(frozen=True)
class ReportEntry:
    """One improvement pointer, triggered by a low-scoring question."""

    question_id: str
    process_id: str
    knowledge_score: float
    band: RatingBand
    observation: str
    recommendation: str | None
    guidance_missing: bool

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "process_id": self.process_id,
            "knowledge_score": self.knowledge_score,
            "band": self.band.value,
            "observation": self.observation,
            "recommendation": self.recommendation,
            "guidance_missing": self.guidance_missing,
        }


def select_knowledge_items(
    process_results: Iterable[ProcessResult],
    bank: ContentBank,
) -> dict[str, tuple[ReportEntry, ...]]:
    """Entries per process for every question banded N or P.

    Ordered ascending by knowledge score (riskiest first), ties by
    question id. Questions without a linked knowledge item still appear,
    flagged, so a thin bank cannot silently swallow a risk.
    """
    selected: dict[str, tuple[ReportEntry, ...]] = {}
    for result in process_results:
        entries: list[ReportEntry] = []
        for qr in result.question_results:
            if not bank.has_question(qr.question_id):
                raise BankMismatch(f"result references unknown question {qr.question_id}")
            if qr.band not in RISK_BANDS:
                continue
            assert qr.knowledge_score is not None
            question = bank.question(qr.question_id)
            if question.knowledge_item is None:
                entries.append(ReportEntry(
                    question_id=qr.question_id,
                    process_id=result.process_id,
                    knowledge_score=qr.knowledge_score,
                    band=qr.band,
                    observation=NO_GUIDANCE_OBSERVATION,
                    recommendation=None,
                    guidance_missing=True,
                ))
            else:
                item = bank.knowledge_item(question.knowledge_item)
                entries.append(ReportEntry(
                    question_id=qr.question_id,
                    process_id=result.process_id,
                    knowledge_score=qr.knowledge_score,
                    band=qr.band,
                    observation=item.observation,
                    recommendation=item.recommendation,
                    guidance_missing=False,
                ))
        entries.sort(key=lambda e: (e.knowledge_score, e.question_id))
        selected[result.process_id] = tuple(entries)
    return selected


@dataclass(frozen=True)
class ProcessSection:
    result: ProcessResult
    entries: tuple[ReportEntry, ...]


@dataclass(frozen=True)
class AssessmentReport:
    assessment_id: str
    org_profile: str
    target_level: CapabilityLevel
    created_at: str
    opened_at: str | None
    closed_at: str | None
    reported_at: str | None
    bank_fingerprint: str
    scale: ScaleMapping
    cv_threshold: float
    participant_count: int
    response_count: int
    sections: tuple[ProcessSection, ...]

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "assessment": {
                "id": self.assessment_id,
                "org_profile": self.org_profile,
                "target_level": int(self.target_level),
                "created_at": self.created_at,
                "opened_at": self.opened_at,
                "closed_at": self.closed_at,
                "reported_at": self.reported_at,
            },
            "bank_fingerprint": self.bank_fingerprint,
            "method": {
                "scale": self.scale.to_dict(),
                "cv_threshold": self.cv_threshold,
            },
            "summary": {
                "capability_profile": [
                    {
                        "process_id": s.result.process_id,
                        "process_name": s.result.process_name,
                        "capability_level": int(s.result.capability_level),
                    }
                    for s in self.sections
                ],
                "top_risks": {
                    s.result.process_id: [
                        {
                            "question_id": e.question_id,
                            "knowledge_score": e.knowledge_score,
                            "band": e.band.value,
                        }
                        for e in s.entries[:TOP_RISKS_PER_PROCESS]
                    ]
                    for s in self.sections
                },
                "participant_count": self.participant_count,
                "response_count": self.response_count,
            },
            "processes": [
                dict(s.result.to_dict(), entries=[e.to_dict() for e in s.entries])
                for s in self.sections
            ],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AssessmentReport":
        if raw.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ValidationError(
                f"unsupported report schema_version: {raw.get('schema_version')!r}"
            )
        meta = raw["assessment"]
        method = raw["method"]
        scale_raw = method["scale"]
        scale = ScaleMapping(
            n_percent=scale_raw["answer_percents"]["N"],
            p_percent=scale_raw["answer_percents"]["P"],
            l_percent=scale_raw["answer_percents"]["L"],
            f_percent=scale_raw["answer_percents"]["F"],
            n_upper=scale_raw["band_upper_bounds"]["N"],
            p_upper=scale_raw["band_upper_bounds"]["P"],
            l_upper=scale_raw["band_upper_bounds"]["L"],
        )
        sections = []
        for proc in raw["processes"]:
            attribute_results = tuple(
                AttributeResult(
                    attribute=ProcessAttribute.from_id(a["attribute"]),
                    mean_percent=a["mean_percent"],
                    rating=None if a["rating"] == "Unassessed" else RatingBand(a["rating"]),
                    cv=a["cv"],
                    low_reliability=a["low_reliability"],
                    response_count=a["response_count"],
                    unable_count=a["unable_count"],
                )
                for a in proc["attribute_results"]
            )
            question_results = tuple(
                QuestionResult(
                    question_id=q["question_id"],
                    knowledge_score=q["knowledge_score"],
                    band=None if q["band"] == "Unassessed" else RatingBand(q["band"]),
                    answered_count=q["answered_count"],
                    unable_count=q["unable_count"],
                )
                for q in proc["question_results"]
            )
            result = ProcessResult(
                process_id=proc["process_id"],
                process_name=proc["process_name"],
                capability_level=CapabilityLevel(proc["capability_level"]),
                attribute_results=attribute_results,
                question_results=question_results,
                usable_responses=proc["usable_responses"],
                unable_responses=proc["unable_responses"],
            )
            entries = tuple(
                ReportEntry(
                    question_id=e["question_id"],
                    process_id=e["process_id"],
                    knowledge_score=e["knowledge_score"],
                    band=RatingBand(e["band"]),
                    observation=e["observation"],
                    recommendation=e["recommendation"],
                    guidance_missing=e["guidance_missing"],
                )
                for e in proc["entries"]
            )
            sections.append(ProcessSection(result, entries))
        return cls(
            assessment_id=meta["id"],
            org_profile=meta["org_profile"],
            target_level=CapabilityLevel(meta["target_level"]),
            created_at=meta["created_at"],
            opened_at=meta["opened_at"],
            closed_at=meta["closed_at"],
            reported_at=meta["reported_at"],
            bank_fingerprint=raw["bank_fingerprint"],
            scale=scale,
            cv_threshold=method["cv_threshold"],
            participant_count=raw["summary"]["participant_count"],
            response_count=raw["summary"]["response_count"],
            sections=tuple(sections),
        )


def build_report(
    assessment: Assessment,
    process_results: Iterable[ProcessResult],
    bank: ContentBank,
    scale: ScaleMapping = DEFAULT_SCALE,
    cv_threshold: float = DEFAULT_CV_THRESHOLD,
    now: str | None = None,
) -> AssessmentReport:
    """Assemble the report and move the assessment to Reported.

    Rebuilding from a Reported assessment is allowed and yields
    identical content (the original reported_at is kept).
    """
    if assessment.state not in (AssessmentState.CLOSED, AssessmentState.REPORTED):
        raise InvalidState(
            f"a report needs a Closed assessment, this one is {assessment.state.value}"
        )
    if bank.fingerprint != assessment.bank_fingerprint:
        raise BankMismatch(
            "report must be built with the bank the assessment ran against"
        )

    results = list(process_results)
    got = [r.process_id for r in results]
    if len(set(got)) != len(got):
        raise ValidationError("duplicate process results")
    missing = [pid for pid in assessment.processes if pid not in got]
    extra = [pid for pid in got if pid not in assessment.processes]
    if missing or extra:
        raise IncompleteResults(
            f"results must cover exactly the assessed processes; "
            f"missing {missing or 'none'}, unexpected {extra or 'none'}"
        )
    by_id = {r.process_id: r for r in results}
    ordered = [by_id[pid] for pid in assessment.processes]

    entries = select_knowledge_items(ordered, bank)
    if assessment.state is AssessmentState.CLOSED:
        mark_reported(assessment, now)

    return AssessmentReport(
        assessment_id=assessment.id,
        org_profile=assessment.org_profile,
        target_level=assessment.target_level,
        created_at=assessment.created_at,
        opened_at=assessment.opened_at,
        closed_at=assessment.closed_at,
        reported_at=assessment.reported_at,
        bank_fingerprint=assessment.bank_fingerprint,
        scale=scale,
        cv_threshold=cv_threshold,
        participant_count=len(assessment.participants),
        response_count=len(assessment.responses),
        sections=tuple(ProcessSection(r, entries[r.process_id]) for r in ordered),
    )


def render_report(report: AssessmentReport, format: str = "structured") -> bytes:
    if format == "structured":
        text = json.dumps(report.to_dict(), indent=2, ensure_ascii=False, sort_keys=True)
        return (text + "\n").encode("utf-8")
    if format == "markdown":
        return _render_markdown(report).encode("utf-8")
    if format == "html":
        return _render_html(report).encode("utf-8")
    raise UnsupportedFormat(f"unknown report format: {format!r}")


def parse_report(data: bytes | str) -> AssessmentReport:
    """Inverse of the structured rendering."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not a structured report: {exc}") from None
    return AssessmentReport.from_dict(raw)


def _pct(value: float | None) -> str:
    return "-" if value is None else f"{value:.1f}%"


def _cv(value: float | None) -> str:
    return "-" if value is None else f"{value:.4f}"


def _rating(rating: RatingBand | None) -> str:
    return rating.value if rating is not None else "Unassessed"


def _render_markdown(report: AssessmentReport) -> str:
    lines: list[str] = []
    out = lines.append

    out("# Process Capability Self-Assessment Report")
    out("")
    out(f"Assessment `{report.assessment_id}` | reported {report.reported_at}")
    out("")
    out("## Summary")
    out("")
    out(f"- Organisation context: {report.org_profile}")
    out(f"- Target capability level: CL{int(report.target_level)}")
    out(f"- Participants: {report.participant_count}")
    out(f"- Responses recorded: {report.response_count}")
    out("")
    out("| Process | Capability level |")
    out("| --- | --- |")
    for section in report.sections:
        r = section.result
        out(f"| {r.process_name} | CL{int(r.capability_level)} |")
    out("")
    for section in report.sections:
        risks = section.entries[:TOP_RISKS_PER_PROCESS]
        out(f"Top risks for {section.result.process_name}:")
        if not risks:
            out("- none: no question banded Not or Partially")
        for i, entry in enumerate(risks, start=1):
            out(f"{i}. `{entry.question_id}` scored {_pct(entry.knowledge_score)} ({entry.band.value})")
        out("")

    out("## Capability Profile")
    out("")
    out("| Process | Level | " + " | ".join(a.id for a in ProcessAttribute) + " |")
    out("| --- | --- | " + " | ".join("---" for _ in ProcessAttribute) + " |")
    for section in report.sections:
        r = section.result
        ratings = " | ".join(_rating(a.rating) for a in r.attribute_results)
        out(f"| {r.process_name} | CL{int(r.capability_level)} | {ratings} |")
    out("")

    out("## Attribute Detail")
    for section in report.sections:
        r = section.result
        out("")
        out(f"### {r.process_name} ({r.process_id})")
        out("")
        out("| Attribute | Mean | Rating | CV | Responses | Unable | Low reliability |")
        out("| --- | --- | --- | --- | --- | --- | --- |")
        for a in r.attribute_results:
            flag = "yes" if a.low_reliability else "no"
            out(f"| {a.attribute.id} | {_pct(a.mean_percent)} | {_rating(a.rating)} "
                f"| {_cv(a.cv)} | {a.response_count} | {a.unable_count} | {flag} |")
    out("")

    out("## Improvement Recommendations")
    any_entries = False
    for section in report.sections:
        if not section.entries:
            continue
        any_entries = True
        out("")
        out(f"### {section.result.process_name} ({section.result.process_id})")
        for entry in section.entries:
            out("")
            out(f"**{entry.question_id}** scored {_pct(entry.knowledge_score)} ({entry.band.value})")
            out("")
            out(f"- Observation: {entry.observation}")
            if entry.recommendation is not None:
                out(f"- Recommendation: {entry.recommendation}")
            if entry.guidance_missing:
                out("- No linked guidance for this question.")
    if not any_entries:
        out("")
        out("No question banded Not or Partially; nothing to recommend.")
    out("")

    out("## Method Notes")
    out("")
    out("- Answers map to percentages: "
        f"N={report.scale.n_percent}, P={report.scale.p_percent}, "
        f"L={report.scale.l_percent}, F={report.scale.f_percent}.")
    out("- Rating bands: "
        f"N up to {report.scale.n_upper}, P up to {report.scale.p_upper}, "
        f"L up to {report.scale.l_upper}, F above; boundary values fall into the lower band.")
    out("- Attribute ratings pool every usable response with equal weight; "
        "'Unable to answer' responses are excluded from scoring.")
    out(f"- Reliability: cv is population standard deviation over mean; flagged above {report.cv_threshold}.")
    out("- Capability level: highest level whose lower levels are all rated F "
        "and whose own attributes are rated at least L.")
    out(f"- Question bank fingerprint: `{report.bank_fingerprint}`.")
    out("")
    return "\n".join(lines)


def _render_html(report: AssessmentReport) -> str:
    markdown = _render_markdown(report)
    body: list[str] = []
    in_table = False
    in_list = False

    def close_blocks():
        nonlocal in_table, in_list
        if in_table:
            body.append("</table>")
            in_table = False
        if in_list:
            body.append("</ul>")
            in_list = False

    for line in markdown.split("\n"):
        if line.startswith("| ---"):
            continue
        if line.startswith("| "):
            cells = [html.escape(c.strip()) for c in line.strip("|").split("|")]
            if not in_table:
                close_blocks()
                body.append("<table>")
                in_table = True
                body.append("<tr>" + "".join(f"<th>{c}</th>" for c in cells) + "</tr>")
            else:
                body.append("<tr>" + "".join(f"<td>{c}</td>" for c in cells) + "</tr>")
            continue
        if line.startswith("- "):
            if not in_list:
                close_blocks()
                body.append("<ul>")
                in_list = True
            body.append(f"<li>{_inline_html(line[2:])}</li>")
            continue
        close_blocks()
        if line.startswith("# "):
            body.append(f"<h1>{_inline_html(line[2:])}</h1>")
        elif line.startswith("## "):
            body.append(f"<h2>{_inline_html(line[3:])}</h2>")
        elif line.startswith("### "):
            body.append(f"<h3>{_inline_html(line[4:])}</h3>")
        elif line.strip():
            body.append(f"<p>{_inline_html(line)}</p>")
    close_blocks()

    title = html.escape(f"Assessment report {report.assessment_id}")
    return (
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
        f"<title>{title}</title>\n"
        "<style>body{font-family:sans-serif;max-width:60rem;margin:2rem auto;padding:0 1rem}"
        "table{border-collapse:collapse}td,th{border:1px solid #999;padding:0.3rem 0.6rem}"
        "</style>\n</head>\n<body>\n" + "\n".join(body) + "\n</body>\n</html>\n"
    )


def _inline_html(text: str) -> str:
    escaped = html.escape(text)
    for marker, tag in (("**", "strong"), ("`", "code")):
        while True:
            first = escaped.find(marker)
            if first < 0:
                break
            second = escaped.find(marker, first + len(marker))
            if second < 0:
                break
            inner = escaped[first + len(marker):second]
            escaped = f"{escaped[:first]}<{tag}>{inner}</{tag}>{escaped[second + len(marker):]}"
    return escaped
