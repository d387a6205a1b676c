"""Turning raw answers into attribute ratings and capability levels.

Answers arrive on a four-point achievement scale (with an opt-out for
respondents who cannot judge). Each scale point maps to the midpoint of
a percentage band; per-question and per-attribute results are arithmetic
means over those percentages, and the mean is folded back into a band to
give the attribute its rating. Capability levels then follow the usual
ladder reading over the nine attribute ratings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .bank import ContentBank
from .errors import (
    EmptyInput,
    InvalidState,
    MissingAttribute,
    MixedQuestionIds,
    OutOfRange,
    UnknownProcess,
    ValidationError,
)
from .model import (
    ALL_ATTRIBUTES,
    AnswerOption,
    CapabilityLevel,
    ProcessAttribute,
    RatingBand,
)
from .survey import Assessment, AssessmentState, responses_for_process


@dataclass(frozen=True)
class ScaleMapping:
    """Percent value per scale point and the band cut points.

    An answer maps to the midpoint of its band. When a mean is folded
    back into a band, values on a boundary belong to the lower band:
    a mean of exactly ``p_upper`` still reads as P.
    """

    n_percent: float = 7.5
    p_percent: float = 32.5
    l_percent: float = 67.5
    f_percent: float = 92.5
    n_upper: float = 15.0
    p_upper: float = 50.0
    l_upper: float = 85.0

    def __post_init__(self) -> None:
        if not 0 <= self.n_percent < self.p_percent < self.l_percent < self.f_percent <= 100:
            raise ValidationError("answer percents must increase N < P < L < F within [0, 100]")
        if not (0 < self.n_upper < self.p_upper < self.l_upper < 100):
            raise ValidationError("band boundaries must be strictly increasing within (0, 100)")

    def to_dict(self) -> dict:
        return {
            "answer_percents": {
                "N": self.n_percent,
                "P": self.p_percent,
                "L": self.l_percent,
                "F": self.f_percent,
            },
            "band_upper_bounds": {
                "N": self.n_upper,
                "P": self.p_upper,
                "L": self.l_upper,
                "F": 100.0,
            },
        }


DEFAULT_SCALE = ScaleMapping()

DEFAULT_CV_THRESHOLD = 0.5


def answer_to_percent(answer: AnswerOption | str, scale: ScaleMapping = DEFAULT_SCALE) -> float:
    answer = AnswerOption(answer)
    if answer is AnswerOption.N:
        return scale.n_percent
    if answer is AnswerOption.P:
        return scale.p_percent
    if answer is AnswerOption.L:
        return scale.l_percent
    if answer is AnswerOption.F:
        return scale.f_percent
    raise ValidationError("'Unable' carries no achievement value")


def band_of(percent: float, scale: ScaleMapping = DEFAULT_SCALE) -> RatingBand:
    """Band for a percentage; boundary values fall into the lower band."""
    if math.isnan(percent) or not 0 <= percent <= 100:
        raise OutOfRange(f"percent must be within [0, 100], got {percent}")
    if percent <= scale.n_upper:
        return RatingBand.N
    if percent <= scale.p_upper:
        return RatingBand.P
    if percent <= scale.l_upper:
        return RatingBand.L
    return RatingBand.F


@dataclass(frozen=True)
class QuestionResult:
    """Knowledge score for one question: mean percent over usable answers.

    ``knowledge_score`` and ``band`` are None when every response opted
    out; such a question is reported but never triggers guidance.
    """

    question_id: str
    knowledge_score: float | None
    band: RatingBand | None
    answered_count: int
    unable_count: int

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "knowledge_score": self.knowledge_score,
            "band": self.band.value if self.band is not None else "Unassessed",
            "answered_count": self.answered_count,
            "unable_count": self.unable_count,
        }


@dataclass(frozen=True)
class AttributeResult:
    """Pooled rating for one attribute.

    ``rating`` is None when not a single usable answer exists for the
    attribute; such an attribute is reported as Unassessed and blocks
    every capability level at or above its own.
    """

    attribute: ProcessAttribute
    mean_percent: float | None
    rating: RatingBand | None
    cv: float | None
    low_reliability: bool
    response_count: int
    unable_count: int

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute.id,
            "level": int(self.attribute.level),
            "mean_percent": self.mean_percent,
            "rating": self.rating.value if self.rating is not None else "Unassessed",
            "cv": self.cv,
            "low_reliability": self.low_reliability,
            "response_count": self.response_count,
            "unable_count": self.unable_count,
        }


def question_result(
    responses: Iterable[tuple[str, AnswerOption | str]],
    scale: ScaleMapping = DEFAULT_SCALE,
) -> QuestionResult:
    """Score one question from its (question id, answer) response pairs."""
    question_id: str | None = None
    percents: list[float] = []
    unable = 0
    for qid, raw in responses:
        if question_id is None:
            question_id = qid
        elif qid != question_id:
            raise MixedQuestionIds(f"expected only {question_id}, also got {qid}")
        answer = AnswerOption(raw)
        if answer is AnswerOption.UNABLE:
            unable += 1
        else:
            percents.append(answer_to_percent(answer, scale))
    if question_id is None:
        raise EmptyInput("no responses given")
    if not percents:
        return QuestionResult(question_id, None, None, 0, unable)
    mean = sum(percents) / len(percents)
    return QuestionResult(question_id, mean, band_of(mean, scale), len(percents), unable)


def attribute_result(
    attribute: ProcessAttribute,
    answers: Iterable[AnswerOption | str],
    scale: ScaleMapping = DEFAULT_SCALE,
    cv_threshold: float = DEFAULT_CV_THRESHOLD,
) -> AttributeResult:
    """Pooled mean over every usable answer given to the attribute.

    Pooling means a question answered by ten people contributes ten
    values, not one: respondents weigh equally, questions do not. The
    spread signal cv is the population standard deviation over the mean,
    left undefined for fewer than two usable answers or a zero mean.
    """
    percents: list[float] = []
    unable = 0
    for raw in answers:
        answer = AnswerOption(raw)
        if answer is AnswerOption.UNABLE:
            unable += 1
        else:
            percents.append(answer_to_percent(answer, scale))

    if not percents:
        return AttributeResult(attribute, None, None, None, False, 0, unable)

    mean = sum(percents) / len(percents)
    cv = None
    if len(percents) >= 2 and mean > 0:
        variance = sum((p - mean) ** 2 for p in percents) / len(percents)
        cv = math.sqrt(variance) / mean
    low = cv is not None and cv > cv_threshold
    return AttributeResult(attribute, mean, band_of(mean, scale), cv, low, len(percents), unable)


def determine_capability_level(
    ratings: Mapping[ProcessAttribute, RatingBand | None],
) -> CapabilityLevel:
    """Read the capability level off the nine attribute ratings.

    The level reached is the highest L where every attribute below
    level L is rated F and every attribute at level L is rated L or F.
    An unrated (None) attribute satisfies neither condition, so a single
    unassessed attribute caps the result below its own level.
    """
    for attr in ALL_ATTRIBUTES:
        if attr not in ratings:
            raise MissingAttribute(f"no rating supplied for {attr.id}")

    achieved = CapabilityLevel.CL0
    for candidate in (CapabilityLevel.CL1, CapabilityLevel.CL2, CapabilityLevel.CL3,
                      CapabilityLevel.CL4, CapabilityLevel.CL5):
        ok = True
        for attr in ALL_ATTRIBUTES:
            rating = ratings[attr]
            if attr.level < candidate:
                ok = ok and rating is RatingBand.F
            elif attr.level == candidate:
                ok = ok and rating in (RatingBand.F, RatingBand.L)
        if not ok:
            break
        achieved = candidate
    return achieved


@dataclass(frozen=True)
class ProcessResult:
    process_id: str
    process_name: str
    capability_level: CapabilityLevel
    attribute_results: tuple[AttributeResult, ...]
    question_results: tuple[QuestionResult, ...]
    usable_responses: int
    unable_responses: int

    def attribute(self, attribute: ProcessAttribute) -> AttributeResult:
        for result in self.attribute_results:
            if result.attribute is attribute:
                return result
        raise MissingAttribute(attribute.id)

    def to_dict(self) -> dict:
        return {
            "process_id": self.process_id,
            "process_name": self.process_name,
            "capability_level": int(self.capability_level),
            "attribute_results": [a.to_dict() for a in self.attribute_results],
            "question_results": [q.to_dict() for q in self.question_results],
            "usable_responses": self.usable_responses,
            "unable_responses": self.unable_responses,
        }


def score_responses(
    bank: ContentBank,
    process_id: str,
    responses: Iterable[tuple[str, AnswerOption | str]],
    scale: ScaleMapping = DEFAULT_SCALE,
    cv_threshold: float = DEFAULT_CV_THRESHOLD,
) -> ProcessResult:
    """Score one process from raw (question id, answer) pairs.

    Every pair must reference a bank question applicable to the process:
    either scoped to it or generic. Attributes that received no pairs at
    all still appear in the result, rated Unassessed.
    """
    if not bank.has_process(process_id):
        raise UnknownProcess(process_id)

    by_question: dict[str, list[tuple[str, AnswerOption]]] = {}
    for qid, raw in responses:
        if not bank.has_question(qid):
            raise ValidationError(f"unknown question id: {qid}")
        question = bank.question(qid)
        if question.scope is not None and question.scope != process_id:
            raise ValidationError(f"{qid} is scoped to {question.scope}, not {process_id}")
        by_question.setdefault(qid, []).append((qid, AnswerOption(raw)))

    attr_order = {attr: i for i, attr in enumerate(ALL_ATTRIBUTES)}
    question_results = [question_result(pairs, scale) for pairs in by_question.values()]
    question_results.sort(
        key=lambda r: (attr_order[bank.question(r.question_id).attribute], r.question_id)
    )

    pooled: dict[ProcessAttribute, list[AnswerOption]] = {a: [] for a in ALL_ATTRIBUTES}
    for qid, pairs in by_question.items():
        pooled[bank.question(qid).attribute].extend(answer for _qid, answer in pairs)

    attribute_results = tuple(
        attribute_result(attr, pooled[attr], scale, cv_threshold) for attr in ALL_ATTRIBUTES
    )
    level = determine_capability_level({a.attribute: a.rating for a in attribute_results})

    process = bank.process(process_id)
    return ProcessResult(
        process_id=process.id,
        process_name=process.name,
        capability_level=level,
        attribute_results=attribute_results,
        question_results=tuple(question_results),
        usable_responses=sum(a.response_count for a in attribute_results),
        unable_responses=sum(a.unable_count for a in attribute_results),
    )


def assess_process(
    bank: ContentBank,
    assessment: Assessment,
    process_id: str,
    scale: ScaleMapping = DEFAULT_SCALE,
    cv_threshold: float = DEFAULT_CV_THRESHOLD,
) -> ProcessResult:
    """Score one of a finished assessment's processes.

    Only Closed (or already Reported) assessments may be measured;
    scoring an Open survey would hand facilitators a moving target.
    """
    if assessment.state not in (AssessmentState.CLOSED, AssessmentState.REPORTED):
        raise InvalidState(
            f"measurement needs a Closed assessment, this one is {assessment.state.value}"
        )
    return score_responses(
        bank, process_id, responses_for_process(assessment, process_id), scale, cv_threshold
    )
