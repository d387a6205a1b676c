"""Survey-based process capability self-assessment.

Rank candidate processes, run a role-targeted questionnaire over a
question bank, score attribute achievement on the N/P/L/F scale, read
off capability levels, and emit an improvement report with knowledge
items triggered by low-scoring questions.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .bank import ContentBank, bank_stats, load_bank, load_sample_bank, questions_for
from .errors import DomainError
from .measurement import (
    DEFAULT_SCALE,
    ProcessResult,
    ScaleMapping,
    assess_process,
    determine_capability_level,
    score_responses,
)
from .model import AnswerOption, CapabilityLevel, ProcessAttribute, RatingBand, Role
from .reporting import AssessmentReport, build_report, render_report, select_knowledge_items
from .selection import DriverRating, GapRating, score_processes
from .survey import (
    Assessment,
    allocate_questionnaire,
    close_assessment,
    create_assessment,
    open_assessment,
    progress,
    register_participant,
    submit_response,
)

__all__ = [
    "__version__",
    "AnswerOption",
    "Assessment",
    "AssessmentReport",
    "CapabilityLevel",
    "ContentBank",
    "DEFAULT_SCALE",
    "DomainError",
    "DriverRating",
    "GapRating",
    "ProcessAttribute",
    "ProcessResult",
    "RatingBand",
    "Role",
    "ScaleMapping",
    "allocate_questionnaire",
    "assess_process",
    "bank_stats",
    "build_report",
    "close_assessment",
    "create_assessment",
    "determine_capability_level",
    "load_bank",
    "load_sample_bank",
    "open_assessment",
    "progress",
    "questions_for",
    "register_participant",
    "render_report",
    "score_processes",
    "score_responses",
    "select_knowledge_items",
    "submit_response",
]
