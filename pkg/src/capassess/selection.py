"""Deciding which processes are worth a full assessment.

Before anyone answers capability questions, a short triage round
collects two kinds of ratings per candidate process: how important the
process is to a business driver (scored 1..5 against one of four
scorecard perspectives) and the gap between the service level
stakeholders expect and what they perceive today (each 1..7). Processes
are ranked by a weighted blend of normalised importance and normalised
positive gap, so assessment effort lands where it hurts most.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import (
    EmptyInput,
    InvalidWeights,
    MismatchedProcessSets,
    OutOfRange,
    ParseError,
    ValidationError,
)

IMPORTANCE_MIN, IMPORTANCE_MAX = 1, 5
LEVEL_MIN, LEVEL_MAX = 1, 7


class Perspective(str, Enum):
    FINANCIAL = "Financial"
    CUSTOMER = "Customer"
    INTERNAL = "Internal"
    LEARNING = "Learning"


@dataclass(frozen=True)
class DriverRating:
    """Importance of one process to one business driver."""

    process_id: str
    perspective: Perspective
    importance: int

    def __post_init__(self) -> None:
        if not self.process_id:
            raise ValidationError("process_id must be non-empty")
        if not IMPORTANCE_MIN <= self.importance <= IMPORTANCE_MAX:
            raise OutOfRange(
                f"importance for {self.process_id} must be in "
                f"[{IMPORTANCE_MIN}, {IMPORTANCE_MAX}], got {self.importance}"
            )


@dataclass(frozen=True)
class GapRating:
    """Expected vs. perceived service level for one process."""

    process_id: str
    expectation: int
    perception: int

    def __post_init__(self) -> None:
        if not self.process_id:
            raise ValidationError("process_id must be non-empty")
        for label, value in (("expectation", self.expectation), ("perception", self.perception)):
            if not LEVEL_MIN <= value <= LEVEL_MAX:
                raise OutOfRange(
                    f"{label} for {self.process_id} must be in "
                    f"[{LEVEL_MIN}, {LEVEL_MAX}], got {value}"
                )


@dataclass(frozen=True)
class ProcessScore:
    process_id: str
    importance_norm: float
    gap_norm: float
    combined: float
    rank: int

    def to_dict(self) -> dict:
        return {
            "process_id": self.process_id,
            "importance_norm": self.importance_norm,
            "gap_norm": self.gap_norm,
            "combined": self.combined,
            "rank": self.rank,
        }


def score_processes(
    drivers: Iterable[DriverRating],
    gaps: Iterable[GapRating],
    w_importance: float = 0.5,
    w_gap: float = 0.5,
) -> tuple[ProcessScore, ...]:
    """Pool ratings per process and rank by the combined score.

    importance_norm is the mean importance rescaled from 1..5 to [0, 1].
    gap_norm is the mean of (expectation - perception) floored at zero
    and divided by the widest possible gap; over-delivery earns nothing.
    combined = w_importance * importance_norm + w_gap * gap_norm.

    Results come back sorted by combined descending, then gap_norm
    descending, then process id. Ranks are dense: exact ties on
    (combined, gap_norm) share a rank.
    """
    if w_importance < 0 or w_gap < 0 or abs(w_importance + w_gap - 1.0) > 1e-9:
        raise InvalidWeights(
            f"weights must be non-negative and sum to 1, got {w_importance} and {w_gap}"
        )

    driver_list = list(drivers)
    gap_list = list(gaps)
    if not driver_list:
        raise EmptyInput("no driver ratings")
    if not gap_list:
        raise EmptyInput("no gap ratings")

    driver_ids = {d.process_id for d in driver_list}
    gap_ids = {g.process_id for g in gap_list}
    if driver_ids != gap_ids:
        raise MismatchedProcessSets(
            f"drivers cover {sorted(driver_ids)} but gaps cover {sorted(gap_ids)}"
        )

    scored = []
    for pid in sorted(driver_ids):
        importances = [d.importance for d in driver_list if d.process_id == pid]
        importance = sum(importances) / len(importances)
        importance_norm = (importance - IMPORTANCE_MIN) / (IMPORTANCE_MAX - IMPORTANCE_MIN)

        deltas = [g.expectation - g.perception for g in gap_list if g.process_id == pid]
        gap = sum(deltas) / len(deltas)
        gap_norm = max(0.0, gap) / (LEVEL_MAX - LEVEL_MIN)

        combined = w_importance * importance_norm + w_gap * gap_norm
        scored.append((pid, importance_norm, gap_norm, combined))

    scored.sort(key=lambda s: (-s[3], -s[2], s[0]))

    results: list[ProcessScore] = []
    rank = 0
    previous: tuple[float, float] | None = None
    for pid, importance_norm, gap_norm, combined in scored:
        key = (combined, gap_norm)
        if key != previous:
            rank += 1
            previous = key
        results.append(ProcessScore(pid, importance_norm, gap_norm, combined, rank))
    return tuple(results)


def ratings_from_dict(payload: dict) -> tuple[list[DriverRating], list[GapRating]]:
    """Parse the triage input document used by the CLI.

    Expected shape::

        {"drivers": [{"process": "SLM", "perspective": "Customer", "importance": 4}, ...],
         "gaps": [{"process": "SLM", "expectation": 6, "perception": 3}, ...]}
    """
    if not isinstance(payload, dict):
        raise ParseError("triage input must be a JSON object")

    raw_drivers = payload.get("drivers")
    raw_gaps = payload.get("gaps")
    if not isinstance(raw_drivers, list):
        raise ParseError("drivers: expected a list")
    if not isinstance(raw_gaps, list):
        raise ParseError("gaps: expected a list")

    drivers: list[DriverRating] = []
    for i, entry in enumerate(raw_drivers):
        where = f"drivers[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        process = entry.get("process")
        perspective = entry.get("perspective")
        importance = entry.get("importance")
        if not isinstance(process, str):
            raise ParseError(f"{where}.process: expected a string")
        try:
            perspective = Perspective(perspective)
        except ValueError:
            raise ParseError(
                f"{where}.perspective: expected one of "
                f"{[p.value for p in Perspective]}, got {perspective!r}"
            ) from None
        if isinstance(importance, bool) or not isinstance(importance, int):
            raise ParseError(f"{where}.importance: expected an integer")
        drivers.append(DriverRating(process, perspective, importance))

    gaps: list[GapRating] = []
    for i, entry in enumerate(raw_gaps):
        where = f"gaps[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        process = entry.get("process")
        if not isinstance(process, str):
            raise ParseError(f"{where}.process: expected a string")
        values = {}
        for label in ("expectation", "perception"):
            value = entry.get(label)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ParseError(f"{where}.{label}: expected an integer")
            values[label] = value
        gaps.append(GapRating(process, values["expectation"], values["perception"]))

    return drivers, gaps
