"""Scripted survey populations for pipelines and tests.

A simulation profile names a participant roster and answer
distributions keyed by (process, attribute, role), any of which may be
the wildcard "*". Draws use a seeded generator and a fixed iteration
order (roster order, then each participant's questionnaire order), so a
profile plus a seed always produces the same response set, byte for
byte. This is test tooling: it says nothing about how real respondents
behave.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bank import ContentBank
from .errors import ParseError, ValidationError
from .model import Role
from .survey import Assessment, allocate_questionnaire

ANSWER_ORDER = ("N", "P", "L", "F", "Unable")

WILDCARD = "*"


@dataclass(frozen=True)
class DistributionRule:
    """Answer weights for one (process, attribute, role) slot.

    More specific rules beat wildcards; among equally specific matches
    the one listed last wins, so profiles can layer overrides the way
    stylesheets do.
    """

    process: str
    attribute: str
    role: str
    weights: tuple[tuple[str, float], ...]

    def specificity(self) -> int:
        score = 0
        if self.process != WILDCARD:
            score += 4
        if self.attribute != WILDCARD:
            score += 2
        if self.role != WILDCARD:
            score += 1
        return score

    def matches(self, process_id: str, attribute_id: str, role: Role) -> bool:
        return (
            self.process in (WILDCARD, process_id)
            and self.attribute in (WILDCARD, attribute_id)
            and self.role in (WILDCARD, role.value)
        )


@dataclass(frozen=True)
class RosterEntry:
    participant_id: str
    display_name: str
    assignments: tuple[tuple[str, Role], ...]


@dataclass(frozen=True)
class SimulationProfile:
    roster: tuple[RosterEntry, ...]
    rules: tuple[DistributionRule, ...]

    @classmethod
    def from_dict(cls, payload: dict) -> "SimulationProfile":
        if not isinstance(payload, dict):
            raise ParseError("profile must be a JSON object")

        raw_roster = payload.get("roster")
        if not isinstance(raw_roster, list) or not raw_roster:
            raise ParseError("roster: expected a non-empty list")
        roster: list[RosterEntry] = []
        for i, entry in enumerate(raw_roster):
            where = f"roster[{i}]"
            if not isinstance(entry, dict):
                raise ParseError(f"{where}: expected an object")
            participant_id = entry.get("id") or f"p{i + 1:02d}"
            display_name = entry.get("display_name") or f"Participant {i + 1:02d}"
            raw_assignments = entry.get("assignments")
            if not isinstance(raw_assignments, list) or not raw_assignments:
                raise ParseError(f"{where}.assignments: expected a non-empty list")
            assignments = []
            for j, asg in enumerate(raw_assignments):
                if not isinstance(asg, dict) or "process" not in asg or "role" not in asg:
                    raise ParseError(
                        f"{where}.assignments[{j}]: expected an object with process and role"
                    )
                try:
                    role = Role(asg["role"])
                except ValueError:
                    raise ParseError(
                        f"{where}.assignments[{j}].role: unknown role {asg['role']!r}"
                    ) from None
                assignments.append((asg["process"], role))
            roster.append(RosterEntry(participant_id, display_name, tuple(assignments)))

        ids = [r.participant_id for r in roster]
        if len(set(ids)) != len(ids):
            raise ParseError("roster: duplicate participant ids")

        raw_rules = payload.get("distributions")
        if not isinstance(raw_rules, list) or not raw_rules:
            raise ParseError("distributions: expected a non-empty list")
        rules: list[DistributionRule] = []
        for i, raw in enumerate(raw_rules):
            where = f"distributions[{i}]"
            if not isinstance(raw, dict):
                raise ParseError(f"{where}: expected an object")
            weights_raw = raw.get("weights")
            if not isinstance(weights_raw, dict) or not weights_raw:
                raise ParseError(f"{where}.weights: expected a non-empty object")
            for key, value in weights_raw.items():
                if key not in ANSWER_ORDER:
                    raise ParseError(f"{where}.weights: unknown answer option {key!r}")
                if not isinstance(value, (int, float)) or isinstance(value, bool) or value < 0:
                    raise ParseError(f"{where}.weights.{key}: expected a non-negative number")
            total = sum(weights_raw.values())
            if abs(total - 1.0) > 1e-9:
                raise ValidationError(f"{where}.weights: must sum to 1, got {total}")
            weights = tuple(
                (option, float(weights_raw.get(option, 0.0))) for option in ANSWER_ORDER
            )
            rules.append(DistributionRule(
                process=raw.get("process", WILDCARD),
                attribute=raw.get("attribute", WILDCARD),
                role=raw.get("role", WILDCARD),
                weights=weights,
            ))
        return cls(tuple(roster), tuple(rules))


def pick_rule(
    profile: SimulationProfile, process_id: str, attribute_id: str, role: Role
) -> DistributionRule:
    best: DistributionRule | None = None
    best_score = -1
    for rule in profile.rules:
        if not rule.matches(process_id, attribute_id, role):
            continue
        if rule.specificity() >= best_score:
            best = rule
            best_score = rule.specificity()
    if best is None:
        raise ValidationError(
            f"profile has no distribution for ({process_id}, {attribute_id}, {role.value})"
        )
    return best


def draw_answer(rng: random.Random, rule: DistributionRule) -> str:
    roll = rng.random()
    cumulative = 0.0
    for option, weight in rule.weights:
        cumulative += weight
        if roll < cumulative:
            return option
    for option, weight in reversed(rule.weights):
        if weight > 0:
            return option
    raise ValidationError("distribution has no positive weight")


def generate_responses(
    bank: ContentBank,
    assessment: Assessment,
    profile: SimulationProfile,
    seed: int,
) -> list[dict]:
    """Draw one answer per allocated question for every roster member.

    Participants must already be registered under their roster ids.
    Returns rows ready for the bulk-response file format.
    """
    rng = random.Random(seed)
    rows: list[dict] = []
    for entry in profile.roster:
        participant = assessment.participant(entry.participant_id)
        role_by_process = {a.process_id: a.role for a in participant.assignments}
        for process, question in allocate_questionnaire(bank, assessment, participant.id):
            role = role_by_process[process.id]
            rule = pick_rule(profile, process.id, question.attribute.id, role)
            rows.append({
                "participant": participant.id,
                "process": process.id,
                "question": question.id,
                "answer": draw_answer(rng, rule),
            })
    return rows
