"""Core domain vocabulary: capability levels, process attributes, rating
bands, roles, and answer options.

Everything here is immutable and safe to share between threads. The nine
process attributes follow the standard 1-2-2-2-2 shape: a single attribute at
level 1 and two at each of levels 2 through 5.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum, IntEnum


class CapabilityLevel(IntEnum):
    """Ordinal capability level of a process, 0 (incomplete) to 5 (optimising)."""

    CL0 = 0
    CL1 = 1
    CL2 = 2
    CL3 = 3
    CL4 = 4
    CL5 = 5


class ProcessAttribute(Enum):
    """The nine measurable process attributes, each owned by one level."""

    PA1_1 = ("PA1.1", CapabilityLevel.CL1)
    PA2_1 = ("PA2.1", CapabilityLevel.CL2)
    PA2_2 = ("PA2.2", CapabilityLevel.CL2)
    PA3_1 = ("PA3.1", CapabilityLevel.CL3)
    PA3_2 = ("PA3.2", CapabilityLevel.CL3)
    PA4_1 = ("PA4.1", CapabilityLevel.CL4)
    PA4_2 = ("PA4.2", CapabilityLevel.CL4)
    PA5_1 = ("PA5.1", CapabilityLevel.CL5)
    PA5_2 = ("PA5.2", CapabilityLevel.CL5)

    def __init__(self, attr_id: str, level: CapabilityLevel):
        self.id = attr_id
        self.level = level

    @classmethod
    def from_id(cls, attr_id: str) -> "ProcessAttribute":
        for attr in cls:
            if attr.id == attr_id:
                return attr
        raise ValueError(f"unknown process attribute id: {attr_id!r}")


# Canonical attribute order: PA1.1 first, then by level, then attribute index.
ALL_ATTRIBUTES: tuple[ProcessAttribute, ...] = tuple(ProcessAttribute)


@functools.total_ordering
class RatingBand(Enum):
    """Four-point achievement rating, totally ordered N < P < L < F."""

    N = "N"
    P = "P"
    L = "L"
    F = "F"

    @property
    def rank(self) -> int:
        return _BAND_RANK[self]

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, RatingBand):
            return NotImplemented
        return self.rank < other.rank


_BAND_RANK = {RatingBand.N: 0, RatingBand.P: 1, RatingBand.L: 2, RatingBand.F: 3}


class Role(str, Enum):
    """Process role a participant holds for a given process."""

    PROCESS_MANAGER = "ProcessManager"
    PROCESS_PERFORMER = "ProcessPerformer"
    EXTERNAL_STAKEHOLDER = "ExternalStakeholder"


class AnswerOption(str, Enum):
    """Answer option for a survey question.

    Unable carries no numeric value: it counts toward completion but is
    excluded from every score aggregation.
    """

    N = "N"
    P = "P"
    L = "L"
    F = "F"
    UNABLE = "Unable"


@dataclass(frozen=True)
class ProcessRef:
    """A process that can be assessed, identified by a short stable id."""

    id: str
    name: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("process id must be non-empty")


def attributes_at_or_below(level: CapabilityLevel) -> list[ProcessAttribute]:
    """Attributes whose level is at most ``level``, in canonical order."""
    return [attr for attr in ALL_ATTRIBUTES if attr.level <= level]


def compare_bands(a: RatingBand, b: RatingBand) -> int:
    """Three-way comparison consistent with N < P < L < F: -1, 0 or 1."""
    return (a.rank > b.rank) - (a.rank < b.rank)
